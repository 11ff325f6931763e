//! Lattice points of Z^d for d ≤ [`MAX_DIM`].

use serde::{Deserialize, Serialize};

pub const MAX_DIM: usize = 4;

/// A point of Z^d stored in a fixed-size array; unused trailing coordinates
/// are zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site(pub [i64; MAX_DIM]);

impl Site {
    pub const ORIGIN: Site = Site([0; MAX_DIM]);

    pub fn from_slice(x: &[i64]) -> Self {
        assert!(x.len() <= MAX_DIM, "dimension above {MAX_DIM}");
        let mut s = [0; MAX_DIM];
        s[..x.len()].copy_from_slice(x);
        Site(s)
    }

    /// k·e_i.
    pub fn axis(i: usize, k: i64) -> Self {
        let mut s = [0; MAX_DIM];
        s[i] = k;
        Site(s)
    }

    pub fn coords(&self, d: usize) -> &[i64] {
        &self.0[..d]
    }

    pub fn to_f64(&self, d: usize) -> Vec<f64> {
        self.0[..d].iter().map(|&v| v as f64).collect()
    }

    pub fn is_origin(&self) -> bool {
        *self == Self::ORIGIN
    }

    #[inline]
    pub fn add(self, other: Site) -> Site {
        let mut s = self.0;
        for (a, b) in s.iter_mut().zip(other.0) {
            *a = a.wrapping_add(b);
        }
        Site(s)
    }

    pub fn neg(self) -> Site {
        Site(self.0.map(|v| -v))
    }

    pub fn l1(&self) -> u64 {
        self.0.iter().map(|v| v.unsigned_abs()).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt()
    }

    pub fn dot(&self, xi: &[f64]) -> f64 {
        xi.iter().zip(self.0).map(|(x, v)| x * v as f64).sum()
    }
}

impl std::fmt::Display for Site {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let last = self.0.iter().rposition(|&v| v != 0).unwrap_or(0);
        write!(f, "(")?;
        for (i, v) in self.0[..=last].iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}
