//! Exponent matrices E, the dilation group t^E and integer normalizations
//! B_n = ⌊n^E⌋.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default absolute tolerance for matrix identities.
pub const MATRIX_TOL: f64 = 1e-10;

/// An exponent matrix E = P·diag(1/α_1, …, 1/α_d)·P⁻¹.
///
/// P is any invertible real basis. Diagonal E uses P = I and is handled
/// without any matrix inversion.
#[derive(Clone, Debug)]
pub struct ExponentStructure {
    e: DMatrix<f64>,
    basis: Option<DMatrix<f64>>,
    basis_inv: Option<DMatrix<f64>>,
    alphas: Vec<f64>,
    tol: f64,
}

/// Serializable description used by the harness config.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentSpec {
    Diagonal { alphas: Vec<f64> },
    Rotated { basis: Vec<Vec<f64>>, alphas: Vec<f64> },
    Matrix { rows: Vec<Vec<f64>> },
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(invalid("exponent needs at least one axis"));
    }
    for &a in alphas {
        if !(a > 0.0 && a <= 2.0) {
            return Err(invalid(format!("stability index {a} outside (0, 2]")));
        }
    }
    Ok(())
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(invalid("matrix must be square and non-empty"));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

impl ExponentStructure {
    /// E = diag(1/α_i).
    pub fn diagonal(alphas: &[f64]) -> Result<Self> {
        check_alphas(alphas)?;
        let e = DMatrix::from_diagonal(&DVector::from_iterator(alphas.len(), alphas.iter().map(|a| 1.0 / a)));
        Ok(Self { e, basis: None, basis_inv: None, alphas: alphas.to_vec(), tol: MATRIX_TOL })
    }

    /// Same exponent 1/α on every axis.
    pub fn isotropic(d: usize, alpha: f64) -> Result<Self> {
        Self::diagonal(&vec![alpha; d])
    }

    /// E = P·diag(1/α_i)·P⁻¹ for an invertible basis P (columns are the
    /// eigenvectors).
    pub fn with_basis(basis: DMatrix<f64>, alphas: &[f64]) -> Result<Self> {
        check_alphas(alphas)?;
        let d = alphas.len();
        if basis.nrows() != d || basis.ncols() != d {
            return Err(invalid("basis dimension does not match exponents"));
        }
        let inv = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| invalid("basis matrix is singular"))?;
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(d, alphas.iter().map(|a| 1.0 / a)));
        let e = &basis * diag * &inv;
        Ok(Self { e, basis: Some(basis), basis_inv: Some(inv), alphas: alphas.to_vec(), tol: MATRIX_TOL })
    }

    /// Accepts a symmetric matrix E and diagonalizes it. Non-symmetric input
    /// must come with its eigenbasis through [`Self::with_basis`].
    pub fn from_matrix(e: DMatrix<f64>) -> Result<Self> {
        let d = e.nrows();
        if d == 0 || e.ncols() != d {
            return Err(invalid("exponent matrix must be square"));
        }
        let asym = (&e - e.transpose()).abs().max();
        if asym > MATRIX_TOL {
            return Err(Error::Unsupported(
                "non-symmetric exponent matrix without an explicit eigenbasis".into(),
            ));
        }
        let off_diag = (0..d).any(|i| (0..d).any(|j| i != j && e[(i, j)] != 0.0));
        if !off_diag {
            let alphas: Vec<f64> = (0..d).map(|i| 1.0 / e[(i, i)]).collect();
            return Self::diagonal(&alphas);
        }
        let eig = nalgebra::SymmetricEigen::new(e);
        let alphas: Vec<f64> = eig.eigenvalues.iter().map(|l| 1.0 / l).collect();
        if eig.eigenvalues.iter().any(|&l| l < 0.5 - MATRIX_TOL) {
            return Err(invalid("exponent matrix has an eigenvalue below 1/2"));
        }
        Self::with_basis(eig.eigenvectors, &alphas)
    }

    pub fn from_spec(spec: &ExponentSpec) -> Result<Self> {
        match spec {
            ExponentSpec::Diagonal { alphas } => Self::diagonal(alphas),
            ExponentSpec::Rotated { basis, alphas } => Self::with_basis(rows_to_matrix(basis)?, alphas),
            ExponentSpec::Matrix { rows } => Self::from_matrix(rows_to_matrix(rows)?),
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.e
    }

    /// Stability indices α_i, one per eigendirection.
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Eigenvector basis P, identity when E is diagonal.
    pub fn basis(&self) -> DMatrix<f64> {
        self.basis.clone().unwrap_or_else(|| DMatrix::identity(self.dim(), self.dim()))
    }

    pub fn is_diagonal(&self) -> bool {
        self.basis.is_none()
    }

    /// τ = tr E = Σ 1/α_i.
    pub fn trace(&self) -> f64 {
        self.alphas.iter().map(|a| 1.0 / a).sum()
    }

    /// Harmonic mean α with d/α = Σ 1/α_i.
    pub fn harmonic_alpha(&self) -> f64 {
        self.dim() as f64 / self.trace()
    }

    /// t^E.
    pub fn power(&self, t: f64) -> DMatrix<f64> {
        assert!(t > 0.0, "t^E needs t > 0");
        let d = self.dim();
        let diag = DVector::from_iterator(d, self.alphas.iter().map(|a| t.powf(1.0 / a)));
        match (&self.basis, &self.basis_inv) {
            (Some(p), Some(pinv)) => p * DMatrix::from_diagonal(&diag) * pinv,
            _ => DMatrix::from_diagonal(&diag),
        }
    }

    /// (t^E)^T, the dual dilation acting on frequencies.
    pub fn power_transpose(&self, t: f64) -> DMatrix<f64> {
        self.power(t).transpose()
    }

    /// δ_t x = t^E x.
    pub fn dilate(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let v = self.power(t) * DVector::from_column_slice(x);
        v.iter().copied().collect()
    }

    /// Coordinates of x in the eigenbasis, P⁻¹x.
    pub fn eigen_coords(&self, x: &[f64]) -> Vec<f64> {
        match &self.basis_inv {
            Some(pinv) => (pinv * DVector::from_column_slice(x)).iter().copied().collect(),
            None => x.to_vec(),
        }
    }

    /// If `y` is (up to scale) an eigenvector, returns the eigen index.
    pub fn eigen_direction(&self, y: &[f64]) -> Option<usize> {
        let c = self.eigen_coords(y);
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let mut hit: Option<usize> = None;
        for (i, v) in c.iter().enumerate() {
            if v.abs() > 1e-12 * norm {
                if let Some(j) = hit {
                    // several components are fine when they share one α
                    if (self.alphas[i] - self.alphas[j]).abs() > 1e-14 {
                        return None;
                    }
                } else {
                    hit = Some(i);
                }
            }
        }
        hit
    }
}

/// Integer matrix together with its determinant and adjugate, so that
/// B⁻¹ = adj(B)/det(B) exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub d: usize,
    pub entries: Vec<i64>,
    pub det: i128,
    pub adj: Vec<i128>,
}

fn det_i128(m: &[i128], d: usize) -> i128 {
    match d {
        0 => 1,
        1 => m[0],
        _ => {
            let mut total = 0i128;
            for j in 0..d {
                let a = m[j];
                if a == 0 {
                    continue;
                }
                let minor = minor_of(m, d, 0, j);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                total += sign * a * det_i128(&minor, d - 1);
            }
            total
        }
    }
}

fn minor_of(m: &[i128], d: usize, row: usize, col: usize) -> Vec<i128> {
    let mut out = Vec::with_capacity((d - 1) * (d - 1));
    for i in 0..d {
        if i == row {
            continue;
        }
        for j in 0..d {
            if j != col {
                out.push(m[i * d + j]);
            }
        }
    }
    out
}

impl IntMatrix {
    pub fn new(d: usize, entries: Vec<i64>) -> Self {
        assert_eq!(entries.len(), d * d);
        let wide: Vec<i128> = entries.iter().map(|&v| v as i128).collect();
        let det = det_i128(&wide, d);
        let mut adj = vec![0i128; d * d];
        if d == 1 {
            adj[0] = 1;
        } else {
            for i in 0..d {
                for j in 0..d {
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    // adj = transpose of the cofactor matrix
                    adj[j * d + i] = sign * det_i128(&minor_of(&wide, d, i, j), d - 1);
                }
            }
        }
        Self { d, entries, det, adj }
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.d + j]
    }

    pub fn is_invertible(&self) -> bool {
        self.det != 0
    }

    /// Checks B·adj(B) = det(B)·I in exact integer arithmetic.
    pub fn inverse_is_exact(&self) -> bool {
        let d = self.d;
        (0..d).all(|i| {
            (0..d).all(|j| {
                let s: i128 = (0..d).map(|k| self.entries[i * d + k] as i128 * self.adj[k * d + j]).sum();
                s == if i == j { self.det } else { 0 }
            })
        })
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.d, self.d, |i, j| self.get(i, j) as f64)
    }

    pub fn inverse_f64(&self) -> DMatrix<f64> {
        let det = self.det as f64;
        DMatrix::from_fn(self.d, self.d, |i, j| self.adj[i * self.d + j] as f64 / det)
    }

    /// B⁻¹x.
    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let det = self.det as f64;
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.adj[i * self.d + j] as f64 * x[j]).sum::<f64>() / det)
            .collect()
    }

    /// Bᵀ ξ.
    pub fn apply_transpose(&self, xi: &[f64]) -> Vec<f64> {
        (0..self.d)
            .map(|j| (0..self.d).map(|i| self.get(i, j) as f64 * xi[i]).sum())
            .collect()
    }

    pub fn abs_det(&self) -> f64 {
        (self.det as f64).abs()
    }
}

/// How B_n is produced from n.
#[derive(Clone, Debug)]
pub enum NormalizationRule {
    /// B_n = ⌊n^E⌋ entrywise.
    FloorPower,
    /// B_n read from a table indexed by n - 1.
    Table(Vec<IntMatrix>),
}

#[derive(Clone, Debug)]
pub struct NormalizationSequence {
    pub exponent: ExponentStructure,
    pub rule: NormalizationRule,
}

impl NormalizationSequence {
    pub fn floor(exponent: ExponentStructure) -> Self {
        Self { exponent, rule: NormalizationRule::FloorPower }
    }

    pub fn dim(&self) -> usize {
        self.exponent.dim()
    }

    /// B_n with exact inverse data.
    pub fn build(&self, n: u64) -> Result<IntMatrix> {
        if n == 0 {
            return Err(invalid("normalization index must be at least 1"));
        }
        let m = match &self.rule {
            NormalizationRule::FloorPower => {
                let p = self.exponent.power(n as f64);
                let d = self.dim();
                let entries = (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i, j)))
                    .map(|(i, j)| floor_snapped(p[(i, j)]))
                    .collect();
                IntMatrix::new(d, entries)
            }
            NormalizationRule::Table(t) => t
                .get((n - 1) as usize)
                .cloned()
                .ok_or_else(|| invalid(format!("normalization table has no entry for n = {n}")))?,
        };
        if !m.is_invertible() {
            return Err(Error::DegenerateNormalization(n));
        }
        Ok(m)
    }

    /// ‖B_n B_⌊nt⌋⁻¹ − t^{−E}‖_F for each n in the grid.
    pub fn regular_variation_check(&self, t: f64, n_grid: &[u64]) -> Result<Vec<f64>> {
        if n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n grid must be strictly increasing"));
        }
        let target = self.exponent.power(1.0 / t);
        n_grid
            .iter()
            .map(|&n| {
                let b = self.build(n)?.to_f64();
                let nt = ((n as f64) * t).floor().max(1.0) as u64;
                let bt = self.build(nt)?.inverse_f64();
                Ok((b * bt - &target).norm())
            })
            .collect()
    }
}

/// Floor that forgives floating error just below an integer.
fn floor_snapped(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as i64
    } else {
        x.floor() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_of_diagonal() {
        let es = ExponentStructure::diagonal(&[2.0, 2.0]).unwrap();
        let p = es.power(4.0);
        assert_eq!(p[(0, 0)], 2.0);
        assert_eq!(p[(1, 1)], 2.0);
        assert_eq!(p[(0, 1)], 0.0);

        let es = ExponentStructure::diagonal(&[1.0, 4.0 / 3.0]).unwrap();
        let p = es.power(5.0);
        assert!((p[(0, 0)] - 5.0).abs() < 1e-14);
        assert!((p[(1, 1)] - (0.75 * 5f64.ln()).exp()).abs() < 1e-13);
    }

    #[test]
    fn power_at_one_is_identity() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 2.0]);
        let es = ExponentStructure::with_basis(p, &[1.5, 0.8]).unwrap();
        let id = es.power(1.0);
        assert!((id - DMatrix::<f64>::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn build_bn_examples() {
        let ns = NormalizationSequence::floor(ExponentStructure::diagonal(&[2.0, 2.0]).unwrap());
        let b = ns.build(4).unwrap();
        assert_eq!(b.entries, vec![2, 0, 0, 2]);
        let ns = NormalizationSequence::floor(ExponentStructure::diagonal(&[2.0]).unwrap());
        assert_eq!(ns.build(5).unwrap().entries, vec![2]);
        let ns = NormalizationSequence::floor(ExponentStructure::diagonal(&[1.0]).unwrap());
        assert_eq!(ns.build(7).unwrap().entries, vec![7]);
    }

    #[test]
    fn rotated_bn_has_exact_inverse() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let p = DMatrix::from_row_slice(2, 2, &[c, -c, c, c]);
        let ns = NormalizationSequence::floor(ExponentStructure::with_basis(p, &[1.0, 1.5]).unwrap());
        for n in [3u64, 10, 100, 12345] {
            let b = ns.build(n).unwrap();
            assert!(b.inverse_is_exact());
        }
    }

    #[test]
    fn rotated_bn_degenerate_at_one() {
        // n = 1 gives the identity, still invertible; n = 2 floors entries of
        // a rotated 2^E and must not be silently singular
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let p = DMatrix::from_row_slice(2, 2, &[c, -c, c, c]);
        let ns = NormalizationSequence::floor(ExponentStructure::with_basis(p, &[2.0, 2.0]).unwrap());
        assert_eq!(ns.build(1).unwrap().entries, vec![1, 0, 0, 1]);
        let ns2 = NormalizationSequence::floor(
            ExponentStructure::with_basis(DMatrix::from_row_slice(2, 2, &[c, -c, c, c]), &[1.0, 2.0]).unwrap(),
        );
        match ns2.build(2) {
            Ok(b) => assert!(b.is_invertible()),
            Err(Error::DegenerateNormalization(2)) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn regular_variation_deviation_shrinks() {
        let ns = NormalizationSequence::floor(ExponentStructure::diagonal(&[2.0]).unwrap());
        let dev = ns.regular_variation_check(2.0, &[16, 4096]).unwrap();
        // B_16 = 4, B_32 = 5; B_4096 = 64, B_8192 = 90
        assert!((dev[0] - (0.8 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!((dev[1] - (64.0 / 90.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!(dev[1] < dev[0]);
        let ones = ns.regular_variation_check(1.0, &[3, 50, 700]).unwrap();
        assert!(ones.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn regular_variation_linear_exponent_is_tiny() {
        let ns = NormalizationSequence::floor(ExponentStructure::diagonal(&[1.0, 1.0]).unwrap());
        let dev = ns.regular_variation_check(2.0, &[5, 50, 500]).unwrap();
        assert!(dev.iter().all(|&v| v < 1e-14));
    }

    #[test]
    fn rejects_small_eigenvalues_and_jordan_input() {
        assert!(ExponentStructure::diagonal(&[2.5]).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(ExponentStructure::from_matrix(m), Err(Error::Unsupported(_))));
    }

    #[test]
    fn symmetric_matrix_round_trip() {
        let m = DMatrix::from_row_slice(2, 2, &[0.8, 0.1, 0.1, 0.7]);
        let es = ExponentStructure::from_matrix(m.clone()).unwrap();
        assert!((es.matrix() - m).norm() < 1e-13);
        assert!((es.trace() - 1.5).abs() < 1e-13);
    }

    #[test]
    fn eigen_direction_detection() {
        let es = ExponentStructure::diagonal(&[1.0, 1.5]).unwrap();
        assert_eq!(es.eigen_direction(&[0.0, -2.0]), Some(1));
        assert_eq!(es.eigen_direction(&[1.0, 1.0]), None);
        let iso = ExponentStructure::isotropic(2, 1.0).unwrap();
        assert_eq!(iso.eigen_direction(&[0.6, 0.8]), Some(0));
    }
}
