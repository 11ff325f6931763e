//! Small numerical kernels shared by the modules: compensated summation,
//! Hurwitz zeta tails, quadrature wrappers and special functions.

use std::num::NonZeroUsize;

use crate::error::{Error, Result};

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = Neumaier::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

// B_{2j} / (2j)!
const EM_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Hurwitz zeta ζ(s, q) = Σ_{k≥0} (k+q)^{-s} for s > 1, q > 0, by
/// Euler–Maclaurin after shifting q past 20.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0, "hurwitz_zeta needs s > 1, q > 0");
    let mut acc = Neumaier::new();
    let mut a = q;
    while a < 20.0 {
        acc.add(a.powf(-s));
        a += 1.0;
    }
    let mut tail = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) times a^{-s-2j+1}
    let mut rising = s;
    let mut apow = a.powf(-s - 1.0);
    for (j, c) in EM_COEFFS.iter().enumerate() {
        tail += c * rising * apow;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        apow /= a * a;
    }
    acc.add(tail);
    acc.value()
}

/// Σ_{k ≥ from} (1+k)^{-s}.
pub fn power_tail(s: f64, from: u64) -> f64 {
    hurwitz_zeta(s, from as f64 + 1.0)
}

/// Riemann zeta for s > 1.
pub fn zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(points: usize) -> Self {
        let n = NonZeroUsize::new(points.max(1)).expect("nonzero");
        let rule = gauss_quad::legendre::GaussLegendre::new(n);
        let (nodes, weights) = rule.as_node_weight_pairs().iter().copied().unzip();
        Self { nodes, weights }
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let m = 0.5 * (b + a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (m + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = Neumaier::new();
        for (x, w) in self.mapped(a, b) {
            acc.add(w * f(x));
        }
        acc.value()
    }

    /// Composite rule over `panels` equal panels.
    pub fn composite(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = Neumaier::new();
        for p in 0..panels {
            let lo = a + h * p as f64;
            for (x, w) in self.mapped(lo, lo + h) {
                acc.add(w * f(x));
            }
        }
        acc.value()
    }
}

/// Adaptive tanh-sinh quadrature on a finite interval.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    let out = quadrature::double_exponential::integrate(f, a, b, abs_tol);
    if !out.integral.is_finite() {
        return Err(Error::Numeric { what: "quadrature produced a non-finite value".into(), residual: f64::NAN });
    }
    if out.error_estimate > 1e3 * abs_tol.max(1e-15 * out.integral.abs()) {
        return Err(Error::Numeric { what: "quadrature did not reach tolerance".into(), residual: out.error_estimate });
    }
    Ok(out.integral)
}

pub fn gamma(x: f64) -> f64 {
    puruspe::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    puruspe::ln_gamma(x)
}

pub fn beta(a: f64, b: f64) -> f64 {
    puruspe::beta(a, b)
}

/// Bessel function of the first kind J_ν(x) for real ν ≥ 0 and x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x > 30.0 + nu * nu {
        return bessel_j_hankel(nu, x);
    }
    puruspe::besseljy(nu, x).0
}

/// Hankel's asymptotic expansion, truncated at its smallest term.
fn bessel_j_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() >= last || term.abs() < 1e-17 {
            break;
        }
        last = term.abs();
        // k odd feeds Q, k even feeds P, with alternating signs in each
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - (0.5 * nu + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// J_ν(x) / x^ν, continuous at x = 0 where it equals 1/(2^ν Γ(ν+1)).
pub fn bessel_j_scaled(nu: f64, x: f64) -> f64 {
    if x < 1e-4 {
        let lead = 1.0 / (2f64.powf(nu) * gamma(nu + 1.0));
        return lead * (1.0 - x * x / (4.0 * (nu + 1.0)));
    }
    bessel_j(nu, x) / x.powf(nu)
}

/// C(α) = ∫_0^∞ (1 - cos v) v^{-1-α} dv = Γ(1-α) cos(πα/2) / α, with the
/// removable point α = 1 giving π/2.
pub fn one_minus_cos_moment(alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 2.0);
    if (alpha - 1.0).abs() < 1e-9 {
        return std::f64::consts::FRAC_PI_2;
    }
    gamma(1.0 - alpha) * (std::f64::consts::FRAC_PI_2 * alpha).cos() / alpha
}

/// Smallest x in [lo, hi] with `pred(x)` true, assuming monotone predicate.
pub fn bisect_f64(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > tol * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
