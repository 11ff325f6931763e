//! Scaling sequences a_n, principal Dirichlet eigenvalues of the limit
//! generator and the closed-form limit constants.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::dilation::NormalizationSequence;
use crate::error::{invalid, Error, Result};
use crate::numerics::{self, bessel_j_scaled, gamma, GaussRule, Neumaier};
use crate::occupation::ProfileF;
use crate::par::Execution;
use crate::stablelaw::{sphere_area, LimitLaw};

/// Solution of a det(B_a) F(n / det(B_a)) / n = 1.
#[derive(Clone, Debug)]
pub struct ScalingSolution {
    pub profile: ProfileF,
    pub normalization: NormalizationSequence,
    pub gamma: f64,
    pub kappa: f64,
    /// F̃(1); the defining equation normalizes it to 1.
    pub ftilde_at_1: f64,
    pub tau: f64,
}

pub fn solve_scaling(f: &ProfileF, ns: &NormalizationSequence) -> Result<ScalingSolution> {
    f.validate()?;
    let tau = ns.exponent.trace();
    let g = f.gamma();
    let kappa = (1.0 - g) / (1.0 + tau * (1.0 - g));
    Ok(ScalingSolution { profile: f.clone(), normalization: ns.clone(), gamma: g, kappa, ftilde_at_1: 1.0, tau })
}

impl ScalingSolution {
    fn lhs(&self, a: f64, det: f64, n: u64) -> f64 {
        a * det * self.profile.eval(n as f64 / det) / n as f64
    }

    /// Integer a_n: the largest a in [1, n] with a det(B_a) F(n/det B_a) ≤ n,
    /// using the integer matrices B_a.
    pub fn a_n(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(invalid("a_n needs n ≥ 1"));
        }
        let lhs = |a: u64| -> Result<f64> {
            let det = self.normalization.build(a)?.abs_det();
            Ok(self.lhs(a as f64, det, n))
        };
        if lhs(1)? > 1.0 {
            return Err(Error::NoScalingRoot { n });
        }
        let (mut lo, mut hi) = (1u64, n);
        if lhs(hi)? <= 1.0 {
            return Ok(hi);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if lhs(mid)? <= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Real root a′_n of a^{1+τ} F(n a^{-τ}) = n, where det(a^E) = a^τ.
    pub fn a_real(&self, n: u64) -> Result<f64> {
        let tau = self.tau;
        let h = |a: f64| self.lhs(a, a.powf(tau), n) - 1.0;
        let (mut lo, mut hi) = (1.0f64, n as f64);
        if h(lo) > 0.0 || h(hi) < 0.0 {
            return Err(Error::NoScalingRoot { n });
        }
        // bisection in log a keeps relative precision
        for _ in 0..200 {
            let mid = (0.5 * (lo.ln() + hi.ln())).exp();
            if h(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-15 {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Relative residual of the defining equation at the real root.
    pub fn residual(&self, n: u64) -> Result<f64> {
        let a = self.a_real(n)?;
        Ok((self.lhs(a, a.powf(self.tau), n) - 1.0).abs())
    }
}

/// |a′_{⌊λn⌋}/a′_n - λ^κ| along `n_grid`.
pub fn regular_variation_a(sol: &ScalingSolution, lambda: f64, n_grid: &[u64]) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return Err(invalid("λ must be positive"));
    }
    n_grid
        .iter()
        .map(|&n| {
            let m = ((lambda * n as f64).floor() as u64).max(1);
            if m == n {
                return Ok(0.0);
            }
            Ok((sol.a_real(m)? / sol.a_real(n)? - lambda.powf(sol.kappa)).abs())
        })
        .collect()
}

/// Bounded domain U.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    Box { sides: Vec<f64> },
    Ball { dim: usize, radius: f64 },
}

impl Domain {
    pub fn volume(&self) -> f64 {
        match self {
            Domain::Interval { lo, hi } => hi - lo,
            Domain::Box { sides } => sides.iter().product(),
            Domain::Ball { dim, radius } => unit_ball_volume(*dim) * radius.powi(*dim as i32),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Box { sides } => sides.len(),
            Domain::Ball { dim, .. } => *dim,
        }
    }

    /// Ball of unit volume.
    pub fn unit_ball(dim: usize) -> Self {
        Domain::Ball { dim, radius: unit_ball_volume(dim).powf(-1.0 / dim as f64) }
    }
}

pub fn unit_ball_volume(d: usize) -> f64 {
    sphere_area(d) / d as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenResult {
    pub lambda: f64,
    pub domain: Domain,
    pub volume: f64,
    pub ritz_dimension: usize,
    /// Share of λ carried by the analytic frequency tail; a measure of how
    /// much the result leans on the asymptotic model of Θ.
    pub residual: f64,
}

/// Gram matrices above this condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Rayleigh–Ritz upper bound for λ₁(Θ, U).
pub fn eigen_rayleigh(ll: &LimitLaw, domain: &Domain, basis_size: usize, exec: Execution) -> Result<EigenResult> {
    if basis_size == 0 {
        return Err(invalid("basis size must be positive"));
    }
    if !(domain.volume() > 0.0) {
        return Err(invalid("domain needs positive volume"));
    }
    if domain.dim() != ll.dim() {
        return Err(invalid("domain dimension does not match the law"));
    }
    match domain {
        Domain::Interval { lo, hi } => {
            let sep = ll.separable().ok_or_else(|| Error::Unsupported("non-separable symbol".into()))?;
            let (lambda, residual) = interval_eigen(&sep.terms[0..1], hi - lo, basis_size, exec)?;
            Ok(EigenResult { lambda, domain: domain.clone(), volume: hi - lo, ritz_dimension: basis_size, residual })
        }
        Domain::Box { sides } => {
            let sep = ll
                .separable()
                .ok_or_else(|| Error::Unsupported("boxes need a symbol that splits along the axes".into()))?;
            let mut lambda = 0.0;
            let mut residual = 0.0f64;
            for (i, l) in sides.iter().enumerate() {
                let (li, ri) = interval_eigen(&sep.terms[i..i + 1], *l, basis_size, exec)?;
                lambda += li;
                residual = residual.max(ri);
            }
            Ok(EigenResult {
                lambda,
                domain: domain.clone(),
                volume: domain.volume(),
                ritz_dimension: basis_size * sides.len(),
                residual,
            })
        }
        Domain::Ball { dim, radius } => {
            if *dim == 1 {
                return eigen_rayleigh(ll, &Domain::Interval { lo: -radius, hi: *radius }, basis_size, exec)
                    .map(|r| EigenResult { domain: domain.clone(), ..r });
            }
            if *dim > 3 {
                return Err(Error::Unsupported("ball quadrature above d = 3".into()));
            }
            let (alpha, k) = ll
                .radial_profile()
                .ok_or_else(|| Error::Unsupported("balls need a rotation-invariant symbol".into()))?;
            let (lam1, residual) = ball_eigen(*dim, alpha, basis_size, exec)?;
            Ok(EigenResult {
                lambda: k * lam1 * radius.powf(-alpha),
                domain: domain.clone(),
                volume: domain.volume(),
                ritz_dimension: basis_size,
                residual,
            })
        }
    }
}

/// Larger polynomial bases on the ball make the Gram matrix singular in
/// double precision.
pub const BALL_BASIS_MAX: usize = 7;

/// Frequency cutoff used for sine bases of at most this many functions.
const SINE_REFERENCE: usize = 128;

/// Smallest eigenvalue of Θ = Σ k|ξ|^α on (0, L) in the basis
/// √(2/L) sin(jπx/L), j = 1..=m. The quadrature nodes do not depend on m,
/// so smaller bases give principal submatrices of larger ones.
fn interval_eigen(terms: &[(f64, f64)], len: f64, m: usize, exec: Execution) -> Result<(f64, f64)> {
    let theta = |x: f64| terms.iter().map(|(a, k)| k * x.powf(*a)).sum::<f64>();
    let omega: Vec<f64> = (1..=m).map(|j| j as f64 * PI / len).collect();
    let m_ref = m.max(SINE_REFERENCE);
    let panel = PI / len;
    let panels = 40 * m_ref + 20;
    let cutoff = panel * panels as f64;
    let rule = GaussRule::new(10);
    // graded first panel for the kink of |ξ|^α at the origin
    let mut edges = vec![0.0];
    let mut e = panel;
    let mut small = Vec::new();
    for _ in 0..20 {
        e *= 0.5;
        small.push(e);
    }
    small.reverse();
    edges.extend(small);
    edges.extend((1..=panels).map(|p| panel * p as f64));
    let nodes: Vec<(f64, f64)> = edges.windows(2).flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>()).collect();
    // A_jk = (8/(πL)) ω_j ω_k (-1)^{(k-j)/2} (L/2)² ∫_0^∞ Θ s_j s_k / ((ξ+ω_j)(ξ+ω_k)) dξ for j ≡ k mod 2,
    // with s_j = sinc(L(ξ-ω_j)/2)
    let sinc = |u: f64| if u.abs() < 1e-8 { 1.0 - u * u / 6.0 } else { u.sin() / u };
    let cols: Vec<Vec<f64>> = exec.map(m, |j| {
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        nodes
            .iter()
            .map(|&(x, _)| sign * omega[j] * sinc(0.5 * len * (x - omega[j])) / (x + omega[j]))
            .collect()
    });
    let weights: Vec<f64> = nodes.iter().map(|&(x, w)| w * theta(x)).collect();
    let pref = 8.0 / (PI * len) * 0.25 * len * len;
    let mut a = DMatrix::zeros(m, m);
    let mut tail = DMatrix::zeros(m, m);
    let entries: Vec<(usize, usize, f64)> = exec
        .map(m * m, |idx| {
            let (j, k) = (idx / m, idx % m);
            if k < j || (j + k) % 2 == 1 {
                return None;
            }
            let mut acc = Neumaier::new();
            for (t, w) in weights.iter().enumerate() {
                acc.add(w * cols[j][t] * cols[k][t]);
            }
            Some((j, k, pref * acc.value()))
        })
        .into_iter()
        .flatten()
        .collect();
    for (j, k, v) in entries {
        // analytic tail: 1 - s cos ξL averages to 1 beyond the cutoff
        let mut t = 0.0;
        for (al, kk) in terms {
            t += kk * (cutoff.powf(al - 3.0) / (3.0 - al) + (omega[j].powi(2) + omega[k].powi(2)) * cutoff.powf(al - 5.0) / (5.0 - al));
        }
        let t = 2.0 / (PI * len) * 2.0 * omega[j] * omega[k] * t;
        a[(j, k)] = v + t;
        a[(k, j)] = v + t;
        tail[(j, k)] = t;
        tail[(k, j)] = t;
    }
    let eig = SymmetricEigen::new(a);
    let (i, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(y.1).unwrap())
        .unwrap();
    let v = eig.eigenvectors.column(i);
    let share = (v.transpose() * &tail * v)[(0, 0)] / lambda;
    Ok((lambda, share.abs()))
}

/// Smallest eigenvalue of ‖ξ‖^α on the unit ball of R^d in the basis
/// (1 - |x|²)^{α/2 + j}, j < m, by the generalized eigenproblem.
fn ball_eigen(d: usize, alpha: f64, m: usize, exec: Execution) -> Result<(f64, f64)> {
    let half = d as f64 / 2.0;
    let mu: Vec<f64> = (0..m).map(|j| alpha / 2.0 + j as f64).collect();
    // f̂_μ(ρ) = π^{d/2} Γ(μ+1) 2^{d/2+μ} J_{d/2+μ}(ρ)/ρ^{d/2+μ}
    let amp: Vec<f64> = mu.iter().map(|&u| PI.powf(half) * gamma(u + 1.0) * 2f64.powf(half + u)).collect();
    let mut gram = DMatrix::zeros(m, m);
    for j in 0..m {
        for k in 0..m {
            let s = mu[j] + mu[k];
            gram[(j, k)] = PI.powf(half) * gamma(s + 1.0) / gamma(s + 1.0 + half);
        }
    }
    let cutoff = 4000.0;
    let panel = PI / 2.0;
    let panels = (cutoff / panel).ceil() as usize;
    let rule = GaussRule::new(12);
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| rule.mapped(panel * p as f64, panel * (p + 1) as f64).collect::<Vec<_>>())
        .collect();
    let cutoff = panel * panels as f64;
    let cols: Vec<Vec<f64>> =
        exec.map(m, |j| nodes.iter().map(|&(r, _)| amp[j] * bessel_j_scaled(half + mu[j], r)).collect());
    let radial = sphere_area(d) / (2.0 * PI).powi(d as i32);
    let weights: Vec<f64> = nodes.iter().map(|&(r, w)| w * r.powf(alpha + d as f64 - 1.0)).collect();
    let mut a = DMatrix::zeros(m, m);
    let mut tail = DMatrix::zeros(m, m);
    for j in 0..m {
        for k in j..m {
            let mut acc = Neumaier::new();
            for (t, w) in weights.iter().enumerate() {
                acc.add(w * cols[j][t] * cols[k][t]);
            }
            // J_a J_b ≈ (1/(πr)) cos((μ_j - μ_k)π/2) on average
            let e = mu[j] + mu[k] + 1.0 - alpha;
            let t = radial * amp[j] * amp[k] * ((mu[j] - mu[k]) * PI / 2.0).cos() / PI * cutoff.powf(-e) / e;
            let v = radial * acc.value() + t;
            a[(j, k)] = v;
            a[(k, j)] = v;
            tail[(j, k)] = t;
            tail[(k, j)] = t;
        }
    }
    let ge = SymmetricEigen::new(gram.clone());
    let (gmin, gmax) = ge.eigenvalues.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let cond = gmax / gmin;
    if !(gmin > 0.0) || cond > MAX_CONDITION {
        return Err(Error::IllConditioned(cond));
    }
    let chol = gram.cholesky().ok_or(Error::IllConditioned(cond))?;
    let l_inv = chol.l().try_inverse().ok_or(Error::IllConditioned(cond))?;
    let c = &l_inv * &a * l_inv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let (i, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(y.1).unwrap())
        .unwrap();
    let y = l_inv.transpose() * eig.eigenvectors.column(i);
    let share = (y.transpose() * &tail * &y)[(0, 0)] / lambda;
    Ok((lambda, share.abs()))
}

/// λ_Θ search result with the shapes that were tried.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaTheta {
    pub best: EigenResult,
    /// (description, λ₁) for each shape tried.
    pub tried: Vec<(String, f64)>,
}

/// Aspect grid for boxes: side i is exp(t_i) with Σ t_i = 0.
pub const ASPECT_GRID: usize = 41;

/// inf of λ₁(Θ, U) over unit-volume boxes (aspect grid search) and the
/// unit-volume ball.
pub fn lambda_theta(ll: &LimitLaw, basis_size: usize, exec: Execution) -> Result<LambdaTheta> {
    let d = ll.dim();
    if d == 1 {
        let r = eigen_rayleigh(ll, &Domain::Interval { lo: 0.0, hi: 1.0 }, basis_size, exec)?;
        return Ok(LambdaTheta { tried: vec![("interval 1".into(), r.lambda)], best: r });
    }
    let mut tried = Vec::new();
    let mut best: Option<EigenResult> = None;
    if let Some(sep) = ll.separable() {
        // λ₁ on (0, L) scales as L^{-α}
        let unit: Vec<f64> = (0..d)
            .map(|i| eigen_rayleigh_1d(sep.terms[i], basis_size, exec))
            .collect::<Result<_>>()?;
        let value = |t: &[f64]| -> f64 {
            let mut logs = t.to_vec();
            let mean = logs.iter().sum::<f64>() / d as f64;
            logs.iter_mut().for_each(|v| *v -= mean);
            (0..d).map(|i| unit[i] * (-sep.terms[i].0 * logs[i]).exp()).sum()
        };
        let grid: Vec<f64> = (0..ASPECT_GRID).map(|i| -3.0 + 6.0 * i as f64 / (ASPECT_GRID - 1) as f64).collect();
        let mut best_t = vec![0.0; d];
        let mut best_v = f64::INFINITY;
        let mut visit = |t: Vec<f64>, tried: &mut Vec<(String, f64)>| {
            let v = value(&t);
            tried.push((format!("box log-aspect {:?}", t), v));
            if v < best_v {
                best_v = v;
                best_t = t;
            }
        };
        match d {
            2 => {
                for &t in &grid {
                    visit(vec![t, -t], &mut tried);
                }
            }
            _ => {
                for &t1 in &grid {
                    for &t2 in &grid {
                        visit(vec![t1, t2, -(t1 + t2)], &mut tried);
                    }
                }
            }
        }
        // refine around the grid optimum by coordinate golden sections
        let mut t = best_t.clone();
        for _ in 0..4 {
            for i in 0..d - 1 {
                let f = |s: f64| {
                    let mut u = t.clone();
                    u[i] = s;
                    u[d - 1] = -(u[..d - 1].iter().sum::<f64>());
                    value(&u)
                };
                t[i] = golden_min(f, t[i] - 0.3, t[i] + 0.3);
                t[d - 1] = -(t[..d - 1].iter().sum::<f64>());
            }
        }
        let mean = t.iter().sum::<f64>() / d as f64;
        let sides: Vec<f64> = t.iter().map(|v| (v - mean).exp()).collect();
        let r = eigen_rayleigh(ll, &Domain::Box { sides }, basis_size, exec)?;
        tried.push(("box refined".into(), r.lambda));
        best = Some(r);
    }
    if ll.radial_profile().is_some() && d <= 3 {
        let m = basis_size.min(BALL_BASIS_MAX);
        let r = eigen_rayleigh(ll, &Domain::unit_ball(d), m, exec)?;
        tried.push(("ball".into(), r.lambda));
        let box_best = best.as_ref().map(|b| b.lambda).unwrap_or(f64::INFINITY);
        if r.lambda >= box_best {
            return Err(Error::Numeric {
                what: "unit ball does not beat the best box for a rotation-invariant symbol".into(),
                residual: r.lambda - box_best,
            });
        }
        best = Some(r);
    }
    let best = best.ok_or_else(|| Error::Unsupported("symbol is neither axis-separable nor rotation invariant".into()))?;
    Ok(LambdaTheta { best, tried })
}

fn eigen_rayleigh_1d(term: (f64, f64), m: usize, exec: Execution) -> Result<f64> {
    Ok(interval_eigen(&[term], 1.0, m, exec)?.0)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    DvTheta,
    WreathZd,
    SchmidtGamma,
    Nonamenable,
    CustomRayleigh,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantReport {
    pub formula: FormulaId,
    pub inputs: BTreeMap<String, f64>,
    pub value: f64,
    pub residuals: BTreeMap<String, f64>,
}

impl ConstantReport {
    fn new(formula: FormulaId, inputs: &[(&str, f64)], value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Numeric { what: "constant outside (0, ∞)".into(), residual: value });
        }
        Ok(Self {
            formula,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value,
            residuals: BTreeMap::new(),
        })
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive")))
    }
}

/// k = θ^{1/(τ+1)} (τ+1) (λ₁/τ)^{τ/(τ+1)}.
pub fn constant_dv_theta(theta: f64, tr_e: f64, lambda1: f64) -> Result<ConstantReport> {
    positive("θ", theta)?;
    positive("tr E", tr_e)?;
    positive("λ₁", lambda1)?;
    let k = theta.powf(1.0 / (tr_e + 1.0)) * (tr_e + 1.0) * (lambda1 / tr_e).powf(tr_e / (tr_e + 1.0));
    ConstantReport::new(FormulaId::DvTheta, &[("theta", theta), ("tr_e", tr_e), ("lambda1", lambda1)], k)
}

/// c(α, d, Θ, D) = (D/2)^{α/(d+α)} (1 + d/α) (α λ_Θ / d)^{d/(d+α)}.
pub fn constant_wreath_zd(alpha: f64, d: u32, lambda_theta: f64, lamp_dim: u32) -> Result<ConstantReport> {
    if !(alpha > 0.0 && alpha <= 2.0) || d == 0 || lamp_dim == 0 {
        return Err(invalid("need α in (0, 2] and d, D ≥ 1"));
    }
    positive("λ_Θ", lambda_theta)?;
    let (a, df, dd) = (alpha, d as f64, lamp_dim as f64);
    let c = (dd / 2.0).powf(a / (df + a)) * (1.0 + df / a) * (a * lambda_theta / df).powf(df / (df + a));
    ConstantReport::new(
        FormulaId::WreathZd,
        &[("alpha", a), ("d", df), ("lambda_theta", lambda_theta), ("lamp_dim", dd)],
        c,
    )
}

/// Closed form for E = a∫|f′|² on R and F̃(y) = c y^γ.
pub fn constant_schmidt(gamma_: f64, a: f64, c: f64) -> Result<ConstantReport> {
    if !(gamma_ > 0.0 && gamma_ < 1.0) {
        return Err(invalid("γ must lie in (0, 1)"));
    }
    positive("a", a)?;
    positive("c", c)?;
    let g = gamma_;
    let inner = PI.sqrt() * gamma((3.0 - g) / (2.0 - 2.0 * g)) / gamma(1.0 / (1.0 - g));
    let k = c.powf(2.0 / (3.0 - g))
        * (2.0 * a).powf((1.0 - g) / (3.0 - g))
        * ((3.0 - g) / (1.0 + g))
        * inner.powf((2.0 - 2.0 * g) / (3.0 - g));
    ConstantReport::new(FormulaId::SchmidtGamma, &[("gamma", g), ("a", a), ("c", c)], k)
}

/// Profile integrals of φ(x) = (cos x)^{1/(1-γ)} on |x| ≤ π/2:
/// (∫φ², ∫φ′², ∫φ^{2γ}).
fn schmidt_profile_integrals(g: f64) -> Result<(f64, f64, f64)> {
    let p = 1.0 / (1.0 - g);
    let tol = 1e-14;
    let n2 = 2.0 * numerics::integrate(|x| x.cos().powf(2.0 * p), 0.0, PI / 2.0, tol)?;
    let d2 = 2.0 * numerics::integrate(|x| (p * x.cos().powf(p - 1.0) * x.sin()).powi(2), 0.0, PI / 2.0, tol)?;
    let m = 2.0 * numerics::integrate(|x| x.cos().powf(2.0 * g * p), 0.0, PI / 2.0, tol)?;
    Ok((n2, d2, m))
}

/// Minimum over s > 0 of a∫|f′|² + c∫|f|^{2γ} for f = A φ(x/s), ‖f‖₂ = 1.
pub fn schmidt_minimization(gamma_: f64, a: f64, c: f64) -> Result<f64> {
    if !(gamma_ > 0.0 && gamma_ < 1.0) {
        return Err(invalid("γ must lie in (0, 1)"));
    }
    let (n2, d2, m) = schmidt_profile_integrals(gamma_)?;
    let energy = |log_s: f64| {
        let s = log_s.exp();
        let amp2 = 1.0 / (s * n2);
        a * amp2 * d2 / s + c * amp2.powf(gamma_) * s * m
    };
    let t = golden_min(energy, -20.0, 20.0);
    Ok(energy(t))
}

/// k = 2 log(1/ρ) = -log ρ².
pub fn constant_nonamenable(rho: f64) -> Result<ConstantReport> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid("spectral radius must lie in (0, 1)"));
    }
    ConstantReport::new(FormulaId::Nonamenable, &[("rho", rho)], -2.0 * rho.ln())
}

/// dv_theta with λ₁ replaced by the Rayleigh–Ritz λ_Θ of `ll`.
pub fn constant_custom_rayleigh(ll: &LimitLaw, theta: f64, basis_size: usize, exec: Execution) -> Result<ConstantReport> {
    let lt = lambda_theta(ll, basis_size, exec)?;
    let tau = ll.exponent().trace();
    let base = constant_dv_theta(theta, tau, lt.best.lambda)?;
    let mut r = ConstantReport::new(FormulaId::CustomRayleigh, &[("theta", theta), ("tr_e", tau), ("lambda1", lt.best.lambda)], base.value)?;
    r.residuals.insert("frequency_tail_share".into(), lt.best.residual);
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IteratedExponents {
    /// γ_i = Σ_{j ≤ i} d_j/α_j.
    pub gammas: Vec<f64>,
    /// Return probability decays like exp(-n^{γ_k/(1+γ_k)}).
    pub exponent: f64,
    /// Z^{d_0} lamps add a (log n)^{1/(1+γ_k)} factor.
    pub log_correction: bool,
}

pub fn iterated_exponents(alphas: &[f64], dims: &[u32], lattice_lamps: bool) -> Result<IteratedExponents> {
    if alphas.len() != dims.len() || alphas.is_empty() {
        return Err(invalid("need equal, nonempty lists of α and d"));
    }
    if alphas.iter().any(|&a| !(a > 0.0 && a <= 2.0)) || dims.contains(&0) {
        return Err(invalid("need α in (0, 2] and d ≥ 1"));
    }
    let mut acc = 0.0;
    let gammas: Vec<f64> = alphas
        .iter()
        .zip(dims)
        .map(|(&a, &d)| {
            acc += d as f64 / a;
            acc
        })
        .collect();
    let gk = *gammas.last().unwrap();
    Ok(IteratedExponents { exponent: gk / (1.0 + gk), gammas, log_correction: lattice_lamps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::ExponentStructure;

    fn ns(alphas: &[f64]) -> NormalizationSequence {
        NormalizationSequence::floor(ExponentStructure::diagonal(alphas).unwrap())
    }

    #[test]
    fn kappa_examples() {
        let s = solve_scaling(&ProfileF::Power { nu: 1.0, gamma: 0.5 }, &ns(&[2.0])).unwrap();
        assert!((s.kappa - 0.4).abs() < 1e-15);
        let s = solve_scaling(&ProfileF::Indicator { nu: 1.0 }, &ns(&[1.0])).unwrap();
        assert!((s.kappa - 0.5).abs() < 1e-15);
        let lin = solve_scaling(&ProfileF::Linear { theta: 0.25 }, &ns(&[2.0])).unwrap();
        assert_eq!(lin.kappa, 0.0);
        assert_eq!(lin.a_n(1_000_000).unwrap(), 4);
        assert!((lin.a_real(1000).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn real_root_solves_the_equation() {
        let s = solve_scaling(&ProfileF::Power { nu: 1.0, gamma: 0.5 }, &ns(&[2.0])).unwrap();
        for n in [10u64, 1000, 1_000_000] {
            assert!(s.residual(n).unwrap() < 1e-9);
            let exact = (n as f64).powf(0.4);
            assert!((s.a_real(n).unwrap() / exact - 1.0).abs() < 1e-12);
        }
        let a: Vec<u64> = (1..200).map(|n| s.a_n(n).unwrap()).collect();
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
        let dev = regular_variation_a(&s, 2.0, &[1_000_000]).unwrap();
        assert!(dev[0] < 0.01);
        assert_eq!(regular_variation_a(&s, 1.0, &[50]).unwrap()[0], 0.0);
    }

    #[test]
    fn laplacian_on_unit_interval() {
        let ll = LimitLaw::symmetric_stable(2.0, 1.0).unwrap();
        let r = eigen_rayleigh(&ll, &Domain::Interval { lo: 0.0, hi: 1.0 }, 64, Execution::Parallel).unwrap();
        assert!((r.lambda / (PI * PI) - 1.0).abs() < 1e-6, "{}", r.lambda);
        let half = LimitLaw::symmetric_stable(2.0, 0.5).unwrap();
        let r = eigen_rayleigh(&half, &Domain::Interval { lo: 0.0, hi: 1.0 }, 16, Execution::Sequential).unwrap();
        assert!((r.lambda / (PI * PI / 2.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ball_beats_square_for_the_laplacian() {
        let ll = LimitLaw::isotropic(2, 2.0, 1.0).unwrap();
        let lt = lambda_theta(&ll, 16, Execution::Parallel).unwrap();
        let j01 = 2.404_825_557_695_773f64;
        assert!((lt.best.lambda / (PI * j01 * j01) - 1.0).abs() < 1e-6, "{}", lt.best.lambda);
        let sq = eigen_rayleigh(&ll, &Domain::Box { sides: vec![1.0, 1.0] }, 16, Execution::Parallel).unwrap();
        assert!((sq.lambda / (2.0 * PI * PI) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn constants() {
        let k = constant_dv_theta(1.0, 0.5, PI * PI / 2.0).unwrap().value;
        assert!((k - 1.5 * PI.powf(2.0 / 3.0)).abs() < 1e-12);
        let w = constant_wreath_zd(2.0, 1, PI * PI / 2.0, 3).unwrap().value;
        let dv = constant_dv_theta(1.5, 0.5, PI * PI / 2.0).unwrap().value;
        assert!((w - dv).abs() < 1e-12);
        let s = constant_schmidt(0.5, 0.5, 1.0).unwrap();
        let inner = PI.sqrt() * gamma(2.5) / gamma(2.0);
        assert!((inner - 0.75 * PI).abs() < 1e-13);
        assert!(s.value > 0.0);
        assert!((constant_nonamenable(0.5).unwrap().value - 2.0 * 2f64.ln()).abs() < 1e-15);
        let it = iterated_exponents(&[2.0, 2.0], &[1, 1], false).unwrap();
        assert_eq!(it.gammas, vec![0.5, 1.0]);
        assert!((it.exponent - 0.5).abs() < 1e-15);
    }

    #[test]
    fn schmidt_minimization_matches_the_closed_form_with_doubled_a() {
        for g in [0.3, 0.5, 0.7] {
            let closed = constant_schmidt(g, 0.5, 1.0).unwrap().value;
            let min = schmidt_minimization(g, 1.0, 1.0).unwrap();
            assert!((closed / min - 1.0).abs() < 1e-8, "{g}: {closed} {min}");
        }
    }
}
