//! The operator-stable limit η: symbol Θ, density by Fourier inversion,
//! Dirichlet form, exact convolution powers of a step law and the local
//! limit discrepancy.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::dilation::{ExponentStructure, IntMatrix, NormalizationSequence};
use crate::error::{invalid, Error, Result};
use crate::lattice::Site;
use crate::numerics::{self, one_minus_cos_moment, GaussRule, Neumaier};
use crate::steplaw::{LawSpec, StepLaw};

/// e^{-tΘ} must fall below this on the boundary of the frequency box.
pub const FREQUENCY_CUTOFF: f64 = 1e-12;

/// Symmetric finite measure M on the unit sphere.
#[derive(Clone, Debug)]
pub enum SpectralMeasure {
    /// Point masses (direction, weight); each direction must be paired with
    /// its negation at equal weight.
    Atoms(Vec<(Vec<f64>, f64)>),
    /// Uniform measure of the given total mass on S^{d-1}.
    UniformSphere { d: usize, mass: f64 },
    /// Arc-length density on angular intervals of S^1; symmetric under
    /// θ ↦ θ + π.
    Arcs { arcs: Vec<(f64, f64)>, density: f64 },
    Zero { d: usize },
}

impl SpectralMeasure {
    pub fn dim(&self) -> usize {
        match self {
            SpectralMeasure::Atoms(a) => a.first().map(|(y, _)| y.len()).unwrap_or(0),
            SpectralMeasure::UniformSphere { d, .. } | SpectralMeasure::Zero { d } => *d,
            SpectralMeasure::Arcs { .. } => 2,
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            SpectralMeasure::Atoms(a) => a.iter().map(|(_, w)| w).sum(),
            SpectralMeasure::UniformSphere { mass, .. } => *mass,
            SpectralMeasure::Arcs { arcs, density } => arcs.iter().map(|(a, b)| density * (b - a)).sum(),
            SpectralMeasure::Zero { .. } => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SpectralMeasure::Atoms(atoms) => {
                let d = self.dim();
                for (y, w) in atoms {
                    if y.len() != d {
                        return Err(invalid("spectral atoms of mixed dimension"));
                    }
                    let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if (n - 1.0).abs() > 1e-12 || !(*w >= 0.0) {
                        return Err(invalid("spectral atoms need unit directions and nonnegative weights"));
                    }
                    let paired = atoms.iter().any(|(z, u)| u == w && z.iter().zip(y).all(|(a, b)| (a + b).abs() < 1e-12));
                    if !paired {
                        return Err(invalid("spectral measure is not symmetric"));
                    }
                }
                Ok(())
            }
            SpectralMeasure::Arcs { arcs, density } => {
                if !(*density >= 0.0) {
                    return Err(invalid("negative arc density"));
                }
                for &(a, b) in arcs {
                    if b < a {
                        return Err(invalid("arc end before start"));
                    }
                    let paired = arcs.iter().any(|&(c, e)| {
                        ((c - a - PI).rem_euclid(2.0 * PI) < 1e-12 || (a + PI - c).rem_euclid(2.0 * PI) < 1e-12)
                            && ((e - c) - (b - a)).abs() < 1e-12
                    });
                    if !paired {
                        return Err(invalid("arc set is not symmetric"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Rank of the linear span of the support.
    fn support_rank(&self) -> usize {
        match self {
            SpectralMeasure::Atoms(atoms) => {
                let d = self.dim();
                let cols: Vec<f64> = atoms.iter().filter(|(_, w)| *w > 0.0).flat_map(|(y, _)| y.clone()).collect();
                if cols.is_empty() {
                    return 0;
                }
                DMatrix::from_column_slice(d, cols.len() / d, &cols).rank(1e-10)
            }
            SpectralMeasure::UniformSphere { d, mass } => {
                if *mass > 0.0 {
                    *d
                } else {
                    0
                }
            }
            SpectralMeasure::Arcs { arcs, density } => {
                if *density > 0.0 && arcs.iter().any(|(a, b)| b > a) {
                    2
                } else {
                    0
                }
            }
            SpectralMeasure::Zero { .. } => 0,
        }
    }
}

/// Strictly operator-stable symmetric law η with Fourier transform e^{-Θ}.
#[derive(Clone, Debug)]
pub struct LimitLaw {
    exponent: ExponentStructure,
    measure: SpectralMeasure,
    gaussian: Option<DMatrix<f64>>,
}

/// Θ(ξ) = Σ_i k_i |ξ_i|^{α_i}.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableSymbol {
    pub terms: Vec<(f64, f64)>,
}

impl LimitLaw {
    pub fn new(exponent: ExponentStructure, measure: SpectralMeasure, gaussian: Option<DMatrix<f64>>) -> Result<Self> {
        let d = exponent.dim();
        let empty = matches!(&measure, SpectralMeasure::Atoms(a) if a.is_empty());
        if !empty && measure.dim() != d {
            return Err(invalid("spectral measure dimension does not match the exponent"));
        }
        measure.validate()?;
        if let Some(q) = &gaussian {
            if q.nrows() != d || q.ncols() != d || (q - q.transpose()).abs().max() > 1e-12 {
                return Err(invalid("Gaussian part must be a symmetric d×d matrix"));
            }
            if q.clone().symmetric_eigenvalues().iter().any(|&l| l < -1e-12) {
                return Err(invalid("Gaussian part is not positive semidefinite"));
            }
        }
        if measure.total_mass() > 0.0 && exponent.alphas().iter().any(|&a| a >= 2.0) {
            let ok = match &measure {
                SpectralMeasure::Atoms(atoms) => atoms.iter().all(|(y, _)| {
                    exponent.eigen_direction(y).map(|i| exponent.alphas()[i] < 2.0).unwrap_or(false)
                }),
                _ => false,
            };
            if !ok {
                return Err(invalid("Lévy part charges a direction with exponent 2"));
            }
        }
        if matches!(measure, SpectralMeasure::UniformSphere { .. }) {
            let a0 = exponent.alphas()[0];
            if exponent.alphas().iter().any(|&a| (a - a0).abs() > 1e-15) && d != 2 {
                return Err(Error::Unsupported("uniform spectral measure with anisotropic E outside d = 2".into()));
            }
        }
        Ok(Self { exponent, measure, gaussian })
    }

    /// Θ(ξ) = ⟨Qξ,ξ⟩/2 with exponent I/2.
    pub fn gaussian(q: DMatrix<f64>) -> Result<Self> {
        let d = q.nrows();
        Self::new(ExponentStructure::isotropic(d, 2.0)?, SpectralMeasure::Zero { d }, Some(q))
    }

    /// One-dimensional Θ(ξ) = scale·|ξ|^α.
    pub fn symmetric_stable(alpha: f64, scale: f64) -> Result<Self> {
        if alpha == 2.0 {
            return Self::gaussian(DMatrix::from_element(1, 1, 2.0 * scale));
        }
        let w = scale / (2.0 * alpha * one_minus_cos_moment(alpha));
        Self::new(
            ExponentStructure::diagonal(&[alpha])?,
            SpectralMeasure::Atoms(vec![(vec![1.0], w), (vec![-1.0], w)]),
            None,
        )
    }

    /// Θ(ξ) = Σ_i k_i |ξ_i|^{α_i}; α_i = 2 axes become Gaussian.
    pub fn axis_separable(terms: &[(f64, f64)]) -> Result<Self> {
        let d = terms.len();
        let alphas: Vec<f64> = terms.iter().map(|t| t.0).collect();
        let mut atoms = Vec::new();
        let mut q = DMatrix::zeros(d, d);
        let mut has_q = false;
        for (i, &(a, k)) in terms.iter().enumerate() {
            if a == 2.0 {
                q[(i, i)] = 2.0 * k;
                has_q = true;
            } else {
                let w = k / (2.0 * a * one_minus_cos_moment(a));
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                atoms.push((e.clone(), w));
                e[i] = -1.0;
                atoms.push((e, w));
            }
        }
        let m = if atoms.is_empty() { SpectralMeasure::Zero { d } } else { SpectralMeasure::Atoms(atoms) };
        Self::new(ExponentStructure::diagonal(&alphas)?, m, has_q.then_some(q))
    }

    /// Θ(ξ) = k‖ξ‖^α in dimension d.
    pub fn isotropic(d: usize, alpha: f64, k: f64) -> Result<Self> {
        if alpha == 2.0 {
            return Self::gaussian(DMatrix::identity(d, d) * (2.0 * k));
        }
        let mass = k / (alpha * one_minus_cos_moment(alpha) * sphere_moment(d, alpha));
        Self::new(ExponentStructure::isotropic(d, alpha)?, SpectralMeasure::UniformSphere { d, mass }, None)
    }

    pub fn exponent(&self) -> &ExponentStructure {
        &self.exponent
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    pub fn gaussian_part(&self) -> Option<&DMatrix<f64>> {
        self.gaussian.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.exponent.dim()
    }

    /// The law is full when its symbol vanishes only at the origin.
    pub fn is_full(&self) -> bool {
        let d = self.dim();
        let mut cols: Vec<f64> = Vec::new();
        if let Some(q) = &self.gaussian {
            cols.extend(q.iter());
        }
        match &self.measure {
            SpectralMeasure::Atoms(atoms) => {
                for (y, w) in atoms {
                    if *w > 0.0 {
                        cols.extend(y);
                    }
                }
            }
            m if m.support_rank() == d => return true,
            _ => {}
        }
        !cols.is_empty() && DMatrix::from_column_slice(d, cols.len() / d, &cols).rank(1e-10) == d
    }

    /// Closed form Σ k_i|ξ_i|^{α_i} when Θ splits along the coordinate axes.
    pub fn separable(&self) -> Option<SeparableSymbol> {
        if !self.exponent.is_diagonal() {
            return None;
        }
        let d = self.dim();
        let mut k = vec![0.0; d];
        if let Some(q) = &self.gaussian {
            for i in 0..d {
                for j in 0..d {
                    if i != j && q[(i, j)] != 0.0 {
                        return None;
                    }
                }
                k[i] += 0.5 * q[(i, i)];
            }
        }
        match &self.measure {
            SpectralMeasure::Zero { .. } => {}
            SpectralMeasure::Atoms(atoms) => {
                for (y, w) in atoms {
                    let nz: Vec<usize> = (0..d).filter(|&i| y[i] != 0.0).collect();
                    if nz.len() != 1 {
                        return None;
                    }
                    let i = nz[0];
                    let a = self.exponent.alphas()[i];
                    k[i] += w * a * one_minus_cos_moment(a);
                }
            }
            _ => {
                if d != 1 {
                    return None;
                }
                let a = self.exponent.alphas()[0];
                k[0] += self.measure.total_mass() * a * one_minus_cos_moment(a);
            }
        }
        Some(SeparableSymbol { terms: self.exponent.alphas().iter().copied().zip(k).collect() })
    }

    /// (α, k) with Θ(ξ) = k‖ξ‖^α, when the symbol is rotation invariant.
    pub fn radial_profile(&self) -> Option<(f64, f64)> {
        let d = self.dim();
        let a0 = self.exponent.alphas()[0];
        if self.exponent.alphas().iter().any(|&a| a != a0) {
            return None;
        }
        if d == 1 {
            let s = self.separable()?;
            return Some(s.terms[0]);
        }
        let gauss_k = match &self.gaussian {
            None => None,
            Some(q) => {
                let q0 = q[(0, 0)];
                if (q - DMatrix::identity(d, d) * q0).abs().max() > 1e-14 {
                    return None;
                }
                Some(0.5 * q0)
            }
        };
        match (&self.measure, gauss_k) {
            (SpectralMeasure::Zero { .. }, Some(k)) => Some((2.0, k)),
            (SpectralMeasure::UniformSphere { mass, .. }, None) => {
                Some((a0, mass * a0 * one_minus_cos_moment(a0) * sphere_moment(d, a0)))
            }
            _ => None,
        }
    }

    /// Θ(ξ).
    pub fn symbol(&self, xi: &[f64]) -> f64 {
        self.try_symbol(xi).expect("symbol quadrature failed")
    }

    pub fn try_symbol(&self, xi: &[f64]) -> Result<f64> {
        assert_eq!(xi.len(), self.dim());
        let mut total = 0.0;
        if let Some(q) = &self.gaussian {
            let d = self.dim();
            for i in 0..d {
                for j in 0..d {
                    total += 0.5 * q[(i, j)] * xi[i] * xi[j];
                }
            }
        }
        match &self.measure {
            SpectralMeasure::Zero { .. } => {}
            SpectralMeasure::Atoms(atoms) => {
                for (y, w) in atoms {
                    if *w > 0.0 {
                        total += w * self.direction_integral(xi, y)?;
                    }
                }
            }
            SpectralMeasure::UniformSphere { d, mass } => {
                let a0 = self.exponent.alphas()[0];
                if self.exponent.alphas().iter().all(|&a| a == a0) {
                    let n = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
                    total += mass * a0 * one_minus_cos_moment(a0) * sphere_moment(*d, a0) * n.powf(a0);
                } else {
                    total += self.arc_integral(xi, &[(0.0, 2.0 * PI)], mass / (2.0 * PI))?;
                }
            }
            SpectralMeasure::Arcs { arcs, density } => {
                total += self.arc_integral(xi, arcs, *density)?;
            }
        }
        Ok(total)
    }

    fn arc_integral(&self, xi: &[f64], arcs: &[(f64, f64)], density: f64) -> Result<f64> {
        let mut acc = Neumaier::new();
        for &(a, b) in arcs {
            // split where ⟨ξ, y(θ)⟩ changes sign, the integrand has a kink there
            let th0 = (-xi[0]).atan2(xi[1]);
            let mut cuts = vec![a, b];
            for k in -4..=4 {
                let c = th0 + k as f64 * PI;
                if c > a && c < b {
                    cuts.push(c);
                }
            }
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for w in cuts.windows(2) {
                let f = |th: f64| self.direction_integral(xi, &[th.cos(), th.sin()]).unwrap_or(f64::NAN);
                acc.add(density * numerics::integrate(f, w[0], w[1], 1e-13)?);
            }
        }
        Ok(acc.value())
    }

    /// ∫_0^∞ (1 - cos⟨ξ, r^E y⟩) dr/r².
    fn direction_integral(&self, xi: &[f64], y: &[f64]) -> Result<f64> {
        let es = &self.exponent;
        if let Some(i) = es.eigen_direction(y) {
            let a = es.alphas()[i];
            let u: f64 = xi.iter().zip(y).map(|(p, q)| p * q).sum();
            return Ok(a * one_minus_cos_moment(a) * u.abs().powf(a));
        }
        // general direction: ⟨ξ, r^E y⟩ = Σ_i w_i r^{p_i} in the eigenbasis
        let b = es.eigen_coords(y);
        let p = es.basis();
        let d = es.dim();
        let terms: Vec<(f64, f64)> = (0..d)
            .map(|i| {
                let v_dot: f64 = (0..d).map(|j| p[(j, i)] * xi[j]).sum();
                (b[i] * v_dot, 1.0 / es.alphas()[i])
            })
            .filter(|(w, _)| *w != 0.0)
            .collect();
        if terms.is_empty() {
            return Ok(0.0);
        }
        Ok(phase_integral(&terms))
    }

    /// Density g_t(x) by Fourier inversion.
    pub fn density(&self, x: &[f64], t: f64) -> Result<f64> {
        Ok(self.density_grid(t, x.iter().fold(0.0f64, |m, v| m.max(v.abs())))?.eval(x))
    }

    /// Frequency quadrature of e^{-tΘ}, reusable for many x with |x_i| ≤ x_max.
    pub fn density_grid(&self, t: f64, x_max: f64) -> Result<DensityGrid> {
        if !(t > 0.0) {
            return Err(invalid("density needs t > 0"));
        }
        let d = self.dim();
        if d > 2 {
            return Err(Error::Unsupported("density inversion above d = 2".into()));
        }
        if !self.is_full() {
            return Err(Error::FrequencyBox("symbol does not grow in every direction".into()));
        }
        let target = -FREQUENCY_CUTOFF.ln();
        // grow a cube until e^{-tΘ} is below the cutoff on its whole boundary
        let mut xi_max = 1.0;
        let boundary_min = |l: f64| -> f64 {
            match d {
                1 => self.symbol(&[l]).min(self.symbol(&[-l])),
                _ => (0..=64)
                    .map(|j| -l + 2.0 * l * j as f64 / 64.0)
                    .flat_map(|s| [[l, s], [s, l]])
                    .map(|p| self.symbol(&p))
                    .fold(f64::INFINITY, f64::min),
            }
        };
        let mut grow = 0;
        while t * boundary_min(xi_max) < target {
            xi_max *= 1.25;
            grow += 1;
            if grow > 400 {
                return Err(Error::FrequencyBox("e^{-tΘ} does not decay".into()));
            }
        }
        let rule = GaussRule::new(20);
        // panels: resolve cos(ξx) and refine geometrically near ξ = 0
        let osc = ((xi_max * x_max.max(1.0)) / PI).ceil() as usize;
        let panels = (2 * osc).max(48);
        let mut nodes_1d: Vec<(f64, f64)> = Vec::new();
        let h = xi_max / panels as f64;
        let mut edges = vec![0.0];
        let mut e = h;
        for _ in 0..30 {
            e *= 0.5;
            edges.push(e);
        }
        edges.reverse();
        edges[0] = 0.0;
        let mut lo = 0.0;
        for &hi in edges.iter().skip(1) {
            nodes_1d.extend(rule.mapped(lo, hi));
            lo = hi;
        }
        for p in 0..panels {
            let a = h * p as f64;
            let b = a + h;
            nodes_1d.extend(rule.mapped(a.max(lo), b).filter(|_| b > lo));
        }
        let half: Vec<(f64, f64)> = nodes_1d;
        let full: Vec<(f64, f64)> = half.iter().map(|&(x, w)| (-x, w)).chain(half.iter().copied()).collect();
        let mut points = Vec::new();
        match d {
            1 => {
                for &(x, w) in &half {
                    // even integrand: fold the negative half onto the positive one
                    points.push((vec![x], 2.0 * w * (-t * self.symbol(&[x])).exp()));
                }
            }
            _ => {
                for &(x1, w1) in &half {
                    for &(x2, w2) in &full {
                        let v = (-t * self.symbol(&[x1, x2])).exp();
                        if v > 1e-300 {
                            points.push((vec![x1, x2], 2.0 * w1 * w2 * v));
                        }
                    }
                }
            }
        }
        Ok(DensityGrid { d, points, truncation: (-target).exp() * xi_max.powi(d as i32), xi_max })
    }

    /// E_η(f,f) = (2π)^{-d} ∫ |f̂(ξ)|² Θ(ξ) dξ on a quadrature grid.
    pub fn dirichlet_form(&self, grid: &FrequencyGrid, fhat_abs2: &[f64]) -> f64 {
        assert_eq!(grid.weights.len(), fhat_abs2.len());
        let d = self.dim() as i32;
        let s = numerics::neumaier_sum(
            grid.nodes.iter().zip(&grid.weights).zip(fhat_abs2).map(|((xi, w), f)| w * f * self.symbol(xi)),
        );
        s / (2.0 * PI).powi(d)
    }

    /// The operator-stable limit of a step law together with its natural
    /// normalization exponent.
    pub fn attractor_of(law: &StepLaw) -> Result<LimitLaw> {
        let d = law.dim();
        match law.spec() {
            LawSpec::AxisProduct { alphas } => {
                // λ(±e_i) = c_i/(d α_i), giving Θ = Σ (2c_i/d) C(α_i) |ξ_i|^{α_i}
                let cs = law.normalizers();
                let terms: Vec<(f64, f64)> = alphas
                    .iter()
                    .zip(&cs)
                    .map(|(&a, &c)| (a, 2.0 * c / d as f64 * one_minus_cos_moment(a)))
                    .collect();
                Self::axis_separable(&terms)
            }
            LawSpec::Radial { dim, alpha } => {
                let c = law.normalizers()[0];
                match dim {
                    1 => Self::axis_separable(&[(*alpha, 2.0 * c * one_minus_cos_moment(*alpha))]),
                    _ => {
                        // M uniform with mass c·|S^{d-1}|/α
                        let area = sphere_area(*dim);
                        let mass = c * area / alpha;
                        Self::new(
                            ExponentStructure::isotropic(*dim, *alpha)?,
                            SpectralMeasure::UniformSphere { d: *dim, mass },
                            None,
                        )
                    }
                }
            }
            LawSpec::LazyNearestNeighbor { .. } | LawSpec::Table { .. } => {
                let atoms = law.finite_support().unwrap();
                let mut q = DMatrix::zeros(d, d);
                for (s, m) in atoms {
                    for i in 0..d {
                        for j in 0..d {
                            q[(i, j)] += m * (s.0[i] * s.0[j]) as f64;
                        }
                    }
                }
                Self::gaussian(q)
            }
            LawSpec::OneDimPower { alpha, beta } => {
                let a_s = (alpha - 1.0) / beta;
                if a_s >= 2.0 {
                    return Err(Error::Unsupported("power lattice with stable index at least 2".into()));
                }
                // one-sided tail t·μ(x > t^{1/a_s}) → c β/(α-1) = c/a_s... per side c/(α-1)·β/β
                let c = law.normalizers()[0];
                let lam = c / (alpha - 1.0);
                Self::new(
                    ExponentStructure::diagonal(&[a_s])?,
                    SpectralMeasure::Atoms(vec![(vec![1.0], lam), (vec![-1.0], lam)]),
                    None,
                )
            }
            LawSpec::OneDimGeometric { .. } => {
                Err(Error::Unsupported("geometric lattice laws have no operator-stable limit".into()))
            }
        }
    }
}

/// E|⟨u, e⟩|^α for u uniform on S^{d-1}.
pub fn sphere_moment(d: usize, alpha: f64) -> f64 {
    let df = d as f64;
    (numerics::ln_gamma(df / 2.0) + numerics::ln_gamma((alpha + 1.0) / 2.0)
        - 0.5 * PI.ln()
        - numerics::ln_gamma((df + alpha) / 2.0))
        .exp()
}

/// |S^{d-1}|.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / numerics::gamma(d as f64 / 2.0)
}

/// ∫_0^∞ (1 - cos g(r)) dr/r² for g(r) = Σ w_i r^{p_i}, p_i > 1/2.
fn phase_integral(terms: &[(f64, f64)]) -> f64 {
    let g = |r: f64| terms.iter().map(|(w, p)| w * r.powf(*p)).sum::<f64>();
    let dg = |r: f64| terms.iter().map(|(w, p)| (w * p * r.powf(*p - 1.0)).abs()).sum::<f64>();
    // below r_lo, 1 - cos g = g²/2 to relative 1e-9
    let n = terms.len() as f64;
    let r_lo = terms
        .iter()
        .map(|(w, p)| (1e-4 / (n * w.abs())).powf(1.0 / p))
        .fold(f64::INFINITY, f64::min);
    let mut acc = Neumaier::new();
    for (wi, pi) in terms {
        for (wj, pj) in terms {
            let q = pi + pj - 1.0;
            acc.add(0.5 * wi * wj * r_lo.powf(q) / q);
        }
    }
    // beyond r_hi the oscillating part is below 1e-10 and 1 - cos averages to 1
    let mut r_hi = r_lo.max(1.0);
    while r_hi * r_hi * dg(r_hi) < 1e10 {
        r_hi *= 2.0;
    }
    acc.add(1.0 / r_hi);
    let rule = GaussRule::new(16);
    let mut r = r_lo;
    while r < r_hi {
        let step = (0.5 * r).min(PI / dg(r).max(1e-300)).max(1e-12 * r);
        let b = (r + step).min(r_hi);
        acc.add(rule.integrate(r, b, |s| (1.0 - g(s).cos()) / (s * s)));
        r = b;
    }
    acc.value()
}

/// Precomputed frequency nodes with weights·e^{-tΘ}.
#[derive(Clone, Debug)]
pub struct DensityGrid {
    d: usize,
    points: Vec<(Vec<f64>, f64)>,
    /// Rough bound on the neglected frequency mass.
    pub truncation: f64,
    pub xi_max: f64,
}

impl DensityGrid {
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d);
        let s = numerics::neumaier_sum(self.points.iter().map(|(xi, w)| {
            let ph: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
            w * ph.cos()
        }));
        s / (2.0 * PI).powi(self.d as i32)
    }
}

/// Quadrature nodes and weights in frequency space.
#[derive(Clone, Debug)]
pub struct FrequencyGrid {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl FrequencyGrid {
    /// Composite Gauss–Legendre on [-xi_max, xi_max] in d = 1.
    pub fn line(xi_max: f64, panels: usize, points: usize) -> Self {
        let rule = GaussRule::new(points);
        let h = 2.0 * xi_max / panels as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in 0..panels {
            let a = -xi_max + h * p as f64;
            for (x, w) in rule.mapped(a, a + h) {
                nodes.push(vec![x]);
                weights.push(w);
            }
        }
        Self { nodes, weights }
    }
}

/// μ^(n) on the torus (Z/N)^d, indexed by x mod N.
#[derive(Clone, Debug, Serialize)]
pub struct ConvolutionTable {
    pub d: usize,
    pub side: usize,
    pub n: u64,
    pub values: Vec<f64>,
    /// Set when more than 1e-9 of the mass may have wrapped around.
    pub wrapped: bool,
    pub escape_estimate: f64,
    pub mass: f64,
}

impl ConvolutionTable {
    fn index(&self, x: &Site) -> usize {
        let n = self.side as i64;
        let mut idx = 0usize;
        for i in (0..self.d).rev() {
            idx = idx * self.side + x.0[i].rem_euclid(n) as usize;
        }
        idx
    }

    pub fn get(&self, x: &Site) -> f64 {
        self.values[self.index(x)]
    }

    /// Representative sites in [-N/2, N/2)^d, in storage order.
    pub fn sites(&self) -> Vec<Site> {
        let n = self.side as i64;
        let rep = |v: i64| if v >= n / 2 { v - n } else { v };
        (0..self.values.len())
            .map(|mut idx| {
                let mut c = [0i64; 4];
                for ci in c.iter_mut().take(self.d) {
                    *ci = rep((idx % self.side) as i64);
                    idx /= self.side;
                }
                Site(c)
            })
            .collect()
    }
}

fn fft_nd(data: &mut [Complex<f64>], side: usize, d: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(side) } else { planner.plan_fft_forward(side) };
    match d {
        1 => fft.process(data),
        2 => {
            for row in data.chunks_mut(side) {
                fft.process(row);
            }
            let mut col = vec![Complex::new(0.0, 0.0); side];
            for j in 0..side {
                for i in 0..side {
                    col[i] = data[i * side + j];
                }
                fft.process(&mut col);
                for i in 0..side {
                    data[i * side + j] = col[i];
                }
            }
        }
        _ => unreachable!(),
    }
}

/// Law folded onto (Z/N)^d. Mass beyond the explicit sum is spread evenly.
fn fold_law(law: &StepLaw, side: usize) -> Vec<f64> {
    let d = law.dim();
    let n = side as i64;
    let mut out = vec![0.0; side.pow(d as u32)];
    let idx = |x: &Site| -> usize {
        let mut i = 0usize;
        for k in (0..d).rev() {
            i = i * side + x.0[k].rem_euclid(n) as usize;
        }
        i
    };
    if let Some(atoms) = law.finite_support() {
        for (s, m) in atoms {
            out[idx(&s)] += m;
        }
        return out;
    }
    let mut sums = vec![Neumaier::new(); out.len()];
    let mut mass = Neumaier::new();
    let axis_only = matches!(law.spec(), LawSpec::AxisProduct { .. } | LawSpec::OneDimPower { .. } | LawSpec::OneDimGeometric { .. })
        || matches!(law.spec(), LawSpec::Radial { dim: 1, .. });
    if axis_only {
        let reach = (64 * n).max(law.truncation_radius() as i64);
        sums[idx(&Site::ORIGIN)].add(law.pmf(&Site::ORIGIN));
        mass.add(law.pmf(&Site::ORIGIN));
        for i in 0..d {
            for k in 1..=reach {
                for s in [k, -k] {
                    let x = Site::axis(i, s);
                    let m = law.pmf(&x);
                    sums[idx(&x)].add(m);
                    mass.add(m);
                }
            }
        }
    } else {
        let reach = 4 * n;
        for a in -reach..=reach {
            for b in -reach..=reach {
                let x = Site::from_slice(&[a, b]);
                let m = law.pmf(&x);
                sums[idx(&x)].add(m);
                mass.add(m);
            }
        }
    }
    let rest = (1.0 - mass.value()).max(0.0) / out.len() as f64;
    for (o, s) in out.iter_mut().zip(sums) {
        *o = s.value() + rest;
    }
    out
}

/// μ^(n) on the torus of side `side` (a power of two is fastest).
pub fn convolution_power(law: &StepLaw, n: u64, side: usize) -> Result<ConvolutionTable> {
    let d = law.dim();
    if d > 2 {
        return Err(Error::Unsupported("convolution powers above d = 2".into()));
    }
    if side < 4 {
        return Err(invalid("torus side must be at least 4"));
    }
    let folded = fold_law(law, side);
    let mut data: Vec<Complex<f64>> = folded.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_nd(&mut data, side, d, false);
    for z in data.iter_mut() {
        // the folded law is symmetric, so its transform is real
        *z = Complex::new(z.re.powi(n as i32).max(-1.0).min(1.0), 0.0);
        if n > i32::MAX as u64 {
            *z = Complex::new(0.0, 0.0);
        }
    }
    fft_nd(&mut data, side, d, true);
    let scale = (side as f64).powi(d as i32);
    let mut values: Vec<f64> = data.iter().map(|z| z.re / scale).collect();
    // exact symmetry x ↦ -x
    let sym: Vec<f64> = (0..values.len())
        .map(|i| {
            let mut j = 0usize;
            let mut rest = i;
            let mut mul = 1usize;
            for _ in 0..d {
                let c = rest % side;
                rest /= side;
                j += ((side - c) % side) * mul;
                mul *= side;
            }
            0.5 * (values[i] + values[j])
        })
        .collect();
    values = sym;
    let mass = numerics::neumaier_sum(values.iter().copied());
    let escape_estimate = escape_estimate(law, n, side);
    Ok(ConvolutionTable { d, side, n, values, wrapped: escape_estimate > 1e-9, escape_estimate, mass })
}

/// Rough P(max coordinate of S_n ≥ N/2).
fn escape_estimate(law: &StepLaw, n: u64, side: usize) -> f64 {
    let half = (side / 2) as u64;
    match law.finite_support() {
        Some(atoms) => {
            let reach = atoms.iter().map(|(s, _)| s.l1()).max().unwrap_or(0) as f64;
            let h = half as f64;
            if n as f64 * reach < h {
                return 0.0;
            }
            (2.0 * law.dim() as f64 * (-(h * h) / (2.0 * n as f64 * reach * reach)).exp()).min(1.0)
        }
        None => (n as f64 * law.l1_tail(half / 2)).min(1.0),
    }
}

/// Local limit discrepancy at time n.
#[derive(Clone, Debug, Serialize)]
pub struct LltReport {
    pub n: u64,
    pub side: usize,
    pub det_bn: f64,
    pub sup_error: f64,
    pub wrapped: bool,
}

/// sup_x | |det B_n| μ^(n)(x) − g(B_n⁻¹x) |, with both terms periodized on
/// the same torus. The periodized density comes from Poisson summation of
/// e^{-Θ(B_nᵀ ω)}, which is exact.
pub fn llt_error(law: &StepLaw, ll: &LimitLaw, ns: &NormalizationSequence, n: u64) -> Result<LltReport> {
    if n < 8 {
        return Err(invalid("local limit check needs n >= 8"));
    }
    let b = ns.build(n)?;
    let spread = b.entries.iter().map(|v| v.unsigned_abs()).max().unwrap_or(1) as usize;
    let side = (16 * spread).next_power_of_two().max(64);
    llt_error_on(law, ll, &b, n, side)
}

pub fn llt_error_on(law: &StepLaw, ll: &LimitLaw, b: &IntMatrix, n: u64, side: usize) -> Result<LltReport> {
    let d = law.dim();
    if ll.dim() != d || b.d != d {
        return Err(invalid("dimension mismatch in local limit check"));
    }
    let table = convolution_power(law, n, side)?;
    let det = b.abs_det();
    let g = periodized_density(ll, b, side)?;
    let sup = table
        .values
        .iter()
        .zip(&g)
        .map(|(m, gv)| (det * m - det * gv).abs())
        .fold(0.0, f64::max);
    Ok(LltReport { n, side, det_bn: det, sup_error: sup, wrapped: table.wrapped })
}

/// Σ_m |det B|⁻¹ g(B⁻¹(x + mN)) at each torus site.
fn periodized_density(ll: &LimitLaw, b: &IntMatrix, side: usize) -> Result<Vec<f64>> {
    let d = ll.dim();
    let nn = side as i64;
    let mut coeffs = vec![Neumaier::new(); side.pow(d as u32)];
    let w = 2.0 * PI / side as f64;
    let cutoff = 41.0;
    let theta_at = |k: &[i64]| -> f64 {
        let om: Vec<f64> = k.iter().map(|&v| w * v as f64).collect();
        ll.symbol(&b.apply_transpose(&om))
    };
    match d {
        1 => {
            let mut k = 0i64;
            loop {
                let th = theta_at(&[k]);
                if th > cutoff && k > 0 {
                    break;
                }
                let v = (-th).exp();
                coeffs[k.rem_euclid(nn) as usize].add(v);
                if k != 0 {
                    coeffs[(-k).rem_euclid(nn) as usize].add(v);
                }
                k += 1;
                if k > 1 << 28 {
                    return Err(Error::FrequencyBox("periodized density does not converge".into()));
                }
            }
        }
        2 => {
            let mut radius = 1i64;
            loop {
                // ring |k|_∞ = radius
                let mut any = false;
                let ring: Vec<[i64; 2]> = if radius == 0 {
                    vec![[0, 0]]
                } else {
                    let mut v = Vec::new();
                    for a in -radius..=radius {
                        v.push([a, radius]);
                        v.push([a, -radius]);
                    }
                    for c in -radius + 1..radius {
                        v.push([radius, c]);
                        v.push([-radius, c]);
                    }
                    v
                };
                for k in ring {
                    let th = theta_at(&k);
                    if th <= cutoff {
                        any = true;
                    }
                    let idx = k[0].rem_euclid(nn) as usize + side * k[1].rem_euclid(nn) as usize;
                    coeffs[idx].add((-th).exp());
                }
                if !any && radius > 1 {
                    break;
                }
                radius += 1;
                if radius > 1 << 14 {
                    return Err(Error::FrequencyBox("periodized density does not converge".into()));
                }
            }
            coeffs[0].add(1.0);
        }
        _ => return Err(Error::Unsupported("periodized density above d = 2".into())),
    }
    let mut data: Vec<Complex<f64>> = coeffs.iter().map(|c| Complex::new(c.value(), 0.0)).collect();
    fft_nd(&mut data, side, d, true);
    let scale = (side as f64).powi(d as i32);
    Ok(data.iter().map(|z| z.re / scale).collect())
}
