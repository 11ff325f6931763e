//! Symmetric step distributions μ on Z^d: exact pmf, sampling,
//! characteristic function and tail diagnostics.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dilation::ExponentStructure;
use crate::error::{invalid, Error, Result};
use crate::lattice::{Site, MAX_DIM};
use crate::numerics::{self, power_tail, zeta, Neumaier};

/// Inverse-CDF tables cover |k| ≤ this radius unless configured otherwise.
pub const DEFAULT_TRUNCATION: u64 = 1 << 16;

/// Largest jump length produced by the samplers. The mass beyond it is
/// reported by [`StepLaw::sampler_tv_bound`].
pub const JUMP_CAP: u64 = 1 << 52;

/// Symmetric power kernel q(k) = c (1+|k|)^{-s} on Z, s > 1.
#[derive(Clone, Debug)]
pub struct PowerKernel {
    s: f64,
    c: f64,
    // cum[k] = P(|K| ≤ k)
    cum: Arc<Vec<f64>>,
}

impl PowerKernel {
    pub fn new(s: f64, radius: u64) -> Self {
        assert!(s > 1.0);
        let c = 1.0 / (2.0 * zeta(s) - 1.0);
        let mut cum = Vec::with_capacity(radius as usize + 1);
        let mut acc = Neumaier::new();
        acc.add(c);
        cum.push(acc.value());
        for k in 1..=radius {
            acc.add(2.0 * c * (1.0 + k as f64).powf(-s));
            cum.push(acc.value());
        }
        Self { s, c, cum: Arc::new(cum) }
    }

    pub fn exponent(&self) -> f64 {
        self.s
    }

    pub fn normalizer(&self) -> f64 {
        self.c
    }

    pub fn radius(&self) -> u64 {
        (self.cum.len() - 1) as u64
    }

    pub fn pmf(&self, k: i64) -> f64 {
        self.c * (1.0 + k.unsigned_abs() as f64).powf(-self.s)
    }

    /// Σ_{k > r} (1+k)^{-s} (one side, unnormalized).
    pub fn side_tail(&self, r: u64) -> f64 {
        power_tail(self.s, r + 1)
    }

    /// P(|K| > r).
    pub fn abs_tail(&self, r: u64) -> f64 {
        2.0 * self.c * self.side_tail(r)
    }

    /// Direct sum of the table, P(|K| ≤ R).
    pub fn inner_mass(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn sample_abs<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        if u < self.inner_mass() {
            return self.cum.partition_point(|&c| c <= u) as u64;
        }
        // exact inversion of the tail beyond the table
        let r = self.radius();
        let v: f64 = rng.random();
        let target = (1.0 - v) * self.side_tail(r);
        let above = |k: u64| self.side_tail(k) > target;
        let mut lo = r;
        let mut hi = (r + 1).max(2 * r);
        while above(hi) {
            if hi >= JUMP_CAP {
                return JUMP_CAP;
            }
            lo = hi;
            hi = (hi * 2).min(JUMP_CAP);
        }
        // side_tail(lo) > target >= side_tail(hi); answer is the smallest k with side_tail(k) <= target
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if above(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let k = self.sample_abs(rng) as i64;
        if k != 0 && rng.random::<bool>() {
            -k
        } else {
            k
        }
    }

    /// 1 - q̂(u) with a bound on the truncation error. Uses 2 sin² to avoid
    /// cancellation for small u.
    pub fn one_minus_char(&self, u: f64) -> (f64, f64) {
        let u = wrap_angle(u);
        if u == 0.0 {
            return (0.0, 0.0);
        }
        let k_max = ((400.0 / u.abs()).ceil() as u64).clamp(1000, 20_000_000);
        let mut acc = Neumaier::new();
        for k in 1..=k_max {
            let h = (0.5 * k as f64 * u).sin();
            acc.add((1.0 + k as f64).powf(-self.s) * h * h);
        }
        let tail = self.side_tail(k_max);
        let value = 4.0 * self.c * acc.value() + 2.0 * self.c * tail;
        let bound = 2.0 * self.c * (2.0 + k_max as f64).powf(-self.s) / (0.5 * u).sin().abs();
        (value, bound)
    }
}

fn wrap_angle(u: f64) -> f64 {
    let r = u.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Serializable law description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LawSpec {
    /// μ = (1/d) Σ_i (law of c(α_i)(1+|k|)^{-1-α_i} on the i-th axis).
    AxisProduct { alphas: Vec<f64> },
    /// c (1+‖x‖)^{-d-α}.
    Radial { dim: usize, alpha: f64 },
    /// μ(0) = hold, μ(±e_i) = (1-hold)/(2d).
    LazyNearestNeighbor { dim: usize, hold: f64 },
    /// Atoms at ±⌊k^β⌋ with weights ∝ (1+|k|)^{-α}, α > 1, β ≥ 1.
    OneDimPower { alpha: f64, beta: f64 },
    /// Atoms at 0 and ±⌊2^{βk}⌋ (k ≥ 1) with weights ∝ 2^{-α|k|}.
    OneDimGeometric { alpha: f64, beta: f64 },
    /// Finite symmetric table of (site, mass).
    Table { dim: usize, atoms: Vec<(Vec<i64>, f64)> },
}

impl LawSpec {
    pub fn simple_random_walk() -> Self {
        LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            LawSpec::AxisProduct { alphas } => alphas.len(),
            LawSpec::Radial { dim, .. } | LawSpec::LazyNearestNeighbor { dim, .. } | LawSpec::Table { dim, .. } => *dim,
            LawSpec::OneDimPower { .. } | LawSpec::OneDimGeometric { .. } => 1,
        }
    }
}

#[derive(Clone, Debug)]
struct Radial2 {
    alpha: f64,
    s: f64,
    c: f64,
}

#[derive(Clone, Debug)]
struct TableLaw {
    atoms: BTreeMap<Site, f64>,
    order: Vec<Site>,
    cum: Vec<f64>,
}

#[derive(Clone, Debug)]
enum Inner {
    Axis(Vec<PowerKernel>),
    Radial2(Radial2),
    Lazy { hold: f64 },
    Power { beta: f64, kernel: PowerKernel },
    Geometric { alpha: f64, beta: f64, c: f64 },
    Table(TableLaw),
}

/// A constructed step law with its normalizer resolved.
#[derive(Clone, Debug)]
pub struct StepLaw {
    spec: LawSpec,
    d: usize,
    radius: u64,
    inner: Inner,
}

/// Direct inner sum plus analytic tail; the total should be 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassCheck {
    pub inner: f64,
    pub tail: f64,
}

impl MassCheck {
    pub fn total(&self) -> f64 {
        self.inner + self.tail
    }
}

/// μ̂(ξ) with 1 - μ̂(ξ) kept separately for accuracy near ξ = 0.
#[derive(Clone, Copy, Debug)]
pub struct CharValue {
    pub value: f64,
    pub one_minus: f64,
    pub truncation_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub alpha: f64,
    /// sup_s s·μ(ρ_α > s); infinite when the tail is too heavy.
    pub weak_moment: f64,
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// lim_{s→∞} s·μ(ρ_α > s) when it is known in closed form.
    pub tail_limit: Option<f64>,
}

/// Directions Ω ⊂ S^{d-1} for the attraction diagnostic.
#[derive(Clone, Debug)]
pub enum DirectionSet {
    /// Finitely many unit directions.
    Rays(Vec<Vec<f64>>),
    /// Angular intervals [a, b] in radians (d = 2).
    Arcs(Vec<(f64, f64)>),
}

impl DirectionSet {
    fn contains(&self, dir: &[f64]) -> bool {
        match self {
            DirectionSet::Rays(rays) => rays.iter().any(|r| {
                let n = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                r.iter().zip(dir).all(|(a, b)| (a / n - b).abs() < 1e-9)
            }),
            DirectionSet::Arcs(arcs) => {
                if dir.len() != 2 {
                    return false;
                }
                let th = dir[1].atan2(dir[0]).rem_euclid(2.0 * PI);
                arcs.iter().any(|&(a, b)| {
                    let a = a.rem_euclid(2.0 * PI);
                    let w = b - a;
                    (th - a).rem_euclid(2.0 * PI) <= w + 1e-12 || w >= 2.0 * PI
                })
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DoaReport {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// (max - min)/mean over the last quarter of the grid.
    pub last_quartile_dispersion: f64,
}

// one ray of a ray-supported law: mass beyond Euclidean radius r
enum Ray<'a> {
    Kernel { dir: Vec<f64>, weight: f64, kernel: &'a PowerKernel },
    Power { kernel: &'a PowerKernel, beta: f64, sign: f64 },
    Geometric { alpha: f64, beta: f64, c: f64, sign: f64 },
    Atoms { dir: Vec<f64>, atoms: Vec<(f64, f64)> },
}

impl Ray<'_> {
    fn dir(&self) -> Vec<f64> {
        match self {
            Ray::Kernel { dir, .. } | Ray::Atoms { dir, .. } => dir.clone(),
            Ray::Power { sign, .. } | Ray::Geometric { sign, .. } => vec![*sign],
        }
    }

    fn beyond(&self, r: f64) -> f64 {
        let fl = r.max(0.0).floor().min(1e18) as u64;
        match self {
            Ray::Kernel { weight, kernel, .. } => weight * kernel.normalizer() * kernel.side_tail(fl),
            Ray::Power { kernel, beta, .. } => kernel.normalizer() * power_tail(kernel.exponent(), power_index_beyond(*beta, fl)),
            Ray::Geometric { alpha, beta, c, .. } => {
                let k0 = geometric_index_beyond(*beta, fl);
                c * 2f64.powf(-alpha * k0 as f64) / (1.0 - 2f64.powf(-alpha))
            }
            Ray::Atoms { atoms, .. } => atoms.iter().filter(|(rad, _)| *rad > r).map(|(_, m)| m).sum(),
        }
    }
}

/// Smallest k ≥ 1 with ⌊k^β⌋ > r.
fn power_index_beyond(beta: f64, r: u64) -> u64 {
    let mut k = ((r as f64 + 1.0).powf(1.0 / beta).floor() as u64).max(1);
    while k > 1 && ((k - 1) as f64).powf(beta).floor() as u64 > r {
        k -= 1;
    }
    while (k as f64).powf(beta).floor() as u64 <= r {
        k += 1;
    }
    k
}

/// Smallest k ≥ 1 with ⌊2^{βk}⌋ > r.
fn geometric_index_beyond(beta: f64, r: u64) -> u64 {
    let mut k = (((r as f64 + 1.0).log2() / beta).floor() as u64).max(1);
    while k > 1 && 2f64.powf(beta * (k - 1) as f64).floor() as u64 > r {
        k -= 1;
    }
    while 2f64.powf(beta * k as f64).floor() as u64 <= r {
        k += 1;
    }
    k
}

impl StepLaw {
    pub fn new(spec: LawSpec) -> Result<Self> {
        Self::with_truncation(spec, DEFAULT_TRUNCATION)
    }

    pub fn with_truncation(spec: LawSpec, radius: u64) -> Result<Self> {
        let d = spec.dim();
        if d == 0 || d > MAX_DIM {
            return Err(invalid(format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        if radius == 0 {
            return Err(invalid("truncation radius must be positive"));
        }
        let inner = match &spec {
            LawSpec::AxisProduct { alphas } => {
                for &a in alphas {
                    if !(a > 0.0 && a < 2.0) {
                        return Err(invalid(format!("axis exponent {a} outside (0, 2)")));
                    }
                }
                Inner::Axis(alphas.iter().map(|a| PowerKernel::new(1.0 + a, radius)).collect())
            }
            LawSpec::Radial { dim, alpha } => {
                if !(*alpha > 0.0 && *alpha < 2.0) {
                    return Err(invalid(format!("radial exponent {alpha} outside (0, 2)")));
                }
                match dim {
                    1 => Inner::Axis(vec![PowerKernel::new(1.0 + alpha, radius)]),
                    2 => Inner::Radial2(Radial2::new(*alpha)),
                    _ => return Err(Error::Unsupported("radial laws in dimension 3 or more".into())),
                }
            }
            LawSpec::LazyNearestNeighbor { hold, .. } => {
                if !(0.0..=1.0).contains(hold) {
                    return Err(invalid("hold probability outside [0, 1]"));
                }
                Inner::Lazy { hold: *hold }
            }
            LawSpec::OneDimPower { alpha, beta } => {
                if !(*alpha > 1.0 && *beta >= 1.0) {
                    return Err(invalid("power lattice needs alpha > 1 and beta >= 1"));
                }
                Inner::Power { beta: *beta, kernel: PowerKernel::new(*alpha, radius) }
            }
            LawSpec::OneDimGeometric { alpha, beta } => {
                if !(*alpha > 0.0 && *beta > 0.0) {
                    return Err(invalid("geometric lattice needs positive alpha and beta"));
                }
                let c = 1.0 / (1.0 + 2.0 / (2f64.powf(*alpha) - 1.0));
                Inner::Geometric { alpha: *alpha, beta: *beta, c }
            }
            LawSpec::Table { dim, atoms } => Inner::Table(TableLaw::new(*dim, atoms)?),
        };
        Ok(Self { spec, d, radius, inner })
    }

    pub fn spec(&self) -> &LawSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn truncation_radius(&self) -> u64 {
        self.radius
    }

    /// Support contained in {-1, 0, 1}^d nearest-neighbour moves.
    pub fn nearest_neighbor_weights(&self) -> Option<(f64, f64, f64)> {
        if self.d != 1 {
            return None;
        }
        match &self.inner {
            Inner::Lazy { hold } => Some(((1.0 - hold) / 2.0, *hold, (1.0 - hold) / 2.0)),
            Inner::Table(t) => {
                if t.atoms.keys().all(|s| s.0[0].abs() <= 1) {
                    let m = |k| t.atoms.get(&Site::axis(0, k)).copied().unwrap_or(0.0);
                    Some((m(-1), m(0), m(1)))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Finite support as (site, mass), when the law has one.
    pub fn finite_support(&self) -> Option<Vec<(Site, f64)>> {
        match &self.inner {
            Inner::Lazy { hold } => {
                let mut v = Vec::new();
                if *hold > 0.0 {
                    v.push((Site::ORIGIN, *hold));
                }
                if *hold < 1.0 {
                    let m = (1.0 - hold) / (2.0 * self.d as f64);
                    for i in 0..self.d {
                        v.push((Site::axis(i, -1), m));
                        v.push((Site::axis(i, 1), m));
                    }
                }
                v.sort_by(|a, b| a.0.cmp(&b.0));
                Some(v)
            }
            Inner::Table(t) => Some(t.atoms.iter().map(|(s, m)| (*s, *m)).collect()),
            _ => None,
        }
    }

    /// Normalizing constants of the underlying kernels.
    pub fn normalizers(&self) -> Vec<f64> {
        match &self.inner {
            Inner::Axis(ks) => ks.iter().map(|k| k.normalizer()).collect(),
            Inner::Radial2(r) => vec![r.c],
            Inner::Power { kernel, .. } => vec![kernel.normalizer()],
            Inner::Geometric { c, .. } => vec![*c],
            Inner::Lazy { .. } | Inner::Table(_) => vec![1.0],
        }
    }

    pub fn pmf(&self, x: &Site) -> f64 {
        let d = self.d;
        if x.0[d..].iter().any(|&v| v != 0) {
            return 0.0;
        }
        match &self.inner {
            Inner::Axis(ks) => {
                let nz: Vec<usize> = (0..d).filter(|&i| x.0[i] != 0).collect();
                match nz.len() {
                    0 => ks.iter().map(|k| k.normalizer()).sum::<f64>() / d as f64,
                    1 => ks[nz[0]].pmf(x.0[nz[0]]) / d as f64,
                    _ => 0.0,
                }
            }
            Inner::Radial2(r) => r.c * (1.0 + x.norm2()).powf(-r.s),
            Inner::Lazy { hold } => match x.l1() {
                0 => *hold,
                1 => (1.0 - hold) / (2.0 * d as f64),
                _ => 0.0,
            },
            Inner::Power { beta, kernel } => {
                let z = x.0[0].unsigned_abs();
                if z == 0 {
                    return kernel.normalizer();
                }
                let k = power_index_beyond(*beta, z - 1);
                if (k as f64).powf(*beta).floor() as u64 == z {
                    kernel.pmf(k as i64)
                } else {
                    0.0
                }
            }
            Inner::Geometric { alpha, beta, c } => {
                let z = x.0[0].unsigned_abs();
                if z == 0 {
                    return *c;
                }
                let mut k = geometric_index_beyond(*beta, z - 1);
                let mut total = 0.0;
                while 2f64.powf(beta * k as f64).floor() as u64 == z {
                    total += c * 2f64.powf(-alpha * k as f64);
                    k += 1;
                }
                total
            }
            Inner::Table(t) => t.atoms.get(x).copied().unwrap_or(0.0),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Site {
        let d = self.d;
        match &self.inner {
            Inner::Axis(ks) => {
                let i = if d == 1 { 0 } else { rng.random_range(0..d) };
                Site::axis(i, ks[i].sample(rng))
            }
            Inner::Radial2(r) => r.sample(rng),
            Inner::Lazy { hold } => {
                let u: f64 = rng.random();
                if u < *hold {
                    Site::ORIGIN
                } else {
                    let j = rng.random_range(0..2 * d);
                    Site::axis(j / 2, if j % 2 == 0 { -1 } else { 1 })
                }
            }
            Inner::Power { beta, kernel } => {
                let k = kernel.sample(rng);
                let z = (k.unsigned_abs() as f64).powf(*beta).floor().min(JUMP_CAP as f64) as i64;
                Site::axis(0, if k < 0 { -z } else { z })
            }
            Inner::Geometric { alpha, beta, c } => {
                let u: f64 = rng.random();
                if u < *c {
                    return Site::ORIGIN;
                }
                let v: f64 = rng.random();
                // P(k ≥ j+1 | k ≥ 1) = 2^{-αj}
                let k = 1 + ((1.0 - v).ln() / (-alpha * std::f64::consts::LN_2)).floor() as u64;
                let z = 2f64.powf(beta * k as f64).floor().min(JUMP_CAP as f64) as i64;
                Site::axis(0, if rng.random::<bool>() { z } else { -z })
            }
            Inner::Table(t) => {
                let u: f64 = rng.random::<f64>() * t.cum.last().unwrap();
                let i = t.cum.partition_point(|&c| c <= u).min(t.order.len() - 1);
                t.order[i]
            }
        }
    }

    /// Total-variation distance between the sampler and the exact law.
    pub fn sampler_tv_bound(&self) -> f64 {
        match &self.inner {
            Inner::Axis(ks) => ks.iter().map(|k| k.abs_tail(JUMP_CAP)).sum::<f64>() / self.d as f64,
            Inner::Power { kernel, .. } => kernel.abs_tail(JUMP_CAP),
            _ => 0.0,
        }
    }

    /// Inner box sum and analytic tail. Their sum should be 1.
    pub fn mass_check(&self) -> MassCheck {
        match &self.inner {
            Inner::Axis(ks) => {
                let d = self.d as f64;
                MassCheck {
                    inner: ks.iter().map(|k| k.inner_mass()).sum::<f64>() / d,
                    tail: ks.iter().map(|k| k.abs_tail(k.radius())).sum::<f64>() / d,
                }
            }
            Inner::Power { kernel, .. } => MassCheck { inner: kernel.inner_mass(), tail: kernel.abs_tail(kernel.radius()) },
            Inner::Radial2(r) => {
                let l = self.radius.min(400) as i64;
                MassCheck { inner: r.c * r.box_sum(l), tail: r.c * r.outside_box(l) }
            }
            Inner::Geometric { alpha, c, .. } => {
                let kmax = 40u64;
                let mut acc = Neumaier::new();
                acc.add(*c);
                for k in 1..=kmax {
                    acc.add(2.0 * c * 2f64.powf(-alpha * k as f64));
                }
                let q = 2f64.powf(-*alpha);
                MassCheck { inner: acc.value(), tail: 2.0 * c * q.powi(kmax as i32 + 1) / (1.0 - q) }
            }
            Inner::Lazy { .. } | Inner::Table(_) => {
                MassCheck { inner: numerics::neumaier_sum(self.finite_support().unwrap().into_iter().map(|(_, m)| m)), tail: 0.0 }
            }
        }
    }

    /// μ̂(ξ) = Σ μ(x) cos⟨ξ,x⟩.
    pub fn char_fn(&self, xi: &[f64]) -> CharValue {
        assert_eq!(xi.len(), self.d);
        let (one_minus, bound) = match &self.inner {
            Inner::Axis(ks) => {
                let d = self.d as f64;
                ks.iter().zip(xi).fold((0.0, 0.0), |(v, b), (k, &x)| {
                    let (v1, b1) = k.one_minus_char(x);
                    (v + v1 / d, b + b1 / d)
                })
            }
            Inner::Radial2(r) => r.one_minus_char(xi),
            Inner::Lazy { hold } => {
                let d = self.d as f64;
                let s: f64 = xi.iter().map(|&x| 2.0 * (0.5 * x).sin().powi(2)).sum();
                ((1.0 - hold) * s / d, 0.0)
            }
            Inner::Power { beta, kernel } => {
                let u = xi[0];
                let k_max = 2_000_000u64;
                let mut acc = Neumaier::new();
                for k in 1..=k_max {
                    let z = (k as f64).powf(*beta).floor();
                    let h = (0.5 * z * u).sin();
                    acc.add(kernel.pmf(k as i64) * h * h);
                }
                let tail = kernel.abs_tail(k_max);
                (4.0 * acc.value() + 0.5 * tail, 0.5 * tail)
            }
            Inner::Geometric { alpha, beta, c } => {
                let u = xi[0];
                let mut acc = Neumaier::new();
                let mut k = 1u64;
                loop {
                    let p = c * 2f64.powf(-alpha * k as f64);
                    if p < 1e-20 || k > 2000 {
                        break;
                    }
                    let z = 2f64.powf(beta * k as f64).floor();
                    let h = (0.5 * z * u).sin();
                    acc.add(4.0 * p * h * h);
                    k += 1;
                }
                (acc.value(), 1e-20)
            }
            Inner::Table(t) => {
                let v = numerics::neumaier_sum(t.atoms.iter().map(|(s, m)| {
                    let h = (0.5 * s.dot(xi)).sin();
                    2.0 * m * h * h
                }));
                (v, 0.0)
            }
        };
        CharValue { value: 1.0 - one_minus, one_minus, truncation_bound: bound }
    }

    // exponent a of μ(|x|_1 > r) ≍ r^{-a}; infinite for finite support
    fn tail_index(&self) -> f64 {
        match &self.inner {
            Inner::Axis(ks) => ks.iter().map(|k| k.exponent() - 1.0).fold(f64::INFINITY, f64::min),
            Inner::Radial2(r) => r.alpha,
            Inner::Power { beta, kernel } => (kernel.exponent() - 1.0) / beta,
            Inner::Geometric { alpha, beta, .. } => alpha / beta,
            Inner::Lazy { .. } | Inner::Table(_) => f64::INFINITY,
        }
    }

    /// μ(|x|_1 > r).
    pub fn l1_tail(&self, r: u64) -> f64 {
        match &self.inner {
            Inner::Axis(ks) => ks.iter().map(|k| k.abs_tail(r)).sum::<f64>() / self.d as f64,
            Inner::Radial2(rad) => rad.l1_tail(r),
            Inner::Power { beta, kernel } => {
                2.0 * kernel.normalizer() * power_tail(kernel.exponent(), power_index_beyond(*beta, r))
            }
            Inner::Geometric { alpha, beta, c } => {
                let k0 = geometric_index_beyond(*beta, r);
                2.0 * c * 2f64.powf(-alpha * k0 as f64) / (1.0 - 2f64.powf(-alpha))
            }
            Inner::Lazy { .. } | Inner::Table(_) => numerics::neumaier_sum(
                self.finite_support().unwrap().into_iter().filter(|(s, _)| s.l1() > r).map(|(_, m)| m),
            ),
        }
    }

    // lim r^a μ(|x|_1 > r) when regularly varying
    fn l1_tail_constant(&self) -> Option<f64> {
        let a = self.tail_index();
        match &self.inner {
            Inner::Axis(ks) => Some(
                ks.iter()
                    .filter(|k| (k.exponent() - 1.0 - a).abs() < 1e-15)
                    .map(|k| 2.0 * k.normalizer() / a)
                    .sum::<f64>()
                    / self.d as f64,
            ),
            Inner::Radial2(r) => Some(r.l1_tail_constant()),
            Inner::Power { beta, kernel } => Some(2.0 * kernel.normalizer() * beta / (kernel.exponent() - 1.0)),
            _ => None,
        }
    }

    /// Weak moment W(ρ_α, μ) = sup_s s·μ(ρ_α > s) with ρ_α(x) = (1+|x|_1)^α.
    pub fn weak_moment(&self, alpha: f64, s_grid: &[f64]) -> Result<MomentReport> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(invalid("weak moment exponent outside (0, 2)"));
        }
        let at = |s: f64| -> f64 {
            if s < 1.0 {
                return s;
            }
            let r = s.powf(1.0 / alpha) - 1.0;
            if r >= 1e18 {
                return f64::NAN;
            }
            s * self.l1_tail(r.floor() as u64)
        };
        let values: Vec<f64> = s_grid.iter().map(|&s| at(s)).collect();
        let grid_sup = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
        let a = self.tail_index();
        let (weak_moment, tail_limit) = if a < alpha - 1e-12 {
            (f64::INFINITY, Some(f64::INFINITY))
        } else if a.is_infinite() {
            (grid_sup, Some(0.0))
        } else {
            // scan far out in s for the supremum of the regularly varying part
            let far: f64 = (1..=480).map(|j| at(10f64.powf(j as f64 / 32.0))).filter(|v| v.is_finite()).fold(0.0, f64::max);
            let limit = if (a - alpha).abs() <= 1e-12 {
                self.l1_tail_constant()
            } else {
                Some(0.0)
            };
            (grid_sup.max(far).max(limit.unwrap_or(0.0)), limit)
        };
        Ok(MomentReport { alpha, weak_moment, s_grid: s_grid.to_vec(), values, tail_limit })
    }

    fn rays(&self, es: &ExponentStructure) -> Result<Vec<(Ray<'_>, f64)>> {
        let d = self.d;
        if es.dim() != d {
            return Err(invalid("exponent dimension does not match the law"));
        }
        let alpha_of = |dir: &[f64]| -> Result<f64> {
            es.eigen_direction(dir)
                .map(|i| es.alphas()[i])
                .ok_or_else(|| Error::Unsupported("support ray is not an eigendirection of E".into()))
        };
        let mut out = Vec::new();
        match &self.inner {
            Inner::Axis(ks) => {
                for (i, k) in ks.iter().enumerate() {
                    for sign in [1.0, -1.0] {
                        let mut dir = vec![0.0; d];
                        dir[i] = sign;
                        let a = alpha_of(&dir)?;
                        out.push((Ray::Kernel { dir, weight: 1.0 / d as f64, kernel: k }, a));
                    }
                }
            }
            Inner::Power { beta, kernel } => {
                for sign in [1.0, -1.0] {
                    out.push((Ray::Power { kernel, beta: *beta, sign }, alpha_of(&[sign])?));
                }
            }
            Inner::Geometric { alpha, beta, c } => {
                for sign in [1.0, -1.0] {
                    out.push((Ray::Geometric { alpha: *alpha, beta: *beta, c: *c, sign }, alpha_of(&[sign])?));
                }
            }
            Inner::Lazy { .. } | Inner::Table(_) => {
                let mut groups: Vec<(Vec<f64>, Vec<(f64, f64)>)> = Vec::new();
                for (s, m) in self.finite_support().unwrap() {
                    if s.is_origin() {
                        continue;
                    }
                    let x = s.to_f64(d);
                    let r = s.norm2();
                    let dir: Vec<f64> = x.iter().map(|v| v / r).collect();
                    match groups.iter_mut().find(|(g, _)| g.iter().zip(&dir).all(|(a, b)| (a - b).abs() < 1e-12)) {
                        Some((_, atoms)) => atoms.push((r, m)),
                        None => groups.push((dir, vec![(r, m)])),
                    }
                }
                for (dir, atoms) in groups {
                    let a = alpha_of(&dir)?;
                    out.push((Ray::Atoms { dir, atoms }, a));
                }
            }
            Inner::Radial2(_) => {
                return Err(Error::Unsupported("attraction diagnostic for radial laws in d = 2".into()))
            }
        }
        Ok(out)
    }

    /// t·μ({s^E x : x ∈ Ω, s > t}) along a grid of t, for laws supported on
    /// finitely many rays through eigendirections of E.
    pub fn doa_diagnostic(&self, es: &ExponentStructure, omega: &DirectionSet, t_grid: &[f64]) -> Result<DoaReport> {
        let rays = self.rays(es)?;
        let selected: Vec<&(Ray<'_>, f64)> = rays.iter().filter(|(r, _)| omega.contains(&r.dir())).collect();
        let values: Vec<f64> = t_grid
            .iter()
            .map(|&t| {
                // s^E y with |y| = 1 on an eigenray has length s^{1/α}
                t * selected.iter().map(|(ray, a)| ray.beyond(t.powf(1.0 / a))).sum::<f64>()
            })
            .collect();
        let q = (values.len() * 3) / 4;
        let tail = &values[q.min(values.len().saturating_sub(1))..];
        let mean = tail.iter().sum::<f64>() / tail.len().max(1) as f64;
        let spread = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - tail.iter().cloned().fold(f64::INFINITY, f64::min);
        let last_quartile_dispersion = if mean > 0.0 { spread / mean } else { 0.0 };
        Ok(DoaReport { t_grid: t_grid.to_vec(), values, last_quartile_dispersion })
    }
}

impl TableLaw {
    fn new(dim: usize, atoms: &[(Vec<i64>, f64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, m) in atoms {
            if x.len() != dim {
                return Err(invalid("table atom has wrong dimension"));
            }
            if !(*m >= 0.0) {
                return Err(invalid("negative mass in table"));
            }
            *map.entry(Site::from_slice(x)).or_insert(0.0) += m;
        }
        let total = numerics::neumaier_sum(map.values().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("table masses sum to {total}, not 1")));
        }
        for (s, m) in &map {
            let other = map.get(&s.neg()).copied().unwrap_or(0.0);
            if other != *m {
                return Err(invalid(format!("table is not symmetric at {s}")));
            }
        }
        map.retain(|_, m| *m > 0.0);
        let order: Vec<Site> = map.keys().copied().collect();
        let mut acc = Neumaier::new();
        let cum = order
            .iter()
            .map(|s| {
                acc.add(map[s]);
                acc.value()
            })
            .collect();
        Ok(Self { atoms: map, order, cum })
    }
}

const R2_HALF_DIAG: f64 = std::f64::consts::FRAC_1_SQRT_2;

impl Radial2 {
    fn new(alpha: f64) -> Self {
        let s = 2.0 + alpha;
        let mut r = Self { alpha, s, c: 1.0 };
        let l = 256;
        r.c = 1.0 / (r.box_sum(l) + r.outside_box(l));
        r
    }

    fn f(&self, x: f64, y: f64) -> f64 {
        (1.0 + (x * x + y * y).sqrt()).powf(-self.s)
    }

    /// Σ_{|x|_∞ ≤ l} (1+‖x‖)^{-s}.
    fn box_sum(&self, l: i64) -> f64 {
        let mut acc = Neumaier::new();
        for a in -l..=l {
            for b in -l..=l {
                acc.add(self.f(a as f64, b as f64));
            }
        }
        acc.value()
    }

    /// Σ_{|x|_∞ > l} (1+‖x‖)^{-s}: Euler–Maclaurin along rows, plus the
    /// far rows as integrals (the Poisson corrections are O(e^{-2πl})).
    fn outside_box(&self, l: i64) -> f64 {
        let s = self.s;
        let lf = l as f64;
        // Σ_{k>l} g_a(k), g_a(k) = (1+sqrt(a²+k²))^{-s}
        let row_tail = |a: f64| -> f64 {
            let g = |k: f64| self.f(a, k);
            let integral = numerics::integrate(|w: f64| if w <= 0.0 { 0.0 } else { g(lf / w) * lf / (w * w) }, 0.0, 1.0, 1e-17)
                .unwrap_or(f64::NAN);
            let r = (a * a + lf * lf).sqrt();
            let dg = -s * (1.0 + r).powf(-s - 1.0) * lf / r;
            integral - 0.5 * g(lf) - dg / 12.0
        };
        let mut acc = Neumaier::new();
        for a in -l..=l {
            acc.add(2.0 * row_tail(a as f64));
        }
        // full rows |a| > l: H(a) = ∫_R g_a
        let h_of = |a: f64, deriv: bool| -> f64 {
            numerics::integrate(
                |w: f64| {
                    if w >= 1.0 {
                        return 0.0;
                    }
                    let t = a * w / (1.0 - w);
                    let jac = a / ((1.0 - w) * (1.0 - w));
                    let r = (a * a + t * t).sqrt();
                    let v = if deriv { -s * (1.0 + r).powf(-s - 1.0) * a / r } else { (1.0 + r).powf(-s) };
                    2.0 * v * jac
                },
                0.0,
                1.0,
                1e-18,
            )
            .unwrap_or(f64::NAN)
        };
        // ∫_{a>l} H(a) da in polar coordinates
        let area = numerics::integrate(
            |phi: f64| {
                let c = phi.cos();
                if c <= 0.0 {
                    return 0.0;
                }
                let rho = 1.0 + lf / c;
                rho.powf(2.0 - s) / (s - 2.0) - rho.powf(1.0 - s) / (s - 1.0)
            },
            0.0,
            0.5 * PI,
            1e-18,
        )
        .unwrap_or(f64::NAN);
        let far = 2.0 * area - 0.5 * h_of(lf, false) - h_of(lf, true) / 12.0;
        acc.add(2.0 * far);
        acc.value()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Site {
        // Proposal density ∝ (1+max(0,‖y‖-r0))^{-s} dominates c(1+‖x‖)^{-s}
        // on every unit cell around x, so rounding plus rejection is exact.
        let r0 = R2_HALF_DIAG;
        let a = self.alpha;
        let inner_mass = 0.5 * r0 * r0;
        // ∫_0^∞ (u+r0)(1+u)^{-s} du
        let outer = |u: f64| -> f64 {
            (1.0 - (1.0 + u).powf(-a)) / a + (r0 - 1.0) * (1.0 - (1.0 + u).powf(-1.0 - a)) / (1.0 + a)
        };
        let outer_mass = 1.0 / a + (r0 - 1.0) / (1.0 + a);
        loop {
            let v: f64 = rng.random::<f64>() * (inner_mass + outer_mass);
            let rho = if v < inner_mass {
                (2.0 * v).sqrt()
            } else {
                let target = v - inner_mass;
                // invert the radial CDF in log(1+u)
                let mut lo = 0.0f64;
                let mut hi = 1.0f64;
                while outer(hi.exp_m1()) < target {
                    lo = hi;
                    hi *= 2.0;
                    if hi > 700.0 {
                        break;
                    }
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if outer(mid.exp_m1()) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-15 * hi.max(1e-300) {
                        break;
                    }
                }
                r0 + (0.5 * (lo + hi)).exp_m1()
            };
            let phi: f64 = rng.random::<f64>() * 2.0 * PI;
            let (y0, y1) = (rho * phi.cos(), rho * phi.sin());
            if y0.abs() > JUMP_CAP as f64 || y1.abs() > JUMP_CAP as f64 {
                continue;
            }
            let x = Site::from_slice(&[y0.round() as i64, y1.round() as i64]);
            let accept = ((1.0 + (rho - r0).max(0.0)) / (1.0 + x.norm2())).powf(self.s);
            if rng.random::<f64>() < accept {
                return x;
            }
        }
    }

    fn one_minus_char(&self, xi: &[f64]) -> (f64, f64) {
        let norm = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        if norm == 0.0 {
            return (0.0, 0.0);
        }
        let k = ((40.0 / norm).ceil() as i64).clamp(64, 1500);
        let mut acc = Neumaier::new();
        let mut mass = Neumaier::new();
        for a in -k..=k {
            for b in -k..=k {
                let m = self.c * self.f(a as f64, b as f64);
                let h = (0.5 * (xi[0] * a as f64 + xi[1] * b as f64)).sin();
                acc.add(2.0 * m * h * h);
                mass.add(m);
            }
        }
        let outside = (1.0 - mass.value()).max(0.0);
        (acc.value() + outside, outside)
    }

    fn l1_tail_constant(&self) -> f64 {
        let a = self.alpha;
        let ang = numerics::integrate(|t: f64| (t.cos().abs() + t.sin().abs()).powf(a), 0.0, 0.5 * PI, 1e-15).unwrap();
        4.0 * self.c * ang / a
    }

    fn l1_tail(&self, r: u64) -> f64 {
        const RMAX: u64 = 1024;
        if r >= RMAX {
            return self.l1_tail_constant() * (r as f64).powf(-self.alpha);
        }
        let r = r as i64;
        let mut acc = Neumaier::new();
        for a in -r..=r {
            let w = r - a.abs();
            for b in -w..=w {
                acc.add(self.c * self.f(a as f64, b as f64));
            }
        }
        (1.0 - acc.value()).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replica_stream;

    #[test]
    fn lazy_walk_pmf_and_char_fn() {
        let law = StepLaw::new(LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.5 }).unwrap();
        assert_eq!(law.pmf(&Site::ORIGIN), 0.5);
        assert_eq!(law.pmf(&Site::axis(0, 1)), 0.25);
        assert_eq!(law.pmf(&Site::axis(0, -1)), 0.25);
        assert!(law.char_fn(&[PI]).value.abs() < 1e-15);
        assert_eq!(law.char_fn(&[0.0]).value, 1.0);
    }

    #[test]
    fn axis_ratio_cancels_normalizer() {
        let law = StepLaw::new(LawSpec::AxisProduct { alphas: vec![1.0] }).unwrap();
        let p0 = law.pmf(&Site::ORIGIN);
        for k in [1i64, 5, -17] {
            let ratio = law.pmf(&Site::axis(0, k)) / p0;
            assert!((ratio - (1.0 + k.abs() as f64).powi(-2)).abs() < 1e-16);
        }
    }

    #[test]
    fn radial_normalizer_matches_zeta() {
        let law = StepLaw::new(LawSpec::Radial { dim: 1, alpha: 1.0 }).unwrap();
        // 1/(1 + 2 Σ_{k≥1}(1+k)^{-2}) = 1/(π²/3 - 1)
        let c = 1.0 / (PI * PI / 3.0 - 1.0);
        assert!((law.normalizers()[0] - c).abs() < 1e-15);
        let m = law.mass_check();
        assert!((m.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radial_two_dim_normalizer_is_consistent() {
        let law = StepLaw::new(LawSpec::Radial { dim: 2, alpha: 1.0 }).unwrap();
        let m = law.mass_check();
        assert!((m.total() - 1.0).abs() < 1e-11, "{m:?}");
        let Inner::Radial2(r) = &law.inner else { unreachable!() };
        // box sums at two sizes differ by exactly the difference of tails
        let a = r.box_sum(100) + r.outside_box(100);
        let b = r.box_sum(256) + r.outside_box(256);
        assert!((a - b).abs() < 1e-11 * a, "{a} {b}");
    }

    #[test]
    fn geometric_lattice_pmf_sums_to_one() {
        let law = StepLaw::new(LawSpec::OneDimGeometric { alpha: 1.0, beta: 1.0 }).unwrap();
        // β = 1 puts the atoms at ±2^k
        let total = law.pmf(&Site::ORIGIN) + 2.0 * (1..60).map(|k| law.pmf(&Site::axis(0, 1i64 << k))).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(law.pmf(&Site::axis(0, 3)), 0.0);
    }

    #[test]
    fn power_lattice_pmf_on_floor_points() {
        let law = StepLaw::new(LawSpec::OneDimPower { alpha: 3.0, beta: 1.5 }).unwrap();
        let c = law.normalizers()[0];
        // ⌊2^{1.5}⌋ = 2, ⌊3^{1.5}⌋ = 5
        assert!((law.pmf(&Site::axis(0, 2)) - c * 3f64.powf(-3.0)).abs() < 1e-16);
        assert!((law.pmf(&Site::axis(0, -5)) - c * 4f64.powf(-3.0)).abs() < 1e-16);
        assert_eq!(law.pmf(&Site::axis(0, 4)), 0.0);
    }

    #[test]
    fn table_rejects_asymmetry() {
        let bad = LawSpec::Table { dim: 1, atoms: vec![(vec![1], 0.6), (vec![-1], 0.4)] };
        assert!(StepLaw::new(bad).is_err());
    }

    #[test]
    fn lazy_sampler_hold_frequency() {
        let law = StepLaw::new(LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.5 }).unwrap();
        let mut rng = replica_stream(11, 0);
        let n = 1_000_000;
        let zeros = (0..n).filter(|_| law.sample(&mut rng).is_origin()).count();
        assert!((zeros as f64 / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn tail_sampler_hits_tail_at_the_right_rate() {
        // small table so the exact tail inversion is exercised
        let law = StepLaw::with_truncation(LawSpec::Radial { dim: 1, alpha: 1.0 }, 50).unwrap();
        let mut rng = replica_stream(5, 0);
        let n = 400_000;
        let hits = (0..n).filter(|_| law.sample(&mut rng).0[0].unsigned_abs() > 100).count();
        let p = law.l1_tail(100);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p).abs() < 4.0 * se);
    }

    #[test]
    fn radial2_sampler_matches_pmf_near_origin() {
        let law = StepLaw::new(LawSpec::Radial { dim: 2, alpha: 1.0 }).unwrap();
        let mut rng = replica_stream(9, 1);
        let n = 200_000;
        let mut c0 = 0;
        let mut c1 = 0;
        for _ in 0..n {
            let x = law.sample(&mut rng);
            if x.is_origin() {
                c0 += 1;
            } else if x == Site::from_slice(&[1, 1]) {
                c1 += 1;
            }
        }
        for (count, site) in [(c0, Site::ORIGIN), (c1, Site::from_slice(&[1, 1]))] {
            let p = law.pmf(&site);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((count as f64 / n as f64 - p).abs() < 4.0 * se, "{site}");
        }
    }

    #[test]
    fn char_fn_axis_product_is_average_of_marginals() {
        let law = StepLaw::with_truncation(LawSpec::AxisProduct { alphas: vec![1.0, 1.5] }, 2000).unwrap();
        let xi = [0.7, -1.3];
        let mut acc = Neumaier::new();
        let mut seen = Neumaier::new();
        for i in 0..2 {
            for k in -200_000i64..=200_000 {
                let x = Site::axis(i, k);
                if i == 1 && k == 0 {
                    continue;
                }
                acc.add(law.pmf(&x) * x.dot(&xi).cos());
                seen.add(law.pmf(&x));
            }
        }
        let direct = acc.value();
        // the omitted far jumps can move the sum by at most their mass
        let omitted = 1.0 - seen.value();
        let v = law.char_fn(&xi);
        assert!((v.value - direct).abs() < omitted + 1e-12, "{} {} {}", v.value, direct, omitted);
    }

    #[test]
    fn radial_limit_of_char_fn() {
        let law = StepLaw::new(LawSpec::Radial { dim: 1, alpha: 1.0 }).unwrap();
        let c = law.normalizers()[0];
        let n = 1e4;
        for xi in [0.5, 1.0, 3.0] {
            let v = law.char_fn(&[xi / n]);
            let lim = c * PI * xi;
            assert!((n * v.one_minus - lim).abs() / lim < 0.05);
        }
    }

    #[test]
    fn weak_moment_of_radial_law() {
        let law = StepLaw::new(LawSpec::Radial { dim: 1, alpha: 1.0 }).unwrap();
        let grid: Vec<f64> = (0..40).map(|j| 2f64.powi(j)).collect();
        let rep = law.weak_moment(1.0, &grid).unwrap();
        assert!(rep.weak_moment.is_finite());
        let c = law.normalizers()[0];
        assert!((rep.tail_limit.unwrap() - 2.0 * c).abs() < 1e-15);
        for (s, v) in rep.s_grid.iter().zip(&rep.values) {
            assert!(rep.weak_moment >= *v, "{s}");
        }
        let heavier = law.weak_moment(0.5, &grid).unwrap();
        assert!(heavier.weak_moment.is_finite());
        let too_light = law.weak_moment(1.5, &grid).unwrap();
        assert!(too_light.weak_moment.is_infinite());
    }

    #[test]
    fn point_mass_weak_moment_vanishes_beyond_one() {
        let law = StepLaw::new(LawSpec::Table { dim: 1, atoms: vec![(vec![0], 1.0)] }).unwrap();
        let rep = law.weak_moment(1.0, &[2.0, 10.0, 100.0]).unwrap();
        assert!(rep.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn doa_axis_product_converges() {
        let law = StepLaw::new(LawSpec::AxisProduct { alphas: vec![1.0, 1.0] }).unwrap();
        let es = ExponentStructure::diagonal(&[1.0, 1.0]).unwrap();
        let t: Vec<f64> = (1..=24).map(|j| 2f64.powi(j)).collect();
        let rep = law.doa_diagnostic(&es, &DirectionSet::Rays(vec![vec![1.0, 0.0]]), &t).unwrap();
        // limit (1/d)·c/α
        let lim = 0.5 * law.normalizers()[0];
        assert!((rep.values.last().unwrap() - lim).abs() / lim < 1e-5);
        assert!(rep.last_quartile_dispersion < 1e-4);
        let off = law.doa_diagnostic(&es, &DirectionSet::Rays(vec![vec![0.6, 0.8]]), &t).unwrap();
        assert!(off.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn doa_geometric_lattice_oscillates() {
        let (alpha, beta) = (1.0, 1.0);
        let law = StepLaw::new(LawSpec::OneDimGeometric { alpha, beta }).unwrap();
        let es = ExponentStructure::diagonal(&[alpha / beta]).unwrap();
        let t: Vec<f64> = (0..400).map(|j| 10f64.powf(2.0 + j as f64 / 50.0)).collect();
        let rep = law.doa_diagnostic(&es, &DirectionSet::Rays(vec![vec![1.0]]), &t).unwrap();
        assert!(rep.last_quartile_dispersion > 0.3);
        let lo = rep.values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(lo > 0.0);
    }
}
