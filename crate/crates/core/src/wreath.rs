//! Return probabilities of switch-walk-switch random walks q = ν∗μ∗ν on
//! lamplighter groups K≀Z^d, through the occupation identity
//! q^(n)((e, g)) = E[Π_h ν^(m_h)(e_K) 1{X_n = g}],
//! with m_h = 2 l(n,h) - 1{h = 0} - 1{h = g} lamp moves at site h.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::Site;
use crate::numerics::Neumaier;
use crate::occupation::{simulate, EstimatorResult, OccupationRecord, SiteMap};
use crate::par::Execution;
use crate::rng::replica_stream;
use crate::stablelaw::convolution_power;
use crate::steplaw::{LawSpec, StepLaw};

/// Lamp group K with its step law ν.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LampGroupModel {
    /// Finite group given by its multiplication table (identity 0) and ν.
    FiniteTable { mult: Vec<Vec<usize>>, nu: Vec<f64> },
    /// K = Z^D with ν a step law.
    LatticeZd { law: LawSpec },
    /// F_K(m) = max(c m^γ (log m)^β, log(1/ε)) for m ≥ 1/2, with ν(e_K) = ε.
    Parametric { c: f64, gamma: f64, log_power: f64, epsilon: f64 },
}

impl LampGroupModel {
    /// Z/order with ν given on residues.
    pub fn cyclic(nu: Vec<f64>) -> Self {
        let g = nu.len();
        let mult = (0..g).map(|a| (0..g).map(|b| (a + b) % g).collect()).collect();
        LampGroupModel::FiniteTable { mult, nu }
    }

    /// Z_2 with the uniform step.
    pub fn uniform_z2() -> Self {
        Self::cyclic(vec![0.5, 0.5])
    }

    /// Z≀Z lamps, F_K(m) ≍ m^{1/3} (log m)^{2/3}.
    pub fn lamplighter_over_z(c: f64, epsilon: f64) -> Self {
        LampGroupModel::Parametric { c, gamma: 1.0 / 3.0, log_power: 2.0 / 3.0, epsilon }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LampGroupModel::FiniteTable { mult, nu } => {
                let g = nu.len();
                if g == 0 || mult.len() != g || mult.iter().any(|r| r.len() != g || r.iter().any(|&x| x >= g)) {
                    return Err(invalid("multiplication table must be g×g with entries below g"));
                }
                if (0..g).any(|a| mult[0][a] != a || mult[a][0] != a) {
                    return Err(invalid("element 0 must be the identity"));
                }
                let total: f64 = nu.iter().sum();
                if (total - 1.0).abs() > 1e-12 || nu.iter().any(|&p| p < 0.0) {
                    return Err(invalid("lamp step must be a probability vector"));
                }
                for a in 0..g {
                    let inv = (0..g).find(|&b| mult[a][b] == 0).ok_or_else(|| invalid("element without inverse"))?;
                    if (nu[a] - nu[inv]).abs() > 1e-15 {
                        return Err(invalid("lamp step is not symmetric"));
                    }
                }
                if !(nu[0] > 0.0) {
                    return Err(invalid("lamp step needs ν(e_K) > 0"));
                }
                Ok(())
            }
            LampGroupModel::LatticeZd { law } => {
                let l = StepLaw::new(law.clone())?;
                if !(l.pmf(&Site::ORIGIN) > 0.0) {
                    return Err(invalid("lamp step needs ν(e_K) > 0"));
                }
                Ok(())
            }
            LampGroupModel::Parametric { c, gamma, epsilon, .. } => {
                if !(*c > 0.0 && *gamma >= 0.0 && *gamma <= 1.0 && *epsilon > 0.0 && *epsilon <= 1.0) {
                    return Err(invalid("parametric lamp model needs c > 0, γ in [0, 1], ε in (0, 1]"));
                }
                Ok(())
            }
        }
    }

    pub fn epsilon(&self) -> Result<f64> {
        Ok(match self {
            LampGroupModel::FiniteTable { nu, .. } => nu[0],
            LampGroupModel::LatticeZd { law } => StepLaw::new(law.clone())?.pmf(&Site::ORIGIN),
            LampGroupModel::Parametric { epsilon, .. } => *epsilon,
        })
    }

    /// ν^(2m)(e_K).
    pub fn lamp_return(&self, m: u64) -> Result<f64> {
        self.lamp_power(2 * m)
    }

    /// ν^(k)(e_K), including odd k.
    pub fn lamp_power(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        match self {
            LampGroupModel::FiniteTable { mult, nu } => Ok(finite_powers(mult, nu, k)[k as usize]),
            LampGroupModel::LatticeZd { law } => lattice_power(&StepLaw::new(law.clone())?, k),
            LampGroupModel::Parametric { .. } => Ok((-self.parametric_f(k as f64 / 2.0)).exp()),
        }
    }

    fn parametric_f(&self, m: f64) -> f64 {
        match self {
            LampGroupModel::Parametric { c, gamma, log_power, epsilon } => {
                if m <= 0.0 {
                    return 0.0;
                }
                // never above ν(e_K) = ε once a lamp has moved
                let base = c * m.powf(*gamma) * m.ln().max(0.0).powf(*log_power);
                base.max(-epsilon.ln())
            }
            _ => unreachable!(),
        }
    }

    /// Table of ν^(k)(e_K) for k ≤ 2 cap, with a power-law tail.
    pub fn profile(&self, cap: u64) -> Result<ReturnProfile> {
        self.validate()?;
        let kmax = 2 * cap;
        let powers: Vec<f64> = match self {
            LampGroupModel::FiniteTable { mult, nu } => finite_powers(mult, nu, kmax),
            LampGroupModel::LatticeZd { law } => {
                let l = StepLaw::new(law.clone())?;
                lattice_profile(&l, kmax)?
            }
            LampGroupModel::Parametric { .. } => {
                (0..=kmax).map(|k| if k == 0 { 1.0 } else { (-self.parametric_f(k as f64 / 2.0)).exp() }).collect()
            }
        };
        let tail_gamma = match self {
            LampGroupModel::Parametric { gamma, .. } => *gamma,
            LampGroupModel::FiniteTable { .. } => 0.0,
            LampGroupModel::LatticeZd { .. } => 0.0,
        };
        Ok(ReturnProfile { powers, tail_gamma, model: self.clone() })
    }
}

/// ν^(k)(e) for k = 0..=kmax in a finite group.
fn finite_powers(mult: &[Vec<usize>], nu: &[f64], kmax: u64) -> Vec<f64> {
    let g = nu.len();
    let mut dist = vec![0.0; g];
    dist[0] = 1.0;
    let mut out = vec![1.0];
    for _ in 0..kmax {
        let mut next = vec![0.0; g];
        for a in 0..g {
            if dist[a] == 0.0 {
                continue;
            }
            for b in 0..g {
                next[mult[a][b]] += dist[a] * nu[b];
            }
        }
        dist = next;
        out.push(dist[0]);
    }
    out
}

/// Torus side for k-fold convolution on Z^D, doubled until nothing wraps.
fn lattice_power(law: &StepLaw, k: u64) -> Result<f64> {
    let d = law.dim();
    let limit = if d == 1 { 1 << 22 } else { 1 << 11 };
    let mut side = 64usize;
    loop {
        let t = convolution_power(law, k, side)?;
        if !t.wrapped {
            return Ok(t.get(&Site::ORIGIN));
        }
        if side >= limit {
            return Err(Error::FrequencyBox(format!("lamp return at k = {k} needs a larger torus")));
        }
        side *= 2;
    }
}

/// Exact values on k ≤ 64 and on a doubling grid, log-log interpolated
/// in between.
fn lattice_profile(law: &StepLaw, kmax: u64) -> Result<Vec<f64>> {
    let mut grid: Vec<u64> = (0..=kmax.min(64)).collect();
    let mut k = 128;
    while k < kmax {
        grid.push(k);
        k *= 2;
    }
    if *grid.last().unwrap() != kmax {
        grid.push(kmax);
    }
    let exact: Vec<f64> = grid.iter().map(|&k| lattice_power(law, k)).collect::<Result<_>>()?;
    let mut out = vec![0.0; kmax as usize + 1];
    for w in 0..grid.len() {
        out[grid[w] as usize] = exact[w];
        if w + 1 < grid.len() && grid[w + 1] > grid[w] + 1 {
            let (k0, k1) = (grid[w] as f64, grid[w + 1] as f64);
            let (v0, v1) = (exact[w].ln(), exact[w + 1].ln());
            for k in grid[w] + 1..grid[w + 1] {
                let t = ((k as f64).ln() - k0.ln()) / (k1.ln() - k0.ln());
                out[k as usize] = (v0 + t * (v1 - v0)).exp();
            }
        }
    }
    Ok(out)
}

/// F_K(m) = -log ν^(2m)(e_K) for m ≤ cap with a tail model.
#[derive(Clone, Debug)]
pub struct ReturnProfile {
    powers: Vec<f64>,
    tail_gamma: f64,
    model: LampGroupModel,
}

impl ReturnProfile {
    pub fn cap(&self) -> u64 {
        (self.powers.len() as u64 - 1) / 2
    }

    /// ν^(k)(e_K).
    pub fn power(&self, k: u64) -> f64 {
        if let Some(&v) = self.powers.get(k as usize) {
            return v;
        }
        if let LampGroupModel::Parametric { .. } = self.model {
            return (-self.model.parametric_f(k as f64 / 2.0)).exp();
        }
        let kmax = (self.powers.len() - 1) as f64;
        let f_last = -self.powers.last().unwrap().ln();
        (-(f_last * (k as f64 / kmax).powf(self.tail_gamma))).exp()
    }

    /// F_K(m).
    pub fn f(&self, m: u64) -> f64 {
        -self.power(2 * m).ln()
    }

    /// F_K nondecreasing up to the slack log(1/ε).
    pub fn check_monotone(&self) -> Result<()> {
        let eps = self.model.epsilon()?;
        let slack = -eps.ln() + 1e-12;
        for m in 1..=self.cap() {
            if self.f(m) + slack < self.f(m - 1) {
                return Err(Error::Numeric { what: "F_K decreases beyond the ε slack".into(), residual: self.f(m - 1) - self.f(m) });
            }
        }
        Ok(())
    }
}

/// Lamp move counts m_h = 2 l(n,h) - 1{h = 0} - 1{h = g}.
pub fn lstar_counts(rec: &OccupationRecord, g: &Site) -> Result<SiteMap<u64>> {
    if rec.endpoint != *g {
        return Err(Error::EndpointMismatch { expected: g.0.to_vec(), found: rec.endpoint.0.to_vec() });
    }
    let mut out = SiteMap::default();
    for (h, &l) in &rec.counts {
        let m = 2 * l - h.is_origin() as u64 - (h == g) as u64;
        out.insert(*h, m);
    }
    Ok(out)
}

/// Π_h ν^(m_h)(e_K), or exp(-Σ_h F_K(l(n,h))) when `exact_lstar` is off.
pub fn lamp_weight(rec: &OccupationRecord, g: &Site, profile: &ReturnProfile, exact_lstar: bool) -> Result<f64> {
    if exact_lstar {
        let counts = lstar_counts(rec, g)?;
        let mut log_w = Neumaier::new();
        for (_, m) in counts {
            log_w.add(profile.power(m).ln());
        }
        Ok(log_w.value().exp())
    } else {
        let mut log_w = Neumaier::new();
        for &l in rec.counts.values() {
            log_w.add(-profile.f(l));
        }
        Ok(log_w.value().exp())
    }
}

/// Monte Carlo estimate of q^(n)((e, g)) through the occupation identity.
#[allow(clippy::too_many_arguments)]
pub fn wreath_return_estimate(
    base: &StepLaw,
    profile: &ReturnProfile,
    n: u64,
    g: &Site,
    replicas: u64,
    seed: u64,
    exact_lstar: bool,
    exec: Execution,
) -> Result<EstimatorResult> {
    let values = wreath_replicas(base, profile, n, g, replicas, seed, exact_lstar, exec)?;
    Ok(EstimatorResult::from_values(&values, seed, None))
}

/// Per-replica values of the estimator, in replica order.
#[allow(clippy::too_many_arguments)]
pub fn wreath_replicas(
    base: &StepLaw,
    profile: &ReturnProfile,
    n: u64,
    g: &Site,
    replicas: u64,
    seed: u64,
    exact_lstar: bool,
    exec: Execution,
) -> Result<Vec<f64>> {
    if replicas < 2 {
        return Err(invalid("at least two replicas are needed"));
    }
    let out = exec.map(replicas as usize, |i| {
        let mut rng = replica_stream(seed, i as u64);
        let rec = simulate(base, n, &mut rng);
        if rec.endpoint != *g {
            return Ok(0.0);
        }
        lamp_weight(&rec, g, profile, exact_lstar)
    });
    out.into_iter().collect()
}

/// Largest path length for [`wreath_exact_enum`].
pub const WREATH_ENUM_MAX: u64 = 14;

/// Exact q^(n)((e, g)) for every endpoint g, by evolving the law of
/// (position, lamp configuration) under switch, move, switch.
pub fn wreath_exact_enum(base: &StepLaw, model: &LampGroupModel, n: u64) -> Result<HashMap<i64, f64>> {
    let (mult, nu) = match model {
        LampGroupModel::FiniteTable { mult, nu } => (mult, nu),
        _ => return Err(Error::Unsupported("exact wreath enumeration needs a finite lamp group".into())),
    };
    model.validate()?;
    if base.dim() != 1 {
        return Err(Error::Unsupported("exact wreath enumeration is implemented on Z".into()));
    }
    let atoms = base.finite_support().ok_or_else(|| Error::Unsupported("base law needs finite support".into()))?;
    if n > WREATH_ENUM_MAX {
        return Err(Error::CapExceeded(format!("wreath enumeration limited to n ≤ {WREATH_ENUM_MAX}")));
    }
    let reach = atoms.iter().map(|(s, _)| s.0[0].unsigned_abs()).max().unwrap_or(0) as i64;
    let off = reach * n as i64;
    let width = (2 * off + 1) as usize;
    let moves: Vec<(usize, f64)> = nu.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(a, p)| (a, *p)).collect();
    type State = (i64, Vec<u8>);
    let mut cur: HashMap<State, f64> = HashMap::new();
    cur.insert((0, vec![0u8; width]), 1.0);
    for _ in 0..n {
        let mut next: HashMap<State, f64> = HashMap::new();
        for ((x, lamps), p) in cur {
            let ix = (x + off) as usize;
            for &(a, pa) in &moves {
                let mut l1 = lamps.clone();
                l1[ix] = mult[l1[ix] as usize][a] as u8;
                for (s, ps) in &atoms {
                    let y = x + s.0[0];
                    let iy = (y + off) as usize;
                    for &(b, pb) in &moves {
                        let mut l2 = l1.clone();
                        l2[iy] = mult[l2[iy] as usize][b] as u8;
                        *next.entry((y, l2)).or_insert(0.0) += p * pa * ps * pb;
                    }
                }
            }
        }
        cur = next;
        if cur.len() > 20_000_000 {
            return Err(Error::CapExceeded("wreath enumeration state space".into()));
        }
    }
    let mut out: HashMap<i64, f64> = HashMap::new();
    for ((x, lamps), p) in cur {
        if lamps.iter().all(|&v| v == 0) {
            *out.entry(x).or_insert(0.0) += p;
        }
    }
    Ok(out)
}

/// Exact q^(n)(e) on Z_2≀Z with uniform lamps and a symmetric base law on
/// {-1, 0, 1}. With n ≥ 1 every visited site carries at least one lamp
/// move, so q^(n)(e) = E[2^{-D_n} 1{X_n = 0}]; the joint law of range and
/// return comes from the spectral decomposition of the walk killed
/// outside an interval.
pub fn wreath_exact_z2z(base: &StepLaw, n: u64) -> Result<f64> {
    let (l, h, r) = base
        .nearest_neighbor_weights()
        .ok_or_else(|| Error::Unsupported("Z_2≀Z formula needs a base law on {-1, 0, 1}".into()))?;
    if (l - r).abs() > 1e-15 {
        return Err(invalid("base law must be symmetric"));
    }
    if n == 0 {
        return Ok(1.0);
    }
    if h == 0.0 && n % 2 == 1 {
        return Ok(0.0);
    }
    if n > crate::occupation::RANGE_DP_MAX {
        return Err(Error::CapExceeded(format!("n ≤ {}", crate::occupation::RANGE_DP_MAX)));
    }
    let p = l;
    // g[w][a] = P(X stays in [-a, w-a] up to time n, X_n = 0)
    let killed = |w: usize| -> Vec<f64> {
        let m = w + 2;
        let lam: Vec<f64> = (1..=w + 1)
            .map(|k| (h + 2.0 * p * (k as f64 * std::f64::consts::PI / m as f64).cos()).powi(n as i32))
            .collect();
        (0..=w)
            .map(|a| {
                let mut acc = Neumaier::new();
                for (k, lk) in lam.iter().enumerate() {
                    let s = ((a + 1) as f64 * (k + 1) as f64 * std::f64::consts::PI / m as f64).sin();
                    acc.add(lk * s * s);
                }
                2.0 / m as f64 * acc.value()
            })
            .collect()
    };
    let get = |rows: &[Vec<f64>], w: isize, a: isize| -> f64 {
        if w < 0 || a < 0 || a > w {
            0.0
        } else {
            rows[w as usize][a as usize]
        }
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut total = Neumaier::new();
    let mut w = 0usize;
    loop {
        rows.push(killed(w));
        let wi = w as isize;
        let mut exact_w = Neumaier::new();
        for a in 0..=wi {
            // range exactly [-a, w - a]
            let v = get(&rows, wi, a) - get(&rows, wi - 1, a - 1) - get(&rows, wi - 1, a) + get(&rows, wi - 2, a - 1);
            exact_w.add(v.max(0.0));
        }
        total.add(exact_w.value() * 0.5f64.powi(w as i32 + 1));
        // widths beyond w contribute at most 2^{-(w+2)} in total
        let rest = 0.5f64.powi(w as i32 + 1);
        if w as u64 >= n || rest < 1e-16 * total.value() {
            break;
        }
        w += 1;
    }
    Ok(total.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn srw() -> StepLaw {
        StepLaw::new(LawSpec::simple_random_walk()).unwrap()
    }

    fn lazy() -> StepLaw {
        StepLaw::new(LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.5 }).unwrap()
    }

    #[test]
    fn lamp_returns() {
        let z2 = LampGroupModel::uniform_z2();
        assert_eq!(z2.lamp_return(0).unwrap(), 1.0);
        for m in 1..5 {
            assert!((z2.lamp_return(m).unwrap() - 0.5).abs() < 1e-15);
        }
        let z = LampGroupModel::LatticeZd { law: LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.5 } };
        assert!((z.lamp_return(1).unwrap() - 0.375).abs() < 1e-14);
        let prof = z.profile(40).unwrap();
        assert!((prof.f(1) + 0.375f64.ln()).abs() < 1e-12);
        prof.check_monotone().unwrap();
    }

    #[test]
    fn lstar_examples() {
        let hold = OccupationRecord::from_path(&[Site::ORIGIN; 3]).unwrap();
        let c = lstar_counts(&hold, &Site::ORIGIN).unwrap();
        assert_eq!(c[&Site::ORIGIN], 4);
        let step = OccupationRecord::from_path(&[Site::ORIGIN, Site::axis(0, 1)]).unwrap();
        let c = lstar_counts(&step, &Site::axis(0, 1)).unwrap();
        // one switch before the move at 0, one after it at 1
        assert_eq!(c[&Site::ORIGIN], 1);
        assert_eq!(c[&Site::axis(0, 1)], 1);
        assert!(lstar_counts(&step, &Site::ORIGIN).is_err());
    }

    #[test]
    fn enumeration_agrees_with_occupation_identity() {
        // exact l* identity, summed over all base paths
        let z3 = LampGroupModel::cyclic(vec![0.5, 0.25, 0.25]);
        let prof = z3.profile(16).unwrap();
        for n in 1..=5u64 {
            let enumd = wreath_exact_enum(&lazy(), &z3, n).unwrap();
            let atoms = lazy().finite_support().unwrap();
            let mut sums: HashMap<i64, f64> = HashMap::new();
            let mut stack = vec![(vec![Site::ORIGIN], 1.0)];
            while let Some((path, p)) = stack.pop() {
                if path.len() as u64 == n + 1 {
                    let rec = OccupationRecord::from_path(&path).unwrap();
                    let g = rec.endpoint;
                    *sums.entry(g.0[0]).or_insert(0.0) += p * lamp_weight(&rec, &g, &prof, true).unwrap();
                    continue;
                }
                for (s, m) in &atoms {
                    let mut q = path.clone();
                    q.push(path.last().unwrap().add(*s));
                    stack.push((q, p * m));
                }
            }
            for (g, v) in &sums {
                let e = enumd.get(g).copied().unwrap_or(0.0);
                assert!((e - v).abs() < 1e-14, "n={n} g={g}: {e} {v}");
            }
        }
    }

    #[test]
    fn z2z_formula_matches_enumeration() {
        let z2 = LampGroupModel::uniform_z2();
        for law in [srw(), lazy()] {
            for n in 1..=8u64 {
                let e = wreath_exact_enum(&law, &z2, n).unwrap().get(&0).copied().unwrap_or(0.0);
                let f = wreath_exact_z2z(&law, n).unwrap();
                assert!((e - f).abs() < 1e-12, "n={n}: {e} {f}");
            }
        }
        assert_eq!(wreath_exact_z2z(&srw(), 7).unwrap(), 0.0);
        assert_eq!(wreath_exact_z2z(&srw(), 0).unwrap(), 1.0);
    }

    #[test]
    fn no_return_after_one_step_without_holding() {
        let z2 = LampGroupModel::uniform_z2();
        let e = wreath_exact_enum(&srw(), &z2, 1).unwrap();
        assert_eq!(e.get(&0).copied().unwrap_or(0.0), 0.0);
        let prof = z2.profile(4).unwrap();
        let est = wreath_return_estimate(&srw(), &prof, 1, &Site::ORIGIN, 64, 1, true, Execution::Parallel).unwrap();
        assert_eq!(est.mean, 0.0);
    }

    #[test]
    fn parametric_profile_is_monotone() {
        let m = LampGroupModel::lamplighter_over_z(1.0, 0.5);
        let p = m.profile(200).unwrap();
        p.check_monotone().unwrap();
        assert!((m.lamp_power(1).unwrap() - 0.5).abs() < 1e-15);
    }
}
