//! Occupation times l(n,x) of simulated walks, Laplace functionals
//! E[exp(-Σ_x F(l(n,x)))] and two exact oracles: path enumeration and a
//! range dynamic program for nearest-neighbour walks on Z.

use std::collections::{BTreeMap, HashMap};
use std::hash::BuildHasherDefault;
use std::collections::hash_map::DefaultHasher;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dilation::NormalizationSequence;
use crate::error::{invalid, Error, Result};
use crate::lattice::Site;
use crate::numerics::Neumaier;
use crate::par::Execution;
use crate::rng::replica_stream;
use crate::steplaw::StepLaw;

/// Fixed-key hasher so that iteration order depends only on insertion order.
pub type SiteMap<V> = HashMap<Site, V, BuildHasherDefault<DefaultHasher>>;

/// Concavity and monotonicity of a profile are validated up to this count.
pub const PROFILE_CHECK_RANGE: u64 = 10_000;

/// Profile F applied to visit counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileF {
    /// ν·1{s > 0}; Σ_x F(l) = ν D_n.
    Indicator { nu: f64 },
    /// ν s^γ.
    Power { nu: f64, gamma: f64 },
    /// s^γ (log(e + s))^β.
    PowerLog { gamma: f64, beta: f64 },
    /// θ s.
    Linear { theta: f64 },
    /// λ log(1 + s).
    Log { lambda: f64 },
    /// F(m) = values[m] for m < values.len(), continued as a power with
    /// exponent `tail_gamma` from the last entry.
    Table { values: Vec<f64>, tail_gamma: f64 },
}

impl ProfileF {
    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            ProfileF::Indicator { nu } => *nu,
            ProfileF::Power { nu, gamma } => nu * s.powf(*gamma),
            ProfileF::PowerLog { gamma, beta } => s.powf(*gamma) * (std::f64::consts::E + s).ln().powf(*beta),
            ProfileF::Linear { theta } => theta * s,
            ProfileF::Log { lambda } => lambda * s.ln_1p(),
            ProfileF::Table { values, tail_gamma } => {
                let last = values.len() - 1;
                if s <= last as f64 && s.fract() == 0.0 {
                    values[s as usize]
                } else if s < last as f64 {
                    let i = s.floor() as usize;
                    values[i] + (s - i as f64) * (values[i + 1] - values[i])
                } else {
                    values[last] * (s / last as f64).powf(*tail_gamma)
                }
            }
        }
    }

    pub fn at(&self, m: u64) -> f64 {
        self.eval(m as f64)
    }

    /// Homogeneity exponent γ of the limit profile F̃.
    pub fn gamma(&self) -> f64 {
        match self {
            ProfileF::Indicator { .. } | ProfileF::Log { .. } => 0.0,
            ProfileF::Power { gamma, .. } | ProfileF::PowerLog { gamma, .. } => *gamma,
            ProfileF::Linear { .. } => 1.0,
            ProfileF::Table { tail_gamma, .. } => *tail_gamma,
        }
    }

    /// F(0) = 0, nondecreasing, concave and subadditive on the integers
    /// up to [`PROFILE_CHECK_RANGE`].
    pub fn validate(&self) -> Result<()> {
        match self {
            ProfileF::Indicator { nu } if !(*nu >= 0.0) => return Err(invalid("indicator weight must be nonnegative")),
            ProfileF::Power { nu, gamma } if !(*nu >= 0.0 && *gamma >= 0.0 && *gamma <= 1.0) => {
                return Err(invalid("power profile needs ν ≥ 0 and γ in [0, 1]"))
            }
            ProfileF::PowerLog { gamma, .. } if !(*gamma > 0.0 && *gamma < 1.0) => {
                return Err(invalid("power-log profile needs γ in (0, 1)"))
            }
            ProfileF::Linear { theta } if !(*theta >= 0.0) => return Err(invalid("linear profile needs θ ≥ 0")),
            ProfileF::Log { lambda } if !(*lambda >= 0.0) => return Err(invalid("log profile needs λ ≥ 0")),
            ProfileF::Table { values, tail_gamma } => {
                if values.len() < 2 || values[0] != 0.0 {
                    return Err(invalid("table profile needs F(0) = 0 and at least one more value"));
                }
                if !(*tail_gamma >= 0.0 && *tail_gamma <= 1.0) {
                    return Err(invalid("table tail exponent must lie in [0, 1]"));
                }
            }
            _ => {}
        }
        let tol = 1e-12;
        let mut prev = self.at(0);
        if prev != 0.0 {
            return Err(invalid("profile must vanish at 0"));
        }
        let mut prev_inc = f64::INFINITY;
        for m in 1..=PROFILE_CHECK_RANGE {
            let v = self.at(m);
            let inc = v - prev;
            if inc < -tol * v.abs().max(1.0) {
                return Err(invalid(format!("profile decreases at {m}")));
            }
            if inc > prev_inc + tol * v.abs().max(1.0) {
                return Err(invalid(format!("profile is not concave at {m}")));
            }
            prev = v;
            prev_inc = inc;
        }
        // concave with F(0) = 0 already implies subadditivity; spot check
        for a in [1u64, 2, 3, 7, 50, 999] {
            for b in [1u64, 5, 64, 4000] {
                if self.at(a + b) > self.at(a) + self.at(b) + tol * self.at(a + b).max(1.0) {
                    return Err(invalid("profile is not subadditive"));
                }
            }
        }
        Ok(())
    }
}

/// Visit counts of a path of length n started at the origin.
#[derive(Clone, Debug)]
pub struct OccupationRecord {
    pub n: u64,
    pub counts: SiteMap<u64>,
    pub endpoint: Site,
}

impl OccupationRecord {
    pub fn from_path(path: &[Site]) -> Result<Self> {
        if path.first() != Some(&Site::ORIGIN) {
            return Err(invalid("paths start at the origin"));
        }
        let mut counts = SiteMap::default();
        for s in path {
            *counts.entry(*s).or_insert(0) += 1;
        }
        Ok(Self { n: path.len() as u64 - 1, counts, endpoint: *path.last().unwrap() })
    }

    /// l(n, x).
    pub fn count(&self, x: &Site) -> u64 {
        self.counts.get(x).copied().unwrap_or(0)
    }

    /// Number of distinct visited sites D_n.
    pub fn range(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// One path of length n from the origin.
pub fn simulate<R: Rng + ?Sized>(law: &StepLaw, n: u64, rng: &mut R) -> OccupationRecord {
    let mut counts = SiteMap::default();
    let mut x = Site::ORIGIN;
    counts.insert(x, 1);
    for _ in 0..n {
        x = x.add(law.sample(rng));
        *counts.entry(x).or_insert(0) += 1;
    }
    OccupationRecord { n, counts, endpoint: x }
}

/// Σ_x F(l(n,x)).
pub fn functional(rec: &OccupationRecord, f: &ProfileF) -> f64 {
    match f {
        ProfileF::Indicator { nu } => nu * rec.range() as f64,
        ProfileF::Linear { theta } => theta * (rec.n + 1) as f64,
        _ => {
            // group equal counts so F is evaluated once per distinct value
            let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
            for &c in rec.counts.values() {
                *hist.entry(c).or_insert(0) += 1;
            }
            let mut acc = Neumaier::new();
            for (c, k) in hist {
                acc.add(k as f64 * f.at(c));
            }
            acc.value()
        }
    }
}

/// Endpoint restriction 1{‖B_{a_n}⁻¹ X_n‖ ≤ R}.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub radius: f64,
    pub normalization: NormalizationSequence,
    pub a_n: u64,
}

impl Restriction {
    fn accepts(&self, x: &Site, d: usize) -> Result<bool> {
        let b = self.normalization.build(self.a_n)?;
        let y = b.apply_inverse(&x.to_f64(d));
        Ok(y.iter().map(|v| v * v).sum::<f64>().sqrt() <= self.radius)
    }
}

/// One replica of a Laplace estimate.
#[derive(Clone, Debug, Serialize)]
pub struct ReplicaSummary {
    pub replica: u64,
    pub functional: f64,
    pub endpoint: Site,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub stderr: f64,
    pub replicas: u64,
    pub master_seed: u64,
    pub restricted_domain: Option<f64>,
}

impl EstimatorResult {
    /// Mean and standard error of per-replica values, summed in index order.
    pub fn from_values(values: &[f64], master_seed: u64, restricted_domain: Option<f64>) -> Self {
        let r = values.len() as f64;
        let mut s = Neumaier::new();
        for v in values {
            s.add(*v);
        }
        let mean = s.value() / r;
        let mut q = Neumaier::new();
        for v in values {
            q.add((v - mean) * (v - mean));
        }
        let var = if values.len() > 1 { q.value() / (r - 1.0) } else { 0.0 };
        Self { mean, stderr: (var / r).sqrt(), replicas: values.len() as u64, master_seed, restricted_domain }
    }
}

/// Per-replica values of exp(-Σ F(l(n,x))), optionally times the endpoint
/// restriction. Replica i always draws from stream (seed, i).
pub fn laplace_replicas(
    law: &StepLaw,
    n: u64,
    f: &ProfileF,
    replicas: u64,
    seed: u64,
    restrict: Option<&Restriction>,
    exec: Execution,
) -> Result<Vec<ReplicaSummary>> {
    if let Some(r) = restrict {
        // fail early on a degenerate normalization
        r.normalization.build(r.a_n)?;
    }
    let d = law.dim();
    let out = exec.map(replicas as usize, |i| {
        let mut rng = replica_stream(seed, i as u64);
        let rec = simulate(law, n, &mut rng);
        let phi = functional(&rec, f);
        let inside = restrict.map(|r| r.accepts(&rec.endpoint, d).unwrap_or(false)).unwrap_or(true);
        ReplicaSummary {
            replica: i as u64,
            functional: phi,
            endpoint: rec.endpoint,
            weight: if inside { (-phi).exp() } else { 0.0 },
        }
    });
    Ok(out)
}

/// Monte Carlo estimate of E[exp(-Σ_x F(l(n,x)))], optionally restricted.
pub fn estimate_laplace(
    law: &StepLaw,
    n: u64,
    f: &ProfileF,
    replicas: u64,
    seed: u64,
    restrict: Option<&Restriction>,
    exec: Execution,
) -> Result<EstimatorResult> {
    if replicas < 2 {
        return Err(invalid("at least two replicas are needed"));
    }
    let rows = laplace_replicas(law, n, f, replicas, seed, restrict, exec)?;
    let values: Vec<f64> = rows.iter().map(|r| r.weight).collect();
    Ok(EstimatorResult::from_values(&values, seed, restrict.map(|r| r.radius)))
}

/// Largest number of paths [`enumerate_paths`] will visit.
pub const ENUMERATION_CAP: f64 = 1e8;

/// Exact results of a path enumeration.
#[derive(Clone, Debug, Serialize)]
pub struct PathEnumeration {
    pub n: u64,
    /// E[exp(-Σ F(l))].
    pub value: f64,
    /// E[exp(-Σ F(l)) 1{X_n = g}].
    pub by_endpoint: BTreeMap<Site, f64>,
    /// P(D_n = k) indexed by k.
    pub range_law: Vec<f64>,
}

/// Sums over every path of a finitely supported law.
pub fn enumerate_paths(law: &StepLaw, n: u64, f: &ProfileF) -> Result<PathEnumeration> {
    let atoms: Vec<(Site, f64)> =
        law.finite_support().ok_or_else(|| Error::Unsupported("path enumeration needs finite support".into()))?;
    let count = (atoms.len() as f64).powf(n as f64);
    if count > ENUMERATION_CAP {
        return Err(Error::CapExceeded(format!("{} paths of length {n}", atoms.len())));
    }
    let d = law.dim();
    let reach = atoms.iter().flat_map(|(s, _)| s.0[..d].iter().map(|v| v.unsigned_abs())).max().unwrap_or(0);
    let side = (2 * reach * n + 1) as usize;
    let offset = (reach * n) as i64;
    let index = |x: &Site| -> usize {
        let mut i = 0usize;
        for k in (0..d).rev() {
            i = i * side + (x.0[k] + offset) as usize;
        }
        i
    };
    let mut counts = vec![0u32; side.pow(d as u32)];
    let mut state = Enum {
        atoms: &atoms,
        f,
        n,
        counts: &mut counts,
        index: &index,
        value: Neumaier::new(),
        by_endpoint: BTreeMap::new(),
        range_law: vec![Neumaier::new(); n as usize + 2],
    };
    let x0 = Site::ORIGIN;
    state.counts[index(&x0)] = 1;
    state.walk(0, x0, 1.0, f.at(1), 1);
    let by_endpoint = state.by_endpoint.into_iter().map(|(k, v)| (k, v.value())).collect();
    Ok(PathEnumeration {
        n,
        value: state.value.value(),
        by_endpoint,
        range_law: state.range_law.iter().map(|v| v.value()).collect(),
    })
}

struct Enum<'a, I: Fn(&Site) -> usize> {
    atoms: &'a [(Site, f64)],
    f: &'a ProfileF,
    n: u64,
    counts: &'a mut Vec<u32>,
    index: &'a I,
    value: Neumaier,
    by_endpoint: BTreeMap<Site, Neumaier>,
    range_law: Vec<Neumaier>,
}

impl<I: Fn(&Site) -> usize> Enum<'_, I> {
    fn walk(&mut self, depth: u64, x: Site, p: f64, phi: f64, range: usize) {
        if depth == self.n {
            let w = p * (-phi).exp();
            self.value.add(w);
            self.by_endpoint.entry(x).or_default().add(w);
            self.range_law[range].add(p);
            return;
        }
        for &(s, m) in self.atoms {
            let y = x.add(s);
            let i = (self.index)(&y);
            let c = self.counts[i];
            let dphi = self.f.at(c as u64 + 1) - self.f.at(c as u64);
            self.counts[i] = c + 1;
            self.walk(depth + 1, y, p * m, phi + dphi, range + (c == 0) as usize);
            self.counts[i] = c;
        }
    }
}

/// Step weights (left, hold, right) of a walk on {-1, 0, 1}.
fn nearest_neighbor(law: &StepLaw) -> Result<(f64, f64, f64)> {
    law.nearest_neighbor_weights()
        .ok_or_else(|| Error::Unsupported("range dynamic program needs a law on {-1, 0, 1}".into()))
}

/// Largest path length accepted by the range dynamic programs.
pub const RANGE_DP_MAX: u64 = 5000;

/// Joint law of (range width w = D_n - 1, offset i of X_n from the left end
/// of the range) after n steps. `rows[w][i]`.
#[derive(Clone, Debug)]
pub struct RangeTable {
    pub n: u64,
    pub rows: Vec<Vec<f64>>,
    /// Weighted mass that left the width cap (zero when uncapped).
    pub discarded: f64,
}

impl RangeTable {
    /// P(D_n = k) indexed by k.
    pub fn range_law(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len() + 1];
        for (w, row) in self.rows.iter().enumerate() {
            out[w + 1] = crate::numerics::neumaier_sum(row.iter().copied());
        }
        out
    }

    pub fn total(&self) -> f64 {
        crate::numerics::neumaier_sum(self.rows.iter().flat_map(|r| r.iter().copied()))
    }
}

/// Dynamic program over (width, offset). Every visit to a new site
/// multiplies the weight by `new_site_factor`; 1 gives the plain law of
/// the range and e^{-ν} the Laplace functional of νD_n. Widths above
/// `width_cap` are dropped and their weight is accumulated in `discarded`.
pub fn range_dp(
    law: &StepLaw,
    n: u64,
    new_site_factor: f64,
    width_cap: Option<usize>,
    exec: Execution,
) -> Result<RangeTable> {
    let (l, h, r) = nearest_neighbor(law)?;
    if n > RANGE_DP_MAX {
        return Err(Error::CapExceeded(format!("range dynamic program limited to n ≤ {RANGE_DP_MAX}")));
    }
    let cap = width_cap.unwrap_or(n as usize).min(n as usize);
    let mut rows: Vec<Vec<f64>> = vec![vec![new_site_factor]];
    let mut discarded = Neumaier::new();
    for _ in 0..n {
        let wmax = rows.len() - 1;
        let grow = wmax < cap && (l > 0.0 || r > 0.0);
        let next_len = if grow { wmax + 2 } else { wmax + 1 };
        let prev = &rows;
        let next = exec.map(next_len, |w| {
            let mut row = vec![0.0; w + 1];
            if w <= wmax {
                let p = &prev[w];
                for i in 0..=w {
                    let mut v = h * p[i];
                    if i < w {
                        v += l * p[i + 1];
                    }
                    if i >= 1 {
                        v += r * p[i - 1];
                    }
                    row[i] = v;
                }
            }
            if w >= 1 && w - 1 <= wmax {
                // new site at either end of a range of width w - 1
                let p = &prev[w - 1];
                row[0] += new_site_factor * l * p[0];
                row[w] += new_site_factor * r * p[w - 1];
            }
            row
        });
        if !grow && wmax == cap && wmax < n as usize {
            let p = &rows[wmax];
            discarded.add(new_site_factor * (l * p[0] + r * p[wmax]));
        }
        rows = next;
    }
    Ok(RangeTable { n, rows, discarded: discarded.value() })
}

/// Exact E[exp(-ν D_n)] by the range dynamic program.
#[derive(Clone, Debug, Serialize)]
pub struct RangeLaplace {
    pub n: u64,
    pub nu: f64,
    pub value: f64,
    /// Upper bound on the contribution of widths beyond the cap.
    pub discarded_bound: f64,
    pub width_cap: usize,
}

/// E[exp(-ν D_n)] with the width cap doubled until the dropped weight is
/// below 1e-13 of the value.
pub fn range_laplace(law: &StepLaw, n: u64, nu: f64, exec: Execution) -> Result<RangeLaplace> {
    if !(nu > 0.0) {
        let t = range_dp(law, n, (-nu).exp(), None, exec)?;
        return Ok(RangeLaplace { n, nu, value: t.total(), discarded_bound: 0.0, width_cap: n as usize });
    }
    let mut cap = 64usize;
    loop {
        let t = range_dp(law, n, (-nu).exp(), Some(cap), exec)?;
        let value = t.total();
        if t.discarded <= 1e-13 * value || cap >= n as usize {
            return Ok(RangeLaplace { n, nu, value, discarded_bound: t.discarded, width_cap: cap.min(n as usize) });
        }
        cap *= 2;
    }
}

/// P(D_n = k, X_n = 0) indexed by k, by a dynamic program over (left
/// extent, right extent, position). Cost grows like n⁴; meant for small n.
pub fn range_endpoint_dp(law: &StepLaw, n: u64) -> Result<Vec<f64>> {
    let (l, h, r) = nearest_neighbor(law)?;
    if n > 200 {
        return Err(Error::CapExceeded("endpoint-resolved range dynamic program limited to n ≤ 200".into()));
    }
    let m = n as usize;
    // state[(a, b, x + a)] for range [-a, b]
    let mut cur: HashMap<(usize, usize, usize), f64> = HashMap::new();
    cur.insert((0, 0, 0), 1.0);
    for _ in 0..m {
        let mut nxt: HashMap<(usize, usize, usize), f64> = HashMap::new();
        for (&(a, b, p), &v) in &cur {
            if h > 0.0 {
                *nxt.entry((a, b, p)).or_insert(0.0) += h * v;
            }
            if l > 0.0 {
                let key = if p == 0 { (a + 1, b, 0) } else { (a, b, p - 1) };
                *nxt.entry(key).or_insert(0.0) += l * v;
            }
            if r > 0.0 {
                let key = if p == a + b { (a, b + 1, p + 1) } else { (a, b, p + 1) };
                *nxt.entry(key).or_insert(0.0) += r * v;
            }
        }
        cur = nxt;
    }
    let mut out = vec![Neumaier::new(); m + 2];
    for ((a, b, p), v) in cur {
        if p == a {
            out[a + b + 1].add(v);
        }
    }
    Ok(out.iter().map(|v| v.value()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steplaw::LawSpec;

    fn lazy() -> StepLaw {
        StepLaw::new(LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.5 }).unwrap()
    }

    fn srw() -> StepLaw {
        StepLaw::new(LawSpec::simple_random_walk()).unwrap()
    }

    #[test]
    fn empty_path_and_hold_only_law() {
        let mut rng = replica_stream(1, 0);
        let rec = simulate(&lazy(), 0, &mut rng);
        assert_eq!(rec.range(), 1);
        assert_eq!(rec.count(&Site::ORIGIN), 1);
        let hold = StepLaw::new(LawSpec::LazyNearestNeighbor { dim: 1, hold: 1.0 }).unwrap();
        let rec = simulate(&hold, 50, &mut rng);
        assert_eq!(rec.count(&Site::ORIGIN), 51);
        assert_eq!(rec.range(), 1);
        assert_eq!(functional(&rec, &ProfileF::Indicator { nu: 0.7 }), 0.7);
    }

    #[test]
    fn functional_arithmetic() {
        let rec = OccupationRecord::from_path(&[Site::ORIGIN, Site::axis(0, 1), Site::ORIGIN, Site::axis(0, 1)]).unwrap();
        let v = functional(&rec, &ProfileF::Power { nu: 1.0, gamma: 0.5 });
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(functional(&rec, &ProfileF::Linear { theta: 0.25 }), 1.0);
    }

    #[test]
    fn profiles_validate() {
        for f in [
            ProfileF::Indicator { nu: 1.0 },
            ProfileF::Power { nu: 2.0, gamma: 0.5 },
            ProfileF::PowerLog { gamma: 0.5, beta: 1.0 },
            ProfileF::Linear { theta: 0.1 },
            ProfileF::Log { lambda: 1.0 },
            ProfileF::Table { values: vec![0.0, 1.0, 1.5, 1.9], tail_gamma: 0.5 },
        ] {
            f.validate().unwrap();
        }
        assert!(ProfileF::Power { nu: 1.0, gamma: 1.5 }.validate().is_err());
        assert!(ProfileF::Table { values: vec![0.0, 1.0, 3.0], tail_gamma: 0.5 }.validate().is_err());
    }

    #[test]
    fn linear_profile_estimate_is_exact() {
        let f = ProfileF::Linear { theta: 0.01 };
        let e = estimate_laplace(&lazy(), 40, &f, 16, 3, None, Execution::Parallel).unwrap();
        assert_eq!(e.stderr, 0.0);
        assert!((e.mean - (-0.41f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn one_step_enumeration() {
        let nu = 0.8;
        let e = enumerate_paths(&lazy(), 1, &ProfileF::Indicator { nu }).unwrap();
        let exact = 0.5 * (-nu).exp() + 0.5 * (-2.0 * nu).exp();
        assert!((e.value - exact).abs() < 1e-15);
        let e0 = enumerate_paths(&lazy(), 0, &ProfileF::Power { nu: 1.0, gamma: 0.5 }).unwrap();
        assert!((e0.value - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn range_dp_matches_enumeration() {
        for law in [lazy(), srw()] {
            for n in [1u64, 2, 5, 11] {
                let e = enumerate_paths(&law, n, &ProfileF::Indicator { nu: 0.0 }).unwrap();
                let t = range_dp(&law, n, 1.0, None, Execution::Sequential).unwrap();
                let dp = t.range_law();
                assert!((t.total() - 1.0).abs() < 1e-12);
                for k in 0..dp.len() {
                    assert!((dp[k] - e.range_law[k]).abs() < 1e-12, "n={n} k={k}");
                }
                let ep = range_endpoint_dp(&law, n).unwrap();
                let at0 = e.by_endpoint.get(&Site::ORIGIN).copied().unwrap_or(0.0);
                assert!((ep.iter().sum::<f64>() - at0).abs() < 1e-12);
            }
        }
        let t = range_dp(&srw(), 1, 1.0, None, Execution::Sequential).unwrap();
        assert_eq!(t.range_law()[2], 1.0);
    }

    #[test]
    fn capped_laplace_agrees_with_uncapped() {
        let law = srw();
        let full = range_dp(&law, 300, (-1.0f64).exp(), None, Execution::Sequential).unwrap().total();
        let capped = range_laplace(&law, 300, 1.0, Execution::Parallel).unwrap();
        assert!(capped.width_cap < 300);
        assert!((capped.value - full).abs() < 1e-12 * full);
    }

    #[test]
    fn restriction_with_huge_radius_is_neutral() {
        use crate::dilation::ExponentStructure;
        let f = ProfileF::Indicator { nu: 0.2 };
        let r = Restriction {
            radius: 1e12,
            normalization: NormalizationSequence::floor(ExponentStructure::diagonal(&[2.0]).unwrap()),
            a_n: 30,
        };
        let a = estimate_laplace(&lazy(), 30, &f, 200, 9, None, Execution::Parallel).unwrap();
        let b = estimate_laplace(&lazy(), 30, &f, 200, 9, Some(&r), Execution::Sequential).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.stderr, b.stderr);
    }
}
