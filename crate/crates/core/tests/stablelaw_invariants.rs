use std::f64::consts::PI;

use nalgebra::DVector;
use proptest::prelude::*;
use stablewalk::dilation::{ExponentStructure, NormalizationSequence};
use stablewalk::lattice::Site;
use stablewalk::stablelaw::{self, FrequencyGrid, LimitLaw};
use stablewalk::steplaw::{LawSpec, StepLaw};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_is_even_and_operator_homogeneous(
        a1 in 0.4..2.0f64, a2 in 0.4..2.0f64, k1 in 0.1..3.0f64, k2 in 0.1..3.0f64,
        x in -5.0..5.0f64, y in -5.0..5.0f64, t in 0.1..10.0f64,
    ) {
        let ll = LimitLaw::axis_separable(&[(a1, k1), (a2, k2)]).unwrap();
        let v = ll.symbol(&[x, y]);
        prop_assert!(v >= 0.0);
        prop_assert!((ll.symbol(&[-x, -y]) - v).abs() <= 1e-14 * v.max(1e-300));
        let txi = ll.exponent().power_transpose(t) * DVector::from_column_slice(&[x, y]);
        let w = ll.symbol(txi.as_slice());
        prop_assert!((w - t * v).abs() <= 1e-11 * (t * v).max(1e-300));
    }

    #[test]
    fn one_dimensional_density_is_symmetric(alpha in 0.8..2.0f64, x in 0.0..4.0f64) {
        let g = LimitLaw::symmetric_stable(alpha, 1.0).unwrap().density_grid(1.0, 4.0).unwrap();
        prop_assert!((g.eval(&[x]) - g.eval(&[-x])).abs() < 1e-12);
    }
}

#[test]
fn densities_integrate_to_one() {
    // mass of [-40, 40] against the exact window mass
    let rule = gauss_panels(-40.0, 40.0, 4000);
    let cauchy = LimitLaw::symmetric_stable(1.0, 1.0).unwrap().density_grid(1.0, 40.0).unwrap();
    let gauss = LimitLaw::symmetric_stable(2.0, 0.5).unwrap().density_grid(1.0, 40.0).unwrap();
    let mc: f64 = rule.iter().map(|(x, w)| w * cauchy.eval(&[*x])).sum();
    let mg: f64 = rule.iter().map(|(x, w)| w * gauss.eval(&[*x])).sum();
    assert!((mc - 2.0 / PI * 40f64.atan()).abs() < 1e-6, "{mc}");
    assert!((mg - 1.0).abs() < 1e-6, "{mg}");
}

fn gauss_panels(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    // 3-point Gauss rule per panel
    let nodes = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
    let weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let h = (b - a) / panels as f64;
    let mut out = Vec::new();
    for p in 0..panels {
        let c = a + h * (p as f64 + 0.5);
        for (x, w) in nodes.iter().zip(weights) {
            out.push((c + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

#[test]
fn convolution_power_conserves_mass_and_symmetry() {
    for spec in [
        LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.2 },
        LawSpec::Radial { dim: 1, alpha: 1.3 },
        LawSpec::AxisProduct { alphas: vec![1.0, 1.7] },
    ] {
        let law = StepLaw::new(spec).unwrap();
        let side = if law.dim() == 1 { 1024 } else { 128 };
        let t = stablelaw::convolution_power(&law, 7, side).unwrap();
        let total: f64 = t.values.iter().sum();
        assert!((total - t.mass).abs() < 1e-9, "{total} vs {}", t.mass);
        for x in t.sites() {
            assert_eq!(t.get(&x), t.get(&x.neg()));
        }
    }
}

#[test]
fn two_step_convolution_matches_direct_sum() {
    // (1+|k|)^{-2} truncated to |k| ≤ 40 and renormalized
    let raw: Vec<(i64, f64)> = (-40..=40i64).map(|k| (k, (1.0 + k.abs() as f64).powi(-2))).collect();
    let z: f64 = raw.iter().map(|a| a.1).sum();
    let atoms: Vec<(Vec<i64>, f64)> = raw.iter().map(|&(k, m)| (vec![k], m / z)).collect();
    let law = StepLaw::new(LawSpec::Table { dim: 1, atoms }).unwrap();
    let t = stablelaw::convolution_power(&law, 2, 256).unwrap();
    assert!(!t.wrapped);
    for x in -80..=80i64 {
        let direct: f64 = (-40..=40).map(|y| law.pmf(&Site::from_slice(&[y])) * law.pmf(&Site::from_slice(&[x - y]))).sum();
        let got = t.get(&Site::from_slice(&[x]));
        assert!((got - direct).abs() < 1e-15, "{x}: {got} vs {direct}");
    }
}

#[test]
fn local_limit_error_shrinks_for_the_cauchy_walk() {
    let law = StepLaw::new(LawSpec::Radial { dim: 1, alpha: 1.0 }).unwrap();
    let ll = LimitLaw::attractor_of(&law).unwrap();
    let ns = NormalizationSequence::floor(ExponentStructure::diagonal(&[1.0]).unwrap());
    let first = stablelaw::llt_error(&law, &ll, &ns, 32).unwrap().sup_error;
    let last = stablelaw::llt_error(&law, &ll, &ns, 256).unwrap().sup_error;
    assert!(last < first, "{first} → {last}");
}

#[test]
fn dirichlet_form_scales_under_dilation() {
    // f_λ(x) = f(λ^{-E}x) has E(f_λ) = λ^{τ-1} E(f); here f̂(ξ) = e^{-ξ²}
    let alpha = 1.5;
    let ll = LimitLaw::symmetric_stable(alpha, 1.0).unwrap();
    let grid = FrequencyGrid::line(12.0, 600, 8);
    let e = 1.0 / alpha;
    let lam: f64 = 2.0;
    let base: Vec<f64> = grid.nodes.iter().map(|x| (-2.0 * x[0] * x[0]).exp()).collect();
    let scaled: Vec<f64> = grid
        .nodes
        .iter()
        .map(|x| {
            let s = lam.powf(e) * x[0];
            lam.powf(2.0 * e) * (-2.0 * s * s).exp()
        })
        .collect();
    let e0 = ll.dirichlet_form(&grid, &base);
    let e1 = ll.dirichlet_form(&grid, &scaled);
    assert!((e1 / e0 - lam.powf(e - 1.0)).abs() < 1e-7, "{}", e1 / e0);
    let zero = vec![0.0; grid.weights.len()];
    assert_eq!(ll.dirichlet_form(&grid, &zero), 0.0);
}
