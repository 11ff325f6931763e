use proptest::prelude::*;
use stablewalk::lattice::Site;
use stablewalk::occupation::{simulate, OccupationRecord};
use stablewalk::par::Execution;
use stablewalk::rng::replica_stream;
use stablewalk::steplaw::{LawSpec, StepLaw};
use stablewalk::wreath::{self, LampGroupModel};

fn returning_path(law: &StepLaw, n: u64, seed: u64) -> OccupationRecord {
    (0..)
        .map(|i| simulate(law, n, &mut replica_stream(seed, i)))
        .find(|r| r.endpoint == Site::ORIGIN)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn surrogate_and_exact_weights_are_within_eps_cubed(p in 0.05..0.5f64, seed: u64) {
        let law = StepLaw::new(LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.3 }).unwrap();
        let model = LampGroupModel::cyclic(vec![1.0 - 2.0 * p, p, p]);
        let eps = model.epsilon().unwrap();
        let prof = model.profile(128).unwrap();
        let rec = returning_path(&law, 40, seed);
        let exact = wreath::lamp_weight(&rec, &Site::ORIGIN, &prof, true).unwrap();
        let surrogate = wreath::lamp_weight(&rec, &Site::ORIGIN, &prof, false).unwrap();
        let r = exact / surrogate;
        prop_assert!(r >= eps.powi(3) * (1.0 - 1e-12) && r <= eps.powi(-3) * (1.0 + 1e-12), "ratio {}", r);
    }

    #[test]
    fn parametric_lamp_profile_is_nondecreasing(c in 0.1..3.0f64, g in 0.0..1.0f64, beta in 0.0..2.0f64, eps in 0.01..0.9f64) {
        let model = LampGroupModel::Parametric { c, gamma: g, log_power: beta, epsilon: eps };
        let prof = model.profile(1000).unwrap();
        prop_assert!(prof.check_monotone().is_ok());
        prop_assert_eq!(prof.f(0), 0.0);
    }
}

#[test]
fn return_to_identity_dominates_other_endpoints() {
    let law = StepLaw::new(LawSpec::simple_random_walk()).unwrap();
    let prof = LampGroupModel::uniform_z2().profile(64).unwrap();
    let n = 12;
    let e = wreath::wreath_return_estimate(&law, &prof, n, &Site::ORIGIN, 200_000, 11, true, Execution::Parallel).unwrap();
    for g in [2i64, -2, 4] {
        let other = wreath::wreath_return_estimate(&law, &prof, n, &Site::from_slice(&[g]), 200_000, 11, true, Execution::Parallel)
            .unwrap();
        assert!(other.mean <= e.mean + 3.0 * (e.stderr + other.stderr), "g = {g}");
    }
    let exact = wreath::wreath_exact_enum(&law, &LampGroupModel::uniform_z2(), n).unwrap();
    let at_e = exact[&0];
    assert!(exact.values().all(|v| *v <= at_e + 1e-15));
}

#[test]
fn spectral_and_enumerated_lamplighter_returns_agree() {
    for hold in [0.0, 0.25, 0.6] {
        let law = StepLaw::new(LawSpec::LazyNearestNeighbor { dim: 1, hold }).unwrap();
        for n in 0..=12u64 {
            let a = wreath::wreath_exact_enum(&law, &LampGroupModel::uniform_z2(), n).unwrap().get(&0).copied().unwrap_or(0.0);
            let b = wreath::wreath_exact_z2z(&law, n).unwrap();
            assert!((a - b).abs() < 1e-13, "hold {hold}, n {n}: {a} vs {b}");
        }
    }
}
