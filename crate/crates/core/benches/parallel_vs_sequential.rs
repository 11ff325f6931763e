use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stablewalk::occupation::{self, ProfileF};
use stablewalk::par::Execution;
use stablewalk::stablelaw::LimitLaw;
use stablewalk::steplaw::{LawSpec, StepLaw};
use stablewalk::varconst::{self, Domain};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn monte_carlo_laplace(c: &mut Criterion) {
    let law = StepLaw::new(LawSpec::Radial { dim: 1, alpha: 1.0 }).unwrap();
    let f = ProfileF::Power { nu: 0.5, gamma: 0.5 };
    let mut g = c.benchmark_group("laplace_mc_n500_r2000");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| occupation::estimate_laplace(&law, black_box(500), &f, 2000, 7, None, exec).unwrap())
        });
    }
    g.finish();
}

fn range_dp(c: &mut Criterion) {
    let law = StepLaw::new(LawSpec::simple_random_walk()).unwrap();
    let mut g = c.benchmark_group("range_dp_n2000");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| occupation::range_laplace(&law, black_box(2000), 1.0, exec).unwrap())
        });
    }
    g.finish();
}

fn eigenvalue(c: &mut Criterion) {
    let ll = LimitLaw::symmetric_stable(1.0, 1.0).unwrap();
    let dom = Domain::Interval { lo: 0.0, hi: 1.0 };
    let mut g = c.benchmark_group("eigen_cauchy_basis64");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| varconst::eigen_rayleigh(&ll, &dom, black_box(64), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, monte_carlo_laplace, range_dp, eigenvalue);
criterion_main!(benches);
