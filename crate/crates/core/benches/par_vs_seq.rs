use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dqprep::autarky::find_e1_autarky_in;
use dqprep::ddmin::{ddmin_clauses, ShrinkOptions};
use dqprep::fuzz::{generate, sweep_phase_transition_with, RandomModelParams};
use dqprep::oracle::{enumerate_autarkies_with, solve_bruteforce, OracleBudget};
use dqprep::par::Exec;
use dqprep::DqbfFormula;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn params(na: u32, ne: u32, m: usize, seed: u64) -> RandomModelParams {
    RandomModelParams {
        n_universal: na,
        n_existential: ne,
        dep_prob: 0.5,
        n_clauses: m,
        clause_width: 3,
        seed,
        require_occurrence: true,
    }
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    let base = params(3, 3, 0, 1);
    let ratios = [0.5, 1.0, 2.0, 3.0];
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| sweep_phase_transition_with(&base, &ratios, 50, &OracleBudget::default(), exec))
        });
    }
    g.finish();
}

fn e1_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("e1_scan");
    for m in [1_000, 10_000] {
        let f = generate(&params(16, 48, m, 7)).unwrap();
        let order = f.occurring_existentials();
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, m), &f, |b, f| {
                b.iter(|| find_e1_autarky_in(black_box(f), &order, exec))
            });
        }
    }
    g.finish();
}

fn enumerate(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_autarkies");
    let f = generate(&RandomModelParams {
        dep_prob: 0.6,
        ..params(3, 3, 6, 11)
    })
    .unwrap();
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| enumerate_autarkies_with(black_box(&f), 3, &OracleBudget::default(), exec))
        });
    }
    g.finish();
}

fn ddmin(c: &mut Criterion) {
    let mut g = c.benchmark_group("ddmin_clauses");
    g.sample_size(10);
    let unsat = |f: &DqbfFormula| solve_bruteforce(f, &OracleBudget::default()).is_unsat();
    let f = (0..)
        .map(|s| generate(&params(3, 3, 24, s)).unwrap())
        .find(|f| unsat(f))
        .unwrap();
    for (name, exec) in MODES {
        let opts = ShrinkOptions { budget: None, exec };
        g.bench_function(name, |b| b.iter(|| ddmin_clauses(&f, &unsat, &opts).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, sweep, e1_scan, enumerate, ddmin);
criterion_main!(benches);
