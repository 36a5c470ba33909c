use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qlax_core::algebra::AlgebraDescriptor;
use qlax_core::lax::{lax_residual, solve_lax};
use qlax_core::sample;
use qlax_core::symmetry::{dense_ad, solve_symmetry};
use qlax_core::{LaxProblem, TimeGrid};

fn problem(n: usize, order: usize) -> LaxProblem {
    let d = AlgebraDescriptor::matrix(n);
    let mut rng = sample::rng(42);
    let l0 = sample::element(&mut rng, &d, 0.5);
    let path = sample::path(&mut rng, &d, 2, 0.4);
    LaxProblem::new(l0, path, 0.5, order, TimeGrid::new(1e-3, 1.0).unwrap()).unwrap()
}

/// Runs `f` on a pool of `threads` workers; `None` uses the global pool.
#[cfg(feature = "parallel")]
fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R: Send>(_threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

fn modes() -> Vec<(&'static str, Option<usize>)> {
    if qlax_core::par::is_parallel() {
        vec![("1-thread", Some(1)), ("all-threads", None)]
    } else {
        vec![("sequential", None)]
    }
}

fn bench_lax(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_lax");
    g.sample_size(10);
    for (n, order) in [(3, 6), (6, 8)] {
        let p = problem(n, order);
        for (label, threads) in modes() {
            g.bench_with_input(BenchmarkId::new(label, format!("n{n}-N{order}")), &p, |b, p| {
                b.iter(|| with_threads(threads, || solve_lax(p).unwrap()))
            });
        }
    }
    g.finish();

    let mut g = c.benchmark_group("lax_residual");
    g.sample_size(10);
    let res = solve_lax(&problem(6, 8)).unwrap();
    for (label, threads) in modes() {
        g.bench_function(label, |b| b.iter(|| with_threads(threads, || lax_residual(&res).unwrap())));
    }
    g.finish();
}

fn bench_symmetry(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_symmetry");
    g.sample_size(10);
    let p = problem(4, 4);
    let s0 = dense_ad(&p.l0).unwrap();
    for (label, threads) in modes() {
        g.bench_function(label, |b| {
            b.iter(|| {
                with_threads(threads, || {
                    solve_symmetry(&s0, &p.path, p.q0, p.order, &p.grid).unwrap()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_lax, bench_symmetry);
criterion_main!(benches);
