//! Same workloads inside a one-thread rayon pool and the default pool.

use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rayon::{ThreadPool, ThreadPoolBuilder};
use roughlap::eigen::{smallest_eigenpairs, SolverConfig};
use roughlap::mesh::{generate_flat_torus, generate_icosphere, graph_diameter};
use roughlap::operators::{build_connection, connection_laplacian_1forms};

fn pools() -> Vec<(&'static str, ThreadPool)> {
    vec![
        ("1-thread", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("default", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn bench(c: &mut Criterion) {
    let sphere = generate_icosphere(1.0, 5).unwrap();
    let conn = build_connection(&sphere).unwrap();
    let (l, _) = connection_laplacian_1forms(&sphere, &conn).unwrap();
    let x: Vec<Complex64> = (0..l.dim()).map(|i| Complex64::new((i as f64).sin(), (i as f64).cos())).collect();
    let mut y = vec![Complex64::new(0.0, 0.0); l.dim()];
    let torus = generate_flat_torus(2.0 * PI, 2.0 * PI, 48, 48).unwrap();
    let small = generate_icosphere(1.0, 4).unwrap();
    let small_conn = build_connection(&small).unwrap();
    let (sl, sm) = connection_laplacian_1forms(&small, &small_conn).unwrap();

    let mut group = c.benchmark_group("parallel");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("matvec_sphere_s5", name), |b| {
            pool.install(|| b.iter(|| l.matvec(black_box(&x), &mut y)))
        });
        group.bench_function(BenchmarkId::new("assemble_sphere_s5", name), |b| {
            pool.install(|| b.iter(|| connection_laplacian_1forms(black_box(&sphere), &conn).unwrap()))
        });
        group.bench_function(BenchmarkId::new("graph_diameter_torus_48", name), |b| {
            pool.install(|| b.iter(|| graph_diameter(black_box(&torus)).unwrap()))
        });
        group.bench_function(BenchmarkId::new("eigensolve_sphere_s4", name), |b| {
            pool.install(|| b.iter(|| smallest_eigenpairs(&sl, &sm, &SolverConfig::with_k(6)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
