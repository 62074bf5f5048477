use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use projcurv::integrator::{estimate, Method};
use projcurv::polynomial::HomogeneousPolynomial;
use projcurv::sampling::{Execution, Reduction, SamplingConfig};

const SAMPLES: usize = 2_000;

fn modes() -> [(&'static str, Execution, Reduction); 3] {
    [
        ("sequential", Execution::Sequential, Reduction::Deterministic),
        ("parallel", Execution::Parallel, Reduction::Deterministic),
        ("parallel_fast", Execution::Parallel, Reduction::Fast),
    ]
}

fn bench_methods(c: &mut Criterion) {
    let cubic = HomogeneousPolynomial::fermat(3, 3).unwrap();
    let quadric = HomogeneousPolynomial::fermat(4, 2).unwrap();
    let cases = [
        ("cubic_closed_form", &cubic, Method::CurveClosedForm),
        ("cubic_radial", &cubic, Method::HypersurfaceRadial),
        ("cubic_sphere_lift", &cubic, Method::SphereLift),
        ("quadric_radial", &quadric, Method::HypersurfaceRadial),
    ];
    for (name, poly, method) in cases {
        let mut group = c.benchmark_group(name);
        group.sample_size(10);
        group.throughput(Throughput::Elements(SAMPLES as u64));
        for (mode, execution, reduction) in modes() {
            let config = SamplingConfig::new(SAMPLES, 1)
                .with_execution(execution)
                .with_reduction(reduction);
            group.bench_with_input(BenchmarkId::from_parameter(mode), &config, |b, cfg| {
                b.iter(|| estimate(black_box(poly), method, cfg).unwrap().value)
            });
        }
        group.finish();
    }
}

criterion_group!(benches, bench_methods);
criterion_main!(benches);
