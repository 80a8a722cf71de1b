use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use toric_dhym::bridgeland::k_scan_with;
use toric_dhym::charges::ComplexifiedClass;
use toric_dhym::exact::q_frac;
use toric_dhym::lg::{critical_points_with, positive_cycle_period_with, LgModel, NovikovPoint};
use toric_dhym::minangle::{minimal_angle_with, DEFAULT_SEED};
use toric_dhym::par::Exec;
use toric_dhym::{preset_fan, DivisorClass};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_k_scan(c: &mut Criterion) {
    let f = preset_fan("blp_p2").unwrap();
    let w = DivisorClass::parse(&f, "2,-1@basis(h,e)").unwrap();
    let cc = ComplexifiedClass::kahler(&f, w).unwrap().with_sqrt_scale(q_frac(1, 3)).unwrap();
    let l = DivisorClass::parse(&f, "2,0@basis(h,e)").unwrap();
    let mut g = c.benchmark_group("k_scan_200");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| k_scan_with(e, &f, &cc, &l, 200).unwrap())
        });
    }
    g.finish();
}

fn bench_min_angle(c: &mut Criterion) {
    let f = preset_fan("blpq_p2").unwrap();
    let w = DivisorClass::parse(&f, "3,-1,-1@basis(h,e1,e2)").unwrap();
    let a = DivisorClass::parse(&f, "5,-1,2@basis(h,e1,e2)").unwrap();
    let mut g = c.benchmark_group("minimal_angle_blpq_p2");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| minimal_angle_with(e, &f, &w, &a, DEFAULT_SEED).unwrap())
        });
    }
    g.finish();
}

fn bench_lg(c: &mut Criterion) {
    let f = preset_fan("p2").unwrap();
    let m = LgModel::at_point(&f, NovikovPoint::from_generators(&f, &[0.001]).unwrap()).unwrap();
    let mut g = c.benchmark_group("p2_period");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| positive_cycle_period_with(e, &m, 1.0, 1e-13).unwrap())
        });
    }
    g.finish();
    let f = preset_fan("blp_p2").unwrap();
    let m = LgModel::at_point(&f, NovikovPoint::from_generators(&f, &[0.1, 0.2]).unwrap()).unwrap();
    let mut g = c.benchmark_group("blp_p2_critical_points");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| critical_points_with(e, &m, 7, 200).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_k_scan, bench_min_angle, bench_lg);
criterion_main!(benches);
