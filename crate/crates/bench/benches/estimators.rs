use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dynreg_bench::{ar_sample, SEED};
use dynreg_core::dynreg::{default_p_max, select_order, select_order_by, IcSample, OrderSearch};
use dynreg_core::hac::{bandwidth, cosine_lrv, BandwidthRule};
use dynreg_core::{bartlett_lrv, ols_fit, simulate, DgpSpec, ShockStream};

fn regression(c: &mut Criterion) {
    let mut g = c.benchmark_group("ols_fit");
    for t in [200, 2500] {
        let s = ar_sample(0.9, t);
        g.bench_with_input(BenchmarkId::from_parameter(t), &s, |b, s| {
            b.iter(|| ols_fit(black_box(&s.x), black_box(&s.y)).unwrap())
        });
    }
    g.finish();
}

fn long_run_variance(c: &mut Criterion) {
    let s = ar_sample(0.9, 600);
    let fit = ols_fit(&s.x, &s.y).unwrap();
    let mut g = c.benchmark_group("lrv_t600");
    for rule in [
        BandwidthRule::Nw,
        BandwidthRule::NwLlsw,
        BandwidthRule::NwKv,
    ] {
        let h = bandwidth(rule, 600);
        g.bench_function(rule.label(), |b| {
            b.iter(|| bartlett_lrv(black_box(&fit), &s.x, h).unwrap())
        });
    }
    let nu = bandwidth(BandwidthRule::MLlsw, 600);
    g.bench_function("M-LLSW", |b| {
        b.iter(|| cosine_lrv(black_box(&fit), &s.x, nu).unwrap())
    });
    g.finish();
}

fn lag_selection(c: &mut Criterion) {
    let mut g = c.benchmark_group("select_order_bic");
    for t in [200, 2500] {
        let s = ar_sample(0.9, t);
        let p_max = default_p_max(t);
        g.bench_with_input(BenchmarkId::new("common", t), &s, |b, s| {
            b.iter(|| {
                select_order(black_box(s), p_max, dynreg_core::dynreg::Criterion::Bic).unwrap()
            })
        });
        let search = OrderSearch {
            sample: IcSample::PerOrder,
            ..OrderSearch::new(dynreg_core::dynreg::Criterion::Bic, p_max)
        };
        g.bench_with_input(BenchmarkId::new("per-order", t), &s, |b, s| {
            b.iter(|| select_order_by(black_box(s), &search).unwrap())
        });
    }
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let spec = DgpSpec::ar(0.95, 2500);
    c.bench_function("simulate_ar_t2500", |b| {
        let mut r = 0;
        b.iter(|| {
            r += 1;
            simulate(&spec, &ShockStream::new(SEED, r), 0).unwrap()
        })
    });
}

criterion_group!(
    benches,
    regression,
    long_run_variance,
    lag_selection,
    simulation
);
criterion_main!(benches);
