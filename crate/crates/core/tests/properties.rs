//! Invariants that hold for any data or any seed.

use dynreg_core::dgp::{simulate, DgpSpec, ShockStream, StreamRole};
use dynreg_core::dynreg::{default_p_max, fit_fixed_order, select_order, Criterion};
use dynreg_core::experiments::{
    run_efficiency, run_forecast, run_power, run_size, run_surface, run_table, run_weak_exo,
    ExperimentConfig,
};
use dynreg_core::hac::{fixed_b_critical_value, TestMethod};
use dynreg_core::nalgebra::DMatrix;
use dynreg_core::regression::ols_t_stat;
use dynreg_core::{ols_fit, Sample};
use proptest::prelude::*;

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        rhos: vec![0.0, 0.9],
        ts: vec![50],
        reps: 120,
        beta_grid: vec![1.0, 1.2],
        seed: 99,
        ..Default::default()
    }
}

fn with_threads(cfg: &ExperimentConfig, threads: usize) -> ExperimentConfig {
    ExperimentConfig {
        threads,
        ..cfg.clone()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refit_on_fitted_values_is_idempotent(
        rows in proptest::collection::vec((-4.0f64..4.0, -4.0f64..4.0, -4.0f64..4.0), 6..40),
    ) {
        let n = rows.len();
        let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { rows[i].0 } else { rows[i].1 });
        let y: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let Ok(fit) = ols_fit(&x, &y) else { return Ok(()); };
        let fitted: Vec<f64> = (0..n)
            .map(|i| fit.beta_hat[0] * x[(i, 0)] + fit.beta_hat[1] * x[(i, 1)])
            .collect();
        let refit = ols_fit(&x, &fitted).unwrap();
        for (a, b) in fit.beta_hat.iter().zip(&refit.beta_hat) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()) * 1e3);
        }
    }

    #[test]
    fn scaling_the_response_scales_beta(
        rows in proptest::collection::vec((-4.0f64..4.0, -4.0f64..4.0), 5..40),
        c in prop_oneof![Just(2.0f64), Just(-0.5), Just(8.0)],
    ) {
        let n = rows.len();
        let x = DMatrix::from_fn(n, 1, |i, _| rows[i].0);
        let y: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let Ok(fit) = ols_fit(&x, &y) else { return Ok(()); };
        let ys: Vec<f64> = y.iter().map(|v| c * v).collect();
        let fs = ols_fit(&x, &ys).unwrap();
        prop_assert_eq!(fs.beta_hat[0], c * fit.beta_hat[0]);
        let t0 = ols_t_stat(&fit, 0, 0.3).unwrap();
        let t1 = ols_t_stat(&fs, 0, 0.3 * c).unwrap();
        prop_assert!((c.signum() * t0 - t1).abs() <= 1e-10 * (1.0 + t0.abs()));
    }

    #[test]
    fn moment_matrix_is_psd_and_residuals_orthogonal(
        rows in proptest::collection::vec((-4.0f64..4.0, -4.0f64..4.0, -4.0f64..4.0), 6..40),
    ) {
        let n = rows.len();
        let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { rows[i].0 } else { rows[i].1 });
        let y: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let Ok(fit) = ols_fit(&x, &y) else { return Ok(()); };
        let eig = fit.q_hat.clone().symmetric_eigenvalues();
        prop_assert!(eig.min() >= -1e-12 * fit.q_hat.trace());
        let scale = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        for j in 0..2 {
            let g: f64 = (0..n).map(|i| x[(i, j)] * fit.residuals[i]).sum();
            prop_assert!(g.abs() / n as f64 <= 1e-8 * scale);
        }
        let sse: f64 = fit.residuals.iter().map(|r| r * r).sum();
        prop_assert!((sse - fit.sse).abs() <= 1e-12 * (1.0 + sse));
    }
}

#[test]
fn regressor_and_disturbance_are_uncorrelated() {
    for spec in [DgpSpec::ar(0.9, 500), DgpSpec::ma(0.9, 500)] {
        let (mut sxu, mut sxx, mut suu) = (0.0, 0.0, 0.0);
        let mut n = 0usize;
        for r in 0..200 {
            let s = simulate(&spec, &ShockStream::new(4, r), 0).unwrap();
            let u = s.u.as_ref().unwrap();
            // One draw per replication keeps the pooled terms independent.
            let (x, u) = (s.x[(250, 0)], u[250]);
            sxu += x * u;
            sxx += x * x;
            suu += u * u;
            n += 1;
        }
        let corr = sxu / (sxx * suu).sqrt();
        assert!(corr.abs() < 3.0 / (n as f64).sqrt(), "{corr}");
    }
}

#[test]
fn shocks_are_shared_across_rho() {
    let stream = ShockStream::new(17, 5);
    let a = simulate(&DgpSpec::ar(0.3, 100), &stream, 0).unwrap();
    let b = simulate(&DgpSpec::ar(0.95, 100), &stream, 0).unwrap();
    let ex = stream.normals(StreamRole::XShocks, 100);
    let eu = stream.normals(StreamRole::UShocks, 100);
    for t in 1..100 {
        let ia = a.x[(t, 0)] - 0.3 * a.x[(t - 1, 0)];
        let ib = b.x[(t, 0)] - 0.95 * b.x[(t - 1, 0)];
        assert!((ia - ex[t]).abs() < 1e-12 && (ib - ex[t]).abs() < 1e-12);
        let ua = a.u.as_ref().unwrap();
        let ub = b.u.as_ref().unwrap();
        assert!((ua[t] - 0.3 * ua[t - 1] - eu[t]).abs() < 1e-12);
        assert!((ub[t] - 0.95 * ub[t - 1] - eu[t]).abs() < 1e-12);
    }
}

#[test]
fn every_experiment_is_thread_count_invariant() {
    let cfg = small_config();
    let (one, three) = (with_threads(&cfg, 1), with_threads(&cfg, 3));
    assert_eq!(run_table(&one).unwrap(), run_table(&three).unwrap());
    assert_eq!(run_power(&one).unwrap(), run_power(&three).unwrap());
    assert_eq!(run_surface(&one).unwrap(), run_surface(&three).unwrap());
    assert_eq!(run_forecast(&one).unwrap(), run_forecast(&three).unwrap());
    assert_eq!(run_weak_exo(&one).unwrap(), run_weak_exo(&three).unwrap());
}

#[test]
fn table_matches_separate_runs() {
    let cfg = small_config();
    let (eff, size) = run_table(&cfg).unwrap();
    assert_eq!(eff, run_efficiency(&cfg).unwrap());
    assert_eq!(size, run_size(&cfg).unwrap());
}

#[test]
fn mse_decomposes_in_every_row() {
    let cfg = ExperimentConfig {
        dgp: dynreg_core::DgpKind::ArMa,
        ..small_config()
    };
    for row in run_efficiency(&cfg).unwrap() {
        let (b, v, m) = (row.bias.unwrap(), row.variance.unwrap(), row.mse.unwrap());
        assert!((m - (b * b + v)).abs() <= 1e-10 * m);
        assert!(v >= 0.0);
    }
}

#[test]
fn power_at_the_null_reproduces_size() {
    let cfg = small_config();
    let size = run_size(&cfg).unwrap();
    let power = run_power(&cfg).unwrap();
    for s in &size {
        let p = power
            .iter()
            .find(|p| p.rho == s.rho && p.t == s.t && p.method == s.method && p.beta_true == 1.0)
            .unwrap();
        assert_eq!(p.rejection, s.rejection);
    }
}

#[test]
fn hac_arms_share_the_ols_estimate() {
    let cfg = small_config();
    let rows = run_weak_exo(&ExperimentConfig {
        ts: vec![50],
        ..cfg
    })
    .unwrap();
    let hac: Vec<_> = rows
        .iter()
        .filter(|r| r.method != "DynReg" && r.beta_true == 1.0)
        .collect();
    assert_eq!(hac.len(), 6);
    for r in &hac {
        assert_eq!(r.bias, hac[0].bias);
        assert_eq!(r.variance, hac[0].variance);
    }
}

#[test]
fn rejection_rows_are_probabilities() {
    for row in run_size(&small_config()).unwrap() {
        let r = row.rejection.unwrap();
        assert!((0.0..=1.0).contains(&r));
        let se = row.mc_se.unwrap();
        assert!((se - (r * (1.0 - r) / row.reps_used as f64).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn aic_selects_at_least_as_many_lags_as_bic() {
    for spec in [
        DgpSpec::ar(0.5, 200),
        DgpSpec::ma(0.9, 200),
        DgpSpec::ar(0.0, 50),
    ] {
        let (mut aic, mut bic) = (0.0, 0.0);
        for r in 0..150 {
            let s = simulate(&spec, &ShockStream::new(8, r), 0).unwrap();
            let pm = default_p_max(spec.t);
            aic += select_order(&s, pm, Criterion::Aic).unwrap().p as f64;
            bic += select_order(&s, pm, Criterion::Bic).unwrap().p as f64;
        }
        assert!(aic >= bic, "{spec:?}: {aic} < {bic}");
    }
}

#[test]
fn bic_is_consistent_and_recovers_the_common_factor() {
    for rho in [0.3, 0.9] {
        let spec = DgpSpec::ar(rho, 2500);
        let reps = 150;
        let mut hits = 0;
        let mut cf = 0.0;
        for r in 0..reps {
            let s = simulate(&spec, &ShockStream::new(21, r), 0).unwrap();
            let fit = select_order(&s, default_p_max(2500), Criterion::Bic).unwrap();
            if fit.p == 1 {
                hits += 1;
            }
            let one = fit_fixed_order(&s, 1).unwrap();
            // γ = −βφ at the truth.
            cf += one.gamma(0)[0] + one.beta()[0] * one.phi()[0];
        }
        assert!(hits as f64 / reps as f64 > 0.95, "rho={rho}: {hits}/{reps}");
        assert!((cf / reps as f64).abs() < 0.05, "rho={rho}");
    }
}

#[test]
fn order_zero_equals_static_ols_on_simulated_data() {
    let s = simulate(&DgpSpec::ar(0.9, 300), &ShockStream::new(2, 2), 0).unwrap();
    let dyn0 = fit_fixed_order(&s, 0).unwrap();
    let ols = ols_fit(&s.x, &s.y).unwrap();
    assert_eq!(dyn0.fit, ols);
}

#[test]
fn forecasts_exploit_serial_correlation_without_bias() {
    let cfg = ExperimentConfig {
        rhos: vec![0.5, 0.9],
        ts: vec![200],
        reps: 1000,
        ..Default::default()
    };
    for row in run_forecast(&cfg).unwrap() {
        let r = &row.result;
        assert!(r.mspe_opt <= r.mspe_subopt, "rho={}", row.rho);
        assert!(r.mean_error_opt.abs() < 3.0 * r.error_se_opt);
        assert!(r.mean_error_subopt.abs() < 3.0 * r.error_se_subopt);
    }
}

#[test]
fn fixed_b_value_is_stable_across_seeds() {
    let a = fixed_b_critical_value(0.05, 1000, 500_000, 1).unwrap();
    let b = fixed_b_critical_value(0.05, 1000, 500_000, 2).unwrap();
    assert!((a - b).abs() < 0.02, "{a} vs {b}");
    assert!(a > 1.96);
}

#[test]
fn student_t_switch_only_widens_dynreg_intervals() {
    let base = ExperimentConfig {
        methods: vec![TestMethod::DynReg],
        ..small_config()
    };
    let t = ExperimentConfig {
        dynreg_student_t: true,
        ..base.clone()
    };
    let a = run_size(&base).unwrap();
    let b = run_size(&t).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(y.rejection.unwrap() <= x.rejection.unwrap());
    }
}

#[test]
fn identical_series_reject_higher_orders() {
    let x: Vec<f64> = (0..40).map(|i| ((i * 13) % 9) as f64 - 4.0).collect();
    let s = Sample::from_columns(x.clone(), x).unwrap();
    let fit = select_order(&s, 5, Criterion::Bic).unwrap();
    assert_eq!(fit.p, 0);
    assert_eq!(fit.theta_hat[0], 1.0);
}
