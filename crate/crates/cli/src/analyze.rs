use std::path::Path;

use anyhow::{bail, Context, Result};
use dynreg_core::dynreg::{
    default_p_max, fit_fixed_order, select_order_by, Criterion, DynRegFit, IcSample, OrderSearch,
};
use dynreg_core::hac::{
    bandwidth_with, bartlett_lrv, cosine_lrv, hac_t_test, ols_t_test, BandwidthRule, TestMethod,
    TestResult,
};
use dynreg_core::nalgebra::DMatrix;
use dynreg_core::{fmt_f64, ols_fit, Error, Sample};
use serde_json::{json, Value};

use crate::args::AnalyzeArgs;
use crate::settings::Layer;

const KEYS: &[&str] = &[
    "method",
    "pmax",
    "p",
    "criterion",
    "ic-sample",
    "level",
    "null",
    "coef",
    "mllsw-coef",
    "student-t",
    "json",
];

pub const MIN_ROWS: usize = 10;

pub fn parse_ic_sample(layer: &Layer, flag: Option<String>) -> anyhow::Result<IcSample> {
    let s = layer.pick(flag, "ic-sample", "common".to_string())?;
    IcSample::parse(&s)
        .ok_or_else(|| anyhow::anyhow!("unknown ic-sample `{s}` (expected common or per-order)"))
}

/// Reads a CSV with a `y` column and regressor columns `x`, `x1`, `x2`, ...
/// Columns `t` and `u` are ignored.
pub fn read_sample(path: &Path) -> Result<Sample> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = rdr.headers().context("reading header line")?.clone();
    let mut y_col = None;
    let mut x_cols = Vec::new();
    for (i, name) in headers.iter().enumerate() {
        match name {
            "y" => y_col = Some(i),
            "t" | "u" => {}
            n if n == "x" || (n.starts_with('x') && n[1..].chars().all(|c| c.is_ascii_digit())) => {
                x_cols.push(i)
            }
            other => bail!("line 1: unexpected column `{other}` (expected y, x, x1, x2, ...; t and u are ignored)"),
        }
    }
    let y_col = y_col.context("line 1: no `y` column")?;
    if x_cols.is_empty() {
        bail!("line 1: no regressor columns (x, x1, x2, ...)");
    }
    let mut y = Vec::new();
    let mut xs: Vec<Vec<f64>> = vec![Vec::new(); x_cols.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            anyhow::anyhow!("line {line}: {e}")
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64> {
            let raw = rec.get(i).unwrap_or("");
            let v: f64 = raw.parse().map_err(|_| {
                anyhow::anyhow!(
                    "line {line}: `{}` is not a number in column `{}`",
                    raw,
                    &headers[i]
                )
            })?;
            if !v.is_finite() {
                bail!("line {line}: non-finite value in column `{}`", &headers[i]);
            }
            Ok(v)
        };
        y.push(field(y_col)?);
        for (col, &i) in xs.iter_mut().zip(&x_cols) {
            col.push(field(i)?);
        }
    }
    if y.len() < MIN_ROWS {
        bail!(
            "{} has {} data rows; at least {MIN_ROWS} are required",
            path.display(),
            y.len()
        );
    }
    let n = y.len();
    let x = DMatrix::from_fn(n, xs.len(), |r, c| xs[c][r]);
    Ok(Sample::new(y, x)?)
}

fn explain(e: Error) -> anyhow::Error {
    match e {
        Error::RankDeficient { .. } => anyhow::Error::new(e).context(
            "the design is rank deficient; check for constant or duplicated columns, or lower --pmax / --p",
        ),
        other => anyhow::Error::new(other),
    }
}

fn test_json(t: &TestResult, null_value: f64) -> Value {
    json!({
        "method": t.method.label(),
        "null": null_value,
        "statistic": t.statistic,
        "critical_value": t.critical_value,
        "reject": t.reject,
        "level": t.nominal_level,
    })
}

fn test_lines(t: &TestResult, null: f64) -> Vec<String> {
    vec![
        format!("H0: coefficient = {}", fmt_f64(null)),
        format!("t statistic: {}", fmt_f64(t.statistic)),
        format!(
            "critical value ({}%, two-sided): {}",
            fmt_f64(100.0 * t.nominal_level),
            fmt_f64(t.critical_value)
        ),
        format!("reject: {}", if t.reject { "yes" } else { "no" }),
    ]
}

fn theta_names(fit: &DynRegFit) -> Vec<String> {
    let mut names: Vec<String> = (1..=fit.p).map(|j| format!("phi{j}")).collect();
    names.extend((1..=fit.k).map(|i| format!("beta{i}")));
    for i in 1..=fit.k {
        names.extend((1..=fit.p).map(|j| format!("gamma{i}_{j}")));
    }
    names
}

pub fn run(args: AnalyzeArgs) -> Result<()> {
    let layer = Layer::load(args.config.as_deref(), KEYS)?;
    let method_s = layer.pick(args.method, "method", "dynreg".to_string())?;
    let method =
        TestMethod::parse(&method_s).with_context(|| format!("unknown method `{method_s}`"))?;
    let criterion_s = layer.pick(args.criterion, "criterion", "bic".to_string())?;
    let criterion = match Criterion::parse(&criterion_s) {
        Some(c @ (Criterion::Bic | Criterion::Aic)) => c,
        _ => bail!("unknown criterion `{criterion_s}` (expected bic or aic)"),
    };
    let level = layer.pick(args.level, "level", 0.05)?;
    let null = layer.pick(args.null, "null", 0.0)?;
    let coef = layer.pick(args.coef, "coef", 0usize)?;
    let coef_m = layer.pick(
        args.mllsw_coef,
        "mllsw-coef",
        dynreg_core::hac::M_LLSW_COEFFICIENT,
    )?;
    let student_t = layer.switch(args.student_t, "student-t")?;
    let json_out = layer.switch(args.json, "json")?;
    let fixed_p = layer.maybe(args.p, "p")?;
    let pmax = layer.maybe(args.pmax, "pmax")?;
    let ic_sample = parse_ic_sample(&layer, args.ic_sample.clone())?;

    let sample = read_sample(&args.input)?;
    let t = sample.len();
    if coef >= sample.k() {
        bail!(
            "--coef {coef} out of range: the file has {} regressors",
            sample.k()
        );
    }

    let mut lines = vec![format!("rows: {t}"), format!("regressors: {}", sample.k())];
    let report = match method {
        TestMethod::DynReg => {
            let p_max = pmax.unwrap_or_else(|| default_p_max(t));
            let fit = match fixed_p {
                Some(p) => fit_fixed_order(&sample, p),
                None => select_order_by(
                    &sample,
                    &OrderSearch {
                        criterion,
                        p_max,
                        sample: ic_sample,
                    },
                ),
            }
            .map_err(explain)?;
            let test = dynreg_test(&fit, coef, null, level, student_t)?;
            let names = theta_names(&fit);
            lines.push("method: DynReg".into());
            match fixed_p {
                Some(p) => lines.push(format!("lag order: p={p} (fixed)")),
                None => lines.push(format!(
                    "lag order: p={} ({}, p_max={p_max})",
                    fit.p,
                    criterion.label()
                )),
            }
            lines.push(format!("observations used: {}", fit.n_effective));
            for (n, v) in names.iter().zip(&fit.theta_hat) {
                lines.push(format!("{n}: {}", fmt_f64(*v)));
            }
            lines.push(format!("sigma2: {}", fmt_f64(fit.fit.sigma2_hat)));
            lines.extend(test_lines(&test, null));
            json!({
                "rows": t,
                "method": "DynReg",
                "p": fit.p,
                "p_max": if fixed_p.is_some() { Value::Null } else { json!(p_max) },
                "criterion": if fixed_p.is_some() { "fixed" } else { criterion.label() },
                "n_effective": fit.n_effective,
                "theta_names": names,
                "theta_hat": fit.theta_hat,
                "sigma2_hat": fit.fit.sigma2_hat,
                "sse": fit.fit.sse,
                "test": test_json(&test, null),
            })
        }
        TestMethod::Ols => {
            let fit = ols_fit(&sample.x, &sample.y).map_err(explain)?;
            let test = ols_t_test(&fit, coef, null, level)?;
            let se = fit.classical_se(coef)?;
            lines.push("method: OLS".into());
            for (i, b) in fit.beta_hat.iter().enumerate() {
                lines.push(format!("beta{}: {}", i + 1, fmt_f64(*b)));
            }
            lines.push(format!("standard error: {}", fmt_f64(se)));
            lines.extend(test_lines(&test, null));
            json!({
                "rows": t,
                "method": "OLS",
                "beta_hat": fit.beta_hat,
                "std_error": se,
                "sigma2_hat": fit.sigma2_hat,
                "test": test_json(&test, null),
            })
        }
        TestMethod::Hac(rule) => {
            let fit = ols_fit(&sample.x, &sample.y).map_err(explain)?;
            let bw = bandwidth_with(rule, t, coef_m);
            let lrv = if rule == BandwidthRule::MLlsw {
                cosine_lrv(&fit, &sample.x, bw)?
            } else {
                bartlett_lrv(&fit, &sample.x, bw)?
            }
            .with_method(rule);
            let test = hac_t_test(&fit, &lrv, coef, null, level)?;
            let qinv = fit.q_inverse()?;
            let var = (&qinv * &lrv.omega_hat * &qinv)[(coef, coef)] / t as f64;
            let se = var.sqrt();
            let bw_line = if rule == BandwidthRule::MLlsw {
                format!("nu={bw}")
            } else {
                format!("h={bw}")
            };
            lines.push(format!("method: {}", rule.label()));
            for (i, b) in fit.beta_hat.iter().enumerate() {
                lines.push(format!("beta{}: {}", i + 1, fmt_f64(*b)));
            }
            lines.push(format!("bandwidth: {bw_line}"));
            lines.push(format!("standard error: {}", fmt_f64(se)));
            lines.extend(test_lines(&test, null));
            let omega: Vec<Vec<f64>> = lrv
                .omega_hat
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect();
            json!({
                "rows": t,
                "method": rule.label(),
                "beta_hat": fit.beta_hat,
                "bandwidth": bw,
                "dof": lrv.dof_for_test,
                "omega_hat": omega,
                "std_error": se,
                "test": test_json(&test, null),
            })
        }
        TestMethod::HacCustom => bail!("method needs a bandwidth rule"),
    };

    if json_out {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for l in lines {
            println!("{l}");
        }
    }
    Ok(())
}

/// Classical t test of regressor `coef`'s contemporaneous coefficient.
fn dynreg_test(
    fit: &DynRegFit,
    coef: usize,
    null: f64,
    level: f64,
    student_t: bool,
) -> Result<TestResult> {
    use dynreg_core::hac::{critical_value, Reference};
    let j = fit.beta_index(coef);
    let stat = dynreg_core::regression::ols_t_stat(&fit.fit, j, null)?;
    let reference = if student_t {
        Reference::StudentT((fit.n_effective - fit.n_params()) as f64)
    } else {
        Reference::Normal
    };
    let cv = critical_value(reference, level)?;
    Ok(TestResult::new(stat, cv, TestMethod::DynReg, level))
}
