mod analyze;
mod args;
mod settings;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use dynreg_core::dgp::{simulate, write_sample_csv, DgpKind, DgpSpec, ShockStream};
use dynreg_core::dynreg::Criterion;
use dynreg_core::experiments::{
    default_beta_grid, run_to_dir, symmetric_beta_grid, ExperimentConfig, Family, RunReport,
    DEFAULT_REPS, DEFAULT_SEED, SURFACE_RHOS, SURFACE_TS,
};
use dynreg_core::fmt_f64;
use dynreg_core::hac::{
    fixed_b_critical_value, TestMethod, DEFAULT_FIXED_B_DRAWS, DEFAULT_FIXED_B_GRID,
    DEFAULT_FIXED_B_SEED, M_LLSW_COEFFICIENT,
};

use args::{Cli, Command, CritvalArgs, ExperimentArgs, PowerArgs, SimulateArgs};
use settings::{parse_list, Layer};

const EXPERIMENT_KEYS: &[&str] = &[
    "dgp",
    "rho",
    "T",
    "reps",
    "criterion",
    "ic-sample",
    "seed",
    "threads",
    "out",
    "methods",
    "level",
    "rho-x",
    "mllsw-coef",
    "pmax",
    "student-t",
    "resume",
    "betas",
    "symmetric",
];

fn parse_dgp(s: &str) -> Result<DgpKind> {
    DgpKind::parse(s).with_context(|| format!("unknown dgp `{s}` (expected ar, ma or weakexo)"))
}

fn experiment_config(
    args: &ExperimentArgs,
    layer: &Layer,
    family: Family,
) -> Result<(ExperimentConfig, std::path::PathBuf, bool)> {
    let mut cfg = ExperimentConfig::default();
    if family == Family::Surface {
        cfg.rhos = SURFACE_RHOS.to_vec();
        cfg.ts = SURFACE_TS.to_vec();
    }
    if let Some(s) = args.dgp.clone().or(layer.raw("dgp").map(String::from)) {
        cfg.dgp = parse_dgp(&s)?;
    }
    if family == Family::WeakExo {
        cfg.dgp = DgpKind::WeakExo;
    }
    if let Some(s) = args.rho.clone().or(layer.raw("rho").map(String::from)) {
        cfg.rhos = parse_list(&s, "rho")?;
    }
    if let Some(s) = args.t.clone().or(layer.raw("T").map(String::from)) {
        cfg.ts = parse_list(&s, "T")?;
    }
    cfg.reps = layer.pick(args.reps, "reps", DEFAULT_REPS)?;
    let crit = layer.pick(args.criterion.clone(), "criterion", "bic".to_string())?;
    cfg.criterion = match Criterion::parse(&crit) {
        Some(c @ (Criterion::Bic | Criterion::Aic)) => c,
        _ => bail!("unknown criterion `{crit}` (expected bic or aic)"),
    };
    cfg.ic_sample = analyze::parse_ic_sample(layer, args.ic_sample.clone())?;
    cfg.seed = layer.pick(args.seed, "seed", DEFAULT_SEED)?;
    cfg.threads = layer.pick(args.threads, "threads", 0)?;
    if let Some(s) = args
        .methods
        .clone()
        .or(layer.raw("methods").map(String::from))
    {
        cfg.methods = s
            .split(',')
            .map(str::trim)
            .filter(|m| !m.is_empty())
            .map(|m| TestMethod::parse(m).with_context(|| format!("unknown method `{m}`")))
            .collect::<Result<_>>()?;
    }
    cfg.level = layer.pick(args.level, "level", 0.05)?;
    cfg.rho_x = layer.maybe(args.rho_x, "rho-x")?;
    cfg.m_llsw_coefficient = layer.pick(args.mllsw_coef, "mllsw-coef", M_LLSW_COEFFICIENT)?;
    cfg.p_max = layer.maybe(args.pmax, "pmax")?;
    cfg.dynreg_student_t = layer.switch(args.student_t, "student-t")?;
    let out = layer.pick(args.out.clone(), "out", "results".into())?;
    let resume = layer.switch(args.resume, "resume")?;
    cfg.validate()?;
    Ok((cfg, out, resume))
}

fn finish(report: &RunReport) -> Result<bool> {
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    println!(
        "cells run: {}, skipped (already present): {}",
        report.cells_run, report.cells_skipped
    );
    if report.failures.is_empty() {
        return Ok(true);
    }
    eprintln!("{} cell(s) had failed replications:", report.failures.len());
    for f in &report.failures {
        eprintln!("  {}: {} failed ({})", f.cell, f.failed_reps, f.message);
    }
    Ok(false)
}

fn run_experiment(
    family: Family,
    args: &ExperimentArgs,
    betas: Option<(Option<String>, bool)>,
) -> Result<bool> {
    let layer = Layer::load(args.config.as_deref(), EXPERIMENT_KEYS)?;
    let (mut cfg, out, resume) = experiment_config(args, &layer, family)?;
    if let Some((list, symmetric)) = betas {
        let symmetric = layer.switch(symmetric, "symmetric")?;
        cfg.beta_grid = match list.or(layer.raw("betas").map(String::from)) {
            Some(s) => parse_list(&s, "beta")?,
            None if symmetric => symmetric_beta_grid(),
            None => default_beta_grid(),
        };
    }
    let mut progress = |line: &str| eprintln!("done: {line}");
    let report = run_to_dir(family, &cfg, &out, resume, &mut progress)?;
    finish(&report)
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let layer = Layer::load(
        args.config.as_deref(),
        &["dgp", "rho", "T", "rho-x", "beta", "seed", "rep", "out"],
    )?;
    let dgp = parse_dgp(&layer.pick(args.dgp, "dgp", "ar".to_string())?)?;
    let rho = layer.pick(args.rho, "rho", 0.9)?;
    let t = layer.pick(args.t, "T", 200usize)?;
    let mut spec = DgpSpec::new(dgp, rho, t).with_beta(layer.pick(args.beta, "beta", 1.0)?);
    if let Some(rx) = layer.maybe(args.rho_x, "rho-x")? {
        spec = spec.with_rho_x(rx);
    }
    let seed = layer.pick(args.seed, "seed", DEFAULT_SEED)?;
    let rep = layer.pick(args.rep, "rep", 0u64)?;
    let sample = simulate(&spec, &ShockStream::new(seed, rep), 0)?;
    match layer.maybe(args.out, "out")? {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let f = std::fs::File::create(&path)
                .with_context(|| format!("creating {}", path.display()))?;
            let mut w = std::io::BufWriter::new(f);
            write_sample_csv(&sample, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = std::io::BufWriter::new(stdout.lock());
            write_sample_csv(&sample, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run_critval(args: CritvalArgs) -> Result<()> {
    let layer = Layer::load(
        args.config.as_deref(),
        &["level", "grid", "draws", "seed", "threads", "json"],
    )?;
    let level = layer.pick(args.level, "level", 0.05)?;
    let grid = layer.pick(args.grid, "grid", DEFAULT_FIXED_B_GRID)?;
    let draws = layer.pick(args.draws, "draws", DEFAULT_FIXED_B_DRAWS)?;
    let seed = layer.pick(args.seed, "seed", DEFAULT_FIXED_B_SEED)?;
    let threads = layer.pick(args.threads, "threads", 0usize)?;
    let json = layer.switch(args.json, "json")?;
    let pool = rayon_pool(threads)?;
    let c = pool.install(|| fixed_b_critical_value(level, grid, draws, seed))?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "level": level, "grid_points": grid, "draws": draws, "seed": seed, "critical_value": c
            })
        );
    } else {
        println!("{}", fmt_f64(c));
    }
    Ok(())
}

fn rayon_pool(threads: usize) -> Result<dynreg_core::rayon::ThreadPool> {
    Ok(dynreg_core::rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?)
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Analyze(a) => analyze::run(a).map(|_| true),
        Command::Simulate(a) => run_simulate(a).map(|_| true),
        Command::Table(a) => run_experiment(Family::Table, &a, None),
        Command::Surface(a) => run_experiment(Family::Surface, &a, None),
        Command::Power(PowerArgs {
            common,
            betas,
            symmetric,
        }) => run_experiment(Family::Power, &common, Some((betas, symmetric))),
        Command::Forecast(a) => run_experiment(Family::Forecast, &a, None),
        Command::Weakexo(a) => run_experiment(Family::WeakExo, &a, None),
        Command::Critval(a) => run_critval(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
