//! CSV tables written one cell at a time, resumable by cell key.

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::runner::{run_cell, CellOutcome};
use super::summary::{
    combined_summaries, estimation_summaries, rejection_summaries, ExperimentSummary,
};
use super::{forecast_cell, surface_points, weak_exo_config, ForecastRow, SurfacePoint};
use crate::error::{Error, Result};
use crate::format::{fmt_f64, fmt_opt};

pub const EFFICIENCY_HEADER: &[&str] = &[
    "dgp",
    "criterion",
    "rho",
    "T",
    "method",
    "bias",
    "variance",
    "mse",
    "re_est",
    "lag_median",
    "lag_mean",
    "reps",
];
pub const SIZE_HEADER: &[&str] = &[
    "dgp",
    "criterion",
    "rho",
    "T",
    "method",
    "rejection",
    "mc_se",
];
pub const POWER_HEADER: &[&str] = &[
    "dgp",
    "criterion",
    "rho",
    "T",
    "method",
    "beta_true",
    "rejection",
];
pub const SURFACE_HEADER: &[&str] = &["rho", "T", "method", "size_distortion"];
pub const WEAK_EXO_HEADER: &[&str] = &[
    "T",
    "method",
    "bias",
    "variance",
    "mse",
    "re_est",
    "lag_median",
    "lag_mean",
    "beta_true",
    "rejection",
    "mc_se",
    "reps",
];
pub const FORECAST_HEADER: &[&str] = &[
    "T",
    "rho",
    "mspe_ols",
    "mspe_dynreg",
    "re_pred",
    "analytic_re_pred",
    "reps",
];

/// A CSV file whose rows are grouped by a cell key.
#[derive(Debug)]
pub struct CsvTable {
    path: PathBuf,
    key_columns: Vec<usize>,
    done: HashSet<String>,
    out: BufWriter<File>,
}

impl CsvTable {
    /// Opens `path` for writing. With `resume`, an existing file with the
    /// same header is kept and the keys of its rows are marked done; a
    /// trailing partial line is dropped.
    pub fn open(path: &Path, header: &[&str], key_columns: &[usize], resume: bool) -> Result<Self> {
        let header_line = header.join(",");
        let mut done = HashSet::new();
        let existing = if resume && path.exists() {
            let text = fs::read_to_string(path)?;
            let complete = match text.rfind('\n') {
                Some(i) => &text[..=i],
                None => "",
            };
            let mut lines = complete.lines();
            match lines.next() {
                Some(h) if h == header_line => {
                    for line in lines {
                        let fields: Vec<&str> = line.split(',').collect();
                        done.insert(join_key(&fields, key_columns));
                    }
                    Some(complete.len())
                }
                Some(_) => {
                    return Err(Error::InvalidArgument(format!(
                        "{} has a different header; refusing to resume into it",
                        path.display()
                    )))
                }
                None => None,
            }
        } else {
            None
        };
        let out = match existing {
            Some(len) => {
                let f = OpenOptions::new().write(true).open(path)?;
                f.set_len(len as u64)?;
                let mut w = BufWriter::new(f);
                use std::io::Seek;
                w.seek(std::io::SeekFrom::End(0))?;
                w
            }
            None => {
                let mut w = BufWriter::new(File::create(path)?);
                writeln!(w, "{header_line}")?;
                w.flush()?;
                w
            }
        };
        Ok(Self {
            path: path.to_path_buf(),
            key_columns: key_columns.to_vec(),
            done,
            out,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn is_done(&self, key: &str) -> bool {
        self.done.contains(key)
    }

    /// Key of a row as it would be read back from the file.
    pub fn key_of(&self, row: &[String]) -> String {
        let fields: Vec<&str> = row.iter().map(String::as_str).collect();
        join_key(&fields, &self.key_columns)
    }

    /// Appends the rows of one cell and flushes.
    pub fn write_cell(&mut self, rows: &[Vec<String>]) -> Result<()> {
        for row in rows {
            writeln!(self.out, "{}", row.join(","))?;
            self.done.insert(self.key_of(row));
        }
        self.out.flush()?;
        Ok(())
    }
}

fn join_key(fields: &[&str], cols: &[usize]) -> String {
    cols.iter()
        .map(|&c| fields.get(c).copied().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn efficiency_row(s: &ExperimentSummary) -> Vec<String> {
    vec![
        s.dgp.label().to_string(),
        s.criterion.label().to_string(),
        fmt_f64(s.rho),
        s.t.to_string(),
        s.method.clone(),
        fmt_opt(s.bias),
        fmt_opt(s.variance),
        fmt_opt(s.mse),
        fmt_opt(s.re_est),
        fmt_opt(s.lag_median),
        fmt_opt(s.lag_mean),
        s.reps_used.to_string(),
    ]
}

pub fn size_row(s: &ExperimentSummary) -> Vec<String> {
    vec![
        s.dgp.label().to_string(),
        s.criterion.label().to_string(),
        fmt_f64(s.rho),
        s.t.to_string(),
        s.method.clone(),
        fmt_opt(s.rejection),
        fmt_opt(s.mc_se),
    ]
}

pub fn power_row(s: &ExperimentSummary) -> Vec<String> {
    vec![
        s.dgp.label().to_string(),
        s.criterion.label().to_string(),
        fmt_f64(s.rho),
        s.t.to_string(),
        s.method.clone(),
        fmt_f64(s.beta_true),
        fmt_opt(s.rejection),
    ]
}

pub fn surface_row(p: &SurfacePoint) -> Vec<String> {
    vec![
        fmt_f64(p.rho),
        p.t.to_string(),
        p.method.clone(),
        fmt_f64(p.size_distortion),
    ]
}

pub fn weak_exo_row(s: &ExperimentSummary) -> Vec<String> {
    vec![
        s.t.to_string(),
        s.method.clone(),
        fmt_opt(s.bias),
        fmt_opt(s.variance),
        fmt_opt(s.mse),
        fmt_opt(s.re_est),
        fmt_opt(s.lag_median),
        fmt_opt(s.lag_mean),
        fmt_f64(s.beta_true),
        fmt_opt(s.rejection),
        fmt_opt(s.mc_se),
        s.reps_used.to_string(),
    ]
}

pub fn forecast_row(r: &ForecastRow) -> Vec<String> {
    vec![
        r.t.to_string(),
        fmt_f64(r.rho),
        fmt_f64(r.result.mspe_subopt),
        fmt_f64(r.result.mspe_opt),
        fmt_f64(r.result.re_pred),
        fmt_opt(r.analytic_re_pred),
        r.result.reps_used.to_string(),
    ]
}

/// Experiment families that write CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `efficiency.csv` and `size.csv` from the same replications.
    Table,
    Power,
    Surface,
    WeakExo,
    Forecast,
}

/// A cell with at least one failed replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub cell: String,
    pub failed_reps: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub cells_run: usize,
    pub cells_skipped: usize,
    pub failures: Vec<CellFailure>,
}

impl RunReport {
    fn note(&mut self, label: String, cell: &CellOutcome) {
        self.cells_run += 1;
        if cell.failed_reps > 0 {
            self.failures.push(CellFailure {
                cell: label,
                failed_reps: cell.failed_reps,
                message: cell
                    .first_error
                    .as_ref()
                    .map(ToString::to_string)
                    .unwrap_or_default(),
            });
        }
    }
}

/// Runs `family` over the configured grid, appending each finished cell to
/// its CSV file in `out_dir`. With `resume`, cells already present are
/// skipped. `progress` receives one line per cell.
pub fn run_to_dir(
    family: Family,
    config: &ExperimentConfig,
    out_dir: &Path,
    resume: bool,
    progress: &mut dyn FnMut(&str),
) -> Result<RunReport> {
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let pool = config.thread_pool()?;
    let mut report = RunReport::default();
    let dgp = config.dgp.label();
    let crit = config.criterion.label();

    match family {
        Family::Table => {
            let mut eff = CsvTable::open(
                &out_dir.join("efficiency.csv"),
                EFFICIENCY_HEADER,
                &[0, 1, 2, 3],
                resume,
            )?;
            let mut size = CsvTable::open(
                &out_dir.join("size.csv"),
                SIZE_HEADER,
                &[0, 1, 2, 3],
                resume,
            )?;
            report.files = vec![eff.path().to_path_buf(), size.path().to_path_buf()];
            for &t in &config.ts {
                for &rho in &config.rhos {
                    let key = format!("{dgp},{crit},{},{t}", fmt_f64(rho));
                    let (eff_done, size_done) = (eff.is_done(&key), size.is_done(&key));
                    let label = format!("dgp={dgp} rho={} T={t}", fmt_f64(rho));
                    if eff_done && size_done {
                        report.cells_skipped += 1;
                        continue;
                    }
                    let cell = pool.install(|| run_cell(config, rho, t, config.null_value))?;
                    if !eff_done {
                        let rows: Vec<_> = estimation_summaries(&cell)
                            .iter()
                            .map(efficiency_row)
                            .collect();
                        eff.write_cell(&rows)?;
                    }
                    if !size_done {
                        let rows: Vec<_> =
                            rejection_summaries(&cell).iter().map(size_row).collect();
                        size.write_cell(&rows)?;
                    }
                    progress(&label);
                    report.note(label, &cell);
                }
            }
        }
        Family::Power => {
            let mut table = CsvTable::open(
                &out_dir.join("power.csv"),
                POWER_HEADER,
                &[0, 1, 2, 3, 5],
                resume,
            )?;
            report.files = vec![table.path().to_path_buf()];
            for &t in &config.ts {
                for &rho in &config.rhos {
                    for &beta in &config.beta_grid {
                        let key = format!("{dgp},{crit},{},{t},{}", fmt_f64(rho), fmt_f64(beta));
                        let label = format!(
                            "dgp={dgp} rho={} T={t} beta={}",
                            fmt_f64(rho),
                            fmt_f64(beta)
                        );
                        if table.is_done(&key) {
                            report.cells_skipped += 1;
                            continue;
                        }
                        let cell = pool.install(|| run_cell(config, rho, t, beta))?;
                        let rows: Vec<_> =
                            rejection_summaries(&cell).iter().map(power_row).collect();
                        table.write_cell(&rows)?;
                        progress(&label);
                        report.note(label, &cell);
                    }
                }
            }
        }
        Family::Surface => {
            let mut table = CsvTable::open(
                &out_dir.join("surface.csv"),
                SURFACE_HEADER,
                &[0, 1],
                resume,
            )?;
            report.files = vec![table.path().to_path_buf()];
            for &t in &config.ts {
                for &rho in &config.rhos {
                    let key = format!("{},{t}", fmt_f64(rho));
                    let label = format!("dgp={dgp} rho={} T={t}", fmt_f64(rho));
                    if table.is_done(&key) {
                        report.cells_skipped += 1;
                        continue;
                    }
                    let cell = pool.install(|| run_cell(config, rho, t, config.null_value))?;
                    let rows: Vec<_> = surface_points(&cell, config.level)
                        .iter()
                        .map(surface_row)
                        .collect();
                    table.write_cell(&rows)?;
                    progress(&label);
                    report.note(label, &cell);
                }
            }
        }
        Family::WeakExo => {
            let cfg = weak_exo_config(config);
            let mut table = CsvTable::open(
                &out_dir.join("weakexo.csv"),
                WEAK_EXO_HEADER,
                &[0, 8],
                resume,
            )?;
            report.files = vec![table.path().to_path_buf()];
            for &t in &cfg.ts {
                for &beta in &super::WEAK_EXO_BETAS {
                    let key = format!("{t},{}", fmt_f64(beta));
                    let label = format!("dgp=weakexo T={t} beta={}", fmt_f64(beta));
                    if table.is_done(&key) {
                        report.cells_skipped += 1;
                        continue;
                    }
                    let cell = pool.install(|| run_cell(&cfg, 0.0, t, beta))?;
                    let rows: Vec<_> = combined_summaries(&cell).iter().map(weak_exo_row).collect();
                    table.write_cell(&rows)?;
                    progress(&label);
                    report.note(label, &cell);
                }
            }
        }
        Family::Forecast => {
            let mut table = CsvTable::open(
                &out_dir.join("forecast.csv"),
                FORECAST_HEADER,
                &[0, 1],
                resume,
            )?;
            report.files = vec![table.path().to_path_buf()];
            for &t in &config.ts {
                for &rho in &config.rhos {
                    let key = format!("{t},{}", fmt_f64(rho));
                    let label = format!("dgp={dgp} rho={} T={t}", fmt_f64(rho));
                    if table.is_done(&key) {
                        report.cells_skipped += 1;
                        continue;
                    }
                    let row = pool.install(|| forecast_cell(config, rho, t))?;
                    table.write_cell(&[forecast_row(&row)])?;
                    progress(&label);
                    report.cells_run += 1;
                    if row.result.failed_reps > 0 {
                        report.failures.push(CellFailure {
                            cell: label,
                            failed_reps: row.result.failed_reps,
                            message: "forecast replications failed".into(),
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}
