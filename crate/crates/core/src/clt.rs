//! The iteration-mollification ladder `M^i` applied to a 1-stable seed and
//! its convergence towards the dyadic heat semigroup.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{haar_forward, GridFunction, GridLayout, HaarIndex, LpExponent};
use crate::io::{create, format_float, write_json};
use crate::kernel::{KernelSpec, Window};
use crate::spectral::{apply_kernel, heat_solve, OperatorPlan, ScalingMode};

/// Relative tolerance on the seed's stability parameter against `2t/3`.
pub const DEFAULT_STABILITY_GATE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CltConfig {
    pub t: f64,
    pub i_max: u32,
    pub j_range: Window,
    pub layout: GridLayout,
    pub p: Vec<LpExponent>,
    pub stability_gate: f64,
    /// Skip the stability gate.
    pub assume_stable: bool,
}

impl Default for CltConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            i_max: 20,
            j_range: Window { lo: -6, hi: 6 },
            layout: GridLayout { jd: 4, jr: 8 },
            p: vec![LpExponent::Finite(1.0), LpExponent::Finite(2.0), LpExponent::Infinity],
            stability_gate: DEFAULT_STABILITY_GATE,
            assume_stable: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub i: u32,
    pub j: i32,
    /// `(Λ_{j-i})^{2^i}`.
    pub lambda_mi: f64,
    /// `e^{-t 2^j}`.
    pub target: f64,
    pub abs_err: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpRow {
    pub i: u32,
    pub p: LpExponent,
    pub lp_err: f64,
}

/// `‖v_i - u(·, t)‖_2` computed from Haar coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsevalRow {
    pub i: u32,
    pub l2_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedDescriptor {
    pub window: Window,
    pub sigma_declared: Option<f64>,
    pub sigma_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltMetadata {
    pub i_max: u32,
    pub j_range: Window,
    pub grid: GridLayout,
    pub stability_gate: f64,
    pub assume_stable: bool,
    /// First `i` after which `max_j abs_err` never increases.
    pub i0: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub t: f64,
    pub seed: SeedDescriptor,
    pub rows: Vec<EigenRow>,
    pub lp_rows: Vec<LpRow>,
    pub parseval: Vec<ParsevalRow>,
    pub metadata: CltMetadata,
}

impl CltReport {
    /// `ε_i = max_j abs_err(i, j)`, indexed by `i - 1`.
    pub fn max_errors(&self) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = Vec::new();
        for r in &self.rows {
            match out.last_mut() {
                Some((i, e)) if *i == r.i => *e = e.max(r.abs_err),
                _ => out.push((r.i, r.abs_err)),
            }
        }
        out
    }

    pub fn lp_errors(&self, p: LpExponent) -> Vec<(u32, f64)> {
        self.lp_rows.iter().filter(|r| r.p == p).map(|r| (r.i, r.lp_err)).collect()
    }
}

fn first_monotone_index(errors: &[(u32, f64)]) -> Option<u32> {
    let mut start = errors.len().checked_sub(1)?;
    while start > 0 && errors[start].1 <= errors[start - 1].1 {
        start -= 1;
    }
    Some(errors[start].0)
}

/// The default initial datum `h^0_0`.
pub fn default_initial(layout: GridLayout) -> Result<GridFunction> {
    GridFunction::haar(layout, HaarIndex::new(0, 0))
}

/// Checks the seed against `σ = 2t/3` unless `assume_stable` is set.
pub fn stability_gate(seed: &KernelSpec, config: &CltConfig) -> Result<Option<f64>> {
    let expected = 2.0 * config.t / 3.0;
    match seed.stability_estimate() {
        Ok(r) => {
            let ok = r.converged && ((r.sigma_estimate - expected) / expected).abs() <= config.stability_gate;
            if !ok && !config.assume_stable {
                return Err(Error::SeedNotStable { estimated: r.sigma_estimate, expected });
            }
            Ok(Some(r.sigma_estimate))
        }
        Err(_) if config.assume_stable => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs `M^1, …, M^{i_max}` on the seed and compares with the heat semigroup at time `t`.
pub fn run_clt(seed: &KernelSpec, config: &CltConfig, u0: &GridFunction) -> Result<CltReport> {
    if !(config.t > 0.0) || !config.t.is_finite() {
        return Err(Error::Domain(format!("t = {} must be positive", config.t)));
    }
    if u0.layout() != config.layout {
        return Err(Error::LayoutMismatch("initial datum does not match the grid".into()));
    }
    let lowest = config.j_range.lo.min(config.layout.min_level()) - config.i_max as i32;
    if seed.window().lo > lowest {
        return Err(Error::IncompatibleWindows(format!(
            "seed window starts at {}, the ladder reads eigenvalues down to {lowest}",
            seed.window().lo
        )));
    }
    let sigma_estimate = stability_gate(seed, config)?;

    let t = config.t;
    let target = |j: i32| (-t * (j as f64).exp2()).exp();
    let heat = heat_solve(1.0, t, u0)?;
    let u0_coeffs = haar_forward(u0);

    let levels: Vec<(Vec<EigenRow>, Vec<LpRow>, ParsevalRow)> = (1..=config.i_max)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let m = seed.clt_step(i)?;
            let rows = config
                .j_range
                .indices()
                .map(|j| {
                    let lambda_mi = m.lambda(j);
                    let target = target(j);
                    EigenRow { i, j, lambda_mi, target, abs_err: (lambda_mi - target).abs(), gamma: seed.gamma_diag(i as i32, j) }
                })
                .collect();
            let plan = OperatorPlan::new(m.clone(), ScalingMode::Carry, config.layout)?;
            let diff = &apply_kernel(&plan, u0)? - &heat;
            let lp_rows = config
                .p
                .iter()
                .map(|&p| Ok(LpRow { i, p, lp_err: diff.lp_norm(p)? }))
                .collect::<Result<Vec<_>>>()?;
            let energy: f64 = u0_coeffs
                .iter()
                .map(|(idx, c)| {
                    let d = (m.lambda(idx.level) - target(idx.level)) * c;
                    d * d
                })
                .sum();
            Ok((rows, lp_rows, ParsevalRow { i, l2_err: energy.sqrt() }))
        })
        .collect::<Result<_>>()?;

    let mut report = CltReport {
        t,
        seed: SeedDescriptor { window: seed.window(), sigma_declared: seed.sigma(), sigma_estimate },
        rows: Vec::new(),
        lp_rows: Vec::new(),
        parseval: Vec::new(),
        metadata: CltMetadata {
            i_max: config.i_max,
            j_range: config.j_range,
            grid: config.layout,
            stability_gate: config.stability_gate,
            assume_stable: config.assume_stable,
            i0: None,
        },
    };
    for (rows, lp_rows, parseval) in levels {
        report.rows.extend(rows);
        report.lp_rows.extend(lp_rows);
        report.parseval.push(parseval);
    }
    report.metadata.i0 = first_monotone_index(&report.max_errors());
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Parse(format!("unknown report format {s:?}"))),
        }
    }
}

/// Companion path of the `i,p,lp_err` table: `<stem>_lp.csv`.
pub fn lp_table_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}_lp.csv"))
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let to_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(to_err)?;
    for r in rows {
        w.write_record(&r).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the report. CSV output goes to `path` (eigenvalue table) and
/// [`lp_table_path`] (L^p table); JSON output is a single file.
pub fn emit_report(report: &CltReport, format: ReportFormat, path: &Path) -> Result<()> {
    match format {
        ReportFormat::Json => write_json(path, report),
        ReportFormat::Csv => {
            write_csv(
                path,
                &["i", "j", "lambda_mi", "target", "abs_err", "gamma"],
                report.rows.iter().map(|r| {
                    vec![
                        r.i.to_string(),
                        r.j.to_string(),
                        format_float(r.lambda_mi),
                        format_float(r.target),
                        format_float(r.abs_err),
                        format_float(r.gamma),
                    ]
                }),
            )?;
            write_csv(
                &lp_table_path(path),
                &["i", "p", "lp_err"],
                report.lp_rows.iter().map(|r| vec![r.i.to_string(), r.p.to_string(), format_float(r.lp_err)]),
            )
        }
    }
}
