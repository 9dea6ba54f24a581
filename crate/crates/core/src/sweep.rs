//! Parameter sweeps, CSV emission, peak detection and plot-script generation.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::liouvillian::phonon_diagonal_generator;
use crate::observables::{full_record, Distribution, ObservablesRecord};
use crate::params::{ExpansionOrder, FockCutoffs, SystemParams};
use crate::steady::{converge_cutoffs, steady_state_reduced, SolveReport, SolverOptions, DEFAULT_MAX_ROUNDS};

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Delta,
    Chi,
    Nbar,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(Self::Delta),
            "chi" => Ok(Self::Chi),
            "nbar" => Ok(Self::Nbar),
            other => Err(Error::InvalidSweep(format!(
                "unknown axis `{other}` (expected delta, chi or nbar)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Delta => "delta",
            Self::Chi => "chi",
            Self::Nbar => "nbar",
        }
    }

    fn apply(&self, base: &SystemParams, value: f64) -> SystemParams {
        let mut p = *base;
        match self {
            Self::Delta => p.delta = value,
            // omega = 1, so chi and g coincide.
            Self::Chi => p.g = value,
            Self::Nbar => p.nbar = value,
        }
        p
    }
}

/// Whether each point solves at fixed cutoffs or escalates until the
/// observables stabilize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    Fixed,
    Auto { obs_tol: f64 },
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub base: SystemParams,
    pub cutoffs: FockCutoffs,
    pub order: ExpansionOrder,
    pub policy: CutoffPolicy,
    /// Worker threads; 0 picks the rayon default.
    pub workers: usize,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if !(self.from <= self.to) || !self.from.is_finite() || !self.to.is_finite() {
            return Err(Error::InvalidSweep(format!(
                "need from <= to, got [{}, {}]",
                self.from, self.to
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidSweep(format!(
                "need at least 2 steps, got {}",
                self.steps
            )));
        }
        self.base.check_hard()?;
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| self.from + (self.to - self.from) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// One CSV row. Observables are `None` for failed points and for undefined
/// correlations; both serialize as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub delta: f64,
    pub chi: f64,
    pub nbar: f64,
    pub order_n: u32,
    pub n_max: Option<usize>,
    pub m_max: Option<usize>,
    pub mean_photon: Option<f64>,
    pub mean_phonon: Option<f64>,
    pub g2_a: Option<f64>,
    pub g2_b: Option<f64>,
    pub g3_b: Option<f64>,
    pub g4_b: Option<f64>,
    pub appendix_b_residual: Option<f64>,
    pub solver_residual: Option<f64>,
    pub converged: bool,
}

pub const CSV_HEADER: &str = "axis_value,delta,chi,nbar,order_N,n_max,m_max,mean_photon,mean_phonon,g2_a,g2_b,g3_b,g4_b,appendix_b_residual,solver_residual,converged";

fn fmt_opt_f(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn fmt_opt_u(v: Option<usize>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.axis_value,
            self.delta,
            self.chi,
            self.nbar,
            self.order_n,
            fmt_opt_u(self.n_max),
            fmt_opt_u(self.m_max),
            fmt_opt_f(self.mean_photon),
            fmt_opt_f(self.mean_phonon),
            fmt_opt_f(self.g2_a),
            fmt_opt_f(self.g2_b),
            fmt_opt_f(self.g3_b),
            fmt_opt_f(self.g4_b),
            fmt_opt_f(self.appendix_b_residual),
            fmt_opt_f(self.solver_residual),
            self.converged
        );
        s
    }
}

fn solve_point(
    spec: &SweepSpec,
    params: &SystemParams,
) -> Result<(SolveReport, ObservablesRecord)> {
    let opts = SolverOptions::default();
    let report = match spec.policy {
        CutoffPolicy::Fixed => {
            let red = phonon_diagonal_generator(params, spec.cutoffs, spec.order)?;
            steady_state_reduced(&red, &opts)?
        }
        CutoffPolicy::Auto { obs_tol } => converge_cutoffs(
            params,
            spec.order,
            spec.cutoffs,
            obs_tol,
            &opts,
            DEFAULT_MAX_ROUNDS,
        )?,
    };
    let dist = Distribution::from_density(&report.state, report.cutoffs_used)?;
    let rec = full_record(&dist, params);
    Ok((report, rec))
}

/// Runs the sweep. Points are independent; they are dispatched to a worker
/// pool and gathered in ascending axis order, so the output is identical for
/// any worker count. Failed points are recorded with `converged = false` and
/// blank observables.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid = spec.grid();

    let solve_one = |&x: &f64| -> SweepRow {
        let params = spec.axis.apply(&spec.base, x);
        let mut row = SweepRow {
            axis_value: x,
            delta: params.delta,
            chi: params.chi(),
            nbar: params.nbar,
            order_n: spec.order.0,
            n_max: None,
            m_max: None,
            mean_photon: None,
            mean_phonon: None,
            g2_a: None,
            g2_b: None,
            g3_b: None,
            g4_b: None,
            appendix_b_residual: None,
            solver_residual: None,
            converged: false,
        };
        if let Ok((report, rec)) = solve_point(spec, &params) {
            row.n_max = Some(report.cutoffs_used.n_max);
            row.m_max = Some(report.cutoffs_used.m_max);
            row.mean_photon = Some(rec.mean_photon);
            row.mean_phonon = Some(rec.mean_phonon);
            row.g2_a = rec.g2_a;
            row.g2_b = rec.g2_b;
            row.g3_b = rec.g3_b;
            row.g4_b = rec.g4_b;
            row.appendix_b_residual = rec.appendix_b_residual;
            row.solver_residual = Some(report.residual);
            row.converged = true;
        }
        row
    };

    let rows: Vec<SweepRow> = if spec.workers == 1 {
        grid.iter().map(solve_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| Error::InvalidSweep(format!("worker pool: {e}")))?;
        pool.install(|| grid.par_iter().map(solve_one).collect())
    };
    Ok(rows)
}

/// Writes the table in the fixed column order.
pub fn write_csv(rows: &[SweepRow], mut w: impl std::io::Write) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.to_csv_line())?;
    }
    Ok(())
}

/// Reads `(axis_value, column)` pairs back from a sweep CSV, skipping rows
/// where the requested column is blank.
pub fn read_series(path: impl AsRef<Path>, column: &str) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::EmptyTable)?;
    let cols: Vec<&str> = header.split(',').collect();
    let idx = cols
        .iter()
        .position(|c| *c == column)
        .ok_or_else(|| Error::InvalidSweep(format!("column `{column}` not in CSV header")))?;
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::InvalidSweep(format!(
                "line {}: expected {} fields, got {}",
                lineno + 2,
                cols.len(),
                fields.len()
            )));
        }
        let x: f64 = fields[0]
            .parse()
            .map_err(|_| Error::InvalidSweep(format!("bad axis value `{}`", fields[0])))?;
        if fields[idx].is_empty() {
            continue;
        }
        let y: f64 = fields[idx]
            .parse()
            .map_err(|_| Error::InvalidSweep(format!("bad value `{}`", fields[idx])))?;
        out.push((x, y));
    }
    Ok(out)
}

/// Detected maxima of a swept series.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    /// Axis positions of the maxima, strictly increasing.
    pub positions: Vec<f64>,
    /// Differences of consecutive positions.
    pub spacings: Vec<f64>,
    /// Mean spacing: the Kerr scale omega chi^2 for detuning sweeps.
    pub inferred_kerr: Option<f64>,
    /// sqrt(mean spacing) in units of omega.
    pub inferred_g: Option<f64>,
}

pub const DEFAULT_PROMINENCE: f64 = 0.05;

/// Local maxima by three-point comparison, filtered by topographic prominence
/// relative to the series range. Scale-invariant in y.
pub fn detect_peaks(series: &[(f64, f64)], prominence_frac: f64) -> Result<PeakReport> {
    if series.len() < 5 {
        return Err(Error::InvalidSweep(format!(
            "peak detection needs at least 5 points, got {}",
            series.len()
        )));
    }
    if series.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidSweep(
            "series must be strictly increasing in x".into(),
        ));
    }
    let y: Vec<f64> = series.iter().map(|p| p.1).collect();
    let y_min = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let y_max = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = y_max - y_min;
    let threshold = prominence_frac * range;

    let mut positions = Vec::new();
    for i in 1..y.len() - 1 {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        // Topographic prominence: walk out to the first higher point on each
        // side, tracking the deepest valley on the way.
        let mut left_min = y[i];
        for j in (0..i).rev() {
            left_min = left_min.min(y[j]);
            if y[j] > y[i] {
                break;
            }
        }
        let mut right_min = y[i];
        for &v in y.iter().skip(i + 1) {
            right_min = right_min.min(v);
            if v > y[i] {
                break;
            }
        }
        let prominence = y[i] - left_min.max(right_min);
        if prominence >= threshold && range > 0.0 {
            positions.push(series[i].0);
        }
    }

    let spacings: Vec<f64> = positions.windows(2).map(|w| w[1] - w[0]).collect();
    let (inferred_kerr, inferred_g) = if spacings.is_empty() {
        (None, None)
    } else {
        let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
        (Some(mean), Some(mean.sqrt()))
    };
    Ok(PeakReport {
        positions,
        spacings,
        inferred_kerr,
        inferred_g,
    })
}

/// Writes the CSV beside a self-contained plotting script that renders
/// mean-occupation and correlation panels against the sweep axis, one curve
/// per (nbar, order) group found in the file.
pub fn emit_plot_script(
    rows: &[SweepRow],
    axis: SweepAxis,
    csv_path: impl AsRef<Path>,
    script_path: impl AsRef<Path>,
) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let csv_path = csv_path.as_ref();
    let mut file = std::fs::File::create(csv_path)?;
    write_csv(rows, &mut file)?;
    file.flush()?;

    let csv_name = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| csv_path.display().to_string());
    let script = format!(
        r#"#!/usr/bin/env python3
"""Renders the sweep CSV written next to this script."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(os.path.abspath(__file__)), "{csv_name}")
rows = []
with open(path) as fh:
    for row in csv.DictReader(fh):
        if row["converged"] != "true":
            continue
        rows.append(row)
if not rows:
    raise SystemExit("no converged rows in " + path)

panels = [
    ("mean_photon", "mean photon number"),
    ("mean_phonon", "mean phonon number"),
    ("g2_a", "g2_a(0)"),
    ("g2_b", "g2_b(0)"),
]
groups = sorted({{(r["nbar"], r["order_N"]) for r in rows}})
fig, axes = plt.subplots(2, 2, figsize=(9, 7), sharex=True)
for ax, (col, label) in zip(axes.flat, panels):
    for nbar, order in groups:
        pts = [(float(r["axis_value"]), float(r[col]))
               for r in rows
               if r["nbar"] == nbar and r["order_N"] == order and r[col] != ""]
        if not pts:
            continue
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                label=f"nbar={{nbar}}, N={{order}}")
    ax.set_ylabel(label)
    ax.grid(alpha=0.3)
for ax in axes[1]:
    ax.set_xlabel("{axis}")
axes[0][0].legend(fontsize=8)
fig.tight_layout()
out = os.path.splitext(path)[0] + ".png"
fig.savefig(out, dpi=160)
print("wrote", out)
"#,
        csv_name = csv_name,
        axis = axis.name(),
    );
    std::fs::write(script_path.as_ref(), script)?;
    Ok(())
}
