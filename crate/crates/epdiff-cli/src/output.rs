//! File writers: diagnostics CSV, coefficient snapshots, summaries, and the
//! optional gnuplot script. All numeric CSV fields use 17-significant-digit
//! scientific notation so regression diffs are meaningful.

use anyhow::{Context, Result};
use epdiff_core::solver::{BlowupVerdict, Snapshot, Termination, Trajectory};
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_diagnostics_csv(dir: &Path, trajectory: &Trajectory) -> Result<()> {
    let mut out = String::from("t,energy,h12,h32,h2,sup_u,sup_ux,dt,tail_fraction\n");
    for r in &trajectory.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt(r.t),
            fmt(r.energy),
            fmt(r.h12),
            fmt(r.h32),
            fmt(r.h2),
            fmt(r.sup_u),
            fmt(r.sup_ux),
            fmt(r.dt),
            fmt(r.tail_fraction),
        ));
    }
    fs::write(dir.join("diagnostics.csv"), out).context("writing diagnostics.csv")
}

#[derive(Serialize)]
struct SnapshotDump<'a> {
    t: f64,
    bandwidth: usize,
    coeffs: Vec<[f64; 2]>,
    #[serde(skip)]
    _marker: std::marker::PhantomData<&'a ()>,
}

pub fn write_snapshots(dir: &Path, snapshots: &[Snapshot]) -> Result<()> {
    let snap_dir = dir.join("snapshots");
    fs::create_dir_all(&snap_dir)?;
    for (i, s) in snapshots.iter().enumerate() {
        let dump = SnapshotDump {
            t: s.t,
            bandwidth: s.u.bandwidth(),
            coeffs: s.u.half_coeffs().iter().map(|c| [c.re, c.im]).collect(),
            _marker: std::marker::PhantomData,
        };
        let path = snap_dir.join(format!("snap_{i:06}.json"));
        fs::write(&path, serde_json::to_string(&dump)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[derive(Serialize)]
pub struct RunSummary<'a> {
    pub operator: &'a str,
    pub bandwidth: usize,
    pub horizon: f64,
    pub u0: &'a str,
    pub termination: Termination,
    pub verdict: BlowupVerdict,
    pub t_event: Option<f64>,
    pub steps: usize,
    pub t_final: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub energy_drift_rel: f64,
    pub max_sup_ux: f64,
    pub max_tail_fraction: f64,
    pub probes: Option<&'a epdiff_core::solver::ProbeSummary>,
}

pub fn summarize<'a>(
    trajectory: &'a Trajectory,
    operator: &'a str,
    bandwidth: usize,
    horizon: f64,
    u0: &'a str,
) -> RunSummary<'a> {
    let records = &trajectory.records;
    let e0 = records.first().map(|r| r.energy).unwrap_or(0.0);
    let e_end = records.last().map(|r| r.energy).unwrap_or(0.0);
    let drift = if e0 > 0.0 {
        records
            .iter()
            .map(|r| (r.energy - e0).abs() / e0)
            .fold(0.0f64, f64::max)
    } else {
        0.0
    };
    RunSummary {
        operator,
        bandwidth,
        horizon,
        u0,
        termination: trajectory.termination,
        verdict: trajectory.verdict,
        t_event: trajectory.t_event,
        steps: records.len().saturating_sub(1),
        t_final: records.last().map(|r| r.t).unwrap_or(0.0),
        energy_initial: e0,
        energy_final: e_end,
        energy_drift_rel: drift,
        max_sup_ux: records.iter().map(|r| r.sup_ux).fold(0.0f64, f64::max),
        max_tail_fraction: records
            .iter()
            .map(|r| r.tail_fraction)
            .fold(0.0f64, f64::max),
        probes: trajectory.probes.as_ref(),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// A small gnuplot script next to the data (plot rendering itself is out of
/// scope).
pub fn write_plot_script(dir: &Path) -> Result<()> {
    let script = "\
set datafile separator ','
set terminal pngcairo size 1280,800
set output 'diagnostics.png'
set key outside
set multiplot layout 2,2
set logscale y
plot 'diagnostics.csv' using 1:7 with lines title 'sup|u_x|'
unset logscale y
plot 'diagnostics.csv' using 1:2 with lines title 'energy'
plot 'diagnostics.csv' using 1:9 with lines title 'tail fraction'
plot 'diagnostics.csv' using 1:4 with lines title 'H^{3/2} norm'
unset multiplot
";
    fs::write(dir.join("plot.gp"), script).context("writing plot.gp")
}

pub fn print_report_table(reports: &[epdiff_core::verify::EstimateReport]) {
    println!(
        "{:<18} {:>14} {:>14} {:>10} {:>6}  witness",
        "check", "lhs", "rhs_bound", "ratio", "pass"
    );
    for r in reports {
        println!(
            "{:<18} {:>14.6e} {:>14.6e} {:>10.4} {:>6}  {}",
            r.name,
            r.lhs,
            r.rhs_bound,
            r.ratio,
            if r.pass { "ok" } else { "FAIL" },
            r.witness
        );
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

pub fn write_phase_csv(path: &Path, rows: &[(f64, String, Option<f64>, f64)]) -> Result<()> {
    let mut out = String::from("s,verdict,t_event,max_sup_ux\n");
    for (s, verdict, t_event, max_sup) in rows {
        let te = t_event.map(fmt).unwrap_or_default();
        out.push_str(&format!("{},{verdict},{te},{}\n", fmt(*s), fmt(*max_sup)));
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}
