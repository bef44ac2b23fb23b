//! Runs that leave their results on disk, and parameter sweeps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::config::SimConfig;
use crate::diagnostics::{detect_turning_points, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::fields::vorticity;
use crate::io::tables::{fmt_num, write_snapshot, write_timeseries};
use crate::solver::run_with;

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const CONFIG_FILE: &str = "config.txt";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Headline numbers of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub t_final: f64,
    pub turning_points: Vec<f64>,
    pub peak_max_v: f64,
    pub peak_t: f64,
    pub peak_max_w: f64,
}

impl RunSummary {
    pub fn from_records(records: &[DiagnosticsRecord<f64>], jump: f64, steps: usize) -> Self {
        let peak = records
            .iter()
            .fold(None::<&DiagnosticsRecord<f64>>, |best, r| match best {
                Some(b) if b.max_v >= r.max_v => Some(b),
                _ => Some(r),
            });
        RunSummary {
            steps,
            t_final: records.last().map_or(0.0, |r| r.t),
            turning_points: detect_turning_points(records, jump),
            peak_max_v: peak.map_or(0.0, |r| r.max_v),
            peak_t: peak.map_or(0.0, |r| r.t),
            peak_max_w: records.iter().map(|r| r.max_w).fold(0.0, f64::max),
        }
    }

    pub fn to_text(&self) -> String {
        let list = self.turning_points.iter().map(|&t| fmt_num(t)).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let _ = writeln!(s, "steps = {}", self.steps);
        let _ = writeln!(s, "t_final = {}", fmt_num(self.t_final));
        let _ = writeln!(s, "turning_points = {list}");
        let _ = writeln!(s, "peak_max_v = {}", fmt_num(self.peak_max_v));
        let _ = writeln!(s, "peak_t = {}", fmt_num(self.peak_t));
        let _ = writeln!(s, "peak_max_w = {}", fmt_num(self.peak_max_w));
        s
    }
}

/// Files written by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub timeseries: PathBuf,
    /// Requested snapshot time and the file holding the nearest step.
    pub snapshots: Vec<(f64, PathBuf)>,
    pub config_echo: PathBuf,
    pub summary_path: PathBuf,
    pub summary: RunSummary,
}

/// Runs `config` and writes its artifacts to the resolved output directory.
pub fn run_artifacts(config: &SimConfig) -> Result<RunArtifacts> {
    run_to_dir(config, &config.resolved_out_dir())
}

/// Runs `config` and writes its artifacts to `dir`.
///
/// Snapshots are taken at the step nearest each requested time; requests
/// beyond `t_end` are skipped.
pub fn run_to_dir(config: &SimConfig, dir: &Path) -> Result<RunArtifacts> {
    config.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let config_echo = dir.join(CONFIG_FILE);
    fs::write(&config_echo, config.echo()).map_err(|e| Error::io(&config_echo, e))?;

    let half = 0.5 * config.tau;
    let mut pending: Vec<f64> = config
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t <= config.t_end + half)
        .collect();
    pending.sort_by(f64::total_cmp);
    pending.dedup();
    let mut snapshots = Vec::new();
    let out = run_with::<f64, _>(config, |_, grid, state| {
        while let Some(&ts) = pending.first() {
            if state.t + half < ts {
                break;
            }
            let path = dir.join(format!("snapshot_t{ts:.4}.csv"));
            write_snapshot(state, &vorticity(state, grid), grid, &path)?;
            snapshots.push((ts, path));
            pending.remove(0);
        }
        Ok(())
    })?;

    let timeseries = dir.join(TIMESERIES_FILE);
    write_timeseries(&out.records, &timeseries)?;
    let summary = RunSummary::from_records(&out.records, config.jump_threshold, config.steps());
    let summary_path = dir.join(SUMMARY_FILE);
    fs::write(&summary_path, summary.to_text()).map_err(|e| Error::io(&summary_path, e))?;
    Ok(RunArtifacts {
        dir: dir.to_path_buf(),
        timeseries,
        snapshots,
        config_echo,
        summary_path,
        summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwirlChoice {
    On,
    Off,
    Both,
}

impl SwirlChoice {
    pub fn values(self) -> &'static [bool] {
        match self {
            SwirlChoice::On => &[true],
            SwirlChoice::Off => &[false],
            SwirlChoice::Both => &[true, false],
        }
    }
}

/// Name of the sweep subdirectory for one cell.
pub fn cell_name(re: f64, swirl: bool) -> String {
    format!("re{re}_{}", if swirl { "swirl" } else { "noswirl" })
}

#[derive(Debug)]
pub struct SweepCell {
    pub re: f64,
    pub swirl: bool,
    pub dir: PathBuf,
    pub outcome: Result<RunArtifacts>,
}

pub const SWEEP_FILE: &str = "sweep.csv";

/// Runs every `(re, swirl)` combination in its own subdirectory of the
/// resolved output directory, up to one cell per available core at a time.
/// Failed cells are recorded, not propagated; `sweep.csv` lists the outcome
/// of each cell.
pub fn sweep(config: &SimConfig, re_list: &[f64], swirl: &[bool]) -> Result<Vec<SweepCell>> {
    if re_list.is_empty() || swirl.is_empty() {
        return Err(Error::Parameter("sweep needs at least one Re and one swirl setting".into()));
    }
    let base = config.resolved_out_dir();
    let jobs: Vec<(f64, bool, PathBuf)> = re_list
        .iter()
        .flat_map(|&re| swirl.iter().map(move |&sw| (re, sw)))
        .map(|(re, sw)| (re, sw, base.join(cell_name(re, sw))))
        .collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len());
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(jobs.len()));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some((re, sw, dir)) = jobs.get(k) else { break };
                let mut c = config.clone();
                c.re = *re;
                c.swirl = *sw;
                c.out_dir = dir.clone();
                let outcome = run_to_dir(&c, dir);
                let cell = SweepCell { re: *re, swirl: *sw, dir: dir.clone(), outcome };
                done.lock().unwrap_or_else(|e| e.into_inner()).push((k, cell));
            });
        }
    });
    let mut done = done.into_inner().unwrap_or_else(|e| e.into_inner());
    done.sort_by_key(|(k, _)| *k);
    let cells: Vec<SweepCell> = done.into_iter().map(|(_, c)| c).collect();
    let mut table = String::from("re,swirl,status,detail\n");
    for c in &cells {
        let (status, detail) = match &c.outcome {
            Ok(a) => ("ok", format!("peak_max_v={}", fmt_num(a.summary.peak_max_v))),
            Err(e) => ("failed", e.to_string().replace([',', '\n'], ";")),
        };
        let _ = writeln!(table, "{},{},{status},{detail}", c.re, c.swirl);
    }
    fs::create_dir_all(&base).map_err(|e| Error::io(&base, e))?;
    let path = base.join(SWEEP_FILE);
    fs::write(&path, table).map_err(|e| Error::io(&path, e))?;
    Ok(cells)
}
