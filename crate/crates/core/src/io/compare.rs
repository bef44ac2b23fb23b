//! Comparison of the time series of two runs.

use std::fmt;
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::io::runs::TIMESERIES_FILE;
use crate::io::tables::read_timeseries;

/// `max_v` correlation at or above which two runs count as qualitatively similar.
pub const SIMILARITY_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesComparison {
    pub correlation: f64,
    pub max_abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub samples: usize,
    pub max_v: SeriesComparison,
    pub dist_axis: SeriesComparison,
}

impl CompareReport {
    pub fn similar(&self) -> bool {
        self.max_v.correlation >= SIMILARITY_THRESHOLD
    }
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples = {}", self.samples)?;
        for (name, c) in [("max_v", self.max_v), ("dist_axis", self.dist_axis)] {
            writeln!(f, "{name}_correlation = {:.6}", c.correlation)?;
            writeln!(f, "{name}_max_abs_diff = {:.6e}", c.max_abs_diff)?;
        }
        write!(
            f,
            "verdict = {}",
            if self.similar() { "qualitatively similar" } else { "not similar" }
        )
    }
}

/// Pearson correlation. Two constant series correlate perfectly; a constant
/// series against a varying one has correlation 0.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    if a.is_empty() {
        return 0.0;
    }
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    match (saa > 0.0, sbb > 0.0) {
        (true, true) => (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0),
        (false, false) => 1.0,
        _ => 0.0,
    }
}

/// Piecewise-linear value of `(ts, vs)` at `t`, constant beyond the ends.
fn lerp_at(ts: &[f64], vs: &[f64], t: f64) -> f64 {
    let k = ts.partition_point(|&x| x <= t);
    if k == 0 {
        return vs[0];
    }
    if k == ts.len() {
        return vs[ts.len() - 1];
    }
    let (t0, t1) = (ts[k - 1], ts[k]);
    let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
    vs[k - 1] + s * (vs[k] - vs[k - 1])
}

/// Compares two series on the time grid of the coarser one (fewer records per
/// unit time), restricted to the common time interval.
pub fn compare_series(a: &[DiagnosticsRecord<f64>], b: &[DiagnosticsRecord<f64>]) -> Result<CompareReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Parameter("cannot compare an empty time series".into()));
    }
    let density = |s: &[DiagnosticsRecord<f64>]| {
        let span = s[s.len() - 1].t - s[0].t;
        if span > 0.0 { s.len() as f64 / span } else { f64::INFINITY }
    };
    let (coarse, fine) = if density(a) <= density(b) { (a, b) } else { (b, a) };
    let lo = a[0].t.max(b[0].t);
    let hi = a[a.len() - 1].t.min(b[b.len() - 1].t);
    let grid: Vec<&DiagnosticsRecord<f64>> = coarse.iter().filter(|r| r.t >= lo - 1e-12 && r.t <= hi + 1e-12).collect();
    if grid.is_empty() {
        return Err(Error::Parameter("time series do not overlap".into()));
    }
    let ft: Vec<f64> = fine.iter().map(|r| r.t).collect();
    let cmp = |get: fn(&DiagnosticsRecord<f64>) -> f64| {
        let fv: Vec<f64> = fine.iter().map(get).collect();
        let x: Vec<f64> = grid.iter().map(|r| get(r)).collect();
        let y: Vec<f64> = grid.iter().map(|r| lerp_at(&ft, &fv, r.t)).collect();
        SeriesComparison {
            correlation: pearson(&x, &y),
            max_abs_diff: x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max),
        }
    };
    Ok(CompareReport {
        samples: grid.len(),
        max_v: cmp(|r| r.max_v),
        dist_axis: cmp(|r| r.dist_axis),
    })
}

/// Compares the time series stored in two run directories.
pub fn compare_runs(dir_a: &Path, dir_b: &Path) -> Result<CompareReport> {
    let a = read_timeseries(&dir_a.join(TIMESERIES_FILE))?;
    let b = read_timeseries(&dir_b.join(TIMESERIES_FILE))?;
    compare_series(&a, &b)
}
