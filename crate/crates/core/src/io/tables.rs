//! Time series and snapshot files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::fields::VorticityField;
use crate::grid::MeridianGrid;
use crate::real::Real;
use crate::state::FieldState;

pub const TIMESERIES_HEADER: &str = "t,max_v,arg_r,arg_z,dist_axis,min_core_uz,max_core_uz,energy,max_w";
pub const SNAPSHOT_HEADER: &str = "r,z,u_r,u_theta,u_z,p,w_r,w_theta,w_z";

/// Nine significant digits in scientific notation; negative zero prints as zero.
pub fn fmt_num(x: f64) -> String {
    format!("{:.8e}", x + 0.0)
}

fn push_row(out: &mut String, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        let _ = write!(out, "{:.8e}", v + 0.0);
    }
    out.push('\n');
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn timeseries_text<T: Real>(records: &[DiagnosticsRecord<T>]) -> String {
    let mut out = String::with_capacity(128 * (records.len() + 1));
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for r in records {
        let v = [r.t, r.max_v, r.arg_r, r.arg_z, r.dist_axis, r.min_core_uz, r.max_core_uz, r.energy, r.max_w];
        push_row(&mut out, &v.map(|x| x.to_f64_lossy()));
    }
    out
}

pub fn write_timeseries<T: Real>(records: &[DiagnosticsRecord<T>], path: &Path) -> Result<()> {
    write_file(path, &timeseries_text(records))
}

pub fn parse_timeseries(text: &str, path: &Path) -> Result<Vec<DiagnosticsRecord<f64>>> {
    let bad = |line: usize, message: String| Error::Format {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TIMESERIES_HEADER => {}
        other => return Err(bad(1, format!("expected header `{TIMESERIES_HEADER}`, found `{}`", other.unwrap_or("")))),
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let ln = n + 2;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>().map_err(|_| bad(ln, format!("bad number `{f}`"))))
            .collect::<Result<_>>()?;
        if v.len() != 9 {
            return Err(bad(ln, format!("expected 9 fields, found {}", v.len())));
        }
        out.push(DiagnosticsRecord {
            t: v[0],
            max_v: v[1],
            arg_r: v[2],
            arg_z: v[3],
            dist_axis: v[4],
            min_core_uz: v[5],
            max_core_uz: v[6],
            energy: v[7],
            max_w: v[8],
        });
    }
    Ok(out)
}

pub fn read_timeseries(path: &Path) -> Result<Vec<DiagnosticsRecord<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_timeseries(&text, path)
}

pub fn snapshot_csv<T: Real>(state: &FieldState<T>, w: &VorticityField<T>, grid: &MeridianGrid<T>) -> String {
    let mut out = String::with_capacity(150 * (grid.len() + 1));
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for (j, &z) in grid.z.iter().enumerate() {
        for (i, &r) in grid.r.iter().enumerate() {
            let k = grid.idx(i, j);
            let v = [
                r,
                z,
                state.u_r[k],
                state.u_theta[k],
                state.u_z[k],
                state.p[k],
                w.w_r[k],
                w.w_theta[k],
                w.w_z[k],
            ];
            push_row(&mut out, &v.map(|x| x.to_f64_lossy()));
        }
    }
    out
}

/// Legacy VTK structured grid of the meridian plane `x₁ = 0`: node `(r, z)`
/// sits at `(0, r, z)`, where `e_r = e_y` and `e_θ = -e_x`.
pub fn snapshot_vtk<T: Real>(state: &FieldState<T>, w: &VorticityField<T>, grid: &MeridianGrid<T>) -> String {
    let f = |x: T| fmt_num(x.to_f64_lossy());
    let n = grid.len();
    let mut out = String::with_capacity(200 * n);
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "meridian plane t={}", f(state.t));
    let _ = writeln!(out, "ASCII");
    let _ = writeln!(out, "DATASET STRUCTURED_GRID");
    let _ = writeln!(out, "DIMENSIONS {} {} 1", grid.nr(), grid.nz());
    let _ = writeln!(out, "POINTS {n} double");
    for &z in &grid.z {
        for &r in &grid.r {
            let _ = writeln!(out, "0 {} {}", f(r), f(z));
        }
    }
    let _ = writeln!(out, "POINT_DATA {n}");
    let _ = writeln!(out, "SCALARS p double 1\nLOOKUP_TABLE default");
    for k in 0..n {
        let _ = writeln!(out, "{}", f(state.p[k]));
    }
    let _ = writeln!(out, "SCALARS speed double 1\nLOOKUP_TABLE default");
    for k in 0..n {
        let _ = writeln!(out, "{}", f(state.speed(k)));
    }
    let _ = writeln!(out, "VECTORS velocity double");
    for k in 0..n {
        let _ = writeln!(out, "{} {} {}", f(-state.u_theta[k]), f(state.u_r[k]), f(state.u_z[k]));
    }
    let _ = writeln!(out, "VECTORS vorticity double");
    for k in 0..n {
        let _ = writeln!(out, "{} {} {}", f(-w.w_theta[k]), f(w.w_r[k]), f(w.w_z[k]));
    }
    out
}

/// Writes a snapshot; a `.vtk` extension selects the legacy VTK format, anything else CSV.
pub fn write_snapshot<T: Real>(
    state: &FieldState<T>,
    w: &VorticityField<T>,
    grid: &MeridianGrid<T>,
    path: &Path,
) -> Result<()> {
    let vtk = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("vtk"));
    let text = if vtk { snapshot_vtk(state, w, grid) } else { snapshot_csv(state, w, grid) };
    write_file(path, &text)
}
