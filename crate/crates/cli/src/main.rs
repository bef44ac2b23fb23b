//! Command-line front end for the saddle-point vortex solver.
//!
//! Failures print a single `error kind=<kind> message="<text>"` line on
//! stderr and exit nonzero.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use saddlesim::diagnostics::{sample_line, ProbeAxis};
use saddlesim::io::{compare_runs, run_artifacts, sweep, SwirlChoice};
use saddlesim::verification::mms_convergence;
use saddlesim::{Error, SimConfig};

#[derive(Parser)]
#[command(name = "saddlesim", version, about = "Axisymmetric swirling flow with a saddle point on the boundary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. `--set re=1000`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run every (Re, swirl) combination.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated Reynolds numbers.
        #[arg(long, value_delimiter = ',', required = true)]
        re: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Swirl::Both)]
        swirl: Swirl,
    },
    /// Compare the time series of two run directories.
    Compare { dir_a: PathBuf, dir_b: PathBuf },
    /// Manufactured-solution refinement study.
    Mms {
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Sample |ω| and ξ along a line through (0, 0.05, z_min) at a given time.
    Probe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        time: f64,
        #[arg(long, value_enum)]
        line: Line,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Swirl {
    Both,
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Line {
    Z,
    X2,
}

/// A failure reduced to a kind and a message.
struct Failure {
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { kind: e.kind(), message: e.to_string() }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

fn load(path: &PathBuf, overrides: &[String]) -> Result<SimConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    Ok(SimConfig::parse_with_overrides(&text, overrides)?)
}

fn execute(command: Command) -> Result<String, Failure> {
    let mut out = String::new();
    match command {
        Command::Run { config, set } => {
            let cfg = load(&config, &set)?;
            let a = run_artifacts(&cfg)?;
            let s = &a.summary;
            let _ = writeln!(
                out,
                "ok dir={} steps={} t_final={} peak_max_v={} turning_points={}",
                a.dir.display(),
                s.steps,
                s.t_final,
                s.peak_max_v,
                s.turning_points.len()
            );
        }
        Command::Sweep { config, re, swirl } => {
            let cfg = load(&config, &[])?;
            let choice = match swirl {
                Swirl::Both => SwirlChoice::Both,
                Swirl::On => SwirlChoice::On,
                Swirl::Off => SwirlChoice::Off,
            };
            let cells = sweep(&cfg, &re, choice.values())?;
            let mut failed = 0;
            for c in &cells {
                match &c.outcome {
                    Ok(a) => {
                        let _ = writeln!(
                            out,
                            "ok re={} swirl={} dir={} peak_max_v={}",
                            c.re,
                            c.swirl,
                            c.dir.display(),
                            a.summary.peak_max_v
                        );
                    }
                    Err(e) => {
                        failed += 1;
                        let _ = writeln!(
                            out,
                            "failed re={} swirl={} kind={} message=\"{}\"",
                            c.re,
                            c.swirl,
                            e.kind(),
                            escape(&e.to_string())
                        );
                    }
                }
            }
            if failed > 0 {
                print!("{out}");
                return Err(Failure {
                    kind: "sweep",
                    message: format!("{failed} of {} cells failed", cells.len()),
                });
            }
        }
        Command::Compare { dir_a, dir_b } => {
            let report = compare_runs(&dir_a, &dir_b)?;
            let _ = writeln!(out, "{report}");
        }
        Command::Mms { levels } => {
            let ladder = mms_convergence(levels)?;
            let _ = writeln!(out, "level,h,tau,err_l2,err_h1,err_p_l2,slope_l2,slope_h1");
            let opt = |s: Option<f64>| s.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
            for (k, l) in ladder.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{k},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{},{}",
                    l.h,
                    l.tau,
                    l.err.l2,
                    l.err.h1,
                    l.err.p_l2,
                    opt(l.slope_l2),
                    opt(l.slope_h1)
                );
            }
        }
        Command::Probe { config, time, line } => {
            let set = [format!("t_end={time}")];
            let cfg = load(&config, &set)?;
            let run = saddlesim::solver::run::<f64>(&cfg)?;
            let grid = &run.grid;
            let z0 = grid.z_min();
            let (axis, offsets): (ProbeAxis, Vec<f64>) = match line {
                Line::Z => (ProbeAxis::ParallelZ, grid.z.iter().map(|&z| z - z0).collect()),
                Line::X2 => (ProbeAxis::ParallelX2, grid.r.clone()),
            };
            let s = sample_line(&run.state, grid, [0.0, 0.05, z0], axis, &offsets, cfg.xi_floor)?;
            let _ = writeln!(out, "offset,x1,x2,z,omega_mag,xi1,xi2,xi3,valid");
            for k in 0..s.offsets.len() {
                let p = s.points[k];
                let xi = s.xi[k];
                let _ = writeln!(
                    out,
                    "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{}",
                    s.offsets[k],
                    p[0],
                    p[1],
                    p[2],
                    s.magnitude[k],
                    xi[0] + 0.0,
                    xi[1] + 0.0,
                    xi[2] + 0.0,
                    u8::from(s.valid[k])
                );
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let first = e.to_string();
            let line = first.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error kind=usage message=\"{}\"", escape(line));
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error kind={} message=\"{}\"", f.kind, escape(&f.message));
            ExitCode::FAILURE
        }
    }
}
