//! Flat `key = value` experiment configuration.
//!
//! One pair per line, `#` starts a comment. Unknown keys are rejected and
//! missing keys take the defaults of the selected `profile`. [`SimConfig::echo`]
//! writes every effective value back in a fixed order, so
//! `parse(echo(parse(text))) == parse(text)`.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::grid::DomainKind;

/// Environment variable overriding `out_dir`.
pub const OUT_DIR_ENV: &str = "SADDLESIM_OUT";

/// Which `h` enters the pressure stabilization `δ₀h²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HRule {
    /// One representative size (the average edge length) everywhere.
    Representative,
    /// Local cell size on each control-volume face.
    LocalCell,
}

/// Default discretization profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Reference discretization, `τ = 1.25e-2`.
    MeshA,
    /// Coarser mesh and larger step, `τ = 1.66e-2`.
    MeshB,
}

impl Profile {
    fn tau(self) -> f64 {
        match self {
            Profile::MeshA => 1.25e-2,
            Profile::MeshB => 1.66e-2,
        }
    }

    fn nodes(self) -> (usize, usize) {
        match self {
            Profile::MeshA => (64, 160),
            // edge lengths scaled by 2.48/1.88
            Profile::MeshB => (48, 121),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Profile::MeshA => "mesh_a",
            Profile::MeshB => "mesh_b",
        }
    }
}

/// Radial grading giving `h_min / h_max = 0.1` across the radial gaps.
pub fn default_grading(nr: usize) -> f64 {
    if nr <= 2 {
        1.0
    } else {
        0.1f64.powf(1.0 / (nr - 2) as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub profile: Profile,
    pub re: f64,
    pub tau: f64,
    pub a: f64,
    pub variant: DomainKind,
    pub swirl: bool,
    pub eps: [f64; 6],
    pub beta: [f64; 6],
    pub delta0: f64,
    pub lin_tol: f64,
    pub lin_maxit: usize,
    pub h_rule: HRule,
    pub nr: usize,
    pub nz: usize,
    pub grading: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub r_core: f64,
    pub jump_threshold: f64,
    pub xi_floor: f64,
    pub snapshot_times: Vec<f64>,
    pub out_dir: PathBuf,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig::for_profile(Profile::MeshA)
    }
}

const KEYS: &[&str] = &[
    "profile",
    "re",
    "tau",
    "a",
    "variant",
    "swirl",
    "eps1",
    "eps2",
    "eps3",
    "eps4",
    "eps5",
    "eps6",
    "beta1",
    "beta2",
    "beta3",
    "beta4",
    "beta5",
    "beta6",
    "delta0",
    "lin_tol",
    "lin_maxit",
    "h_rule",
    "nr",
    "nz",
    "grading",
    "t_end",
    "record_every",
    "r_core",
    "jump_threshold",
    "xi_floor",
    "snapshot_times",
    "out_dir",
];

impl SimConfig {
    pub fn for_profile(profile: Profile) -> Self {
        let (nr, nz) = profile.nodes();
        SimConfig {
            profile,
            re: 5000.0,
            tau: profile.tau(),
            a: 0.125,
            variant: DomainKind::Offset,
            swirl: true,
            eps: [1.0; 6],
            beta: [1.0; 6],
            delta0: 1.0,
            lin_tol: 1e-8,
            lin_maxit: 10,
            h_rule: HRule::LocalCell,
            nr,
            nz,
            grading: default_grading(nr),
            t_end: 3.0,
            record_every: 1,
            r_core: 0.1,
            jump_threshold: 0.25,
            xi_floor: 1e-8,
            snapshot_times: vec![0.4, 1.4],
            out_dir: PathBuf::from("out"),
        }
    }

    /// Parses configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_overrides(text, &[])
    }

    /// Parses `text`, then applies `key=value` overrides (later wins).
    pub fn parse_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut entries: Vec<(String, String, Option<usize>)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::config(line, Some(n + 1), "expected `key = value`")
            })?;
            entries.push((k.trim().to_string(), v.trim().to_string(), Some(n + 1)));
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::config(o.as_str(), None, "expected `key=value`"))?;
            entries.push((k.trim().to_string(), v.trim().to_string(), None));
        }

        for (k, _, line) in &entries {
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::config(k.as_str(), *line, "unknown key"));
            }
        }

        // The profile decides the defaults the other keys override.
        let mut profile = Profile::MeshA;
        for (k, v, line) in &entries {
            if k == "profile" {
                profile = match v.as_str() {
                    "mesh_a" => Profile::MeshA,
                    "mesh_b" => Profile::MeshB,
                    _ => return Err(Error::config("profile", *line, format!("expected mesh_a or mesh_b, got `{v}`"))),
                };
            }
        }
        let mut cfg = SimConfig::for_profile(profile);
        let mut grading_set = false;
        for (k, v, line) in &entries {
            cfg.apply(k, v, *line)?;
            grading_set |= k == "grading";
        }
        if !grading_set {
            cfg.grading = default_grading(cfg.nr);
        }
        cfg.validate_with(&entries)?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<()> {
        let f = || parse_f64(key, value, line);
        let u = || {
            value
                .parse::<usize>()
                .map_err(|_| Error::config(key, line, format!("expected a non-negative integer, got `{value}`")))
        };
        match key {
            "profile" => {}
            "re" => self.re = f()?,
            "tau" => self.tau = f()?,
            "a" => self.a = f()?,
            "variant" => {
                self.variant = match value {
                    "offset" => DomainKind::Offset,
                    "centered" => DomainKind::Centered,
                    _ => return Err(Error::config(key, line, format!("expected offset or centered, got `{value}`"))),
                }
            }
            "swirl" => {
                self.swirl = match value {
                    "true" | "on" | "1" => true,
                    "false" | "off" | "0" => false,
                    _ => return Err(Error::config(key, line, format!("expected true or false, got `{value}`"))),
                }
            }
            "delta0" => self.delta0 = f()?,
            "lin_tol" => self.lin_tol = f()?,
            "lin_maxit" => self.lin_maxit = u()?,
            "h_rule" => {
                self.h_rule = match value {
                    "local_cell" => HRule::LocalCell,
                    "representative" => HRule::Representative,
                    _ => return Err(Error::config(key, line, format!("expected local_cell or representative, got `{value}`"))),
                }
            }
            "nr" => self.nr = u()?,
            "nz" => self.nz = u()?,
            "grading" => self.grading = f()?,
            "t_end" => self.t_end = f()?,
            "record_every" => self.record_every = u()?,
            "r_core" => self.r_core = f()?,
            "jump_threshold" => self.jump_threshold = f()?,
            "xi_floor" => self.xi_floor = f()?,
            "snapshot_times" => {
                self.snapshot_times = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|s| parse_f64(key, s.trim(), line))
                        .collect::<Result<_>>()?
                }
            }
            "out_dir" => self.out_dir = PathBuf::from(value),
            _ => {
                let (slot, n) = if let Some(n) = key.strip_prefix("eps") {
                    (&mut self.eps, n)
                } else if let Some(n) = key.strip_prefix("beta") {
                    (&mut self.beta, n)
                } else {
                    return Err(Error::config(key, line, "unknown key"));
                };
                let n: usize = n.parse().map_err(|_| Error::config(key, line, "unknown key"))?;
                slot[n - 1] = f()?;
            }
        }
        Ok(())
    }

    /// Checks every invariant; errors name the key (and its line, if it was set in text).
    pub fn validate(&self) -> Result<()> {
        self.validate_with(&[])
    }

    fn validate_with(&self, entries: &[(String, String, Option<usize>)]) -> Result<()> {
        let line_of = |key: &str| entries.iter().rev().find(|(k, _, _)| k == key).and_then(|e| e.2);
        let fail = |key: &str, msg: String| Err(Error::config(key, line_of(key), msg));
        let pos = |key: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                fail(key, format!("must be positive, got {v}"))
            }
        };
        pos("re", self.re)?;
        pos("tau", self.tau)?;
        pos("a", self.a)?;
        pos("delta0", self.delta0)?;
        pos("jump_threshold", self.jump_threshold)?;
        for k in 0..6 {
            pos(&format!("eps{}", k + 1), self.eps[k])?;
            pos(&format!("beta{}", k + 1), self.beta[k])?;
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return fail("t_end", format!("must be non-negative, got {}", self.t_end));
        }
        if !(self.lin_tol > 0.0 && self.lin_tol < 1.0) {
            return fail("lin_tol", format!("must lie in (0, 1), got {}", self.lin_tol));
        }
        if self.lin_maxit == 0 {
            return fail("lin_maxit", "must be at least 1".into());
        }
        if self.nr < 2 {
            return fail("nr", format!("need at least 2 nodes, got {}", self.nr));
        }
        if self.nz < 2 {
            return fail("nz", format!("need at least 2 nodes, got {}", self.nz));
        }
        if !(self.grading > 0.0 && self.grading <= 1.0) {
            return fail("grading", format!("must lie in (0, 1], got {}", self.grading));
        }
        if self.record_every == 0 {
            return fail("record_every", "must be at least 1".into());
        }
        if !(self.r_core > 0.0 && self.r_core < 1.0) {
            return fail("r_core", format!("must lie in (0, 1), got {}", self.r_core));
        }
        if !(self.xi_floor >= 0.0 && self.xi_floor < 1.0) {
            return fail("xi_floor", format!("must lie in [0, 1), got {}", self.xi_floor));
        }
        if self.snapshot_times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return fail("snapshot_times", "times must be non-negative".into());
        }
        Ok(())
    }

    /// Effective configuration, one `key = value` per line in a fixed order.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("profile", self.profile.name().into());
        kv("re", format!("{:?}", self.re));
        kv("tau", format!("{:?}", self.tau));
        kv("a", format!("{:?}", self.a));
        kv("variant", self.variant.name().into());
        kv("swirl", self.swirl.to_string());
        for k in 0..6 {
            kv(&format!("eps{}", k + 1), format!("{:?}", self.eps[k]));
        }
        for k in 0..6 {
            kv(&format!("beta{}", k + 1), format!("{:?}", self.beta[k]));
        }
        kv("delta0", format!("{:?}", self.delta0));
        kv("lin_tol", format!("{:?}", self.lin_tol));
        kv("lin_maxit", self.lin_maxit.to_string());
        kv(
            "h_rule",
            match self.h_rule {
                HRule::LocalCell => "local_cell",
                HRule::Representative => "representative",
            }
            .into(),
        );
        kv("nr", self.nr.to_string());
        kv("nz", self.nz.to_string());
        kv("grading", format!("{:?}", self.grading));
        kv("t_end", format!("{:?}", self.t_end));
        kv("record_every", self.record_every.to_string());
        kv("r_core", format!("{:?}", self.r_core));
        kv("jump_threshold", format!("{:?}", self.jump_threshold));
        kv("xi_floor", format!("{:?}", self.xi_floor));
        kv(
            "snapshot_times",
            self.snapshot_times.iter().map(|t| format!("{t:?}")).collect::<Vec<_>>().join(","),
        );
        kv("out_dir", self.out_dir.display().to_string());
        s
    }

    /// Output directory after applying the `SADDLESIM_OUT` override.
    pub fn resolved_out_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.out_dir.clone(),
        }
    }

    /// Number of time steps needed to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.tau - 1e-9).ceil().max(0.0) as usize
    }
}

fn parse_f64(key: &str, value: &str, line: Option<usize>) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::config(key, line, format!("expected a number, got `{value}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = SimConfig::parse("").unwrap();
        assert_eq!(c.a, 0.125);
        assert_eq!(c.delta0, 1.0);
        assert!(c.swirl);
        assert_eq!(c.tau, 1.25e-2);
        assert_eq!(c.eps, [1.0; 6]);
        assert_eq!(c.beta, [1.0; 6]);
        assert_eq!(c.snapshot_times, vec![0.4, 1.4]);
    }

    #[test]
    fn mesh_b_profile_changes_step() {
        let c = SimConfig::parse("profile = mesh_b").unwrap();
        assert_eq!(c.tau, 1.66e-2);
        let c = SimConfig::parse("tau = 0.01\nprofile = mesh_b").unwrap();
        assert_eq!(c.tau, 0.01);
    }

    #[test]
    fn sets_reynolds_number() {
        let c = SimConfig::parse("re = 50000 # comment").unwrap();
        assert_eq!(c.re, 50000.0);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = SimConfig::parse("re = 10\nbogus = 1").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("bogus") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn invariant_violation_names_key_and_line() {
        let e = SimConfig::parse("\n\ntau = -1").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("`tau`") && msg.contains("line 3"), "{msg}");
        let e = SimConfig::parse("re = abc").unwrap_err();
        assert!(e.to_string().contains("`re`"));
        assert!(SimConfig::parse("eps3 = 0").is_err());
        assert!(SimConfig::parse("eps7 = 1").is_err());
    }

    #[test]
    fn overrides_win() {
        let c = SimConfig::parse_with_overrides("re = 10", &["re=20".into(), "swirl=off".into()]).unwrap();
        assert_eq!(c.re, 20.0);
        assert!(!c.swirl);
    }

    #[test]
    fn echo_round_trips() {
        let text = "re = 1234.5\nvariant = centered\nswirl = false\nbeta4 = 2\nsnapshot_times = 0.1, 0.25\nh_rule = representative\nnr = 33";
        let c = SimConfig::parse(text).unwrap();
        let echoed = c.echo();
        let c2 = SimConfig::parse(&echoed).unwrap();
        assert_eq!(c, c2);
        assert_eq!(echoed, c2.echo());
    }

    #[test]
    fn default_grading_tracks_resolution() {
        let c = SimConfig::parse("nr = 32").unwrap();
        assert!((c.grading.powi(30) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn step_count() {
        let c = SimConfig::parse("tau = 0.005\nt_end = 1.0").unwrap();
        assert_eq!(c.steps(), 200);
        let c = SimConfig::parse("t_end = 0").unwrap();
        assert_eq!(c.steps(), 0);
    }
}
