//! Layered run configuration: defaults, then config file, then flags.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use psmet_core::{CouplingSpec, MeterSpec, MirrorSpec, SelectionSpec, TruncationSpec};

use crate::cli::{parse_real, CommonArgs};
use crate::fail::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    ThetaF,
    Phi0,
    G,
    R,
    N,
}

impl Axis {
    pub fn parse(name: &str) -> Result<Axis, CliError> {
        match name {
            "theta_f" => Ok(Axis::ThetaF),
            "phi0" => Ok(Axis::Phi0),
            "g" => Ok(Axis::G),
            "r" => Ok(Axis::R),
            "n" => Ok(Axis::N),
            other => Err(CliError::usage(format!(
                "unknown axis '{other}' (expected theta_f, phi0, g, r or n)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Axis::ThetaF => "theta_f",
            Axis::Phi0 => "phi0",
            Axis::G => "g",
            Axis::R => "r",
            Axis::N => "n",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Tsv,
}

impl Format {
    pub fn separator(&self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub n: f64,
    pub g: f64,
    pub theta_i: f64,
    pub theta_f: f64,
    pub phi_i: f64,
    pub phi_f: f64,
    pub r: f64,
    pub cavity_phase: f64,
    pub axis: Option<Axis>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: usize,
    pub metric: Option<String>,
    pub fd_step: f64,
    pub trunc_tol: f64,
    pub seed: u64,
    pub points: usize,
    pub tol_analytic: f64,
    pub tol_fd: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// True when any point parameter was given explicitly (flag or config);
    /// `verify` then checks that single point instead of a random grid.
    pub explicit_point: bool,
}

const POINT_KEYS: [&str; 8] = ["n", "g", "theta_i", "theta_f", "phi0", "phi_i", "phi_f", "r"];

const KNOWN_KEYS: [&str; 22] = [
    "n", "g", "theta_i", "theta_f", "phi0", "phi_i", "phi_f", "r", "cavity_phase", "axis", "from",
    "to", "steps", "metric", "fd_step", "trunc_tol", "seed", "points", "tol_analytic", "tol_fd",
    "out", "format",
];

/// Parse a `key = value` config file. Unknown keys are rejected so typos do
/// not silently fall back to defaults.
pub fn parse_config_file(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::usage(format!(
                "{}:{}: expected 'key = value', got '{raw}'",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::usage(format!(
                "{}:{}: unknown config key '{key}'",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

struct Layered<'a> {
    file: HashMap<String, String>,
    args: &'a CommonArgs,
}

impl<'a> Layered<'a> {
    fn real(&self, key: &str, flag: Option<f64>) -> Result<Option<f64>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(text) => parse_real(text)
                .map(Some)
                .map_err(|e| CliError::usage(format!("config key '{key}': {e}"))),
            None => Ok(None),
        }
    }

    fn integer(&self, key: &str, flag: Option<u64>) -> Result<Option<u64>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(text) => text
                .parse::<u64>()
                .map(Some)
                .map_err(|e| CliError::usage(format!("config key '{key}': {e}"))),
            None => Ok(None),
        }
    }

    fn string(&self, key: &str, flag: Option<&str>) -> Option<String> {
        flag.map(str::to_string).or_else(|| self.file.get(key).cloned())
    }
}

pub fn resolve(args: &CommonArgs) -> Result<Resolved, CliError> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };
    let layered = Layered { file, args };

    let phi0 = layered.real("phi0", args.phi0)?;
    let phi_i = layered.real("phi_i", args.phi_i)?;
    let phi_f = layered.real("phi_f", args.phi_f)?;
    if phi0.is_some() && (phi_i.is_some() || phi_f.is_some()) {
        return Err(CliError::usage(
            "give either phi0 or phi_i/phi_f, not both".to_string(),
        ));
    }
    let (phi_i_eff, phi_f_eff) = match phi0 {
        Some(p0) => (p0, 0.0),
        None => (phi_i.unwrap_or(PI), phi_f.unwrap_or(0.0)),
    };

    let explicit_point = {
        let from_flags = args.n.is_some()
            || args.g.is_some()
            || args.theta_i.is_some()
            || args.theta_f.is_some()
            || args.phi0.is_some()
            || args.phi_i.is_some()
            || args.phi_f.is_some()
            || args.r.is_some();
        let from_file = POINT_KEYS.iter().any(|k| layered.file.contains_key(*k));
        from_flags || from_file
    };

    let format = match layered.string("format", args.format.as_deref()) {
        None => Format::Csv,
        Some(s) if s == "csv" => Format::Csv,
        Some(s) if s == "tsv" => Format::Tsv,
        Some(other) => {
            return Err(CliError::usage(format!("unknown format '{other}' (expected csv or tsv)")))
        }
    };

    let axis = match layered.string("axis", args.axis.as_deref()) {
        Some(name) => Some(Axis::parse(&name)?),
        None => None,
    };

    let out = args
        .out
        .clone()
        .or_else(|| layered.file.get("out").map(PathBuf::from));

    let resolved = Resolved {
        n: layered.real("n", args.n)?.unwrap_or(4.0),
        g: layered.real("g", args.g)?.unwrap_or(0.05),
        theta_i: layered.real("theta_i", args.theta_i)?.unwrap_or(FRAC_PI_2),
        theta_f: layered.real("theta_f", args.theta_f)?.unwrap_or(FRAC_PI_2),
        phi_i: phi_i_eff,
        phi_f: phi_f_eff,
        r: layered.real("r", args.r)?.unwrap_or(0.9),
        cavity_phase: layered.real("cavity_phase", args.cavity_phase)?.unwrap_or(0.0),
        axis,
        from: layered.real("from", args.from)?,
        to: layered.real("to", args.to)?,
        steps: layered.integer("steps", args.steps.map(|s| s as u64))?.unwrap_or(512) as usize,
        metric: layered.string("metric", args.metric.as_deref()),
        fd_step: layered.real("fd_step", args.fd_step)?.unwrap_or(1e-5),
        trunc_tol: layered.real("trunc_tol", args.trunc_tol)?.unwrap_or(1e-14),
        seed: layered.integer("seed", args.seed)?.unwrap_or(42),
        points: layered.integer("points", args.points.map(|p| p as u64))?.unwrap_or(100) as usize,
        tol_analytic: layered.real("tol_analytic", args.tol_analytic)?.unwrap_or(1e-6),
        tol_fd: layered.real("tol_fd", args.tol_fd)?.unwrap_or(1e-5),
        out,
        format,
        explicit_point,
    };

    for (name, value) in [
        ("n", resolved.n),
        ("g", resolved.g),
        ("theta_i", resolved.theta_i),
        ("theta_f", resolved.theta_f),
        ("r", resolved.r),
        ("cavity_phase", resolved.cavity_phase),
        ("fd_step", resolved.fd_step),
        ("trunc_tol", resolved.trunc_tol),
    ] {
        if !value.is_finite() {
            return Err(CliError::usage(format!("{name} must be finite, got {value}")));
        }
    }
    if resolved.n < 0.0 {
        return Err(CliError::usage(format!("n must be >= 0, got {}", resolved.n)));
    }
    if !(0.0..1.0).contains(&resolved.r) {
        return Err(CliError::usage(format!("r must lie in [0, 1), got {}", resolved.r)));
    }
    if resolved.fd_step <= 0.0 || resolved.trunc_tol <= 0.0 {
        return Err(CliError::usage("fd_step and trunc_tol must be positive".to_string()));
    }
    Ok(resolved)
}

impl Resolved {
    pub fn selection(&self) -> Result<SelectionSpec, CliError> {
        SelectionSpec::new(self.theta_i, self.phi_i, self.theta_f, self.phi_f).map_err(CliError::from)
    }

    pub fn meter(&self) -> Result<MeterSpec, CliError> {
        MeterSpec::from_mean_photons(self.n).map_err(CliError::from)
    }

    pub fn coupling(&self) -> Result<CouplingSpec, CliError> {
        CouplingSpec::new(self.g).map_err(CliError::from)
    }

    pub fn mirror(&self) -> Result<MirrorSpec, CliError> {
        MirrorSpec::new(self.r, self.cavity_phase).map_err(CliError::from)
    }

    pub fn truncation(&self) -> Result<TruncationSpec, CliError> {
        TruncationSpec::new(self.trunc_tol).map_err(CliError::from)
    }

    /// Axis range for sweep/peak commands.
    pub fn range(&self) -> Result<(Axis, f64, f64), CliError> {
        let axis = self
            .axis
            .ok_or_else(|| CliError::usage("--axis is required for this command".to_string()))?;
        let from = self
            .from
            .ok_or_else(|| CliError::usage("--from is required for this command".to_string()))?;
        let to = self
            .to
            .ok_or_else(|| CliError::usage("--to is required for this command".to_string()))?;
        if !(from < to) {
            return Err(CliError::usage(format!("need from < to, got {from} .. {to}")));
        }
        if self.steps < 2 {
            return Err(CliError::usage(format!("steps must be >= 2, got {}", self.steps)));
        }
        Ok((axis, from, to))
    }
}
