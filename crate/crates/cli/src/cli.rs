//! Command-line surface.
//!
//! Every numeric flag has a config-file equivalent (same name with
//! underscores); flags override the config file. Angle-like quantities accept
//! a `pi`-suffix literal, e.g. `0.5pi` or `-pi`.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

/// Parse a real number, allowing a `pi` suffix (`0.5pi`, `pi`, `-pi`).
pub fn parse_real(raw: &str) -> Result<f64, String> {
    let s = raw.trim();
    if let Some(prefix) = s.strip_suffix("pi") {
        let factor = match prefix.trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().map_err(|e| format!("bad number '{raw}': {e}"))?,
        };
        return Ok(factor * std::f64::consts::PI);
    }
    s.parse::<f64>().map_err(|e| format!("bad number '{raw}': {e}"))
}

#[derive(Debug, Parser)]
#[command(
    name = "psmet",
    version,
    about = "Fisher-information ledger of postselected weak measurement with coherent meters",
    after_help = "Exit codes: 0 success, 2 invalid arguments or config, 3 numerical failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the information ledger at one parameter point.
    Ledger(CommonArgs),
    /// Sweep one axis and emit one ledger row per grid point.
    Sweep(CommonArgs),
    /// Locate a metric maximum along one axis (coarse scan + golden section).
    Peak(CommonArgs),
    /// Single-point evaluation including the power-recycling columns.
    Recycle(CommonArgs),
    /// Compare the analytic engine against the truncated-Fock oracle.
    Verify(CommonArgs),
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Ledger(a)
            | Command::Sweep(a)
            | Command::Peak(a)
            | Command::Recycle(a)
            | Command::Verify(a) => a,
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Config file with one `key = value` per line, `#` comments.
    #[arg(long, global = false)]
    pub config: Option<PathBuf>,

    /// Mean photon number of the coherent meter.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub n: Option<f64>,

    /// Coupling strength (radians of meter phase).
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub g: Option<f64>,

    /// Preselection polar angle.
    #[arg(long = "theta-i", value_parser = parse_real, allow_hyphen_values = true)]
    pub theta_i: Option<f64>,

    /// Postselection polar angle.
    #[arg(long = "theta-f", value_parser = parse_real, allow_hyphen_values = true)]
    pub theta_f: Option<f64>,

    /// Relative selection phase (alternative to --phi-i/--phi-f).
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub phi0: Option<f64>,

    /// Preselection azimuthal phase.
    #[arg(long = "phi-i", value_parser = parse_real, allow_hyphen_values = true)]
    pub phi_i: Option<f64>,

    /// Postselection azimuthal phase.
    #[arg(long = "phi-f", value_parser = parse_real, allow_hyphen_values = true)]
    pub phi_f: Option<f64>,

    /// Front-mirror amplitude reflectivity, in [0, 1).
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub r: Option<f64>,

    /// Single-pass cavity phase (0 = resonance).
    #[arg(long = "cavity-phase", value_parser = parse_real, allow_hyphen_values = true)]
    pub cavity_phase: Option<f64>,

    /// Sweep/peak axis: theta_f, phi0, g, r or n.
    #[arg(long)]
    pub axis: Option<String>,

    /// Lower end of the axis range.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub from: Option<f64>,

    /// Upper end of the axis range.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub to: Option<f64>,

    /// Number of grid points (>= 2).
    #[arg(long)]
    pub steps: Option<usize>,

    /// For sweeps: column set (`ledger`, `recycled` or `ledger,recycled`).
    /// For peak: target metric (`F_tot`, `PdQd`, `F_p`, `F_pow`).
    #[arg(long)]
    pub metric: Option<String>,

    /// Central finite-difference step.
    #[arg(long = "fd-step", value_parser = parse_real)]
    pub fd_step: Option<f64>,

    /// Fock truncation tail tolerance.
    #[arg(long = "trunc-tol", value_parser = parse_real)]
    pub trunc_tol: Option<f64>,

    /// Seed of the randomized verification grid.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Number of randomized verification points.
    #[arg(long)]
    pub points: Option<usize>,

    /// Verification gate for probabilities and QFI quantities.
    #[arg(long = "tol-analytic", value_parser = parse_real)]
    pub tol_analytic: Option<f64>,

    /// Verification gate for derivative-chained quantities.
    #[arg(long = "tol-fd", value_parser = parse_real)]
    pub tol_fd: Option<f64>,

    /// Output file path (rows go to stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format: csv or tsv.
    #[arg(long)]
    pub format: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::parse_real;
    use std::f64::consts::PI;

    #[test]
    fn pi_literals() {
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real("-pi").unwrap(), -PI);
        assert_eq!(parse_real("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_real("-0.25pi").unwrap(), -0.25 * PI);
        assert_eq!(parse_real("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_real("1e-3").unwrap(), 1e-3);
        assert!(parse_real("piE").is_err());
        assert!(parse_real("abc").is_err());
    }
}
