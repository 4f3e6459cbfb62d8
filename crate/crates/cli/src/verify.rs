//! `verify`: analytic engine vs truncated-Fock oracle.
//!
//! Without explicit point parameters a seeded randomized grid is checked; the
//! seed is printed so any run can be reproduced exactly. The full comparison
//! table goes to stderr, a one-line machine-readable summary to stdout.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use psmet_core::{
    oracle_report, CouplingSpec, MeterSpec, MirrorSpec, OraclePoint, ReportOptions, SelectionSpec,
};

use crate::commands::point_at;
use crate::config::Resolved;
use crate::fail::CliError;

pub fn random_points(seed: u64, count: usize) -> Vec<OraclePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let photon_choices = [1.0, 2.0, 4.0, 9.0];
    (0..count)
        .map(|_| {
            let n = photon_choices[rng.gen_range(0..photon_choices.len())];
            OraclePoint {
                sel: SelectionSpec::from_phi0(
                    rng.gen_range(0.0..TAU),
                    rng.gen_range(0.0..TAU),
                    rng.gen_range(0.0..TAU),
                )
                .expect("sampled angles are finite"),
                meter: MeterSpec::from_mean_photons(n).expect("sampled n is valid"),
                g: CouplingSpec::new(rng.gen_range(0.01..0.3)).expect("sampled g is finite"),
                mirror: MirrorSpec::resonant(rng.gen_range(0.0..0.95)).expect("sampled r is valid"),
            }
        })
        .collect()
}

pub fn run(cfg: &Resolved) -> Result<(), CliError> {
    let opts = ReportOptions {
        fd_step: cfg.fd_step,
        trunc: cfg.truncation()?,
        tol_analytic: cfg.tol_analytic,
        tol_fd: cfg.tol_fd,
    };
    let (points, descr) = if cfg.explicit_point {
        let p = point_at(cfg, None)?;
        let point = OraclePoint { sel: p.sel, meter: p.meter, g: p.g, mirror: p.mirror };
        (vec![point], "points=1 (explicit)".to_string())
    } else {
        (random_points(cfg.seed, cfg.points), format!("seed={} points={}", cfg.seed, cfg.points))
    };
    let report = oracle_report(&points, &opts)?;
    eprint!("{}", report.render());
    println!(
        "verify {descr} max_rel_analytic={:.3e} max_rel_fd={:.3e} status={}",
        report.max_err_analytic,
        report.max_err_fd,
        if report.pass { "PASS" } else { "FAIL" }
    );
    if report.pass {
        Ok(())
    } else {
        Err(CliError::numerical("verification tolerances exceeded".to_string()))
    }
}
