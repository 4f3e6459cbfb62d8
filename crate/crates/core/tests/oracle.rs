//! Analytic-vs-brute-force equivalence on a seeded randomized grid.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use psmet_core::{
    oracle_report, CouplingSpec, MeterSpec, MirrorSpec, OraclePoint, ReportOptions, SelectionSpec,
};

/// Seeded grid shared with the CLI `verify` subcommand defaults.
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
                .unwrap(),
                meter: MeterSpec::from_mean_photons(n).unwrap(),
                g: CouplingSpec::new(rng.gen_range(0.01..0.3)).unwrap(),
                mirror: MirrorSpec::resonant(rng.gen_range(0.0..0.95)).unwrap(),
            }
        })
        .collect()
}

#[test]
fn randomized_grid_agrees_with_the_oracle() {
    let points = random_points(42, 100);
    let report = oracle_report(&points, &ReportOptions::default()).unwrap();
    assert!(
        report.pass,
        "oracle disagreement (max analytic {:.3e}, max fd {:.3e}):\n{}",
        report.max_err_analytic,
        report.max_err_fd,
        report.render()
    );
    assert!(report.max_err_analytic <= 1e-6);
    assert!(report.max_err_fd <= 1e-5);
}
