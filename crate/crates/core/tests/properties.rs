//! Invariant checks over randomized parameter ranges.

use approx::{assert_abs_diff_eq, assert_relative_eq};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use psmet_core::{
    coherent_overlap, coherent_to_fock, conditional_qfi, f_pow_exact, fisher_ledger, joint_qfi,
    joint_state, meter_g_derivative, peak_phi0, postselect_prob, postselect_prob_closed, qfi_pure,
    recycled_distribution, Branch, CouplingSpec, FockVector, MeterSpec, MirrorSpec, SelectionSpec,
    TruncationSpec,
};

fn sel(theta_i: f64, theta_f: f64, phi0: f64) -> SelectionSpec {
    SelectionSpec::from_phi0(theta_i, theta_f, phi0).unwrap()
}

fn balanced(phi0: f64) -> SelectionSpec {
    sel(FRAC_PI_2, FRAC_PI_2, phi0)
}

fn photon_numbers() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(4.0), Just(9.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    // The reject branch uses the orthogonal-complement coefficients; this is
    // exactly the property that breaks if the excited/ground weights are
    // paired any other way.
    #[test]
    fn postselection_probabilities_close(
        theta_i in 0.0..TAU,
        theta_f in 0.0..TAU,
        phi0 in 0.0..TAU,
        n in 0.0..50.0,
        g in -PI..PI,
    ) {
        let dist = postselect_prob(
            &sel(theta_i, theta_f, phi0),
            &MeterSpec::from_mean_photons(n).unwrap(),
            CouplingSpec::new(g).unwrap(),
        ).unwrap();
        prop_assert!((dist.p_d + dist.p_r - 1.0).abs() < 1e-10,
            "closure violated: {} + {}", dist.p_d, dist.p_r);
        prop_assert!((0.0..=1.0).contains(&dist.p_d));
        prop_assert!((0.0..=1.0).contains(&dist.p_r));
    }

    #[test]
    fn closed_form_matches_overlap_algebra_when_balanced(
        phi0 in 0.0..TAU,
        n in 0.0..50.0,
        g in -PI..PI,
    ) {
        let dist = postselect_prob(
            &balanced(phi0),
            &MeterSpec::from_mean_photons(n).unwrap(),
            CouplingSpec::new(g).unwrap(),
        ).unwrap();
        let closed = postselect_prob_closed(n, g, phi0).unwrap();
        prop_assert!((dist.p_d - closed).abs() < 1e-12,
            "engine {} vs closed form {}", dist.p_d, closed);
    }

    #[test]
    fn branch_swap_symmetry_when_balanced(
        phi0 in 0.0..TAU,
        n in 0.0..30.0,
        g in -1.0..1.0f64,
    ) {
        let meter = MeterSpec::from_mean_photons(n).unwrap();
        let gc = CouplingSpec::new(g).unwrap();
        let swapped = postselect_prob(&balanced(phi0 + PI), &meter, gc).unwrap();
        let base = postselect_prob(&balanced(phi0), &meter, gc).unwrap();
        prop_assert!((base.p_r - swapped.p_d).abs() < 1e-13);
    }

    #[test]
    fn probabilities_depend_on_meter_phase_only_through_n(
        phase in 0.0..TAU,
        amp in 0.0..5.0f64,
        theta_i in 0.0..TAU,
        theta_f in 0.0..TAU,
        phi0 in 0.0..TAU,
        g in -1.0..1.0f64,
    ) {
        let s = sel(theta_i, theta_f, phi0);
        let gc = CouplingSpec::new(g).unwrap();
        let plain = MeterSpec::new(C64::new(amp, 0.0)).unwrap();
        let rotated = MeterSpec::new(C64::new(amp, 0.0) * C64::new(0.0, phase).exp()).unwrap();
        let a = postselect_prob(&s, &plain, gc).unwrap();
        let b = postselect_prob(&s, &rotated, gc).unwrap();
        prop_assert!((a.p_d - b.p_d).abs() < 1e-12);
    }

    #[test]
    fn analytic_overlap_matches_fock_expansion(
        re1 in -2.5..2.5f64, im1 in -2.5..2.5f64,
        re2 in -2.5..2.5f64, im2 in -2.5..2.5f64,
    ) {
        let trunc = TruncationSpec::default();
        let b = C64::new(re1, im1);
        let c = C64::new(re2, im2);
        let vb = coherent_to_fock(b, &trunc).unwrap();
        let vc = coherent_to_fock(c, &trunc).unwrap();
        let len = vb.len().max(vc.len());
        let pad = |v: &FockVector| {
            let mut coeffs = v.coeffs().to_vec();
            coeffs.resize(len, C64::new(0.0, 0.0));
            FockVector::from_coeffs(coeffs)
        };
        let dot = pad(&vb).dot(&pad(&vc)).unwrap();
        let exact = coherent_overlap(b, c).unwrap();
        prop_assert!((dot - exact).norm() < 1e-10);
    }

    // Ledger invariants on the working grid: additivity, non-negativity, and
    // the joint-QFI bound.
    #[test]
    fn ledger_is_additive_nonnegative_and_bounded(
        theta_i in 0.0..TAU,
        theta_f in 0.0..TAU,
        phi0 in 0.0..TAU,
        g in 1e-4..0.3,
        n in photon_numbers(),
    ) {
        let s = sel(theta_i, theta_f, phi0);
        let meter = MeterSpec::from_mean_photons(n).unwrap();
        let ledger = match fisher_ledger(&s, &meter, CouplingSpec::new(g).unwrap()) {
            Ok(l) => l,
            // A singular classical limit needs an exactly vanishing branch;
            // it cannot appear on this sampled grid.
            Err(e) => return Err(TestCaseError::fail(format!("ledger failed: {e}"))),
        };
        prop_assert!(ledger.pd_qd >= 0.0 && ledger.pr_qr >= 0.0 && ledger.f_p >= 0.0);
        prop_assert!((ledger.f_tot - (ledger.pd_qd + ledger.pr_qr + ledger.f_p)).abs()
            <= 1e-8 * ledger.f_tot.max(1.0));
        prop_assert!(ledger.f_tot <= ledger.q_j * (1.0 + 1e-8),
            "bound violated: {} > {}", ledger.f_tot, ledger.q_j);
    }

    #[test]
    fn weighted_information_shares_swap_with_the_branches(
        phi0 in 0.0..TAU,
        g in 1e-3..0.3,
        n in photon_numbers(),
    ) {
        let meter = MeterSpec::from_mean_photons(n).unwrap();
        let gc = CouplingSpec::new(g).unwrap();
        let a = fisher_ledger(&balanced(phi0), &meter, gc).unwrap();
        let b = fisher_ledger(&balanced(phi0 + PI), &meter, gc).unwrap();
        prop_assert!((a.pd_qd - b.pr_qr).abs() <= 1e-9 * a.pd_qd.max(1.0),
            "pd_qd(phi0)={} vs pr_qr(phi0+pi)={}", a.pd_qd, b.pr_qr);
    }

    #[test]
    fn joint_qfi_closed_form_equals_state_route(
        theta_i in 0.0..TAU,
        phi_i in 0.0..TAU,
        g in -0.5..0.5f64,
        n in photon_numbers(),
    ) {
        let s = SelectionSpec::new(theta_i, phi_i, 1.1, 0.3).unwrap();
        let meter = MeterSpec::from_mean_photons(n).unwrap();
        let joint = joint_state(&s, &meter, CouplingSpec::new(g).unwrap());
        let deriv = meter_g_derivative(&joint).unwrap();
        let via_state = qfi_pure(&joint, &deriv).unwrap();
        let closed = joint_qfi(&s, &meter);
        prop_assert!((via_state - closed).abs() <= 1e-9 * closed.max(1.0));
    }

    // Lossless cavity: the recycled outcome probabilities close for every
    // reflectivity and cavity phase.
    #[test]
    fn recycled_distribution_closes(
        theta_i in 0.0..TAU,
        theta_f in 0.0..TAU,
        phi0 in 0.0..TAU,
        g in 1e-4..0.3,
        r in 0.0..0.99f64,
        theta in 0.0..TAU,
        n in photon_numbers(),
    ) {
        let s = sel(theta_i, theta_f, phi0);
        let meter = MeterSpec::from_mean_photons(n).unwrap();
        let mirror = MirrorSpec::new(r, theta).unwrap();
        let rec = recycled_distribution(&s, &meter, CouplingSpec::new(g).unwrap(), &mirror).unwrap();
        prop_assert!((rec.p_c + rec.p_b - 1.0).abs() < 1e-10,
            "recycled closure violated: {} + {}", rec.p_c, rec.p_b);
    }

    #[test]
    fn zero_reflectivity_reduces_to_the_bare_setup(
        phi0 in 0.5..5.0f64,
        g in 5e-3..0.3,
        n in photon_numbers(),
    ) {
        let s = balanced(phi0);
        let meter = MeterSpec::from_mean_photons(n).unwrap();
        let gc = CouplingSpec::new(g).unwrap();
        let mirror = MirrorSpec::resonant(0.0).unwrap();
        let bare = postselect_prob(&s, &meter, gc).unwrap();
        let rec = recycled_distribution(&s, &meter, gc, &mirror).unwrap();
        prop_assert!((rec.p_c - bare.p_d).abs() < 1e-14);
        prop_assert!((rec.p_b - bare.p_r).abs() < 1e-14);
        if bare.p_d > 1e-9 && bare.p_r > 1e-9 {
            let ledger = fisher_ledger(&s, &meter, gc).unwrap();
            let rec_ledger = f_pow_exact(&s, &meter, gc, &mirror, 1e-5).unwrap();
            prop_assert!((rec_ledger.f_pow - ledger.f_p).abs() <= 1e-8 * ledger.f_p.max(1e-9));
        }
    }
}

// Deterministic invariants that need specific parameter relationships.

#[test]
fn record_information_vanishes_at_the_transfer_phase() {
    for (n, g) in [(2.0, 0.05), (4.0, 0.05), (4.0, 0.12), (9.0, 0.02)] {
        let phi0 = peak_phi0(n, g).unwrap();
        let ledger = fisher_ledger(
            &balanced(phi0),
            &MeterSpec::from_mean_photons(n).unwrap(),
            CouplingSpec::new(g).unwrap(),
        )
        .unwrap();
        let budget = 4.0 * n * (n + 1.0);
        assert!(
            ledger.f_p <= 1e-6 * budget,
            "F_p = {} at the transfer phase for n={n}, g={g}",
            ledger.f_p
        );
    }
}

#[test]
fn accepted_share_is_maximal_at_the_transfer_phase() {
    let n = 4.0;
    let g = CouplingSpec::new(0.05).unwrap();
    let meter = MeterSpec::from_mean_photons(n).unwrap();
    let peak = peak_phi0(n, 0.05).unwrap();
    let at_peak = fisher_ledger(&balanced(peak), &meter, g).unwrap().pd_qd;
    let steps = 256;
    for k in 0..steps {
        let phi0 = TAU * k as f64 / steps as f64;
        let pd_qd = fisher_ledger(&balanced(phi0), &meter, g).unwrap().pd_qd;
        assert!(
            pd_qd <= at_peak * (1.0 + 1e-3),
            "PdQd({phi0}) = {pd_qd} exceeds the peak value {at_peak}"
        );
    }
}

#[test]
fn total_information_saturates_the_joint_bound_as_coupling_vanishes() {
    // Richardson extrapolation in g² over a 10x refinement ladder.
    for n in [2.0, 4.0, 9.0] {
        let meter = MeterSpec::from_mean_photons(n).unwrap();
        let f = |g: f64| fisher_ledger(&balanced(PI), &meter, CouplingSpec::new(g).unwrap()).unwrap().f_tot;
        let (f1, f2, f3) = (f(1e-2), f(1e-3), f(1e-4));
        let r1 = f2 + (f2 - f1) / 99.0;
        let r2 = f3 + (f3 - f2) / 99.0;
        let extrapolated = r2 + (r2 - r1) / 9999.0;
        let limit = 4.0 * n * (n + 1.0);
        assert_relative_eq!(extrapolated, limit, max_relative = 1e-3);
    }
}

#[test]
fn conditional_qfi_is_defined_on_both_sides_of_a_dark_point() {
    // Just off the dark point both branches are fine.
    let meter = MeterSpec::from_mean_photons(4.0).unwrap();
    let q = conditional_qfi(&balanced(PI), &meter, CouplingSpec::new(1e-3).unwrap(), Branch::Accept)
        .unwrap();
    assert!(q.is_finite() && q >= 0.0);
}

#[test]
fn recycled_information_is_monotone_in_reflectivity_on_the_working_range() {
    let meter = MeterSpec::from_mean_photons(4.0).unwrap();
    let g = CouplingSpec::new(0.01 * PI).unwrap();
    let mut last = -1.0;
    for k in 0..64 {
        let r = 0.95 * k as f64 / 63.0;
        let ledger =
            f_pow_exact(&balanced(PI), &meter, g, &MirrorSpec::resonant(r).unwrap(), 1e-5).unwrap();
        assert!(ledger.f_pow > last, "F_pow not increasing at r={r}");
        last = ledger.f_pow;
    }
}

#[test]
fn effective_mirror_is_unitary() {
    let meter = MeterSpec::from_mean_photons(4.0).unwrap();
    for g in [1e-4, 0.05, 0.3] {
        let em = psmet_core::effective_mirror(&balanced(1.3), &meter, CouplingSpec::new(g).unwrap())
            .unwrap();
        assert_abs_diff_eq!(em.r_m() * em.r_m() + em.p_m() * em.p_m(), 1.0, epsilon = 1e-14);
    }
}
