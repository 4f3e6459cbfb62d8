//! Power-recycling cavity in the scalar effective-mirror model.
//!
//! The postselecting element transmits the accepted amplitude and sends the
//! rest back toward the source, so it acts as a partially transmitting mirror
//! with reflection amplitude `r_m = √P_r` and transmission `p_m = √P_d`.
//! Closing the apparatus with a real front mirror `(r, p)` forms a two-mirror
//! cavity; summing round trips gives the intracavity gain
//! `E_c/E₀ = p / (1 − r r_m e^{iθ})` and the amplitude returned to the source
//! `E_b/E₀ = −r + p² r_m e^{iθ} / (1 − r r_m e^{iθ})`. The detected and
//! returned probabilities `{P_c, P_b}` replace `{P_d, P_r}` in the classical
//! Fisher information, giving the recycled record information `F_pow` and its
//! per-branch split `F_pow = F_c + F_b`.
//!
//! The scalar model collapses the reflected meter superposition onto a single
//! amplitude, which is faithful in the weak-disturbance regime `g√n ≪ 1`.
//! Losses inside the cavity are not modeled.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fisher::{pd_derivative_closed, DEGENERATE_PROB};
use crate::state::{postselect_prob, CouplingSpec, MeterSpec, SelectionSpec};

/// Front mirror: amplitude reflection `r`, transmission `p = √(1−r²)`, and a
/// single-pass phase `theta` (zero on resonance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorSpec {
    r: f64,
    theta: f64,
}

impl MirrorSpec {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !r.is_finite() || !(0.0..1.0).contains(&r) {
            return Err(Error::invalid(format!("mirror reflection must lie in [0,1), got {r}")));
        }
        if !theta.is_finite() {
            return Err(Error::invalid(format!("cavity phase must be finite, got {theta}")));
        }
        Ok(MirrorSpec { r, theta })
    }

    /// Mirror on cavity resonance (`theta = 0`).
    pub fn resonant(r: f64) -> Result<Self> {
        MirrorSpec::new(r, 0.0)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Transmission amplitude `p = √(1−r²)`.
    pub fn p(&self) -> f64 {
        (1.0 - self.r * self.r).sqrt()
    }
}

/// The postselecting element viewed as a mirror: `r_m = √P_r`, `p_m = √P_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMirror {
    r_m: f64,
}

impl EffectiveMirror {
    pub fn r_m(&self) -> f64 {
        self.r_m
    }

    pub fn p_m(&self) -> f64 {
        (1.0 - self.r_m * self.r_m).max(0.0).sqrt()
    }
}

/// Outcome distribution seen by the detector (`p_c`) and the source (`p_b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecycledDistribution {
    pub p_c: f64,
    pub p_b: f64,
}

/// Recycled record information and its split into the detected and returned
/// terms of the two-outcome Fisher sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecycledLedger {
    pub f_c: f64,
    pub f_b: f64,
    pub f_pow: f64,
}

/// Effective postselection mirror for the given working point.
pub fn effective_mirror(
    sel: &SelectionSpec,
    meter: &MeterSpec,
    g: CouplingSpec,
) -> Result<EffectiveMirror> {
    let dist = postselect_prob(sel, meter, g)?;
    Ok(EffectiveMirror { r_m: dist.p_r.sqrt() })
}

/// Intracavity amplitude gain `p / (1 − r r_m e^{iθ})` from the round-trip
/// geometric series.
pub fn cavity_gain(mirror: &MirrorSpec, em: &EffectiveMirror) -> Result<C64> {
    let feedback = mirror.r() * em.r_m();
    if feedback >= 1.0 {
        return Err(Error::DivergentCavity { feedback });
    }
    let loop_amp = C64::new(0.0, mirror.theta()).exp() * feedback;
    Ok(C64::new(mirror.p(), 0.0) / (C64::new(1.0, 0.0) - loop_amp))
}

/// Detected and returned probabilities `{P_c, P_b}` for the recycled
/// apparatus. With a lossless front mirror they sum to one.
pub fn recycled_distribution(
    sel: &SelectionSpec,
    meter: &MeterSpec,
    g: CouplingSpec,
    mirror: &MirrorSpec,
) -> Result<RecycledDistribution> {
    let dist = postselect_prob(sel, meter, g)?;
    let em = EffectiveMirror { r_m: dist.p_r.sqrt() };
    let gain = cavity_gain(mirror, &em)?;
    let phase = C64::new(0.0, mirror.theta()).exp();
    let loop_amp = phase * (mirror.r() * em.r_m());
    let returned = -C64::new(mirror.r(), 0.0)
        + phase * (mirror.p() * mirror.p() * em.r_m()) / (C64::new(1.0, 0.0) - loop_amp);
    Ok(RecycledDistribution {
        p_c: (gain.norm_sqr() * dist.p_d).min(1.0),
        p_b: returned.norm_sqr().min(1.0),
    })
}

/// Is this the balanced selection `θ_i = θ_f = π/2` for which the closed-form
/// probability derivative applies?
fn balanced_selection(sel: &SelectionSpec) -> bool {
    (sel.theta_i - std::f64::consts::FRAC_PI_2).abs() < 1e-12
        && (sel.theta_f - std::f64::consts::FRAC_PI_2).abs() < 1e-12
}

/// `dP_c/dg` by the analytic chain rule through `P_d'` and `r_m = √(1−P_d)`.
fn detected_prob_derivative_chain(
    mirror: &MirrorSpec,
    p_d: f64,
    dp_d: f64,
) -> f64 {
    let x = (1.0 - p_d).sqrt();
    let (r, theta) = (mirror.r(), mirror.theta());
    let p2 = 1.0 - r * r;
    let d2 = 1.0 + r * r * x * x - 2.0 * r * x * theta.cos();
    p2 * dp_d * (d2 + p_d * r * (r * x - theta.cos()) / x) / (d2 * d2)
}

/// Recycled record information `F_pow = F_c + F_b` with
/// `F_c = (dP_c/dg)²/P_c` and `F_b = (dP_b/dg)²/P_b`.
///
/// In the balanced-selection regime the probability derivative comes from the
/// closed form and is chained analytically through the cavity response.
/// Elsewhere a central finite difference of `P_c(g)` with step `fd_step` is
/// used, cross-checked at half the step.
pub fn f_pow_exact(
    sel: &SelectionSpec,
    meter: &MeterSpec,
    g: CouplingSpec,
    mirror: &MirrorSpec,
    fd_step: f64,
) -> Result<RecycledLedger> {
    if !(fd_step > 0.0) || !fd_step.is_finite() {
        return Err(Error::invalid(format!("finite-difference step must be > 0, got {fd_step}")));
    }
    let dist = postselect_prob(sel, meter, g)?;
    let rec = recycled_distribution(sel, meter, g, mirror)?;
    if rec.p_c < DEGENERATE_PROB || rec.p_b < DEGENERATE_PROB {
        return Err(Error::DegenerateBranch { probability: rec.p_c.min(rec.p_b) });
    }
    if dist.p_r < DEGENERATE_PROB {
        return Err(Error::DegenerateBranch { probability: dist.p_r });
    }
    let dp_c = if balanced_selection(sel) {
        let n = meter.mean_photons();
        let dp_d = pd_derivative_closed(n, g.g(), sel.phi0());
        detected_prob_derivative_chain(mirror, dist.p_d, dp_d)
    } else {
        let at = |gg: f64| -> Result<f64> {
            Ok(recycled_distribution(sel, meter, CouplingSpec::new(gg)?, mirror)?.p_c)
        };
        let central = |h: f64| -> Result<f64> { Ok((at(g.g() + h)? - at(g.g() - h)?) / (2.0 * h)) };
        let coarse = central(fd_step)?;
        let fine = central(fd_step / 2.0)?;
        if (fine - coarse).abs() > 1e-5 * fine.abs().max(coarse.abs()) + 1e-9 {
            return Err(Error::StepSize { coarse, fine });
        }
        fine
    };
    // Lossless closure makes dP_b/dg = -dP_c/dg for any cavity phase.
    let f_c = dp_c * dp_c / rec.p_c;
    let f_b = dp_c * dp_c / rec.p_b;
    Ok(RecycledLedger { f_c, f_b, f_pow: f_c + f_b })
}

/// Closed-form small-coupling approximation of the recycled record
/// information at `φ₀ = π`:
///
/// ```text
/// F_pow ≈ n²B² [1 + (cos ng − r)² / ((1−r²) sin² ng)]
/// B = (1−r²)(sin 2ng + 2g cos 2ng) / ((r cos ng − 1)² cos ng)
/// ```
///
/// The derivation drops the decoherence envelope `e^{−2n sin²g}`, so the
/// result carries a relative bias that approaches `(n+1)/n` as `ng → 0`; it
/// becomes sharp for large `n` at fixed `ng`.
pub fn f_pow_approx(n: f64, g: f64, r: f64) -> Result<f64> {
    if !n.is_finite() || n < 0.0 {
        return Err(Error::invalid(format!("mean photon number must be >= 0, got {n}")));
    }
    if !g.is_finite() {
        return Err(Error::invalid(format!("coupling must be finite, got {g}")));
    }
    if !r.is_finite() || !(0.0..1.0).contains(&r) {
        return Err(Error::invalid(format!("mirror reflection must lie in [0,1), got {r}")));
    }
    let (s, c) = (n * g).sin_cos();
    if s == 0.0 || c == 0.0 {
        return Err(Error::SingularApproximation(format!(
            "sin/cos of the accumulated phase ng = {} vanishes",
            n * g
        )));
    }
    let b = (1.0 - r * r) * ((2.0 * n * g).sin() + 2.0 * g * (2.0 * n * g).cos())
        / ((r * c - 1.0).powi(2) * c);
    Ok(n * n * b * b * (1.0 + (c - r).powi(2) / ((1.0 - r * r) * s * s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::classical_fisher_two_outcome;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn balanced(phi0: f64) -> SelectionSpec {
        SelectionSpec::from_phi0(FRAC_PI_2, FRAC_PI_2, phi0).unwrap()
    }

    fn meter(n: f64) -> MeterSpec {
        MeterSpec::from_mean_photons(n).unwrap()
    }

    fn coupling(g: f64) -> CouplingSpec {
        CouplingSpec::new(g).unwrap()
    }

    #[test]
    fn mirror_validation_and_unitarity() {
        assert!(MirrorSpec::new(1.0, 0.0).is_err());
        assert!(MirrorSpec::new(-0.1, 0.0).is_err());
        let m = MirrorSpec::resonant(0.37).unwrap();
        assert_relative_eq!(m.r() * m.r() + m.p() * m.p(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn effective_mirror_limits() {
        let em = effective_mirror(&balanced(PI), &meter(4.0), coupling(0.0)).unwrap();
        assert_abs_diff_eq!(em.r_m(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(em.p_m(), 0.0, epsilon = 1e-6);

        // Frozen from the oracle run: P_d = 0.0194955381…
        let em = effective_mirror(&balanced(PI), &meter(4.0), coupling(0.01 * PI)).unwrap();
        assert_relative_eq!(em.r_m(), 0.990_204_252_599_760_3, max_relative = 1e-12);

        let half = SelectionSpec::from_phi0(FRAC_PI_2, 0.0, 0.0).unwrap(); // θ_f = 0
        let em = effective_mirror(&half, &meter(4.0), coupling(0.2)).unwrap();
        assert_relative_eq!(em.r_m(), 0.5f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn cavity_gain_examples() {
        let em = EffectiveMirror { r_m: 0.990_204_252_599_760_3 };
        let open = cavity_gain(&MirrorSpec::resonant(0.0).unwrap(), &em).unwrap();
        assert_relative_eq!(open.re, 1.0, max_relative = 1e-14);
        let gain = cavity_gain(&MirrorSpec::resonant(0.9).unwrap(), &em).unwrap();
        assert_relative_eq!(gain.re, 4.005_745_503_613_298, max_relative = 1e-12);
        assert_abs_diff_eq!(gain.im, 0.0, epsilon = 1e-15);
        let dark = EffectiveMirror { r_m: 0.0 };
        let single_pass = cavity_gain(&MirrorSpec::resonant(0.9).unwrap(), &dark).unwrap();
        assert_relative_eq!(single_pass.re, (1.0f64 - 0.81).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn recycled_distribution_reduces_without_front_mirror() {
        let sel = balanced(2.1);
        let g = coupling(0.07);
        let bare = postselect_prob(&sel, &meter(4.0), g).unwrap();
        let rec =
            recycled_distribution(&sel, &meter(4.0), g, &MirrorSpec::resonant(0.0).unwrap()).unwrap();
        assert_relative_eq!(rec.p_c, bare.p_d, max_relative = 1e-14);
        assert_relative_eq!(rec.p_b, bare.p_r, max_relative = 1e-14);
    }

    #[test]
    fn recycled_distribution_matches_golden_point() {
        // n = 4, g = 0.01π, φ₀ = π, r = 0.9; frozen from the oracle run. The
        // detector sees 16x the bare success probability.
        let rec = recycled_distribution(
            &balanced(PI),
            &meter(4.0),
            coupling(0.01 * PI),
            &MirrorSpec::resonant(0.9).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(rec.p_c, 0.312_825_347_175_446_9, max_relative = 1e-11);
        assert_relative_eq!(rec.p_b, 0.687_174_652_824_552_1, max_relative = 1e-11);
        assert_abs_diff_eq!(rec.p_c + rec.p_b, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn recycled_distribution_closes_off_resonance_too() {
        let mirror = MirrorSpec::new(0.8, 0.4).unwrap();
        let rec = recycled_distribution(&balanced(1.0), &meter(2.0), coupling(0.1), &mirror).unwrap();
        assert_abs_diff_eq!(rec.p_c + rec.p_b, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coupling_independent_selection_carries_no_recycled_information() {
        let sel = SelectionSpec::from_phi0(FRAC_PI_2, 0.0, 0.0).unwrap(); // θ_f = 0
        let mirror = MirrorSpec::resonant(0.6).unwrap();
        let ledger = f_pow_exact(&sel, &meter(4.0), coupling(0.05), &mirror, 1e-5).unwrap();
        assert_abs_diff_eq!(ledger.f_pow, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn f_pow_without_mirror_equals_bare_record_information() {
        let g = coupling(0.01 * PI);
        let mirror = MirrorSpec::resonant(0.0).unwrap();
        let ledger = f_pow_exact(&balanced(PI), &meter(4.0), g, &mirror, 1e-5).unwrap();
        let bare = postselect_prob(&balanced(PI), &meter(4.0), g).unwrap();
        let f_p = classical_fisher_two_outcome(
            bare.p_d,
            pd_derivative_closed(4.0, g.g(), PI),
        )
        .unwrap();
        assert_relative_eq!(ledger.f_pow, f_p, max_relative = 1e-8);
        // Same reduction through the finite-difference path (general angles).
        let tilted = SelectionSpec::from_phi0(FRAC_PI_2 + 1e-3, FRAC_PI_2, PI).unwrap();
        let led_fd = f_pow_exact(&tilted, &meter(4.0), g, &mirror, 1e-5).unwrap();
        let dist = postselect_prob(&tilted, &meter(4.0), g).unwrap();
        let dp = crate::fisher::postselect_prob_derivative(&tilted, &meter(4.0), g).unwrap();
        let f_p_tilted = classical_fisher_two_outcome(dist.p_d, dp).unwrap();
        assert_relative_eq!(led_fd.f_pow, f_p_tilted, max_relative = 1e-7);
    }

    #[test]
    fn f_pow_matches_golden_point_and_split() {
        // Frozen from the oracle run at n = 4, g = 0.01π, φ₀ = π, r = 0.9.
        let ledger = f_pow_exact(
            &balanced(PI),
            &meter(4.0),
            coupling(0.01 * PI),
            &MirrorSpec::resonant(0.9).unwrap(),
            1e-5,
        )
        .unwrap();
        assert_relative_eq!(ledger.f_pow, 1261.155_582_274_924, max_relative = 1e-10);
        assert_relative_eq!(ledger.f_c, 866.634_149_407_517_7, max_relative = 1e-10);
        assert_relative_eq!(ledger.f_b, 394.521_432_867_406_4, max_relative = 1e-10);
        assert_relative_eq!(ledger.f_pow, ledger.f_c + ledger.f_b, max_relative = 1e-14);
    }

    #[test]
    fn f_pow_is_bare_information_times_intensity_gain() {
        // Algebraic identity on resonance: F_pow = F_p (1−r²)/(1−r√P_r)².
        for (n, g, r) in [(4.0, 0.01 * PI, 0.9), (2.0, 0.05, 0.6), (9.0, 0.02, 0.3)] {
            let sel = balanced(PI);
            let m = meter(n);
            let gc = coupling(g);
            let mirror = MirrorSpec::resonant(r).unwrap();
            let ledger = f_pow_exact(&sel, &m, gc, &mirror, 1e-5).unwrap();
            let dist = postselect_prob(&sel, &m, gc).unwrap();
            let f_p =
                classical_fisher_two_outcome(dist.p_d, pd_derivative_closed(n, g, PI)).unwrap();
            let gain2 = (1.0 - r * r) / (1.0 - r * dist.p_r.sqrt()).powi(2);
            assert_relative_eq!(ledger.f_pow, f_p * gain2, max_relative = 1e-11);
        }
    }

    #[test]
    fn f_pow_finite_difference_agrees_with_chain_rule() {
        // Evaluate the balanced point but force the FD path with a slightly
        // tilted selection that is numerically indistinguishable.
        let g = coupling(0.01 * PI);
        let mirror = MirrorSpec::resonant(0.9).unwrap();
        let chain = f_pow_exact(&balanced(PI), &meter(4.0), g, &mirror, 1e-5).unwrap();
        let tilted = SelectionSpec::from_phi0(FRAC_PI_2 + 1e-11, FRAC_PI_2, PI).unwrap();
        let fd = f_pow_exact(&tilted, &meter(4.0), g, &mirror, 1e-5).unwrap();
        assert_relative_eq!(chain.f_pow, fd.f_pow, max_relative = 1e-7);
    }

    #[test]
    fn f_pow_approx_golden_values() {
        assert_relative_eq!(
            f_pow_approx(4.0, 0.01 * PI, 0.9).unwrap(),
            1642.555_017_604_774_8,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            f_pow_approx(2.0, 0.01 * PI, 0.9).unwrap(),
            658.019_628_050_231_2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn f_pow_approx_singular_cases() {
        assert!(matches!(f_pow_approx(4.0, 0.0, 0.5), Err(Error::SingularApproximation(_))));
        assert!(matches!(f_pow_approx(0.0, 0.1, 0.5), Err(Error::SingularApproximation(_))));
        assert!(f_pow_approx(4.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn f_pow_approx_scaling_limit_in_n() {
        // With ng fixed, F_approx/n² converges as n grows (quantum scaling);
        // the bias shrinks like 1/n, so consecutive doublings tighten.
        let k = 0.125_663_706_143_591_74; // fixed ng
        let r = 0.9;
        let values: Vec<f64> =
            [2.0, 4.0, 8.0, 16.0].iter().map(|&n| f_pow_approx(n, k / n, r).unwrap() / (n * n)).collect();
        let d1 = (values[1] - values[0]).abs();
        let d2 = (values[2] - values[1]).abs();
        let d3 = (values[3] - values[2]).abs();
        assert!(d2 < 0.6 * d1, "expected contraction, got {values:?}");
        assert!(d3 < 0.6 * d2, "expected contraction, got {values:?}");
    }

    #[test]
    fn recycling_enhances_the_record_information_on_the_working_grid() {
        for n in [2.0, 4.0] {
            for i in 0..16 {
                let g = 1e-3 + (0.05 * PI - 1e-3) * i as f64 / 15.0;
                let dist = postselect_prob(&balanced(PI), &meter(n), coupling(g)).unwrap();
                let f_p =
                    classical_fisher_two_outcome(dist.p_d, pd_derivative_closed(n, g, PI)).unwrap();
                for r in [0.0, 0.3, 0.6, 0.9, 0.95] {
                    let mirror = MirrorSpec::resonant(r).unwrap();
                    let ledger =
                        f_pow_exact(&balanced(PI), &meter(n), coupling(g), &mirror, 1e-5).unwrap();
                    assert!(
                        ledger.f_pow >= f_p * (1.0 - 1e-12),
                        "no enhancement at n={n} g={g} r={r}: {} < {f_p}",
                        ledger.f_pow
                    );
                }
            }
        }
    }

    #[test]
    fn degenerate_recycled_branch_is_an_error() {
        // g = 0 at φ₀ = π sends every photon back to the source.
        let res = f_pow_exact(
            &balanced(PI),
            &meter(4.0),
            coupling(0.0),
            &MirrorSpec::resonant(0.5).unwrap(),
            1e-5,
        );
        assert!(matches!(res, Err(Error::DegenerateBranch { .. })));
    }
}
