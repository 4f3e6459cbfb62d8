//! Classical and quantum Fisher information and the three-way ledger.
//!
//! For a pure meter state `|Φ(g)⟩` the quantum Fisher information is
//! `Q = 4[⟨∂Φ|∂Φ⟩ − |⟨Φ|∂Φ⟩|²]`; for the binary postselection record
//! `{P_d, P_r}` the classical Fisher information is
//! `F_p = (dP_d/dg)² / (P_d P_r)`. The total information available from the
//! preparation is the joint-state QFI `Q_j = 4n² sin²θ_i + 4n`, and it splits
//! into what the accepted photons, the rejected photons, and the postselection
//! record itself carry:
//!
//! ```text
//! F_tot = P_d Q_d + P_r Q_r + F_p  ≤  Q_j
//! ```
//!
//! Moving the selection phase `φ₀` slides information between `F_p` and
//! `P_d Q_d`; the record's share peaks at `φ₀ = π` and empties at
//! `φ₀ = π − n sin 2g − 2g`, where the accepted photons carry almost all of it.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::{
    conditional_meter, meter_g_derivative, postselect_prob, Branch, BranchSuperposition,
    CouplingSpec, MeterSpec, SelectionSpec,
};

/// Branch probabilities below this are treated as vanishing: the conditional
/// state is undefined and the branch contributes zero weighted information.
pub const DEGENERATE_PROB: f64 = 1e-12;

/// Slack for the floating-point clamp of slightly negative QFI values.
const QFI_CLAMP: f64 = 1e-10;

/// One parameter point of the information ledger, all entries in units of
/// `g⁻²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherLedger {
    /// Probability-weighted QFI of the accepted photons.
    pub pd_qd: f64,
    /// Probability-weighted QFI of the rejected photons.
    pub pr_qr: f64,
    /// Classical information in the postselection record.
    pub f_p: f64,
    /// Sum of the three shares.
    pub f_tot: f64,
    /// Joint-state QFI bounding the total.
    pub q_j: f64,
}

/// The (generally complex) weak value of σ_z for a given selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValue {
    pub value: C64,
}

/// Fisher information of a two-outcome distribution `{p, 1−p}` with
/// `dp/dg` supplied by the caller: `(dp/dg)² / (p(1−p))`.
///
/// When one outcome probability vanishes together with the derivative the
/// limit is removable and zero is returned; a vanishing probability with a
/// surviving derivative is a genuine divergence and is reported as an error.
pub fn classical_fisher_two_outcome(p_d: f64, dp_d_dg: f64) -> Result<f64> {
    if !p_d.is_finite() || !(0.0..=1.0).contains(&p_d) {
        return Err(Error::invalid(format!("probability must lie in [0,1], got {p_d}")));
    }
    if !dp_d_dg.is_finite() {
        return Err(Error::invalid(format!("derivative must be finite, got {dp_d_dg}")));
    }
    let eps = 1e-12;
    if p_d < eps || 1.0 - p_d < eps {
        if dp_d_dg.abs() < eps.sqrt() {
            return Ok(0.0);
        }
        return Err(Error::SingularLimit(format!(
            "outcome probability {p_d:.3e} vanishes while derivative {dp_d_dg:.3e} does not"
        )));
    }
    Ok(dp_d_dg * dp_d_dg / (p_d * (1.0 - p_d)))
}

/// Closed-form `dP_d/dg` in the balanced-selection regime `θ_i = θ_f = π/2`:
/// `P_d' = −n e^{−2n sin²g} sin(n sin 2g + φ₀ + 2g)`.
pub fn pd_derivative_closed(n: f64, g: f64, phi0: f64) -> f64 {
    -n * (-2.0 * n * g.sin().powi(2)).exp() * (n * (2.0 * g).sin() + phi0 + 2.0 * g).sin()
}

/// `dP_d/dg` for an arbitrary selection, evaluated exactly through the
/// overlap algebra as `2 Re⟨Φ̃_d|∂_g Φ̃_d⟩`.
pub fn postselect_prob_derivative(
    sel: &SelectionSpec,
    meter: &MeterSpec,
    g: CouplingSpec,
) -> Result<f64> {
    let raw = conditional_meter(sel, meter, g, Branch::Accept);
    let deriv = meter_g_derivative(&raw)?;
    Ok(2.0 * raw.overlap(&deriv)?.re)
}

/// QFI of a normalized pure state given the derivative of that normalized
/// state: `4[⟨∂Φ|∂Φ⟩ − |⟨Φ|∂Φ⟩|²]`.
///
/// The derivative must already include any `g`-dependence of the
/// normalization. Values in `[−1e−10, 0)` are floating-point cancellation and
/// clamp to zero; anything more negative indicates a bug upstream.
pub fn qfi_pure(state: &BranchSuperposition, deriv: &BranchSuperposition) -> Result<f64> {
    let norm = state.norm_sqr()?;
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!(
            "QFI requires a normalized state, squared norm is {norm}"
        )));
    }
    let dd = deriv.overlap(deriv)?.re;
    let sd = state.overlap(deriv)?;
    clamp_qfi(4.0 * (dd - sd.norm_sqr()), dd.abs() + sd.norm_sqr())
}

/// Clamp tiny negative QFI values to zero. The admissible window scales with
/// the magnitude of the terms that cancelled, so roundoff at ill-conditioned
/// points is forgiven while genuinely negative results still surface as bugs.
fn clamp_qfi(q: f64, cancelled_magnitude: f64) -> Result<f64> {
    let window = QFI_CLAMP * cancelled_magnitude.max(1.0);
    if q < -window {
        return Err(Error::Numerical(format!(
            "QFI evaluated to {q:e}, below the roundoff window {window:e}"
        )));
    }
    Ok(q.max(0.0))
}

/// QFI of the normalized conditional meter state for one postselection
/// branch.
///
/// The normalized derivative is the quotient rule
/// `∂_g(Φ̃/√P) = Φ̃'/√P − (P'/2P^{3/2}) Φ̃`; substituting it into the QFI and
/// using `Re⟨Φ̃|Φ̃'⟩ = P'/2` collapses the expression to
/// `Q = 4[⟨Φ̃'|Φ̃'⟩/P − |⟨Φ̃|Φ̃'⟩|²/P²]`, which is what is evaluated here with
/// the cancellation-free `P`.
pub fn conditional_qfi(
    sel: &SelectionSpec,
    meter: &MeterSpec,
    g: CouplingSpec,
    branch: Branch,
) -> Result<f64> {
    let dist = postselect_prob(sel, meter, g)?;
    let p = match branch {
        Branch::Accept => dist.p_d,
        Branch::Reject => dist.p_r,
    };
    if p < DEGENERATE_PROB {
        return Err(Error::DegenerateBranch { probability: p });
    }
    let raw = conditional_meter(sel, meter, g, branch);
    let raw_deriv = meter_g_derivative(&raw)?;
    let dd = raw_deriv.overlap(&raw_deriv)?.re;
    let sd = raw.overlap(&raw_deriv)?;
    let (term_dd, term_sd) = (dd / p, sd.norm_sqr() / (p * p));
    clamp_qfi(4.0 * (term_dd - term_sd), term_dd.abs() + term_sd)
}

/// Joint-state QFI, `Q_j = 4n² sin²θ_i + 4n`. The same number falls out of
/// [`qfi_pure`] applied to [`crate::state::joint_state`]; the closed form is
/// returned here.
pub fn joint_qfi(sel: &SelectionSpec, meter: &MeterSpec) -> f64 {
    let n = meter.mean_photons();
    4.0 * n * n * sel.theta_i.sin().powi(2) + 4.0 * n
}

/// Assemble the full ledger at one parameter point.
///
/// Degenerate branches contribute zero weighted QFI; a singular classical
/// limit propagates as an error. The additivity of the three shares holds by
/// construction, and the joint bound `f_tot ≤ q_j` is checked before
/// returning.
pub fn fisher_ledger(sel: &SelectionSpec, meter: &MeterSpec, g: CouplingSpec) -> Result<FisherLedger> {
    let dist = postselect_prob(sel, meter, g)?;
    let weighted = |p: f64, branch: Branch| -> Result<f64> {
        if p < DEGENERATE_PROB {
            Ok(0.0)
        } else {
            Ok(p * conditional_qfi(sel, meter, g, branch)?)
        }
    };
    let pd_qd = weighted(dist.p_d, Branch::Accept)?;
    let pr_qr = weighted(dist.p_r, Branch::Reject)?;
    let f_p = classical_fisher_two_outcome(dist.p_d, postselect_prob_derivative(sel, meter, g)?)?;
    let f_tot = pd_qd + pr_qr + f_p;
    let q_j = joint_qfi(sel, meter);
    if f_tot > q_j * (1.0 + 1e-8) {
        return Err(Error::Numerical(format!(
            "ledger total {f_tot} exceeds the joint QFI bound {q_j}"
        )));
    }
    Ok(FisherLedger { pd_qd, pr_qr, f_p, f_tot, q_j })
}

/// Weak value of σ_z,
/// `A_w = (sinθ_i sinθ_f e^{iφ₀} − cosθ_i cosθ_f) / (sinθ_i sinθ_f e^{iφ₀} + cosθ_i cosθ_f)`.
pub fn weak_value(sel: &SelectionSpec) -> Result<WeakValue> {
    let cross = C64::new(0.0, sel.phi0()).exp() * (sel.theta_i.sin() * sel.theta_f.sin());
    let diag = C64::new(sel.theta_i.cos() * sel.theta_f.cos(), 0.0);
    let den = cross + diag;
    if den.norm() <= 1e-14 {
        return Err(Error::OrthogonalPostselection);
    }
    Ok(WeakValue { value: (cross - diag) / den })
}

/// Selection phase at which the postselection record carries no information
/// and the accepted photons peak: `φ₀ = π − n sin 2g − 2g`, reduced to
/// `[0, 2π)`.
pub fn peak_phi0(n: f64, g: f64) -> Result<f64> {
    if !n.is_finite() || n < 0.0 {
        return Err(Error::invalid(format!("mean photon number must be >= 0, got {n}")));
    }
    if !g.is_finite() {
        return Err(Error::invalid(format!("coupling must be finite, got {g}")));
    }
    Ok((std::f64::consts::PI - n * (2.0 * g).sin() - 2.0 * g).rem_euclid(std::f64::consts::TAU))
}

/// Zero-coupling limit of the record information at `φ₀ = π`:
/// `F_p → 4n(n+1)`, which saturates the joint bound for `θ_i = π/2`.
pub fn fp_small_g_limit(n: f64) -> Result<f64> {
    if !n.is_finite() || n < 0.0 {
        return Err(Error::invalid(format!("mean photon number must be >= 0, got {n}")));
    }
    Ok(4.0 * n * (n + 1.0))
}

/// Cramér-Rao lower bound on the estimator variance, `Var(g) ≥ 1/(N F)`.
pub fn cramer_rao_bound(fisher: f64, trials: u64) -> Result<f64> {
    if !(fisher > 0.0) || !fisher.is_finite() {
        return Err(Error::invalid(format!("Fisher information must be positive, got {fisher}")));
    }
    if trials == 0 {
        return Err(Error::invalid("trial count must be at least 1"));
    }
    Ok(1.0 / (trials as f64 * fisher))
}
