//! Coherent-state overlap algebra and conditional meter states.
//!
//! A two-level system prepared in `|ψ_i⟩ = cos(θ_i/2)|g⟩ + sin(θ_i/2)e^{iφ_i}|e⟩`
//! is coupled to a coherent meter `|α⟩` by the unitary `exp(i g σ_z n̂)`, which
//! rotates the meter phase by `∓g` depending on the system eigenstate.
//! Projecting the system onto `|ψ_f⟩` (accept) or its orthogonal complement
//! (reject) leaves the meter in an unnormalized two-component superposition of
//! counter-rotated coherent states. Everything downstream — postselection
//! probabilities, conditional QFIs, the information ledger — reduces to inner
//! products among such superpositions and their first `g`-derivatives, all of
//! which close under the moment overlaps `⟨β|n̂^k|γ⟩` for `k ≤ 2`. This module
//! provides that algebra exactly, with no truncation.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest power of the number operator the overlap engine can absorb in a
/// single bra-ket pair. First derivatives of bare superpositions produce at
/// most `n̂²` between them.
const MAX_MOMENT_ORDER: u8 = 2;

fn ensure_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(format!("{what} must be finite, got {value}")))
    }
}

fn ensure_finite_c(value: C64, what: &str) -> Result<C64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(format!("{what} must be finite, got {value}")))
    }
}

/// Coherent meter preparation.
///
/// Stores only the complex amplitude; the mean photon number is always derived
/// as `|α|²` so the two can never drift apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterSpec {
    alpha: C64,
}

impl MeterSpec {
    pub fn new(alpha: C64) -> Result<Self> {
        ensure_finite_c(alpha, "coherent amplitude")?;
        Ok(MeterSpec { alpha })
    }

    /// Real, non-negative amplitude `α = √n` for a given mean photon number.
    pub fn from_mean_photons(n: f64) -> Result<Self> {
        ensure_finite(n, "mean photon number")?;
        if n < 0.0 {
            return Err(Error::invalid(format!("mean photon number must be >= 0, got {n}")));
        }
        Ok(MeterSpec { alpha: C64::new(n.sqrt(), 0.0) })
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    /// Mean photon number `n = |α|²`.
    pub fn mean_photons(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

/// Pre- and postselection of the two-level system.
///
/// The branch coefficients and the relative phase `φ₀ = φ_i − φ_f` are derived
/// on demand. The reject branch uses the orthogonal complement of the accept
/// state, `|ψ_r⟩ = sin(θ_f/2)|g⟩ − cos(θ_f/2)e^{iφ_f}|e⟩`, so that the two
/// branch probabilities always sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionSpec {
    pub theta_i: f64,
    pub phi_i: f64,
    pub theta_f: f64,
    pub phi_f: f64,
}

impl SelectionSpec {
    pub fn new(theta_i: f64, phi_i: f64, theta_f: f64, phi_f: f64) -> Result<Self> {
        ensure_finite(theta_i, "theta_i")?;
        ensure_finite(phi_i, "phi_i")?;
        ensure_finite(theta_f, "theta_f")?;
        ensure_finite(phi_f, "phi_f")?;
        Ok(SelectionSpec { theta_i, phi_i, theta_f, phi_f })
    }

    /// Convenience constructor when only the relative phase matters.
    pub fn from_phi0(theta_i: f64, theta_f: f64, phi0: f64) -> Result<Self> {
        SelectionSpec::new(theta_i, phi0, theta_f, 0.0)
    }

    /// Relative phase between pre- and postselected states.
    pub fn phi0(&self) -> f64 {
        self.phi_i - self.phi_f
    }

    /// Accept-branch coefficients `(c_g, c_e)` multiplying the two rotated
    /// meter components.
    pub fn accept_coeffs(&self) -> (f64, f64) {
        (
            (self.theta_i / 2.0).cos() * (self.theta_f / 2.0).cos(),
            (self.theta_i / 2.0).sin() * (self.theta_f / 2.0).sin(),
        )
    }

    /// Reject-branch coefficients `(r_g, r_e)`; the excited component enters
    /// the superposition with a minus sign.
    pub fn reject_coeffs(&self) -> (f64, f64) {
        (
            (self.theta_i / 2.0).cos() * (self.theta_f / 2.0).sin(),
            (self.theta_i / 2.0).sin() * (self.theta_f / 2.0).cos(),
        )
    }
}

/// Dimensionless system-meter coupling strength, in radians of meter phase
/// per σ_z quantum. Weak coupling `|g| ≪ 1` is the intended regime but not a
/// precondition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    g: f64,
}

impl CouplingSpec {
    pub fn new(g: f64) -> Result<Self> {
        ensure_finite(g, "coupling g")?;
        Ok(CouplingSpec { g })
    }

    pub fn g(&self) -> f64 {
        self.g
    }
}

/// Postselection outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Accept,
    Reject,
}

/// One term of a [`BranchSuperposition`]: `coeff · n̂^number_power |label⟩`.
///
/// `phase_sign` records which σ_z eigenvalue produced the label's rotation,
/// i.e. `label = α e^{phase_sign · i g}`; differentiating with respect to the
/// coupling multiplies the term by `phase_sign · i n̂`. `sector` tags mutually
/// orthogonal system levels so that joint system-meter states can share the
/// same representation: overlaps between different sectors vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub coeff: C64,
    pub label: C64,
    pub phase_sign: i8,
    pub number_power: u8,
    pub sector: u8,
}

/// Weighted sum of (number-operator powers of) coherent states.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BranchSuperposition {
    components: Vec<Component>,
}

/// `⟨β|γ⟩ = exp(−|β|²/2 − |γ|²/2 + β̄γ)`.
pub fn coherent_overlap(beta: C64, gamma: C64) -> Result<C64> {
    ensure_finite_c(beta, "overlap bra amplitude")?;
    ensure_finite_c(gamma, "overlap ket amplitude")?;
    Ok((beta.conj() * gamma - C64::new(0.5 * (beta.norm_sqr() + gamma.norm_sqr()), 0.0)).exp())
}

/// `⟨β|n̂|γ⟩` or `⟨β|n̂²|γ⟩` in closed form:
/// `⟨β|n̂|γ⟩ = β̄γ ⟨β|γ⟩` and `⟨β|n̂²|γ⟩ = (β̄γ + (β̄γ)²) ⟨β|γ⟩`.
pub fn number_weighted_overlap(beta: C64, gamma: C64, order: u8) -> Result<C64> {
    let bare = coherent_overlap(beta, gamma)?;
    let cross = beta.conj() * gamma;
    match order {
        1 => Ok(cross * bare),
        2 => Ok((cross + cross * cross) * bare),
        other => Err(Error::invalid(format!(
            "number-weighted overlap supports orders 1 and 2, got {other}"
        ))),
    }
}

fn moment_overlap(beta: C64, gamma: C64, order: u8) -> Result<C64> {
    match order {
        0 => coherent_overlap(beta, gamma),
        1 | 2 => number_weighted_overlap(beta, gamma, order),
        other => Err(Error::UnsupportedOperation(format!(
            "overlap with total number-operator power {other} (max {MAX_MOMENT_ORDER})"
        ))),
    }
}

impl BranchSuperposition {
    pub fn from_components(components: Vec<Component>) -> Self {
        BranchSuperposition { components }
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `⟨self|other⟩`, expanding every bra-ket pair into a moment overlap.
    pub fn overlap(&self, other: &BranchSuperposition) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for a in &self.components {
            for b in &other.components {
                if a.sector != b.sector {
                    continue;
                }
                let order = a.number_power + b.number_power;
                acc += a.coeff.conj() * b.coeff * moment_overlap(a.label, b.label, order)?;
            }
        }
        Ok(acc)
    }

    /// Squared norm; the imaginary part of `⟨Φ|Φ⟩` must vanish to roundoff.
    pub fn norm_sqr(&self) -> Result<f64> {
        let ip = self.overlap(self)?;
        if ip.im.abs() > 1e-10 * (1.0 + ip.re.abs()) {
            return Err(Error::Numerical(format!(
                "self-overlap has non-negligible imaginary part {:e}",
                ip.im
            )));
        }
        if ip.re < -1e-10 {
            return Err(Error::Numerical(format!("negative squared norm {:e}", ip.re)));
        }
        Ok(ip.re.max(0.0))
    }

    /// Same superposition with every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: C64) -> Self {
        BranchSuperposition {
            components: self
                .components
                .iter()
                .map(|c| Component { coeff: factor * c.coeff, ..*c })
                .collect(),
        }
    }

    /// Concatenate the terms of two superpositions (vector addition).
    pub fn sum(&self, other: &BranchSuperposition) -> Self {
        let mut components = self.components.clone();
        components.extend_from_slice(&other.components);
        BranchSuperposition { components }
    }
}

/// Derivative of a bare superposition with respect to the coupling:
/// each component `c · |α e^{s i g}⟩` becomes `s i c · n̂ |α e^{s i g}⟩`.
///
/// Only first derivatives are representable; a second request is refused.
pub fn meter_g_derivative(state: &BranchSuperposition) -> Result<BranchSuperposition> {
    if state.components.iter().any(|c| c.number_power != 0) {
        return Err(Error::UnsupportedOperation(
            "second derivative of a meter superposition".into(),
        ));
    }
    Ok(BranchSuperposition {
        components: state
            .components
            .iter()
            .map(|c| Component {
                coeff: C64::new(0.0, f64::from(c.phase_sign)) * c.coeff,
                number_power: 1,
                ..*c
            })
            .collect(),
    })
}

/// Unnormalized conditional meter state after postselection.
///
/// The accept branch is `c_g |αe^{−ig}⟩ + c_e e^{iφ₀} |αe^{ig}⟩`; the reject
/// branch is `r_g |αe^{−ig}⟩ − r_e e^{iφ₀} |αe^{ig}⟩`. Components with an
/// exactly-zero coefficient (e.g. postselection onto a system eigenstate) are
/// dropped.
pub fn conditional_meter(
    sel: &SelectionSpec,
    meter: &MeterSpec,
    g: CouplingSpec,
    branch: Branch,
) -> BranchSuperposition {
    let rot = C64::new(0.0, g.g()).exp();
    let label_g = meter.alpha() * rot.conj();
    let label_e = meter.alpha() * rot;
    let phase = C64::new(0.0, sel.phi0()).exp();
    let (w_g, w_e) = match branch {
        Branch::Accept => {
            let (c_g, c_e) = sel.accept_coeffs();
            (C64::new(c_g, 0.0), phase * c_e)
        }
        Branch::Reject => {
            let (r_g, r_e) = sel.reject_coeffs();
            (C64::new(r_g, 0.0), -phase * r_e)
        }
    };
    let mut components = Vec::with_capacity(2);
    if w_g != C64::new(0.0, 0.0) {
        components.push(Component {
            coeff: w_g,
            label: label_g,
            phase_sign: -1,
            number_power: 0,
            sector: 0,
        });
    }
    if w_e != C64::new(0.0, 0.0) {
        components.push(Component {
            coeff: w_e,
            label: label_e,
            phase_sign: 1,
            number_power: 0,
            sector: 0,
        });
    }
    BranchSuperposition { components }
}

/// Joint system-meter state after the coupling, before postselection.
/// The two system levels are kept as orthogonal sectors.
pub fn joint_state(sel: &SelectionSpec, meter: &MeterSpec, g: CouplingSpec) -> BranchSuperposition {
    let rot = C64::new(0.0, g.g()).exp();
    BranchSuperposition {
        components: vec![
            Component {
                coeff: C64::new((sel.theta_i / 2.0).cos(), 0.0),
                label: meter.alpha() * rot.conj(),
                phase_sign: -1,
                number_power: 0,
                sector: 0,
            },
            Component {
                coeff: C64::new(0.0, sel.phi_i).exp() * (sel.theta_i / 2.0).sin(),
                label: meter.alpha() * rot,
                phase_sign: 1,
                number_power: 0,
                sector: 1,
            },
        ],
    }
}

/// Probabilities of the two postselection outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostselectionDistribution {
    pub p_d: f64,
    pub p_r: f64,
}

/// `‖a|β₁⟩ + b|β₂⟩‖²` with `⟨β₁|β₂⟩ = E e^{iψ_ov}` and real weights,
/// `P = a² + b² + 2ab E cos ψ`, grouped so that every addend is non-negative.
///
/// The naive sum cancels catastrophically at dark ports (`P → 0` from
/// O(1) terms), which destroys the relative accuracy that the conditional
/// QFI's `1/P²` weights demand. Writing `1 ± E cos ψ` through `1 − E`
/// (via `expm1`) and half-angle squares keeps full relative precision.
fn stable_two_component_norm(a: f64, b: f64, one_minus_env: f64, psi: f64) -> f64 {
    let env = 1.0 - one_minus_env;
    let cross = a * b;
    let half = 0.5 * psi;
    if cross >= 0.0 {
        // 1 + E cos ψ = (1 − E) + 2E cos²(ψ/2)
        (a - b).powi(2) + 2.0 * cross * (one_minus_env + 2.0 * env * half.cos().powi(2))
    } else {
        // 1 − E cos ψ = (1 − E) + 2E sin²(ψ/2)
        (a + b).powi(2) - 2.0 * cross * (one_minus_env + 2.0 * env * half.sin().powi(2))
    }
}

/// `{P_d, P_r}` — the squared norms of the two conditional branches,
/// evaluated in the cancellation-free grouping.
pub fn postselect_prob(
    sel: &SelectionSpec,
    meter: &MeterSpec,
    g: CouplingSpec,
) -> Result<PostselectionDistribution> {
    let n = meter.mean_photons();
    if !n.is_finite() {
        return Err(Error::invalid(format!("mean photon number must be finite, got {n}")));
    }
    let one_minus_env = -(-2.0 * n * g.g().sin().powi(2)).exp_m1();
    let psi = n * (2.0 * g.g()).sin() + sel.phi0();
    let (c_g, c_e) = sel.accept_coeffs();
    let (r_g, r_e) = sel.reject_coeffs();
    let p_d = stable_two_component_norm(c_g, c_e, one_minus_env, psi).clamp(0.0, 1.0);
    let p_r = stable_two_component_norm(r_g, -r_e, one_minus_env, psi).clamp(0.0, 1.0);
    Ok(PostselectionDistribution { p_d, p_r })
}

/// Closed-form success probability for the balanced selection
/// `θ_i = θ_f = π/2`:
/// `P_d = [1 + e^{−2n sin²g} cos(n sin 2g + φ₀)] / 2`.
pub fn postselect_prob_closed(n: f64, g: f64, phi0: f64) -> Result<f64> {
    ensure_finite(n, "mean photon number")?;
    ensure_finite(g, "coupling g")?;
    ensure_finite(phi0, "phi0")?;
    if n < 0.0 {
        return Err(Error::invalid(format!("mean photon number must be >= 0, got {n}")));
    }
    let envelope = (-2.0 * n * g.sin().powi(2)).exp();
    let value = 0.5 * (1.0 + envelope * (n * (2.0 * g).sin() + phi0).cos());
    Ok(value.clamp(0.0, 1.0))
}
