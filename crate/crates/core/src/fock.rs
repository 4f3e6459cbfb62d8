//! Brute-force verification path on a truncated Fock basis.
//!
//! Everything the analytic modules compute in closed form is recomputed here
//! from first principles: coherent states are expanded on `|0…K⟩` with a
//! provably negligible tail, derivatives are central finite differences with a
//! mandatory step-halving self-check, and Fisher/QFI values come straight from
//! their definitions. [`oracle_report`] runs both paths over a set of
//! parameter points and tabulates the relative errors.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fisher::{classical_fisher_two_outcome, conditional_qfi, joint_qfi, postselect_prob_derivative};
use crate::recycling::{f_pow_exact, MirrorSpec};
use crate::state::{postselect_prob, Branch, CouplingSpec, MeterSpec, SelectionSpec};

/// Basis-size policy: the smallest `K` whose Poisson tail mass is below
/// `tail_tol`, floored at `n + 10√n + 20` and hard-capped to bound memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    tail_tol: f64,
    cap: usize,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        TruncationSpec { tail_tol: 1e-14, cap: 4096 }
    }
}

impl TruncationSpec {
    pub fn new(tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0) || !tail_tol.is_finite() {
            return Err(Error::invalid(format!("tail tolerance must be > 0, got {tail_tol}")));
        }
        Ok(TruncationSpec { tail_tol, ..Default::default() })
    }

    pub fn with_cap(tail_tol: f64, cap: usize) -> Result<Self> {
        let mut spec = TruncationSpec::new(tail_tol)?;
        spec.cap = cap;
        Ok(spec)
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Truncation index for a coherent state of mean photon number `n`.
    pub fn k_max(&self, n: f64) -> Result<usize> {
        if !n.is_finite() || n < 0.0 {
            return Err(Error::invalid(format!("mean photon number must be >= 0, got {n}")));
        }
        let floor = (n + 10.0 * n.sqrt() + 20.0).ceil() as usize;
        let mut term = (-n).exp();
        let mut cdf = term;
        let mut k = 0usize;
        while 1.0 - cdf >= self.tail_tol {
            k += 1;
            term *= n / k as f64;
            let next = cdf + term;
            // Past the Poisson mode the increments shrink monotonically; once
            // they fall below f64 resolution the basis is as complete as the
            // arithmetic allows.
            if next == cdf && (k as f64) > n {
                break;
            }
            cdf = next;
            if k > self.cap {
                return Err(Error::TruncationOverflow { required: k, cap: self.cap });
            }
        }
        let required = k.max(floor);
        if required > self.cap {
            return Err(Error::TruncationOverflow { required, cap: self.cap });
        }
        Ok(required)
    }
}

/// Dense state vector on the truncated number basis. Joint system-meter
/// states are represented by stacking one meter block per system level.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<C64>,
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

impl FockVector {
    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        FockVector { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `⟨self|other⟩` with compensated summation.
    pub fn dot(&self, other: &FockVector) -> Result<C64> {
        if self.len() != other.len() {
            return Err(Error::Numerical(format!(
                "dot product of vectors with lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        let re = kahan_sum(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a.conj() * b).re));
        let im = kahan_sum(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a.conj() * b).im));
        Ok(C64::new(re, im))
    }

    pub fn norm_sqr(&self) -> f64 {
        kahan_sum(self.coeffs.iter().map(|c| c.norm_sqr()))
    }

    pub fn scaled(&self, factor: C64) -> FockVector {
        FockVector { coeffs: self.coeffs.iter().map(|c| factor * c).collect() }
    }

    pub fn add(&self, other: &FockVector) -> Result<FockVector> {
        if self.len() != other.len() {
            return Err(Error::Numerical("adding vectors of different lengths".into()));
        }
        Ok(FockVector {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &FockVector) -> Result<FockVector> {
        self.add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    pub fn normalized(&self) -> Result<FockVector> {
        let norm = self.norm_sqr();
        if norm <= 0.0 {
            return Err(Error::Numerical("cannot normalize a zero vector".into()));
        }
        Ok(self.scaled(C64::new(1.0 / norm.sqrt(), 0.0)))
    }
}

/// Recurrence `c_0 = e^{−|α|²/2}`, `c_k = c_{k−1} α/√k` on a fixed basis size.
fn expand_on_basis(alpha: C64, k_max: usize, tail_tol: f64) -> Result<FockVector> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::invalid(format!("coherent amplitude must be finite, got {alpha}")));
    }
    let n = alpha.norm_sqr();
    let mut coeffs = vec![C64::new(0.0, 0.0); k_max + 1];
    coeffs[0] = C64::new((-n / 2.0).exp(), 0.0);
    for k in 1..=k_max {
        coeffs[k] = coeffs[k - 1] * alpha / C64::new((k as f64).sqrt(), 0.0);
    }
    let vector = FockVector { coeffs };
    let missing = 1.0 - vector.norm_sqr();
    if missing >= tail_tol + 1e-13 {
        return Err(Error::TruncationOverflow { required: k_max + 1, cap: k_max });
    }
    Ok(vector)
}

/// Expand `|α⟩` on the truncated basis by the factorial-free recurrence
/// `c_0 = e^{−|α|²/2}`, `c_k = c_{k−1} α/√k`.
pub fn coherent_to_fock(alpha: C64, trunc: &TruncationSpec) -> Result<FockVector> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::invalid(format!("coherent amplitude must be finite, got {alpha}")));
    }
    let k_max = trunc.k_max(alpha.norm_sqr())?;
    expand_on_basis(alpha, k_max, trunc.tail_tol())
}

/// Numeric counterpart of the analytic conditional meter state.
///
/// The basis size is derived once from the meter's photon number, so vectors
/// for nearby couplings share a basis and can be differenced.
pub fn oracle_conditional(
    sel: &SelectionSpec,
    meter: &MeterSpec,
    g: CouplingSpec,
    branch: Branch,
    trunc: &TruncationSpec,
) -> Result<FockVector> {
    let k_max = trunc.k_max(meter.mean_photons())?;
    let rot = C64::new(0.0, g.g()).exp();
    let low = expand_on_basis(meter.alpha() * rot.conj(), k_max, trunc.tail_tol())?;
    let high = expand_on_basis(meter.alpha() * rot, k_max, trunc.tail_tol())?;
    let phase = C64::new(0.0, sel.phi0()).exp();
    let (w_low, w_high) = match branch {
        Branch::Accept => {
            let (c_g, c_e) = sel.accept_coeffs();
            (C64::new(c_g, 0.0), phase * c_e)
        }
        Branch::Reject => {
            let (r_g, r_e) = sel.reject_coeffs();
            (C64::new(r_g, 0.0), -phase * r_e)
        }
    };
    low.scaled(w_low).add(&high.scaled(w_high))
}

/// Joint system-meter vector: the two meter blocks are stacked, since the
/// system levels are orthogonal.
pub fn oracle_joint(
    sel: &SelectionSpec,
    meter: &MeterSpec,
    g: CouplingSpec,
    trunc: &TruncationSpec,
) -> Result<FockVector> {
    let k_max = trunc.k_max(meter.mean_photons())?;
    let rot = C64::new(0.0, g.g()).exp();
    let low = expand_on_basis(meter.alpha() * rot.conj(), k_max, trunc.tail_tol())?;
    let high = expand_on_basis(meter.alpha() * rot, k_max, trunc.tail_tol())?;
    let w_low = C64::new((sel.theta_i / 2.0).cos(), 0.0);
    let w_high = C64::new(0.0, sel.phi_i).exp() * (sel.theta_i / 2.0).sin();
    let mut coeffs = Vec::with_capacity(2 * low.len());
    coeffs.extend(low.coeffs().iter().map(|c| w_low * c));
    coeffs.extend(high.coeffs().iter().map(|c| w_high * c));
    Ok(FockVector { coeffs })
}

fn steps_agree(coarse: f64, fine: f64) -> bool {
    (fine - coarse).abs() <= 1e-5 * fine.abs().max(coarse.abs()) + 1e-9
}

/// QFI by central differencing of a normalized state family:
/// `∂Φ ≈ (Φ(g+h) − Φ(g−h))/2h`, `Q = 4[⟨∂Φ|∂Φ⟩ − |⟨Φ|∂Φ⟩|²]`.
///
/// The estimate is recomputed at half the step; disagreement beyond 1e−5
/// relative signals a step-size error. The finer estimate is returned.
pub fn fd_qfi<F>(state_at: F, g: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<FockVector>,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid(format!("step must be > 0, got {h}")));
    }
    let base = state_at(g)?;
    let norm = base.norm_sqr();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::invalid(format!(
            "fd_qfi requires normalized states, squared norm is {norm}"
        )));
    }
    let eval = |step: f64| -> Result<f64> {
        let diff = state_at(g + step)?.sub(&state_at(g - step)?)?;
        let deriv = diff.scaled(C64::new(1.0 / (2.0 * step), 0.0));
        let dd = deriv.norm_sqr();
        let sd = base.dot(&deriv)?;
        Ok(4.0 * (dd - sd.norm_sqr()))
    };
    let coarse = eval(h)?;
    let fine = eval(h / 2.0)?;
    if !steps_agree(coarse, fine) {
        return Err(Error::StepSize { coarse, fine });
    }
    Ok(fine)
}

/// Two-outcome classical Fisher information with the derivative estimated by
/// central differences of `p(g)`, with the same step-halving gate as
/// [`fd_qfi`].
pub fn fd_classical_fi<F>(prob_at: F, g: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid(format!("step must be > 0, got {h}")));
    }
    let p0 = prob_at(g)?;
    let eval = |step: f64| -> Result<f64> {
        let dp = (prob_at(g + step)? - prob_at(g - step)?) / (2.0 * step);
        classical_fisher_two_outcome(p0, dp)
    };
    let coarse = eval(h)?;
    let fine = eval(h / 2.0)?;
    if !steps_agree(coarse, fine) {
        return Err(Error::StepSize { coarse, fine });
    }
    Ok(fine)
}

/// One parameter point of the verification grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OraclePoint {
    pub sel: SelectionSpec,
    pub meter: MeterSpec,
    pub g: CouplingSpec,
    pub mirror: MirrorSpec,
}

/// Knobs of [`oracle_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    /// Base finite-difference step (refined automatically on a step-size
    /// failure).
    pub fd_step: f64,
    pub trunc: TruncationSpec,
    /// Gate for probabilities and QFI quantities compared analytic-vs-oracle.
    pub tol_analytic: f64,
    /// Gate for quantities that chain finite differences (recycled set).
    pub tol_fd: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            fd_step: 1e-5,
            trunc: TruncationSpec::default(),
            tol_analytic: 1e-6,
            tol_fd: 1e-5,
        }
    }
}

/// Outcome of one quantity at one point.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Not checked, with the reason (degenerate branch, ill-conditioned FD).
    Skipped(String),
    /// The oracle evaluation itself failed.
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantityCheck {
    pub name: &'static str,
    pub analytic: Option<f64>,
    pub oracle: Option<f64>,
    pub rel_err: Option<f64>,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub index: usize,
    pub label: String,
    pub checks: Vec<QuantityCheck>,
}

/// Full comparison table plus the two group maxima and the overall verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub points: Vec<PointReport>,
    pub max_err_analytic: f64,
    pub max_err_fd: f64,
    pub tol_analytic: f64,
    pub tol_fd: f64,
    pub pass: bool,
}

impl OracleReport {
    /// Human-readable table, one line per checked quantity.
    pub fn render(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<6} {:<6} {:>24} {:>24} {:>10}  {}",
            "point", "qty", "analytic", "oracle", "rel_err", "status"
        );
        for point in &self.points {
            let _ = writeln!(out, "# {}", point.label);
            for check in &point.checks {
                let fmt_opt = |v: Option<f64>| match v {
                    Some(x) => format!("{x:.16e}"),
                    None => "-".to_string(),
                };
                let err = match check.rel_err {
                    Some(e) => format!("{e:.2e}"),
                    None => "-".to_string(),
                };
                let status = match &check.status {
                    CheckStatus::Pass => "ok".to_string(),
                    CheckStatus::Fail => "FAIL".to_string(),
                    CheckStatus::Skipped(reason) => format!("SKIPPED ({reason})"),
                    CheckStatus::Error(reason) => format!("ERROR ({reason})"),
                };
                let _ = writeln!(
                    out,
                    "{:<6} {:<6} {:>24} {:>24} {:>10}  {}",
                    format!("#{:03}", point.index),
                    check.name,
                    fmt_opt(check.analytic),
                    fmt_opt(check.oracle),
                    err,
                    status
                );
            }
        }
        let _ = writeln!(
            out,
            "max rel err: analytic group {:.3e} (tol {:.1e}), derivative-chained group {:.3e} (tol {:.1e})",
            self.max_err_analytic, self.tol_analytic, self.max_err_fd, self.tol_fd
        );
        let _ = writeln!(out, "verdict: {}", if self.pass { "PASS" } else { "FAIL" });
        out
    }
}

/// Branch probabilities this small make the normalized-state finite
/// difference ill-conditioned; the corresponding QFI rows are skipped.
const FD_PROB_FLOOR: f64 = 1e-3;
/// Probabilities this small make ratio quantities meaningless.
const PROB_FLOOR: f64 = 1e-9;

fn rel_err(analytic: f64, oracle: f64, scale: f64) -> f64 {
    let denom = analytic.abs().max(oracle.abs()).max(1e-9 * scale.max(1.0));
    (analytic - oracle).abs() / denom
}

#[derive(Default)]
struct Acc {
    max_analytic: f64,
    max_fd: f64,
    pass_failed: bool,
}

fn record_check(
    acc: &mut Acc,
    checks: &mut Vec<QuantityCheck>,
    name: &'static str,
    fd_group: bool,
    scale: f64,
    tol: f64,
    analytic: Result<f64>,
    oracle: Result<f64>,
) {
    let check = match (analytic, oracle) {
        (Ok(a), Ok(o)) => {
            let err = rel_err(a, o, scale);
            if fd_group {
                acc.max_fd = acc.max_fd.max(err);
            } else {
                acc.max_analytic = acc.max_analytic.max(err);
            }
            let status = if err <= tol {
                CheckStatus::Pass
            } else {
                acc.pass_failed = true;
                CheckStatus::Fail
            };
            QuantityCheck { name, analytic: Some(a), oracle: Some(o), rel_err: Some(err), status }
        }
        (a, o) => {
            let reason = match (&a, &o) {
                (Err(e), _) => format!("analytic: {e}"),
                (_, Err(e)) => format!("oracle: {e}"),
                _ => unreachable!(),
            };
            acc.pass_failed = true;
            QuantityCheck {
                name,
                analytic: a.ok(),
                oracle: o.ok(),
                rel_err: None,
                status: CheckStatus::Error(reason),
            }
        }
    };
    checks.push(check);
}

fn skip_check(checks: &mut Vec<QuantityCheck>, name: &'static str, reason: String) {
    checks.push(QuantityCheck {
        name,
        analytic: None,
        oracle: None,
        rel_err: None,
        status: CheckStatus::Skipped(reason),
    });
}

/// Run the full analytic-vs-oracle comparison over a set of points.
///
/// Per point the quantities `{P_d, P_r, Q_d, Q_r, Q_j, F_p}` are gated at
/// `tol_analytic` and the recycled set `{P_c, P_b, F_pow}` at `tol_fd`.
/// Degenerate or FD-hostile rows are skipped with a reason instead of
/// failing; genuine evaluation errors fail the report.
pub fn oracle_report(points: &[OraclePoint], opts: &ReportOptions) -> Result<OracleReport> {
    if points.is_empty() {
        return Err(Error::invalid("oracle report needs at least one parameter point"));
    }
    let mut reports = Vec::with_capacity(points.len());
    let mut acc = Acc::default();

    for (index, point) in points.iter().enumerate() {
        let sel = point.sel;
        let meter = point.meter;
        let g = point.g;
        let mirror = point.mirror;
        let trunc = opts.trunc;
        let h = opts.fd_step;
        let scale = joint_qfi(&sel, &meter);

        let label = format!(
            "n={:.4} theta_i={:.6} theta_f={:.6} phi0={:.6} g={:.6} r={:.3}",
            meter.mean_photons(),
            sel.theta_i,
            sel.theta_f,
            sel.phi0(),
            g.g(),
            mirror.r()
        );

        let mut checks: Vec<QuantityCheck> = Vec::with_capacity(9);

        // Probabilities.
        let dist = postselect_prob(&sel, &meter, g)?;
        let p_d_oracle = oracle_conditional(&sel, &meter, g, Branch::Accept, &trunc)?.norm_sqr();
        let p_r_oracle = oracle_conditional(&sel, &meter, g, Branch::Reject, &trunc)?.norm_sqr();
        record_check(
            &mut acc, &mut checks, "P_d", false, 1.0, opts.tol_analytic,
            Ok(dist.p_d), Ok(p_d_oracle),
        );
        record_check(
            &mut acc, &mut checks, "P_r", false, 1.0, opts.tol_analytic,
            Ok(dist.p_r), Ok(p_r_oracle),
        );

        // Worst-case branch probabilities across the FD stencil.
        let stencil_min = |branch: Branch| -> Result<f64> {
            let mut min = f64::INFINITY;
            for offset in [-h, -h / 2.0, 0.0, h / 2.0, h] {
                let d = postselect_prob(&sel, &meter, CouplingSpec::new(g.g() + offset)?)?;
                let p = match branch {
                    Branch::Accept => d.p_d,
                    Branch::Reject => d.p_r,
                };
                min = min.min(p);
            }
            Ok(min)
        };
        let min_pd = stencil_min(Branch::Accept)?;
        let min_pr = stencil_min(Branch::Reject)?;

        // Conditional QFIs; retry the FD with smaller steps before declaring
        // an error.
        let fd_qfi_retry = |branch: Branch| -> Result<f64> {
            let closure = |gg: f64| -> Result<FockVector> {
                oracle_conditional(&sel, &meter, CouplingSpec::new(gg)?, branch, &trunc)?.normalized()
            };
            let mut last = Err(Error::Numerical("unreached".into()));
            for step in [h, h / 10.0, h / 100.0] {
                last = fd_qfi(&closure, g.g(), step);
                match &last {
                    Err(Error::StepSize { .. }) => continue,
                    _ => break,
                }
            }
            last
        };
        if min_pd < FD_PROB_FLOOR {
            skip_check(&mut checks, "Q_d", format!("accept branch reaches P={min_pd:.1e} on the FD stencil"));
        } else {
            record_check(
                &mut acc, &mut checks, "Q_d", false, scale, opts.tol_analytic,
                conditional_qfi(&sel, &meter, g, Branch::Accept),
                fd_qfi_retry(Branch::Accept),
            );
        }
        if min_pr < FD_PROB_FLOOR {
            skip_check(&mut checks, "Q_r", format!("reject branch reaches P={min_pr:.1e} on the FD stencil"));
        } else {
            record_check(
                &mut acc, &mut checks, "Q_r", false, scale, opts.tol_analytic,
                conditional_qfi(&sel, &meter, g, Branch::Reject),
                fd_qfi_retry(Branch::Reject),
            );
        }

        // Joint QFI.
        let joint_closure =
            |gg: f64| -> Result<FockVector> { oracle_joint(&sel, &meter, CouplingSpec::new(gg)?, &trunc) };
        record_check(
            &mut acc, &mut checks, "Q_j", false, scale, opts.tol_analytic,
            Ok(joint_qfi(&sel, &meter)),
            fd_qfi(&joint_closure, g.g(), h),
        );

        // Record information.
        if dist.p_d < PROB_FLOOR || dist.p_r < PROB_FLOOR {
            skip_check(&mut checks, "F_p", format!("branch probability {:.1e} too small", dist.p_d.min(dist.p_r)));
        } else {
            let prob_closure = |gg: f64| -> Result<f64> {
                Ok(oracle_conditional(&sel, &meter, CouplingSpec::new(gg)?, Branch::Accept, &trunc)?
                    .norm_sqr())
            };
            let analytic_fp = postselect_prob_derivative(&sel, &meter, g)
                .and_then(|dp| classical_fisher_two_outcome(dist.p_d, dp));
            record_check(
                &mut acc, &mut checks, "F_p", false, scale, opts.tol_analytic,
                analytic_fp,
                fd_classical_fi(&prob_closure, g.g(), h),
            );
        }

        // Recycled set. The oracle chain rebuilds {P_c, P_b} from the numeric
        // branch norms and differentiates them directly.
        let oracle_recycled = |gg: f64| -> Result<(f64, f64)> {
            let gc = CouplingSpec::new(gg)?;
            let p_d = oracle_conditional(&sel, &meter, gc, Branch::Accept, &trunc)?.norm_sqr();
            let p_r = oracle_conditional(&sel, &meter, gc, Branch::Reject, &trunc)?.norm_sqr();
            let x = p_r.sqrt();
            let phase = C64::new(0.0, mirror.theta()).exp();
            let denom = C64::new(1.0, 0.0) - phase * (mirror.r() * x);
            let gain = C64::new(mirror.p(), 0.0) / denom;
            let returned = -C64::new(mirror.r(), 0.0) + phase * (mirror.p() * mirror.p() * x) / denom;
            Ok((gain.norm_sqr() * p_d, returned.norm_sqr()))
        };
        let analytic_rec = crate::recycling::recycled_distribution(&sel, &meter, g, &mirror);
        let oracle_rec = oracle_recycled(g.g());
        match (&analytic_rec, &oracle_rec) {
            (Ok(a), Ok(o)) => {
                record_check(
                    &mut acc, &mut checks, "P_c", true, 1.0, opts.tol_fd,
                    Ok(a.p_c), Ok(o.0),
                );
                record_check(
                    &mut acc, &mut checks, "P_b", true, 1.0, opts.tol_fd,
                    Ok(a.p_b), Ok(o.1),
                );
                let rec_min = a.p_c.min(a.p_b);
                if rec_min < PROB_FLOOR || min_pr < PROB_FLOOR || min_pd < PROB_FLOOR {
                    skip_check(
                        &mut checks,
                        "F_pow",
                        format!("recycled branch probability {rec_min:.1e} too small"),
                    );
                } else {
                    let oracle_fpow = |step: f64| -> Result<f64> {
                        let (pc_p, pb_p) = oracle_recycled(g.g() + step)?;
                        let (pc_m, pb_m) = oracle_recycled(g.g() - step)?;
                        let dpc = (pc_p - pc_m) / (2.0 * step);
                        let dpb = (pb_p - pb_m) / (2.0 * step);
                        Ok(dpc * dpc / o.0 + dpb * dpb / o.1)
                    };
                    let oracle_value = oracle_fpow(h).and_then(|coarse| {
                        let fine = oracle_fpow(h / 2.0)?;
                        if steps_agree(coarse, fine) {
                            Ok(fine)
                        } else {
                            Err(Error::StepSize { coarse, fine })
                        }
                    });
                    record_check(
                        &mut acc, &mut checks, "F_pow", true, scale, opts.tol_fd,
                        f_pow_exact(&sel, &meter, g, &mirror, h).map(|l| l.f_pow),
                        oracle_value,
                    );
                }
            }
            _ => {
                let reason = match (&analytic_rec, &oracle_rec) {
                    (Err(e), _) => format!("analytic: {e}"),
                    (_, Err(e)) => format!("oracle: {e}"),
                    _ => unreachable!(),
                };
                acc.pass_failed = true;
                for name in ["P_c", "P_b", "F_pow"] {
                    checks.push(QuantityCheck {
                        name,
                        analytic: None,
                        oracle: None,
                        rel_err: None,
                        status: CheckStatus::Error(reason.clone()),
                    });
                }
            }
        }

        reports.push(PointReport { index, label, checks });
    }

    Ok(OracleReport {
        points: reports,
        max_err_analytic: acc.max_analytic,
        max_err_fd: acc.max_fd,
        tol_analytic: opts.tol_analytic,
        tol_fd: opts.tol_fd,
        pass: !acc.pass_failed,
    })
}
