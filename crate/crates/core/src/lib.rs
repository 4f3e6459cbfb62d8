//! Fisher-information accounting for postselected weak measurement with
//! coherent-state meters, plus the power-recycling modification of the
//! postselection record.
//!
//! A two-level system is preselected, coupled to a coherent meter through
//! `exp(i g σ_z n̂)`, and postselected. The crate tracks where the information
//! about the coupling `g` ends up:
//!
//! - [`state`] builds the conditional meter states exactly from coherent-state
//!   overlap algebra;
//! - [`fisher`] evaluates classical and quantum Fisher information and the
//!   ledger `F_tot = P_d Q_d + P_r Q_r + F_p ≤ Q_j`, including the
//!   information-transfer peak in the selection phase;
//! - [`recycling`] models a power-recycling cavity in front of the
//!   postselecting element and the modified record information `F_pow`;
//! - [`fock`] is an independent truncated-Fock, finite-difference oracle that
//!   re-derives every analytic quantity by brute force.
//!
//! All operations are pure functions of their inputs; values are freely
//! copyable across threads, so parameter sweeps parallelize trivially.

pub mod error;
pub mod fisher;
pub mod fock;
pub mod recycling;
pub mod state;

pub use error::{Error, Result};
pub use fisher::{
    classical_fisher_two_outcome, conditional_qfi, cramer_rao_bound, fisher_ledger,
    fp_small_g_limit, joint_qfi, pd_derivative_closed, peak_phi0, postselect_prob_derivative,
    qfi_pure, weak_value, FisherLedger, WeakValue,
};
pub use fock::{
    coherent_to_fock, fd_classical_fi, fd_qfi, oracle_conditional, oracle_joint, oracle_report,
    CheckStatus, FockVector, OraclePoint, OracleReport, PointReport, QuantityCheck, ReportOptions,
    TruncationSpec,
};
pub use num_complex::Complex64;
pub use recycling::{
    cavity_gain, effective_mirror, f_pow_approx, f_pow_exact, recycled_distribution,
    EffectiveMirror, MirrorSpec, RecycledDistribution, RecycledLedger,
};
pub use state::{
    coherent_overlap, conditional_meter, joint_state, meter_g_derivative, number_weighted_overlap,
    postselect_prob, postselect_prob_closed, Branch, BranchSuperposition, Component, CouplingSpec,
    MeterSpec, PostselectionDistribution, SelectionSpec,
};
