//! Dense complex linear algebra over labeled tensor factorizations.

pub mod layout;
pub mod linalg;
pub mod operator;

pub use layout::{grouped_label, Factor, SubsystemLayout};
pub use linalg::{
    eig_hermitian, matrix_power_psd, pure_pair_trace_norm, singular_values, trace_norm,
    trace_norm_gram_difference, HERMITIAN_TOL, PSD_TOL, SUPPORT_CUTOFF, UNITARY_TOL,
};
pub use operator::{
    conjugate_apply, conjugate_local, kron, partial_trace, permute_subsystems, CMatrix, Operator,
    C64,
};
