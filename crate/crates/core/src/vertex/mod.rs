//! Finite-lattice operators of the alternating six-vertex chain.

pub mod basis;
pub mod hamiltonian;
pub mod operator;
pub mod smatrix;
pub mod transfer;

pub use basis::SectorBasis;
pub use hamiltonian::{
    conjugate_diagonal, decoupled_shift, decoupled_twists, decoupling_transform,
    extract_first_order, hamiltonian_h0, hamiltonian_local, hamiltonian_logderiv,
    hamiltonian_logderiv_unchecked, interaction_first_order, interaction_first_order_complete,
    is_matched_hop, reconcile, twisted_xxz, LogDerivDiagnostics,
};
pub use operator::{
    fit_affine, sublattice_number, total_sz, translation, AffineConvention, SectorOperator,
};
pub use smatrix::{s_matrix, s_matrix_derivative, yang_baxter_residual, TwoSiteOperator, C64};
pub use transfer::{
    transfer_matrix, transfer_matrix_derivative, transfer_matrix_pair, transfer_matrix_with,
};
