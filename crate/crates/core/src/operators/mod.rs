//! Every Hamiltonian of the construction, assembled as a basis-tagged sparse
//! Hermitian operator.

pub mod fk;
pub mod heisenberg;
pub mod penalties;
pub mod spacetime;
pub mod spin;

pub use fk::{circle_history_state, fk_circle, fk_line, line_history_state};
pub use heisenberg::{
    check_ring, delta, delta_op, delta_pair, heisenberg_form, heisenberg_tag, momentum_block,
    momentum_block_full, momentum_op, open_chain, open_chain_op, periodic_chain, periodic_chain_op,
    symmetry_ops, tau_shift, SymmetryOps,
};
pub use penalties::{
    bonds, check_causal_cone, interval_violations, past_causal_cone, penalty_terms,
    triangle_violations, Penalties,
};
pub use spacetime::{
    disentangle, interpolated_hamiltonian, laplacian_tensor_identity, linear_hamiltonian,
    schedule_hamiltonian, spacetime_hamiltonian, BasisKind, CircuitHamiltonian, ConfigSet,
    PathUnitaryTable,
};
pub use spin::{balanced_sector, full_tag, sector_tag, Site, SpinOp};
