//! Truncated Fock and Liouville spaces with check and tilde superoperators.

pub mod algebra;
pub mod basis;
pub mod fock;
pub mod superop;

pub use basis::{LiouvilleBasis, ModeSpec, Statistics, DEFAULT_MAX_FOCK};
pub use superop::{
    check_of, identity_superstate, super_annihilator, tilde_conjugate, total_super_hamiltonian, Kind,
    ModeGenerators, Parity, SuperOperator, SuperState,
};
