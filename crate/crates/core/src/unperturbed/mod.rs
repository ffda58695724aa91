//! Unperturbed super-Hamiltonian, its exact solutions and the α-frame.

pub mod alpha;
pub mod evolve;
pub mod geometric;
pub mod hamiltonian;
pub mod zeta;

pub use alpha::{conserved_combination_residual, generator_consistency, ConservedReport};
pub use evolve::evolve_lvn;
pub use geometric::{
    diagonal_state, evolve_q, geometric_probabilities, geometric_residual, geometric_state, m_matrix, m_spectrum, q_vector,
    GeometricState, QEvolution,
};
pub use hamiltonian::{HuForm, UnperturbedHamiltonian};
pub use zeta::{solve_zeta, ZetaParams};
