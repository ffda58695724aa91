//! Exact small-system engine, interaction-picture evolution and self-energies
//! of a two-body contact interaction.

pub mod dyson;
pub mod evolution;
pub mod exact;
pub mod green;
pub mod model;
pub mod self_energy;

pub use dyson::{dyson_closure_residual, extract_sigma, SigmaExtraction, DEFAULT_REGULARIZATION};
pub use evolution::{evolve_v, VEvolution};
pub use exact::ExactEngine;
pub use green::{full_green, full_green_from_engine, GreenFunctionSet, ModeGreen};
pub use model::{Channel, InteractionModel};
pub use self_energy::{
    lambda_core, lambda_pair, s12_core, s12_loop, self_energy_second_order, sigma_operator_basis,
};
