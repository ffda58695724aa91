//! Thermo field dynamics in superoperator form on truncated Fock spaces.

pub mod cli;
pub mod error;
pub mod kinetics;
pub mod liouville;
pub mod perturbation;
pub mod ode;
pub mod renorm;
pub mod report;
pub mod schedule;
pub mod sparse;
pub mod tfd;
pub mod unperturbed;

pub use error::{Result, TfdError};
