//! On-shell renormalization: the causal on-shell self-energy, the equilibrium
//! energy shift, the new pair of renormalization conditions and the
//! comparison with the condition n_H = n.

mod equilibrium;
mod onshell;
mod spectral;
mod step;

pub use equilibrium::{equilibrium_renormalize, scaling_exponent, EquilibriumRenorm, LoopSpectrum};
pub use onshell::{equilibrium_onshell_solve, onshell_transform};
pub use spectral::{diagonalization_inconsistency_demo, Bump, DiagonalizationReport, Pole, SpectralModel, NORMALIZATION_TOL};
pub use step::{new_renorm_step, renorm_relax, OnShellResult, RenormOptions, RenormTrajectory};
