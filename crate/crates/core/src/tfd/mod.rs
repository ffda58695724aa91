//! Thermal doublets, Bogoliubov matrices, ξ operators and unperturbed propagators.

pub mod bogoliubov;
pub mod direct;
pub mod kernel;
pub mod propagator;
pub mod xi;

pub use bogoliubov::{bogoliubov, mat2, max_abs2, BogoliubovMatrix, Mat2};
pub use direct::direct_delta;
pub use kernel::{KernelKind, TimeGrid, TwoTimeKernel};
pub use propagator::{equal_time_merge, propagator_d, propagator_delta, propagator_delta_branch, Side};
pub use xi::{doublet_hu, t0, xi_commutator_residual, xi_operators, xi_vacuum_check, DoubletHu, Doublets, XiOperators};
