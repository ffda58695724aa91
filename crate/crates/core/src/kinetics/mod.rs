//! Kinetic equations for the occupations: Markovian collision integral,
//! transport with memory, equilibrium fits and relaxation runs.

mod collision;
mod equilibrium;
mod relax;
mod transport;

pub use collision::{lorentzian, markovian_collision};
pub use equilibrium::{distribution, equilibrium_gap, fit_equilibrium, mu_for_number, EquilibriumSpec};
pub use relax::{default_broadening, relax, RelaxMode, RelaxOptions, TransportTrajectory};
pub use transport::{kernel_samples, memory_window, transport_rhs, trapezoid, History, KernelOptions, TransportState, WindowPoint};
