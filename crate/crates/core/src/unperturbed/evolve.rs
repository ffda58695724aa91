use super::hamiltonian::UnperturbedHamiltonian;
use crate::error::{Result, TfdError};
use crate::liouville::SuperState;
use crate::ode::{integrate, OdeOptions, OdeStats};
use crate::sparse::C64;
use std::cell::RefCell;

/// Solves i d/dt|ρ⟩⟩ = Ĥ_u(t)|ρ⟩⟩ and returns the state at each grid time.
pub fn evolve_lvn(
    rho0: &SuperState,
    hu: &UnperturbedHamiltonian,
    grid: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<SuperState>, OdeStats)> {
    if rho0.basis().as_ref() != hu.basis().as_ref() {
        return Err(TfdError::BasisMismatch);
    }
    if let (Some(&a), Some(&b)) = (grid.first(), grid.last()) {
        hu.schedule().validate(a, b)?;
    }
    let failure: RefCell<Option<TfdError>> = RefCell::new(None);
    let (ys, stats) = integrate(
        |t, x: &[C64], y: &mut [C64]| {
            if let Err(e) = hu.rhs(t, x, y) {
                failure.borrow_mut().get_or_insert(e);
                y.iter_mut().for_each(|v| *v = C64::new(f64::NAN, 0.0));
            }
        },
        grid,
        rho0.amps(),
        opts,
        |_, _| true,
    )
    .map_err(|e| failure.borrow_mut().take().unwrap_or(e))?;
    let states = ys
        .into_iter()
        .map(|a| SuperState::new(rho0.basis().clone(), a))
        .collect::<Result<_>>()?;
    Ok((states, stats))
}
