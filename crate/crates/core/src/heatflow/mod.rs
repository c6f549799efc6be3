//! Neumann heat flow on model manifolds and the Harnack quantities
//! `X = |∇u|²/u²`, `Y = Lu/u`, `W = |∇u|²/u`.

mod datum;
mod fd;
mod kernel;
mod special;
mod spectral;
mod state;


pub use datum::{eigenfunction_jet, eigenvalue, generator, DatumKind, InitialDatum, POSITIVITY_FLOOR};
pub use kernel::{circle_kernel_theta, circle_kernel_wrapped, exact_kernel, kernel_jet};
pub use special::{gegenbauer, gegenbauer_with_derivatives, sphere_quadrature};
pub use spectral::{DiscreteBasis, Fields, TAIL_TOLERANCE};
pub use state::{
    harnack_quantities, kernel_state, solve_heat, solver_grid, HeatState, Scheme, MAX_PRINCIPLE_TOL, MIN_SPECTRAL_NODES,
};
