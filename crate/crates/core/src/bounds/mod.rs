//! Closed-form right-hand sides of the Li–Yau type inequalities, the test
//! clocks used to derive them, and clock-weighted integrals.

mod catalog;
mod clock;
mod constants;
mod nonconvex;
mod phi;

pub use catalog::{check_inequality, eval_bound, tolerance, BoundForm, BoundId, BoundParams, Margin};
pub use clock::{
    clock_integrals, drift_square_integral, gamma_t_alpha, make_clock, Clock, ClockFamily, ClockIntegrals,
};
pub use constants::{beta_eps_radius, beta_t_alpha, beta_tilde_radius, local_betas, BETA_DOMAIN_FLOOR};
pub use nonconvex::{
    nonconvex_bound_rhs, nonconvex_constants, NonconvexData, NonconvexForm, NonconvexInputs, NonconvexMode,
};
pub use phi::phi_bbg;
