//! Floating-point cross-checks: per-mode radial ODE, connection
//! coefficients, and pole probing.

pub mod bessel;
pub mod connection;
pub mod gamma;
pub mod mode;
pub mod ode;
pub mod probe;

pub use connection::{
    check_conditioning, extract_connection, numeric_connection, numeric_scattering, BranchModel, ConnectionPair,
};
pub use mode::{
    decaying_reference, solve_mode_from, solve_mode_ode, weighted_wronskian, InitialData, ModeProblem, ModeSolution,
    RadialProfile,
};
pub use ode::{integrate, integrate_fixed, OdeOptions, State};
pub use probe::{default_offsets, fit_pole, pole_probe, PoleFit};
