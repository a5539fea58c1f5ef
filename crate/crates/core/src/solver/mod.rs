//! Mild-solution integration of the (regularized) Navier–Stokes system.

pub mod duhamel;
mod integrator;
pub mod picard;
mod pressure;
mod trajectory;

pub use duhamel::{bilinear_b, duhamel_f, duhamel_g, DuhamelAccumulator};
pub use integrator::{phi_functions, step, EtdCoefficients, Integrator};
pub use picard::{picard_fixed_point, FixedPointProblem, FixedPointReport};
pub use pressure::{pressure_from_velocity, pressure_residual};
pub use trajectory::{
    cfl_limit, local_existence_time, solve, solve_with, uniform_steps, NormRecord, SolveOptions, Trajectory,
};
