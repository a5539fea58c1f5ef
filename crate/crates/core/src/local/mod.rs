//! Windowed local-energy certification: bump functions, local energies,
//! coefficient formulas, pressure oscillation, the ε-regularity quantity,
//! the energy recursion and the window induction.

pub mod bump;
pub mod coefficients;
pub mod cz;
pub mod energy;
pub mod energy_terms;
pub mod eps_reg;
pub mod exponents;
pub mod holder;
pub mod induction;
pub mod pressure_osc;
pub mod recursion;
pub mod source_norms;
mod window;

pub use bump::BumpFunction;
pub use coefficients::{coefficients, induction_alpha, CoefficientSet};
pub use cz::{cz_local_bound_check, CzCheck, CzConstants};
pub use energy::{windowed_energy, EnergyTracker, LocalEnergyWindow, WindowSpec};
pub use energy_terms::{local_energy_terms, term_bounds, EnergyTerms, TermSample};
pub use eps_reg::{eps_regularity_quantity, EpsRegSample, EpsRegValue, ParabolicCylinder};
pub use exponents::LocalExponents;
pub use holder::{holder_seminorm_estimate, HolderEstimate};
pub use induction::{plan_local, run_local_induction, LocalLedger, LocalMonitor, LocalParams, LocalPlan, LocalSample, WindowEntry};
pub use pressure_osc::{pressure_oscillation, PressureOscillation};
pub use recursion::{energy_recursion_check, RecursionCase, RecursionVerdict};
pub use source_norms::{source_norms, SourceNorms, SourceSample};
pub use window::CenterSet;
