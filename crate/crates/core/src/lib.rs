//! Simulation library for a two-player decision model built on fermionic
//! mode operators.
//!
//! Each player's choice is the eigenvalue (0 or 1) of a number operator on a
//! four-dimensional Fock space. The players interact with each other through
//! exchange and cooperation couplings, and each one is coupled to its own
//! fermionic reservoir. After the reservoirs are averaged out, the expectation
//! of each number operator (the *decision function*) splits into a
//! player-only part, an interference part that exists only for superposed
//! initial states, and a reservoir part.
//!
//! Module map:
//!
//! * [`algebra`]: basis vectors, mode operators and number operators.
//! * [`model`]: parameters, reservoir and initial state, the reduced
//!   evolution generator, and scenario files.
//! * [`dynamics`]: the propagator `exp(iUt)` and the decision functions.
//! * [`oracle`]: independent verification routes.
//! * [`analysis`]: odds, decision times, asymptotics and noise metrics.
//! * [`presets`]: built-in parameter sets and figure scenarios.

pub mod algebra;
pub mod analysis;
pub mod dynamics;
mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod presets;

pub use algebra::{ComplexMatrix4, StateVector4};
pub use analysis::{AsymptoticsReport, Decision, DecisionOutcome, Odds};
pub use dynamics::{DecisionSeries, PropagatorGrid, PropagatorMethod, TimeGrid};
pub use error::{Error, Result};
pub use model::{EvolutionGenerator, InitialState, ModelParams, ReservoirState, Scenario};
pub use num_complex::Complex64;
pub use oracle::LtpResidual;
