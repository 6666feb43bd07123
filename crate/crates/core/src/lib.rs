//! Computation of periodic solutions (limit cycles) of mixed-feedback
//! systems by zero-finding the difference of two maximally monotone
//! relations on a discretized space of T-periodic signals.
//!
//! The pipeline: [`signal`] provides the discretized `l_{2,T}` space,
//! [`operators`] the monotone relations and their resolvents, [`splitting`]
//! the Douglas-Rachford inner solver, [`solver`] the outer freeze-and-solve
//! iteration, [`systems`] the built-in mixed-feedback models (Van der Pol,
//! double well), and [`oracle`] an independent RK4 ground-truth integrator
//! for validating solver output.

pub mod operators;
pub mod oracle;
pub mod signal;
pub mod solver;
pub mod splitting;
pub mod systems;

pub use operators::{GainRelation, LtiRelation, LtiResolvent, OperatorError, StaticPolyRelation};
pub use signal::{PeriodicGrid, PeriodicSignal, SignalError};
pub use solver::{OuterConfig, SolveReport, SolverError};
pub use splitting::{DrConfig, DrResult, SplittingError};
pub use systems::{MixedFeedbackSystem, SystemError, VdpParams};
