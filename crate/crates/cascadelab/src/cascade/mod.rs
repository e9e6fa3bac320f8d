//! Cascade boundary analysis on configuration-model networks: the
//! closed-form cascade condition, equilibria of the two-dimensional reduced
//! dynamics, and saddle-node continuation in two parameters.

mod condition;
mod continuation;
mod equilibrium;
mod map;
mod sweep;

pub use condition::{cascade_condition, partials_at_zero, CascadeCondition};
pub use continuation::{
    continue_saddle_node, find_saddle_node_start, BoundaryCurve, BoundaryPoint,
    ContinuationOptions, FamilyPoint,
};
pub use equilibrium::{find_equilibrium, saddle_node_residual, Equilibrium, SolveOptions};
pub use map::ReducedMap;
pub use sweep::{sweep_diagram, GridSpec, SweepPoint, SweepResult};

use thiserror::Error;

use crate::contagion::ContagionError;
use crate::graph::GraphError;
use crate::theory::TheoryError;

#[derive(Debug, Error)]
pub enum CascadeError {
    #[error("equilibrium search did not converge (residual {residual} after {steps} steps)")]
    NonConvergence { steps: usize, residual: f64 },
    #[error("invalid map family point: {0}")]
    InvalidFamily(String),
    #[error("continuation start point fails verification (residual {0})")]
    UnverifiedStart(f64),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Response(#[from] ContagionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Truncation degree for Poisson sums: `max(30, ceil(z + 10 sqrt(z)))`,
/// leaving tail mass below 1e-12 for the mean degrees used here.
pub fn poisson_kmax(z: f64) -> usize {
    ((z + 10.0 * z.sqrt()).ceil() as usize).max(30)
}
