//! Tree-based analytical approximation for multi-stage cascades: discrete
//! synchronous recurrences over degree classes, the asynchronous ODE limit,
//! and the scalar configuration-model specialization.

mod binomial;
mod ode;
mod recurrence;

pub use binomial::{binomial_pmf, binomial_row};
pub use ode::{integrate_ode, ode_fixpoint, OdeOptions};
pub use recurrence::{
    aggregate, config_model_step, iterate_sync, neighbor_averages, qbar, update_q, update_rho,
    IterateOptions, ScalarState, TheoryTrajectory,
};

use thiserror::Error;

use crate::contagion::{ContagionError, ResponseSpec};
use crate::graph::{DegreeDistribution, GraphError, JointDegreeDistribution};

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("degree {0} is absent from the joint distribution")]
    DegreeAbsent(usize),
    #[error("recurrence did not converge within {steps} iterations (residual {residual})")]
    NonConvergence { steps: usize, residual: f64 },
    #[error("integration left [0,1] at t = {t} (value {value}); reduce the step size")]
    LeftDomain { t: f64, value: f64 },
    #[error("step size {0} exceeds the 0.05 limit")]
    StepTooLarge(f64),
    #[error("invalid model inputs: {0}")]
    InvalidInputs(String),
    #[error(transparent)]
    Response(#[from] ContagionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Network statistics driving the recurrence: either a configuration-model
/// degree distribution (factorized joint) or a full joint degree-degree
/// distribution.
#[derive(Debug, Clone)]
pub enum NetworkModel {
    Factorized(DegreeDistribution),
    Correlated(JointDegreeDistribution),
}

impl NetworkModel {
    /// Degree classes carried by the state vectors, ascending. Only degrees
    /// with positive probability are stored.
    pub fn classes(&self) -> Vec<usize> {
        match self {
            NetworkModel::Factorized(d) => d.support(),
            NetworkModel::Correlated(j) => j.degrees().to_vec(),
        }
    }

    /// P_k over the classes, used to aggregate per-class densities.
    pub fn class_weights(&self) -> Result<Vec<f64>, TheoryError> {
        match self {
            NetworkModel::Factorized(d) => {
                Ok(d.support().iter().map(|&k| d.probability(k)).collect())
            }
            NetworkModel::Correlated(j) => {
                let implied = j.implied_degree_distribution()?;
                Ok(j.degrees()
                    .iter()
                    .map(|&k| implied.probability(k))
                    .collect())
            }
        }
    }

    pub fn degree_distribution(&self) -> Result<DegreeDistribution, TheoryError> {
        match self {
            NetworkModel::Factorized(d) => Ok(d.clone()),
            NetworkModel::Correlated(j) => Ok(j.implied_degree_distribution()?),
        }
    }
}

/// Everything the recurrence needs: topology statistics, the response
/// functions, and the seed fractions.
#[derive(Debug, Clone)]
pub struct ModelInputs {
    pub network: NetworkModel,
    pub response: ResponseSpec,
    pub phi1: f64,
    pub phi2: f64,
}

impl ModelInputs {
    pub fn new(
        network: NetworkModel,
        response: ResponseSpec,
        phi1: f64,
        phi2: f64,
    ) -> Result<Self, TheoryError> {
        if !(0.0..=1.0).contains(&phi1) || !(0.0..=1.0).contains(&phi2) || phi2 > phi1 {
            return Err(TheoryError::InvalidInputs(format!(
                "seed fractions must satisfy 0 <= phi2 <= phi1 <= 1, got ({phi1}, {phi2})"
            )));
        }
        if network.degree_distribution()?.mean_degree() <= 0.0 {
            return Err(TheoryError::InvalidInputs(
                "mean degree must be positive".into(),
            ));
        }
        Ok(ModelInputs {
            network,
            response,
            phi1,
            phi2,
        })
    }
}

/// Per-degree-class state of the tree approximation at one step.
#[derive(Debug, Clone)]
pub struct TheoryState {
    /// Degree classes, ascending; all vectors are indexed accordingly.
    pub classes: Vec<usize>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub rho1: Vec<f64>,
    pub rho2: Vec<f64>,
    /// Step counter for the discrete map, or time for the ODE limit.
    pub t: f64,
}

impl TheoryState {
    pub fn initial(classes: Vec<usize>, phi1: f64, phi2: f64) -> Self {
        let n = classes.len();
        TheoryState {
            classes,
            q1: vec![phi1; n],
            q2: vec![phi2; n],
            rho1: vec![phi1; n],
            rho2: vec![phi2; n],
            t: 0.0,
        }
    }

    pub fn check_invariants(&self) -> Result<(), TheoryError> {
        for i in 0..self.classes.len() {
            for (name, v) in [
                ("q1", self.q1[i]),
                ("q2", self.q2[i]),
                ("rho1", self.rho1[i]),
                ("rho2", self.rho2[i]),
            ] {
                if !(-1e-9..=1.0 + 1e-9).contains(&v) {
                    return Err(TheoryError::InvalidInputs(format!(
                        "{name}[{i}] = {v} outside [0,1]"
                    )));
                }
            }
            if self.q2[i] > self.q1[i] + 1e-9 || self.rho2[i] > self.rho1[i] + 1e-9 {
                return Err(TheoryError::InvalidInputs(format!(
                    "stage-2 state exceeds stage-1 state in class {}",
                    self.classes[i]
                )));
            }
        }
        Ok(())
    }
}

/// Precomputed response values `F_i(m1, m2, k)` for one degree class.
/// The response does not depend on the recurrence state, so the triangular
/// tables are filled once per parameter point. `m1` extends to `k + 1` to
/// cover the parent-corrected term `F_2(m1 + 1, m2, k)`.
#[derive(Debug, Clone)]
pub(crate) struct ResponseTable {
    k: usize,
    f1: Vec<f64>,
    f2: Vec<f64>,
}

impl ResponseTable {
    pub(crate) fn build(spec: &ResponseSpec, k: usize) -> Result<Self, TheoryError> {
        let rows = k + 2;
        let mut f1 = Vec::with_capacity(rows * (rows + 1) / 2);
        let mut f2 = Vec::with_capacity(rows * (rows + 1) / 2);
        for m1 in 0..rows {
            for m2 in 0..=m1 {
                f1.push(spec.response(1, m1 as u32, m2 as u32, k)?);
                f2.push(spec.response(2, m1 as u32, m2 as u32, k)?);
            }
        }
        Ok(ResponseTable { k, f1, f2 })
    }

    #[inline]
    fn idx(m1: usize, m2: usize) -> usize {
        debug_assert!(m2 <= m1);
        m1 * (m1 + 1) / 2 + m2
    }

    #[inline]
    pub(crate) fn f1(&self, m1: usize, m2: usize) -> f64 {
        self.f1[Self::idx(m1, m2)]
    }

    #[inline]
    pub(crate) fn f2(&self, m1: usize, m2: usize) -> f64 {
        self.f2[Self::idx(m1, m2)]
    }

    pub(crate) fn degree(&self) -> usize {
        self.k
    }
}

pub(crate) fn build_tables(
    spec: &ResponseSpec,
    classes: &[usize],
) -> Result<Vec<ResponseTable>, TheoryError> {
    classes
        .iter()
        .map(|&k| ResponseTable::build(spec, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_reject_inverted_seeds() {
        let d = DegreeDistribution::new(&[(3, 1.0)]).unwrap();
        let spec = ResponseSpec::fraction_uniform(0.2, 0.4, 0.0).unwrap();
        assert!(ModelInputs::new(NetworkModel::Factorized(d), spec, 0.01, 0.02).is_err());
    }

    #[test]
    fn response_table_matches_direct_evaluation() {
        let spec = ResponseSpec::fraction_uniform(0.2, 0.7, 0.45).unwrap();
        let table = ResponseTable::build(&spec, 4).unwrap();
        for m1 in 0..=5u32 {
            for m2 in 0..=m1 {
                assert_eq!(
                    table.f1(m1 as usize, m2 as usize),
                    spec.response(1, m1, m2, 4).unwrap()
                );
                assert_eq!(
                    table.f2(m1 as usize, m2 as usize),
                    spec.response(2, m1, m2, 4).unwrap()
                );
            }
        }
    }

    #[test]
    fn correlated_class_weights_are_implied_marginals() {
        let j = JointDegreeDistribution::new(&[(4, 4, 3.0), (4, 24, 1.0), (24, 24, 23.0)]).unwrap();
        let m = NetworkModel::Correlated(j);
        let w = m.class_weights().unwrap();
        assert_eq!(m.classes(), vec![4, 24]);
        assert!((w[0] - 0.5).abs() < 1e-12);
        assert!((w[1] - 0.5).abs() < 1e-12);
    }
}
