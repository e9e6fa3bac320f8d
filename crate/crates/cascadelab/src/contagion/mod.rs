//! Multi-stage threshold contagion: response functions, Monte Carlo
//! simulation under synchronous and asynchronous updating, and a
//! brute-force fixpoint oracle for deterministic thresholds.

mod oracle;
mod response;
mod sim;

pub use oracle::final_state_oracle;
pub use response::{peer_pressure, PressureScaling, QuenchedResponse, ResponseSpec, Threshold};
pub use sim::{run, run_single, seed, seed_explicit, update_node, SimState, StageChange};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContagionError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("invalid response specification: {0}")]
    InvalidResponse(String),
    #[error("stage index {0} is not 1 or 2")]
    StageIndex(usize),
    #[error("isolated node: peer pressure undefined for degree 0")]
    IsolatedNode,
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

/// Node influence level. The order is total and a node's stage never
/// decreases during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    S0,
    S1,
    S2,
}

impl Stage {
    pub fn is_active(self) -> bool {
        self >= Stage::S1
    }

    pub fn is_hyper(self) -> bool {
        self == Stage::S2
    }
}

/// How nodes are scheduled for updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    /// One uniformly random node per step, clock advances by 1/N.
    Asynchronous,
    /// All nodes update simultaneously from the pre-step state, clock
    /// advances by 1.
    Synchronous,
}

/// Whether the initially active nodes are redrawn for each realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedMode {
    /// The same seed nodes in every realization; only update order (and
    /// sampled thresholds) vary.
    FixedAcrossRealizations,
    /// Fresh uniform seed draw per realization.
    Resampled,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub phi1: f64,
    pub phi2: f64,
    pub update_mode: UpdateMode,
    pub t_max: f64,
    pub realizations: usize,
    pub rng_seed: u64,
    pub seed_mode: SeedMode,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ContagionError> {
        if !(0.0..=1.0).contains(&self.phi1) || !(0.0..=1.0).contains(&self.phi2) {
            return Err(ContagionError::InvalidConfig(
                "seed fractions must lie in [0,1]".into(),
            ));
        }
        if self.phi2 > self.phi1 {
            return Err(ContagionError::InvalidConfig(format!(
                "phi2 = {} exceeds phi1 = {}",
                self.phi2, self.phi1
            )));
        }
        if !(self.t_max > 0.0) {
            return Err(ContagionError::InvalidConfig(
                "t_max must be positive".into(),
            ));
        }
        if self.realizations == 0 {
            return Err(ContagionError::InvalidConfig(
                "need at least one realization".into(),
            ));
        }
        Ok(())
    }
}

/// Number of uniform output samples over `[0, t_max]`; the recorded series
/// has one extra row for `t = 0`, and the final row carries the exact final
/// state.
pub const GRID_SAMPLES: usize = 200;

/// Uniform output grid: `t = 0` plus `GRID_SAMPLES` samples up to `t_max`.
pub fn output_grid(t_max: f64) -> Vec<f64> {
    (0..=GRID_SAMPLES)
        .map(|i| t_max * i as f64 / GRID_SAMPLES as f64)
        .collect()
}

/// Activation densities over time: aggregate and per degree class.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub rho1: Vec<f64>,
    pub rho2: Vec<f64>,
    /// Degree classes, ascending; rows of `rho1_k`/`rho2_k` follow this
    /// order.
    pub classes: Vec<usize>,
    pub rho1_k: Vec<Vec<f64>>,
    pub rho2_k: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn final_rho1(&self) -> f64 {
        *self.rho1.last().expect("nonempty series")
    }

    pub fn final_rho2(&self) -> f64 {
        *self.rho2.last().expect("nonempty series")
    }

    /// Series of nodes that are S1- but not S2-active in a degree class.
    pub fn class_gap(&self, k: usize) -> Option<Vec<f64>> {
        let idx = self.classes.iter().position(|&c| c == k)?;
        Some(
            self.rho1_k[idx]
                .iter()
                .zip(self.rho2_k[idx].iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn class_series(&self, stage: usize, k: usize) -> Option<&[f64]> {
        let idx = self.classes.iter().position(|&c| c == k)?;
        match stage {
            1 => Some(&self.rho1_k[idx]),
            2 => Some(&self.rho2_k[idx]),
            _ => None,
        }
    }

    /// Pointwise mean over an ensemble. Aggregate series average over all
    /// members; per-class series average over the members containing that
    /// class.
    pub fn average(members: &[TimeSeries]) -> TimeSeries {
        assert!(!members.is_empty());
        let times = members[0].times.clone();
        let len = times.len();
        let n = members.len() as f64;
        let mut rho1 = vec![0.0; len];
        let mut rho2 = vec![0.0; len];
        for m in members {
            assert_eq!(m.times.len(), len, "grid mismatch in ensemble");
            for i in 0..len {
                rho1[i] += m.rho1[i] / n;
                rho2[i] += m.rho2[i] / n;
            }
        }
        let mut classes: Vec<usize> = members
            .iter()
            .flat_map(|m| m.classes.iter().copied())
            .collect();
        classes.sort_unstable();
        classes.dedup();
        let mut rho1_k = Vec::with_capacity(classes.len());
        let mut rho2_k = Vec::with_capacity(classes.len());
        for &k in &classes {
            let mut s1 = vec![0.0; len];
            let mut s2 = vec![0.0; len];
            let mut count = 0.0;
            for m in members {
                if let Some(idx) = m.classes.iter().position(|&c| c == k) {
                    count += 1.0;
                    for i in 0..len {
                        s1[i] += m.rho1_k[idx][i];
                        s2[i] += m.rho2_k[idx][i];
                    }
                }
            }
            for i in 0..len {
                s1[i] /= count;
                s2[i] /= count;
            }
            rho1_k.push(s1);
            rho2_k.push(s2);
        }
        TimeSeries {
            times,
            rho1,
            rho2,
            classes,
            rho1_k,
            rho2_k,
        }
    }

    /// Checks the structural invariants: bounds, nesting, monotonicity.
    pub fn check_invariants(&self) -> Result<(), ContagionError> {
        let check = |name: &str, series: &[f64]| -> Result<(), ContagionError> {
            let mut prev = f64::NEG_INFINITY;
            for &x in series {
                if !x.is_finite() {
                    return Err(ContagionError::NonFinite(name.into()));
                }
                if x < prev - 1e-12 {
                    return Err(ContagionError::InvalidConfig(format!(
                        "{name} is not non-decreasing"
                    )));
                }
                prev = x;
            }
            Ok(())
        };
        check("rho1", &self.rho1)?;
        check("rho2", &self.rho2)?;
        for (i, _) in self.classes.iter().enumerate() {
            check("rho1_k", &self.rho1_k[i])?;
            check("rho2_k", &self.rho2_k[i])?;
        }
        for i in 0..self.times.len() {
            if self.rho2[i] > self.rho1[i] + 1e-12 || self.rho1[i] > 1.0 + 1e-12 {
                return Err(ContagionError::InvalidConfig(
                    "nesting 0 <= rho2 <= rho1 <= 1 violated".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Round half to even, used for converting seed fractions to counts.
pub(crate) fn round_count(x: f64) -> usize {
    x.round_ties_even() as usize
}
