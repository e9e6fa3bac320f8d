//! Response functions: peer pressure, threshold variants, and the quenched
//! per-node form used by the simulator.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::ContagionError;

/// Whether peer pressure is scaled by the node degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureScaling {
    /// `P = (m1 + beta m2) / k`.
    Fraction,
    /// `P = m1 + beta m2`; activation depends on the number of active
    /// neighbors, not the fraction.
    Count,
}

/// Threshold for one stage: either the same value for every node, or
/// Gaussian-distributed across nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Uniform(f64),
    Gaussian { mean: f64, sd: f64 },
}

impl Threshold {
    /// The cumulative distribution of thresholds evaluated at pressure `p`:
    /// the probability that a random node's threshold is at or below `p`.
    /// Activation at equality is included.
    fn cdf(&self, p: f64) -> f64 {
        match *self {
            Threshold::Uniform(r) => {
                if p >= r {
                    1.0
                } else {
                    0.0
                }
            }
            Threshold::Gaussian { mean, sd } => normal_cdf(p, mean, sd),
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Threshold::Uniform(r) => r,
            Threshold::Gaussian { mean, sd } => {
                let normal = Normal::new(mean, sd).expect("validated sd");
                normal.sample(rng)
            }
        }
    }
}

pub(crate) fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    0.5 * libm::erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
}

/// Peer pressure `P = (m1 + beta m2) / k` experienced by a degree-`k` node
/// with `m1` active and `m2` hyper-active neighbors. Degree-0 nodes have no
/// defined pressure and can only activate via seeding.
pub fn peer_pressure(m1: u32, m2: u32, k: usize, beta: f64) -> Result<f64, ContagionError> {
    debug_assert!(m2 <= m1 && m1 as usize <= k);
    if k == 0 {
        return Err(ContagionError::IsolatedNode);
    }
    Ok((m1 as f64 + beta * m2 as f64) / k as f64)
}

/// The pair of response functions (F1, F2) plus the bonus influence beta.
///
/// F2 is clamped to F1 pointwise so that hyper-active nodes are always a
/// subset of active nodes, matching the requirement `R2 >= R1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseSpec {
    beta: f64,
    scaling: PressureScaling,
    stage1: Threshold,
    stage2: Threshold,
}

impl ResponseSpec {
    pub fn new(
        scaling: PressureScaling,
        stage1: Threshold,
        stage2: Threshold,
        beta: f64,
    ) -> Result<Self, ContagionError> {
        if !(beta >= 0.0) {
            return Err(ContagionError::InvalidResponse(format!(
                "beta = {beta} must be nonnegative"
            )));
        }
        if let (Threshold::Uniform(r1), Threshold::Uniform(r2)) = (stage1, stage2) {
            if r2 < r1 {
                return Err(ContagionError::InvalidResponse(format!(
                    "R2 = {r2} must be at least R1 = {r1}"
                )));
            }
        }
        for t in [stage1, stage2] {
            match t {
                Threshold::Uniform(r) if r.is_nan() => {
                    return Err(ContagionError::InvalidResponse("NaN threshold".into()))
                }
                Threshold::Gaussian { sd, .. } if !(sd > 0.0) => {
                    return Err(ContagionError::InvalidResponse(format!(
                        "Gaussian sd = {sd} must be positive"
                    )))
                }
                _ => {}
            }
        }
        Ok(ResponseSpec {
            beta,
            scaling,
            stage1,
            stage2,
        })
    }

    /// Uniform thresholds on fraction-based peer pressure.
    pub fn fraction_uniform(r1: f64, r2: f64, beta: f64) -> Result<Self, ContagionError> {
        Self::new(
            PressureScaling::Fraction,
            Threshold::Uniform(r1),
            Threshold::Uniform(r2),
            beta,
        )
    }

    /// Uniform thresholds compared against the count of active neighbors
    /// (the `k = 1` variant of the threshold rule).
    pub fn count_uniform(r1: f64, r2: f64, beta: f64) -> Result<Self, ContagionError> {
        Self::new(
            PressureScaling::Count,
            Threshold::Uniform(r1),
            Threshold::Uniform(r2),
            beta,
        )
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn scaling(&self) -> PressureScaling {
        self.scaling
    }

    pub fn stage_threshold(&self, stage: usize) -> Result<Threshold, ContagionError> {
        match stage {
            1 => Ok(self.stage1),
            2 => Ok(self.stage2),
            other => Err(ContagionError::StageIndex(other)),
        }
    }

    fn pressure(&self, m1: u32, m2: u32, k: usize) -> f64 {
        let raw = m1 as f64 + self.beta * m2 as f64;
        match self.scaling {
            PressureScaling::Fraction => raw / k as f64,
            PressureScaling::Count => raw,
        }
    }

    /// Probability that a degree-`k` node with `m1` active and `m2`
    /// hyper-active neighbors becomes stage-`i` active. Degree-0 nodes
    /// never respond.
    pub fn response(
        &self,
        stage: usize,
        m1: u32,
        m2: u32,
        k: usize,
    ) -> Result<f64, ContagionError> {
        if stage != 1 && stage != 2 {
            return Err(ContagionError::StageIndex(stage));
        }
        debug_assert!(m2 <= m1 && m1 as usize <= k.max(m1 as usize));
        if k == 0 {
            return Ok(0.0);
        }
        let p = self.pressure(m1, m2, k);
        let f1 = self.stage1.cdf(p);
        Ok(match stage {
            1 => f1,
            _ => self.stage2.cdf(p).min(f1),
        })
    }

    /// Samples per-node thresholds once (quenched disorder), so a
    /// realization's dynamics are deterministic given the seeds and update
    /// order. Sampled stage-2 thresholds are clamped from below by the
    /// node's stage-1 threshold.
    pub fn quench<R: Rng>(&self, n: usize, rng: &mut R) -> QuenchedResponse {
        let mut r1 = Vec::with_capacity(n);
        let mut r2 = Vec::with_capacity(n);
        for _ in 0..n {
            let a = self.stage1.sample(rng);
            let b = self.stage2.sample(rng).max(a);
            r1.push(a);
            r2.push(b);
        }
        QuenchedResponse {
            beta: self.beta,
            scaling: self.scaling,
            r1,
            r2,
        }
    }
}

/// Deterministic per-node thresholds: the form the simulator actually runs.
#[derive(Debug, Clone)]
pub struct QuenchedResponse {
    beta: f64,
    scaling: PressureScaling,
    r1: Vec<f64>,
    r2: Vec<f64>,
}

impl QuenchedResponse {
    pub fn from_thresholds(
        scaling: PressureScaling,
        r1: Vec<f64>,
        r2: Vec<f64>,
        beta: f64,
    ) -> Result<Self, ContagionError> {
        if r1.len() != r2.len() {
            return Err(ContagionError::InvalidResponse(
                "threshold vectors differ in length".into(),
            ));
        }
        if !(beta >= 0.0) {
            return Err(ContagionError::InvalidResponse(format!(
                "beta = {beta} must be nonnegative"
            )));
        }
        for (v, (&a, &b)) in r1.iter().zip(r2.iter()).enumerate() {
            if b < a {
                return Err(ContagionError::InvalidResponse(format!(
                    "node {v}: r2 = {b} below r1 = {a}"
                )));
            }
        }
        Ok(QuenchedResponse {
            beta,
            scaling,
            r1,
            r2,
        })
    }

    pub fn node_count(&self) -> usize {
        self.r1.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn pressure(&self, m1: u32, m2: u32, k: usize) -> f64 {
        let raw = m1 as f64 + self.beta * m2 as f64;
        match self.scaling {
            PressureScaling::Fraction => raw / k as f64,
            PressureScaling::Count => raw,
        }
    }

    /// Whether the stage-`i` rule fires for node `v` at the given
    /// neighborhood state. Equality at threshold activates.
    pub fn fires(&self, stage: usize, v: u32, m1: u32, m2: u32, k: usize) -> bool {
        if k == 0 {
            return false;
        }
        let p = self.pressure(m1, m2, k);
        let r = match stage {
            1 => self.r1[v as usize],
            _ => self.r2[v as usize],
        };
        p >= r
    }
}
