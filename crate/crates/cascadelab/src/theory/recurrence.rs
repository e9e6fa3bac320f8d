//! The discrete synchronous recurrence: per-class activation probabilities
//! `q_k^(i)` and densities `rho_k^(i)` driven by neighbor averages
//! `qbar_k^(i)`.

use super::binomial::binomial_row;
use super::{build_tables, ModelInputs, NetworkModel, ResponseTable, TheoryError, TheoryState};
use crate::graph::{DegreeDistribution, JointDegreeDistribution};

/// Conditional neighbor activation probability for a degree-`k` node:
/// the row-weighted average `sum_k' P(k,k') q_k' / sum_k' P(k,k')`.
/// `q` is indexed over `joint.degrees()`.
pub fn qbar(joint: &JointDegreeDistribution, q: &[f64], k: usize) -> Result<f64, TheoryError> {
    let degrees = joint.degrees();
    assert_eq!(q.len(), degrees.len(), "q must cover the joint's degrees");
    let row = joint.row_sum(k);
    if row <= 0.0 {
        return Err(TheoryError::DegreeAbsent(k));
    }
    let weighted: f64 = degrees
        .iter()
        .zip(q.iter())
        .map(|(&k2, &qv)| joint.probability(k, k2) * qv)
        .sum();
    Ok(weighted / row)
}

/// Neighbor averages for every class. For factorized networks the average
/// is degree-independent: `qbar = sum_k k P_k q_k / z`.
pub fn neighbor_averages(network: &NetworkModel, q: &[f64]) -> Result<Vec<f64>, TheoryError> {
    match network {
        NetworkModel::Factorized(dist) => {
            let z = dist.mean_degree();
            let support = dist.support();
            assert_eq!(q.len(), support.len());
            let avg: f64 = support
                .iter()
                .zip(q.iter())
                .map(|(&k, &qv)| k as f64 * dist.probability(k) / z * qv)
                .sum();
            Ok(vec![avg; q.len()])
        }
        NetworkModel::Correlated(joint) => {
            joint.degrees().iter().map(|&k| qbar(joint, q, k)).collect()
        }
    }
}

fn ratio(q1bar: f64, q2bar: f64) -> f64 {
    // q2/q1 with the 0/0 convention: when q1 = 0 the only surviving
    // binomial term is m1 = 0, so the ratio value is irrelevant
    if q1bar > 0.0 {
        (q2bar / q1bar).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// The double binomial sum over `(m1, m2)` with `m1 <= n`.
///
/// Returns `(sum F1, sum F2-term)` where the F2 term carries the parent
/// correction `(1 - qbar1) F2(m1, m2) + qbar1 F2(m1+1, m2)` when
/// `parent_term` is set.
fn double_sum(
    table: &ResponseTable,
    n: usize,
    q1bar: f64,
    q2bar: f64,
    parent_term: bool,
) -> (f64, f64) {
    let outer = binomial_row(n, q1bar);
    let r = ratio(q1bar, q2bar);
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for m1 in 0..=n {
        let w1 = outer[m1];
        if w1 == 0.0 {
            continue;
        }
        let inner = binomial_row(m1, r);
        let mut t1 = 0.0;
        let mut t2 = 0.0;
        for m2 in 0..=m1 {
            let w2 = inner[m2];
            t1 += w2 * table.f1(m1, m2);
            let f2 = if parent_term {
                (1.0 - q1bar) * table.f2(m1, m2) + q1bar * table.f2(m1 + 1, m2)
            } else {
                table.f2(m1, m2)
            };
            t2 += w2 * f2;
        }
        s1 += w1 * t1;
        s2 += w1 * t2;
    }
    (s1, s2)
}

/// Per-class densities from the previous step's neighbor averages:
/// `rho_k^(i) = phi_i + (1 - phi_i) sum_{m1 <= k} B(m1; k, qbar1)
/// sum_{m2 <= m1} B(m2; m1, qbar2/qbar1) F_i(m1, m2, k)`.
pub(crate) fn update_rho_tables(
    tables: &[ResponseTable],
    phi1: f64,
    phi2: f64,
    q1bar: &[f64],
    q2bar: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(tables.len(), q1bar.len());
    assert_eq!(tables.len(), q2bar.len());
    let mut rho1 = Vec::with_capacity(tables.len());
    let mut rho2 = Vec::with_capacity(tables.len());
    for (c, table) in tables.iter().enumerate() {
        let k = table.degree();
        if k == 0 {
            rho1.push(phi1);
            rho2.push(phi2);
            continue;
        }
        let (s1, s2) = double_sum(table, k, q1bar[c], q2bar[c], false);
        let r1 = phi1 + (1.0 - phi1) * s1;
        let r2 = phi2 + (1.0 - phi2) * s2;
        rho1.push(r1.clamp(0.0, 1.0));
        rho2.push(r2.clamp(0.0, 1.0).min(r1));
    }
    (rho1, rho2)
}

/// Next per-class neighbor activation probabilities. The `m1` sum runs to
/// `k - 1` (the parent does not contribute to its child's activation for
/// stage 1), and the stage-2 sum carries the parent correction.
pub(crate) fn update_q_tables(
    tables: &[ResponseTable],
    phi1: f64,
    phi2: f64,
    q1bar: &[f64],
    q2bar: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(tables.len(), q1bar.len());
    assert_eq!(tables.len(), q2bar.len());
    let mut q1 = Vec::with_capacity(tables.len());
    let mut q2 = Vec::with_capacity(tables.len());
    for (c, table) in tables.iter().enumerate() {
        let k = table.degree();
        if k == 0 {
            q1.push(phi1);
            q2.push(phi2);
            continue;
        }
        let (s1, s2) = double_sum(table, k - 1, q1bar[c], q2bar[c], true);
        let a = (phi1 + (1.0 - phi1) * s1).clamp(0.0, 1.0);
        let b = (phi2 + (1.0 - phi2) * s2).clamp(0.0, 1.0);
        q1.push(a);
        // the tree approximation can overshoot q2 past q1 when R2 is close
        // to R1 (the parent correction uses qbar1; see the state-nesting
        // invariant), so enforce nesting explicitly
        q2.push(b.min(a));
    }
    (q1, q2)
}

/// One-shot public form of the density update.
pub fn update_rho(
    inputs: &ModelInputs,
    q1bar: &[f64],
    q2bar: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), TheoryError> {
    let tables = build_tables(&inputs.response, &inputs.network.classes())?;
    Ok(update_rho_tables(
        &tables,
        inputs.phi1,
        inputs.phi2,
        q1bar,
        q2bar,
    ))
}

/// One-shot public form of the q update, taking the current state.
pub fn update_q(
    inputs: &ModelInputs,
    state: &TheoryState,
) -> Result<(Vec<f64>, Vec<f64>), TheoryError> {
    let tables = build_tables(&inputs.response, &state.classes)?;
    let q1bar = neighbor_averages(&inputs.network, &state.q1)?;
    let q2bar = neighbor_averages(&inputs.network, &state.q2)?;
    Ok(update_q_tables(
        &tables,
        inputs.phi1,
        inputs.phi2,
        &q1bar,
        &q2bar,
    ))
}

/// Degree-weighted mixture of per-class densities.
pub fn aggregate(rho_k: &[f64], weights: &[f64]) -> f64 {
    assert_eq!(rho_k.len(), weights.len(), "dimension mismatch");
    rho_k.iter().zip(weights.iter()).map(|(r, w)| r * w).sum()
}

#[derive(Debug, Clone)]
pub struct IterateOptions {
    /// Infinity-norm convergence tolerance on the q vectors.
    pub tol: f64,
    pub max_steps: usize,
    /// Keep the whole trajectory; otherwise only the initial and final
    /// states are retained.
    pub keep_trajectory: bool,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions {
            tol: 1e-10,
            max_steps: 100_000,
            keep_trajectory: true,
        }
    }
}

/// Trajectory of the discrete map, with the reached fixpoint last.
#[derive(Debug, Clone)]
pub struct TheoryTrajectory {
    pub states: Vec<TheoryState>,
    pub converged: bool,
    pub steps: usize,
    pub residual: f64,
}

impl TheoryTrajectory {
    pub fn fixpoint(&self) -> &TheoryState {
        self.states.last().expect("nonempty trajectory")
    }
}

/// Iterates the synchronous map from `Q^(i)(0) = [phi_i, ...]` until the
/// q vectors stop moving or the step limit is reached. A hit step limit is
/// reported as `converged = false` with the partial result retained.
pub fn iterate_sync(
    inputs: &ModelInputs,
    opts: &IterateOptions,
) -> Result<TheoryTrajectory, TheoryError> {
    let classes = inputs.network.classes();
    let tables = build_tables(&inputs.response, &classes)?;
    let mut state = TheoryState::initial(classes, inputs.phi1, inputs.phi2);
    let mut states = vec![state.clone()];
    let mut residual = f64::INFINITY;
    for n in 1..=opts.max_steps {
        let q1bar = neighbor_averages(&inputs.network, &state.q1)?;
        let q2bar = neighbor_averages(&inputs.network, &state.q2)?;
        let (rho1, rho2) = update_rho_tables(&tables, inputs.phi1, inputs.phi2, &q1bar, &q2bar);
        let (q1, q2) = update_q_tables(&tables, inputs.phi1, inputs.phi2, &q1bar, &q2bar);
        residual = q1
            .iter()
            .zip(state.q1.iter())
            .chain(q2.iter().zip(state.q2.iter()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        state = TheoryState {
            classes: state.classes.clone(),
            q1,
            q2,
            rho1,
            rho2,
            t: n as f64,
        };
        if opts.keep_trajectory {
            states.push(state.clone());
        }
        if residual < opts.tol {
            if !opts.keep_trajectory {
                states.push(state);
            }
            return Ok(TheoryTrajectory {
                states,
                converged: true,
                steps: n,
                residual,
            });
        }
    }
    if !opts.keep_trajectory {
        states.push(state);
    }
    Ok(TheoryTrajectory {
        states,
        converged: false,
        steps: opts.max_steps,
        residual,
    })
}

/// Scalar state of the configuration-model specialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarState {
    pub qbar1: f64,
    pub qbar2: f64,
}

/// One step of the scalar configuration-model recurrence: returns the
/// per-class densities evaluated at the current scalar averages plus the
/// next averages. Agrees with the vector path on factorized joints.
pub fn config_model_step(
    inputs: &ModelInputs,
    qbar1: f64,
    qbar2: f64,
) -> Result<(Vec<f64>, Vec<f64>, f64, f64), TheoryError> {
    let NetworkModel::Factorized(dist) = &inputs.network else {
        return Err(TheoryError::InvalidInputs(
            "scalar path requires a factorized (configuration-model) network".into(),
        ));
    };
    let classes = inputs.network.classes();
    let tables = build_tables(&inputs.response, &classes)?;
    let (rho1, rho2) = update_rho_tables(
        &tables,
        inputs.phi1,
        inputs.phi2,
        &vec![qbar1; classes.len()],
        &vec![qbar2; classes.len()],
    );
    let (q1_next, q2_next) = scalar_q_step(dist, &tables, inputs.phi1, inputs.phi2, qbar1, qbar2);
    Ok((rho1, rho2, q1_next, q2_next))
}

/// Edge-weighted scalar q update `qbar(n+1) = phi + (1 - phi) sum_k
/// (k P_k / z) [double sum at qbar(n)]`.
pub(crate) fn scalar_q_step(
    dist: &DegreeDistribution,
    tables: &[ResponseTable],
    phi1: f64,
    phi2: f64,
    qbar1: f64,
    qbar2: f64,
) -> (f64, f64) {
    let z = dist.mean_degree();
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for table in tables {
        let k = table.degree();
        if k == 0 {
            continue;
        }
        let w = k as f64 * dist.probability(k) / z;
        let (t1, t2) = double_sum(table, k - 1, qbar1, qbar2, true);
        s1 += w * t1;
        s2 += w * t2;
    }
    let a = (phi1 + (1.0 - phi1) * s1).clamp(0.0, 1.0);
    let b = (phi2 + (1.0 - phi2) * s2).clamp(0.0, 1.0).min(a);
    (a, b)
}
