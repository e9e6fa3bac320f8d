//! Undirected simple graphs and the degree statistics used by the
//! analytical machinery: degree distributions, joint degree-degree
//! distributions, and assortativity.

mod edgelist;
mod generate;
mod metrics;

pub use edgelist::{load_edge_list, write_edge_list, LoadReport};
pub use generate::{generate_config_model, generate_correlated, generate_er};
pub use metrics::{assortativity, degree_distribution, joint_degree_distribution};

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("degree distribution is invalid: {0}")]
    InvalidDistribution(String),
    #[error("joint degree distribution is invalid: {0}")]
    InvalidJoint(String),
    #[error("cannot realize graph: {0}")]
    Construction(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph has no edges; distribution undefined")]
    Edgeless,
    #[error("assortativity undefined: all edge endpoints have equal degree")]
    DegenerateAssortativity,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Immutable undirected simple graph with sorted adjacency lists.
///
/// Node ids are dense integers `0..node_count()`. The structure is safe to
/// share across threads once built.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    degree_index: BTreeMap<usize, Vec<u32>>,
}

impl Graph {
    /// Builds a graph from an edge list over nodes `0..n`. Self-loops and
    /// duplicate edges are rejected; use [`Graph::from_edges_dedup`] to drop
    /// them silently instead.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let (g, report) = Self::from_edges_dedup(n, edges)?;
        if report.self_loops_dropped > 0 || report.duplicates_dropped > 0 {
            return Err(GraphError::Construction(format!(
                "{} self-loops and {} duplicate edges in input",
                report.self_loops_dropped, report.duplicates_dropped
            )));
        }
        Ok(g)
    }

    /// Builds a graph from an edge list, dropping self-loops and duplicate
    /// edges. Returns the counts of dropped entries.
    pub fn from_edges_dedup(
        n: usize,
        edges: &[(u32, u32)],
    ) -> Result<(Self, LoadReport), GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        let mut self_loops = 0usize;
        for &(u, v) in edges {
            let (u, v) = (u as usize, v as usize);
            if u >= n || v >= n {
                return Err(GraphError::Construction(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                self_loops += 1;
                continue;
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        let mut duplicates = 0usize;
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            duplicates += before - list.len();
        }
        // every duplicate edge was counted once from each endpoint
        duplicates /= 2;
        let g = Self::from_adjacency(adjacency);
        let report = LoadReport {
            self_loops_dropped: self_loops,
            duplicates_dropped: duplicates,
            id_map: Vec::new(),
        };
        Ok((g, report))
    }

    pub(crate) fn from_adjacency(adjacency: Vec<Vec<u32>>) -> Self {
        let mut degree_index: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (v, list) in adjacency.iter().enumerate() {
            degree_index.entry(list.len()).or_default().push(v as u32);
        }
        Graph {
            adjacency,
            degree_index,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    /// Map from degree to the ids of nodes with that degree. The value lists
    /// partition the node set.
    pub fn degree_index(&self) -> &BTreeMap<usize, Vec<u32>> {
        &self.degree_index
    }

    /// Degrees present in the graph, ascending.
    pub fn degree_classes(&self) -> Vec<usize> {
        self.degree_index.keys().copied().collect()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    /// Edges as (u, v) pairs with u < v, ascending.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adjacency.iter().enumerate() {
            for &v in list {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }
}

/// Degree distribution `P_k` over `k = 0..=kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    probabilities: BTreeMap<usize, f64>,
    kmax: usize,
}

impl DegreeDistribution {
    /// Builds a distribution from (degree, probability) pairs. Probabilities
    /// must be nonnegative and sum to 1 within 1e-12; zero entries are
    /// dropped.
    pub fn new(entries: &[(usize, f64)]) -> Result<Self, GraphError> {
        let mut probabilities = BTreeMap::new();
        let mut total = 0.0;
        for &(k, p) in entries {
            if p < 0.0 || !p.is_finite() {
                return Err(GraphError::InvalidDistribution(format!(
                    "P_{k} = {p} is not a valid probability"
                )));
            }
            if p > 0.0 {
                *probabilities.entry(k).or_insert(0.0) += p;
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(GraphError::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let kmax = probabilities.keys().last().copied().unwrap_or(0);
        Ok(DegreeDistribution {
            probabilities,
            kmax,
        })
    }

    /// Builds the distribution from unnormalized weights.
    pub fn from_weights(entries: &[(usize, f64)]) -> Result<Self, GraphError> {
        let total: f64 = entries.iter().map(|&(_, w)| w).sum();
        if total <= 0.0 {
            return Err(GraphError::InvalidDistribution(
                "weights sum to zero".into(),
            ));
        }
        let normalized: Vec<(usize, f64)> = entries.iter().map(|&(k, w)| (k, w / total)).collect();
        Self::new(&normalized)
    }

    /// Poisson(z) truncated at `kmax` and renormalized. Used for
    /// Erdős–Rényi ensembles in the analytical modules.
    pub fn poisson(z: f64, kmax: usize) -> Result<Self, GraphError> {
        if z <= 0.0 || !z.is_finite() {
            return Err(GraphError::InvalidDistribution(format!(
                "mean degree {z} must be positive"
            )));
        }
        let mut entries = Vec::with_capacity(kmax + 1);
        // pmf by upward recurrence: P_0 = e^{-z}, P_{k} = P_{k-1} * z / k
        let mut p = (-z).exp();
        for k in 0..=kmax {
            entries.push((k, p));
            p *= z / (k + 1) as f64;
        }
        Self::from_weights(&entries)
    }

    pub fn probability(&self, k: usize) -> f64 {
        self.probabilities.get(&k).copied().unwrap_or(0.0)
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// Mean degree `z = sum_k k P_k`.
    pub fn mean_degree(&self) -> f64 {
        self.probabilities.iter().map(|(&k, &p)| k as f64 * p).sum()
    }

    /// Degrees with positive probability, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.probabilities.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probabilities.iter().map(|(&k, &p)| (k, p))
    }

    /// The uncorrelated joint distribution `P(k,k') = k P_k k' P_{k'} / z^2`.
    pub fn factorized_joint(&self) -> Result<JointDegreeDistribution, GraphError> {
        let z = self.mean_degree();
        if z <= 0.0 {
            return Err(GraphError::InvalidDistribution(
                "mean degree is zero; factorized joint undefined".into(),
            ));
        }
        let mut entries = Vec::new();
        for (k, pk) in self.iter() {
            if k == 0 {
                continue;
            }
            for (k2, pk2) in self.iter() {
                if k2 == 0 {
                    continue;
                }
                let w = (k as f64 * pk / z) * (k2 as f64 * pk2 / z);
                entries.push((k, k2, w));
            }
        }
        JointDegreeDistribution::new(&entries)
    }
}

/// Joint degree-degree distribution `P(k,k')`: the probability that a
/// uniformly random ordered edge endpoint pair has degrees `(k, k')`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDegreeDistribution {
    entries: BTreeMap<(usize, usize), f64>,
    degrees: Vec<usize>,
}

impl JointDegreeDistribution {
    /// Builds a joint distribution from (k, k', weight) triples. Missing
    /// mirror entries are filled by symmetry; weights are normalized to
    /// total 1. Asymmetric conflicting entries are rejected.
    pub fn new(triples: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(k, k2, w) in triples {
            if w < 0.0 || !w.is_finite() {
                return Err(GraphError::InvalidJoint(format!(
                    "P({k},{k2}) = {w} is not a valid weight"
                )));
            }
            if k == 0 || k2 == 0 {
                return Err(GraphError::InvalidJoint(
                    "degree-0 nodes cannot appear at edge endpoints".into(),
                ));
            }
            if w > 0.0 {
                *entries.entry((k, k2)).or_insert(0.0) += w;
            }
        }
        // symmetrize: copy entries whose mirror is absent, reject conflicts
        let keys: Vec<(usize, usize)> = entries.keys().copied().collect();
        for (k, k2) in keys {
            let w = entries[&(k, k2)];
            match entries.get(&(k2, k)) {
                None => {
                    entries.insert((k2, k), w);
                }
                Some(&w2) if (w - w2).abs() > 1e-12 * w.max(w2).max(1.0) => {
                    return Err(GraphError::InvalidJoint(format!(
                        "P({k},{k2}) = {w} conflicts with P({k2},{k}) = {w2}"
                    )));
                }
                _ => {}
            }
        }
        let total: f64 = entries.values().sum();
        if total <= 0.0 {
            return Err(GraphError::InvalidJoint("all weights are zero".into()));
        }
        for w in entries.values_mut() {
            *w /= total;
        }
        let mut degrees: Vec<usize> = entries.keys().map(|&(k, _)| k).collect();
        degrees.sort_unstable();
        degrees.dedup();
        Ok(JointDegreeDistribution { entries, degrees })
    }

    pub fn probability(&self, k: usize, k2: usize) -> f64 {
        self.entries.get(&(k, k2)).copied().unwrap_or(0.0)
    }

    /// Degrees appearing in the support, ascending.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Row mass `sum_{k'} P(k,k')`: the fraction of edge endpoints that sit
    /// at a degree-k node.
    pub fn row_sum(&self, k: usize) -> f64 {
        self.degrees.iter().map(|&k2| self.probability(k, k2)).sum()
    }

    /// The degree distribution implied by the joint via `P(k,k') = k P_k k'
    /// P_{k'} / z^2` marginals; degree-0 mass is unrepresentable and absent.
    pub fn implied_degree_distribution(&self) -> Result<DegreeDistribution, GraphError> {
        let weights: Vec<(usize, f64)> = self
            .degrees
            .iter()
            .map(|&k| (k, self.row_sum(k) / k as f64))
            .collect();
        DegreeDistribution::from_weights(&weights)
    }

    /// Mean degree of the implied degree distribution.
    pub fn mean_degree(&self) -> f64 {
        // z = 1 / sum_k (w_k / k)
        let inv: f64 = self
            .degrees
            .iter()
            .map(|&k| self.row_sum(k) / k as f64)
            .sum();
        1.0 / inv
    }

    /// Checks symmetry, normalization, and marginal consistency against the
    /// given degree distribution.
    pub fn validate_against(&self, dist: &DegreeDistribution) -> Result<(), GraphError> {
        let z = dist.mean_degree();
        for &k in &self.degrees {
            let expected = k as f64 * dist.probability(k) / z;
            let got = self.row_sum(k);
            if (got - expected).abs() > 1e-10 {
                return Err(GraphError::InvalidJoint(format!(
                    "marginal for degree {k} is {got}, expected k P_k / z = {expected}"
                )));
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.entries.iter().map(|(&kk, &w)| (kk, w))
    }
}
