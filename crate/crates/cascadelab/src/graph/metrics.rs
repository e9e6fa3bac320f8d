//! Degree statistics measured on concrete graphs.

use super::{DegreeDistribution, Graph, GraphError, JointDegreeDistribution};

/// Empirical degree distribution: `P_k` = (count of degree-k nodes) / N.
pub fn degree_distribution(g: &Graph) -> DegreeDistribution {
    let n = g.node_count() as f64;
    let entries: Vec<(usize, f64)> = g
        .degree_index()
        .iter()
        .map(|(&k, nodes)| (k, nodes.len() as f64 / n))
        .collect();
    DegreeDistribution::new(&entries).expect("counts always normalize")
}

/// Empirical joint degree-degree distribution over ordered edge endpoints.
pub fn joint_degree_distribution(g: &Graph) -> Result<JointDegreeDistribution, GraphError> {
    if g.edge_count() == 0 {
        return Err(GraphError::Edgeless);
    }
    let mut triples: std::collections::BTreeMap<(usize, usize), f64> =
        std::collections::BTreeMap::new();
    for (u, v) in g.edges() {
        let (ku, kv) = (g.degree(u), g.degree(v));
        *triples.entry((ku, kv)).or_insert(0.0) += 1.0;
        *triples.entry((kv, ku)).or_insert(0.0) += 1.0;
    }
    let flat: Vec<(usize, usize, f64)> =
        triples.into_iter().map(|((k, k2), w)| (k, k2, w)).collect();
    JointDegreeDistribution::new(&flat)
}

/// Degree assortativity: the Pearson correlation of endpoint degrees over
/// the ordered edge list. Errors when all endpoint degrees are equal.
pub fn assortativity(g: &Graph) -> Result<f64, GraphError> {
    if g.edge_count() == 0 {
        return Err(GraphError::Edgeless);
    }
    let mut sx = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut count = 0.0;
    for (u, v) in g.edges() {
        let (ku, kv) = (g.degree(u) as f64, g.degree(v) as f64);
        // both orientations of each edge
        sx += ku + kv;
        sxx += ku * ku + kv * kv;
        sxy += 2.0 * ku * kv;
        count += 2.0;
    }
    let mean = sx / count;
    let var = sxx / count - mean * mean;
    if var <= 1e-12 {
        return Err(GraphError::DegenerateAssortativity);
    }
    let cov = sxy / count - mean * mean;
    Ok(cov / var)
}
