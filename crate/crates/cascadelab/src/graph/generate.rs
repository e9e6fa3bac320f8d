//! Random graph generators: erased configuration model, Erdős–Rényi
//! G(n,p), and joint-distribution-targeted correlated networks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

use super::{DegreeDistribution, Graph, GraphError, JointDegreeDistribution};

/// Allocates `n` items across classes proportionally to `weights` using the
/// largest-remainder method, so counts are exact when the split divides
/// evenly.
fn largest_remainder(weights: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let ideal: Vec<f64> = weights.iter().map(|w| w / total * n as f64).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = ideal[a] - ideal[a].floor();
        let rb = ideal[b] - ideal[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take(n - assigned) {
        counts[i] += 1;
    }
    counts
}

fn sample_degree<R: Rng>(dist: &DegreeDistribution, rng: &mut R) -> usize {
    let mut u: f64 = rng.random();
    for (k, p) in dist.iter() {
        u -= p;
        if u <= 0.0 {
            return k;
        }
    }
    dist.kmax()
}

/// Generates an erased-configuration-model graph on `n` nodes targeting the
/// degree distribution `dist`.
///
/// Degree counts per class are allocated exactly (largest remainder), so
/// deterministic mixtures with evenly dividing counts are realized exactly.
/// If the stub total is odd, one node's degree is resampled from `dist`
/// until parity is fixed. Stubs are paired uniformly; self-loops and
/// multi-edges arising from the matching are erased.
pub fn generate_config_model(
    dist: &DegreeDistribution,
    n: usize,
    rng_seed: u64,
) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::Construction(format!(
            "need at least 2 nodes, got {n}"
        )));
    }
    if dist.kmax() >= n {
        return Err(GraphError::Construction(format!(
            "maximum degree {} cannot be realized on {n} nodes",
            dist.kmax()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);

    let support = dist.support();
    let weights: Vec<f64> = support.iter().map(|&k| dist.probability(k)).collect();
    let counts = largest_remainder(&weights, n);

    let mut degrees = Vec::with_capacity(n);
    for (&k, &c) in support.iter().zip(counts.iter()) {
        degrees.extend(std::iter::repeat_n(k, c));
    }
    degrees.shuffle(&mut rng);

    let mut stub_total: usize = degrees.iter().sum();
    if stub_total % 2 == 1 {
        let v = rng.random_range(0..n);
        for _ in 0..1000 {
            let k = sample_degree(dist, &mut rng);
            if (stub_total - degrees[v] + k).is_multiple_of(2) {
                stub_total = stub_total - degrees[v] + k;
                degrees[v] = k;
                break;
            }
        }
        if stub_total % 2 == 1 {
            // single-atom odd distribution: bump one node by one stub
            degrees[v] += 1;
            stub_total += 1;
        }
    }

    let mut stubs: Vec<u32> = Vec::with_capacity(stub_total);
    for (v, &k) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v as u32, k));
    }
    stubs.shuffle(&mut rng);

    let edges: Vec<(u32, u32)> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let (g, _) = Graph::from_edges_dedup(n, &edges)?;
    Ok(g)
}

/// Generates a true G(n, p) Erdős–Rényi graph with p = z / (n - 1).
///
/// Uses geometric gap sampling over the pair sequence, so the cost is
/// proportional to the number of edges.
pub fn generate_er(z: f64, n: usize, rng_seed: u64) -> Result<Graph, GraphError> {
    if !(z > 0.0) || z >= (n - 1) as f64 {
        return Err(GraphError::Construction(format!(
            "mean degree {z} must lie in (0, n-1)"
        )));
    }
    let p = z / (n - 1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity((n as f64 * z / 2.0 * 1.1) as usize);

    // Batagelj-Brandes skipping: walk the lexicographic pair list in jumps
    // of geometric length.
    let ln_q = (1.0 - p).ln();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let u: f64 = rng.random();
        let gap = ((1.0 - u).ln() / ln_q).floor() as i64;
        w += 1 + gap;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as u32, v as u32));
        }
    }
    Graph::from_edges(n, &edges)
}

/// Generates a random graph whose edge-endpoint degree pairs target the
/// joint distribution `joint`.
///
/// Node counts per degree class come from the implied marginal `k P_k / z`;
/// edge counts per degree-pair class are drawn from the multinomial implied
/// by the joint, then repaired to meet the exact per-class stub budgets.
/// Stubs are wired uniformly within each pair class and defects erased.
pub fn generate_correlated(
    joint: &JointDegreeDistribution,
    n: usize,
    rng_seed: u64,
) -> Result<Graph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let degrees = joint.degrees().to_vec();
    if degrees.iter().any(|&k| k >= n) {
        return Err(GraphError::Construction(format!(
            "maximum degree {} cannot be realized on {n} nodes",
            degrees.last().unwrap()
        )));
    }

    // node counts per class from w_k / k, exact by largest remainder
    let weights: Vec<f64> = degrees
        .iter()
        .map(|&k| joint.row_sum(k) / k as f64)
        .collect();
    let mut class_counts = largest_remainder(&weights, n);
    let stub_sum = |counts: &[usize]| -> usize {
        degrees
            .iter()
            .zip(counts.iter())
            .map(|(&k, &c)| k * c)
            .sum()
    };
    if stub_sum(&class_counts) % 2 == 1 {
        // rounding produced an odd stub total; move one node between two
        // classes whose degrees differ by an odd amount
        let mut fixed = false;
        'outer: for i in 0..degrees.len() {
            for j in 0..degrees.len() {
                if i != j && class_counts[i] > 0 && (degrees[i] + degrees[j]) % 2 == 1 {
                    class_counts[i] -= 1;
                    class_counts[j] += 1;
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if !fixed {
            // all degrees share parity: leave one node of the largest
            // class isolated instead
            let i = (0..degrees.len())
                .max_by_key(|&i| class_counts[i])
                .expect("nonempty support");
            class_counts[i] -= 1;
        }
    }
    let stub_budget: Vec<usize> = degrees
        .iter()
        .zip(class_counts.iter())
        .map(|(&k, &c)| k * c)
        .collect();
    let stub_total: usize = stub_budget.iter().sum();
    let m = stub_total / 2;

    // unordered pair classes (i <= j indices into `degrees`)
    let nc = degrees.len();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut pair_probs: Vec<f64> = Vec::new();
    for i in 0..nc {
        for j in i..nc {
            let p = if i == j {
                joint.probability(degrees[i], degrees[j])
            } else {
                2.0 * joint.probability(degrees[i], degrees[j])
            };
            pairs.push((i, j));
            pair_probs.push(p);
        }
    }

    for attempt in 0..20 {
        // multinomial draw of edge counts per pair class
        let mut counts = vec![0usize; pairs.len()];
        let mut remaining = m;
        let mut mass_left: f64 = pair_probs.iter().sum();
        for (i, &p) in pair_probs.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if i + 1 == pair_probs.len() {
                counts[i] = remaining;
                break;
            }
            let frac = (p / mass_left).clamp(0.0, 1.0);
            let c = sample_binomial(remaining, frac, &mut rng);
            counts[i] = c;
            remaining -= c;
            mass_left -= p;
        }

        if repair_counts(&pairs, &mut counts, &stub_budget) {
            return wire_pairs(&degrees, &class_counts, &pairs, &counts, n, &mut rng);
        }
        if attempt == 19 {
            return Err(GraphError::Construction(
                "could not balance pairing counts with stub budgets".into(),
            ));
        }
    }
    unreachable!()
}

fn sample_binomial<R: Rng>(n: usize, p: f64, rng: &mut R) -> usize {
    // inversion by repeated Bernoulli is too slow for large n; use a normal
    // approximation with exact tails for small n
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    if n < 64 {
        return (0..n).filter(|_| rng.random::<f64>() < p).count();
    }
    let mean = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    loop {
        let g: f64 = rand_distr::StandardNormal.sample(rng);
        let x = (mean + sd * g).round();
        if x >= 0.0 && x <= n as f64 {
            return x as usize;
        }
    }
}

/// Adjusts pair-class edge counts in place until each degree class consumes
/// exactly its stub budget. Returns false if the repair loop stalls.
fn repair_counts(pairs: &[(usize, usize)], counts: &mut [usize], stub_budget: &[usize]) -> bool {
    let nc = stub_budget.len();
    let usage = |counts: &[usize]| -> Vec<i64> {
        let mut used = vec![0i64; nc];
        for (&(i, j), &c) in pairs.iter().zip(counts.iter()) {
            used[i] += c as i64;
            used[j] += c as i64;
        }
        used
    };
    for _ in 0..10 * pairs.len() * (stub_budget.iter().sum::<usize>() + 1) {
        let used = usage(counts);
        let excess: Vec<i64> = used
            .iter()
            .zip(stub_budget.iter())
            .map(|(&u, &b)| u - b as i64)
            .collect();
        let Some(hi) = (0..nc).find(|&i| excess[i] > 0) else {
            // no class over budget; all deficits must be zero too since
            // total usage = 2 * total edges = total budget
            return excess.iter().all(|&e| e == 0);
        };
        let Some(lo) = (0..nc).find(|&i| excess[i] < 0) else {
            return false;
        };
        // move one edge endpoint from class hi to class lo: find a pair
        // (hi, x) with positive count and move it to (lo, x)
        let mut moved = false;
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            if counts[idx] == 0 {
                continue;
            }
            let other = if i == hi {
                Some(j)
            } else if j == hi {
                Some(i)
            } else {
                None
            };
            if let Some(x) = other {
                // avoid moving endpoints that would push x over budget when
                // x == hi (diagonal); the move (hi,hi) -> (lo,hi) reduces hi
                // usage by one, always helpful
                let tgt = if x >= lo { (lo, x) } else { (x, lo) };
                let tgt_idx = pairs.iter().position(|&p| p == tgt).unwrap();
                counts[idx] -= 1;
                counts[tgt_idx] += 1;
                moved = true;
                break;
            }
        }
        if !moved {
            return false;
        }
    }
    false
}

fn wire_pairs(
    degrees: &[usize],
    class_counts: &[usize],
    pairs: &[(usize, usize)],
    counts: &[usize],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GraphError> {
    // assign node ids to classes, then build shuffled stub lists per class
    let mut stub_lists: Vec<Vec<u32>> = Vec::with_capacity(degrees.len());
    let mut next_id: u32 = 0;
    for (&k, &c) in degrees.iter().zip(class_counts.iter()) {
        let mut stubs = Vec::with_capacity(k * c);
        for _ in 0..c {
            stubs.extend(std::iter::repeat_n(next_id, k));
            next_id += 1;
        }
        stubs.shuffle(rng);
        stub_lists.push(stubs);
    }
    // leftover nodes (rounding) become isolated; keep ids dense
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (&(i, j), &c) in pairs.iter().zip(counts.iter()) {
        if i == j {
            for _ in 0..c {
                let a = stub_lists[i].pop().ok_or_else(stub_underflow)?;
                let b = stub_lists[i].pop().ok_or_else(stub_underflow)?;
                edges.push((a, b));
            }
        } else {
            for _ in 0..c {
                let a = stub_lists[i].pop().ok_or_else(stub_underflow)?;
                let b = stub_lists[j].pop().ok_or_else(stub_underflow)?;
                edges.push((a, b));
            }
        }
    }
    let (g, _) = Graph::from_edges_dedup(n, &edges)?;
    Ok(g)
}

fn stub_underflow() -> GraphError {
    GraphError::Construction("stub list exhausted during wiring".into())
}
