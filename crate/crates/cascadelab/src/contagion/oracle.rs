//! Brute-force final-state computation for deterministic thresholds.
//!
//! Repeats full synchronous sweeps, recounting active neighbors from
//! scratch each time, until no node changes. Monotonicity bounds the sweep
//! count by 2N. Deliberately shares no state machinery with the simulator
//! so it can serve as an independent check.

use super::{QuenchedResponse, Stage};
use crate::graph::Graph;

/// Computes the fixpoint of the threshold dynamics from explicit seed sets.
/// Nodes listed in `seeds2` start hyper-active (and are therefore active);
/// nodes in `seeds1` start active.
pub fn final_state_oracle(
    g: &Graph,
    resp: &QuenchedResponse,
    seeds1: &[u32],
    seeds2: &[u32],
) -> Vec<Stage> {
    let n = g.node_count();
    let mut stages = vec![Stage::S0; n];
    for &v in seeds1 {
        stages[v as usize] = Stage::S1;
    }
    for &v in seeds2 {
        stages[v as usize] = Stage::S2;
    }

    for _sweep in 0..2 * n.max(1) {
        let mut next = stages.clone();
        let mut changed = false;
        for v in 0..n as u32 {
            let current = stages[v as usize];
            if current == Stage::S2 {
                continue;
            }
            let k = g.degree(v);
            let mut m1 = 0u32;
            let mut m2 = 0u32;
            for &u in g.neighbors(v) {
                if stages[u as usize] >= Stage::S1 {
                    m1 += 1;
                }
                if stages[u as usize] == Stage::S2 {
                    m2 += 1;
                }
            }
            let target = if current == Stage::S0 {
                if resp.fires(1, v, m1, m2, k) {
                    if resp.fires(2, v, m1, m2, k) {
                        Stage::S2
                    } else {
                        Stage::S1
                    }
                } else {
                    Stage::S0
                }
            } else if resp.fires(2, v, m1, m2, k) {
                Stage::S2
            } else {
                Stage::S1
            };
            if target > current {
                next[v as usize] = target;
                changed = true;
            }
        }
        stages = next;
        if !changed {
            return stages;
        }
    }
    stages
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contagion::{PressureScaling, ResponseSpec};
    use crate::graph::Graph;

    fn quench_uniform(spec: &ResponseSpec, n: usize) -> QuenchedResponse {
        // uniform thresholds are deterministic; any rng stream works
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        spec.quench(n, &mut rng)
    }

    #[test]
    fn complete_graph_single_hyper_seed_saturates() {
        // K4, R1 = 1/3, R2 = 2/3, beta = 1: the other three nodes see
        // P = (1+1)/3 = 2/3 >= 2/3 and jump straight to S2
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let spec = ResponseSpec::fraction_uniform(1.0 / 3.0, 2.0 / 3.0, 1.0).unwrap();
        let resp = quench_uniform(&spec, 4);
        let fixpoint = final_state_oracle(&g, &resp, &[], &[0]);
        assert!(fixpoint.iter().all(|&s| s == Stage::S2));
    }

    #[test]
    fn path_below_threshold_stalls_at_seeds() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let spec = ResponseSpec::fraction_uniform(0.6, 0.9, 0.0).unwrap();
        let resp = quench_uniform(&spec, 3);
        let fixpoint = final_state_oracle(&g, &resp, &[0], &[]);
        assert_eq!(fixpoint, vec![Stage::S1, Stage::S0, Stage::S0]);
    }

    #[test]
    fn no_seeds_stay_all_inactive() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let spec = ResponseSpec::fraction_uniform(0.2, 0.4, 0.5).unwrap();
        let resp = quench_uniform(&spec, 5);
        let fixpoint = final_state_oracle(&g, &resp, &[], &[]);
        assert!(fixpoint.iter().all(|&s| s == Stage::S0));
    }

    #[test]
    fn beta_zero_with_infinite_r2_reduces_to_single_stage() {
        // the S1 fixpoint must be bit-identical whether stage two exists or
        // is disabled
        let g = crate::graph::generate_er(4.0, 60, 17).unwrap();
        let multi = ResponseSpec::fraction_uniform(0.25, 0.4, 0.0).unwrap();
        let single = ResponseSpec::fraction_uniform(0.25, f64::INFINITY, 0.0).unwrap();
        let seeds1: Vec<u32> = vec![0, 5, 9];
        let a = final_state_oracle(&g, &quench_uniform(&multi, 60), &seeds1, &[]);
        let b = final_state_oracle(&g, &quench_uniform(&single, 60), &seeds1, &[]);
        let s1a: Vec<bool> = a.iter().map(|s| s.is_active()).collect();
        let s1b: Vec<bool> = b.iter().map(|s| s.is_active()).collect();
        assert_eq!(s1a, s1b);
        assert!(b.iter().all(|s| !s.is_hyper()));
    }

    #[test]
    fn count_based_thresholds_supported() {
        // star center with R1 = 2 count-based: two active leaves needed
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let spec = ResponseSpec::count_uniform(2.0, 10.0, 0.0).unwrap();
        let resp = quench_uniform(&spec, 4);
        let one = final_state_oracle(&g, &resp, &[1], &[]);
        assert_eq!(one[0], Stage::S0);
        let two = final_state_oracle(&g, &resp, &[1, 2], &[]);
        assert_eq!(two[0], Stage::S1);
    }

    #[test]
    fn explicit_per_node_thresholds() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let resp = QuenchedResponse::from_thresholds(
            PressureScaling::Fraction,
            vec![0.9, 0.4, 0.9],
            vec![2.0, 2.0, 2.0],
            0.0,
        )
        .unwrap();
        // seed 0 pushes node 1 (P = 1/2 >= 0.4), node 1 pushes node 2
        // (P = 1 >= 0.9); no one reaches the unattainable r2 = 2
        let fixpoint = final_state_oracle(&g, &resp, &[0], &[]);
        assert_eq!(fixpoint, vec![Stage::S1, Stage::S1, Stage::S1]);
    }
}
