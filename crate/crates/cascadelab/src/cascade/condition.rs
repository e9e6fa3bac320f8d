//! The closed-form cascade condition from the Jacobian of the reduced map
//! at the all-inactive state.

use super::CascadeError;
use crate::contagion::ResponseSpec;
use crate::graph::DegreeDistribution;

/// The four partial derivatives of the reduced map at `q = 0`, as the
/// closed-form degree sums:
///
/// ```text
/// D1 g~1_0 = (1 - phi1) sum_k k(k-1) P_k / z [F1(1,0,k) - F1(0,0,k)]
/// D2 g~1_0 = (1 - phi1) sum_k k(k-1) P_k / z [F1(1,1,k) - F1(1,0,k)]
/// D1 g~2_0 = (1 - phi2) sum_k k^2    P_k / z [F2(1,0,k) - F2(0,0,k)]
/// D2 g~2_0 = (1 - phi2) sum_k k(k-1) P_k / z [F2(1,1,k) - F2(1,0,k)]
/// ```
///
/// Note the `k^2` weight on `D1 g~2_0`: the parent of a node can itself be
/// active and contribute to hyper-activation pressure.
pub fn partials_at_zero(
    dist: &DegreeDistribution,
    spec: &ResponseSpec,
    phi1: f64,
    phi2: f64,
) -> Result<[f64; 4], CascadeError> {
    let z = dist.mean_degree();
    let mut d1g1 = 0.0;
    let mut d2g1 = 0.0;
    let mut d1g2 = 0.0;
    let mut d2g2 = 0.0;
    for (k, p_k) in dist.iter() {
        if k == 0 {
            continue;
        }
        let kk1 = (k * (k - 1)) as f64 * p_k / z;
        let kk = (k * k) as f64 * p_k / z;
        let f1_10 = spec.response(1, 1, 0, k)?;
        let f1_00 = spec.response(1, 0, 0, k)?;
        let f1_11 = spec.response(1, 1, 1, k)?;
        let f2_10 = spec.response(2, 1, 0, k)?;
        let f2_00 = spec.response(2, 0, 0, k)?;
        let f2_11 = spec.response(2, 1, 1, k)?;
        d1g1 += kk1 * (f1_10 - f1_00);
        d2g1 += kk1 * (f1_11 - f1_10);
        d1g2 += kk * (f2_10 - f2_00);
        d2g2 += kk1 * (f2_11 - f2_10);
    }
    Ok([
        (1.0 - phi1) * d1g1,
        (1.0 - phi1) * d2g1,
        (1.0 - phi2) * d1g2,
        (1.0 - phi2) * d2g2,
    ])
}

/// Result of the cascade condition test.
#[derive(Debug, Clone, Copy)]
pub struct CascadeCondition {
    /// `D2 g~1_0 D1 g~2_0 - (D1 g~1_0 - 1)(D2 g~2_0 - 1)`; cascades are
    /// predicted when this is positive.
    pub value: f64,
    pub cascades: bool,
    pub partials: [f64; 4],
}

/// Evaluates the global-cascade condition: an infinitesimal seed grows when
/// the determinant test on the Jacobian at the origin is positive.
pub fn cascade_condition(
    dist: &DegreeDistribution,
    spec: &ResponseSpec,
    phi1: f64,
    phi2: f64,
) -> Result<CascadeCondition, CascadeError> {
    let p = partials_at_zero(dist, spec, phi1, phi2)?;
    let [d1g1, d2g1, d1g2, d2g2] = p;
    let value = d2g1 * d1g2 - (d1g1 - 1.0) * (d2g2 - 1.0);
    Ok(CascadeCondition {
        value,
        cascades: value > 0.0,
        partials: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::poisson_kmax;

    fn er_dist(z: f64) -> DegreeDistribution {
        DegreeDistribution::poisson(z, poisson_kmax(z)).unwrap()
    }

    #[test]
    fn beta_zero_kills_d2_terms() {
        let spec = ResponseSpec::fraction_uniform(0.2, 0.7, 0.0).unwrap();
        let p = partials_at_zero(&er_dist(4.0), &spec, 1e-3, 0.0).unwrap();
        assert_eq!(p[1], 0.0);
        assert_eq!(p[3], 0.0);
    }

    #[test]
    fn dead_response_gives_no_cascade() {
        // thresholds no single neighbor can reach
        let spec = ResponseSpec::fraction_uniform(10.0, 20.0, 0.5).unwrap();
        let c = cascade_condition(&er_dist(4.0), &spec, 0.0, 0.0).unwrap();
        assert_eq!(c.partials, [0.0; 4]);
        assert!((c.value + 1.0).abs() < 1e-15);
        assert!(!c.cascades);
    }

    #[test]
    fn truncated_poisson_sum_matches_independent_oracle() {
        // ER z = 4 truncated at kmax = 30, FractionUniform R1 = 0.2,
        // phi -> 0: F1(1,0,k) = 1 iff 1/k >= 0.2, i.e. k <= 5
        let dist = DegreeDistribution::poisson(4.0, 30).unwrap();
        let spec = ResponseSpec::fraction_uniform(0.2, f64::INFINITY, 0.0).unwrap();
        let p = partials_at_zero(&dist, &spec, 0.0, 0.0).unwrap();
        // independent evaluation of the truncated Poisson sum
        let z: f64 = dist.mean_degree();
        let expected: f64 = (2..=5)
            .map(|k| (k * (k - 1)) as f64 * dist.probability(k) / z)
            .sum();
        assert!((p[0] - expected).abs() < 1e-13, "{} vs {expected}", p[0]);
    }

    #[test]
    fn beta_zero_reduces_to_single_stage_condition() {
        // with beta = 0 the condition is D1 g~1_0 > 1
        for &(r1, z) in &[(0.18, 4.0), (0.2, 4.0), (0.25, 4.0), (0.3, 6.0)] {
            let spec = ResponseSpec::fraction_uniform(r1, f64::INFINITY, 0.0).unwrap();
            let dist = er_dist(z);
            let c = cascade_condition(&dist, &spec, 0.0, 0.0).unwrap();
            let single_stage = c.partials[0] > 1.0;
            assert_eq!(c.cascades, single_stage, "r1={r1} z={z}");
        }
    }

    #[test]
    fn single_stage_boundary_near_r1_point_two_for_er_z4() {
        // bisection on the step locations of the condition in R1
        let dist = er_dist(4.0);
        let cond = |r1: f64| -> f64 {
            let spec = ResponseSpec::fraction_uniform(r1, f64::INFINITY, 0.0).unwrap();
            cascade_condition(&dist, &spec, 1e-4, 0.0).unwrap().value
        };
        assert!(cond(0.19) > 0.0);
        assert!(cond(0.2) > 0.0, "boundary inclusive at 1/5");
        assert!(cond(0.21) < 0.0);
        let mut lo = 0.1;
        let mut hi = 0.5;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if cond(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 0.2).abs() < 0.02, "crossing at {lo}");
    }
}
