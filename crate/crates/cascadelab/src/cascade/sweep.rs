//! Two-parameter diagrams of final activation densities with the cascade
//! condition overlaid.

use rayon::prelude::*;

use super::condition::cascade_condition;
use super::continuation::FamilyPoint;
use super::equilibrium::{find_equilibrium, SolveOptions};
use super::CascadeError;

/// Uniform grid over one parameter.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.min];
        }
        (0..self.steps)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// One evaluated grid point. Missing values (invalid parameter regions or
/// non-converged fixpoints) are carried as NaN.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub p1: f64,
    pub p2: f64,
    pub rho1_inf: f64,
    pub rho2_inf: f64,
    pub condition_value: f64,
    pub valid: bool,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub p1_grid: Vec<f64>,
    pub p2_grid: Vec<f64>,
    /// Row-major over p2 (outer) then p1 (inner).
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn at(&self, i1: usize, i2: usize) -> &SweepPoint {
        &self.points[i2 * self.p1_grid.len() + i1]
    }
}

/// Computes theory fixpoints and the cascade-condition value over a
/// two-parameter grid. Points where the family is undefined are marked
/// invalid; per-point non-convergence is recorded as NaN densities rather
/// than an error.
pub fn sweep_diagram<F>(
    family: &F,
    p1_grid: &GridSpec,
    p2_grid: &GridSpec,
) -> Result<SweepResult, CascadeError>
where
    F: Fn(f64, f64) -> Result<FamilyPoint, CascadeError> + Sync,
{
    let p1_values = p1_grid.values();
    let p2_values = p2_grid.values();
    let solve = SolveOptions::default();
    let coords: Vec<(f64, f64)> = p2_values
        .iter()
        .flat_map(|&p2| p1_values.iter().map(move |&p1| (p1, p2)))
        .collect();
    let points: Vec<SweepPoint> = coords
        .par_iter()
        .map(|&(p1, p2)| {
            let fam = match family(p1, p2) {
                Ok(f) => f,
                Err(_) => {
                    return SweepPoint {
                        p1,
                        p2,
                        rho1_inf: f64::NAN,
                        rho2_inf: f64::NAN,
                        condition_value: f64::NAN,
                        valid: false,
                        converged: false,
                    }
                }
            };
            let condition_value = cascade_condition(&fam.dist, &fam.spec, fam.phi1, fam.phi2)
                .map(|c| c.value)
                .unwrap_or(f64::NAN);
            let (rho1_inf, rho2_inf, converged) = match fam.map() {
                Ok(map) => match find_equilibrium(&map, map.seed_point(), &solve) {
                    Ok(eq) => {
                        let d = map.densities(eq.q_star);
                        (d[0], d[1], true)
                    }
                    Err(_) => (f64::NAN, f64::NAN, false),
                },
                Err(_) => (f64::NAN, f64::NAN, false),
            };
            SweepPoint {
                p1,
                p2,
                rho1_inf,
                rho2_inf,
                condition_value,
                valid: true,
                converged,
            }
        })
        .collect();
    Ok(SweepResult {
        p1_grid: p1_values,
        p2_grid: p2_values,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::poisson_kmax;
    use crate::contagion::ResponseSpec;
    use crate::graph::DegreeDistribution;

    /// The (R1, R2) family of the threshold diagram: ER z = 4, beta = 2.
    fn fig7_family(r1: f64, r2: f64) -> Result<FamilyPoint, CascadeError> {
        if r1 > r2 {
            return Err(CascadeError::InvalidFamily(format!(
                "R1 = {r1} exceeds R2 = {r2}"
            )));
        }
        let dist = DegreeDistribution::poisson(4.0, poisson_kmax(4.0))?;
        let spec = ResponseSpec::fraction_uniform(r1, r2, 2.0)?;
        Ok(FamilyPoint {
            dist,
            spec,
            phi1: 1e-4,
            phi2: 0.0,
        })
    }

    #[test]
    fn forbidden_region_is_masked() {
        let g = GridSpec {
            min: 0.1,
            max: 0.9,
            steps: 5,
        };
        let result = sweep_diagram(&fig7_family, &g, &g).unwrap();
        for p in &result.points {
            if p.p1 > p.p2 {
                assert!(!p.valid);
                assert!(p.rho1_inf.is_nan());
            } else {
                assert!(p.valid);
            }
        }
    }

    #[test]
    fn no_s2_cascades_above_r2_one_with_zero_phi2() {
        let g1 = GridSpec {
            min: 0.05,
            max: 0.3,
            steps: 4,
        };
        let g2 = GridSpec {
            min: 1.05,
            max: 1.5,
            steps: 4,
        };
        let result = sweep_diagram(&fig7_family, &g1, &g2).unwrap();
        for p in &result.points {
            assert!(p.valid);
            assert!(
                p.rho2_inf.abs() < 1e-9,
                "S2 cascade at ({}, {}): {}",
                p.p1,
                p.p2,
                p.rho2_inf
            );
        }
    }

    #[test]
    fn degenerate_two_by_two_grid_works() {
        let g = GridSpec {
            min: 0.2,
            max: 0.4,
            steps: 2,
        };
        let result = sweep_diagram(&fig7_family, &g, &g).unwrap();
        assert_eq!(result.points.len(), 4);
        assert_eq!(result.at(1, 0).p1, 0.4);
        assert_eq!(result.at(1, 0).p2, 0.2);
    }
}
