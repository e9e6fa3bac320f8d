//! Saddle-node continuation: trace the fold of the reduced dynamics
//! through two-parameter space with a secant predictor and Newton
//! corrector on the three-unknown system `(q1, q2, p1)`.

use super::equilibrium::{find_equilibrium, saddle_node_residual, SolveOptions};
use super::map::ReducedMap;
use super::CascadeError;
use crate::contagion::ResponseSpec;
use crate::graph::DegreeDistribution;

/// One model of the two-parameter family: everything needed to build the
/// reduced map and the closed-form condition at a parameter point.
#[derive(Debug, Clone)]
pub struct FamilyPoint {
    pub dist: DegreeDistribution,
    pub spec: ResponseSpec,
    pub phi1: f64,
    pub phi2: f64,
}

impl FamilyPoint {
    pub fn map(&self) -> Result<ReducedMap, CascadeError> {
        ReducedMap::build(&self.dist, &self.spec, self.phi1, self.phi2)
    }
}

/// A point on the traced saddle-node curve.
#[derive(Debug, Clone)]
pub struct BoundaryPoint {
    pub p1: f64,
    pub p2: f64,
    pub q: [f64; 2],
    /// Fixed-point and zero-eigenvalue residuals after the final correction.
    pub residuals: [f64; 3],
}

/// Ordered continuation output. `end_of_branch` marks termination by
/// corrector failure at the minimum step rather than by reaching the
/// parameter range boundary.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    pub points: Vec<BoundaryPoint>,
    pub end_of_branch: bool,
}

#[derive(Debug, Clone)]
pub struct ContinuationOptions {
    /// Signed initial step in p2; the sign sets the sweep direction.
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub p2_range: (f64, f64),
    pub p1_range: (f64, f64),
    pub max_points: usize,
    /// Residual gate for emitting a point.
    pub residual_tol: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            initial_step: 0.01,
            min_step: 1e-5,
            max_step: 0.05,
            p2_range: (0.0, 1.0),
            p1_range: (0.0, 100.0),
            max_points: 10_000,
            residual_tol: 1e-8,
        }
    }
}

fn residual3<F>(family: &F, x: [f64; 3], p2: f64) -> Result<[f64; 3], CascadeError>
where
    F: Fn(f64, f64) -> Result<FamilyPoint, CascadeError>,
{
    let map = family(x[2], p2)?.map()?;
    Ok(saddle_node_residual(&map, [x[0], x[1]]))
}

fn solve_3x3(mut a: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    // Gaussian elimination with partial pivoting on the augmented matrix
    for col in 0..3 {
        let pivot =
            (col..3).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = a[row][3];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Newton correction of the saddle-node system at fixed `p2`. The
/// fixed-point rows use the analytic map Jacobian; the zero-eigenvalue row
/// and the `p1` column use central differences with step 1e-6.
fn correct<F>(
    family: &F,
    x0: [f64; 3],
    p2: f64,
    p1_range: (f64, f64),
    tol: f64,
) -> Result<Option<[f64; 3]>, CascadeError>
where
    F: Fn(f64, f64) -> Result<FamilyPoint, CascadeError>,
{
    const H: f64 = 1e-6;
    let mut x = x0;
    for _ in 0..40 {
        let r = residual3(family, x, p2)?;
        let err = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if err < tol {
            return Ok(Some(x));
        }
        let map = family(x[2], p2)?.map()?;
        let q = [x[0], x[1]];
        let jac_q = map.jacobian(q);
        // d r3 / d q by central differences on the analytic partials
        let r3 = |q: [f64; 2]| -> f64 {
            let [[a, b], [c, d]] = map.jacobian(q);
            b * c - (a - 1.0) * (d - 1.0)
        };
        let dr3_dq1 = (r3([q[0] + H, q[1]]) - r3([q[0] - H, q[1]])) / (2.0 * H);
        let dr3_dq2 = (r3([q[0], q[1] + H]) - r3([q[0], q[1] - H])) / (2.0 * H);
        // p1 column by central differences on the full residual
        let rp = residual3(family, [x[0], x[1], x[2] + H], p2)?;
        let rm = residual3(family, [x[0], x[1], x[2] - H], p2)?;
        let dp = [
            (rp[0] - rm[0]) / (2.0 * H),
            (rp[1] - rm[1]) / (2.0 * H),
            (rp[2] - rm[2]) / (2.0 * H),
        ];
        let a = [
            [jac_q[0][0] - 1.0, jac_q[0][1], dp[0], -r[0]],
            [jac_q[1][0], jac_q[1][1] - 1.0, dp[1], -r[1]],
            [dr3_dq1, dr3_dq2, dp[2], -r[2]],
        ];
        let Some(delta) = solve_3x3(a) else {
            return Ok(None);
        };
        let step = delta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let damping = if step > 0.2 { 0.2 / step } else { 1.0 };
        x[0] = (x[0] + damping * delta[0]).clamp(0.0, 1.0);
        x[1] = (x[1] + damping * delta[1]).clamp(0.0, 1.0);
        x[1] = x[1].min(x[0]);
        x[2] += damping * delta[2];
        if x[2] < p1_range.0 - 1.0 || x[2] > p1_range.1 + 1.0 {
            return Ok(None);
        }
    }
    let r = residual3(family, x, p2)?;
    let err = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(if err < tol { Some(x) } else { None })
}

/// Locates a verified saddle-node point at fixed `p2` by bisecting the
/// cascade classification over a `p1` bracket and Newton-correcting from
/// the small-equilibrium side.
///
/// The bracket ends must classify differently (final density above/below
/// 0.5 from the seed start).
pub fn find_saddle_node_start<F>(
    family: &F,
    p2: f64,
    p1_bracket: (f64, f64),
    opts: &ContinuationOptions,
) -> Result<BoundaryPoint, CascadeError>
where
    F: Fn(f64, f64) -> Result<FamilyPoint, CascadeError>,
{
    let solve = SolveOptions::default();
    let classify = |p1: f64| -> Result<(bool, [f64; 2]), CascadeError> {
        let map = family(p1, p2)?.map()?;
        let eq = find_equilibrium(&map, map.seed_point(), &solve)?;
        let dens = map.densities(eq.q_star);
        Ok((dens[0] > 0.5, eq.q_star))
    };
    let (mut lo, mut hi) = p1_bracket;
    let (c_lo, q_lo) = classify(lo)?;
    let (c_hi, q_hi) = classify(hi)?;
    if c_lo == c_hi {
        return Err(CascadeError::InvalidFamily(format!(
            "bracket ({lo}, {hi}) does not straddle the cascade boundary at p2 = {p2}"
        )));
    }
    // Newton is seeded from the small-equilibrium (no-cascade) side
    let mut q_small = if c_lo { q_hi } else { q_lo };
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let (c_mid, q_mid) = classify(mid)?;
        if c_mid == c_lo {
            lo = mid;
            if !c_mid {
                q_small = q_mid;
            }
        } else {
            hi = mid;
            if !c_mid {
                q_small = q_mid;
            }
        }
        if (hi - lo) < 1e-7 * (1.0 + mid.abs()) {
            break;
        }
    }
    let p1_guess = 0.5 * (lo + hi);
    let x0 = [q_small[0], q_small[1], p1_guess];
    match correct(family, x0, p2, opts.p1_range, opts.residual_tol * 1e-2)? {
        Some(x) => {
            let residuals = residual3(family, x, p2)?;
            Ok(BoundaryPoint {
                p1: x[2],
                p2,
                q: [x[0], x[1]],
                residuals,
            })
        }
        None => Err(CascadeError::UnverifiedStart(f64::NAN)),
    }
}

/// Traces the saddle-node branch from a verified start, stepping `p2` with
/// a secant predictor and correcting in `(q1, q2, p1)`. The step halves on
/// corrector failure and the branch ends at the minimum step, the parameter
/// range boundary, or the point cap.
pub fn continue_saddle_node<F>(
    family: &F,
    start: &BoundaryPoint,
    opts: &ContinuationOptions,
) -> Result<BoundaryCurve, CascadeError>
where
    F: Fn(f64, f64) -> Result<FamilyPoint, CascadeError>,
{
    let start_res = residual3(family, [start.q[0], start.q[1], start.p1], start.p2)?;
    let start_err = start_res.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if start_err > opts.residual_tol {
        return Err(CascadeError::UnverifiedStart(start_err));
    }
    let mut points = vec![BoundaryPoint {
        p1: start.p1,
        p2: start.p2,
        q: start.q,
        residuals: start_res,
    }];
    let mut end_of_branch = false;

    let mut x = [start.q[0], start.q[1], start.p1];
    let mut p2 = start.p2;
    let mut prev: Option<([f64; 3], f64)> = None;
    let mut h = opts.initial_step;
    let dir = h.signum();

    while points.len() < opts.max_points {
        // clip the step to the range edge
        let (lo, hi) = opts.p2_range;
        let remaining = if dir > 0.0 { hi - p2 } else { p2 - lo };
        if remaining <= 0.0 {
            break;
        }
        if h.abs() > remaining {
            h = dir * remaining;
        }
        let p2_next = p2 + h;
        let x_pred = match prev {
            Some((x_prev, p2_prev)) => {
                let scale = (p2_next - p2) / (p2 - p2_prev);
                [
                    x[0] + scale * (x[0] - x_prev[0]),
                    x[1] + scale * (x[1] - x_prev[1]),
                    x[2] + scale * (x[2] - x_prev[2]),
                ]
            }
            None => x,
        };
        match correct(
            family,
            x_pred,
            p2_next,
            opts.p1_range,
            opts.residual_tol * 1e-2,
        ) {
            Ok(Some(x_new)) => {
                let residuals = residual3(family, x_new, p2_next)?;
                points.push(BoundaryPoint {
                    p1: x_new[2],
                    p2: p2_next,
                    q: [x_new[0], x_new[1]],
                    residuals,
                });
                prev = Some((x, p2));
                x = x_new;
                p2 = p2_next;
                if x[2] < opts.p1_range.0 || x[2] > opts.p1_range.1 {
                    break;
                }
                h = (h.abs() * 1.3).min(opts.max_step) * dir;
            }
            Ok(None) | Err(CascadeError::InvalidFamily(_)) => {
                h *= 0.5;
                if h.abs() < opts.min_step {
                    end_of_branch = true;
                    break;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(BoundaryCurve {
        points,
        end_of_branch,
    })
}
