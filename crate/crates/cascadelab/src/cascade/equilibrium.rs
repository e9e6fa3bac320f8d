//! Equilibria of the reduced dynamics and the saddle-node residual system.

use super::map::ReducedMap;
use super::CascadeError;

/// A located fixed point of the reduced map with its Jacobian and the
/// stability of the corresponding ODE equilibrium.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub q_star: [f64; 2],
    pub jacobian: [[f64; 2]; 2],
    /// Sign of the leading eigenvalue of `Dg~ - I`: negative means stable.
    pub stability: i8,
    pub residual: f64,
    pub iterations: usize,
}

impl Equilibrium {
    /// Eigenvalues of the 2x2 map Jacobian, always real for monotone maps
    /// (the off-diagonal product is nonnegative).
    pub fn eigenvalues(&self) -> [f64; 2] {
        let [[a, b], [c, d]] = self.jacobian;
        let half_tr = 0.5 * (a + d);
        let disc = (0.5 * (a - d)).powi(2) + b * c;
        let root = disc.max(0.0).sqrt();
        [half_tr - root, half_tr + root]
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub residual_tol: f64,
    pub max_iterations: usize,
    /// How often a Newton polish is attempted during fixed-point iteration.
    pub newton_every: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            residual_tol: 1e-11,
            max_iterations: 100_000,
            newton_every: 64,
        }
    }
}

fn solve_2x2(m: [[f64; 2]; 2], rhs: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-300 {
        return None;
    }
    Some([
        (rhs[0] * m[1][1] - rhs[1] * m[0][1]) / det,
        (rhs[1] * m[0][0] - rhs[0] * m[1][0]) / det,
    ])
}

fn residual_norm(map: &ReducedMap, q: [f64; 2]) -> f64 {
    let g = map.eval(q);
    (g[0] - q[0]).abs().max((g[1] - q[1]).abs())
}

fn newton_polish(map: &ReducedMap, start: [f64; 2], tol: f64) -> Option<[f64; 2]> {
    let mut q = start;
    for _ in 0..50 {
        let g = map.eval(q);
        let r = [g[0] - q[0], g[1] - q[1]];
        if r[0].abs().max(r[1].abs()) < tol {
            return Some(q);
        }
        let jac = map.jacobian(q);
        let m = [[jac[0][0] - 1.0, jac[0][1]], [jac[1][0], jac[1][1] - 1.0]];
        let delta = solve_2x2(m, [-r[0], -r[1]])?;
        let step = delta[0].abs().max(delta[1].abs());
        if step > 0.5 {
            return None;
        }
        q = [
            (q[0] + delta[0]).clamp(0.0, 1.0),
            (q[1] + delta[1]).clamp(0.0, 1.0),
        ];
        q[1] = q[1].min(q[0]);
        if step < 1e-15 {
            break;
        }
    }
    if residual_norm(map, q) < tol {
        Some(q)
    } else {
        None
    }
}

fn finish(map: &ReducedMap, q: [f64; 2], iterations: usize) -> Equilibrium {
    let jacobian = map.jacobian(q);
    let [[a, b], [c, d]] = jacobian;
    let half_tr = 0.5 * (a + d);
    let disc = (0.5 * (a - d)).powi(2) + b * c;
    let leading = half_tr + disc.max(0.0).sqrt();
    let flow_eig = leading - 1.0;
    let stability = if flow_eig > 1e-9 {
        1
    } else if flow_eig < -1e-9 {
        -1
    } else {
        0
    };
    Equilibrium {
        q_star: q,
        jacobian,
        stability,
        residual: residual_norm(map, q),
        iterations,
    }
}

/// Finds the fixed point reached from `q0`: monotone fixed-point iteration
/// polished by Newton steps on `g~(q) - q`.
///
/// Newton candidates are accepted only inside a trust radius derived from
/// the current contraction estimate, so the polish cannot jump across to a
/// distant branch; on Newton failure the plain iteration continues. Reports
/// non-convergence after the iteration cap.
pub fn find_equilibrium(
    map: &ReducedMap,
    q0: [f64; 2],
    opts: &SolveOptions,
) -> Result<Equilibrium, CascadeError> {
    let mut q = [q0[0].clamp(0.0, 1.0), q0[1].clamp(0.0, 1.0)];
    q[1] = q[1].min(q[0]);
    let mut prev_delta = f64::INFINITY;
    for n in 1..=opts.max_iterations {
        let g = map.eval(q);
        let delta = (g[0] - q[0]).abs().max((g[1] - q[1]).abs());
        if delta < opts.residual_tol {
            return Ok(finish(map, g, n));
        }
        if n % opts.newton_every == 0 {
            let lambda = (delta / prev_delta).min(0.999_999);
            let radius = if lambda < 1.0 {
                (delta * lambda / (1.0 - lambda)).clamp(1e-6, 0.1)
            } else {
                1e-6
            };
            if let Some(polished) = newton_polish(map, g, opts.residual_tol * 0.1) {
                let dist = (polished[0] - g[0]).abs().max((polished[1] - g[1]).abs());
                if dist <= 3.0 * radius {
                    return Ok(finish(map, polished, n));
                }
            }
        }
        prev_delta = delta;
        q = g;
    }
    Err(CascadeError::NonConvergence {
        steps: opts.max_iterations,
        residual: residual_norm(map, q),
    })
}

/// The three saddle-node residuals at `q`: the two fixed-point components
/// `g~(q) - q` and the zero-eigenvalue condition
/// `D2 g~1 D1 g~2 - (D1 g~1 - 1)(D2 g~2 - 1)` with the partials evaluated
/// at `q` rather than the origin.
pub fn saddle_node_residual(map: &ReducedMap, q: [f64; 2]) -> [f64; 3] {
    let g = map.eval(q);
    let jac = map.jacobian(q);
    let [[a, b], [c, d]] = jac;
    let r3 = b * c - (a - 1.0) * (d - 1.0);
    [g[0] - q[0], g[1] - q[1], r3]
}
