//! The scalar reduced map `g~ = (g~1, g~2): [0,1]^2 -> [0,1]^2` for
//! configuration-model networks, with analytic first derivatives.
//!
//! Each `(m1, m2)` term of the double binomial sum is expanded in the
//! trinomial form `C(n,m1) C(m1,m2) q2^m2 (q1-q2)^(m1-m2) (1-q1)^(n-m1)`,
//! which is polynomial in `(q1, q2)` and differentiates cleanly, including
//! at the origin where the `q2/q1` ratio parameterization degenerates.

use super::CascadeError;
use crate::contagion::ResponseSpec;
use crate::graph::DegreeDistribution;
use crate::theory::TheoryError;

struct ClassData {
    k: usize,
    /// node weight P_k
    p_k: f64,
    /// edge weight k P_k / z
    edge_weight: f64,
    /// trinomial coefficients C(k-1, m1) C(m1, m2), triangular over m1 <= k-1
    coeff_q: Vec<f64>,
    /// trinomial coefficients C(k, m1) C(m1, m2), triangular over m1 <= k
    coeff_rho: Vec<f64>,
    /// response tables over m1 <= k+1 (for the parent-corrected F2 term)
    f1: Vec<f64>,
    f2: Vec<f64>,
}

#[inline]
fn tri(m1: usize, m2: usize) -> usize {
    m1 * (m1 + 1) / 2 + m2
}

fn trinomial_coeffs(n: usize) -> Vec<f64> {
    // C(n, m1) * C(m1, m2)
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    let mut c_n = 1.0; // C(n, m1)
    for m1 in 0..=n {
        let mut c_m = 1.0; // C(m1, m2)
        for m2 in 0..=m1 {
            out.push(c_n * c_m);
            c_m *= (m1 - m2) as f64 / (m2 + 1) as f64;
        }
        c_n *= (n - m1) as f64 / (m1 + 1) as f64;
    }
    out
}

/// The reduced two-dimensional dynamics for a degree distribution, response
/// specification, and seed fractions.
pub struct ReducedMap {
    classes: Vec<ClassData>,
    kmax: usize,
    phi1: f64,
    phi2: f64,
}

impl ReducedMap {
    pub fn build(
        dist: &DegreeDistribution,
        spec: &ResponseSpec,
        phi1: f64,
        phi2: f64,
    ) -> Result<Self, CascadeError> {
        if !(0.0..=1.0).contains(&phi1) || !(0.0..=1.0).contains(&phi2) || phi2 > phi1 {
            return Err(CascadeError::Theory(TheoryError::InvalidInputs(format!(
                "seed fractions ({phi1}, {phi2}) invalid"
            ))));
        }
        let mut classes = Vec::new();
        let mut kmax = 0;
        for (k, p_k) in dist.iter() {
            if k == 0 {
                // degree-0 nodes never sit at an edge endpoint; they only
                // contribute their seed fraction to the densities
                classes.push(ClassData {
                    k,
                    p_k,
                    edge_weight: 0.0,
                    coeff_q: Vec::new(),
                    coeff_rho: trinomial_coeffs(0),
                    f1: vec![0.0; 3],
                    f2: vec![0.0; 3],
                });
                continue;
            }
            kmax = kmax.max(k);
            let rows = k + 2;
            let mut f1 = Vec::with_capacity(rows * (rows + 1) / 2);
            let mut f2 = Vec::with_capacity(rows * (rows + 1) / 2);
            for m1 in 0..rows {
                for m2 in 0..=m1 {
                    f1.push(spec.response(1, m1 as u32, m2 as u32, k)?);
                    f2.push(spec.response(2, m1 as u32, m2 as u32, k)?);
                }
            }
            classes.push(ClassData {
                k,
                p_k,
                edge_weight: k as f64 * p_k / dist.mean_degree(),
                coeff_q: trinomial_coeffs(k - 1),
                coeff_rho: trinomial_coeffs(k),
                f1,
                f2,
            });
        }
        Ok(ReducedMap {
            classes,
            kmax,
            phi1,
            phi2,
        })
    }

    pub fn seed_point(&self) -> [f64; 2] {
        [self.phi1, self.phi2]
    }

    fn powers(&self, x: f64) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.kmax + 2);
        let mut v = 1.0;
        for _ in 0..self.kmax + 2 {
            p.push(v);
            v *= x;
        }
        p
    }

    /// Evaluates `g~(q)`. Inputs are clamped to the nesting domain
    /// `0 <= q2 <= q1 <= 1`.
    pub fn eval(&self, q: [f64; 2]) -> [f64; 2] {
        let q1 = q[0].clamp(0.0, 1.0);
        let q2 = q[1].clamp(0.0, q1);
        let d = q1 - q2;
        let u = 1.0 - q1;
        let pow_q2 = self.powers(q2);
        let pow_d = self.powers(d);
        let pow_u = self.powers(u);
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for class in &self.classes {
            if class.k == 0 {
                continue;
            }
            let n = class.k - 1;
            let mut c1 = 0.0;
            let mut c2 = 0.0;
            for m1 in 0..=n {
                for m2 in 0..=m1 {
                    let t =
                        class.coeff_q[tri(m1, m2)] * pow_q2[m2] * pow_d[m1 - m2] * pow_u[n - m1];
                    if t == 0.0 {
                        continue;
                    }
                    c1 += t * class.f1[tri(m1, m2)];
                    let w2 = u * class.f2[tri(m1, m2)] + q1 * class.f2[tri(m1 + 1, m2)];
                    c2 += t * w2;
                }
            }
            s1 += class.edge_weight * c1;
            s2 += class.edge_weight * c2;
        }
        let g1 = (self.phi1 + (1.0 - self.phi1) * s1).clamp(0.0, 1.0);
        let g2 = (self.phi2 + (1.0 - self.phi2) * s2).clamp(0.0, 1.0).min(g1);
        [g1, g2]
    }

    /// Analytic Jacobian `[[D1 g~1, D2 g~1], [D1 g~2, D2 g~2]]` of the
    /// unclamped sums at `q`.
    pub fn jacobian(&self, q: [f64; 2]) -> [[f64; 2]; 2] {
        let q1 = q[0].clamp(0.0, 1.0);
        let q2 = q[1].clamp(0.0, q1);
        let d = q1 - q2;
        let u = 1.0 - q1;
        let pow_q2 = self.powers(q2);
        let pow_d = self.powers(d);
        let pow_u = self.powers(u);
        let mut d1s1 = 0.0;
        let mut d2s1 = 0.0;
        let mut d1s2 = 0.0;
        let mut d2s2 = 0.0;
        for class in &self.classes {
            if class.k == 0 {
                continue;
            }
            let n = class.k - 1;
            let (mut a1, mut a2, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0);
            for m1 in 0..=n {
                for m2 in 0..=m1 {
                    let coeff = class.coeff_q[tri(m1, m2)];
                    let a = m1 - m2;
                    let b = n - m1;
                    let t = coeff * pow_q2[m2] * pow_d[a] * pow_u[b];
                    // dT/dq1 = coeff q2^m2 (a d^(a-1) u^b - b d^a u^(b-1))
                    let mut dt_dq1 = 0.0;
                    if a > 0 {
                        dt_dq1 += a as f64 * pow_d[a - 1] * pow_u[b];
                    }
                    if b > 0 {
                        dt_dq1 -= b as f64 * pow_d[a] * pow_u[b - 1];
                    }
                    dt_dq1 *= coeff * pow_q2[m2];
                    // dT/dq2 = coeff (m2 q2^(m2-1) d^a - a q2^m2 d^(a-1)) u^b
                    let mut dt_dq2 = 0.0;
                    if m2 > 0 {
                        dt_dq2 += m2 as f64 * pow_q2[m2 - 1] * pow_d[a];
                    }
                    if a > 0 {
                        dt_dq2 -= a as f64 * pow_q2[m2] * pow_d[a - 1];
                    }
                    dt_dq2 *= coeff * pow_u[b];

                    let f1v = class.f1[tri(m1, m2)];
                    let f2_lo = class.f2[tri(m1, m2)];
                    let f2_hi = class.f2[tri(m1 + 1, m2)];
                    let w2 = u * f2_lo + q1 * f2_hi;
                    a1 += dt_dq1 * f1v;
                    a2 += dt_dq2 * f1v;
                    b1 += dt_dq1 * w2 + t * (f2_hi - f2_lo);
                    b2 += dt_dq2 * w2;
                }
            }
            d1s1 += class.edge_weight * a1;
            d2s1 += class.edge_weight * a2;
            d1s2 += class.edge_weight * b1;
            d2s2 += class.edge_weight * b2;
        }
        [
            [(1.0 - self.phi1) * d1s1, (1.0 - self.phi1) * d2s1],
            [(1.0 - self.phi2) * d1s2, (1.0 - self.phi2) * d2s2],
        ]
    }

    /// Aggregate densities `(rho1, rho2)` evaluated at the neighbor
    /// probabilities `q`: the node-weighted double sum over all classes
    /// with `m1 <= k`.
    pub fn densities(&self, q: [f64; 2]) -> [f64; 2] {
        let q1 = q[0].clamp(0.0, 1.0);
        let q2 = q[1].clamp(0.0, q1);
        let d = q1 - q2;
        let u = 1.0 - q1;
        let pow_q2 = self.powers(q2);
        let pow_d = self.powers(d);
        let pow_u = self.powers(u);
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for class in &self.classes {
            let n = class.k;
            let mut c1 = 0.0;
            let mut c2 = 0.0;
            for m1 in 0..=n {
                for m2 in 0..=m1 {
                    let t =
                        class.coeff_rho[tri(m1, m2)] * pow_q2[m2] * pow_d[m1 - m2] * pow_u[n - m1];
                    if t == 0.0 {
                        continue;
                    }
                    c1 += t * class.f1[tri(m1, m2)];
                    c2 += t * class.f2[tri(m1, m2)];
                }
            }
            s1 += class.p_k * c1;
            s2 += class.p_k * c2;
        }
        let rho1 = (self.phi1 + (1.0 - self.phi1) * s1).clamp(0.0, 1.0);
        let rho2 = (self.phi2 + (1.0 - self.phi2) * s2)
            .clamp(0.0, 1.0)
            .min(rho1);
        [rho1, rho2]
    }
}
