//! The asynchronous-updating ODE limit `dQ/dt = g(Q) - Q`,
//! `drho_k/dt = h_k(Q) - rho_k`, integrated with the classical fourth-order
//! fixed-step scheme.

use super::recurrence::{neighbor_averages, update_q_tables, update_rho_tables};
use super::{build_tables, ModelInputs, ResponseTable, TheoryError, TheoryState};
use crate::contagion::{output_grid, TimeSeries};

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub t_max: f64,
    pub dt: f64,
    /// Stop early once `max(|g(Q) - Q|, |h(Q) - rho|)` drops below this.
    pub settle_tol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            t_max: 50.0,
            dt: 0.01,
            settle_tol: 1e-12,
        }
    }
}

struct Rhs<'a> {
    inputs: &'a ModelInputs,
    tables: &'a [ResponseTable],
}

impl Rhs<'_> {
    /// dy/dt at state y = (q1, q2, rho1, rho2), flattened.
    fn eval(&self, y: &[f64], out: &mut [f64]) -> Result<f64, TheoryError> {
        let c = self.tables.len();
        let (q1, rest) = y.split_at(c);
        let (q2, rest) = rest.split_at(c);
        let (rho1, rho2) = rest.split_at(c);
        let q1bar = neighbor_averages(&self.inputs.network, q1)?;
        let q2bar = neighbor_averages(&self.inputs.network, q2)?;
        let (g1, g2) = update_q_tables(
            self.tables,
            self.inputs.phi1,
            self.inputs.phi2,
            &q1bar,
            &q2bar,
        );
        let (h1, h2) = update_rho_tables(
            self.tables,
            self.inputs.phi1,
            self.inputs.phi2,
            &q1bar,
            &q2bar,
        );
        let mut residual: f64 = 0.0;
        for i in 0..c {
            out[i] = g1[i] - q1[i];
            out[c + i] = g2[i] - q2[i];
            out[2 * c + i] = h1[i] - rho1[i];
            out[3 * c + i] = h2[i] - rho2[i];
            residual = residual
                .max(out[i].abs())
                .max(out[c + i].abs())
                .max(out[2 * c + i].abs())
                .max(out[3 * c + i].abs());
        }
        Ok(residual)
    }
}

/// Integrates the ODE limit and samples the densities on the shared output
/// grid, in the same series shape the simulator produces. The final row
/// carries the settled state when the dynamics fix before `t_max`.
pub fn integrate_ode(inputs: &ModelInputs, opts: &OdeOptions) -> Result<TimeSeries, TheoryError> {
    if opts.dt > 0.05 {
        return Err(TheoryError::StepTooLarge(opts.dt));
    }
    let classes = inputs.network.classes();
    let tables = build_tables(&inputs.response, &classes)?;
    let rhs = Rhs {
        inputs,
        tables: &tables,
    };
    let c = classes.len();
    let weights = inputs.network.class_weights()?;

    let mut y = vec![0.0; 4 * c];
    for i in 0..c {
        y[i] = inputs.phi1;
        y[c + i] = inputs.phi2;
        y[2 * c + i] = inputs.phi1;
        y[3 * c + i] = inputs.phi2;
    }

    let grid = output_grid(opts.t_max);
    let mut rho1 = Vec::with_capacity(grid.len());
    let mut rho2 = Vec::with_capacity(grid.len());
    let mut rho1_k = vec![Vec::with_capacity(grid.len()); c];
    let mut rho2_k = vec![Vec::with_capacity(grid.len()); c];
    let mut next_sample = 0usize;

    let record = |y: &[f64],
                  t: f64,
                  next_sample: &mut usize,
                  rho1: &mut Vec<f64>,
                  rho2: &mut Vec<f64>,
                  rho1_k: &mut Vec<Vec<f64>>,
                  rho2_k: &mut Vec<Vec<f64>>| {
        while *next_sample < grid.len() && grid[*next_sample] <= t + 1e-9 {
            let r1 = &y[2 * c..3 * c];
            let r2 = &y[3 * c..4 * c];
            rho1.push(super::recurrence::aggregate(r1, &weights));
            rho2.push(super::recurrence::aggregate(r2, &weights));
            for i in 0..c {
                rho1_k[i].push(r1[i]);
                rho2_k[i].push(r2[i]);
            }
            *next_sample += 1;
        }
    };

    record(
        &y,
        0.0,
        &mut next_sample,
        &mut rho1,
        &mut rho2,
        &mut rho1_k,
        &mut rho2_k,
    );

    let steps = (opts.t_max / opts.dt).ceil() as usize;
    let mut k1 = vec![0.0; 4 * c];
    let mut k2 = vec![0.0; 4 * c];
    let mut k3 = vec![0.0; 4 * c];
    let mut k4 = vec![0.0; 4 * c];
    let mut tmp = vec![0.0; 4 * c];

    for step in 1..=steps {
        let h = opts.dt;
        let residual = rhs.eval(&y, &mut k1)?;
        if residual < opts.settle_tol {
            break;
        }
        for i in 0..4 * c {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs.eval(&tmp, &mut k2)?;
        for i in 0..4 * c {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs.eval(&tmp, &mut k3)?;
        for i in 0..4 * c {
            tmp[i] = y[i] + h * k3[i];
        }
        rhs.eval(&tmp, &mut k4)?;
        for i in 0..4 * c {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = step as f64 * opts.dt;
        for &v in y.iter() {
            if !(-1e-9..=1.0 + 1e-9).contains(&v) {
                return Err(TheoryError::LeftDomain { t, value: v });
            }
        }
        record(
            &y,
            t,
            &mut next_sample,
            &mut rho1,
            &mut rho2,
            &mut rho1_k,
            &mut rho2_k,
        );
    }
    // settled early (or finished): fill the remaining grid with the final
    // state
    record(
        &y,
        f64::INFINITY,
        &mut next_sample,
        &mut rho1,
        &mut rho2,
        &mut rho1_k,
        &mut rho2_k,
    );

    Ok(TimeSeries {
        times: grid,
        rho1,
        rho2,
        classes,
        rho1_k,
        rho2_k,
    })
}

/// Final per-class state reached by the ODE flow, for fixpoint comparisons.
pub fn ode_fixpoint(inputs: &ModelInputs, opts: &OdeOptions) -> Result<TheoryState, TheoryError> {
    let classes = inputs.network.classes();
    let tables = build_tables(&inputs.response, &classes)?;
    let rhs = Rhs {
        inputs,
        tables: &tables,
    };
    let c = classes.len();
    let mut y = vec![0.0; 4 * c];
    for i in 0..c {
        y[i] = inputs.phi1;
        y[c + i] = inputs.phi2;
        y[2 * c + i] = inputs.phi1;
        y[3 * c + i] = inputs.phi2;
    }
    let steps = (opts.t_max / opts.dt).ceil() as usize;
    let mut k1 = vec![0.0; 4 * c];
    let mut k2 = vec![0.0; 4 * c];
    let mut k3 = vec![0.0; 4 * c];
    let mut k4 = vec![0.0; 4 * c];
    let mut tmp = vec![0.0; 4 * c];
    let mut t = 0.0;
    for step in 1..=steps {
        let h = opts.dt;
        let residual = rhs.eval(&y, &mut k1)?;
        if residual < opts.settle_tol {
            break;
        }
        for i in 0..4 * c {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs.eval(&tmp, &mut k2)?;
        for i in 0..4 * c {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs.eval(&tmp, &mut k3)?;
        for i in 0..4 * c {
            tmp[i] = y[i] + h * k3[i];
        }
        rhs.eval(&tmp, &mut k4)?;
        for i in 0..4 * c {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = step as f64 * opts.dt;
        for &v in y.iter() {
            if !(-1e-9..=1.0 + 1e-9).contains(&v) {
                return Err(TheoryError::LeftDomain { t, value: v });
            }
        }
    }
    Ok(TheoryState {
        classes,
        q1: y[0..c].to_vec(),
        q2: y[c..2 * c].to_vec(),
        rho1: y[2 * c..3 * c].to_vec(),
        rho2: y[3 * c..4 * c].to_vec(),
        t,
    })
}
