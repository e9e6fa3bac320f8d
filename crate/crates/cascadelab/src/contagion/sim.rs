//! Monte Carlo cascade simulation with incremental neighbor caches and
//! fixpoint-based early termination.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    output_grid, round_count, ContagionError, QuenchedResponse, ResponseSpec, SeedMode, SimConfig,
    Stage, TimeSeries, UpdateMode,
};
use crate::graph::Graph;

/// Mutable per-run state: node stages, cached active-neighbor counts, and
/// the clock.
#[derive(Debug, Clone)]
pub struct SimState {
    stages: Vec<Stage>,
    m1: Vec<u32>,
    m2: Vec<u32>,
    t: f64,
    /// Nodes that would change stage if selected for an update right now.
    eligible: Vec<bool>,
    eligible_count: usize,
}

/// Record of one node update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageChange {
    pub node: u32,
    pub from: Stage,
    pub to: Stage,
}

impl SimState {
    pub fn stage(&self, v: u32) -> Stage {
        self.stages[v as usize]
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn active_counts(&self, v: u32) -> (u32, u32) {
        (self.m1[v as usize], self.m2[v as usize])
    }

    /// Recomputes the neighbor caches from scratch and compares against the
    /// incremental ones.
    pub fn caches_consistent(&self, g: &Graph) -> bool {
        for v in 0..g.node_count() as u32 {
            let mut m1 = 0;
            let mut m2 = 0;
            for &u in g.neighbors(v) {
                if self.stages[u as usize].is_active() {
                    m1 += 1;
                }
                if self.stages[u as usize].is_hyper() {
                    m2 += 1;
                }
            }
            if self.m1[v as usize] != m1 || self.m2[v as usize] != m2 {
                return false;
            }
        }
        true
    }

    fn refresh_eligibility(&mut self, g: &Graph, resp: &QuenchedResponse) {
        self.eligible_count = 0;
        for v in 0..g.node_count() as u32 {
            let e = self.would_change(g, resp, v);
            self.eligible[v as usize] = e;
            if e {
                self.eligible_count += 1;
            }
        }
    }

    fn would_change(&self, g: &Graph, resp: &QuenchedResponse, v: u32) -> bool {
        let k = g.degree(v);
        let (m1, m2) = (self.m1[v as usize], self.m2[v as usize]);
        match self.stages[v as usize] {
            Stage::S2 => false,
            Stage::S1 => resp.fires(2, v, m1, m2, k),
            Stage::S0 => resp.fires(1, v, m1, m2, k),
        }
    }

    fn set_eligible(&mut self, v: u32, value: bool) {
        let slot = &mut self.eligible[v as usize];
        if *slot != value {
            *slot = value;
            if value {
                self.eligible_count += 1;
            } else {
                self.eligible_count -= 1;
            }
        }
    }

    fn apply_change(&mut self, g: &Graph, resp: &QuenchedResponse, v: u32, to: Stage) {
        let from = self.stages[v as usize];
        debug_assert!(to > from);
        self.stages[v as usize] = to;
        let gained_active = from == Stage::S0;
        let gained_hyper = to == Stage::S2;
        for &u in g.neighbors(v) {
            if gained_active {
                self.m1[u as usize] += 1;
            }
            if gained_hyper {
                self.m2[u as usize] += 1;
            }
        }
        for &u in g.neighbors(v) {
            let e = self.would_change(g, resp, u);
            self.set_eligible(u, e);
        }
        let e = self.would_change(g, resp, v);
        self.set_eligible(v, e);
    }
}

/// Seeds the initial state: exactly `round(phi1 N)` nodes become at least
/// S1, and a uniform subset of those of size `round(phi2 N)` becomes S2.
/// Rounding is half-to-even.
pub fn seed<R: Rng>(g: &Graph, cfg: &SimConfig, rng: &mut R) -> Result<SimState, ContagionError> {
    cfg.validate()?;
    let n = g.node_count();
    let n1 = round_count(cfg.phi1 * n as f64);
    let n2 = round_count(cfg.phi2 * n as f64);
    if n2 > n1 {
        return Err(ContagionError::InvalidConfig(format!(
            "S2 seed count {n2} exceeds S1 seed count {n1}"
        )));
    }
    let mut stages = vec![Stage::S0; n];
    let chosen = sample(rng, n, n1);
    for (i, v) in chosen.into_iter().enumerate() {
        stages[v] = if i < n2 { Stage::S2 } else { Stage::S1 };
    }
    Ok(state_from_stages(g, stages))
}

fn state_from_stages(g: &Graph, stages: Vec<Stage>) -> SimState {
    let n = g.node_count();
    let mut m1 = vec![0u32; n];
    let mut m2 = vec![0u32; n];
    for v in 0..n as u32 {
        if stages[v as usize].is_active() {
            for &u in g.neighbors(v) {
                m1[u as usize] += 1;
            }
        }
        if stages[v as usize].is_hyper() {
            for &u in g.neighbors(v) {
                m2[u as usize] += 1;
            }
        }
    }
    SimState {
        stages,
        m1,
        m2,
        t: 0.0,
        eligible: vec![false; n],
        eligible_count: 0,
    }
}

/// Seeds from explicit node sets instead of fractions. S2 seeds are
/// S1-active by state nesting whether or not they appear in `seeds1`.
pub fn seed_explicit(g: &Graph, seeds1: &[u32], seeds2: &[u32]) -> SimState {
    let mut stages = vec![Stage::S0; g.node_count()];
    for &v in seeds1 {
        stages[v as usize] = Stage::S1;
    }
    for &v in seeds2 {
        stages[v as usize] = Stage::S2;
    }
    state_from_stages(g, stages)
}

/// Applies the threshold rules to node `v`: F1 then F2 are evaluated at the
/// current cached `(m1, m2)` and the stage is upgraded monotonically. A
/// node for which both rules fire jumps directly from S0 to S2.
pub fn update_node(
    state: &mut SimState,
    g: &Graph,
    resp: &QuenchedResponse,
    v: u32,
) -> Option<StageChange> {
    let from = state.stages[v as usize];
    if from == Stage::S2 {
        return None;
    }
    let k = g.degree(v);
    let (m1, m2) = (state.m1[v as usize], state.m2[v as usize]);
    let to = match from {
        Stage::S0 => {
            if !resp.fires(1, v, m1, m2, k) {
                return None;
            }
            if resp.fires(2, v, m1, m2, k) {
                Stage::S2
            } else {
                Stage::S1
            }
        }
        Stage::S1 => {
            if !resp.fires(2, v, m1, m2, k) {
                return None;
            }
            Stage::S2
        }
        Stage::S2 => unreachable!(),
    };
    state.apply_change(g, resp, v, to);
    Some(StageChange { node: v, from, to })
}

struct Recorder<'a> {
    grid: &'a [f64],
    next: usize,
    n: f64,
    class_of: &'a [u32],
    class_sizes: &'a [usize],
    // running counts
    count1: usize,
    count2: usize,
    count1_k: Vec<usize>,
    count2_k: Vec<usize>,
    // output
    rho1: Vec<f64>,
    rho2: Vec<f64>,
    rho1_k: Vec<Vec<f64>>,
    rho2_k: Vec<Vec<f64>>,
}

impl<'a> Recorder<'a> {
    fn new(grid: &'a [f64], class_of: &'a [u32], class_sizes: &'a [usize], n: usize) -> Self {
        let nc = class_sizes.len();
        Recorder {
            grid,
            next: 0,
            n: n as f64,
            class_of,
            class_sizes,
            count1: 0,
            count2: 0,
            count1_k: vec![0; nc],
            count2_k: vec![0; nc],
            rho1: Vec::with_capacity(grid.len()),
            rho2: Vec::with_capacity(grid.len()),
            rho1_k: vec![Vec::with_capacity(grid.len()); nc],
            rho2_k: vec![Vec::with_capacity(grid.len()); nc],
        }
    }

    fn init_counts(&mut self, stages: &[Stage]) {
        for (v, &s) in stages.iter().enumerate() {
            if s.is_active() {
                self.count1 += 1;
                self.count1_k[self.class_of[v] as usize] += 1;
            }
            if s.is_hyper() {
                self.count2 += 1;
                self.count2_k[self.class_of[v] as usize] += 1;
            }
        }
    }

    fn on_change(&mut self, change: &StageChange) {
        let c = self.class_of[change.node as usize] as usize;
        if change.from == Stage::S0 {
            self.count1 += 1;
            self.count1_k[c] += 1;
        }
        if change.to == Stage::S2 {
            self.count2 += 1;
            self.count2_k[c] += 1;
        }
    }

    /// Emits grid samples for every grid time at or below `t`.
    fn record_until(&mut self, t: f64) {
        while self.next < self.grid.len() && self.grid[self.next] <= t + 1e-12 {
            self.rho1.push(self.count1 as f64 / self.n);
            self.rho2.push(self.count2 as f64 / self.n);
            for (c, &size) in self.class_sizes.iter().enumerate() {
                let denom = size.max(1) as f64;
                self.rho1_k[c].push(self.count1_k[c] as f64 / denom);
                self.rho2_k[c].push(self.count2_k[c] as f64 / denom);
            }
            self.next += 1;
        }
    }

    #[allow(clippy::type_complexity)]
    fn finish(mut self) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
        self.record_until(f64::INFINITY);
        (self.rho1, self.rho2, self.rho1_k, self.rho2_k)
    }
}

/// Runs one realization on the given graph with quenched thresholds and an
/// already-seeded state. Returns the recorded series and the final state.
pub fn run_single(
    g: &Graph,
    resp: &QuenchedResponse,
    mut state: SimState,
    mode: UpdateMode,
    t_max: f64,
    rng: &mut ChaCha8Rng,
) -> (TimeSeries, SimState) {
    let n = g.node_count();
    let grid = output_grid(t_max);
    let classes = g.degree_classes();
    let mut class_of = vec![0u32; n];
    let mut class_sizes = vec![0usize; classes.len()];
    for v in 0..n {
        let c = classes.binary_search(&g.degree(v as u32)).unwrap();
        class_of[v] = c as u32;
        class_sizes[c] += 1;
    }
    let mut rec = Recorder::new(&grid, &class_of, &class_sizes, n);
    rec.init_counts(&state.stages);
    rec.record_until(0.0);
    state.refresh_eligibility(g, resp);

    match mode {
        UpdateMode::Asynchronous => {
            let dt = 1.0 / n as f64;
            let total_steps = (t_max * n as f64).ceil() as u64;
            for step in 1..=total_steps {
                if state.eligible_count == 0 {
                    break;
                }
                let v = rng.random_range(0..n) as u32;
                state.t = step as f64 * dt;
                if state.eligible[v as usize] {
                    if let Some(change) = update_node(&mut state, g, resp, v) {
                        rec.on_change(&change);
                    }
                }
                rec.record_until(state.t);
            }
        }
        UpdateMode::Synchronous => {
            while state.t < t_max {
                if state.eligible_count == 0 {
                    break;
                }
                // evaluate every decision against the pre-step state, then
                // apply them; caches mutate during application, so targets
                // must be fixed first
                let decisions: Vec<(u32, Stage)> = (0..n as u32)
                    .filter(|&v| state.eligible[v as usize])
                    .map(|v| {
                        let k = g.degree(v);
                        let (m1, m2) = (state.m1[v as usize], state.m2[v as usize]);
                        let target = match state.stages[v as usize] {
                            Stage::S0 if resp.fires(2, v, m1, m2, k) => Stage::S2,
                            Stage::S0 => Stage::S1,
                            _ => Stage::S2,
                        };
                        (v, target)
                    })
                    .collect();
                for (v, target) in decisions {
                    let from = state.stages[v as usize];
                    debug_assert!(target > from);
                    state.apply_change(g, resp, v, target);
                    rec.on_change(&StageChange {
                        node: v,
                        from,
                        to: target,
                    });
                }
                state.t += 1.0;
                rec.record_until(state.t);
            }
        }
    }
    state.t = t_max;
    let (rho1, rho2, rho1_k, rho2_k) = rec.finish();
    let series = TimeSeries {
        times: grid,
        rho1,
        rho2,
        classes,
        rho1_k,
        rho2_k,
    };
    (series, state)
}

fn realization_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Runs the configured ensemble and returns the pointwise mean time series.
///
/// Realizations are independent, scheduled across the rayon pool, and
/// merged deterministically by index. Each realization draws its update
/// order and quenched thresholds from a stream derived from
/// `(rng_seed, realization index)`; seed nodes are either fixed across
/// realizations or redrawn per `cfg.seed_mode`.
pub fn run(g: &Graph, spec: &ResponseSpec, cfg: &SimConfig) -> Result<TimeSeries, ContagionError> {
    cfg.validate()?;
    let runs: Vec<Result<TimeSeries, ContagionError>> = (0..cfg.realizations)
        .into_par_iter()
        .map(|i| {
            let mut rng = realization_rng(cfg.rng_seed, 1 + i as u64);
            let state = match cfg.seed_mode {
                SeedMode::FixedAcrossRealizations => {
                    let mut seed_rng = realization_rng(cfg.rng_seed, 0);
                    seed(g, cfg, &mut seed_rng)?
                }
                SeedMode::Resampled => seed(g, cfg, &mut rng)?,
            };
            let resp = spec.quench(g.node_count(), &mut rng);
            let (series, _) = run_single(g, &resp, state, cfg.update_mode, cfg.t_max, &mut rng);
            Ok(series)
        })
        .collect();
    let mut members = Vec::with_capacity(runs.len());
    for r in runs {
        members.push(r?);
    }
    let mean = TimeSeries::average(&members);
    mean.check_invariants()?;
    Ok(mean)
}
