//! The four experiment commands: generate, simulate, theory, cascade.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::cascade::{
    cascade_condition, continue_saddle_node, find_saddle_node_start, sweep_diagram, BoundaryCurve,
    CascadeError, ContinuationOptions, FamilyPoint, GridSpec, SweepResult,
};
use crate::contagion::{self, SeedMode, TimeSeries};
use crate::graph::{
    generate_config_model, generate_correlated, generate_er, load_edge_list, write_edge_list,
    DegreeDistribution, Graph, JointDegreeDistribution,
};
use crate::theory::{integrate_ode, ModelInputs, NetworkModel, OdeOptions};

use super::config::{AxisName, ExperimentConfig, NetworkKind, NetworkModeConfig, ThresholdSpec};
use super::csvout::{
    boundary_csv, condition_boundary_csv, overlay_csv, sweep_csv, time_series_csv, write_file,
    Manifest,
};
use super::{svg, CliError};

/// Resolved invocation: parsed config plus command-line overrides.
pub struct CommandContext {
    pub config: ExperimentConfig,
    pub config_text: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub svg: bool,
}

impl CommandContext {
    fn ensure_out_dir(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", self.out_dir.display())))
    }

    fn write_manifest(
        &self,
        command: &str,
        started: Instant,
        notes: Vec<String>,
    ) -> Result<(), CliError> {
        let manifest = Manifest {
            command,
            config_text: &self.config_text,
            seed: self.seed,
            wall_seconds: started.elapsed().as_secs_f64(),
            notes,
        };
        write_file(&self.out_dir.join("manifest.toml"), &manifest.render())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn derive_seed(master: u64, salt: u64) -> u64 {
    splitmix64(master ^ splitmix64(salt))
}

fn build_graph(cfg: &ExperimentConfig, seed: u64) -> Result<Graph, CliError> {
    let n = &cfg.network;
    match n.kind {
        NetworkKind::Er => generate_er(n.z.unwrap(), n.n.unwrap(), seed)
            .map_err(|e| CliError::Config(e.to_string())),
        NetworkKind::Uncorrelated => {
            let dist = DegreeDistribution::from_weights(n.degrees.as_ref().unwrap())
                .map_err(|e| CliError::Config(e.to_string()))?;
            generate_config_model(&dist, n.n.unwrap(), seed)
                .map_err(|e| CliError::Config(e.to_string()))
        }
        NetworkKind::Correlated => {
            let joint = JointDegreeDistribution::new(n.joint.as_ref().unwrap())
                .map_err(|e| CliError::Config(e.to_string()))?;
            generate_correlated(&joint, n.n.unwrap(), seed)
                .map_err(|e| CliError::Config(e.to_string()))
        }
        NetworkKind::EdgeList => {
            let path = n.path.as_ref().unwrap();
            let file = std::fs::File::open(path)
                .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
            let (g, _) = load_edge_list(file).map_err(|e| CliError::Config(e.to_string()))?;
            Ok(g)
        }
    }
}

/// Generates the configured network and writes it in canonical edge-list
/// form. The manifest records the realized degree-class counts, including
/// any rounding adjustment made by the generator.
pub fn cmd_generate(ctx: &CommandContext) -> Result<(), CliError> {
    let started = Instant::now();
    ctx.ensure_out_dir()?;
    let g = build_graph(&ctx.config, ctx.seed)?;
    let mut buf = Vec::new();
    write_edge_list(&g, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    let path = ctx.out_dir.join("network.edges");
    std::fs::write(&path, &buf)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    let mut notes = vec![
        format!("nodes = {}", g.node_count()),
        format!("edges = {}", g.edge_count()),
    ];
    for (k, nodes) in g.degree_index() {
        notes.push(format!("degree_{k}_count = {}", nodes.len()));
    }
    ctx.write_manifest("generate", started, notes)
}

fn run_simulation(ctx: &CommandContext) -> Result<TimeSeries, CliError> {
    let cfg = &ctx.config;
    let spec = cfg.response_spec()?;
    let sim_cfg = cfg.sim_config(Some(ctx.seed));
    match cfg.run.network_mode {
        NetworkModeConfig::Fixed => {
            let g = build_graph(cfg, derive_seed(ctx.seed, 0xA))?;
            contagion::run(&g, &spec, &sim_cfg).map_err(|e| CliError::Config(e.to_string()))
        }
        NetworkModeConfig::Ensemble => {
            let runs: Vec<Result<TimeSeries, CliError>> = (0..cfg.run.realizations)
                .into_par_iter()
                .map(|i| {
                    let g = build_graph(cfg, derive_seed(ctx.seed, 0xB00 + i as u64))?;
                    let one = contagion::SimConfig {
                        realizations: 1,
                        rng_seed: derive_seed(ctx.seed, 0xC00 + i as u64),
                        seed_mode: SeedMode::Resampled,
                        ..sim_cfg.clone()
                    };
                    contagion::run(&g, &spec, &one).map_err(|e| CliError::Config(e.to_string()))
                })
                .collect();
            let mut members = Vec::with_capacity(runs.len());
            for r in runs {
                members.push(r?);
            }
            Ok(TimeSeries::average(&members))
        }
    }
}

fn series_svg(ts: &TimeSeries, title: &str) -> String {
    let mut series = vec![
        ("rho1".to_string(), ts.rho1.clone()),
        ("rho2".to_string(), ts.rho2.clone()),
    ];
    for (c, &k) in ts.classes.iter().enumerate() {
        series.push((format!("rho1_k{k}"), ts.rho1_k[c].clone()));
        series.push((format!("rho2_k{k}"), ts.rho2_k[c].clone()));
    }
    svg::line_chart(title, "t", "active fraction", &ts.times, &series)
}

/// Monte Carlo run of the configured experiment, written as a time-series
/// CSV.
pub fn cmd_simulate(ctx: &CommandContext) -> Result<(), CliError> {
    let started = Instant::now();
    ctx.ensure_out_dir()?;
    let ts = run_simulation(ctx)?;
    write_file(&ctx.out_dir.join("simulation.csv"), &time_series_csv(&ts))?;
    if ctx.svg {
        write_file(
            &ctx.out_dir.join("simulation.svg"),
            &series_svg(&ts, "simulation"),
        )?;
    }
    ctx.write_manifest("simulate", started, Vec::new())
}

fn theory_inputs(ctx: &CommandContext) -> Result<ModelInputs, CliError> {
    let cfg = &ctx.config;
    let network = cfg.network_model()?;
    let spec = cfg.response_spec()?;
    ModelInputs::new(network, spec, cfg.run.phi1, cfg.run.phi2)
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Tree-approximation densities on the same grid and schema as the
/// simulator; optionally overlaid with a simulation run for gap
/// diagnostics.
pub fn cmd_theory(ctx: &CommandContext) -> Result<(), CliError> {
    let started = Instant::now();
    ctx.ensure_out_dir()?;
    let inputs = theory_inputs(ctx)?;
    let opts = OdeOptions {
        t_max: ctx.config.run.t_max,
        dt: ctx.config.analysis.dt,
        ..OdeOptions::default()
    };
    let theory = integrate_ode(&inputs, &opts).map_err(cascade_like_error)?;
    write_file(&ctx.out_dir.join("theory.csv"), &time_series_csv(&theory))?;
    if ctx.svg {
        write_file(
            &ctx.out_dir.join("theory.svg"),
            &series_svg(&theory, "theory"),
        )?;
    }
    if ctx.config.analysis.overlay {
        let sim = run_simulation(ctx)?;
        write_file(
            &ctx.out_dir.join("overlay.csv"),
            &overlay_csv(&sim, &theory),
        )?;
    }
    ctx.write_manifest("theory", started, Vec::new())
}

fn cascade_like_error(e: impl std::fmt::Display) -> CliError {
    let text = e.to_string();
    if text.contains("converge") {
        CliError::NonConvergence(text)
    } else {
        CliError::Config(text)
    }
}

fn make_family<'a>(
    cfg: &'a ExperimentConfig,
    p1: AxisName,
    p2: AxisName,
) -> Result<impl Fn(f64, f64) -> Result<FamilyPoint, CascadeError> + Sync + 'a, CliError> {
    // the cascade machinery runs on configuration-model statistics
    let base_network = cfg.network_model()?;
    let NetworkModel::Factorized(base_dist) = base_network else {
        return Err(CliError::Config(
            "cascade analysis requires an er or uncorrelated network".into(),
        ));
    };
    if (p1 == AxisName::Z || p2 == AxisName::Z) && cfg.network.kind != NetworkKind::Er {
        return Err(CliError::Config("sweeping z requires an er network".into()));
    }
    let phi1 = cfg.run.phi1;
    let phi2 = cfg.run.phi2;
    Ok(
        move |v1: f64, v2: f64| -> Result<FamilyPoint, CascadeError> {
            let mut z: Option<f64> = None;
            let mut r1 = cfg.model.r1;
            let mut r2 = cfg.model.r2;
            let mut beta = cfg.model.beta;
            for (name, value) in [(p1, v1), (p2, v2)] {
                match name {
                    AxisName::Z => z = Some(value),
                    AxisName::Beta => beta = value,
                    AxisName::R1 => r1 = ThresholdSpec::Value(value),
                    AxisName::R2 => r2 = ThresholdSpec::Value(value),
                }
            }
            if let (ThresholdSpec::Value(a), ThresholdSpec::Value(b)) = (r1, r2) {
                if a > b {
                    return Err(CascadeError::InvalidFamily(format!(
                        "forbidden region: R1 = {a} exceeds R2 = {b}"
                    )));
                }
            }
            let dist = match z {
                Some(z) => {
                    if z <= 0.0 {
                        return Err(CascadeError::InvalidFamily(format!("z = {z}")));
                    }
                    DegreeDistribution::poisson(z, crate::cascade::poisson_kmax(z))?
                }
                None => base_dist.clone(),
            };
            let scaling = match cfg.model.scaling {
                super::config::ScalingConfig::Fraction => {
                    crate::contagion::PressureScaling::Fraction
                }
                super::config::ScalingConfig::Count => crate::contagion::PressureScaling::Count,
            };
            let spec = crate::contagion::ResponseSpec::new(
                scaling,
                r1.to_threshold(),
                r2.to_threshold(),
                beta,
            )
            .map_err(|e| CascadeError::InvalidFamily(e.to_string()))?;
            Ok(FamilyPoint {
                dist,
                spec,
                phi1,
                phi2,
            })
        },
    )
}

fn axis_label(name: AxisName) -> &'static str {
    match name {
        AxisName::Z => "z",
        AxisName::Beta => "beta",
        AxisName::R1 => "r1",
        AxisName::R2 => "r2",
    }
}

/// Zero crossings of the closed-form condition along p1, bisected per p2
/// row.
fn condition_crossings<F>(family: &F, p1_grid: &[f64], p2_grid: &[f64]) -> Vec<(f64, f64)>
where
    F: Fn(f64, f64) -> Result<FamilyPoint, CascadeError> + Sync,
{
    let value = |p1: f64, p2: f64| -> Option<f64> {
        let fam = family(p1, p2).ok()?;
        cascade_condition(&fam.dist, &fam.spec, fam.phi1, fam.phi2)
            .ok()
            .map(|c| c.value)
    };
    let mut out: Vec<(f64, f64)> = p2_grid
        .par_iter()
        .flat_map_iter(|&p2| {
            let mut crossings = Vec::new();
            let mut prev: Option<(f64, f64)> = None;
            for &p1 in p1_grid {
                let v = value(p1, p2);
                if let (Some((pa, va)), Some(vb)) = (prev, v) {
                    if va.signum() != vb.signum() && va.is_finite() && vb.is_finite() {
                        let (mut lo, mut hi) = (pa, p1);
                        let (mut vlo, _) = (va, vb);
                        for _ in 0..50 {
                            let mid = 0.5 * (lo + hi);
                            match value(mid, p2) {
                                Some(vm) if vm.signum() == vlo.signum() => {
                                    lo = mid;
                                    vlo = vm;
                                }
                                Some(_) => hi = mid,
                                None => break,
                            }
                        }
                        crossings.push((0.5 * (lo + hi), p2));
                    }
                }
                if let Some(v) = v {
                    prev = Some((p1, v));
                } else {
                    prev = None;
                }
            }
            crossings
        })
        .collect();
    out.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap()
            .then(a.0.partial_cmp(&b.0).unwrap())
    });
    out
}

/// Cascade analysis: condition evaluation, two-parameter sweep, condition
/// boundary, and optional saddle-node continuation.
pub fn cmd_cascade(ctx: &CommandContext) -> Result<(), CliError> {
    let started = Instant::now();
    ctx.ensure_out_dir()?;
    let analysis = &ctx.config.analysis;
    let mut notes = Vec::new();

    let (Some(ax1), Some(ax2)) = (analysis.p1.clone(), analysis.p2.clone()) else {
        // no axes: single-point condition report
        let inputs = theory_inputs(ctx)?;
        let NetworkModel::Factorized(dist) = &inputs.network else {
            return Err(CliError::Config(
                "cascade analysis requires an er or uncorrelated network".into(),
            ));
        };
        let c = cascade_condition(dist, &inputs.response, inputs.phi1, inputs.phi2)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let csv = format!(
            "cascade_condition_value,cascades,d1g1,d2g1,d1g2,d2g2\n{},{},{},{},{},{}\n",
            c.value, c.cascades, c.partials[0], c.partials[1], c.partials[2], c.partials[3]
        );
        write_file(&ctx.out_dir.join("condition.csv"), &csv)?;
        return ctx.write_manifest("cascade", started, notes);
    };

    let family = make_family(&ctx.config, ax1.name, ax2.name)?;
    let p1_name = axis_label(ax1.name);
    let p2_name = axis_label(ax2.name);
    let g1 = GridSpec {
        min: ax1.min,
        max: ax1.max,
        steps: ax1.steps,
    };
    let g2 = GridSpec {
        min: ax2.min,
        max: ax2.max,
        steps: ax2.steps,
    };

    if ax1.steps == 1 && ax2.steps == 1 {
        // degenerate single-point grid: report the point, no curves
        let result = single_point(&family, ax1.min, ax2.min);
        write_file(
            &ctx.out_dir.join("sweep.csv"),
            &sweep_csv(&result, p1_name, p2_name),
        )?;
        return ctx.write_manifest("cascade", started, notes);
    }

    let result = sweep_diagram(&family, &g1, &g2).map_err(|e| CliError::Config(e.to_string()))?;
    let unconverged = result
        .points
        .iter()
        .filter(|p| p.valid && !p.converged)
        .count();
    if unconverged > 0 {
        notes.push(format!("unconverged_grid_points = {unconverged}"));
    }
    write_file(
        &ctx.out_dir.join("sweep.csv"),
        &sweep_csv(&result, p1_name, p2_name),
    )?;

    let crossings = condition_crossings(&family, &result.p1_grid, &result.p2_grid);
    write_file(
        &ctx.out_dir.join("condition_boundary.csv"),
        &condition_boundary_csv(&crossings, p1_name, p2_name),
    )?;

    let mut curve: Option<BoundaryCurve> = None;
    if let Some(cc) = &analysis.continuation {
        let opts = ContinuationOptions {
            initial_step: cc.step,
            p2_range: (g2.min, g2.max),
            p1_range: (g1.min, g1.max),
            ..ContinuationOptions::default()
        };
        let start =
            find_saddle_node_start(&family, cc.start_p2, cc.start_bracket, &opts).map_err(|e| {
                match e {
                    CascadeError::NonConvergence { .. } | CascadeError::UnverifiedStart(_) => {
                        CliError::NonConvergence(e.to_string())
                    }
                    other => CliError::Config(other.to_string()),
                }
            })?;
        let traced = continue_saddle_node(&family, &start, &opts)
            .map_err(|e| CliError::NonConvergence(e.to_string()))?;
        notes.push(format!("continuation_points = {}", traced.points.len()));
        if traced.end_of_branch {
            notes.push("continuation_end_of_branch = true".into());
        }
        write_file(
            &ctx.out_dir.join("continuation.csv"),
            &boundary_csv(&traced, p1_name, p2_name),
        )?;
        curve = Some(traced);
    }

    if ctx.svg {
        let values: Vec<f64> = result.points.iter().map(|p| p.rho1_inf).collect();
        let mut curves = vec![("cascade condition".to_string(), crossings.clone())];
        if let Some(c) = &curve {
            curves.push((
                "saddle-node continuation".to_string(),
                c.points.iter().map(|p| (p.p1, p.p2)).collect(),
            ));
        }
        write_file(
            &ctx.out_dir.join("sweep.svg"),
            &svg::heatmap(
                "final stage-1 density",
                p1_name,
                p2_name,
                &result.p1_grid,
                &result.p2_grid,
                &values,
                &curves,
            ),
        )?;
    }
    ctx.write_manifest("cascade", started, notes)
}

fn single_point<F>(family: &F, p1: f64, p2: f64) -> SweepResult
where
    F: Fn(f64, f64) -> Result<FamilyPoint, CascadeError> + Sync,
{
    let g1 = GridSpec {
        min: p1,
        max: p1,
        steps: 1,
    };
    let g2 = GridSpec {
        min: p2,
        max: p2,
        steps: 1,
    };
    sweep_diagram(family, &g1, &g2).expect("single point evaluation")
}
