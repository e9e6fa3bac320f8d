//! CSV artifacts and the run manifest. Floats are written with Rust's
//! shortest round-trip formatting so identical runs produce byte-identical
//! files.

use std::fmt::Write as _;
use std::path::Path;

use crate::cascade::{BoundaryCurve, SweepResult};
use crate::contagion::TimeSeries;

use super::CliError;

pub fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// `t,rho1,rho2` followed by `rho1_k{K},rho2_k{K}` pairs per degree class.
pub fn time_series_csv(ts: &TimeSeries) -> String {
    let mut out = String::new();
    out.push_str("t,rho1,rho2");
    for &k in &ts.classes {
        let _ = write!(out, ",rho1_k{k},rho2_k{k}");
    }
    out.push('\n');
    for i in 0..ts.times.len() {
        let _ = write!(out, "{},{},{}", ts.times[i], ts.rho1[i], ts.rho2[i]);
        for c in 0..ts.classes.len() {
            let _ = write!(out, ",{},{}", ts.rho1_k[c][i], ts.rho2_k[c][i]);
        }
        out.push('\n');
    }
    out
}

/// Simulation and theory series on a shared grid with per-class
/// theory-minus-simulation gap columns.
pub fn overlay_csv(sim: &TimeSeries, theory: &TimeSeries) -> String {
    assert_eq!(sim.times.len(), theory.times.len(), "grid mismatch");
    let mut classes: Vec<usize> = sim
        .classes
        .iter()
        .copied()
        .filter(|k| theory.classes.contains(k))
        .collect();
    classes.sort_unstable();
    let mut out = String::new();
    out.push_str("t,sim_rho1,sim_rho2,theory_rho1,theory_rho2,gap_rho1,gap_rho2");
    for &k in &classes {
        let _ = write!(
            out,
            ",sim_rho1_k{k},theory_rho1_k{k},gap_rho1_k{k},sim_rho2_k{k},theory_rho2_k{k},gap_rho2_k{k}"
        );
    }
    out.push('\n');
    for i in 0..sim.times.len() {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            sim.times[i],
            sim.rho1[i],
            sim.rho2[i],
            theory.rho1[i],
            theory.rho2[i],
            theory.rho1[i] - sim.rho1[i],
            theory.rho2[i] - sim.rho2[i],
        );
        for &k in &classes {
            let s1 = sim.class_series(1, k).unwrap()[i];
            let t1 = theory.class_series(1, k).unwrap()[i];
            let s2 = sim.class_series(2, k).unwrap()[i];
            let t2 = theory.class_series(2, k).unwrap()[i];
            let _ = write!(out, ",{s1},{t1},{},{s2},{t2},{}", t1 - s1, t2 - s2);
        }
        out.push('\n');
    }
    out
}

/// `p1,p2,rho1_inf,rho2_inf,cascade_condition_value`, row-major over p2.
pub fn sweep_csv(result: &SweepResult, p1_name: &str, p2_name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{p1_name},{p2_name},rho1_inf,rho2_inf,cascade_condition_value"
    );
    for p in &result.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.p1, p.p2, p.rho1_inf, p.rho2_inf, p.condition_value
        );
    }
    out
}

/// Continuation output: parameters, the critical equilibrium, and the three
/// verified residuals per point.
pub fn boundary_csv(curve: &BoundaryCurve, p1_name: &str, p2_name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{p1_name},{p2_name},q1,q2,res1,res2,res3");
    for p in &curve.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.p1, p.p2, p.q[0], p.q[1], p.residuals[0], p.residuals[1], p.residuals[2]
        );
    }
    out
}

/// Zero crossings of the closed-form cascade condition, one `(p1, p2)` row
/// per crossing.
pub fn condition_boundary_csv(points: &[(f64, f64)], p1_name: &str, p2_name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{p1_name},{p2_name}");
    for &(p1, p2) in points {
        let _ = writeln!(out, "{p1},{p2}");
    }
    out
}

/// 64-bit FNV-1a of the raw config text, recorded in the manifest.
pub fn config_hash(text: &str) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in text.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// The manifest records everything needed to re-run bit-identically plus
/// wall time for bookkeeping.
pub struct Manifest<'a> {
    pub command: &'a str,
    pub config_text: &'a str,
    pub seed: u64,
    pub wall_seconds: f64,
    pub notes: Vec<String>,
}

impl Manifest<'_> {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command = {:?}", self.command);
        let _ = writeln!(
            out,
            "config_hash = \"{:016x}\"",
            config_hash(self.config_text)
        );
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "version = {:?}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "wall_seconds = {}", self.wall_seconds);
        for (i, note) in self.notes.iter().enumerate() {
            let _ = writeln!(out, "note_{i} = {note:?}");
        }
        out
    }
}
