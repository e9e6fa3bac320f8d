//! Multi-stage complex contagions on networks.
//!
//! Nodes occupy three ordered influence levels — inactive, active, and
//! hyper-active — and a hyper-active neighbor exerts `1 + beta` units of
//! peer pressure where an active one exerts a single unit. The crate
//! provides the Monte Carlo dynamics, the tree-based analytical
//! approximation of the activation densities, and the bifurcation
//! machinery for mapping where cascades occur:
//!
//! - [`graph`] — configuration-model, Erdős–Rényi, and degree-correlated
//!   generators; edge-list ingestion; degree statistics.
//! - [`contagion`] — response functions, quenched-threshold simulation
//!   under synchronous or asynchronous updating, and a brute-force
//!   fixpoint oracle.
//! - [`theory`] — per-degree-class recurrences, their asynchronous ODE
//!   limit, and the scalar configuration-model specialization.
//! - [`cascade`] — the closed-form cascade condition, equilibria of the
//!   reduced two-dimensional dynamics, saddle-node continuation, and
//!   parameter sweeps.
//! - [`cli`] — the config-driven experiment layer behind the
//!   `cascadelab` binary.
//!
//! The narrative guide with worked examples lives in `book/`; its code
//! blocks compile and run as doc-tests of this crate.

// `!(x > 0.0)` deliberately treats NaN as invalid input; index loops in
// the numeric kernels mirror the double-sum structure they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod cascade;
pub mod cli;
pub mod contagion;
pub mod graph;
pub mod theory;

// Keep the guide's snippets honest: every fenced example in the book is
// compiled and executed by `cargo test` as a doc-test.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub struct $name;
        };
    }
    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(Networks, "../../../book/src/networks.md");
    chapter!(Contagion, "../../../book/src/contagion.md");
    chapter!(Theory, "../../../book/src/theory.md");
    chapter!(Cascades, "../../../book/src/cascades.md");
    chapter!(Cli, "../../../book/src/cli.md");
}
