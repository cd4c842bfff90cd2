//! Reproducible Monte Carlo experiments.
//!
//! Every experiment maps an [`ExperimentConfig`] to a report, a table of
//! per-replicate samples and optionally an SVG plot. Replicate `i` at scale
//! `n` reads the field with seed [`scale_seed`]`(seed_base, n, i)` and nothing
//! else, so replicates run in parallel and the samples are bit-identical on
//! every rerun.

pub mod coalescence;
pub mod competition;
pub mod config;
pub mod ferromagnet;
pub mod midpoint;
pub mod report;
pub mod sector;
pub mod shape_run;

use crate::error::{FppError, Result};
use crate::lattice::Rect;
use crate::weights::replicate_seed;

pub use coalescence::{coalescence_curve, half_full_equality};
pub use competition::{competition_interface, competition_partition, Competition};
pub use config::{ExperimentConfig, SectorChoice};
pub use ferromagnet::{coupling_view, ferromagnet_experiment, ferromagnet_weight_map};
pub use midpoint::midpoint_probability;
pub use report::{ExperimentOutput, ExperimentReport, SampleTable, ScaleStat, Verdict};
pub use sector::{backward_cluster_experiment, busemann_experiment, delta_h_experiment, ordering_experiment};
pub use shape_run::shape_experiment;

/// Experiments known to [`run`].
pub const EXPERIMENTS: &[&str] = &[
    "midpoint",
    "coalescence",
    "half-full",
    "competition",
    "ferromagnet",
    "shape",
    "delta-h",
    "ordering",
    "busemann",
    "backward-cluster",
];

/// Seed of replicate `i` at scale `n`; independent streams per scale.
pub fn scale_seed(base: u64, n: i32, i: usize) -> u64 {
    replicate_seed(replicate_seed(base, n as u32 as u64), i as u64)
}

/// Square box of radius `ceil(1.25 n)` around the origin, widened to the
/// right by `extra` columns.
pub fn sector_box(n_target: i32, extra: i32) -> Result<Rect> {
    if n_target < 1 {
        return Err(FppError::Config(format!("n_target must be >= 1, got {n_target}")));
    }
    let r = (f64::from(n_target) * 1.25).ceil() as i32;
    Rect::new(-r, r + extra.max(0), -r, r)
}

pub fn run(experiment: &str, config: &ExperimentConfig) -> Result<ExperimentOutput> {
    match experiment {
        "midpoint" => midpoint_probability(config),
        "coalescence" => coalescence_curve(config),
        "half-full" => half_full_equality(config),
        "competition" => competition_interface(config),
        "ferromagnet" => ferromagnet_experiment(config),
        "shape" => shape_experiment(config),
        "delta-h" => delta_h_experiment(config),
        "ordering" => ordering_experiment(config),
        "busemann" => busemann_experiment(config),
        "backward-cluster" => backward_cluster_experiment(config),
        other => Err(FppError::Config(format!(
            "unknown experiment {other:?}; expected one of {}",
            EXPERIMENTS.join(", ")
        ))),
    }
}
