//! Limit-shape estimate, convex hull and tangent line.

use std::f64::consts::FRAC_PI_4;

use serde_json::json;

use super::config::ExperimentConfig;
use super::report::{ExperimentOutput, ExperimentReport, SampleTable, ScaleStat};
use crate::error::{FppError, Result};
use crate::shape::{convex_hull, estimate_shape, fit_tangent, shape_points, shape_svg, DEFAULT_GRID_INTERVALS};
use crate::row;
use crate::weights::replicate_seed;

pub fn shape_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    if cfg.replicates < 2 {
        return Err(FppError::Config("shape needs replicates >= 2".into()));
    }
    let theta = cfg.theta.unwrap_or(FRAC_PI_4);
    let intervals = cfg.grid_intervals.unwrap_or(DEFAULT_GRID_INTERVALS);
    let mut report = ExperimentReport::new("shape", cfg);
    let mut samples = SampleTable::new(&["n", "theta_grid", "theta", "target_x", "target_y", "ghat", "ci", "replicates"]);
    let mut tangents = Vec::new();
    let mut finite = true;
    let mut plot = None;
    for &n in &cfg.n_values {
        let est = estimate_shape(&cfg.dist, replicate_seed(cfg.seed_base, n as u32 as u64), n, cfg.replicates, intervals)
            .map_err(|e| match e {
                FppError::InvalidParameter(m) => FppError::Config(m),
                other => other,
            })?;
        for e in &est.entries {
            finite &= e.ghat.is_finite() && e.ghat > 0.0;
            samples.push(row![n, e.theta, e.direction, e.target.x, e.target.y, e.ghat, e.ci, e.replicates]);
        }
        let tol = cfg.tolerances.get("contact").copied();
        let t = fit_tangent(&est, theta, tol)?;
        let pts = shape_points(&est);
        let hull = convex_hull(&pts);
        let near = est
            .entries
            .iter()
            .min_by(|a, b| (a.direction - theta).abs().total_cmp(&(b.direction - theta).abs()))
            .expect("non-empty grid");
        report.stats.push(ScaleStat {
            n,
            label: "ghat_at_theta".into(),
            count: near.replicates,
            estimate: near.ghat,
            ci_low: near.ghat - near.ci,
            ci_high: near.ghat + near.ci,
            ci_level: 0.95,
        });
        report.report_flag(
            &format!("convex_n{n}"),
            hull.len() == pts.len(),
            format!("{} of {} boundary points are hull vertices", hull.len(), pts.len()),
        );
        tangents.push(json!({ "n": n, "theta": theta, "tangent": t, "hull_vertices": hull.len(), "boundary_points": pts.len() }));
        plot = Some(shape_svg(&est));
    }
    report.assert_flag("ghat_positive_finite", finite, "every direction estimate is finite and positive");
    report.details = json!({ "grid_intervals": intervals, "tangents": tangents });
    Ok(ExperimentOutput { report, samples, plot })
}
