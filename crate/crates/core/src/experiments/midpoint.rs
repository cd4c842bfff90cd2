//! Probability that the midpoint `⌊n/2⌋ e1` lies on `Γ(0, n e1)`.

use serde_json::json;

use super::config::ExperimentConfig;
use super::report::{ExperimentOutput, ExperimentReport, SampleTable, ScaleStat};
use super::scale_seed;
use crate::error::{FppError, Result};
use crate::geodesic::geodesic;
use crate::lattice::{Point, Rect, Restriction};
use crate::par::try_replicate_map;
use crate::row;
use crate::stats::{normal_quantile, wilson_trend, Proportion, Z95};
use crate::weights::WeightField;

/// `[-m, n + m] x [-m, m]`, with `m = n/2` unless configured.
pub fn midpoint_box(n: i32, margin: Option<i32>) -> Result<Rect> {
    let m = margin.unwrap_or(n / 2).max(1);
    Rect::new(-m, n + m, -m, m)
}

/// Whether the midpoint is on the geodesic, and the passage time.
pub fn midpoint_indicator(field: &WeightField, n: i32) -> Result<(bool, f64)> {
    let g = geodesic(field, Point::ORIGIN, Point::new(n, 0), Restriction::Full)?;
    Ok((g.contains(Point::new(n / 2, 0)), g.time.as_f64()))
}

pub fn midpoint_probability(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    if cfg.n_values[0] < 2 {
        return Err(FppError::Config("midpoint needs n >= 2".into()));
    }
    let mut report = ExperimentReport::new("midpoint", cfg);
    let mut samples = SampleTable::new(&["n", "replicate", "seed", "on_geodesic", "passage_time"]);
    let mut counts = Vec::new();
    let mut pure = true;
    for &n in &cfg.n_values {
        let rect = midpoint_box(n, cfg.margin)?;
        let runs = try_replicate_map(cfg.replicates, |i| {
            let seed = scale_seed(cfg.seed_base, n, i);
            let field = WeightField::generate(rect, seed, cfg.dist)?;
            Ok((seed, midpoint_indicator(&field, n)?))
        })?;
        // the indicator is a function of the field alone
        let (seed0, first) = runs[0];
        let again = midpoint_indicator(&WeightField::generate(rect, seed0, cfg.dist)?, n)?;
        pure &= again == first;
        let hits = runs.iter().filter(|r| r.1 .0).count();
        for (i, (seed, (hit, t))) in runs.iter().enumerate() {
            samples.push(row![n, i, seed, u8::from(*hit), t]);
        }
        let p = Proportion::wilson(hits, cfg.replicates, Z95)?;
        report.stats.push(ScaleStat::from_proportion(n, "p_midpoint", &p, 0.95));
        counts.push((hits, cfg.replicates));
    }
    let trend = wilson_trend(&counts, cfg.level)?;
    let z = normal_quantile(1.0 - cfg.level)?;
    report.assert_flag("indicator_reproducible", pure, "first replicate recomputed from its seed");
    report.report_flag(
        "strictly_decreasing",
        trend.trend == crate::stats::Trend::StrictlyDecreasing,
        format!("one-sided Wilson/Newcombe step test at level {} (z = {z:.4})", cfg.level),
    );
    report.details = json!({ "trend": trend, "boxes": cfg.n_values.iter().map(|&n| midpoint_box(n, cfg.margin).map(|r| [r.x_min, r.x_max, r.y_min, r.y_max])).collect::<Result<Vec<_>>>()? });
    Ok(ExperimentOutput {
        report,
        samples,
        plot: None,
    })
}
