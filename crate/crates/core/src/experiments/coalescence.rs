//! Coalescence of extremal proxies and full/half-plane equality.

use serde_json::json;

use super::config::{ExperimentConfig, SectorChoice};
use super::report::{ExperimentOutput, ExperimentReport, SampleTable, ScaleStat};
use super::{scale_seed, sector_box};
use crate::error::Result;
use crate::lattice::{Point, Restriction};
use crate::order::{coalesced_below, coalescence_point, extremal_proxy, Side};
use crate::par::try_replicate_map;
use crate::row;
use crate::stats::{wilson_trend, Proportion, Trend, Z95};
use crate::weights::WeightField;

const DEFAULT_SECTOR: SectorChoice = SectorChoice::Lattice { k: 0 };

/// Fraction of replicates whose L-proxies from `0` and `d e1` coalesce below
/// `L_{n_target/2}`, for every configured separation `d`.
pub fn coalescence_curve(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut report = ExperimentReport::new("coalescence", cfg);
    let mut samples = SampleTable::new(&["n_target", "separation", "replicate", "seed", "coalesced", "meeting_y"]);
    let choice = cfg.sector_or(DEFAULT_SECTOR);
    let max_d = cfg.separations.iter().copied().max().unwrap_or(0);
    // hits[d_index][n_index]
    let mut hits = vec![Vec::new(); cfg.separations.len()];
    for &n in &cfg.n_values {
        let sector = choice.at(n)?;
        let rect = sector_box(n, max_d)?;
        let runs = try_replicate_map(cfg.replicates, |i| {
            let seed = scale_seed(cfg.seed_base, n, i);
            let field = WeightField::generate(rect, seed, cfg.dist)?;
            let base = extremal_proxy(&field, Point::ORIGIN, Side::L, &sector, n, Restriction::Full)?;
            let per_d = cfg
                .separations
                .iter()
                .map(|&d| {
                    let other = extremal_proxy(&field, Point::new(d, 0), Side::L, &sector, n, Restriction::Full)?;
                    let merged = coalesced_below(&base.path, &other.path, n / 2);
                    Ok((merged, coalescence_point(&base.path, &other.path).map(|p| p.y)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((seed, per_d))
        })?;
        for (j, &d) in cfg.separations.iter().enumerate() {
            let count = runs.iter().filter(|r| r.1[j].0).count();
            for (i, (seed, per_d)) in runs.iter().enumerate() {
                let (merged, y) = per_d[j];
                samples.push(row![n, d, i, seed, u8::from(merged), y.map(|y| y.to_string()).unwrap_or_default()]);
            }
            let p = Proportion::wilson(count, cfg.replicates, Z95)?;
            report.stats.push(ScaleStat::from_proportion(n, &format!("p_coalesced_d{d}"), &p, 0.95));
            hits[j].push((count, cfg.replicates));
        }
    }
    let mut trends = serde_json::Map::new();
    for (j, &d) in cfg.separations.iter().enumerate() {
        if d == 0 {
            let all = hits[j].iter().all(|&(c, r)| c == r);
            report.assert_flag("d0_always_coalesced", all, "identical starts give identical proxies");
            continue;
        }
        let t = wilson_trend(&hits[j], cfg.level)?;
        report.report_flag(
            &format!("nondecreasing_d{d}"),
            t.trend == Trend::Nondecreasing,
            format!("no significant drop between consecutive n_target at level {}", cfg.level),
        );
        trends.insert(format!("d{d}"), serde_json::to_value(&t).expect("serializable"));
    }
    report.details = json!({ "sector": choice, "coalesce_below": "n_target / 2", "trends": trends });
    Ok(ExperimentOutput {
        report,
        samples,
        plot: None,
    })
}

/// Among replicates whose full-plane L-proxy from `0` stays in `y >= 0`, the
/// fraction equal to the half-plane L-proxy on the same field.
///
/// Both proxies use the same tie-break, so equality on the eligible event is
/// exact and is asserted.
pub fn half_full_equality(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut report = ExperimentReport::new("half-full", cfg);
    let mut samples = SampleTable::new(&["n_target", "replicate", "seed", "eligible", "equal"]);
    let choice = cfg.sector_or(DEFAULT_SECTOR);
    let mut counts = Vec::new();
    let mut exact = true;
    for &n in &cfg.n_values {
        let sector = choice.at(n)?;
        let rect = sector_box(n, 0)?;
        let runs = try_replicate_map(cfg.replicates, |i| {
            let seed = scale_seed(cfg.seed_base, n, i);
            let field = WeightField::generate(rect, seed, cfg.dist)?;
            let full = extremal_proxy(&field, Point::ORIGIN, Side::L, &sector, n, Restriction::Full)?;
            let eligible = full.path.min_y() >= 0;
            let equal = eligible && {
                let half = extremal_proxy(&field, Point::ORIGIN, Side::L, &sector, n, Restriction::HalfPlane)?;
                half.path.vertices == full.path.vertices
            };
            Ok((seed, eligible, equal))
        })?;
        let eligible = runs.iter().filter(|r| r.1).count();
        let equal = runs.iter().filter(|r| r.2).count();
        for (i, (seed, el, eq)) in runs.iter().enumerate() {
            samples.push(row![n, i, seed, u8::from(*el), u8::from(*eq)]);
        }
        exact &= equal == eligible;
        if eligible > 0 {
            let p = Proportion::wilson(equal, eligible, Z95)?;
            report.stats.push(ScaleStat::from_proportion(n, "p_equal_given_eligible", &p, 0.95));
            counts.push((equal, eligible));
        }
        let e = Proportion::wilson(eligible, cfg.replicates, Z95)?;
        report.stats.push(ScaleStat::from_proportion(n, "p_eligible", &e, 0.95));
    }
    report.assert_flag("equal_when_eligible", exact, "full-plane proxy inside y >= 0 equals the half-plane proxy");
    if counts.len() >= 2 {
        let t = wilson_trend(&counts, cfg.level)?;
        report.report_flag("nondecreasing", t.trend == Trend::Nondecreasing, format!("level {}", cfg.level));
    }
    report.details = json!({ "sector": choice });
    Ok(ExperimentOutput {
        report,
        samples,
        plot: None,
    })
}
