//! The coupling dictionary `t_e = J_{x,y}` between a disordered ferromagnet on
//! the dual lattice and first-passage percolation on the primal one. Only the
//! dictionary is implemented, not ground-state search.

use std::collections::BTreeMap;

use serde_json::json;

use super::config::ExperimentConfig;
use super::report::{ExperimentOutput, ExperimentReport, SampleTable};
use super::scale_seed;
use crate::error::{FppError, Result};
use crate::geodesic::geodesic;
use crate::lattice::{DualEdge, Point, Rect, Restriction};
use crate::par::try_replicate_map;
use crate::row;
use crate::weights::{Distribution, WeightField};

/// Primal field with `t_e` equal to the coupling on the dual edge crossing
/// `e`. Every edge of `rect` needs a positive coupling; extra couplings are
/// ignored.
pub fn ferromagnet_weight_map(couplings: &BTreeMap<DualEdge, f64>, rect: Rect) -> Result<WeightField> {
    WeightField::from_fn(rect, |e| {
        let d = DualEdge::crossing(e);
        match couplings.get(&d) {
            Some(&j) if j > 0.0 && j.is_finite() => Ok(j),
            Some(&j) => Err(FppError::InvalidParameter(format!("coupling {j} on dual edge {d:?} is not positive"))),
            None => Err(FppError::InvalidParameter(format!("missing coupling for dual edge {d:?}"))),
        }
    })
}

/// Couplings read back from a field, one per dual edge.
pub fn coupling_view(field: &WeightField) -> Result<BTreeMap<DualEdge, f64>> {
    field.edges().map(|e| Ok((DualEdge::crossing(e), field.weight_at(e)?))).collect()
}

fn same_weights(a: &WeightField, b: &WeightField) -> Result<bool> {
    for e in a.edges() {
        if a.weight_at(e)?.to_bits() != b.weight_at(e)?.to_bits() || a.time_at(e)? != b.time_at(e)? {
            return Ok(false);
        }
    }
    Ok(a.rect() == b.rect())
}

/// Round trip and geodesic equality on random fields, plus the all-ones case.
pub fn ferromagnet_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut report = ExperimentReport::new("ferromagnet", cfg);
    let mut samples = SampleTable::new(&["n", "replicate", "seed", "round_trip", "geodesic_equal", "passage_time"]);
    let (mut round_trip, mut geodesics, mut unit) = (true, true, true);
    for &n in &cfg.n_values {
        let rect = Rect::square(n)?;
        let target = Point::new(n, n / 2);
        let runs = try_replicate_map(cfg.replicates, |i| {
            let seed = scale_seed(cfg.seed_base, n, i);
            let direct = WeightField::generate(rect, seed, cfg.dist)?;
            let j = coupling_view(&direct)?;
            let mapped = ferromagnet_weight_map(&j, rect)?;
            let rt = same_weights(&direct, &mapped)? && coupling_view(&mapped)? == j;
            let g1 = geodesic(&direct, Point::ORIGIN, target, Restriction::Full)?;
            let g2 = geodesic(&mapped, Point::ORIGIN, target, Restriction::Full)?;
            Ok((seed, rt, g1 == g2, g1.time.as_f64()))
        })?;
        for (i, (seed, rt, ge, t)) in runs.iter().enumerate() {
            round_trip &= rt;
            geodesics &= ge;
            samples.push(row![n, i, seed, u8::from(*rt), u8::from(*ge), t]);
        }
        let ones: BTreeMap<DualEdge, f64> = WeightField::generate(rect, 0, Distribution::unit())?
            .edges()
            .map(|e| (DualEdge::crossing(e), 1.0))
            .collect();
        let mapped = ferromagnet_weight_map(&ones, rect)?;
        let reference = WeightField::generate(rect, 0, Distribution::unit())?;
        unit &= same_weights(&mapped, &reference)?;
    }
    report.assert_flag("round_trip", round_trip, "dual -> primal -> dual preserves every coupling bit for bit");
    report.assert_flag("geodesic_equal", geodesics, "geodesics on mapped and directly generated fields agree");
    report.assert_flag("unit_couplings", unit, "all couplings 1 give the unit-weight model");
    report.details = json!({ "geodesic_target": "(n, n/2)" });
    Ok(ExperimentOutput {
        report,
        samples,
        plot: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::passage_time;

    #[test]
    fn unit_couplings_give_l1_times() {
        let rect = Rect::square(3).unwrap();
        let ones = WeightField::generate(rect, 0, Distribution::unit())
            .unwrap()
            .edges()
            .map(|e| (DualEdge::crossing(e), 1.0))
            .collect();
        let f = ferromagnet_weight_map(&ones, rect).unwrap();
        let t = passage_time(&f, Point::new(-3, -1), Point::new(2, 3), Restriction::Full).unwrap();
        assert_eq!(t.as_f64(), 9.0);
    }

    #[test]
    fn missing_or_nonpositive_couplings_are_rejected() {
        let rect = Rect::square(1).unwrap();
        let f = WeightField::generate(rect, 3, Distribution::exponential(1.0).unwrap()).unwrap();
        let mut j = coupling_view(&f).unwrap();
        assert_eq!(j.len(), 12);
        let first = *j.keys().next().unwrap();
        j.insert(first, 0.0);
        assert!(ferromagnet_weight_map(&j, rect).is_err());
        j.remove(&first);
        assert!(ferromagnet_weight_map(&j, rect).is_err());
    }

    #[test]
    fn experiment_flags_hold() {
        let mut cfg = ExperimentConfig::default();
        cfg.n_values = vec![6];
        cfg.replicates = 5;
        let out = ferromagnet_experiment(&cfg).unwrap();
        assert!(out.report.violations().is_empty(), "{:?}", out.report.verdicts);
    }
}
