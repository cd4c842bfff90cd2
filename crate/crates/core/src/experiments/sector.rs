//! Experiments on sector-directed objects: `Δ_H`, geodesic ordering, Busemann
//! invariants and backward clusters.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde_json::json;

use super::config::{ExperimentConfig, SectorChoice};
use super::report::{ExperimentOutput, ExperimentReport, SampleTable, ScaleStat};
use super::{scale_seed, sector_box};
use crate::busemann::{fit_rho_points, halfplane_monotone_check, halfplane_pair, sample_from_trees, BusemannSample, BusemannSide};
use crate::error::{FppError, Result};
use crate::geodesic::ShortestPaths;
use crate::lattice::{Point, Rect, Restriction};
use crate::order::{backward_cluster, coalescence_point, compare_by, duality_check, extremal_proxy, flip_diagnostics, stable_range, Criterion, Relation, Side};
use crate::par::try_replicate_map;
use crate::row;
use crate::stats::{normal_quantile, MeanCi, Proportion, Z95};
use crate::weights::{Time, WeightField};

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn require_inside(rect: &Rect, points: &[Point]) -> Result<()> {
    match points.iter().find(|p| !rect.contains(**p)) {
        Some(p) => Err(FppError::Config(format!("{p} lies outside the box {rect:?}"))),
        None => Ok(()),
    }
}

/// `Δ̂_H(x, y)` with x, y defaulting to `0` and `e1`.
pub fn delta_h_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let choice = cfg.sector_or(SectorChoice::Lattice { k: 1 });
    let x = cfg.x.unwrap_or(Point::ORIGIN);
    let y = cfg.y.unwrap_or(Point::new(1, 0));
    if x.y < 0 || y.y < 0 || x == y {
        return Err(FppError::Config(format!("need distinct x, y with y-coordinate >= 0, got {x}, {y}")));
    }
    let z99 = normal_quantile(0.995)?;
    let mut report = ExperimentReport::new("delta-h", cfg);
    let mut samples = SampleTable::new(&["n_target", "replicate", "seed", "converged", "delta", "left", "right"]);
    let mut per_n = Vec::new();
    for &n in &cfg.n_values {
        let sector = choice.at(n)?;
        let rect = sector_box(n, 0)?;
        require_inside(&rect, &[x, y])?;
        let runs = try_replicate_map(cfg.replicates, |i| {
            let seed = scale_seed(cfg.seed_base, n, i);
            let field = WeightField::generate(rect, seed, cfg.dist)?;
            let (l, r) = halfplane_pair(&field, x, y, &sector, n)?;
            Ok((seed, l.converged_value, r.converged_value))
        })?;
        let mut values = Vec::new();
        for (i, &(seed, l, r)) in runs.iter().enumerate() {
            let d = l.zip(r).map(|(l, r)| l - r);
            if let Some(d) = d {
                values.push(d.as_f64());
            }
            samples.push(row![
                n,
                i,
                seed,
                u8::from(d.is_some()),
                opt(d.map(Time::as_f64)),
                opt(l.map(Time::as_f64)),
                opt(r.map(Time::as_f64))
            ]);
        }
        let positive = values.iter().filter(|&&v| v > 0.0).count();
        let zeros = values.iter().filter(|&&v| v == 0.0).count();
        if values.is_empty() {
            report.report_flag(&format!("mean_nonpositive_3sigma_n{n}"), false, "no converged replicate");
            report.report_flag(&format!("ci99_contains_zero_n{n}"), false, "no converged replicate");
            per_n.push(json!({ "n_target": n, "converged": 0 }));
            continue;
        }
        let m = MeanCi::new(&values, z99)?;
        report.stats.push(ScaleStat::from_mean(n, "delta_h", &m, 0.99));
        report.report_flag(
            &format!("mean_nonpositive_3sigma_n{n}"),
            m.mean <= 3.0 * m.std_error(),
            format!("mean {} vs 3 se {}", m.mean, 3.0 * m.std_error()),
        );
        report.report_flag(
            &format!("ci99_contains_zero_n{n}"),
            m.contains(0.0),
            format!("[{}, {}]", m.lower(), m.upper()),
        );
        report.report_flag(
            &format!("no_positive_values_n{n}"),
            positive == 0,
            format!("{positive} of {} converged values are positive", values.len()),
        );
        per_n.push(json!({
            "n_target": n,
            "converged": values.len(),
            "unconverged": cfg.replicates - values.len(),
            "positive": positive,
            "zero": zeros,
            "std_error": m.std_error(),
        }));
    }
    report.details = json!({ "x": x, "y": y, "sector": choice, "per_n": per_n });
    Ok(ExperimentOutput {
        report,
        samples,
        plot: None,
    })
}

/// Pairs of long proxies compared on the stable range. Even replicates pair
/// the L-proxy from `0` with the R-proxy from `d e1`, odd ones two L-proxies.
pub fn ordering_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let choice = cfg.sector_or(SectorChoice::Angles {
        theta: FRAC_PI_2,
        theta1: FRAC_PI_4,
        theta2: 3.0 * FRAC_PI_4,
    });
    let d = cfg.separations.first().copied().unwrap_or(4);
    let mut report = ExperimentReport::new("ordering", cfg);
    let mut samples = SampleTable::new(&[
        "n_target",
        "replicate",
        "seed",
        "pair",
        "relation",
        "first_stable_line",
        "rightmost_relation",
        "duality_agrees",
        "first_intersection_relation",
        "flips",
        "flips_touching_l0",
    ]);
    let (mut all_agree, mut all_touch) = (true, true);
    for &n in &cfg.n_values {
        let sector = choice.at(n)?;
        let rect = sector_box(n, d)?;
        let (lo, hi) = stable_range(n);
        if lo < 1 {
            return Err(FppError::Config(format!("n_target {n} too small for a stable range")));
        }
        let runs = try_replicate_map(cfg.replicates, |i| {
            let seed = scale_seed(cfg.seed_base, n, i);
            let field = WeightField::generate(rect, seed, cfg.dist)?;
            let second = if i % 2 == 0 { Side::R } else { Side::L };
            let g1 = extremal_proxy(&field, Point::ORIGIN, Side::L, &sector, n, Restriction::Full)?;
            let g2 = extremal_proxy(&field, Point::new(d, 0), second, &sector, n, Restriction::Full)?;
            let dual = duality_check(&g1.path, &g2.path, lo, hi)?;
            let first = compare_by(&g1.path, &g2.path, lo, hi, Criterion::First)?;
            let flips = flip_diagnostics(&g1.path, &g2.path, lo, hi)?;
            Ok((seed, second, dual, first, flips))
        })?;
        let (mut determinate, mut agree, mut first_agree) = (0, 0, 0);
        let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, (seed, second, dual, first, flips)) in runs.iter().enumerate() {
            let rel = dual.leftmost.relation;
            *kinds.entry(rel.as_str()).or_default() += 1;
            if rel.is_determinate() {
                determinate += 1;
                agree += usize::from(dual.agrees());
                first_agree += usize::from(first.relation == rel);
            }
            let touching = flips.iter().filter(|f| f.touches_l0).count();
            all_touch &= touching == flips.len();
            samples.push(row![
                n,
                i,
                seed,
                format!("L-{}", second.as_str()),
                rel.as_str(),
                opt(dual.leftmost.first_stable_line),
                dual.rightmost.relation.as_str(),
                u8::from(dual.agrees()),
                first.relation.as_str(),
                flips.len(),
                touching
            ]);
        }
        let p = Proportion::wilson(determinate, cfg.replicates, Z95)?;
        report.stats.push(ScaleStat::from_proportion(n, "p_determinate", &p, 0.95));
        if determinate > 0 {
            let a = Proportion::wilson(agree, determinate, Z95)?;
            report.stats.push(ScaleStat::from_proportion(n, "p_duality_agrees", &a, 0.95));
            let f = Proportion::wilson(first_agree, determinate, Z95)?;
            report.stats.push(ScaleStat::from_proportion(n, "p_first_intersection_agrees", &f, 0.95));
        }
        all_agree &= agree == determinate;
        report.report_flag(
            &format!("determinate_95_n{n}"),
            p.estimate >= 0.95,
            format!("{determinate} of {} determinate on [{lo}, {hi}]", cfg.replicates),
        );
        report.details[format!("relations_n{n}")] = json!(kinds);
    }
    report.report_flag("duality_agrees", all_agree, "right-most reading reverses every determinate verdict");
    report.report_flag("flips_touch_l0", all_touch, "every strict flip is separated by a visit to L_0");
    report.details["sector"] = json!(choice);
    report.details["separation"] = json!(d);
    report.details["stable_range"] = json!("[n_target / 4, n_target / 2]");
    report.details["relation_names"] = json!([
        Relation::LeftPrecedes.as_str(),
        Relation::RightPrecedes.as_str(),
        Relation::Coalesced.as_str()
    ]);
    Ok(ExperimentOutput {
        report,
        samples,
        plot: None,
    })
}

/// Tallies of exact Busemann identities over converged samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
struct Tally {
    checked: usize,
    failed: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.checked += 1;
        self.failed += usize::from(!ok);
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.failed += other.failed;
    }
}

#[derive(Clone, Debug, Default)]
struct BusemannReplicate {
    seed: u64,
    samples: Vec<BusemannSample>,
    antisymmetry: Tally,
    additivity: Tally,
    bound: Tally,
    monotone: Tally,
    anchor_invariance: Tally,
}

fn probe_points(cfg: &ExperimentConfig) -> Vec<Point> {
    let (x0, x1) = cfg.probe_x.unwrap_or((-2, 2));
    let (y0, y1) = cfg.probe_y.unwrap_or((0, 2));
    let mut out = Vec::new();
    for y in y0.max(0)..=y1 {
        for x in x0..=x1 {
            let p = Point::new(x, y);
            if p != Point::ORIGIN {
                out.push(p);
            }
        }
    }
    out
}

fn busemann_replicate(field: &WeightField, sector: &crate::lattice::SectorSpec, n: i32, probes: &[Point]) -> Result<BusemannReplicate> {
    let r = Restriction::HalfPlane;
    let left = extremal_proxy(field, Point::ORIGIN, Side::L, sector, n, r)?;
    let right = extremal_proxy(field, Point::ORIGIN, Side::R, sector, n, r)?;
    let alt_start = Point::new(probes.iter().map(|p| p.x).max().unwrap_or(0) + 2, 0);
    let alt = extremal_proxy(field, alt_start, Side::L, sector, n, r)?;
    let mut anchors: Vec<Point> = left.path.vertices.clone();
    anchors.extend(&right.path.vertices);
    anchors.extend(&alt.path.vertices);
    anchors.sort();
    anchors.dedup();

    let mut settle = anchors.clone();
    settle.extend(probes);
    let root = ShortestPaths::until_settled(field, Point::ORIGIN, r, &settle)?;
    let trees = probes
        .iter()
        .map(|&p| ShortestPaths::until_settled(field, p, r, &anchors))
        .collect::<Result<Vec<_>>>()?;
    let mut rep = BusemannReplicate::default();
    for (proxy, side) in [(&left, BusemannSide::L), (&right, BusemannSide::R)] {
        let a = &proxy.path.vertices;
        let forward = trees
            .iter()
            .map(|t| sample_from_trees(&root, t, a, side))
            .collect::<Result<Vec<_>>>()?;
        for (j, t) in trees.iter().enumerate() {
            let fwd = &forward[j];
            let back = sample_from_trees(t, &root, a, side)?;
            // T(p, y_n) − T(0, y_n) along the proxy from 0 is nonincreasing
            rep.monotone.record(back.values.windows(2).all(|w| w[1] <= w[0]));
            if let (Some(u), Some(v)) = (fwd.converged_value, back.converged_value) {
                rep.antisymmetry.record(u == -v);
            }
            if let Some(u) = fwd.converged_value {
                rep.bound.record(u.abs() <= root.time_to(t.source())?);
            }
            if let Some(next) = trees.get(j + 1) {
                let step = sample_from_trees(t, next, a, side)?;
                if let (Some(u), Some(v), Some(w)) = (fwd.converged_value, step.converged_value, forward[j + 1].converged_value) {
                    rep.additivity.record(u + v == w);
                }
            }
        }
        if side == BusemannSide::L {
            // library check on the first probe must see the same sequence
            let w = halfplane_monotone_check(field, trees[0].source(), Point::ORIGIN, proxy)?;
            let back = sample_from_trees(&trees[0], &root, a, side)?;
            rep.monotone.record(w.monotone && w.values == back.values);
            if coalescence_point(&proxy.path, &alt.path).is_some() {
                for (j, t) in trees.iter().enumerate() {
                    let other = sample_from_trees(&root, t, &alt.path.vertices, side)?;
                    if let (Some(u), Some(v)) = (forward[j].converged_value, other.converged_value) {
                        rep.anchor_invariance.record(u == v);
                    }
                }
            }
        }
        rep.samples.extend(forward);
    }
    Ok(rep)
}

/// Exact Busemann identities on every converged sample, and a fit of `ρ`
/// from the mean L-side values over the probe grid.
pub fn busemann_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let choice = cfg.sector_or(SectorChoice::Lattice { k: 1 });
    let probes = probe_points(cfg);
    if probes.len() < 3 {
        return Err(FppError::Config("need at least 3 probes in the upper half-plane".into()));
    }
    let mut report = ExperimentReport::new("busemann", cfg);
    let mut samples = SampleTable::new(&[
        "n_target",
        "seed",
        "x",
        "y",
        "side",
        "restriction",
        "value",
        "converged_at_anchor_index",
    ]);
    let mut totals: BTreeMap<&str, Tally> = BTreeMap::new();
    let mut fits = Vec::new();
    for &n in &cfg.n_values {
        let sector = choice.at(n)?;
        let rect = sector_box(n, 0)?;
        require_inside(&rect, &probes)?;
        let reps = try_replicate_map(cfg.replicates, |i| {
            let seed = scale_seed(cfg.seed_base, n, i);
            let field = WeightField::generate(rect, seed, cfg.dist)?;
            let mut rep = busemann_replicate(&field, &sector, n, &probes)?;
            rep.seed = seed;
            Ok(rep)
        })?;
        let mut sums: BTreeMap<Point, Vec<f64>> = BTreeMap::new();
        let mut converged = 0;
        for rep in &reps {
            for (name, t) in [
                ("antisymmetry", rep.antisymmetry),
                ("additivity", rep.additivity),
                ("bound", rep.bound),
                ("monotone", rep.monotone),
                ("anchor_invariance", rep.anchor_invariance),
            ] {
                totals.entry(name).or_default().merge(t);
            }
            for s in &rep.samples {
                samples.push(row![
                    n,
                    rep.seed,
                    s.x,
                    s.y,
                    s.side.as_str(),
                    s.restriction.as_str(),
                    opt(s.converged_value.map(Time::as_f64)),
                    opt(s.converged_at)
                ]);
                if let Some(v) = s.converged_value {
                    converged += 1;
                    if s.side == BusemannSide::L {
                        sums.entry(s.y).or_default().push(v.as_f64());
                    }
                }
            }
        }
        let total = reps.iter().map(|r| r.samples.len()).sum::<usize>();
        let c = Proportion::wilson(converged, total.max(1), Z95)?;
        report.stats.push(ScaleStat::from_proportion(n, "p_converged", &c, 0.95));
        let pts: Vec<([f64; 2], f64)> = sums
            .iter()
            .map(|(p, v)| ([f64::from(p.x), f64::from(p.y)], v.iter().sum::<f64>() / v.len() as f64))
            .collect();
        if let Some(e1) = sums.get(&Point::new(1, 0)) {
            let m = MeanCi::new(e1, Z95)?;
            report.stats.push(ScaleStat::from_mean(n, "busemann_L_0_e1", &m, 0.95));
        }
        match fit_rho_points(&pts) {
            Ok(f) => fits.push(json!({ "n_target": n, "fit": f })),
            Err(e) => fits.push(json!({ "n_target": n, "error": e.to_string() })),
        }
    }
    for (name, t) in &totals {
        report.assert_flag(name, t.failed == 0, format!("{} of {} checks failed", t.failed, t.checked));
    }
    report.details = json!({ "sector": choice, "probes": probes, "checks": totals, "rho": fits, "restriction": "half-plane" });
    Ok(ExperimentOutput {
        report,
        samples,
        plot: None,
    })
}

/// Sizes of the finite backward cluster `C_x ∩ U` with
/// `U = [-20, 20] x [-10, 0]` unless configured.
pub fn backward_cluster_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let choice = cfg.sector_or(SectorChoice::Lattice { k: 0 });
    let x = cfg.x.unwrap_or(Point::ORIGIN);
    let (x0, x1) = cfg.probe_x.unwrap_or((-20, 20));
    let (y0, y1) = cfg.probe_y.unwrap_or((-10, 0));
    let u = Rect::new(x0, x1, y0, y1)?;
    if !u.contains(x) {
        return Err(FppError::Config(format!("{x} is not in the probe window")));
    }
    let probes: Vec<Point> = u.points().collect();
    let mut report = ExperimentReport::new("backward-cluster", cfg);
    let mut samples = SampleTable::new(&["n_target", "replicate", "seed", "size", "touches_window_edge"]);
    let mut histograms = serde_json::Map::new();
    let mut contains_x = true;
    for &n in &cfg.n_values {
        let sector = choice.at(n)?;
        let rect = sector_box(n, 0)?;
        require_inside(&rect, &[Point::new(x0, y0), Point::new(x1, y1)])?;
        let runs = try_replicate_map(cfg.replicates, |i| {
            let seed = scale_seed(cfg.seed_base, n, i);
            let field = WeightField::generate(rect, seed, cfg.dist)?;
            let c = backward_cluster(&field, x, &probes, Side::L, &sector, n, Restriction::Full)?;
            let edge = c.iter().any(|&p| u.boundary_distance(p) == 0 && p.y != y1);
            Ok((seed, c.contains(&x), c.len(), edge))
        })?;
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        let mut sizes = Vec::with_capacity(runs.len());
        for (i, &(seed, has_x, size, edge)) in runs.iter().enumerate() {
            contains_x &= has_x;
            *hist.entry(size).or_default() += 1;
            sizes.push(size as f64);
            samples.push(row![n, i, seed, size, u8::from(edge)]);
        }
        let m = MeanCi::new(&sizes, Z95)?;
        report.stats.push(ScaleStat::from_mean(n, "cluster_size", &m, 0.95));
        let e = runs.iter().filter(|r| r.3).count();
        let p = Proportion::wilson(e, cfg.replicates, Z95)?;
        report.stats.push(ScaleStat::from_proportion(n, "p_touches_window_edge", &p, 0.95));
        histograms.insert(format!("n{n}"), json!(hist));
    }
    report.assert_flag("contains_x", contains_x, "x lies on its own proxy path");
    report.details = json!({ "x": x, "window": [x0, x1, y0, y1], "sector": choice, "histograms": histograms });
    Ok(ExperimentOutput {
        report,
        samples,
        plot: None,
    })
}
