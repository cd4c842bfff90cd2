//! Two-source competition: which source reaches each site first, and the
//! dual-lattice interface between the two colonies.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use serde_json::json;

use super::config::ExperimentConfig;
use super::report::{ExperimentOutput, ExperimentReport, SampleTable, ScaleStat};
use super::scale_seed;
use crate::error::{FppError, Result};
use crate::geodesic::ShortestPaths;
use crate::lattice::{DualEdge, Point, Rect, Restriction};
use crate::par::try_replicate_map;
use crate::row;
use crate::stats::{MeanCi, Z95};
use crate::weights::WeightField;

/// Partition of a box between two sources.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Competition {
    pub sources: [Point; 2],
    pub rect: Rect,
    /// Winning source (0 or 1) per vertex, indexed by `Rect::index`.
    pub owner: Vec<u8>,
    /// Vertices with `T(x, v) == T(y, v)`; they go to the source that is
    /// smaller in `(y, x)` order.
    pub ties: usize,
    /// Dual edges crossing primal edges whose endpoints have different owners.
    pub interface: Vec<DualEdge>,
    /// Odd-degree dual vertices of the interface.
    pub ends: Vec<Point>,
}

impl Competition {
    pub fn owner_of(&self, p: Point) -> Option<u8> {
        self.rect.contains(p).then(|| self.owner[self.rect.index(p)])
    }

    pub fn cluster_size(&self, k: u8) -> usize {
        self.owner.iter().filter(|&&o| o == k).count()
    }

    /// Whether the sites owned by `k` form one connected set that contains
    /// source `k`.
    pub fn is_connected(&self, k: u8) -> bool {
        let src = self.sources[usize::from(k)];
        if self.owner_of(src) != Some(k) {
            return false;
        }
        let mut seen = vec![false; self.owner.len()];
        let mut queue = VecDeque::from([src]);
        seen[self.rect.index(src)] = true;
        let mut reached = 1;
        while let Some(p) = queue.pop_front() {
            for q in p.neighbors() {
                if self.owner_of(q) == Some(k) && !seen[self.rect.index(q)] {
                    seen[self.rect.index(q)] = true;
                    reached += 1;
                    queue.push_back(q);
                }
            }
        }
        reached == self.cluster_size(k)
    }

    /// Angles of the interface ends seen from the midpoint of the sources.
    pub fn end_angles(&self) -> Vec<f64> {
        let (mx, my) = (
            f64::from(self.sources[0].x + self.sources[1].x) / 2.0,
            f64::from(self.sources[0].y + self.sources[1].y) / 2.0,
        );
        self.ends
            .iter()
            .map(|&e| {
                let (x, y) = DualEdge::dual_coords(e);
                (y - my).atan2(x - mx).rem_euclid(std::f64::consts::TAU)
            })
            .collect()
    }
}

pub fn competition_partition(field: &WeightField, x: Point, y: Point) -> Result<Competition> {
    if x == y {
        return Err(FppError::InvalidParameter(format!("two distinct sources required, got {x} twice")));
    }
    let rect = *field.rect();
    let tx = ShortestPaths::from_source(field, x, Restriction::Full)?;
    let ty = ShortestPaths::from_source(field, y, Restriction::Full)?;
    let tie_winner = u8::from(y < x);
    let mut ties = 0;
    let owner: Vec<u8> = rect
        .points()
        .map(|p| {
            let (a, b) = (tx.time_to(p)?, ty.time_to(p)?);
            Ok(match a.cmp(&b) {
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Equal => {
                    ties += 1;
                    tie_winner
                }
            })
        })
        .collect::<Result<_>>()?;
    let mut interface = Vec::new();
    let mut degree: BTreeMap<Point, u32> = BTreeMap::new();
    for e in field.edges() {
        let (a, b) = e.endpoints();
        if owner[rect.index(a)] != owner[rect.index(b)] {
            let d = DualEdge::crossing(e);
            let (u, v) = d.endpoints();
            *degree.entry(u).or_default() += 1;
            *degree.entry(v).or_default() += 1;
            interface.push(d);
        }
    }
    let ends = degree.into_iter().filter(|&(_, k)| k % 2 == 1).map(|(p, _)| p).collect();
    Ok(Competition {
        sources: [x, y],
        rect,
        owner,
        ties,
        interface,
        ends,
    })
}

/// Runs [`competition_partition`] on `[-n, n]^2` for every `n`.
pub fn competition_interface(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let (x, y) = cfg.sources.unwrap_or((Point::new(-5, 0), Point::new(5, 0)));
    if x == y {
        return Err(FppError::Config("competition needs two distinct sources".into()));
    }
    let mut report = ExperimentReport::new("competition", cfg);
    let mut samples = SampleTable::new(&[
        "n", "replicate", "seed", "size_x", "size_y", "ties", "interface_len", "end_angles",
    ]);
    let (mut partition, mut connected) = (true, true);
    let mut tie_total = 0;
    for &n in &cfg.n_values {
        let rect = Rect::square(n)?;
        if !rect.contains(x) || !rect.contains(y) {
            return Err(FppError::Config(format!("sources {x}, {y} not inside [-{n}, {n}]^2")));
        }
        let runs = try_replicate_map(cfg.replicates, |i| {
            let seed = scale_seed(cfg.seed_base, n, i);
            let field = WeightField::generate(rect, seed, cfg.dist)?;
            Ok((seed, competition_partition(&field, x, y)?))
        })?;
        let mut lengths = Vec::with_capacity(runs.len());
        for (i, (seed, c)) in runs.iter().enumerate() {
            let (sx, sy) = (c.cluster_size(0), c.cluster_size(1));
            partition &= sx + sy == rect.num_vertices() && c.owner.len() == rect.num_vertices();
            connected &= c.is_connected(0) && c.is_connected(1);
            tie_total += c.ties;
            let angles: Vec<String> = c.end_angles().iter().map(f64::to_string).collect();
            samples.push(row![n, i, seed, sx, sy, c.ties, c.interface.len(), angles.join(";")]);
            lengths.push(c.interface.len() as f64);
        }
        let m = MeanCi::new(&lengths, Z95)?;
        report.stats.push(ScaleStat::from_mean(n, "interface_length", &m, 0.95));
    }
    report.assert_flag("partition", partition, "every box vertex in exactly one cluster");
    report.assert_flag("connected", connected, "both clusters connected and containing their source");
    report.details = json!({ "sources": [x, y], "ties_resolved": tie_total, "tie_rule": "smaller source in (y, x) order" });
    Ok(ExperimentOutput {
        report,
        samples,
        plot: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{Distribution, EdgeId};

    #[test]
    fn unit_weights_split_along_a_vertical_dual_line() {
        let f = WeightField::generate(Rect::square(2).unwrap(), 0, Distribution::unit()).unwrap();
        let c = competition_partition(&f, Point::ORIGIN, Point::new(1, 0)).unwrap();
        assert_eq!(c.ties, 0);
        let expect: Vec<DualEdge> = (-2..=2)
            .map(|j| DualEdge::crossing(EdgeId::between(Point::new(0, j), Point::new(1, j)).unwrap()))
            .collect();
        let mut got = c.interface.clone();
        got.sort();
        let mut want = expect;
        want.sort();
        assert_eq!(got, want);
        assert_eq!(c.ends, vec![Point::new(0, -3), Point::new(0, 2)]);
        assert!(c.is_connected(0) && c.is_connected(1));
        assert_eq!(c.cluster_size(0), 15);
    }

    #[test]
    fn ties_go_to_the_smaller_source() {
        let f = WeightField::generate(Rect::square(2).unwrap(), 0, Distribution::unit()).unwrap();
        let c = competition_partition(&f, Point::new(1, 0), Point::new(-1, 0)).unwrap();
        // the column x = 0 is equidistant; (-1, 0) < (1, 0) in (y, x) order
        assert_eq!(c.ties, 5);
        assert_eq!(c.owner_of(Point::new(0, 2)), Some(1));
        assert!(c.is_connected(0) && c.is_connected(1));
    }

    #[test]
    fn single_source_is_rejected() {
        let f = WeightField::generate(Rect::square(2).unwrap(), 0, Distribution::unit()).unwrap();
        assert!(competition_partition(&f, Point::ORIGIN, Point::ORIGIN).is_err());
    }

    #[test]
    fn exponential_clusters_partition_the_box() {
        let mut cfg = ExperimentConfig::default();
        cfg.n_values = vec![12];
        cfg.replicates = 8;
        let out = competition_interface(&cfg).unwrap();
        assert!(out.report.violations().is_empty(), "{:?}", out.report.verdicts);
        assert_eq!(out.samples.rows.len(), 8);
    }
}
