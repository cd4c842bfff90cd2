//! Time constant, limit shape and tangent lines.
//!
//! The direction `θ` is probed through the lattice point
//! `p = (⌊n cos θ⌋, ⌊n sin θ⌋)`, and the estimate `T(0, p) / |p|` is filed under
//! the realized direction `arg p`. Filing under `θ` itself would bias the
//! estimate by the rounding of `p`; filing under `arg p` makes unit weights
//! reproduce the L1 norm exactly. The grid covers `[0, π/2]` and the rest of
//! the circle follows from the lattice symmetries.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{FppError, Result};
use crate::geodesic::ShortestPaths;
use crate::lattice::{arg_of, Point, Rect, Restriction, SectorSpec};
use crate::par::try_replicate_map;
use crate::stats::{MeanCi, Z95};
use crate::weights::{replicate_seed, Distribution, WeightField};

/// Intervals of the default direction grid on `[0, π/2]` (65 directions,
/// so that `π/4` is on the grid).
pub const DEFAULT_GRID_INTERVALS: usize = 64;

/// Hull vertices turning by more than this are reported as corners.
pub const CORNER_TURN: f64 = 0.25;

/// Box used for shape estimation at scale `n`: room for geodesics to bulge
/// past the target.
pub fn shape_box(n: i32) -> Result<Rect> {
    if n < 1 {
        return Err(FppError::InvalidParameter(format!("scale must be >= 1, got {n}")));
    }
    Rect::square(n + (n / 4).max(2))
}

/// `⌊n w_θ⌋` componentwise.
pub fn lattice_target(theta: f64, n: i32) -> Point {
    let n = f64::from(n);
    Point::new((n * theta.cos()).floor() as i32, (n * theta.sin()).floor() as i32)
}

/// Targets for a grid of `intervals + 1` directions on `[0, π/2]`, exactly
/// symmetric under `(x, y) -> (y, x)`. Repeated lattice points are dropped.
pub fn grid_targets(n: i32, intervals: usize) -> Result<Vec<(f64, Point)>> {
    if intervals < 2 || n < 1 {
        return Err(FppError::InvalidParameter(format!(
            "need n >= 1 and at least 2 intervals, got n={n}, intervals={intervals}"
        )));
    }
    let step = FRAC_PI_2 / intervals as f64;
    let mut out: Vec<(f64, Point)> = Vec::with_capacity(intervals + 1);
    for i in 0..=intervals {
        let theta = i as f64 * step;
        let p = if 2 * i <= intervals {
            lattice_target(theta, n)
        } else {
            let q = lattice_target((intervals - i) as f64 * step, n);
            Point::new(q.y, q.x)
        };
        if p == Point::ORIGIN {
            return Err(FppError::InvalidParameter(format!("n = {n} too small for direction {theta}")));
        }
        if out.last().map(|&(_, q)| q) != Some(p) {
            out.push((theta, p));
        }
    }
    Ok(out)
}

/// One direction of a shape estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionEstimate {
    /// Nominal grid angle.
    pub theta: f64,
    /// `arg` of the lattice target; the estimate refers to this direction.
    pub direction: f64,
    pub target: Point,
    pub ghat: f64,
    /// 95% half-width.
    pub ci: f64,
    pub n: i32,
    pub replicates: usize,
}

/// `ĝ` on the first quadrant at one scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeEstimate {
    pub entries: Vec<DirectionEstimate>,
    pub n_used: i32,
    pub replicates: usize,
}

fn per_replicate_ratios(field: &WeightField, targets: &[Point]) -> Result<Vec<f64>> {
    let sp = ShortestPaths::until_settled(field, Point::ORIGIN, Restriction::Full, targets)?;
    targets
        .iter()
        .map(|&p| {
            let (x, y) = p.as_f64();
            Ok(sp.time_to(p)?.as_f64() / x.hypot(y))
        })
        .collect()
}

fn aggregate(grid: &[(f64, Point)], samples: &[Vec<f64>], n: i32) -> Result<Vec<DirectionEstimate>> {
    grid.iter()
        .enumerate()
        .map(|(j, &(theta, target))| {
            let column: Vec<f64> = samples.iter().map(|s| s[j]).collect();
            let m = MeanCi::new(&column, Z95)?;
            Ok(DirectionEstimate {
                theta,
                direction: arg_of(target)?,
                target,
                ghat: m.mean,
                ci: m.half_width,
                n,
                replicates: column.len(),
            })
        })
        .collect()
}

/// `ĝ(w_θ)` from `replicates` independent fields with seeds
/// `replicate_seed(seed_base, i)`.
pub fn estimate_g(
    dist: &Distribution,
    seed_base: u64,
    theta: f64,
    n: i32,
    replicates: usize,
) -> Result<DirectionEstimate> {
    if replicates < 2 {
        return Err(FppError::InvalidParameter("estimate_g needs at least 2 replicates".into()));
    }
    let rect = shape_box(n)?;
    let target = lattice_target(theta, n);
    if target == Point::ORIGIN {
        return Err(FppError::InvalidParameter(format!("n = {n} too small for direction {theta}")));
    }
    if !rect.contains(target) {
        return Err(FppError::OutOfDomain(target));
    }
    let samples = try_replicate_map(replicates, |i| {
        let field = WeightField::generate(rect, replicate_seed(seed_base, i as u64), *dist)?;
        per_replicate_ratios(&field, &[target])
    })?;
    let mut est = aggregate(&[(theta, target)], &samples, n)?;
    Ok(est.remove(0))
}

/// `ĝ` on the whole direction grid; one shortest-path tree per replicate.
pub fn estimate_shape(
    dist: &Distribution,
    seed_base: u64,
    n: i32,
    replicates: usize,
    intervals: usize,
) -> Result<ShapeEstimate> {
    if replicates < 2 {
        return Err(FppError::InvalidParameter("estimate_shape needs at least 2 replicates".into()));
    }
    let rect = shape_box(n)?;
    let grid = grid_targets(n, intervals)?;
    let targets: Vec<Point> = grid.iter().map(|&(_, p)| p).collect();
    let samples = try_replicate_map(replicates, |i| {
        let field = WeightField::generate(rect, replicate_seed(seed_base, i as u64), *dist)?;
        per_replicate_ratios(&field, &targets)
    })?;
    Ok(ShapeEstimate {
        entries: aggregate(&grid, &samples, n)?,
        n_used: n,
        replicates,
    })
}

/// A point `v̂_φ = w_φ / ĝ(w_φ)` of the estimated boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub angle: f64,
    pub point: [f64; 2],
    /// Relative half-width `ci / ĝ`.
    pub rel_ci: f64,
}

impl ShapeEstimate {
    /// Boundary points around the full circle, counter-clockwise from angle 0.
    pub fn boundary(&self) -> Vec<BoundaryPoint> {
        let quadrant: Vec<BoundaryPoint> = self
            .entries
            .iter()
            .map(|e| {
                let (x, y) = e.target.as_f64();
                let r = x.hypot(y) * e.ghat;
                BoundaryPoint {
                    angle: e.direction,
                    point: [x / r, y / r],
                    rel_ci: e.ci / e.ghat,
                }
            })
            .collect();
        let mut out = Vec::with_capacity(4 * quadrant.len());
        let mirrors: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
        for (k, &(sx, sy)) in mirrors.iter().enumerate() {
            // odd quadrants run the first-quadrant list backwards
            let ordered: Vec<&BoundaryPoint> = if k % 2 == 0 {
                quadrant.iter().collect()
            } else {
                quadrant.iter().rev().collect()
            };
            for b in ordered {
                let point = [sx * b.point[0], sy * b.point[1]];
                let angle = point[1].atan2(point[0]).rem_euclid(TAU);
                let dup = out.last().is_some_and(|l: &BoundaryPoint| l.point == point);
                if !dup {
                    out.push(BoundaryPoint {
                        angle,
                        point,
                        rel_ci: b.rel_ci,
                    });
                }
            }
        }
        if out.len() > 1 && out.first().map(|b| b.point) == out.last().map(|b| b.point) {
            out.pop();
        }
        out
    }

    /// CSV with columns `theta,ghat,ci,n,replicates`; `theta` is the realized
    /// direction.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,ghat,ci,n,replicates\n");
        for e in &self.entries {
            let _ = writeln!(s, "{},{},{},{},{}", e.direction, e.ghat, e.ci, e.n, e.replicates);
        }
        s
    }
}

/// Estimated boundary points, counter-clockwise over the full circle.
pub fn shape_points(estimate: &ShapeEstimate) -> Vec<[f64; 2]> {
    estimate.boundary().into_iter().map(|b| b.point).collect()
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull, counter-clockwise, without (numerically) collinear vertices.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let scale = pts.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    let eps = 1e-12 * scale * scale;
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= eps {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// A supporting line `{r : r·ρ = 1}` and the directions that touch it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentLine {
    pub rho: [f64; 2],
    /// Maximal grid interval around `θ` with `|v̂_φ·ρ − 1| ≤ tol`. Not
    /// validated as a [`SectorSpec`]: a flat face may run into an axis.
    pub contact_sector: SectorSpec,
    /// `v̂_θ` is a hull vertex where the boundary turns sharply, so the
    /// supporting line is not unique.
    pub degenerate: bool,
    pub tol: f64,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Normal `ρ` of the line through `a` and `b` with `ρ·a = ρ·b = 1`.
fn line_dual(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let c = a[0] * b[1] - a[1] * b[0];
    [(b[1] - a[1]) / c, (a[0] - b[0]) / c]
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Supporting line of the estimated shape at the grid direction nearest `θ`.
///
/// `tol = None` uses `2 ci / ĝ` at that direction (at least `1e-9`).
pub fn fit_tangent(estimate: &ShapeEstimate, theta: f64, tol: Option<f64>) -> Result<TangentLine> {
    let circle = estimate.boundary();
    let pts: Vec<[f64; 2]> = circle.iter().map(|b| b.point).collect();
    let hull = convex_hull(&pts);
    if hull.len() < 3 {
        return Err(FppError::InsufficientData(format!("hull has {} vertices", hull.len())));
    }
    let i0 = (0..circle.len())
        .min_by(|&a, &b| angle_dist(circle[a].angle, theta).total_cmp(&angle_dist(circle[b].angle, theta)))
        .expect("non-empty circle");
    let v = circle[i0].point;
    let tol = tol.unwrap_or((2.0 * circle[i0].rel_ci).max(1e-9));
    if !(tol >= 0.0) {
        return Err(FppError::InvalidParameter(format!("tol = {tol}")));
    }

    let h = hull.len();
    let scale = dot(v, v).sqrt();
    let (rho, degenerate) = match hull.iter().position(|&q| (q[0] - v[0]).hypot(q[1] - v[1]) <= 1e-12 * scale) {
        Some(k) => {
            let prev = hull[(k + h - 1) % h];
            let next = hull[(k + 1) % h];
            let d = [next[0] - prev[0], next[1] - prev[1]];
            let normal = [d[1], -d[0]];
            let s = dot(normal, v);
            let e1 = [v[0] - prev[0], v[1] - prev[1]];
            let e2 = [next[0] - v[0], next[1] - v[1]];
            let turn = (e1[0] * e2[1] - e1[1] * e2[0]).atan2(dot(e1, e2)).abs();
            ([normal[0] / s, normal[1] / s], turn > CORNER_TURN)
        }
        None => {
            // edge hit by the ray through v
            let k = (0..h)
                .find(|&k| {
                    let a = hull[k];
                    let b = hull[(k + 1) % h];
                    let o = [0.0, 0.0];
                    cross(o, a, v) >= 0.0 && cross(o, v, b) >= 0.0
                })
                .ok_or_else(|| FppError::InsufficientData("hull does not surround the origin".into()))?;
            (line_dual(hull[k], hull[(k + 1) % h]), false)
        }
    };

    let touches = |i: usize| (dot(rho, circle[i].point) - 1.0).abs() <= tol;
    let m = circle.len();
    let (mut lo, mut hi) = (0usize, 0usize);
    while lo + 1 < m && touches((i0 + m - lo - 1) % m) {
        lo += 1;
    }
    while hi + lo + 1 < m && touches((i0 + hi + 1) % m) {
        hi += 1;
    }
    let span = |steps: usize, forward: bool| -> f64 {
        let mut total = 0.0;
        let mut i = i0;
        for _ in 0..steps {
            let j = if forward { (i + 1) % m } else { (i + m - 1) % m };
            total += angle_dist(circle[i].angle, circle[j].angle);
            i = j;
        }
        total
    };
    let theta0 = circle[i0].angle;
    let contact_sector = SectorSpec {
        theta: theta0,
        theta1: theta0 - span(lo, false),
        theta2: theta0 + span(hi, true),
    };
    Ok(TangentLine {
        rho,
        contact_sector,
        degenerate,
        tol,
    })
}

/// Polar plot of the estimated boundary.
pub fn shape_svg(estimate: &ShapeEstimate) -> String {
    let pts = shape_points(estimate);
    let r = pts.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max).max(1e-9);
    let size = 480.0;
    let c = size / 2.0;
    let k = 0.45 * size / r;
    let map = |p: [f64; 2]| (c + k * p[0], c - k * p[1]);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    let _ = writeln!(
        s,
        r##"<line x1="0" y1="{c}" x2="{size}" y2="{c}" stroke="#bbb"/><line x1="{c}" y1="0" x2="{c}" y2="{size}" stroke="#bbb"/>"##
    );
    let mut poly = String::new();
    for &p in &pts {
        let (x, y) = map(p);
        let _ = write!(poly, "{x:.3},{y:.3} ");
    }
    let _ = writeln!(
        s,
        r##"<polygon points="{}" fill="#3a6ea533" stroke="#3a6ea5" stroke-width="1.5"/>"##,
        poly.trim_end()
    );
    for &p in &pts {
        let (x, y) = map(p);
        let _ = writeln!(s, r##"<circle cx="{x:.3}" cy="{y:.3}" r="1.8" fill="#1d3557"/>"##);
    }
    let _ = writeln!(
        s,
        r##"<text x="8" y="18" font-family="sans-serif" font-size="13">n = {}, replicates = {}, max |v| = {:.4}</text>"##,
        estimate.n_used,
        estimate.replicates,
        r
    );
    s.push_str("</svg>\n");
    s
}
