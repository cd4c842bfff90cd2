//! Ordering of geodesics, extremal-geodesic proxies, coalescence and
//! backward clusters.
//!
//! `g1 ≺ g2` means that on the lines inspected, the left-most intersection of
//! `g2` is weakly left of that of `g1`. Infinite objects are replaced by finite
//! proxies: the extremal geodesic `Γ_x^L` from `x` becomes the geodesic to the
//! left-most point of the sector arc on a far line `L_{n_target}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{FppError, Result};
use crate::geodesic::{geodesic_tree, Geodesic, ShortestPaths};
use crate::lattice::{sector_arc, Point, Restriction, SectorSpec};
use crate::weights::WeightField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `g1 ≺ g2`: `g2` is weakly left of `g1` on every inspected line.
    LeftPrecedes,
    /// `g2 ≺ g1`.
    RightPrecedes,
    Coalesced,
    Undetermined,
}

impl Relation {
    pub fn is_determinate(self) -> bool {
        self != Relation::Undetermined
    }

    /// The verdict with the roles of the two paths exchanged.
    pub fn reversed(self) -> Relation {
        match self {
            Relation::LeftPrecedes => Relation::RightPrecedes,
            Relation::RightPrecedes => Relation::LeftPrecedes,
            r => r,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::LeftPrecedes => "left-precedes",
            Relation::RightPrecedes => "right-precedes",
            Relation::Coalesced => "coalesced",
            Relation::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub relation: Relation,
    /// Smallest `m` such that the relation is already determinate on
    /// `[m, n_hi]`; `None` if even `[n_hi, n_hi]` is undetermined.
    pub first_stable_line: Option<i32>,
}

/// Which intersection of a path with `L_n` represents it on that line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Leftmost,
    /// Reads the order through right-most intersections, mirrored so that
    /// `LeftPrecedes` means `g2`'s right-most point is weakly right of `g1`'s.
    /// On non-crossing paths it reverses the left-most order.
    Rightmost,
    /// First intersection in path order.
    First,
}

fn representative(g: &Geodesic, n: i32, c: Criterion) -> Result<i32> {
    let p = match c {
        Criterion::Leftmost => g.leftmost_on_line(n),
        Criterion::Rightmost => g.rightmost_on_line(n),
        Criterion::First => g.first_on_line(n),
    };
    p.map(|p| p.x).ok_or(FppError::RangeError(n))
}

/// Whether the two paths share a common final segment containing every
/// vertex of either path on or above `L_{n_hi}`.
pub fn coalesced_below(g1: &Geodesic, g2: &Geodesic, n_hi: i32) -> bool {
    let k = common_suffix_len(&g1.vertices, &g2.vertices);
    if k == 0 {
        return false;
    }
    let below = |v: &[Point]| v[..v.len() - k].iter().all(|p| p.y < n_hi);
    below(&g1.vertices) && below(&g2.vertices)
}

fn common_suffix_len(a: &[Point], b: &[Point]) -> usize {
    a.iter().rev().zip(b.iter().rev()).take_while(|(p, q)| p == q).count()
}

fn relation_of(signs: &[i32], coalesced: bool) -> Relation {
    if coalesced {
        return Relation::Coalesced;
    }
    let neg = signs.iter().any(|&s| s < 0);
    let pos = signs.iter().any(|&s| s > 0);
    match (neg, pos) {
        (true, false) => Relation::LeftPrecedes,
        (false, true) => Relation::RightPrecedes,
        _ => Relation::Undetermined,
    }
}

/// Order two paths by the chosen representative on `L_{n_lo}, ..., L_{n_hi}`.
pub fn compare_by(g1: &Geodesic, g2: &Geodesic, n_lo: i32, n_hi: i32, criterion: Criterion) -> Result<OrderVerdict> {
    if n_lo > n_hi {
        return Err(FppError::InvalidParameter(format!("empty line range [{n_lo}, {n_hi}]")));
    }
    let mut signs = Vec::with_capacity((n_hi - n_lo + 1) as usize);
    for n in n_lo..=n_hi {
        let (a, b) = (representative(g1, n, criterion)?, representative(g2, n, criterion)?);
        let d = (b - a).signum();
        signs.push(if criterion == Criterion::Rightmost { -d } else { d });
    }
    let coalesced = coalesced_below(g1, g2, n_hi);
    let relation = relation_of(&signs, coalesced);
    let first_stable_line = if relation.is_determinate() {
        // walk down from n_hi while the suffix verdict stays the same
        let mut m = signs.len();
        while m > 0 {
            let r = relation_of(&signs[m - 1..], false);
            let ok = match relation {
                Relation::Coalesced => signs[m - 1] == 0,
                _ => r == relation || (r == Relation::Undetermined && signs[m - 1..].iter().all(|&s| s == 0)),
            };
            if !ok {
                break;
            }
            m -= 1;
        }
        Some(n_lo + m as i32).filter(|&l| l <= n_hi).or(Some(n_hi))
    } else {
        (0..signs.len())
            .find(|&m| relation_of(&signs[m..], false).is_determinate())
            .map(|m| n_lo + m as i32)
    };
    Ok(OrderVerdict {
        relation,
        first_stable_line,
    })
}

/// `g1 ≺ g2` on `[n_lo, n_hi]` through left-most intersections.
pub fn compare(g1: &Geodesic, g2: &Geodesic, n_lo: i32, n_hi: i32) -> Result<OrderVerdict> {
    compare_by(g1, g2, n_lo, n_hi, Criterion::Leftmost)
}

/// Default stable range `[n_target/4, n_target/2]`.
pub fn stable_range(n_target: i32) -> (i32, i32) {
    (n_target / 4, n_target / 2)
}

/// Left-most and right-most verdicts side by side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityCheck {
    pub leftmost: OrderVerdict,
    /// Verdict of the right-most order, in its own terms.
    pub rightmost: OrderVerdict,
}

impl DualityCheck {
    /// The right-most order reverses a determinate, non-coalesced left-most
    /// verdict; coalescence is seen by both.
    pub fn agrees(&self) -> bool {
        match self.leftmost.relation {
            Relation::Undetermined => true,
            Relation::Coalesced => self.rightmost.relation == Relation::Coalesced,
            r => self.rightmost.relation == r.reversed(),
        }
    }
}

/// Compare through both left-most and right-most intersections.
pub fn duality_check(g1: &Geodesic, g2: &Geodesic, n_lo: i32, n_hi: i32) -> Result<DualityCheck> {
    Ok(DualityCheck {
        leftmost: compare(g1, g2, n_lo, n_hi)?,
        rightmost: compare_by(g1, g2, n_lo, n_hi, Criterion::Rightmost)?,
    })
}

/// A strict flip of the left-most order between two lines, and whether one of
/// the paths returns to `L_0` in between.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipDiagnostic {
    pub n: i32,
    pub n_prime: i32,
    pub touches_l0: bool,
}

fn touches_l0_between(g: &Geodesic, n: i32, n_prime: i32) -> Result<bool> {
    let a = g.leftmost_on_line(n).ok_or(FppError::RangeError(n))?;
    let b = g.leftmost_on_line(n_prime).ok_or(FppError::RangeError(n_prime))?;
    let (i, j) = (g.position(a).expect("on path"), g.position(b).expect("on path"));
    let (i, j) = (i.min(j), i.max(j));
    Ok(g.vertices[i..=j].iter().any(|p| p.y == 0))
}

/// For every pair of consecutive strict sign changes of the left-most order
/// on `[n_lo, n_hi]`, whether either path touches `L_0` between them. Flips
/// of infinite geodesics from a common start always do.
pub fn flip_diagnostics(g1: &Geodesic, g2: &Geodesic, n_lo: i32, n_hi: i32) -> Result<Vec<FlipDiagnostic>> {
    let mut last: Option<(i32, i32)> = None;
    let mut out = Vec::new();
    for n in n_lo..=n_hi {
        let s = (representative(g2, n, Criterion::Leftmost)? - representative(g1, n, Criterion::Leftmost)?).signum();
        if s == 0 {
            continue;
        }
        if let Some((m, t)) = last {
            if t != s {
                out.push(FlipDiagnostic {
                    n: m,
                    n_prime: n,
                    touches_l0: touches_l0_between(g1, m, n)? || touches_l0_between(g2, m, n)?,
                });
            }
        }
        last = Some((n, s));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::L => "L",
            Side::R => "R",
        }
    }
}

/// Finite stand-in for `Γ_x^L` or `Γ_x^R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalProxy {
    pub side: Side,
    pub start: Point,
    pub path: Geodesic,
    pub n_target: i32,
    pub sector: SectorSpec,
    pub restriction: Restriction,
}

impl ExtremalProxy {
    pub fn target(&self) -> Point {
        self.path.end()
    }
}

/// The left-most (L) or right-most (R) point of the sector arc on
/// `L_{n_target}` inside the field's box.
pub fn proxy_target(field: &WeightField, side: Side, sector: &SectorSpec, n_target: i32) -> Result<Point> {
    let arc = sector_arc(sector, n_target, 0.0, field.rect())?;
    let p = match side {
        Side::L => arc.first(),
        Side::R => arc.last(),
    };
    p.copied().ok_or(FppError::InsufficientBox { line: n_target })
}

pub fn extremal_proxy(
    field: &WeightField,
    x: Point,
    side: Side,
    sector: &SectorSpec,
    n_target: i32,
    restriction: Restriction,
) -> Result<ExtremalProxy> {
    let target = proxy_target(field, side, sector, n_target)?;
    let sp = ShortestPaths::until_settled(field, x, restriction, &[target])?;
    proxy_from_tree(&sp, side, sector, n_target)
}

/// Proxy read off an existing shortest-path tree rooted at the start.
pub fn proxy_from_tree(sp: &ShortestPaths<'_>, side: Side, sector: &SectorSpec, n_target: i32) -> Result<ExtremalProxy> {
    let target = proxy_target(sp.field(), side, sector, n_target)?;
    Ok(ExtremalProxy {
        side,
        start: sp.source(),
        path: sp.geodesic_to(target)?,
        n_target,
        sector: *sector,
        restriction: sp.restriction(),
    })
}

/// First vertex of the longest common final segment, if the paths end
/// together.
pub fn coalescence_point(g1: &Geodesic, g2: &Geodesic) -> Option<Point> {
    let k = common_suffix_len(&g1.vertices, &g2.vertices);
    (k > 0).then(|| g1.vertices[g1.vertices.len() - k])
}

/// Finite proxy of `C_x = {y : x ∈ Γ_y}`: probes `y` whose proxy path to the
/// common target passes through `x`.
///
/// All probes share one target `a`, so the paths are read from a single tree
/// grown from `a` and reversed. A reversed geodesic is the geodesic in the
/// other direction unless two paths have exactly equal times.
pub fn backward_cluster(
    field: &WeightField,
    x: Point,
    probes: &[Point],
    side: Side,
    sector: &SectorSpec,
    n_target: i32,
    restriction: Restriction,
) -> Result<Vec<Point>> {
    let a = proxy_target(field, side, sector, n_target)?;
    let mut all = probes.to_vec();
    all.push(x);
    let sp = ShortestPaths::until_settled(field, a, restriction, &all)?;
    let mut out = Vec::new();
    for &y in probes {
        if sp.passes_through(x, y)? {
            out.push(y);
        }
    }
    Ok(out)
}

/// Finite proxy of `V_x(n)`: points of the widened arc `L_ε(n)` that are
/// leaves of the geodesic tree from `x` to that arc.
pub fn v_proxy(
    field: &WeightField,
    x: Point,
    sector: &SectorSpec,
    n: i32,
    eps: f64,
    restriction: Restriction,
) -> Result<Vec<Point>> {
    let arc = sector_arc(sector, n, eps, field.rect())?;
    if arc.is_empty() {
        return Err(FppError::InsufficientBox { line: n });
    }
    let tree = geodesic_tree(field, x, &arc, restriction)?;
    let leaves: BTreeSet<Point> = tree.leaves();
    Ok(arc.into_iter().filter(|p| leaves.contains(p)).collect())
}

/// JSON record for one comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub seed: u64,
    pub n_target: i32,
    pub relation: Relation,
    pub first_stable_line: Option<i32>,
}
