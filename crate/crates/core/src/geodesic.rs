//! Exact passage times and geodesics.
//!
//! The kernel is a label-setting (Dijkstra) search over the box vertices
//! admitted by a [`Restriction`], with integer tick arithmetic. When two
//! paths to a vertex have identical times, the one whose vertex sequence
//! (read from the source) is smaller at the first disagreement wins, points
//! being compared by `y` then `x`. Since weights are positive, all tight
//! predecessors of a vertex are settled before it, so the rule yields a
//! tree: every subpath of a returned geodesic is the returned geodesic
//! between its endpoints.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{FppError, Result};
use crate::lattice::{Point, Rect, Restriction};
use crate::weights::{Time, WeightField};

const NONE: u32 = u32::MAX;

/// A simple lattice path together with its exact passage time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geodesic {
    pub vertices: Vec<Point>,
    pub time: Time,
    pub restriction: Restriction,
}

impl Geodesic {
    pub fn start(&self) -> Point {
        self.vertices[0]
    }

    pub fn end(&self) -> Point {
        *self.vertices.last().expect("geodesics are non-empty")
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn contains(&self, p: Point) -> bool {
        self.vertices.contains(&p)
    }

    pub fn position(&self, p: Point) -> Option<usize> {
        self.vertices.iter().position(|&v| v == p)
    }

    /// Left-most vertex of the path on the line `L_n`.
    pub fn leftmost_on_line(&self, n: i32) -> Option<Point> {
        self.vertices.iter().filter(|p| p.y == n).min_by_key(|p| p.x).copied()
    }

    pub fn rightmost_on_line(&self, n: i32) -> Option<Point> {
        self.vertices.iter().filter(|p| p.y == n).max_by_key(|p| p.x).copied()
    }

    /// First vertex of the path (in path order) on the line `L_n`.
    pub fn first_on_line(&self, n: i32) -> Option<Point> {
        self.vertices.iter().find(|p| p.y == n).copied()
    }

    pub fn min_y(&self) -> i32 {
        self.vertices.iter().map(|p| p.y).min().expect("non-empty")
    }

    pub fn reversed(&self) -> Geodesic {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Geodesic {
            vertices,
            time: self.time,
            restriction: self.restriction,
        }
    }

    /// `[[x, y], ...]` for plotting.
    pub fn to_json(&self) -> String {
        let pairs: Vec<[i32; 2]> = self.vertices.iter().map(|p| [p.x, p.y]).collect();
        serde_json::to_string(&pairs).expect("plain integer arrays serialise")
    }
}

/// Shortest-path tree grown from one source.
///
/// Only settled vertices carry final labels; queries on anything else fail.
#[derive(Clone, Debug)]
pub struct ShortestPaths<'f> {
    field: &'f WeightField,
    restriction: Restriction,
    source: Point,
    dist: Vec<i64>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    settled: Vec<bool>,
}

impl<'f> ShortestPaths<'f> {
    /// Settle every admitted vertex of the box.
    pub fn from_source(field: &'f WeightField, source: Point, restriction: Restriction) -> Result<Self> {
        Self::run(field, source, restriction, None)
    }

    /// Stop as soon as every target is settled.
    pub fn until_settled(
        field: &'f WeightField,
        source: Point,
        restriction: Restriction,
        targets: &[Point],
    ) -> Result<Self> {
        for &t in targets {
            check_domain(field, t, restriction)?;
        }
        Self::run(field, source, restriction, Some(targets))
    }

    fn run(field: &'f WeightField, source: Point, restriction: Restriction, targets: Option<&[Point]>) -> Result<Self> {
        check_domain(field, source, restriction)?;
        let rect = *field.rect();
        let nv = rect.num_vertices();
        let mut sp = ShortestPaths {
            field,
            restriction,
            source,
            dist: vec![i64::MAX; nv],
            parent: vec![NONE; nv],
            depth: vec![0; nv],
            settled: vec![false; nv],
        };

        let mut pending = match targets {
            Some(ts) => {
                let mut want = vec![false; nv];
                let mut count = 0usize;
                for &t in ts {
                    let i = rect.index(t);
                    if !want[i] {
                        want[i] = true;
                        count += 1;
                    }
                }
                Some((want, count))
            }
            None => None,
        };

        let width = rect.width();
        let y_floor = match restriction {
            Restriction::Full => rect.y_min,
            Restriction::HalfPlane => rect.y_min.max(0),
        };
        let s = rect.index(source);
        sp.dist[s] = 0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0i64, s as u32)));

        while let Some(Reverse((d, ui))) = heap.pop() {
            let u = ui as usize;
            if sp.settled[u] || d != sp.dist[u] {
                continue;
            }
            sp.settled[u] = true;
            if let Some((want, count)) = pending.as_mut() {
                if want[u] {
                    *count -= 1;
                    if *count == 0 {
                        break;
                    }
                }
            }
            let p = rect.point(u);
            let mut relax = |v: usize, w: i64, heap: &mut BinaryHeap<Reverse<(i64, u32)>>| {
                if sp.settled[v] {
                    return;
                }
                let nd = d.saturating_add(w);
                if nd < sp.dist[v] {
                    sp.dist[v] = nd;
                    sp.parent[v] = ui;
                    sp.depth[v] = sp.depth[u] + 1;
                    heap.push(Reverse((nd, v as u32)));
                } else if nd == sp.dist[v] && sp.prefer(u, sp.parent[v] as usize, v) {
                    sp.parent[v] = ui;
                    sp.depth[v] = sp.depth[u] + 1;
                }
            };
            if p.x < rect.x_max {
                relax(u + 1, field.right_ticks(u), &mut heap);
            }
            if p.x > rect.x_min {
                relax(u - 1, field.right_ticks(u - 1), &mut heap);
            }
            if p.y < rect.y_max {
                relax(u + width, field.up_ticks(u), &mut heap);
            }
            if p.y > y_floor {
                relax(u - width, field.up_ticks(u - width), &mut heap);
            }
        }

        if let Some((_, count)) = pending {
            if count != 0 {
                return Err(FppError::Internal("target unreachable inside a connected box".into()));
            }
        }
        Ok(sp)
    }

    /// Is `path(u) + [v]` lexicographically smaller than `path(p) + [v]`?
    fn prefer(&self, u: usize, p: usize, v: usize) -> bool {
        let rect = self.field.rect();
        let (mut a, mut b) = (u, p);
        let (mut next_a, mut next_b) = (v, v);
        while self.depth[a] > self.depth[b] {
            next_a = a;
            a = self.parent[a] as usize;
        }
        while self.depth[b] > self.depth[a] {
            next_b = b;
            b = self.parent[b] as usize;
        }
        while a != b {
            next_a = a;
            a = self.parent[a] as usize;
            next_b = b;
            b = self.parent[b] as usize;
        }
        rect.point(next_a) < rect.point(next_b)
    }

    pub fn source(&self) -> Point {
        self.source
    }

    pub fn restriction(&self) -> Restriction {
        self.restriction
    }

    pub fn field(&self) -> &'f WeightField {
        self.field
    }

    fn settled_index(&self, p: Point) -> Result<usize> {
        check_domain(self.field, p, self.restriction)?;
        let i = self.field.rect().index(p);
        if !self.settled[i] {
            return Err(FppError::Internal(format!("{p} was not settled by this search")));
        }
        Ok(i)
    }

    pub fn is_settled(&self, p: Point) -> bool {
        self.field.rect().contains(p) && self.restriction.admits(p) && self.settled[self.field.rect().index(p)]
    }

    pub fn time_to(&self, p: Point) -> Result<Time> {
        Ok(Time(self.dist[self.settled_index(p)?]))
    }

    pub fn parent_of(&self, p: Point) -> Result<Option<Point>> {
        let i = self.settled_index(p)?;
        Ok((self.parent[i] != NONE).then(|| self.field.rect().point(self.parent[i] as usize)))
    }

    /// Number of edges of the geodesic from the source to `p`.
    pub fn depth_of(&self, p: Point) -> Result<usize> {
        Ok(self.depth[self.settled_index(p)?] as usize)
    }

    /// Vertices of the geodesic from the source to `p`, source first.
    pub fn path_to(&self, p: Point) -> Result<Vec<Point>> {
        let mut i = self.settled_index(p)?;
        let rect = self.field.rect();
        let mut out = Vec::with_capacity(self.depth[i] as usize + 1);
        loop {
            out.push(rect.point(i));
            if self.parent[i] == NONE {
                break;
            }
            i = self.parent[i] as usize;
        }
        out.reverse();
        Ok(out)
    }

    pub fn geodesic_to(&self, p: Point) -> Result<Geodesic> {
        Ok(Geodesic {
            vertices: self.path_to(p)?,
            time: self.time_to(p)?,
            restriction: self.restriction,
        })
    }

    /// Whether `w` lies on the geodesic from the source to `u`.
    pub fn passes_through(&self, w: Point, u: Point) -> Result<bool> {
        let mut i = self.settled_index(u)?;
        if !self.is_settled(w) {
            return Ok(false);
        }
        let wi = self.field.rect().index(w);
        let wd = self.depth[wi];
        while self.depth[i] > wd {
            i = self.parent[i] as usize;
        }
        Ok(i == wi)
    }
}

fn check_domain(field: &WeightField, p: Point, restriction: Restriction) -> Result<()> {
    if field.rect().contains(p) && restriction.admits(p) {
        Ok(())
    } else {
        Err(FppError::OutOfDomain(p))
    }
}

/// `T(x, y)` over paths inside the box (and the half-plane, if restricted).
pub fn passage_time(field: &WeightField, x: Point, y: Point, restriction: Restriction) -> Result<Time> {
    ShortestPaths::until_settled(field, x, restriction, &[y])?.time_to(y)
}

/// The geodesic `Γ(x, y)`, read from `x`.
pub fn geodesic(field: &WeightField, x: Point, y: Point, restriction: Restriction) -> Result<Geodesic> {
    ShortestPaths::until_settled(field, x, restriction, &[y])?.geodesic_to(y)
}

/// Union of the geodesics from a root to a set of targets, as parent pointers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicTree {
    pub root: Point,
    pub restriction: Restriction,
    pub parent: BTreeMap<Point, Point>,
    pub targets: Vec<Point>,
}

impl GeodesicTree {
    pub fn contains(&self, p: Point) -> bool {
        p == self.root || self.parent.contains_key(&p)
    }

    pub fn num_vertices(&self) -> usize {
        self.parent.len() + 1
    }

    /// Root-to-`p` path through the tree.
    pub fn path_to(&self, p: Point) -> Option<Vec<Point>> {
        if !self.contains(p) {
            return None;
        }
        let mut out = vec![p];
        let mut cur = p;
        while cur != self.root {
            cur = self.parent[&cur];
            out.push(cur);
        }
        out.reverse();
        Some(out)
    }

    /// Vertices with no children.
    pub fn leaves(&self) -> BTreeSet<Point> {
        let inner: BTreeSet<Point> = self.parent.values().copied().collect();
        let mut leaves: BTreeSet<Point> = self.parent.keys().filter(|p| !inner.contains(p)).copied().collect();
        if self.parent.is_empty() {
            leaves.insert(self.root);
        }
        leaves
    }

    /// Vertices with at least two children.
    pub fn branch_points(&self) -> BTreeSet<Point> {
        let mut children: BTreeMap<Point, usize> = BTreeMap::new();
        for &p in self.parent.values() {
            *children.entry(p).or_default() += 1;
        }
        children.into_iter().filter(|&(_, c)| c >= 2).map(|(p, _)| p).collect()
    }
}

/// One search from `root`, keeping the union of `Γ(root, t)` over targets.
pub fn geodesic_tree(
    field: &WeightField,
    root: Point,
    targets: &[Point],
    restriction: Restriction,
) -> Result<GeodesicTree> {
    let sp = ShortestPaths::until_settled(field, root, restriction, targets)?;
    let mut parent = BTreeMap::new();
    for &t in targets {
        let mut cur = t;
        while cur != root {
            if parent.contains_key(&cur) {
                break;
            }
            let p = sp.parent_of(cur)?.expect("non-root vertices have parents");
            parent.insert(cur, p);
            cur = p;
        }
    }
    Ok(GeodesicTree {
        root,
        restriction,
        parent,
        targets: targets.to_vec(),
    })
}

/// `out_z(w) ∩ U`: probes `u` whose geodesic from `z` passes through `w`.
pub fn out_set(
    field: &WeightField,
    z: Point,
    w: Point,
    probes: &[Point],
    restriction: Restriction,
) -> Result<Vec<Point>> {
    let sp = ShortestPaths::until_settled(field, z, restriction, probes)?;
    let mut out = Vec::new();
    for &u in probes {
        if sp.passes_through(w, u)? {
            out.push(u);
        }
    }
    Ok(out)
}

/// Box used when a computation must stay `margin` steps away from the edge of
/// the region spanned by `points`.
pub fn enclosing_rect(points: &[Point], margin: i32) -> Result<Rect> {
    let xs = points.iter().map(|p| p.x);
    let ys = points.iter().map(|p| p.y);
    let (Some(x0), Some(x1), Some(y0), Some(y1)) = (xs.clone().min(), xs.max(), ys.clone().min(), ys.max()) else {
        return Err(FppError::InvalidParameter("no points".into()));
    };
    Rect::new(x0 - margin, x1 + margin, y0 - margin, y1 + margin)
}
