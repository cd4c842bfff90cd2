//! Reproducible i.i.d. edge weights.
//!
//! Every weight is a pure function of `(seed, edge, distribution)`: a keyed
//! counter-based generator hashes the edge label with the seed, so a field on
//! a larger box agrees with a smaller one on their common edges, and the
//! full-plane and half-plane computations read the same numbers.
//!
//! Weights are stored twice: as `f64` and as integer ticks of `2^-32` time
//! units. Passage times are sums of ticks, so every comparison of path times
//! is exact.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{FppError, Result};
use crate::lattice::{Point, Rect};

/// Ticks per unit of time.
pub const TICKS_PER_UNIT: f64 = 4_294_967_296.0;

/// Generated weights are capped here so that tick sums stay far from overflow.
pub const MAX_WEIGHT: f64 = 1_048_576.0;

/// Exact passage time in fixed-point ticks. Differences of times (Busemann
/// values) use the same type and may be negative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Time(pub i64);

impl Time {
    pub const ZERO: Time = Time(0);
    pub const INFINITY: Time = Time(i64::MAX);

    pub fn ticks(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / TICKS_PER_UNIT
    }

    pub fn abs(self) -> Time {
        Time(self.0.abs())
    }

    /// Nearest tick count for a positive real weight, at least one tick.
    pub fn from_weight(w: f64) -> Time {
        Time(((w * TICKS_PER_UNIT).round() as i64).max(1))
    }
}

impl Add for Time {
    type Output = Time;
    #[inline]
    fn add(self, rhs: Time) -> Time {
        Time(self.0.saturating_add(rhs.0))
    }
}

impl AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        *self = *self + rhs;
    }
}

impl Sub for Time {
    type Output = Time;
    #[inline]
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl Neg for Time {
    type Output = Time;
    fn neg(self) -> Time {
        Time(-self.0)
    }
}

impl std::iter::Sum for Time {
    fn sum<I: Iterator<Item = Time>>(iter: I) -> Time {
        iter.fold(Time::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `{anchor, anchor + e1}`
    Horizontal,
    /// `{anchor, anchor + e2}`
    Vertical,
}

/// Canonical label of a nearest-neighbour edge: its lower-left endpoint and
/// its orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId {
    pub anchor: Point,
    pub orientation: Orientation,
}

impl EdgeId {
    pub const fn new(anchor: Point, orientation: Orientation) -> Self {
        EdgeId { anchor, orientation }
    }

    /// The edge joining two neighbouring points, in either order.
    pub fn between(a: Point, b: Point) -> Option<EdgeId> {
        if !a.is_neighbor(b) {
            return None;
        }
        let lo = if (a.x, a.y) <= (b.x, b.y) { a } else { b };
        let orientation = if a.y == b.y { Orientation::Horizontal } else { Orientation::Vertical };
        Some(EdgeId::new(lo, orientation))
    }

    pub fn endpoints(self) -> (Point, Point) {
        match self.orientation {
            Orientation::Horizontal => (self.anchor, self.anchor.offset(1, 0)),
            Orientation::Vertical => (self.anchor, self.anchor.offset(0, 1)),
        }
    }

    /// Injective 64-bit label used as the generator counter.
    fn key(self) -> u64 {
        fn zigzag(v: i32) -> u64 {
            ((v << 1) ^ (v >> 31)) as u32 as u64
        }
        (zigzag(self.anchor.x) << 32) | (zigzag(self.anchor.y) << 1) | (self.orientation as u64)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.endpoints();
        write!(f, "{{{a}, {b}}}")
    }
}

/// Common law of the edge weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Distribution {
    Exponential { rate: f64 },
    Uniform { a: f64, b: f64 },
    /// `x_min * U^(-1/alpha)`.
    ShiftedPareto { alpha: f64, x_min: f64 },
    /// Degenerate point mass. Only for closed-form checks; it breaks
    /// uniqueness of geodesics and leaves everything to the tie-break.
    Constant { value: f64 },
}

impl Distribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Distribution::Exponential { rate }.validated()
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Distribution::Uniform { a, b }.validated()
    }

    pub fn shifted_pareto(alpha: f64, x_min: f64) -> Result<Self> {
        Distribution::ShiftedPareto { alpha, x_min }.validated()
    }

    pub fn constant(value: f64) -> Result<Self> {
        Distribution::Constant { value }.validated()
    }

    pub fn unit() -> Self {
        Distribution::Constant { value: 1.0 }
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            Distribution::Exponential { rate } => rate.is_finite() && rate > 0.0,
            Distribution::Uniform { a, b } => a.is_finite() && b.is_finite() && a >= 0.0 && b > a,
            Distribution::ShiftedPareto { alpha, x_min } => {
                alpha.is_finite() && alpha > 0.0 && x_min.is_finite() && x_min > 0.0
            }
            Distribution::Constant { value } => value.is_finite() && value > 0.0 && value <= MAX_WEIGHT,
        };
        if ok {
            Ok(self)
        } else {
            Err(FppError::InvalidParameter(format!("invalid distribution {self:?}")))
        }
    }

    /// Inverse CDF at `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Distribution::Exponential { rate } => -u.ln() / rate,
            Distribution::Uniform { a, b } => a + (b - a) * u,
            Distribution::ShiftedPareto { alpha, x_min } => x_min * u.powf(-1.0 / alpha),
            Distribution::Constant { value } => value,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Exponential { rate } => 1.0 / rate,
            Distribution::Uniform { a, b } => 0.5 * (a + b),
            Distribution::ShiftedPareto { alpha, x_min } => {
                if alpha > 1.0 {
                    alpha * x_min / (alpha - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            Distribution::Constant { value } => value,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Exponential { .. } => "exponential",
            Distribution::Uniform { .. } => "uniform",
            Distribution::ShiftedPareto { .. } => "shifted-pareto",
            Distribution::Constant { .. } => "constant",
        }
    }
}

/// SplitMix64 output function.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Counter-based uniform in the open interval `(0, 1)` keyed by `(seed, counter)`.
#[inline]
pub(crate) fn keyed_uniform(seed: u64, counter: u64) -> f64 {
    let k = mix64(seed.wrapping_add(GOLDEN_GAMMA));
    let h = mix64(k ^ mix64(counter.wrapping_mul(GOLDEN_GAMMA).wrapping_add(k.rotate_left(17))));
    ((h >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Seed of replicate `index` in a family rooted at `base`.
pub fn replicate_seed(base: u64, index: u64) -> u64 {
    mix64(base ^ mix64(index.wrapping_add(GOLDEN_GAMMA)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FieldOrigin {
    Generated { seed: u64, dist: Distribution },
    /// Weights supplied edge by edge (e.g. from ferromagnet couplings).
    Explicit,
}

/// Immutable edge weights on every edge with both endpoints in a box.
#[derive(Clone, Debug)]
pub struct WeightField {
    rect: Rect,
    origin: FieldOrigin,
    // horizontal edges at [0, V), vertical edges at [V, 2V), both indexed by anchor
    values: Vec<f64>,
    ticks: Vec<i64>,
}

/// Field on the square `[-n, n]^2`.
pub fn make_field(n: i32, seed: u64, dist: Distribution) -> Result<WeightField> {
    WeightField::generate(Rect::square(n)?, seed, dist)
}

impl WeightField {
    pub fn generate(rect: Rect, seed: u64, dist: Distribution) -> Result<Self> {
        let dist = dist.validated()?;
        let nv = rect.num_vertices();
        let mut values = vec![f64::NAN; 2 * nv];
        let mut ticks = vec![0i64; 2 * nv];
        for e in edges_of(&rect) {
            let slot = slot_of(&rect, e);
            let w = dist.quantile(keyed_uniform(seed, e.key())).min(MAX_WEIGHT);
            let t = Time::from_weight(w);
            ticks[slot] = t.0;
            values[slot] = t.as_f64();
        }
        Ok(WeightField {
            rect,
            origin: FieldOrigin::Generated { seed, dist },
            values,
            ticks,
        })
    }

    /// Build a field from a weight for every edge of `rect`.
    pub fn from_fn(rect: Rect, mut weight: impl FnMut(EdgeId) -> Result<f64>) -> Result<Self> {
        let nv = rect.num_vertices();
        let mut values = vec![f64::NAN; 2 * nv];
        let mut ticks = vec![0i64; 2 * nv];
        for e in edges_of(&rect) {
            let w = weight(e)?;
            if !(w.is_finite() && w > 0.0 && w <= MAX_WEIGHT) {
                return Err(FppError::InvalidParameter(format!("weight {w} on edge {e} is not in (0, {MAX_WEIGHT}]")));
            }
            let slot = slot_of(&rect, e);
            values[slot] = w;
            ticks[slot] = Time::from_weight(w).0;
        }
        Ok(WeightField {
            rect,
            origin: FieldOrigin::Explicit,
            values,
            ticks,
        })
    }

    pub fn rect(&self) -> &Rect {
        &self.rect
    }

    pub fn origin(&self) -> &FieldOrigin {
        &self.origin
    }

    pub fn seed(&self) -> Option<u64> {
        match self.origin {
            FieldOrigin::Generated { seed, .. } => Some(seed),
            FieldOrigin::Explicit => None,
        }
    }

    pub fn num_edges(&self) -> usize {
        let (w, h) = (self.rect.width(), self.rect.height());
        (w - 1) * h + w * (h - 1)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        let (a, b) = e.endpoints();
        self.rect.contains(a) && self.rect.contains(b)
    }

    pub fn weight_at(&self, e: EdgeId) -> Result<f64> {
        if !self.contains_edge(e) {
            return Err(FppError::EdgeOutOfDomain(e.to_string()));
        }
        Ok(self.values[slot_of(&self.rect, e)])
    }

    /// The weight in exact ticks.
    pub fn time_at(&self, e: EdgeId) -> Result<Time> {
        if !self.contains_edge(e) {
            return Err(FppError::EdgeOutOfDomain(e.to_string()));
        }
        Ok(Time(self.ticks[slot_of(&self.rect, e)]))
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        edges_of(&self.rect)
    }

    /// Ticks of the edge from vertex index `idx` to its right neighbour.
    #[inline]
    pub(crate) fn right_ticks(&self, idx: usize) -> i64 {
        self.ticks[idx]
    }

    /// Ticks of the edge from vertex index `idx` to its upper neighbour.
    #[inline]
    pub(crate) fn up_ticks(&self, idx: usize) -> i64 {
        self.ticks[self.values.len() / 2 + idx]
    }

    /// Exact passage time of a vertex path.
    pub fn path_time(&self, path: &[Point]) -> Result<Time> {
        path.windows(2)
            .map(|w| {
                let e = EdgeId::between(w[0], w[1])
                    .ok_or_else(|| FppError::InvalidParameter(format!("{} and {} are not neighbours", w[0], w[1])))?;
                self.time_at(e)
            })
            .sum()
    }
}

fn slot_of(rect: &Rect, e: EdgeId) -> usize {
    let base = rect.index(e.anchor);
    match e.orientation {
        Orientation::Horizontal => base,
        Orientation::Vertical => rect.num_vertices() + base,
    }
}

fn edges_of(rect: &Rect) -> impl Iterator<Item = EdgeId> + '_ {
    rect.points().flat_map(move |p| {
        let h = (p.x < rect.x_max).then(|| EdgeId::new(p, Orientation::Horizontal));
        let v = (p.y < rect.y_max).then(|| EdgeId::new(p, Orientation::Vertical));
        h.into_iter().chain(v)
    })
}
