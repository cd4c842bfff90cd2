//! Planar lattice geometry: points, boxes, the half-plane mask, horizontal
//! lines `L_n`, angular sectors and the dual lattice.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FppError, Result};
use crate::weights::{EdgeId, Orientation};

/// Slack used when testing float arguments against closed sector endpoints.
const ANGLE_SLACK: f64 = 1e-12;

/// A vertex of `Z^2`.
///
/// Points are totally ordered by `y` first, then `x`. The geodesic tie-break
/// compares vertex sequences with this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Point { x, y }
    }

    pub fn l1_norm(self) -> i64 {
        i64::from(self.x).abs() + i64::from(self.y).abs()
    }

    pub fn l1_dist(self, other: Point) -> i64 {
        (i64::from(self.x) - i64::from(other.x)).abs() + (i64::from(self.y) - i64::from(other.y)).abs()
    }

    pub fn offset(self, dx: i32, dy: i32) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }

    pub fn is_neighbor(self, other: Point) -> bool {
        self.l1_dist(other) == 1
    }

    /// The four nearest neighbours in a fixed order.
    pub fn neighbors(self) -> [Point; 4] {
        [
            self.offset(1, 0),
            self.offset(-1, 0),
            self.offset(0, 1),
            self.offset(0, -1),
        ]
    }

    pub fn as_f64(self) -> (f64, f64) {
        (f64::from(self.x), f64::from(self.y))
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.y.cmp(&other.y).then(self.x.cmp(&other.x))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Planar argument of `p` in `[0, 2π)`.
pub fn arg_of(p: Point) -> Result<f64> {
    if p == Point::ORIGIN {
        return Err(FppError::UndefinedArgument);
    }
    let (x, y) = p.as_f64();
    let a = y.atan2(x);
    Ok(if a < 0.0 { a + TAU } else { a })
}

/// Closed integer rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: i32,
    pub x_max: i32,
    pub y_min: i32,
    pub y_max: i32,
}

impl Rect {
    pub fn new(x_min: i32, x_max: i32, y_min: i32, y_max: i32) -> Result<Self> {
        if x_min > x_max || y_min > y_max {
            return Err(FppError::InvalidParameter(format!(
                "empty rectangle [{x_min},{x_max}]x[{y_min},{y_max}]"
            )));
        }
        const LIMIT: i32 = 1 << 29;
        if [x_min, x_max, y_min, y_max].iter().any(|c| c.abs() >= LIMIT) {
            return Err(FppError::InvalidParameter("rectangle coordinates too large".into()));
        }
        Ok(Rect { x_min, x_max, y_min, y_max })
    }

    /// The square `[-n, n]^2`.
    pub fn square(n: i32) -> Result<Self> {
        if n < 1 {
            return Err(FppError::InvalidParameter(format!("box radius must be >= 1, got {n}")));
        }
        Rect::new(-n, n, -n, n)
    }

    pub fn width(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.y_max - self.y_min + 1) as usize
    }

    pub fn num_vertices(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Row-major index of `p`; caller guarantees containment.
    #[inline]
    pub fn index(&self, p: Point) -> usize {
        (p.y - self.y_min) as usize * self.width() + (p.x - self.x_min) as usize
    }

    #[inline]
    pub fn point(&self, idx: usize) -> Point {
        let w = self.width();
        Point::new((idx % w) as i32 + self.x_min, (idx / w) as i32 + self.y_min)
    }

    /// Distance (in lattice steps) from `p` to the rectangle's boundary.
    pub fn boundary_distance(&self, p: Point) -> i32 {
        (p.x - self.x_min)
            .min(self.x_max - p.x)
            .min(p.y - self.y_min)
            .min(self.y_max - p.y)
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (self.y_min..=self.y_max).flat_map(move |y| (self.x_min..=self.x_max).map(move |x| Point::new(x, y)))
    }

    /// Grow by `k` on every side.
    pub fn expand(&self, k: i32) -> Result<Rect> {
        Rect::new(self.x_min - k, self.x_max + k, self.y_min - k, self.y_max + k)
    }
}

/// Which vertices a shortest-path computation may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Restriction {
    Full,
    /// Only vertices with `y >= 0` (and edges between them).
    HalfPlane,
}

impl Restriction {
    #[inline]
    pub fn admits(self, p: Point) -> bool {
        match self {
            Restriction::Full => true,
            Restriction::HalfPlane => p.y >= 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Restriction::Full => "full",
            Restriction::HalfPlane => "half-plane",
        }
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// All points of the box on the line `L_n = {(x, n)}`, sorted by `x`.
pub fn line_points(n: i32, rect: &Rect) -> Vec<Point> {
    if n < rect.y_min || n > rect.y_max {
        return Vec::new();
    }
    (rect.x_min..=rect.x_max).map(|x| Point::new(x, n)).collect()
}

/// An angular sector `[theta1, theta2]` around a reference direction `theta`.
///
/// Endpoints are inclusive. Angles are radians; `theta1` may be negative or
/// `theta2` may exceed `2π` to describe sectors straddling the positive x-axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub theta: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl SectorSpec {
    pub fn new(theta: f64, theta1: f64, theta2: f64) -> Result<Self> {
        if !(theta.is_finite() && theta1.is_finite() && theta2.is_finite()) {
            return Err(FppError::InvalidParameter("sector angles must be finite".into()));
        }
        if !(0.0..TAU).contains(&theta) {
            return Err(FppError::InvalidParameter(format!("theta = {theta} not in [0, 2pi)")));
        }
        if !(theta1 <= theta && theta <= theta2) {
            return Err(FppError::InvalidParameter(format!(
                "need theta1 <= theta <= theta2, got {theta1} <= {theta} <= {theta2}"
            )));
        }
        if theta2 - theta1 >= PI {
            return Err(FppError::InvalidParameter("sector must be narrower than pi".into()));
        }
        if (PI / 4.0..=PI / 2.0).contains(&theta) && !(theta1 > 0.0 && theta2 < PI) {
            return Err(FppError::InvalidParameter(
                "for theta in [pi/4, pi/2] the sector must satisfy 0 < theta1 <= theta2 < pi".into(),
            ));
        }
        Ok(SectorSpec { theta, theta1, theta2 })
    }

    /// The single-direction sector `{theta}`.
    pub fn direction(theta: f64) -> Result<Self> {
        SectorSpec::new(theta, theta, theta)
    }

    /// Symmetric sector around `pi/2` whose arc on `L_n` is exactly
    /// `{(-k, n), ..., (k, n)}`.
    pub fn vertical_lattice(k: i32, n: i32) -> Result<Self> {
        if k < 0 || n < 1 {
            return Err(FppError::InvalidParameter(format!("need k >= 0 and n >= 1, got k={k}, n={n}")));
        }
        let t1 = f64::from(n).atan2(f64::from(k));
        let t2 = f64::from(n).atan2(f64::from(-k));
        SectorSpec::new(PI / 2.0, t1, t2)
    }

    pub fn width(&self) -> f64 {
        self.theta2 - self.theta1
    }

    /// Whether the direction `phi` lies in `[theta1 - eps, theta2 + eps]`
    /// modulo `2π`.
    pub fn contains_angle(&self, phi: f64, eps: f64) -> bool {
        let lo = self.theta1 - eps - ANGLE_SLACK;
        let hi = self.theta2 + eps + ANGLE_SLACK;
        let mut a = phi.rem_euclid(TAU);
        // shift `a` into the window starting at `lo`
        while a < lo {
            a += TAU;
        }
        while a - TAU >= lo {
            a -= TAU;
        }
        a <= hi
    }
}

/// Points `x` of `L_n` inside the box with `arg x ∈ [theta1 - eps, theta2 + eps]`,
/// sorted by `x`.
pub fn sector_arc(spec: &SectorSpec, n: i32, eps: f64, rect: &Rect) -> Result<Vec<Point>> {
    if n < 1 {
        return Err(FppError::InvalidParameter(format!("sector arc needs n >= 1, got {n}")));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(FppError::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    Ok(line_points(n, rect)
        .into_iter()
        .filter(|&p| spec.contains_angle(arg_of(p).expect("n >= 1 excludes the origin"), eps))
        .collect())
}

/// An edge of the dual lattice `Z^2 + (1/2, 1/2)`.
///
/// The dual vertex with integer label `a` sits at `a + (1/2, 1/2)`. The edge
/// joins `anchor` to `anchor + e1` (horizontal) or `anchor + e2` (vertical).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualEdge {
    pub anchor: Point,
    pub orientation: Orientation,
}

impl DualEdge {
    /// The dual edge crossing the primal edge `e`.
    pub fn crossing(e: EdgeId) -> DualEdge {
        match e.orientation {
            // {(x,y),(x+1,y)} is crossed by the segment from (x+1/2, y-1/2) to (x+1/2, y+1/2)
            Orientation::Horizontal => DualEdge {
                anchor: e.anchor.offset(0, -1),
                orientation: Orientation::Vertical,
            },
            // {(x,y),(x,y+1)} is crossed by the segment from (x-1/2, y+1/2) to (x+1/2, y+1/2)
            Orientation::Vertical => DualEdge {
                anchor: e.anchor.offset(-1, 0),
                orientation: Orientation::Horizontal,
            },
        }
    }

    /// The primal edge this dual edge crosses.
    pub fn primal(self) -> EdgeId {
        match self.orientation {
            Orientation::Vertical => EdgeId::new(self.anchor.offset(0, 1), Orientation::Horizontal),
            Orientation::Horizontal => EdgeId::new(self.anchor.offset(1, 0), Orientation::Vertical),
        }
    }

    /// Integer labels of the two dual endpoints.
    pub fn endpoints(self) -> (Point, Point) {
        match self.orientation {
            Orientation::Horizontal => (self.anchor, self.anchor.offset(1, 0)),
            Orientation::Vertical => (self.anchor, self.anchor.offset(0, 1)),
        }
    }

    /// Real coordinates of a dual vertex label.
    pub fn dual_coords(label: Point) -> (f64, f64) {
        (f64::from(label.x) + 0.5, f64::from(label.y) + 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn arguments() {
        assert_eq!(arg_of(Point::new(1, 0)).unwrap(), 0.0);
        assert_eq!(arg_of(Point::new(0, 3)).unwrap(), FRAC_PI_2);
        assert_eq!(arg_of(Point::new(1, 1)).unwrap(), FRAC_PI_4);
        assert!((arg_of(Point::new(0, -1)).unwrap() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(arg_of(Point::ORIGIN), Err(FppError::UndefinedArgument));
    }

    #[test]
    fn point_order_is_y_then_x() {
        assert!(Point::new(5, 0) < Point::new(-5, 1));
        assert!(Point::new(-1, 2) < Point::new(0, 2));
    }

    #[test]
    fn lines() {
        let b1 = Rect::square(1).unwrap();
        assert_eq!(line_points(0, &b1), vec![Point::new(-1, 0), Point::new(0, 0), Point::new(1, 0)]);
        assert!(line_points(2, &b1).is_empty());
        assert_eq!(line_points(1, &Rect::square(2).unwrap()).len(), 5);
    }

    #[test]
    fn arcs() {
        let b = Rect::square(10).unwrap();
        let up = SectorSpec::direction(FRAC_PI_2).unwrap();
        assert_eq!(sector_arc(&up, 5, 0.0, &b).unwrap(), vec![Point::new(0, 5)]);

        let wide = sector_arc(&up, 5, FRAC_PI_4, &b).unwrap();
        assert_eq!(wide, (-5..=5).map(|x| Point::new(x, 5)).collect::<Vec<_>>());

        let s = SectorSpec::new(FRAC_PI_2, FRAC_PI_4, FRAC_PI_2).unwrap();
        assert_eq!(sector_arc(&s, 4, 0.0, &b).unwrap(), (0..=4).map(|x| Point::new(x, 4)).collect::<Vec<_>>());

        assert!(sector_arc(&s, 0, 0.0, &b).is_err());
    }

    #[test]
    fn arc_matches_enumerated_arguments() {
        // independent route: enumerate L_4 and test args with plain comparisons
        let b = Rect::square(6).unwrap();
        let (t1, t2) = (FRAC_PI_4, FRAC_PI_2);
        let expected: Vec<Point> = (-6..=6)
            .map(|x| Point::new(x, 4))
            .filter(|p| {
                let a = f64::from(p.y).atan2(f64::from(p.x));
                a >= t1 - 1e-12 && a <= t2 + 1e-12
            })
            .collect();
        let s = SectorSpec::new(FRAC_PI_2, t1, t2).unwrap();
        assert_eq!(sector_arc(&s, 4, 0.0, &b).unwrap(), expected);
    }

    #[test]
    fn vertical_lattice_sector() {
        let s = SectorSpec::vertical_lattice(2, 40).unwrap();
        let b = Rect::square(50).unwrap();
        let arc = sector_arc(&s, 40, 0.0, &b).unwrap();
        assert_eq!(arc, (-2..=2).map(|x| Point::new(x, 40)).collect::<Vec<_>>());
    }

    #[test]
    fn sector_validation() {
        assert!(SectorSpec::new(FRAC_PI_2, 0.0, FRAC_PI_2).is_err());
        assert!(SectorSpec::new(FRAC_PI_2, 1.0, 1.2).is_err());
        assert!(SectorSpec::new(0.1, -0.2, 0.3).is_ok());
        let straddle = SectorSpec::new(0.1, -0.2, 0.3).unwrap();
        assert!(straddle.contains_angle(TAU - 0.1, 0.0));
        assert!(!straddle.contains_angle(PI, 0.0));
    }

    #[test]
    fn dual_round_trip() {
        for x in -3..3 {
            for y in -3..3 {
                for o in [Orientation::Horizontal, Orientation::Vertical] {
                    let e = EdgeId::new(Point::new(x, y), o);
                    let d = DualEdge::crossing(e);
                    assert_eq!(d.primal(), e);
                    assert_ne!(d.orientation, e.orientation);
                }
            }
        }
    }

    #[test]
    fn dual_edge_geometry() {
        // the dual edge crossing {(0,0),(1,0)} is the vertical segment x = 1/2
        let d = DualEdge::crossing(EdgeId::new(Point::ORIGIN, Orientation::Horizontal));
        let (a, b) = d.endpoints();
        assert_eq!(DualEdge::dual_coords(a), (0.5, -0.5));
        assert_eq!(DualEdge::dual_coords(b), (0.5, 0.5));
    }
}
