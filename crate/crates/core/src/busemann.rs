//! Busemann functions along anchor sequences.
//!
//! `B(x, y)` is estimated by `T(x, a_k) − T(y, a_k)` along anchors `a_k`
//! running off toward the sector. Once `Γ(x, a_k)` and `Γ(y, a_k)` merge at
//! some `z` before `a_k`, the difference equals `T(x, z) − T(y, z)` exactly and
//! stops moving. All values are exact tick differences.

use serde::{Deserialize, Serialize};

use crate::error::{FppError, Result};
use crate::geodesic::ShortestPaths;
use crate::lattice::{Point, Restriction, SectorSpec};
use crate::order::{proxy_from_tree, ExtremalProxy, Side};
use crate::weights::{EdgeId, Time, WeightField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BusemannSide {
    L,
    R,
    Plain,
}

impl BusemannSide {
    pub fn as_str(self) -> &'static str {
        match self {
            BusemannSide::L => "L",
            BusemannSide::R => "R",
            BusemannSide::Plain => "plain",
        }
    }
}

impl From<Side> for BusemannSide {
    fn from(s: Side) -> Self {
        match s {
            Side::L => BusemannSide::L,
            Side::R => BusemannSide::R,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BusemannSample {
    pub x: Point,
    pub y: Point,
    pub anchors: Vec<Point>,
    /// `T(x, a_k) − T(y, a_k)`.
    pub values: Vec<Time>,
    /// Smallest `k0` such that for every `k ≥ k0` the two geodesics to `a_k`
    /// share their last edge and `values[k]` equals the final value.
    pub converged_at: Option<usize>,
    pub converged_value: Option<Time>,
    /// Coalescence point of `Γ(x, a_last)` and `Γ(y, a_last)`, if they merge
    /// before the last anchor.
    pub meeting_point: Option<Point>,
    pub restriction: Restriction,
    pub side: BusemannSide,
}

impl BusemannSample {
    /// `seed,x,y,side,restriction,value,converged_at_anchor_index`; unconverged
    /// samples leave the last two fields empty.
    pub fn csv_row(&self, seed: u64) -> String {
        let value = self.converged_value.map(|t| t.as_f64().to_string()).unwrap_or_default();
        let at = self.converged_at.map(|k| k.to_string()).unwrap_or_default();
        format!(
            "{seed},\"{}\",\"{}\",{},{},{value},{at}",
            self.x,
            self.y,
            self.side.as_str(),
            self.restriction.as_str()
        )
    }
}

pub const CSV_HEADER: &str = "seed,x,y,side,restriction,value,converged_at_anchor_index";

/// Sample from trees already grown from `x` and `y` past every anchor.
pub fn sample_from_trees(
    sx: &ShortestPaths<'_>,
    sy: &ShortestPaths<'_>,
    anchors: &[Point],
    side: BusemannSide,
) -> Result<BusemannSample> {
    let (x, y) = (sx.source(), sy.source());
    let mut values = Vec::with_capacity(anchors.len());
    let mut merged = Vec::with_capacity(anchors.len());
    for &a in anchors {
        values.push(sx.time_to(a)? - sy.time_to(a)?);
        merged.push(x == y || (a != x && a != y && sx.parent_of(a)? == sy.parent_of(a)?));
    }
    let last = *values.last().expect("anchors checked non-empty");
    let mut k0 = values.len();
    while k0 > 0 && merged[k0 - 1] && values[k0 - 1] == last {
        k0 -= 1;
    }
    let converged_at = (k0 < values.len()).then_some(k0);
    let meeting_point = if x == y {
        Some(x)
    } else {
        let a = *anchors.last().expect("non-empty");
        let (px, py) = (sx.path_to(a)?, sy.path_to(a)?);
        let k = px.iter().rev().zip(py.iter().rev()).take_while(|(p, q)| p == q).count();
        (k >= 2).then(|| px[px.len() - k])
    };
    Ok(BusemannSample {
        x,
        y,
        anchors: anchors.to_vec(),
        values,
        converged_at,
        converged_value: converged_at.map(|_| last),
        meeting_point,
        restriction: sx.restriction(),
        side,
    })
}

/// `T(x, a_k) − T(y, a_k)` along `anchors`.
pub fn busemann_along(
    field: &WeightField,
    x: Point,
    y: Point,
    anchors: &[Point],
    restriction: Restriction,
    side: BusemannSide,
) -> Result<BusemannSample> {
    if anchors.is_empty() {
        return Err(FppError::InvalidParameter("no anchors".into()));
    }
    let sx = ShortestPaths::until_settled(field, x, restriction, anchors)?;
    let sy = ShortestPaths::until_settled(field, y, restriction, anchors)?;
    sample_from_trees(&sx, &sy, anchors, side)
}

/// Values `T(x, y_n) − T(y0, y_n)` along the proxy vertices `y_n`, and whether
/// they are nonincreasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneWitness {
    pub monotone: bool,
    /// First `n` with `values[n] > values[n - 1]`.
    pub first_violation: Option<usize>,
    pub values: Vec<Time>,
}

pub fn halfplane_monotone_check(
    field: &WeightField,
    x: Point,
    y0: Point,
    proxy: &ExtremalProxy,
) -> Result<MonotoneWitness> {
    if proxy.start != y0 {
        return Err(FppError::InvalidParameter(format!("{y0} is not the start of the proxy")));
    }
    let anchors = &proxy.path.vertices;
    let sx = ShortestPaths::until_settled(field, x, proxy.restriction, anchors)?;
    // T(y0, y_n) is the length of the proxy's prefix
    let mut along = Time::ZERO;
    let mut values = Vec::with_capacity(anchors.len());
    for (n, &a) in anchors.iter().enumerate() {
        if n > 0 {
            along += field.time_at(EdgeId::between(anchors[n - 1], a).expect("path steps are edges"))?;
        }
        values.push(sx.time_to(a)? - along);
    }
    let first_violation = (1..values.len()).find(|&n| values[n] > values[n - 1]);
    Ok(MonotoneWitness {
        monotone: first_violation.is_none(),
        first_violation,
        values,
    })
}

/// `Δ_H(x, y) = B_H^L(x, y) − B_H^R(x, y)` with both sides read along the
/// half-plane proxies from `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaH {
    pub value: Time,
    pub left: BusemannSample,
    pub right: BusemannSample,
}

/// Both half-plane Busemann samples, converged or not.
pub fn halfplane_pair(
    field: &WeightField,
    x: Point,
    y: Point,
    sector: &SectorSpec,
    n_target: i32,
) -> Result<(BusemannSample, BusemannSample)> {
    let r = Restriction::HalfPlane;
    let sx = ShortestPaths::from_source(field, x, r)?;
    let sy = ShortestPaths::from_source(field, y, r)?;
    let left = proxy_from_tree(&sx, Side::L, sector, n_target)?;
    let right = proxy_from_tree(&sx, Side::R, sector, n_target)?;
    Ok((
        sample_from_trees(&sx, &sy, &left.path.vertices, BusemannSide::L)?,
        sample_from_trees(&sx, &sy, &right.path.vertices, BusemannSide::R)?,
    ))
}

pub fn delta_h(field: &WeightField, x: Point, y: Point, sector: &SectorSpec, n_target: i32) -> Result<DeltaH> {
    let (left, right) = halfplane_pair(field, x, y, sector, n_target)?;
    match (left.converged_value, right.converged_value) {
        (Some(l), Some(r)) => Ok(DeltaH {
            value: l - r,
            left,
            right,
        }),
        _ => Err(FppError::Unconverged),
    }
}

/// Least-squares `ρ` with `B̂(0, x) ≈ ρ·x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoFit {
    pub rho: [f64; 2],
    /// `max |B̂(0, x) − ρ·x| / |x|_1` over probes.
    pub residual: f64,
    pub probes: usize,
}

/// Fit from `(x, B̂(0, x))` pairs. The probe vectors must not all lie on one
/// line through the origin.
pub fn fit_rho_points(points: &[([f64; 2], f64)]) -> Result<RhoFit> {
    if points.len() < 3 {
        return Err(FppError::DegenerateFit(format!("{} probes, need at least 3", points.len())));
    }
    let (mut sxx, mut sxy, mut syy, mut sxb, mut syb) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &([a, b], v) in points {
        sxx += a * a;
        sxy += a * b;
        syy += b * b;
        sxb += a * v;
        syb += b * v;
    }
    let det = sxx * syy - sxy * sxy;
    if det.abs() <= 1e-12 * (sxx + syy).powi(2) {
        return Err(FppError::DegenerateFit("probe vectors are collinear".into()));
    }
    let rho = [(syy * sxb - sxy * syb) / det, (sxx * syb - sxy * sxb) / det];
    let residual = points
        .iter()
        .map(|&([a, b], v)| (v - rho[0] * a - rho[1] * b).abs() / (a.abs() + b.abs()))
        .fold(0.0, f64::max);
    Ok(RhoFit {
        rho,
        residual,
        probes: points.len(),
    })
}

/// Fit from converged samples, each read as `B̂(0, y − x)`; unconverged
/// samples are skipped.
pub fn fit_rho(samples: &[BusemannSample]) -> Result<RhoFit> {
    let pts: Vec<([f64; 2], f64)> = samples
        .iter()
        .filter_map(|s| {
            let v = s.converged_value?;
            let d = [f64::from(s.y.x - s.x.x), f64::from(s.y.y - s.x.y)];
            Some((d, v.as_f64()))
        })
        .collect();
    fit_rho_points(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::{geodesic, passage_time};
    use crate::lattice::Rect;
    use crate::order::{coalescence_point, extremal_proxy};
    use crate::weights::{make_field, Distribution};

    fn exp_field(rect: Rect, seed: u64) -> WeightField {
        WeightField::generate(rect, seed, Distribution::exponential(1.0).unwrap()).unwrap()
    }

    #[test]
    fn same_point_is_zero() {
        let f = make_field(8, 1, Distribution::exponential(1.0).unwrap()).unwrap();
        let anchors = [Point::new(0, 5), Point::new(1, 6)];
        let s = busemann_along(&f, Point::ORIGIN, Point::ORIGIN, &anchors, Restriction::Full, BusemannSide::Plain)
            .unwrap();
        assert!(s.values.iter().all(|&v| v == Time::ZERO));
        assert_eq!(s.converged_value, Some(Time::ZERO));
        assert_eq!(s.converged_at, Some(0));
        assert!(busemann_along(&f, Point::ORIGIN, Point::ORIGIN, &[], Restriction::Full, BusemannSide::Plain).is_err());
    }

    #[test]
    fn point_on_every_geodesic() {
        let f = make_field(10, 4, Distribution::exponential(1.0).unwrap()).unwrap();
        let g = geodesic(&f, Point::ORIGIN, Point::new(3, 9), Restriction::Full).unwrap();
        let y = g.vertices[3];
        let anchors: Vec<Point> = g.vertices[5..].to_vec();
        let s = busemann_along(&f, Point::ORIGIN, y, &anchors, Restriction::Full, BusemannSide::Plain).unwrap();
        let t = passage_time(&f, Point::ORIGIN, y, Restriction::Full).unwrap();
        assert_eq!(s.converged_value, Some(t));
        assert_eq!(s.converged_at, Some(0));
    }

    #[test]
    fn converged_value_matches_meeting_point() {
        let rect = Rect::new(-40, 40, -10, 70).unwrap();
        let sector = SectorSpec::vertical_lattice(1, 64).unwrap();
        let mut seen = 0;
        for seed in 0..10 {
            let f = exp_field(rect, seed);
            let p = extremal_proxy(&f, Point::ORIGIN, Side::L, &sector, 64, Restriction::Full).unwrap();
            let y = Point::new(1, 0);
            let s = busemann_along(&f, Point::ORIGIN, y, &p.path.vertices, Restriction::Full, BusemannSide::L).unwrap();
            for (k, v) in s.values.iter().enumerate() {
                let t = passage_time(&f, Point::ORIGIN, y, Restriction::Full).unwrap();
                assert!(v.abs() <= t, "anchor {k}");
            }
            if let Some(v) = s.converged_value {
                seen += 1;
                let a = *p.path.vertices.last().unwrap();
                let g1 = geodesic(&f, Point::ORIGIN, a, Restriction::Full).unwrap();
                let g2 = geodesic(&f, y, a, Restriction::Full).unwrap();
                let z = coalescence_point(&g1, &g2).unwrap();
                assert_eq!(Some(z), s.meeting_point);
                let direct = passage_time(&f, Point::ORIGIN, z, Restriction::Full).unwrap()
                    - passage_time(&f, y, z, Restriction::Full).unwrap();
                assert_eq!(v, direct);
            }
        }
        assert!(seen >= 5, "only {seen} of 10 converged");
    }

    #[test]
    fn monotone_along_proxy() {
        let rect = Rect::new(-30, 30, -5, 40).unwrap();
        let sector = SectorSpec::vertical_lattice(2, 32).unwrap();
        for seed in 0..10 {
            let f = exp_field(rect, seed);
            let p = extremal_proxy(&f, Point::ORIGIN, Side::L, &sector, 32, Restriction::HalfPlane).unwrap();
            let w = halfplane_monotone_check(&f, Point::ORIGIN, Point::ORIGIN, &p).unwrap();
            assert!(w.monotone && w.values.iter().all(|&v| v == Time::ZERO));
            let x = Point::new(1, 0);
            let w = halfplane_monotone_check(&f, x, Point::ORIGIN, &p).unwrap();
            assert!(w.monotone, "seed {seed}: {:?}", w.first_violation);
            let bound = passage_time(&f, x, Point::ORIGIN, Restriction::HalfPlane).unwrap();
            assert!(w.values.iter().all(|&v| v >= -bound && v <= bound));
            assert!(halfplane_monotone_check(&f, x, x, &p).is_err());
        }
    }

    #[test]
    fn delta_h_trivial_cases() {
        let rect = Rect::new(-20, 20, -2, 24).unwrap();
        let f = exp_field(rect, 8);
        let single = SectorSpec::vertical_lattice(0, 16).unwrap();
        let d = delta_h(&f, Point::ORIGIN, Point::new(1, 0), &single, 16);
        match d {
            Ok(d) => assert_eq!(d.value, Time::ZERO),
            Err(e) => assert_eq!(e, FppError::Unconverged),
        }
        let wide = SectorSpec::vertical_lattice(4, 16).unwrap();
        let d = delta_h(&f, Point::new(2, 1), Point::new(2, 1), &wide, 16).unwrap();
        assert_eq!(d.value, Time::ZERO);
    }

    #[test]
    fn synthetic_linear_fit() {
        let pts: Vec<([f64; 2], f64)> = [[1.0, 0.0], [0.0, 1.0], [2.0, -1.0], [3.0, 5.0]]
            .iter()
            .map(|&[a, b]| ([a, b], 2.0 * a + 3.0 * b))
            .collect();
        let fit = fit_rho_points(&pts).unwrap();
        assert!((fit.rho[0] - 2.0).abs() < 1e-12 && (fit.rho[1] - 3.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let col: Vec<([f64; 2], f64)> = (1..4).map(|k| ([0.0, k as f64], k as f64)).collect();
        assert!(matches!(fit_rho_points(&col), Err(FppError::DegenerateFit(_))));
    }

    #[test]
    fn unit_weights_vertical_direction() {
        let f = WeightField::generate(Rect::new(-6, 6, -2, 40).unwrap(), 0, Distribution::unit()).unwrap();
        let anchors: Vec<Point> = (30..=40).map(|n| Point::new(0, n)).collect();
        let mut samples = Vec::new();
        for y in [Point::new(0, 1), Point::new(0, 2), Point::new(0, 3), Point::new(1, 0), Point::new(-1, 0)] {
            let s = busemann_along(&f, Point::ORIGIN, y, &anchors, Restriction::Full, BusemannSide::Plain).unwrap();
            let expect = if y.x == 0 { y.y } else { -1 };
            assert_eq!(s.converged_value.map(Time::as_f64), Some(f64::from(expect)));
            samples.push(s);
        }
        let fit = fit_rho(&samples).unwrap();
        assert_eq!(fit.rho, [0.0, 1.0]);
        assert_eq!(fit.residual, 1.0);
    }

    #[test]
    fn csv_row_format() {
        let f = make_field(4, 1, Distribution::unit()).unwrap();
        let s = busemann_along(&f, Point::ORIGIN, Point::new(0, 1), &[Point::new(0, 3)], Restriction::Full, BusemannSide::Plain)
            .unwrap();
        assert_eq!(s.csv_row(9), "9,\"(0, 0)\",\"(0, 1)\",plain,full,1,0");
    }
}
