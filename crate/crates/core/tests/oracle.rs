mod common;

use common::{brute_force, random_point};
use fpp_core::experiments::midpoint::{midpoint_box, midpoint_indicator};
use fpp_core::order::{extremal_proxy, Side};
use fpp_core::{geodesic, geodesic_tree, passage_time, Distribution, EdgeId, Point, Rect, Restriction, SectorSpec, WeightField};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn exp1() -> Distribution {
    Distribution::exponential(1.0).unwrap()
}

#[test]
fn geodesics_match_enumeration_on_small_boxes() {
    let rect = Rect::square(2).unwrap();
    let mut rng = StdRng::seed_from_u64(1);
    for seed in 0..20u64 {
        let f = WeightField::generate(rect, seed, exp1()).unwrap();
        for _ in 0..4 {
            let (x, y) = (random_point(&mut rng, &rect), random_point(&mut rng, &rect));
            let (t, path) = brute_force(&f, x, y, Restriction::Full);
            let g = geodesic(&f, x, y, Restriction::Full).unwrap();
            assert_eq!(g.time, t, "seed {seed}, {x} -> {y}");
            assert_eq!(g.vertices, path, "seed {seed}, {x} -> {y}");
            assert_eq!(passage_time(&f, x, y, Restriction::Full).unwrap(), t);
        }
    }
}

#[test]
fn half_plane_geodesics_match_enumeration() {
    let rect = Rect::new(-2, 2, -2, 2).unwrap();
    let upper = Rect::new(-2, 2, 0, 2).unwrap();
    let mut rng = StdRng::seed_from_u64(2);
    for seed in 0..20u64 {
        let f = WeightField::generate(rect, seed, Distribution::uniform(0.5, 1.5).unwrap()).unwrap();
        let (x, y) = (random_point(&mut rng, &upper), random_point(&mut rng, &upper));
        let (t, path) = brute_force(&f, x, y, Restriction::HalfPlane);
        let g = geodesic(&f, x, y, Restriction::HalfPlane).unwrap();
        assert_eq!((g.time, &g.vertices), (t, &path), "seed {seed}");
        assert!(g.vertices.iter().all(|p| p.y >= 0));
    }
}

#[test]
fn unit_weight_ties_follow_the_lexicographic_rule() {
    for rect in [Rect::square(1).unwrap(), Rect::new(-2, 1, -1, 1).unwrap()] {
        let f = WeightField::generate(rect, 0, Distribution::unit()).unwrap();
        for x in rect.points() {
            for y in rect.points() {
                let (t, path) = brute_force(&f, x, y, Restriction::Full);
                let g = geodesic(&f, x, y, Restriction::Full).unwrap();
                assert_eq!(t.as_f64(), x.l1_dist(y) as f64);
                assert_eq!(g.vertices, path, "{x} -> {y}");
            }
        }
    }
}

#[test]
fn tree_paths_equal_pairwise_geodesics() {
    let rect = Rect::square(2).unwrap();
    for (seed, dist) in [(3, exp1()), (4, Distribution::unit())] {
        let f = WeightField::generate(rect, seed, dist).unwrap();
        let targets: Vec<Point> = rect.points().collect();
        let tree = geodesic_tree(&f, Point::new(-1, 0), &targets, Restriction::Full).unwrap();
        for &y in &targets {
            let (_, path) = brute_force(&f, Point::new(-1, 0), y, Restriction::Full);
            assert_eq!(tree.path_to(y).unwrap(), path);
        }
    }
}

#[test]
fn midpoint_on_a_forced_straight_path() {
    // cheap edges along the axis, expensive elsewhere
    let rect = midpoint_box(2, Some(2)).unwrap();
    assert_eq!(rect, Rect::new(-2, 4, -2, 2).unwrap());
    let cheap = |e: EdgeId| {
        let (a, b) = e.endpoints();
        a.y == 0 && b.y == 0 && a.x >= 0 && b.x <= 2
    };
    let f = WeightField::from_fn(rect, |e| Ok(if cheap(e) { 0.25 } else { 1.0 })).unwrap();
    let small = WeightField::from_fn(Rect::new(-1, 3, -2, 2).unwrap(), |e| Ok(if cheap(e) { 0.25 } else { 1.0 })).unwrap();
    let (t, path) = brute_force(&small, Point::ORIGIN, Point::new(2, 0), Restriction::Full);
    assert_eq!(path, vec![Point::new(0, 0), Point::new(1, 0), Point::new(2, 0)]);
    let (hit, time) = midpoint_indicator(&f, 2).unwrap();
    assert!(hit);
    assert_eq!(time, t.as_f64());
}

#[test]
fn half_and_full_proxies_agree_when_the_vertical_path_dominates() {
    // the column x = 0 is cheap, so both proxies climb straight up
    let rect = Rect::new(-2, 2, -2, 4).unwrap();
    let f = WeightField::from_fn(rect, |e| {
        let (a, b) = e.endpoints();
        Ok(if a.x == 0 && b.x == 0 { 0.1 } else { 1.0 + f64::from(a.x.abs() + a.y.abs()) / 8.0 })
    })
    .unwrap();
    let sector = SectorSpec::vertical_lattice(0, 4).unwrap();
    let full = extremal_proxy(&f, Point::ORIGIN, Side::L, &sector, 4, Restriction::Full).unwrap();
    let half = extremal_proxy(&f, Point::ORIGIN, Side::L, &sector, 4, Restriction::HalfPlane).unwrap();
    let (_, oracle) = brute_force(&f, Point::ORIGIN, Point::new(0, 4), Restriction::Full);
    assert_eq!(full.path.vertices, oracle);
    assert_eq!(full.path.vertices, half.path.vertices);
    assert_eq!(full.path.vertices, (0..=4).map(|y| Point::new(0, y)).collect::<Vec<_>>());
}
