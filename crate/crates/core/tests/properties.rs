use std::collections::{BTreeMap, BTreeSet};

use fpp_core::busemann::{busemann_along, halfplane_monotone_check, BusemannSide};
use fpp_core::experiments::{competition_partition, coupling_view, ferromagnet_weight_map};
use fpp_core::order::{compare, extremal_proxy, stable_range, Relation, Side};
use fpp_core::{
    geodesic, geodesic_tree, passage_time, sector_arc, Distribution, DualEdge, EdgeId, Orientation, Point, Rect,
    Restriction, SectorSpec, Time, WeightField,
};
use proptest::prelude::*;

fn exp1() -> Distribution {
    Distribution::exponential(1.0).unwrap()
}

fn point_in(r: i32) -> impl Strategy<Value = Point> {
    (-r..=r, -r..=r).prop_map(|(x, y)| Point::new(x, y))
}

fn upper_point_in(r: i32) -> impl Strategy<Value = Point> {
    (-r..=r, 0..=r).prop_map(|(x, y)| Point::new(x, y))
}

fn edge_in(r: i32) -> impl Strategy<Value = EdgeId> {
    (-r..r, -r..r, any::<bool>()).prop_map(|(x, y, h)| {
        let o = if h { Orientation::Horizontal } else { Orientation::Vertical };
        EdgeId::new(Point::new(x, y), o)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weights_are_stable_under_box_growth(seed in any::<u64>(), e in edge_in(2)) {
        let w: Vec<f64> = [2, 5, 10]
            .iter()
            .map(|&n| WeightField::generate(Rect::square(n).unwrap(), seed, exp1()).unwrap().weight_at(e).unwrap())
            .collect();
        prop_assert_eq!(w[0].to_bits(), w[1].to_bits());
        prop_assert_eq!(w[1].to_bits(), w[2].to_bits());
    }

    #[test]
    fn distinct_edge_sets_have_distinct_sums(
        seed in any::<u64>(),
        a in prop::collection::btree_set(edge_in(4), 1..5),
        b in prop::collection::btree_set(edge_in(4), 1..5),
    ) {
        prop_assume!(a != b);
        let f = WeightField::generate(Rect::square(4).unwrap(), seed, exp1()).unwrap();
        let sum = |s: &BTreeSet<EdgeId>| s.iter().map(|&e| f.time_at(e).unwrap()).sum::<Time>();
        prop_assert_ne!(sum(&a), sum(&b));
    }

    #[test]
    fn uniform_weights_stay_in_support(seed in any::<u64>()) {
        let f = WeightField::generate(Rect::square(3).unwrap(), seed, Distribution::uniform(0.5, 1.5).unwrap()).unwrap();
        for e in f.edges() {
            let w = f.weight_at(e).unwrap();
            prop_assert!(w > 0.5 && w < 1.5, "{}", w);
        }
    }

    #[test]
    fn sector_arcs_grow_with_eps_and_interval(
        t1 in 0.2f64..1.5, dt in 0.0f64..1.0, more in 0.0f64..0.4, e1 in 0.0f64..0.3, de in 0.0f64..0.3, n in 1i32..12,
    ) {
        let rect = Rect::square(14).unwrap();
        let t2 = (t1 + dt).min(3.0);
        let narrow = SectorSpec::new((t1 + t2) / 2.0, t1, t2).unwrap();
        let wide = SectorSpec::new((t1 + t2) / 2.0, (t1 - more).max(0.05), (t2 + more).min(3.1)).unwrap();
        let set = |s: &SectorSpec, eps: f64| sector_arc(s, n, eps, &rect).unwrap().into_iter().collect::<BTreeSet<_>>();
        prop_assert!(set(&narrow, e1).is_subset(&set(&narrow, e1 + de)));
        prop_assert!(set(&narrow, e1).is_subset(&set(&wide, e1)));
        let arc = sector_arc(&narrow, n, e1, &rect).unwrap();
        prop_assert!(arc.windows(2).all(|w| w[0].x < w[1].x));
    }

    #[test]
    fn dual_edges_biject_with_primal_edges(e in edge_in(20)) {
        let d = DualEdge::crossing(e);
        prop_assert_eq!(d.primal(), e);
        prop_assert_eq!(DualEdge::crossing(d.primal()), d);
    }

    #[test]
    fn passage_time_is_a_metric(seed in any::<u64>(), x in point_in(6), y in point_in(6), z in point_in(6)) {
        let f = WeightField::generate(Rect::square(6).unwrap(), seed, exp1()).unwrap();
        let t = |a, b| passage_time(&f, a, b, Restriction::Full).unwrap();
        prop_assert_eq!(t(x, x), Time::ZERO);
        if x != y {
            prop_assert!(t(x, y) > Time::ZERO);
        }
        prop_assert_eq!(t(x, y), t(y, x));
        prop_assert!(t(x, z) <= t(x, y) + t(y, z));
    }

    #[test]
    fn half_plane_times_dominate(seed in any::<u64>(), x in upper_point_in(6), y in upper_point_in(6)) {
        let f = WeightField::generate(Rect::square(6).unwrap(), seed, exp1()).unwrap();
        prop_assert!(
            passage_time(&f, x, y, Restriction::HalfPlane).unwrap() >= passage_time(&f, x, y, Restriction::Full).unwrap()
        );
    }

    #[test]
    fn subpaths_of_geodesics_are_geodesics(seed in any::<u64>(), x in point_in(7), y in point_in(7), i in 0usize..64, j in 0usize..64) {
        let f = WeightField::generate(Rect::square(7).unwrap(), seed, exp1()).unwrap();
        for r in [Restriction::Full, Restriction::HalfPlane] {
            if !r.admits(x) || !r.admits(y) {
                continue;
            }
            let g = geodesic(&f, x, y, r).unwrap();
            let (a, b) = (i % g.vertices.len(), j % g.vertices.len());
            let (a, b) = (a.min(b), a.max(b));
            let sub = geodesic(&f, g.vertices[a], g.vertices[b], r).unwrap();
            prop_assert_eq!(&sub.vertices[..], &g.vertices[a..=b]);
            prop_assert_eq!(sub.time, f.path_time(&g.vertices[a..=b]).unwrap());
        }
    }

    #[test]
    fn tree_paths_are_geodesics(seed in any::<u64>(), root in point_in(6), targets in prop::collection::vec(point_in(6), 1..8)) {
        let f = WeightField::generate(Rect::square(6).unwrap(), seed, exp1()).unwrap();
        let tree = geodesic_tree(&f, root, &targets, Restriction::Full).unwrap();
        for leaf in tree.leaves() {
            let path = tree.path_to(leaf).unwrap();
            let g = geodesic(&f, root, leaf, Restriction::Full).unwrap();
            prop_assert_eq!(&path, &g.vertices);
            prop_assert_eq!(f.path_time(&path).unwrap(), g.time);
        }
    }

    #[test]
    fn interior_geodesics_survive_box_growth(seed in any::<u64>(), x in point_in(5), y in point_in(5)) {
        let n = 8;
        let small = WeightField::generate(Rect::square(n).unwrap(), seed, exp1()).unwrap();
        let g = geodesic(&small, x, y, Restriction::Full).unwrap();
        if g.vertices.iter().all(|&p| small.rect().boundary_distance(p) >= 2) {
            let big = WeightField::generate(Rect::square(n + 2).unwrap(), seed, exp1()).unwrap();
            prop_assert_eq!(geodesic(&big, x, y, Restriction::Full).unwrap(), g);
        }
    }

    #[test]
    fn passage_times_are_subadditive_along_a_ray(seed in any::<u64>(), theta in 0.0f64..1.5707) {
        let f = WeightField::generate(Rect::square(14).unwrap(), seed, exp1()).unwrap();
        let p = fpp_core::shape::lattice_target(theta, 6);
        let q = Point::new(2 * p.x, 2 * p.y);
        let t = |a, b| passage_time(&f, a, b, Restriction::Full).unwrap();
        prop_assert!(t(Point::ORIGIN, q) <= t(Point::ORIGIN, p) + t(p, q));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn no_arc_geodesic_is_left_of_the_l_proxy(seed in any::<u64>(), k in 1i32..5) {
        let n = 16;
        let f = WeightField::generate(Rect::square(20).unwrap(), seed, exp1()).unwrap();
        let sector = SectorSpec::vertical_lattice(k, n).unwrap();
        let l = extremal_proxy(&f, Point::ORIGIN, Side::L, &sector, n, Restriction::Full).unwrap();
        let (lo, hi) = stable_range(n);
        for a in sector_arc(&sector, n, 0.0, f.rect()).unwrap() {
            let g = geodesic(&f, Point::ORIGIN, a, Restriction::Full).unwrap();
            prop_assert!(l.target().x <= a.x);
            let v = compare(&l.path, &g, lo, hi).unwrap();
            prop_assert_ne!(v.relation, Relation::LeftPrecedes, "arc point {}", a);
        }
    }

    #[test]
    fn proxies_are_consistent_along_their_path(seed in any::<u64>(), i in 0usize..100) {
        let n = 16;
        let f = WeightField::generate(Rect::square(20).unwrap(), seed, exp1()).unwrap();
        let sector = SectorSpec::vertical_lattice(3, n).unwrap();
        for side in [Side::L, Side::R] {
            let p = extremal_proxy(&f, Point::ORIGIN, side, &sector, n, Restriction::HalfPlane).unwrap();
            let k = i % p.path.len();
            let y = p.path.vertices[k];
            let q = extremal_proxy(&f, y, side, &sector, n, Restriction::HalfPlane).unwrap();
            prop_assert_eq!(&q.path.vertices[..], &p.path.vertices[k..]);
        }
    }

    #[test]
    fn busemann_identities_hold_exactly(seed in any::<u64>(), x in upper_point_in(3), y in upper_point_in(3), z in upper_point_in(3)) {
        let n = 16;
        let f = WeightField::generate(Rect::square(20).unwrap(), seed, exp1()).unwrap();
        let sector = SectorSpec::vertical_lattice(1, n).unwrap();
        let r = Restriction::HalfPlane;
        let proxy = extremal_proxy(&f, Point::ORIGIN, Side::L, &sector, n, r).unwrap();
        let a = &proxy.path.vertices;
        let b = |u, v| busemann_along(&f, u, v, a, r, BusemannSide::L).unwrap();
        let (xy, yx, yz, xz) = (b(x, y), b(y, x), b(y, z), b(x, z));
        if let (Some(u), Some(v)) = (xy.converged_value, yx.converged_value) {
            prop_assert_eq!(u, -v);
        }
        if let (Some(u), Some(v), Some(w)) = (xy.converged_value, yz.converged_value, xz.converged_value) {
            prop_assert_eq!(u + v, w);
        }
        for s in [&xy, &yx, &yz, &xz] {
            if let Some(v) = s.converged_value {
                prop_assert!(v.abs() <= passage_time(&f, s.x, s.y, r).unwrap());
            }
        }
        let m = halfplane_monotone_check(&f, x, Point::ORIGIN, &proxy).unwrap();
        prop_assert!(m.monotone, "first violation {:?}", m.first_violation);
    }

    #[test]
    fn competition_clusters_partition_and_connect(seed in any::<u64>(), x in point_in(5), y in point_in(5)) {
        prop_assume!(x != y);
        let f = WeightField::generate(Rect::square(6).unwrap(), seed, exp1()).unwrap();
        let c = competition_partition(&f, x, y).unwrap();
        prop_assert_eq!(c.cluster_size(0) + c.cluster_size(1), f.rect().num_vertices());
        prop_assert!(c.is_connected(0) && c.is_connected(1));
        for d in &c.interface {
            let (a, b) = d.primal().endpoints();
            prop_assert_ne!(c.owner_of(a), c.owner_of(b));
        }
    }

    #[test]
    fn coupling_round_trip_is_exact(values in prop::collection::vec(0.01f64..100.0, 40)) {
        let rect = Rect::square(2).unwrap();
        let dual: BTreeMap<DualEdge, f64> = WeightField::generate(rect, 0, Distribution::unit())
            .unwrap()
            .edges()
            .zip(values.iter().cycle())
            .map(|(e, &v)| (DualEdge::crossing(e), v))
            .collect();
        let f = ferromagnet_weight_map(&dual, rect).unwrap();
        let back = coupling_view(&f).unwrap();
        prop_assert_eq!(back.len(), dual.len());
        for (d, v) in &dual {
            prop_assert_eq!(back[d].to_bits(), v.to_bits());
        }
    }
}
