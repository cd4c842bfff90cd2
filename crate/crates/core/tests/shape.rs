use std::f64::consts::FRAC_PI_2;

use fpp_core::shape::{estimate_shape, grid_targets, DirectionEstimate};
use fpp_core::Distribution;

fn exp1() -> Distribution {
    Distribution::exponential(1.0).unwrap()
}

fn nearest(entries: &[DirectionEstimate], phi: f64) -> &DirectionEstimate {
    entries
        .iter()
        .min_by(|a, b| (a.direction - phi).abs().total_cmp(&(b.direction - phi).abs()))
        .unwrap()
}

#[test]
fn diagonal_mirror_agrees_within_ci() {
    let est = estimate_shape(&exp1(), 17, 24, 60, 16).unwrap();
    for e in &est.entries {
        let m = nearest(&est.entries, FRAC_PI_2 - e.direction);
        assert_eq!((m.target.x, m.target.y), (e.target.y, e.target.x));
        // the two estimates share fields, so the summed half-widths are generous
        assert!((e.ghat - m.ghat).abs() <= e.ci + m.ci, "{} vs {}", e.ghat, m.ghat);
    }
}

#[test]
fn grid_is_mirror_symmetric() {
    for n in [5, 16, 33] {
        let g = grid_targets(n, 64).unwrap();
        for &(_, p) in &g {
            assert!(g.iter().any(|&(_, q)| q.x == p.y && q.y == p.x), "n={n}, {p}");
        }
    }
}

#[test]
fn fewer_directions_stray_as_n_doubles() {
    // fraction of directions whose ghat is off the reference by more than eps
    let reference = estimate_shape(&exp1(), 1, 64, 40, 16).unwrap();
    let eps = 0.05;
    let stray = |n: i32| {
        let est = estimate_shape(&exp1(), 2, n, 40, 16).unwrap();
        let bad = est
            .entries
            .iter()
            .filter(|e| {
                let r = nearest(&reference.entries, e.direction).ghat;
                (e.ghat - r).abs() > eps * r
            })
            .count();
        bad as f64 / est.entries.len() as f64
    };
    let (a, b) = (stray(4), stray(16));
    assert!(b <= a, "{a} -> {b}");
    assert!(a > 0.0);
}
