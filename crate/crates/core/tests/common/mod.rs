#![allow(dead_code)]

use fpp_core::{EdgeId, Point, Rect, Restriction, Time, WeightField};
use rand::Rng;

/// Minimum passage time over all simple paths from `x` to `y`, and among the
/// minimizers the lexicographically smallest vertex sequence (points compared
/// by `(y, x)`). Exponential in the box size: for tiny boxes only.
pub fn brute_force(field: &WeightField, x: Point, y: Point, restriction: Restriction) -> (Time, Vec<Point>) {
    struct Search<'a> {
        field: &'a WeightField,
        target: Point,
        restriction: Restriction,
        visited: Vec<bool>,
        path: Vec<Point>,
        best: Option<(Time, Vec<Point>)>,
    }

    impl Search<'_> {
        fn go(&mut self, at: Point, t: Time) {
            if at == self.target {
                let better = match &self.best {
                    None => true,
                    Some((bt, bp)) => t < *bt || (t == *bt && self.path < *bp),
                };
                if better {
                    self.best = Some((t, self.path.clone()));
                }
                return;
            }
            let rect = *self.field.rect();
            for q in at.neighbors() {
                if !rect.contains(q) || !self.restriction.admits(q) || self.visited[rect.index(q)] {
                    continue;
                }
                let w = self.field.time_at(EdgeId::between(at, q).unwrap()).unwrap();
                self.visited[rect.index(q)] = true;
                self.path.push(q);
                self.go(q, t + w);
                self.path.pop();
                self.visited[rect.index(q)] = false;
            }
        }
    }

    let rect = *field.rect();
    let mut s = Search {
        field,
        target: y,
        restriction,
        visited: vec![false; rect.num_vertices()],
        path: vec![x],
        best: None,
    };
    s.visited[rect.index(x)] = true;
    s.go(x, Time::ZERO);
    s.best.expect("target reachable")
}

/// Uniform random point of `rect`.
pub fn random_point(rng: &mut impl Rng, rect: &Rect) -> Point {
    rect.point(rng.random_range(0..rect.num_vertices()))
}
