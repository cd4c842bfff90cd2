//! First-passage percolation on the square lattice.
//!
//! Edge weights are i.i.d. and continuous, generated per edge from a seed so
//! that any box, restriction or query order sees the same field. On top of
//! exact passage times and tie-broken geodesics the crate estimates the limit
//! shape, orders geodesics, builds finite proxies for extremal and half-plane
//! geodesics, and estimates Busemann functions. The `experiments` module
//! packages these into reproducible Monte Carlo runs.

pub mod busemann;
pub mod error;
pub mod experiments;
pub mod geodesic;
pub mod lattice;
pub mod order;
pub mod par;
pub mod shape;
pub mod stats;
pub mod weights;

pub use error::{FppError, Result};
pub use geodesic::{geodesic, geodesic_tree, out_set, passage_time, Geodesic, GeodesicTree, ShortestPaths};
pub use lattice::{arg_of, line_points, sector_arc, DualEdge, Point, Rect, Restriction, SectorSpec};
pub use weights::{make_field, replicate_seed, Distribution, EdgeId, Orientation, Time, WeightField};
