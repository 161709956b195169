//! Tropical curves, their semifields of rational functions, chip-firing moves, expansive
//! maps between curves, and recovery of such maps from semiring isomorphisms given only as
//! black boxes. All arithmetic is exact over the rationals.

pub mod chipfire;
pub mod curve;
pub mod dot;
pub mod error;
pub mod ext;
pub mod fixtures;
pub mod io;
pub mod morphism;
pub mod random;
pub mod ratfun;
pub mod semiso;
pub mod subgraph;

pub use curve::{build_curve, Direction, Model, ModelEdge, Point, TropicalCurve};
pub use error::{Error, Result};
pub use ext::{ExtRational, Length, Q};
pub use morphism::{make_expansive, ExpansiveMap, Piece};
pub use ratfun::{Divisor, Piecewise, RatFun};
pub use semiso::{pullback, Pullback, SemifieldMap};
pub use subgraph::{Interval, Subgraph};
