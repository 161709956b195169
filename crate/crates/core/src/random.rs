//! Seeded random functions and points for property runs.
//!
//! Everything is driven by a ChaCha8 stream, so a seed fixes the output on every platform.
//! The test suites use [`DEFAULT_SEED`] unless told otherwise.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{Point, TropicalCurve};
use crate::ext::{qi, Length, Q};
use crate::ratfun::{Piecewise, RatFun};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const MAX_SLOPE: i64 = 3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational strictly between `lo` and `hi`, on a grid of 24 steps.
pub fn q_between(rng: &mut impl Rng, lo: &Q, hi: &Q) -> Q {
    let n = rng.gen_range(1..24);
    lo + (hi - lo) * Q::new(n.into(), 24.into())
}

/// A small rational `n/d` with `|n/d| ≤ bound` and `d ∈ {1, 2, 3, 4}`.
pub fn small_q(rng: &mut impl Rng, bound: i64) -> Q {
    let d = rng.gen_range(1..=4i64);
    let n = rng.gen_range(-bound * d..=bound * d);
    Q::new(n.into(), d.into())
}

fn slope(rng: &mut impl Rng) -> i64 {
    rng.gen_range(-MAX_SLOPE..=MAX_SLOPE)
}

/// Breakpoints from `(0, a)` to `(len, b)` with integer slopes in `[−3, 3]`, if the random
/// draw allows it.
fn finite_edge(rng: &mut impl Rng, len: &Q, a: &Q, b: &Q) -> Option<Vec<(Q, Q)>> {
    let mut breaks = vec![(Q::zero(), a.clone())];
    let k = rng.gen_range(0..=2);
    let mut x = Q::zero();
    let mut v = a.clone();
    for _ in 0..k {
        let nx = q_between(rng, &x, &(len / qi(2)));
        v += qi(slope(rng)) * (&nx - &x);
        x = nx;
        breaks.push((x.clone(), v.clone()));
    }
    // close with two slopes s then s′ meeting at some x* in (x, len]
    let d = len - &x;
    let mut pairs: Vec<(i64, i64)> = (-MAX_SLOPE..=MAX_SLOPE)
        .flat_map(|s| (-MAX_SLOPE..=MAX_SLOPE).map(move |t| (s, t)))
        .filter(|(s, t)| s != t)
        .collect();
    pairs.shuffle(rng);
    for (s, t) in pairs {
        let xs = &x + (b - &v - qi(t) * &d) / qi(s - t);
        if xs > x && xs <= *len {
            let vs = &v + qi(s) * (&xs - &x);
            breaks.push((xs.clone(), vs));
            if xs < *len {
                breaks.push((len.clone(), b.clone()));
            }
            return Some(breaks);
        }
    }
    None
}

fn infinite_edge(rng: &mut impl Rng, a: &Q) -> Piecewise {
    let mut breaks = vec![(Q::zero(), a.clone())];
    let mut x = Q::zero();
    let mut v = a.clone();
    for _ in 0..rng.gen_range(0..=2) {
        let nx = q_between(rng, &x, &(&x + qi(3)));
        v += qi(slope(rng)) * (&nx - &x);
        x = nx;
        breaks.push((x.clone(), v.clone()));
    }
    Piecewise::new(breaks, Some(slope(rng)))
}

fn attempt(curve: &TropicalCurve, rng: &mut impl Rng, values: &[Q]) -> Option<RatFun> {
    let mut edges = Vec::with_capacity(curve.edge_count());
    for e in curve.edges() {
        let a = &values[e.tail];
        edges.push(match &e.length {
            Length::Finite(l) => Piecewise::new(finite_edge(rng, l, a, &values[e.head])?, None),
            Length::Infinite => infinite_edge(rng, a),
        });
    }
    RatFun::from_parts(curve, edges, None).ok()
}

/// A random non-`−∞` function: random finite vertex values, then random breakpoints on each
/// edge with slopes in `[−3, 3]`. Falls back to equal vertex values when the draw keeps
/// failing (very short edges).
pub fn random_function(curve: &TropicalCurve, rng: &mut impl Rng) -> RatFun {
    if curve.is_singleton() {
        return RatFun::constant_q(curve, small_q(rng, 3));
    }
    for round in 0..40 {
        let spread = if round < 20 { 2 } else { 0 };
        let base = small_q(rng, 3);
        let values: Vec<Q> = (0..curve.vertex_count()).map(|_| &base + small_q(rng, spread)).collect();
        if let Some(f) = attempt(curve, rng, &values) {
            return f;
        }
    }
    unreachable!("equal vertex values always admit a function")
}

/// Like [`random_function`], but `−∞` with probability 1/20.
pub fn random_function_or_bottom(curve: &TropicalCurve, rng: &mut impl Rng) -> RatFun {
    if rng.gen_ratio(1, 20) {
        RatFun::bottom(curve)
    } else {
        random_function(curve, rng)
    }
}

/// A random finite point: a vertex one time in five, otherwise a random offset on a random
/// edge (within 6 of the finite end on infinite edges).
pub fn random_point(curve: &TropicalCurve, rng: &mut impl Rng) -> Point {
    let finite: Vec<usize> = (0..curve.vertex_count()).filter(|&v| !curve.is_infinite_vertex(v)).collect();
    if curve.edge_count() == 0 || rng.gen_ratio(1, 5) {
        return Point::Vertex(*finite.choose(rng).expect("a finite vertex"));
    }
    let e = rng.gen_range(0..curve.edge_count());
    let hi = match &curve.edge(e).length {
        Length::Finite(l) => l.clone(),
        Length::Infinite => qi(6),
    };
    curve.point_on_edge(e, &q_between(rng, &Q::zero(), &hi)).expect("offset within the edge")
}

/// A random positive rational up to `hi`, on a grid of 24 steps.
pub fn positive_q(rng: &mut impl Rng, hi: &Q) -> Q {
    q_between(rng, &Q::zero(), hi)
}
