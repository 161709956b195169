#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tropical_core::ext::{q, qi};
use tropical_core::fixtures;
use tropical_core::morphism::{canonical_search, circle_map, line_map, star_map};
use tropical_core::random::{q_between, small_q};
use tropical_core::{ExpansiveMap, Point, TropicalCurve, Q};

/// The fixtures with at least one edge.
pub fn zoo() -> Vec<(&'static str, TropicalCurve)> {
    ["SEG3", "RAY", "LINE", "STAR3", "CIRC2", "THETA"].into_iter().map(|n| (n, fixtures::by_name(n).unwrap())).collect()
}

pub fn at(c: &TropicalCurve, s: &str) -> Point {
    c.parse_point(s).unwrap()
}

/// Signed coordinate of a finite point of LINE: `e0` is the positive ray.
pub fn line_coord(c: &TropicalCurve, p: &Point) -> Q {
    match p {
        Point::Vertex(v) => {
            assert_eq!(c.vertex_id(*v), "v0");
            qi(0)
        }
        Point::Edge { edge, offset } if c.edge(*edge).length.is_infinite() => {
            if *edge == 0 {
                offset.clone()
            } else {
                -offset.clone()
            }
        }
        _ => panic!("not a LINE point"),
    }
}

fn shift(rng: &mut ChaCha8Rng) -> Q {
    let s = small_q(rng, 3);
    if s == qi(0) {
        q(1, 2)
    } else {
        s
    }
}

/// Twenty maps: automorphisms of CIRC2, THETA, LINE and STAR3, then dilations of RAY, LINE
/// and STAR3 with factors in {1/2, 2, 3}. Parameters come from `rng`.
pub fn map_zoo(rng: &mut ChaCha8Rng) -> Vec<(String, ExpansiveMap)> {
    let (circ, theta, line, star, ray) =
        (fixtures::circ2(), fixtures::theta(), fixtures::line(), fixtures::star3(), fixtures::ray());
    let mut out = Vec::new();
    for flip in [false, true, rng.gen()] {
        let s = q_between(rng, &qi(0), &qi(2));
        out.push((format!("CIRC2 rot {s} flip {flip}"), circle_map(&circ, &circ, qi(1), s, flip).unwrap()));
    }
    let mut autos = canonical_search(&theta, &theta, &qi(1));
    autos.shuffle(rng);
    for (i, m) in autos.into_iter().take(4).enumerate() {
        out.push((format!("THETA aut {i}"), m));
    }
    for flip in [false, true, rng.gen()] {
        let s = shift(rng);
        out.push((format!("LINE shift {s} flip {flip}"), line_map(&line, &line, qi(1), s, flip).unwrap()));
    }
    let mut perms = [vec![1, 0, 2], vec![1, 2, 0], vec![2, 1, 0], vec![0, 2, 1], vec![2, 0, 1]];
    perms.shuffle(rng);
    for p in perms.iter().take(3) {
        out.push((format!("STAR3 perm {p:?}"), star_map(&star, &star, p, qi(1)).unwrap()));
    }
    for r in [q(1, 2), qi(3)] {
        out.push((format!("RAY r={r}"), ExpansiveMap::scaled_identity(&ray, r).unwrap()));
    }
    for r in [qi(2), q(1, 2)] {
        let (s, flip) = (shift(rng), rng.gen());
        out.push((format!("LINE r={r} shift {s} flip {flip}"), line_map(&line, &line, r, s, flip).unwrap()));
    }
    for (r, p) in [q(1, 2), qi(2), qi(3)].into_iter().zip(perms.iter().skip(1)) {
        out.push((format!("STAR3 r={r} perm {p:?}"), star_map(&star, &star, p, r).unwrap()));
    }
    assert_eq!(out.len(), 20);
    out
}

/// A finite point that is not a vertex.
pub fn interior_point(c: &TropicalCurve, rng: &mut ChaCha8Rng) -> Point {
    loop {
        let p = tropical_core::random::random_point(c, rng);
        if matches!(p, Point::Edge { .. }) {
            return p;
        }
    }
}

/// A rational in `[−3, 3]` other than 0.
pub fn small_nonzero(rng: &mut ChaCha8Rng) -> Q {
    shift(rng)
}

/// Rotation of CIRC2 by 1/2.
pub fn rotation(c: &TropicalCurve) -> ExpansiveMap {
    circle_map(c, c, qi(1), q(1, 2), false).unwrap()
}
