mod common;

use common::zoo;
use num_traits::Signed;
use proptest::prelude::*;
use rand::Rng;
use tropical_core::ext::{q, qi};
use tropical_core::random::{q_between, random_point, rng};
use tropical_core::{build_curve, fixtures, ExtRational, Length, Point, TropicalCurve, Q};

/// `curve` with `n` random interior subdivisions.
fn subdivided(curve: &TropicalCurve, n: usize, seed: u64) -> TropicalCurve {
    let mut r = rng(seed);
    let mut c = curve.clone();
    for _ in 0..n {
        if c.edge_count() == 0 {
            break;
        }
        let e = r.gen_range(0..c.edge_count());
        let hi = match &c.edge(e).length {
            Length::Finite(l) => l.clone(),
            Length::Infinite => qi(4),
        };
        c = c.subdivide(e, &q_between(&mut r, &qi(0), &hi)).unwrap();
    }
    c
}

fn zoo_curve(i: usize) -> TropicalCurve {
    let z = zoo();
    z[i % z.len()].1.clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn genus_survives_subdivision(i in 0usize..6, n in 1usize..5, seed in any::<u64>()) {
        let c = zoo_curve(i);
        prop_assert_eq!(subdivided(&c, n, seed).genus(), c.genus());
    }

    #[test]
    fn distance_is_a_metric(i in 0usize..6, seed in any::<u64>()) {
        let c = zoo_curve(i);
        let mut r = rng(seed);
        let (a, b, p) = (random_point(&c, &mut r), random_point(&c, &mut r), random_point(&c, &mut r));
        let d = |x: &Point, y: &Point| c.distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &a), ExtRational::zero());
        prop_assert_eq!(d(&a, &b) == ExtRational::zero(), a == b);
        prop_assert!(d(&a, &b) <= d(&a, &p).checked_add(&d(&p, &b)).unwrap());
    }

    #[test]
    fn canonical_model_is_isometric(i in 0usize..6, n in 0usize..4, seed in any::<u64>()) {
        let c = subdivided(&zoo_curve(i), n, seed);
        let model = c.canonical_model();
        let k = build_curve(&model).unwrap();
        let mut here: Vec<Point> = Vec::new();
        let mut there: Vec<Point> = Vec::new();
        for v in c.canonical_vertices() {
            here.push(Point::Vertex(v));
            there.push(k.vertex(c.vertex_id(v)).unwrap());
        }
        for ((_, trail), me) in c.canonical_trails().iter().zip(&model.edges) {
            let s = match &trail.length {
                Length::Finite(l) => l * q(1, 2),
                Length::Infinite => qi(1),
            };
            here.push(trail.point_at(&c, &s).unwrap());
            there.push(k.point_on_edge(k.edge_by_id(&me.id).unwrap(), &s).unwrap());
        }
        for (a, ka) in here.iter().zip(&there) {
            for (b, kb) in here.iter().zip(&there) {
                prop_assert_eq!(c.distance(a, b).unwrap(), k.distance(ka, kb).unwrap());
            }
        }
    }

    #[test]
    fn star_infinite_iff_every_canonical_edge_is_infinite(i in 0usize..6, n in 0usize..4, seed in any::<u64>()) {
        let c = subdivided(&zoo_curve(i), n, seed);
        let all_infinite = c.canonical_model().edges.iter().all(|e| e.length.is_infinite());
        prop_assert_eq!(c.is_star_infinite(), all_infinite);
        prop_assert_eq!(c.is_star_infinite(), zoo_curve(i).is_star_infinite());
    }
}

#[test]
fn points_at_infinity_are_leaves() {
    for (name, c) in zoo() {
        for x in c.points_at_infinity() {
            assert_eq!(c.valence(&x).unwrap(), 1, "{name}");
        }
    }
}

fn coord_on(c: &TropicalCurve, p: &Point) -> (usize, Q) {
    match p {
        Point::Vertex(v) => {
            let e = c.edges().iter().position(|e| e.tail == *v || e.head == *v).unwrap();
            let off = if c.edge(e).tail == *v { qi(0) } else { c.edge(e).length.finite().unwrap().clone() };
            (e, off)
        }
        Point::Edge { edge, offset } => (*edge, offset.clone()),
    }
}

/// Closed-form distances on the fixtures with a single cycle or a single branch point.
#[test]
fn distances_match_closed_forms() {
    let mut r = rng(3);
    let circ = fixtures::circ2();
    for _ in 0..100 {
        let (a, b) = (random_point(&circ, &mut r), random_point(&circ, &mut r));
        let (s, t) = (coord_on(&circ, &a).1, coord_on(&circ, &b).1);
        let d = (&s - &t).abs();
        let want = d.clone().min(qi(2) - d);
        assert_eq!(circ.distance(&a, &b).unwrap(), ExtRational::Finite(want));
    }
    // THETA: three unit edges between v0 (offset 0) and v1 (offset 1)
    let theta = fixtures::theta();
    for _ in 0..100 {
        let (a, b) = (random_point(&theta, &mut r), random_point(&theta, &mut r));
        let ((ea, s), (eb, t)) = (coord_on(&theta, &a), coord_on(&theta, &b));
        let direct = if ea == eb { (&s - &t).abs() } else { qi(2) };
        let want = direct.min(&s + &t).min(qi(2) - &s - &t);
        assert_eq!(theta.distance(&a, &b).unwrap(), ExtRational::Finite(want));
    }
    let star = fixtures::star3();
    for _ in 0..100 {
        let (a, b) = (random_point(&star, &mut r), random_point(&star, &mut r));
        let ((ea, s), (eb, t)) = (coord_on(&star, &a), coord_on(&star, &b));
        let want = if ea == eb { (&s - &t).abs() } else { &s + &t };
        assert_eq!(star.distance(&a, &b).unwrap(), ExtRational::Finite(want));
    }
}
