//! Chip-firing moves `CF(Γ₁; l)(x) = −min(l, dist(x, Γ₁))` and the two probe shapes used
//! to locate points: small moves around a finite point and tails cut off towards a point
//! at infinity.

use num_traits::{Signed, Zero};

use crate::curve::{Point, Trail, TrailEnd, TropicalCurve};
use crate::error::{Error, Result};
use crate::ext::{ExtRational, Length, Q};
use crate::ratfun::{Piecewise, RatFun};
use crate::subgraph::{Interval, Subgraph};

// builds a canonical piecewise function from possibly repeated offsets
fn pw(points: Vec<(Q, Q)>, tail: Option<i64>) -> Piecewise {
    let mut out: Vec<(Q, Q)> = Vec::with_capacity(points.len());
    for p in points {
        if out.last().is_none_or(|l| l.0 < p.0) {
            out.push(p);
        }
    }
    Piecewise::new(out, tail).canonical()
}

// −dist(·, [a, b]) on an edge of length `len`
fn neg_dist_to_interval(len: &Length, a: &Q, b: &Length) -> Piecewise {
    let mut pts = vec![(Q::zero(), -a.clone()), (a.clone(), Q::zero())];
    match (b, len) {
        (Length::Infinite, _) => pw(pts, Some(0)),
        (Length::Finite(b), Length::Finite(l)) => {
            pts.push((b.clone(), Q::zero()));
            pts.push((l.clone(), b - l));
            pw(pts, None)
        }
        (Length::Finite(b), Length::Infinite) => {
            pts.push((b.clone(), Q::zero()));
            pw(pts, Some(-1))
        }
    }
}

/// `CF(sub; l)`. `l` may be infinite.
pub fn cf(curve: &TropicalCurve, sub: &Subgraph, l: &Length) -> Result<RatFun> {
    if sub.curve() != curve {
        return Err(Error::CurveMismatch);
    }
    sub.check_chip_firing_support()?;
    if let Length::Finite(l) = l {
        if !l.is_positive() {
            return Err(Error::MalformedFunction(format!("chip-firing length must be positive, got {l}")));
        }
    }
    if curve.is_singleton() {
        return Ok(RatFun::one(curve));
    }

    let boundary: Vec<Point> = sub.boundary_points().into_iter().filter(|p| !curve.is_at_infinity(p)).collect();
    let vdist: Vec<Option<Q>> = (0..curve.vertex_count())
        .map(|v| {
            let p = Point::Vertex(v);
            if sub.contains(&p) {
                return Some(Q::zero());
            }
            boundary.iter().filter_map(|b| curve.distance(&p, b).ok()?.finite().cloned()).min()
        })
        .collect();

    let mut edges = Vec::with_capacity(curve.edge_count());
    for (ei, e) in curve.edges().iter().enumerate() {
        let mut cands: Vec<Piecewise> = Vec::new();
        if let Some(d) = &vdist[e.tail] {
            cands.push(Piecewise::affine(&e.length, -d.clone(), -1));
        }
        if let (Length::Finite(len), Some(d)) = (&e.length, &vdist[e.head]) {
            cands.push(Piecewise::affine(&e.length, -(len + d), 1));
        }
        for iv in sub.intervals().iter().filter(|iv| iv.edge == ei) {
            cands.push(neg_dist_to_interval(&e.length, &iv.from, &iv.to));
        }
        for p in sub.points() {
            if let Point::Edge { edge, offset } = p {
                if *edge == ei {
                    cands.push(neg_dist_to_interval(&e.length, offset, &Length::Finite(offset.clone())));
                }
            }
        }
        let mut f = cands.pop().expect("connected curve with a finite point in the support");
        for c in &cands {
            f = Piecewise::max(&f, c);
        }
        if let Length::Finite(l) = l {
            f = Piecewise::max(&f, &Piecewise::constant(&e.length, -l.clone()));
        }
        edges.push(f);
    }
    RatFun::from_parts(curve, edges, None)
}

/// `CF({x}; ε)` for a finite point `x`.
pub fn cf_point(curve: &TropicalCurve, x: &Point, eps: &Q) -> Result<RatFun> {
    curve.check_point(x)?;
    if curve.is_at_infinity(x) {
        return Err(Error::PointAtInfinity);
    }
    cf(curve, &Subgraph::point(curve, x.clone())?, &Length::Finite(eps.clone()))
}

// closed intervals covering the first `s` units of `trail`
fn trail_prefix(trail: &Trail, s: &Q) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut rest = s.clone();
    for leg in &trail.legs {
        if !rest.is_positive() {
            break;
        }
        let take = match leg.length() {
            Length::Finite(l) if l < rest => l,
            _ => rest.clone(),
        };
        rest -= &take;
        let (from, to) = if leg.forward {
            (leg.lo.clone(), Length::Finite(&leg.lo + &take))
        } else {
            let hi = leg.hi.finite().expect("backward legs are finite");
            (hi - &take, Length::Finite(hi.clone()))
        };
        out.push(Interval { edge: leg.edge, from, to });
    }
    out
}

/// The trail from `y` out to the point at infinity `x` through 2-valent points, if any.
pub(crate) fn ray_to(curve: &TropicalCurve, y: &Point, x: &Point) -> Result<Trail> {
    curve.check_point(x)?;
    curve.check_point(y)?;
    let Point::Vertex(xv) = x else {
        return Err(Error::NotAPointAtInfinity(curve.fmt_point(x)));
    };
    if !curve.is_at_infinity(x) {
        return Err(Error::NotAPointAtInfinity(curve.fmt_point(x)));
    }
    if curve.is_at_infinity(y) {
        return Err(Error::PointNotOnTailEdge(curve.fmt_point(y)));
    }
    curve
        .directions_at(y)?
        .iter()
        .map(|d| curve.follow_to_branch(d))
        .find(|t| t.end == TrailEnd::Infinity(*xv))
        .ok_or_else(|| Error::PointNotOnTailEdge(curve.fmt_point(y)))
}

/// The support `Γ ∖ (y, x]` of a tail probe: `x` is a point at infinity and `y` a finite
/// point from which `x` is reached without passing a branch point.
pub fn tail_support(curve: &TropicalCurve, y: &Point, x: &Point) -> Result<Subgraph> {
    let trail = ray_to(curve, y, x)?;
    let on_trail: Vec<usize> = trail.legs.iter().map(|l| l.edge).collect();
    let mut intervals: Vec<Interval> = (0..curve.edge_count())
        .filter(|e| !on_trail.contains(e))
        .map(|e| Interval { edge: e, from: Q::zero(), to: curve.edge(e).length.clone() })
        .collect();
    let first = &trail.legs[0];
    let len = &curve.edge(first.edge).length;
    let rest = if first.forward {
        Interval { edge: first.edge, from: Q::zero(), to: Length::Finite(first.lo.clone()) }
    } else {
        Interval { edge: first.edge, from: first.hi.finite().expect("finite").clone(), to: len.clone() }
    };
    if Length::Finite(rest.from.clone()) < rest.to {
        intervals.push(rest);
    }
    Subgraph::new(curve, intervals, vec![y.clone()])
}

/// `CF(Γ ∖ (y, x]; ∞)`.
pub fn cf_tail(curve: &TropicalCurve, y: &Point, x: &Point) -> Result<RatFun> {
    if !curve.is_at_infinity(x) {
        return Err(Error::NotAPointAtInfinity(curve.fmt_point(x)));
    }
    cf(curve, &tail_support(curve, y, x)?, &Length::Infinite)
}

/// The point at distance `s` from the start of the tail towards `x`.
pub fn tail_point(curve: &TropicalCurve, x: &Point, s: &Q) -> Result<Point> {
    curve.tail_toward(x)?.point_at(curve, s)
}

/// Splits `CF({x}; ε)` into one summand per half-edge at `x`: the `i`-th summand agrees
/// with the move on the `i`-th branch of the ε-ball and satisfies the (⋆) conditions.
/// Requires `ε` no larger than the injectivity radius at `x`.
pub fn half_edge_decomposition(curve: &TropicalCurve, x: &Point, eps: &Q) -> Result<Vec<RatFun>> {
    let f = cf_point(curve, x, eps)?;
    if Length::Finite(eps.clone()) > curve.injectivity_radius(x)? {
        return Err(Error::BadProbeGeometry(format!("ε = {eps} exceeds the injectivity radius")));
    }
    let floor = RatFun::constant_q(curve, -eps.clone());
    let mut parts = Vec::new();
    for dir in curve.directions_at(x)? {
        let trail = curve.follow_to_branch(&dir);
        let seg = Subgraph::new(curve, trail_prefix(&trail, eps), vec![x.clone()])?;
        let g = f.odot(&cf(curve, &seg, &Length::Finite(eps.clone()))?)?.oplus(&floor)?;
        parts.push(g);
    }
    Ok(parts)
}

/// Zeros of `f` met along `trail` strictly after distance `from` and no later than `to`.
fn zeros_on_trail(f: &RatFun, trail: &Trail, from: &Q, to: &Length, open_start: bool) -> Result<usize> {
    let curve = f.curve();
    let div = f.divisor()?;
    Ok(div
        .zeros()
        .filter(|(p, _)| !curve.is_at_infinity(p))
        .filter_map(|(p, _)| trail.position_of(curve, p))
        .filter(|s| if open_start { s > from } else { s >= from })
        .filter(|s| to.finite().is_none_or(|t| s <= t))
        .count())
}

/// Condition (⋆) for summands of a probe `CF({x}; ε)`.
pub fn check_star(parts: &[RatFun], x: &Point, eps: &Q) -> Result<bool> {
    let Some(first) = parts.first() else { return Ok(false) };
    let curve = first.curve();
    if parts.iter().any(|p| p.curve() != curve) {
        return Err(Error::CurveMismatch);
    }
    curve.check_point(x)?;
    if curve.is_at_infinity(x) {
        return Err(Error::BadProbeGeometry("(⋆) needs a finite point".into()));
    }
    if !eps.is_positive() || Length::Finite(eps.clone()) > curve.injectivity_radius(x)? {
        return Err(Error::BadProbeGeometry(format!("ε = {eps} is not within the injectivity radius")));
    }
    let trails: Vec<Trail> = curve.directions_at(x)?.iter().map(|d| curve.follow_to_branch(d)).collect();
    for g in parts {
        if g.is_bottom() || g.max_value() != ExtRational::zero() || g.min_value() != ExtRational::Finite(-eps.clone()) {
            return Ok(false);
        }
        for t in &trails {
            if zeros_on_trail(g, t, &Q::zero(), &Length::Finite(eps.clone()), true)? != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Condition (⋆⋆) for summands of the inverse of a tail probe `CF(Γ ∖ (y, x]; ∞)`.
pub fn check_star_star(parts: &[RatFun], y: &Point, x: &Point) -> Result<bool> {
    let Some(first) = parts.first() else { return Ok(false) };
    let curve = first.curve();
    if parts.iter().any(|p| p.curve() != curve) {
        return Err(Error::CurveMismatch);
    }
    let trail = match ray_to(curve, y, x) {
        Ok(t) => t,
        Err(e) => return Err(Error::BadProbeGeometry(e.to_string())),
    };
    for g in parts {
        if g.is_bottom() || g.max_value() != ExtRational::PosInf || g.min_value() != ExtRational::zero() {
            return Ok(false);
        }
        if zeros_on_trail(g, &trail, &Q::zero(), &Length::Infinite, false)? != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{q, qi};
    use crate::fixtures;

    fn at(c: &TropicalCurve, s: &str) -> Point {
        c.parse_point(s).unwrap()
    }

    // −min(l, dist) sampled directly from the curve metric
    fn oracle(c: &TropicalCurve, sub_pts: &[Point], l: &ExtRational, p: &Point) -> ExtRational {
        let d = sub_pts.iter().map(|s| c.distance(p, s).unwrap()).min().unwrap();
        -(d.min(l.clone()))
    }

    fn samples(c: &TropicalCurve) -> Vec<Point> {
        let mut out: Vec<Point> = (0..c.vertex_count()).map(Point::Vertex).collect();
        for (ei, e) in c.edges().iter().enumerate() {
            let top = e.length.finite().cloned().unwrap_or(qi(9));
            for k in 1..24 {
                let t = &top * q(k, 24);
                out.push(c.point_on_edge(ei, &t).unwrap());
            }
        }
        out
    }

    #[test]
    fn seg3_point_move() {
        let c = fixtures::seg3();
        let f = cf_point(&c, &at(&c, "v0"), &qi(1)).unwrap();
        assert_eq!(f.eval(&at(&c, "v0")).unwrap(), ExtRational::zero());
        assert_eq!(f.eval(&at(&c, "e0@1/2")).unwrap(), ExtRational::Finite(q(-1, 2)));
        assert_eq!(f.eval(&at(&c, "e0@5/2")).unwrap(), ExtRational::Finite(qi(-1)));
        let g = cf(&c, &Subgraph::point(&c, at(&c, "v0")).unwrap(), &Length::Infinite).unwrap();
        assert_eq!(g.eval(&at(&c, "v1")).unwrap(), ExtRational::Finite(qi(-3)));
    }

    #[test]
    fn whole_curve_gives_zero() {
        for c in [fixtures::seg3(), fixtures::theta(), fixtures::star3(), fixtures::circ2()] {
            let f = cf(&c, &Subgraph::whole(&c), &Length::Finite(qi(2))).unwrap();
            assert_eq!(f.as_constant(), Some(ExtRational::zero()));
        }
    }

    #[test]
    fn matches_metric_oracle_at_points() {
        for c in [fixtures::seg3(), fixtures::theta(), fixtures::circ2(), fixtures::star3(), fixtures::line()] {
            let pts = samples(&c);
            for x in pts.iter().filter(|p| !c.is_at_infinity(p)).step_by(7) {
                for l in [q(1, 3), qi(1), qi(5)] {
                    let f = cf_point(&c, x, &l).unwrap();
                    for p in &pts {
                        if c.is_at_infinity(p) {
                            continue;
                        }
                        assert_eq!(
                            f.eval(p).unwrap(),
                            oracle(&c, std::slice::from_ref(x), &ExtRational::Finite(l.clone()), p)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn circle_and_star_divisors() {
        let c = fixtures::circ2();
        let d = cf_point(&c, &at(&c, "v0"), &q(1, 2)).unwrap().divisor().unwrap();
        assert_eq!(d.order(&at(&c, "v0")), -2);
        assert_eq!(d.order(&at(&c, "loop@1/2")), 1);
        assert_eq!(d.order(&at(&c, "loop@3/2")), 1);

        let s = fixtures::star3();
        let d = cf_point(&s, &at(&s, "c"), &qi(1)).unwrap().divisor().unwrap();
        assert_eq!(d.order(&at(&s, "c")), -3);
        for r in ["ray1@1", "ray2@1", "ray3@1"] {
            assert_eq!(d.order(&at(&s, r)), 1);
        }
        assert_eq!(d.len(), 4);
    }

    #[test]
    fn shrink_identity() {
        let c = fixtures::theta();
        let x = at(&c, "e1@1/4");
        let big = cf_point(&c, &x, &q(1, 4)).unwrap();
        let small = cf_point(&c, &x, &q(1, 8)).unwrap();
        assert!(small.equals(&big.oplus(&RatFun::constant_q(&c, q(-1, 8))).unwrap()).unwrap());
    }

    #[test]
    fn point_at_infinity_is_rejected() {
        let r = fixtures::ray();
        assert_eq!(cf_point(&r, &at(&r, "v1"), &qi(1)).unwrap_err(), Error::PointAtInfinity);
    }

    #[test]
    fn ray_tail_probe() {
        let r = fixtures::ray();
        let x = at(&r, "v1");
        let f = cf_tail(&r, &at(&r, "e0@1"), &x).unwrap();
        assert_eq!(f.eval(&at(&r, "v0")).unwrap(), ExtRational::zero());
        assert_eq!(f.eval(&at(&r, "e0@1")).unwrap(), ExtRational::zero());
        assert_eq!(f.eval(&at(&r, "e0@4")).unwrap(), ExtRational::Finite(qi(-3)));
        assert_eq!(f.eval(&x).unwrap(), ExtRational::NegInf);
        assert_eq!(f.min_value(), ExtRational::NegInf);
        assert_eq!(f.argmin_set().unwrap().single_point(), Some(&x));
        assert!(matches!(cf_tail(&r, &at(&r, "e0@1"), &at(&r, "v0")), Err(Error::NotAPointAtInfinity(_))));
    }

    #[test]
    fn tail_probe_must_reach_x_without_branching() {
        let s = fixtures::star3();
        assert!(matches!(cf_tail(&s, &at(&s, "ray2@1"), &at(&s, "i1")), Err(Error::PointNotOnTailEdge(_))));
        let f = cf_tail(&s, &at(&s, "c"), &at(&s, "i1")).unwrap();
        assert_eq!(f.eval(&at(&s, "ray2@7")).unwrap(), ExtRational::zero());
        assert_eq!(f.eval(&at(&s, "ray1@7")).unwrap(), ExtRational::Finite(qi(-7)));

        // on the line, the ray from y may pass the gluing vertex
        let l = fixtures::line();
        let f = cf_tail(&l, &at(&l, "e1@1"), &at(&l, "vpos")).unwrap();
        assert_eq!(f.eval(&at(&l, "vneg")).unwrap(), ExtRational::zero());
        assert_eq!(f.eval(&at(&l, "v0")).unwrap(), ExtRational::Finite(qi(-1)));
        assert_eq!(f.eval(&at(&l, "e0@3")).unwrap(), ExtRational::Finite(qi(-4)));
    }

    #[test]
    fn tail_clamp_moves_the_cut() {
        let r = fixtures::ray();
        let x = at(&r, "v1");
        let f = cf_tail(&r, &at(&r, "e0@1"), &x).unwrap();
        // (f ⊙ a) clamped at 0 is the probe cut a units further out
        let shifted = f.shift(&qi(2)).min_with(&qi(0)).unwrap();
        assert!(shifted.equals(&cf_tail(&r, &at(&r, "e0@3"), &x).unwrap()).unwrap());
    }

    #[test]
    fn decomposition_satisfies_star() {
        for (c, x, eps) in [
            (fixtures::seg3(), "e0@3/2", q(1, 2)),
            (fixtures::circ2(), "v0", q(1, 2)),
            (fixtures::star3(), "c", qi(1)),
            (fixtures::theta(), "v0", q(1, 3)),
        ] {
            let x = at(&c, x);
            let f = cf_point(&c, &x, &eps).unwrap();
            let parts = half_edge_decomposition(&c, &x, &eps).unwrap();
            assert_eq!(parts.len(), c.valence(&x).unwrap());
            assert!(f.is_irredundant(&parts).unwrap());
            assert!(check_star(&parts, &x, &eps).unwrap());
            let shifted: Vec<RatFun> = parts.iter().map(|g| g.shift(&qi(-1))).collect();
            assert!(!check_star(&shifted, &x, &eps).unwrap());
        }
    }

    #[test]
    fn star_star_on_tails() {
        let r = fixtures::ray();
        let (y, x) = (at(&r, "e0@1"), at(&r, "v1"));
        let g = cf_tail(&r, &y, &x).unwrap().oinv().unwrap();
        assert!(check_star_star(std::slice::from_ref(&g), &y, &x).unwrap());
        // a summand with two zeros on [y, x)
        let breaks = vec![(qi(0), qi(0)), (qi(1), qi(0)), (qi(2), qi(1)), (qi(3), qi(1))];
        let two = RatFun::from_parts(&r, vec![Piecewise::new(breaks, Some(1))], None).unwrap();
        assert!(!check_star_star(&[two], &y, &x).unwrap());
        assert!(matches!(check_star_star(&[g], &y, &at(&r, "v0")), Err(Error::BadProbeGeometry(_))));
    }
}
