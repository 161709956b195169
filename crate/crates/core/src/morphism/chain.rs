//! Maps built from arc-length parametrizations.
//!
//! A [`Chain`] parametrizes a path of a curve by a real interval (possibly unbounded, or a
//! circle of given circumference). An affine change of parameter `s ↦ shift ± r·s` between
//! two chains then determines the pieces of a map.

use num_traits::{One, Zero};

use super::{make_expansive, ExpansiveMap, Piece};
use crate::curve::{Leg, Trail, TrailEnd, TropicalCurve};
use crate::error::{Error, Result};
use crate::ext::{half, qi, ExtRational, Length, Q};

#[derive(Clone, Debug)]
struct Seg {
    leg: Leg,
    lo: ExtRational,
    hi: ExtRational,
}

impl Seg {
    fn offset_at(&self, s: &ExtRational) -> Length {
        match s {
            ExtRational::Finite(s) => Length::Finite(if self.leg.forward {
                &self.leg.lo + (s - self.lo.finite().expect("forward legs start finite"))
            } else {
                &self.leg.lo + (self.hi.finite().expect("backward legs end finite") - s)
            }),
            _ => Length::Infinite,
        }
    }

    fn contains(&self, s: &Q) -> bool {
        let s = ExtRational::Finite(s.clone());
        self.lo <= s && s <= self.hi
    }
}

/// A path parametrized by arc length.
#[derive(Clone, Debug)]
pub struct Chain {
    segs: Vec<Seg>,
    period: Option<Q>,
}

impl Chain {
    /// Parametrizes `legs` so that the start of leg `origin` sits at parameter 0. Only the
    /// first leg may come in from infinity and only the last may run out to it.
    pub fn new(legs: Vec<Leg>, origin: usize) -> Chain {
        let mut segs: Vec<Seg> =
            legs.into_iter().map(|leg| Seg { leg, lo: ExtRational::zero(), hi: ExtRational::zero() }).collect();
        let mut at = ExtRational::zero();
        for seg in segs.iter_mut().skip(origin) {
            seg.lo = at.clone();
            at = match seg.leg.length() {
                Length::Finite(l) => ExtRational::Finite(at.finite().expect("finite").clone() + l),
                Length::Infinite => ExtRational::PosInf,
            };
            seg.hi = at.clone();
        }
        let mut at = ExtRational::zero();
        for seg in segs.iter_mut().take(origin).rev() {
            seg.hi = at.clone();
            at = match seg.leg.length() {
                Length::Finite(l) => ExtRational::Finite(at.finite().expect("finite").clone() - l),
                Length::Infinite => ExtRational::NegInf,
            };
            seg.lo = at.clone();
        }
        Chain { segs, period: None }
    }

    pub fn from_trail(trail: &Trail) -> Chain {
        Chain::new(trail.legs.clone(), 0)
    }

    /// A closed trail read as a circle.
    pub fn periodic(trail: &Trail) -> Chain {
        let mut c = Chain::from_trail(trail);
        c.period = trail.length.finite().cloned();
        c
    }

    /// The same path traversed the other way, starting at 0 again.
    pub fn reversed(&self) -> Chain {
        let legs: Vec<Leg> = self.segs.iter().rev().map(|s| Leg { forward: !s.leg.forward, ..s.leg.clone() }).collect();
        let origin = if legs.first().is_some_and(|l| l.hi.is_infinite()) { legs.len() } else { 0 };
        let mut c = Chain::new(legs, origin);
        c.period = self.period.clone();
        c
    }

    fn lo(&self) -> ExtRational {
        self.segs.first().map_or(ExtRational::zero(), |s| s.lo.clone())
    }

    fn hi(&self) -> ExtRational {
        self.segs.last().map_or(ExtRational::zero(), |s| s.hi.clone())
    }

    fn boundaries(&self) -> Vec<Q> {
        self.segs.iter().flat_map(|s| [s.lo.finite().cloned(), s.hi.finite().cloned()]).flatten().collect()
    }

    fn locate(&self, s: &Q) -> Option<&Seg> {
        self.segs.iter().find(|seg| seg.contains(s))
    }
}

fn floor_div(a: &Q, b: &Q) -> Q {
    Q::from_integer((a / b).floor().to_integer())
}

fn ceil_div(a: &Q, b: &Q) -> Q {
    Q::from_integer((a / b).ceil().to_integer())
}

/// Pieces of the map `s ↦ shift + σ·r·s` (σ = −1 when `flip`) from `src` to `dst`.
pub(crate) fn affine_pieces(src: &Chain, dst: &Chain, r: &Q, shift: &Q, flip: bool) -> Result<Vec<Piece>> {
    let sigma = if flip { -Q::one() } else { Q::one() };
    let m = |s: &ExtRational| -> ExtRational {
        match s {
            ExtRational::Finite(s) => ExtRational::Finite(shift + &sigma * r * s),
            ExtRational::PosInf if flip => ExtRational::NegInf,
            ExtRational::NegInf if flip => ExtRational::PosInf,
            other => other.clone(),
        }
    };
    let pre = |t: &Q| (t - shift) / (&sigma * r);

    let (s_lo, s_hi) = (src.lo(), src.hi());
    let mut cuts: Vec<Q> = src.boundaries();
    match &dst.period {
        None => cuts.extend(dst.boundaries().iter().map(pre)),
        Some(period) => {
            let (a, b) = (m(&s_lo), m(&s_hi));
            let (a, b) = (a.finite().expect("finite circle").clone(), b.finite().expect("finite circle").clone());
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for bd in dst.boundaries() {
                let mut k = floor_div(&(&lo - &bd), period);
                let top = ceil_div(&(&hi - &bd), period);
                while k <= top {
                    cuts.push(pre(&(&bd + &k * period)));
                    k += Q::one();
                }
            }
        }
    }
    cuts.retain(|c| {
        let c = ExtRational::Finite(c.clone());
        s_lo <= c && c <= s_hi
    });
    cuts.sort();
    cuts.dedup();

    let mut bounds: Vec<ExtRational> = Vec::new();
    if !s_lo.is_finite() {
        bounds.push(s_lo.clone());
    }
    bounds.extend(cuts.into_iter().map(ExtRational::Finite));
    if !s_hi.is_finite() {
        bounds.push(s_hi.clone());
    }

    let mut pieces = Vec::new();
    for w in bounds.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let sample = match (a, b) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => (a + b) * half(),
            (ExtRational::NegInf, ExtRational::Finite(b)) => b - qi(1),
            (ExtRational::Finite(a), ExtRational::PosInf) => a + qi(1),
            _ => unreachable!("a chain with no finite junction"),
        };
        let sseg = src.locate(&sample).expect("sample inside the source chain");
        let mut ta = m(a);
        let mut tb = m(b);
        let mut tsample = shift + &sigma * r * &sample;
        if let Some(period) = &dst.period {
            let base = dst.lo().finite().expect("finite circle").clone();
            let k = floor_div(&(&tsample - &base), period);
            let d = &k * period;
            tsample -= &d;
            ta = ExtRational::Finite(ta.finite().expect("finite").clone() - &d);
            tb = ExtRational::Finite(tb.finite().expect("finite").clone() - &d);
        }
        let dseg = dst.locate(&tsample).ok_or_else(|| Error::NotBijective("image leaves the target chain".into()))?;
        let (oa, ob) = (sseg.offset_at(a), sseg.offset_at(b));
        let (da, db) = (dseg.offset_at(&ta), dseg.offset_at(&tb));
        let (src_from, src_to, dst_start) = if oa < ob { (oa, ob, da) } else { (ob, oa, db) };
        let src_from = src_from.finite().cloned().ok_or(Error::InfinityNotPreserved)?;
        let dst_start = dst_start.finite().cloned().ok_or(Error::InfinityNotPreserved)?;
        let reversed = (sseg.leg.forward != dseg.leg.forward) != flip;
        pieces.push(Piece { src_edge: sseg.leg.edge, src_from, src_to, dst_edge: dseg.leg.edge, dst_start, reversed });
    }
    Ok(pieces)
}

fn single_cycle(curve: &TropicalCurve) -> Result<Trail> {
    match curve.canonical_trails().as_slice() {
        [(_, t)] if t.end == TrailEnd::Returned => Ok(t.clone()),
        _ => Err(Error::MalformedModel("the curve is not a circle".into())),
    }
}

/// `s ↦ shift ± r·s` on circles, with `s` the arc length from the canonical vertex.
pub fn circle_map(source: &TropicalCurve, target: &TropicalCurve, r: Q, shift: Q, flip: bool) -> Result<ExpansiveMap> {
    let src = Chain::periodic(&single_cycle(source)?);
    let dst = Chain::periodic(&single_cycle(target)?);
    let pieces = affine_pieces(&src, &dst, &r, &shift, flip)?;
    make_expansive(source, target, r, pieces)
}

/// The doubly infinite line parametrized by `ℝ`, with 0 at the canonical finite vertex and the
/// positive direction along the ray holding the lowest-numbered edge.
pub(crate) fn line_chain(curve: &TropicalCurve) -> Result<Chain> {
    let inf = curve.points_at_infinity();
    let not_line = || Error::MalformedModel("the curve is not a doubly infinite line".into());
    if inf.len() != 2 || curve.genus() != 0 || !curve.is_star_infinite() {
        return Err(not_line());
    }
    let mut rays: Vec<Trail> = inf.iter().map(|x| curve.tail_toward(x)).collect::<Result<_>>()?;
    let min_edge = |t: &Trail| t.legs.iter().map(|l| l.edge).min().unwrap();
    rays.sort_by_key(min_edge);
    let neg = Chain::from_trail(&rays[1]).reversed();
    let mut legs: Vec<Leg> = neg.segs.into_iter().map(|s| s.leg).collect();
    let origin = legs.len();
    legs.extend(rays[0].legs.iter().cloned());
    Ok(Chain::new(legs, origin))
}

/// `s ↦ shift ± r·s` on doubly infinite lines.
pub fn line_map(source: &TropicalCurve, target: &TropicalCurve, r: Q, shift: Q, flip: bool) -> Result<ExpansiveMap> {
    let pieces = affine_pieces(&line_chain(source)?, &line_chain(target)?, &r, &shift, flip)?;
    make_expansive(source, target, r, pieces)
}

/// Sends ray `i` of a star onto ray `perm[i]` of another, scaling by `r`. Rays are ordered
/// by their points at infinity.
pub fn star_map(source: &TropicalCurve, target: &TropicalCurve, perm: &[usize], r: Q) -> Result<ExpansiveMap> {
    let (sr, tr) = (super::rays(source)?, super::rays(target)?);
    if sr.len() != perm.len() || tr.len() != perm.len() {
        return Err(Error::NotBijective("ray counts differ".into()));
    }
    let mut pieces = Vec::new();
    for (i, &j) in perm.iter().enumerate() {
        let dst = tr.get(j).ok_or_else(|| Error::NotBijective(format!("no ray {j}")))?;
        pieces.extend(affine_pieces(&Chain::from_trail(&sr[i]), &Chain::from_trail(dst), &r, &Q::zero(), false)?);
    }
    make_expansive(source, target, r, pieces)
}

/// Sends canonical edge `i` of `source` onto canonical edge `assign[i].0` of `target`
/// (traversed backwards when `assign[i].1`), scaling arc length by `r`.
pub fn canonical_edge_map(
    source: &TropicalCurve,
    target: &TropicalCurve,
    assign: &[(usize, bool)],
    r: Q,
) -> Result<ExpansiveMap> {
    let (st, tt) = (source.canonical_trails(), target.canonical_trails());
    if st.len() != assign.len() {
        return Err(Error::NotBijective("one target edge is needed per source edge".into()));
    }
    let mut pieces = Vec::new();
    for ((_, trail), &(j, back)) in st.iter().zip(assign) {
        let (_, dst) = tt.get(j).ok_or_else(|| Error::NotBijective(format!("no canonical edge {j}")))?;
        let dst = if back {
            if dst.length.is_infinite() {
                return Err(Error::InfinityNotPreserved);
            }
            Chain::from_trail(dst).reversed()
        } else {
            Chain::from_trail(dst)
        };
        pieces.extend(affine_pieces(&Chain::from_trail(trail), &dst, &r, &Q::zero(), false)?);
    }
    make_expansive(source, target, r, pieces)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every valid map with factor `r` that sends canonical edges onto canonical edges, found by
/// trying each assignment whose lengths are compatible. Intended for small curves.
pub fn canonical_search(source: &TropicalCurve, target: &TropicalCurve, r: &Q) -> Vec<ExpansiveMap> {
    if source.is_singleton() || target.is_singleton() {
        return make_expansive(source, target, r.clone(), Vec::new()).into_iter().collect();
    }
    let (st, tt) = (source.canonical_trails(), target.canonical_trails());
    if st.len() != tt.len() || st.len() > 7 {
        return Vec::new();
    }
    let mut found: Vec<ExpansiveMap> = Vec::new();
    for perm in permutations(st.len()) {
        let fits = perm.iter().enumerate().all(|(i, &j)| st[i].1.length.scale(r) == tt[j].1.length);
        if !fits {
            continue;
        }
        for mask in 0u32..(1 << st.len()) {
            let assign: Vec<(usize, bool)> = perm.iter().enumerate().map(|(i, &j)| (j, mask >> i & 1 == 1)).collect();
            if let Ok(m) = canonical_edge_map(source, target, &assign, r.clone()) {
                if !found.contains(&m) {
                    found.push(m);
                }
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Point;
    use crate::ext::q;
    use crate::fixtures;

    fn at(c: &TropicalCurve, s: &str) -> Point {
        c.parse_point(s).unwrap()
    }

    #[test]
    fn line_parameter_conventions() {
        let l = fixtures::line();
        let phi = line_map(&l, &l, qi(1), qi(1), false).unwrap();
        assert_eq!(phi.apply(&at(&l, "v0")).unwrap(), at(&l, "e0@1"));
        assert_eq!(phi.apply(&at(&l, "e1@3")).unwrap(), at(&l, "e1@2"));
        assert_eq!(phi.apply(&at(&l, "vneg")).unwrap(), at(&l, "vneg"));
        let iota = line_map(&l, &l, qi(1), qi(0), true).unwrap();
        assert_eq!(iota.apply(&at(&l, "e0@5/2")).unwrap(), at(&l, "e1@5/2"));
        assert_eq!(iota.apply(&at(&l, "vpos")).unwrap(), at(&l, "vneg"));
    }

    #[test]
    fn reflections_of_the_circle() {
        let c = fixtures::circ2();
        let refl = circle_map(&c, &c, qi(1), q(1, 2), true).unwrap();
        assert_eq!(refl.apply(&at(&c, "v0")).unwrap(), at(&c, "loop@1/2"));
        assert_eq!(refl.apply(&at(&c, "loop@1/4")).unwrap(), at(&c, "loop@1/4"));
        assert_eq!(refl.compose(&refl).unwrap(), super::super::ExpansiveMap::identity(&c));
        assert!(circle_map(&c, &c, qi(2), qi(0), false).is_err());
    }

    #[test]
    fn theta_has_twelve_automorphisms() {
        let t = fixtures::theta();
        assert_eq!(canonical_search(&t, &t, &qi(1)).len(), 12);
        assert!(canonical_search(&t, &t, &qi(2)).is_empty());
        assert!(canonical_search(&t, &t, &q(1, 2)).is_empty());
    }

    #[test]
    fn finite_curves_admit_no_dilation() {
        for c in [fixtures::seg3(), fixtures::circ2(), fixtures::theta()] {
            for r in [q(1, 2), qi(2), qi(3)] {
                assert!(canonical_search(&c, &c, &r).is_empty());
            }
            assert!(!canonical_search(&c, &c, &qi(1)).is_empty());
        }
    }

    #[test]
    fn subdivided_line_moves_the_origin() {
        // the new vertex "s" sorts before "v0" and becomes the origin
        let l = fixtures::line();
        let sub = l.subdivide(1, &q(3, 2)).unwrap();
        let m = line_map(&l, &sub, qi(2), qi(0), false).unwrap();
        assert_eq!(m.apply(&at(&l, "v0")).unwrap(), at(&sub, "s"));
        assert_eq!(m.apply(&at(&l, "e1@3/4")).unwrap(), at(&sub, "e1.b@3/2"));
        assert_eq!(m.apply(&at(&l, "e0@1/2")).unwrap(), at(&sub, "e1.a@1/2"));
        assert_eq!(m.apply(&at(&l, "e0@1")).unwrap(), at(&sub, "e0@1/2"));
    }
}
