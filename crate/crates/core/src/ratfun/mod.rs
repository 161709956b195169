//! The semifield `Rat(Γ)` of rational functions on a tropical curve.
//!
//! A non-bottom function is stored edge by edge as a canonical [`Piecewise`]; values at
//! points at infinity are the limits determined by the tail slopes. Canonical storage
//! makes equality structural.

mod divisor;
mod piecewise;

pub use divisor::Divisor;
pub use piecewise::Piecewise;

use num_traits::Zero;

use crate::curve::End;
use crate::curve::{Point, TropicalCurve};
use crate::error::{Error, Result};
use crate::ext::{qi, ExtRational, Length, Q};
use crate::subgraph::{Interval, Subgraph};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Body {
    Bottom,
    Finite { edges: Vec<Piecewise>, vertex_values: Vec<ExtRational> },
}

/// An element of `Rat(Γ)`: either the constant `−∞` or a continuous piecewise-affine
/// function with integer slopes, finite away from the points at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFun {
    curve: TropicalCurve,
    body: Body,
}

impl RatFun {
    /// The additive zero, constant `−∞`.
    pub fn bottom(curve: &TropicalCurve) -> Self {
        RatFun { curve: curve.clone(), body: Body::Bottom }
    }

    /// Embeds an element of `T = Q ∪ {−∞}`.
    pub fn constant(curve: &TropicalCurve, c: &ExtRational) -> Result<Self> {
        match c {
            ExtRational::PosInf => Err(Error::PlusInfinityConstant),
            ExtRational::NegInf => Ok(Self::bottom(curve)),
            ExtRational::Finite(v) => {
                let edges = curve.edges().iter().map(|e| Piecewise::constant(&e.length, v.clone())).collect();
                Self::from_parts(curve, edges, Some(v.clone()))
            }
        }
    }

    pub fn constant_q(curve: &TropicalCurve, c: Q) -> Self {
        Self::constant(curve, &ExtRational::Finite(c)).expect("finite constant")
    }

    /// The multiplicative identity.
    pub fn one(curve: &TropicalCurve) -> Self {
        Self::constant_q(curve, Q::zero())
    }

    /// Builds a function from one piecewise description per edge (in edge order).
    /// `singleton_value` is used only on the one-point curve.
    pub fn from_parts(curve: &TropicalCurve, edges: Vec<Piecewise>, singleton_value: Option<Q>) -> Result<Self> {
        if edges.len() != curve.edge_count() {
            return Err(Error::MalformedFunction(format!(
                "expected {} edge pieces, got {}",
                curve.edge_count(),
                edges.len()
            )));
        }
        if curve.is_singleton() {
            let v = singleton_value
                .ok_or_else(|| Error::MalformedFunction("a value is required on the one-point curve".into()))?;
            return Ok(RatFun { curve: curve.clone(), body: Body::Finite { edges, vertex_values: vec![v.into()] } });
        }
        let mut canon = Vec::with_capacity(edges.len());
        for (e, piece) in curve.edges().iter().zip(edges) {
            piece.validate(&e.length, &e.id)?;
            canon.push(piece.canonical());
        }
        let mut vertex_values: Vec<Option<ExtRational>> = vec![None; curve.vertex_count()];
        for (v, slot) in vertex_values.iter_mut().enumerate() {
            for &(ei, end) in curve.incidence(v) {
                let val = match end {
                    End::Tail => ExtRational::Finite(canon[ei].start_value().clone()),
                    End::Head => canon[ei].end_value(),
                };
                match slot {
                    None => *slot = Some(val),
                    Some(prev) if *prev == val => {}
                    Some(prev) => {
                        return Err(Error::MalformedFunction(format!(
                            "vertex {} gets values {prev} and {val}",
                            curve.vertex_id(v)
                        )))
                    }
                }
            }
        }
        let vertex_values = vertex_values.into_iter().map(|v| v.expect("every vertex has an edge")).collect();
        Ok(RatFun { curve: curve.clone(), body: Body::Finite { edges: canon, vertex_values } })
    }

    pub fn curve(&self) -> &TropicalCurve {
        &self.curve
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self.body, Body::Bottom)
    }

    /// Canonical per-edge data (`None` for the bottom element).
    pub fn pieces(&self) -> Option<&[Piecewise]> {
        match &self.body {
            Body::Bottom => None,
            Body::Finite { edges, .. } => Some(edges),
        }
    }

    pub fn vertex_value(&self, v: usize) -> ExtRational {
        match &self.body {
            Body::Bottom => ExtRational::NegInf,
            Body::Finite { vertex_values, .. } => vertex_values[v].clone(),
        }
    }

    fn same_curve(&self, other: &Self) -> Result<()> {
        if self.curve == other.curve {
            Ok(())
        } else {
            Err(Error::CurveMismatch)
        }
    }

    pub fn eval(&self, p: &Point) -> Result<ExtRational> {
        self.curve.check_point(p)?;
        Ok(match (&self.body, p) {
            (Body::Bottom, _) => ExtRational::NegInf,
            (Body::Finite { vertex_values, .. }, Point::Vertex(v)) => vertex_values[*v].clone(),
            (Body::Finite { edges, .. }, Point::Edge { edge, offset }) => {
                ExtRational::Finite(edges[*edge].eval(offset))
            }
        })
    }

    fn zip_with(
        &self,
        other: &Self,
        edge_op: impl Fn(&Piecewise, &Piecewise) -> Piecewise,
        point_op: impl Fn(&Q, &Q) -> Q,
    ) -> Result<Self> {
        let (Body::Finite { edges: a, vertex_values: va }, Body::Finite { edges: b, vertex_values: vb }) =
            (&self.body, &other.body)
        else {
            unreachable!("bottom handled by callers")
        };
        let edges = a.iter().zip(b).map(|(x, y)| edge_op(x, y)).collect();
        let single = match (va[0].finite(), vb[0].finite()) {
            (Some(x), Some(y)) if self.curve.is_singleton() => Some(point_op(x, y)),
            _ => None,
        };
        Self::from_parts(&self.curve, edges, single)
    }

    /// Tropical sum: pointwise maximum.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        self.same_curve(other)?;
        match (&self.body, &other.body) {
            (Body::Bottom, _) => Ok(other.clone()),
            (_, Body::Bottom) => Ok(self.clone()),
            _ => self.zip_with(other, Piecewise::max, |x, y| x.max(y).clone()),
        }
    }

    /// Tropical product: pointwise sum, extended to points at infinity by continuity.
    pub fn odot(&self, other: &Self) -> Result<Self> {
        self.same_curve(other)?;
        match (&self.body, &other.body) {
            (Body::Bottom, _) | (_, Body::Bottom) => Ok(Self::bottom(&self.curve)),
            _ => self.zip_with(other, Piecewise::sum, |x, y| x + y),
        }
    }

    /// Multiplicative inverse `−f`.
    pub fn oinv(&self) -> Result<Self> {
        match &self.body {
            Body::Bottom => Err(Error::InvertBottom),
            Body::Finite { edges, vertex_values } => Ok(RatFun {
                curve: self.curve.clone(),
                body: Body::Finite {
                    edges: edges.iter().map(Piecewise::neg).collect(),
                    vertex_values: vertex_values.iter().map(|v| -v.clone()).collect(),
                },
            }),
        }
    }

    /// `f ⊙ c` for a rational constant `c`.
    pub fn shift(&self, c: &Q) -> Self {
        match &self.body {
            Body::Bottom => self.clone(),
            Body::Finite { edges, vertex_values } => RatFun {
                curve: self.curve.clone(),
                body: Body::Finite {
                    edges: edges.iter().map(|p| p.map_values(|v| v + c)).collect(),
                    vertex_values: vertex_values
                        .iter()
                        .map(|v| match v {
                            ExtRational::Finite(x) => ExtRational::Finite(x + c),
                            other => other.clone(),
                        })
                        .collect(),
                },
            },
        }
    }

    /// `f^{⊙n}` for an integer exponent (`n < 0` inverts first).
    pub fn pow(&self, n: i64) -> Result<Self> {
        if n == 0 {
            return Ok(Self::one(&self.curve));
        }
        let base = if n < 0 { self.oinv()? } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..n.unsigned_abs() {
            acc = acc.odot(&base)?;
        }
        Ok(acc)
    }

    /// Pointwise `min(f, c)`, computed as `(f^{⊙(−1)} ⊕ (−c))^{⊙(−1)}`.
    pub fn min_with(&self, c: &Q) -> Result<Self> {
        let neg_c = Self::constant_q(&self.curve, -c.clone());
        self.oinv()?.oplus(&neg_c)?.oinv()
    }

    /// Exact equality as functions on the curve.
    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.same_curve(other)?;
        Ok(self.body == other.body)
    }

    /// The partial order of an idempotent semiring: `f ≥ g` iff `f ⊕ g = f`.
    pub fn ge(&self, other: &Self) -> Result<bool> {
        self.oplus(other)?.equals(self)
    }

    /// The constant value, if the function is constant.
    pub fn as_constant(&self) -> Option<ExtRational> {
        match &self.body {
            Body::Bottom => Some(ExtRational::NegInf),
            Body::Finite { edges, vertex_values } => {
                let c = vertex_values[0].finite()?.clone();
                let flat = vertex_values.iter().all(|v| v.finite() == Some(&c))
                    && edges
                        .iter()
                        .all(|p| p.breaks().iter().all(|(_, v)| *v == c) && p.tail_slope().unwrap_or(0) == 0);
                flat.then_some(ExtRational::Finite(c))
            }
        }
    }

    pub fn max_value(&self) -> ExtRational {
        match &self.body {
            Body::Bottom => ExtRational::NegInf,
            Body::Finite { edges, vertex_values } => {
                let breaks = edges.iter().flat_map(|p| p.breaks().iter().map(|(_, v)| ExtRational::Finite(v.clone())));
                vertex_values.iter().cloned().chain(breaks).max().expect("non-empty")
            }
        }
    }

    pub fn min_value(&self) -> ExtRational {
        match &self.body {
            Body::Bottom => ExtRational::NegInf,
            Body::Finite { edges, vertex_values } => {
                let breaks = edges.iter().flat_map(|p| p.breaks().iter().map(|(_, v)| ExtRational::Finite(v.clone())));
                vertex_values.iter().cloned().chain(breaks).min().expect("non-empty")
            }
        }
    }

    /// Where the maximum is attained, as maximal closed intervals and isolated points.
    pub fn argmax_set(&self) -> Result<Subgraph> {
        let Body::Finite { edges, vertex_values } = &self.body else {
            return Err(Error::BottomFunction);
        };
        let top = self.max_value();
        let mut points: Vec<Point> =
            vertex_values.iter().enumerate().filter(|(_, v)| **v == top).map(|(i, _)| Point::Vertex(i)).collect();
        let mut intervals = Vec::new();
        if let ExtRational::Finite(m) = &top {
            for (ei, piece) in edges.iter().enumerate() {
                let b = piece.breaks();
                for (i, (x, v)) in b.iter().enumerate() {
                    if v != m {
                        continue;
                    }
                    if let Some((x1, v1)) = b.get(i + 1) {
                        if v1 == m {
                            intervals.push(Interval { edge: ei, from: x.clone(), to: Length::Finite(x1.clone()) });
                            continue;
                        }
                    }
                    if i + 1 == b.len() && piece.tail_slope() == Some(0) {
                        intervals.push(Interval { edge: ei, from: x.clone(), to: Length::Infinite });
                        continue;
                    }
                    points.push(self.curve.point_on_edge(ei, x)?);
                }
            }
        }
        Subgraph::new(&self.curve, intervals, points)
    }

    pub fn argmin_set(&self) -> Result<Subgraph> {
        self.oinv().map_err(|_| Error::BottomFunction)?.argmax_set()
    }

    /// Orders of zeros (positive) and poles (negative): the sum of outgoing slopes at each
    /// point, with the outgoing slope at a point at infinity being minus the incoming one.
    pub fn divisor(&self) -> Result<Divisor> {
        let Body::Finite { edges, .. } = &self.body else {
            return Err(Error::BottomFunction);
        };
        let mut div = Divisor::new();
        for (ei, piece) in edges.iter().enumerate() {
            let e = self.curve.edge(ei);
            let slopes = piece.slopes();
            let breaks = piece.breaks();
            div.add_at(Point::Vertex(e.tail), slopes[0]);
            let interior_end = if piece.tail_slope().is_some() { breaks.len() } else { breaks.len() - 1 };
            for i in 1..interior_end {
                div.add_at(self.curve.point_on_edge(ei, &breaks[i].0)?, slopes[i] - slopes[i - 1]);
            }
            div.add_at(Point::Vertex(e.head), -slopes[slopes.len() - 1]);
        }
        Ok(div)
    }

    /// Probe points at which two functions on this curve must differ if they differ at
    /// all: vertices, every breakpoint, and one point past the last breakpoint of each tail.
    pub(crate) fn probe_points(&self, other: &Self) -> Vec<Point> {
        let mut pts: Vec<Point> = (0..self.curve.vertex_count()).map(Point::Vertex).collect();
        for ei in 0..self.curve.edge_count() {
            let mut far = Q::zero();
            for f in [self, other] {
                if let Some(pieces) = f.pieces() {
                    for (x, _) in pieces[ei].breaks() {
                        if let Ok(p) = self.curve.point_on_edge(ei, x) {
                            pts.push(p);
                        }
                        if *x > far {
                            far = x.clone();
                        }
                    }
                }
            }
            if self.curve.edge(ei).length.is_infinite() {
                pts.push(self.curve.point_on_edge(ei, &(far + qi(1))).expect("inside an infinite edge"));
            }
        }
        pts.sort();
        pts.dedup();
        pts
    }

    /// A point where `self` and `other` take different values, with both values.
    pub fn difference_witness(&self, other: &Self) -> Result<Option<(Point, ExtRational, ExtRational)>> {
        self.same_curve(other)?;
        for p in self.probe_points(other) {
            let (a, b) = (self.eval(&p)?, other.eval(&p)?);
            if a != b {
                return Ok(Some((p, a, b)));
            }
        }
        Ok(None)
    }

    /// `true` iff `f = ⊕ parts` and no single summand can be dropped.
    pub fn is_irredundant(&self, parts: &[RatFun]) -> Result<bool> {
        for p in parts {
            self.same_curve(p)?;
        }
        let sum = |skip: Option<usize>| -> Result<RatFun> {
            let mut acc = RatFun::bottom(&self.curve);
            for (i, p) in parts.iter().enumerate() {
                if Some(i) != skip {
                    acc = acc.oplus(p)?;
                }
            }
            Ok(acc)
        };
        if !sum(None)?.equals(self)? {
            return Ok(false);
        }
        for j in 0..parts.len() {
            if sum(Some(j))?.equals(self)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chipfire::cf_point;
    use crate::ext::q;
    use crate::fixtures;

    fn line_on_seg3() -> RatFun {
        let seg = fixtures::seg3();
        RatFun::from_parts(&seg, vec![Piecewise::affine(&Length::Finite(qi(3)), qi(0), 1)], None).unwrap()
    }

    #[test]
    fn constants() {
        let seg = fixtures::seg3();
        let zero = RatFun::one(&seg);
        assert_eq!(zero.as_constant(), Some(ExtRational::zero()));
        assert!(RatFun::constant(&seg, &ExtRational::NegInf).unwrap().is_bottom());
        assert_eq!(RatFun::constant(&seg, &ExtRational::PosInf).unwrap_err(), Error::PlusInfinityConstant);
        let circ = fixtures::circ2();
        let c = RatFun::constant_q(&circ, q(5, 2));
        assert!(c.divisor().unwrap().is_empty());
        assert_eq!(c.eval(&circ.vertex("v0").unwrap()).unwrap(), ExtRational::Finite(q(5, 2)));
    }

    #[test]
    fn eval_examples() {
        let seg = fixtures::seg3();
        let f = cf_point(&seg, &seg.vertex("v0").unwrap(), &qi(1)).unwrap();
        assert_eq!(f.eval(&seg.parse_point("e0@2").unwrap()).unwrap(), ExtRational::Finite(qi(-1)));
        let b = RatFun::bottom(&seg);
        assert_eq!(b.eval(&seg.parse_point("e0@2").unwrap()).unwrap(), ExtRational::NegInf);
        let three = RatFun::constant_q(&seg, qi(3));
        assert_eq!(three.eval(&seg.vertex("v0").unwrap()).unwrap(), ExtRational::Finite(qi(3)));
    }

    #[test]
    fn oplus_of_line_and_constant_breaks_at_crossing() {
        let seg = fixtures::seg3();
        let g = line_on_seg3().oplus(&RatFun::constant_q(&seg, q(3, 2))).unwrap();
        let breaks = g.pieces().unwrap()[0].breaks();
        assert!(breaks.iter().any(|(x, _)| *x == q(3, 2)));
        assert_eq!(breaks.len(), 3);
    }

    #[test]
    fn inverse_and_identity() {
        let f = line_on_seg3();
        let seg = f.curve().clone();
        assert!(f.odot(&RatFun::one(&seg)).unwrap().equals(&f).unwrap());
        assert_eq!(f.odot(&f.oinv().unwrap()).unwrap().as_constant(), Some(ExtRational::zero()));
        assert_eq!(RatFun::bottom(&seg).oinv().unwrap_err(), Error::InvertBottom);
    }

    #[test]
    fn infinite_values_cancel_under_odot() {
        let ray = fixtures::ray();
        let f = RatFun::from_parts(&ray, vec![Piecewise::affine(&Length::Infinite, qi(0), -1)], None).unwrap();
        assert_eq!(f.eval(&ray.vertex("v1").unwrap()).unwrap(), ExtRational::NegInf);
        let g = f.odot(&f.oinv().unwrap()).unwrap();
        assert_eq!(g.as_constant(), Some(ExtRational::zero()));
    }

    #[test]
    fn min_with_examples() {
        let seg = fixtures::seg3();
        let five = RatFun::constant_q(&seg, qi(5));
        assert_eq!(five.min_with(&qi(2)).unwrap().as_constant(), Some(ExtRational::Finite(qi(2))));
        let f = line_on_seg3();
        assert!(f.min_with(&qi(3)).unwrap().equals(&f).unwrap());
        let clamped = f.min_with(&qi(1)).unwrap();
        assert_eq!(clamped.eval(&seg.vertex("v1").unwrap()).unwrap(), ExtRational::Finite(qi(1)));
        assert_eq!(RatFun::bottom(&seg).min_with(&qi(1)).unwrap_err(), Error::InvertBottom);
    }

    #[test]
    fn equality_is_exact() {
        let seg = fixtures::seg3();
        let a = RatFun::one(&seg);
        let b = RatFun::constant_q(&seg, q(1, 1_000_000_000));
        assert!(!a.equals(&b).unwrap());
        let redundant = RatFun::from_parts(
            &seg,
            vec![Piecewise::new(vec![(qi(0), qi(0)), (qi(1), qi(1)), (qi(3), qi(3))], None)],
            None,
        )
        .unwrap();
        assert!(redundant.equals(&line_on_seg3()).unwrap());
        assert_eq!(a.equals(&RatFun::one(&fixtures::circ2())).unwrap_err(), Error::CurveMismatch);
    }

    #[test]
    fn extrema_of_chip_firing_move() {
        let seg = fixtures::seg3();
        let f = cf_point(&seg, &seg.vertex("v0").unwrap(), &qi(1)).unwrap();
        assert_eq!(f.max_value(), ExtRational::zero());
        assert_eq!(f.min_value(), ExtRational::Finite(qi(-1)));
        assert_eq!(f.argmax_set().unwrap().single_point(), Some(&seg.vertex("v0").unwrap()));
        let argmin = f.argmin_set().unwrap();
        assert_eq!(argmin.intervals().len(), 1);
        assert_eq!(argmin.intervals()[0].from, qi(1));
        assert!(argmin.contains(&seg.vertex("v1").unwrap()));
        assert_eq!(RatFun::bottom(&seg).argmax_set().unwrap_err(), Error::BottomFunction);

        let c = RatFun::constant_q(&seg, qi(7));
        assert_eq!(c.argmax_set().unwrap(), Subgraph::whole(&seg));
    }

    #[test]
    fn divisor_examples() {
        let seg = fixtures::seg3();
        let f = cf_point(&seg, &seg.vertex("v0").unwrap(), &qi(1)).unwrap();
        let d = f.divisor().unwrap();
        assert_eq!(d.order(&seg.vertex("v0").unwrap()), -1);
        assert_eq!(d.order(&seg.parse_point("e0@1").unwrap()), 1);
        assert_eq!(d.len(), 2);

        let x = seg.parse_point("e0@3/2").unwrap();
        let g = cf_point(&seg, &x, &q(1, 4)).unwrap();
        let d = g.divisor().unwrap();
        assert_eq!(d.order(&x), -2);
        assert_eq!(d.order(&seg.parse_point("e0@5/4").unwrap()), 1);
        assert_eq!(d.order(&seg.parse_point("e0@7/4").unwrap()), 1);
        assert_eq!(d.degree(), 0);
    }

    #[test]
    fn divisor_at_infinity_uses_tail_slope() {
        let ray = fixtures::ray();
        let f = RatFun::from_parts(&ray, vec![Piecewise::affine(&Length::Infinite, qi(0), -2)], None).unwrap();
        let d = f.divisor().unwrap();
        assert_eq!(d.order(&ray.vertex("v0").unwrap()), -2);
        assert_eq!(d.order(&ray.vertex("v1").unwrap()), 2);
    }

    #[test]
    fn irredundancy() {
        let seg = fixtures::seg3();
        let g = line_on_seg3();
        let h = g.oinv().unwrap().shift(&qi(3));
        let f = g.oplus(&h).unwrap();
        assert!(f.is_irredundant(&[g.clone(), h.clone()]).unwrap());
        assert!(!f.is_irredundant(&[g.clone(), h.clone(), g.clone()]).unwrap());
        assert!(!f.is_irredundant(std::slice::from_ref(&g)).unwrap());
        let _ = seg;
    }

    #[test]
    fn singleton_functions_are_constants() {
        let pt = fixtures::pt();
        let a = RatFun::constant_q(&pt, qi(2));
        let b = RatFun::constant_q(&pt, qi(-5));
        assert_eq!(a.oplus(&b).unwrap().as_constant(), Some(ExtRational::Finite(qi(2))));
        assert_eq!(a.odot(&b).unwrap().as_constant(), Some(ExtRational::Finite(qi(-3))));
        assert!(a.divisor().unwrap().is_empty());
        assert_eq!(a.argmax_set().unwrap().single_point(), Some(&Point::Vertex(0)));
    }
}
