//! Expansive maps between tropical curves: continuous bijections that multiply every finite
//! distance by a fixed positive rational `r`.
//!
//! A map is stored as pieces, each sending a closed interval of a source edge affinely onto
//! an interval of a target edge. Pieces tile both curves; after validation they are merged
//! into maximal runs, so two maps are equal iff their piece lists are.

mod chain;
mod harmonic;
mod star;

pub use chain::{canonical_edge_map, canonical_search, circle_map, line_map, star_map, Chain};
pub use harmonic::{induced_harmonic, verify_harmonic, HarmonicMorphismData};
pub use star::{closure, has_nonunit_dilation, rays, star_aut_generators};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::curve::{Point, TropicalCurve};
use crate::error::{Error, Result};
use crate::ext::{half, qi, Length, Q};

/// Sends offsets `[src_from, src_to]` of `src_edge` onto `dst_edge`, starting at `dst_start`
/// and moving towards larger offsets unless `reversed`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Piece {
    pub src_edge: usize,
    pub src_from: Q,
    pub src_to: Length,
    pub dst_edge: usize,
    pub dst_start: Q,
    pub reversed: bool,
}

impl Piece {
    fn image_of(&self, r: &Q, t: &Q) -> Q {
        let d = r * (t - &self.src_from);
        if self.reversed {
            &self.dst_start - d
        } else {
            &self.dst_start + d
        }
    }

    fn image_end(&self, r: &Q) -> Length {
        match &self.src_to {
            Length::Finite(t) => Length::Finite(self.image_of(r, t)),
            Length::Infinite => Length::Infinite,
        }
    }

    /// `(lo, hi)` offsets covered on the target edge.
    fn image_range(&self, r: &Q) -> (Q, Length) {
        match (self.reversed, self.image_end(r)) {
            (true, Length::Finite(e)) => (e, Length::Finite(self.dst_start.clone())),
            (_, end) => (self.dst_start.clone(), end),
        }
    }

    fn contains(&self, t: &Q) -> bool {
        *t >= self.src_from && Length::Finite(t.clone()) <= self.src_to
    }

    /// The same correspondence read from the target side.
    fn inverted(&self, r: &Q) -> Piece {
        let (lo, hi) = self.image_range(r);
        let dst_start = if self.reversed {
            self.src_to.finite().expect("reversed pieces are finite").clone()
        } else {
            self.src_from.clone()
        };
        Piece {
            src_edge: self.dst_edge,
            src_from: lo,
            src_to: hi,
            dst_edge: self.src_edge,
            dst_start,
            reversed: self.reversed,
        }
    }
}

#[derive(Debug, Clone)]
struct Table {
    by_edge: Vec<Vec<Piece>>,
    vertex_image: Vec<Point>,
}

impl Table {
    fn apply(&self, r: &Q, target: &TropicalCurve, p: &Point) -> Point {
        match p {
            Point::Vertex(v) => self.vertex_image[*v].clone(),
            Point::Edge { edge, offset } => {
                let piece = self.by_edge[*edge].iter().find(|pc| pc.contains(offset)).expect("pieces tile the edge");
                target.point_on_edge(piece.dst_edge, &piece.image_of(r, offset)).expect("validated image")
            }
        }
    }

    fn pieces(&self) -> impl Iterator<Item = &Piece> {
        self.by_edge.iter().flatten()
    }
}

#[derive(Debug)]
struct MapData {
    source: TropicalCurve,
    target: TropicalCurve,
    r: Q,
    fwd: Table,
    bwd: Table,
}

/// A validated `r`-expansive map. Cloning is cheap.
#[derive(Clone, Debug)]
pub struct ExpansiveMap {
    inner: Arc<MapData>,
}

impl PartialEq for ExpansiveMap {
    fn eq(&self, other: &Self) -> bool {
        self.inner.source == other.inner.source
            && self.inner.target == other.inner.target
            && self.inner.r == other.inner.r
            && self.inner.fwd.by_edge == other.inner.fwd.by_edge
    }
}

impl Eq for ExpansiveMap {}

impl fmt::Display for ExpansiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-expansive map with {} pieces", self.inner.r, self.pieces().len())
    }
}

fn merge(mut pieces: Vec<Piece>, r: &Q) -> Vec<Piece> {
    pieces.sort();
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            if last.src_edge == p.src_edge
                && last.src_to == Length::Finite(p.src_from.clone())
                && last.dst_edge == p.dst_edge
                && last.reversed == p.reversed
                && last.image_end(r) == Length::Finite(p.dst_start.clone())
            {
                last.src_to = p.src_to;
                continue;
            }
        }
        out.push(p);
    }
    out
}

// checks that the sorted intervals tile [0, len]
fn tiles(mut ivs: Vec<(Q, Length)>, len: &Length) -> bool {
    ivs.sort();
    let mut at = Length::Finite(Q::zero());
    for (lo, hi) in ivs {
        if at != Length::Finite(lo) {
            return false;
        }
        at = hi;
    }
    at == *len
}

fn not_bijective(msg: impl Into<String>) -> Error {
    Error::NotBijective(msg.into())
}

/// Validates a piecewise description and builds the map.
pub fn make_expansive(
    source: &TropicalCurve,
    target: &TropicalCurve,
    r: Q,
    pieces: Vec<Piece>,
) -> Result<ExpansiveMap> {
    if !r.is_positive() {
        return Err(Error::FactorViolated(format!("expansion factor must be positive, got {r}")));
    }
    if source.is_singleton() || target.is_singleton() {
        if source.is_singleton() && target.is_singleton() && pieces.is_empty() {
            let table = Table { by_edge: Vec::new(), vertex_image: vec![Point::Vertex(0)] };
            return Ok(ExpansiveMap {
                inner: Arc::new(MapData {
                    source: source.clone(),
                    target: target.clone(),
                    r,
                    fwd: table.clone(),
                    bwd: table,
                }),
            });
        }
        return Err(not_bijective("a one-point curve only corresponds to a one-point curve"));
    }

    for p in &pieces {
        if p.src_edge >= source.edge_count() || p.dst_edge >= target.edge_count() {
            return Err(not_bijective("piece refers to an unknown edge"));
        }
        let src_len = &source.edge(p.src_edge).length;
        if p.src_from.is_negative() || Length::Finite(p.src_from.clone()) >= p.src_to || p.src_to > *src_len {
            return Err(not_bijective(format!(
                "piece [{}, {}] does not fit edge {}",
                p.src_from,
                p.src_to,
                source.edge(p.src_edge).id
            )));
        }
        if p.src_to.is_infinite() && (p.reversed || !target.edge(p.dst_edge).length.is_infinite()) {
            return Err(Error::InfinityNotPreserved);
        }
        let (lo, hi) = p.image_range(&r);
        if lo.is_negative() || hi > target.edge(p.dst_edge).length {
            return Err(Error::FactorViolated(format!(
                "image [{lo}, {hi}] of {}[{}, {}] leaves edge {}",
                source.edge(p.src_edge).id,
                p.src_from,
                p.src_to,
                target.edge(p.dst_edge).id
            )));
        }
    }
    let pieces = merge(pieces, &r);

    let mut by_edge: Vec<Vec<Piece>> = vec![Vec::new(); source.edge_count()];
    let mut images: Vec<Vec<(Q, Length)>> = vec![Vec::new(); target.edge_count()];
    for p in &pieces {
        by_edge[p.src_edge].push(p.clone());
        images[p.dst_edge].push(p.image_range(&r));
    }
    for (e, ps) in by_edge.iter().enumerate() {
        let ivs = ps.iter().map(|p| (p.src_from.clone(), p.src_to.clone())).collect();
        if !tiles(ivs, &source.edge(e).length) {
            return Err(not_bijective(format!("pieces do not tile source edge {}", source.edge(e).id)));
        }
    }
    for (e, ivs) in images.into_iter().enumerate() {
        if !tiles(ivs, &target.edge(e).length) {
            return Err(not_bijective(format!("images do not tile target edge {}", target.edge(e).id)));
        }
    }

    // continuity and injectivity at piece ends
    let mut junction: BTreeMap<Point, Point> = BTreeMap::new();
    for p in &pieces {
        let ends = [
            (source.point_on_edge(p.src_edge, &p.src_from)?, Length::Finite(p.dst_start.clone())),
            (source.point_on_edge_ext(p.src_edge, &p.src_to)?, p.image_end(&r)),
        ];
        for (sp, img) in ends {
            let tp = target.point_on_edge_ext(p.dst_edge, &img)?;
            match junction.get(&sp) {
                Some(prev) if *prev != tp => {
                    return Err(not_bijective(format!(
                        "{} is sent to both {} and {}",
                        source.fmt_point(&sp),
                        target.fmt_point(prev),
                        target.fmt_point(&tp)
                    )))
                }
                _ => {
                    junction.insert(sp, tp);
                }
            }
        }
    }
    let mut inverse_junction: BTreeMap<Point, Point> = BTreeMap::new();
    for (sp, tp) in &junction {
        if source.is_at_infinity(sp) != target.is_at_infinity(tp) {
            return Err(Error::InfinityNotPreserved);
        }
        if let Some(prev) = inverse_junction.insert(tp.clone(), sp.clone()) {
            return Err(not_bijective(format!(
                "{} and {} are both sent to {}",
                source.fmt_point(&prev),
                source.fmt_point(sp),
                target.fmt_point(tp)
            )));
        }
    }
    let vertex_image: Vec<Point> = (0..source.vertex_count())
        .map(|v| junction.get(&Point::Vertex(v)).cloned().ok_or_else(|| not_bijective("vertex not covered")))
        .collect::<Result<_>>()?;
    let mut bwd_edges: Vec<Vec<Piece>> = vec![Vec::new(); target.edge_count()];
    for p in &pieces {
        let q = p.inverted(&r);
        bwd_edges[q.src_edge].push(q);
    }
    for ps in &mut bwd_edges {
        ps.sort();
    }
    let bwd_vertices: Vec<Point> = (0..target.vertex_count())
        .map(|v| inverse_junction.get(&Point::Vertex(v)).cloned().ok_or_else(|| not_bijective("target vertex not hit")))
        .collect::<Result<_>>()?;

    let map = ExpansiveMap {
        inner: Arc::new(MapData {
            source: source.clone(),
            target: target.clone(),
            r,
            fwd: Table { by_edge, vertex_image },
            bwd: Table { by_edge: bwd_edges, vertex_image: bwd_vertices },
        }),
    };
    map.check_distances()?;
    Ok(map)
}

impl ExpansiveMap {
    pub fn source(&self) -> &TropicalCurve {
        &self.inner.source
    }

    pub fn target(&self) -> &TropicalCurve {
        &self.inner.target
    }

    pub fn factor(&self) -> &Q {
        &self.inner.r
    }

    /// Maximal pieces, ordered by source edge and offset.
    pub fn pieces(&self) -> Vec<Piece> {
        self.inner.fwd.pieces().cloned().collect()
    }

    /// Pieces of the inverse map, grouped by target edge.
    pub(crate) fn inverse_pieces_on(&self, target_edge: usize) -> &[Piece] {
        &self.inner.bwd.by_edge[target_edge]
    }

    pub fn identity(curve: &TropicalCurve) -> ExpansiveMap {
        Self::scaled_identity(curve, Q::one()).expect("identity is valid")
    }

    /// The identity correspondence with factor `r`; valid exactly when every edge is infinite
    /// (or the curve is a point).
    pub fn scaled_identity(curve: &TropicalCurve, r: Q) -> Result<ExpansiveMap> {
        let pieces = (0..curve.edge_count())
            .map(|e| Piece {
                src_edge: e,
                src_from: Q::zero(),
                src_to: curve.edge(e).length.clone(),
                dst_edge: e,
                dst_start: Q::zero(),
                reversed: false,
            })
            .collect();
        make_expansive(curve, curve, r, pieces)
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        self.inner.source.check_point(p)?;
        Ok(self.inner.fwd.apply(&self.inner.r, &self.inner.target, p))
    }

    pub fn apply_inverse(&self, q: &Point) -> Result<Point> {
        self.inner.target.check_point(q)?;
        let inv_r = Q::one() / &self.inner.r;
        Ok(self.inner.bwd.apply(&inv_r, &self.inner.source, q))
    }

    pub fn inverse(&self) -> ExpansiveMap {
        let d = &self.inner;
        ExpansiveMap {
            inner: Arc::new(MapData {
                source: d.target.clone(),
                target: d.source.clone(),
                r: Q::one() / &d.r,
                fwd: d.bwd.clone(),
                bwd: d.fwd.clone(),
            }),
        }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ExpansiveMap) -> Result<ExpansiveMap> {
        if first.target() != self.source() {
            return Err(Error::CurveMismatch);
        }
        let (r1, r2) = (first.factor(), self.factor());
        let mut pieces = Vec::new();
        for p in first.pieces() {
            let (lo, hi) = p.image_range(r1);
            for q in &self.inner.fwd.by_edge[p.dst_edge] {
                let j0 = if q.src_from > lo { q.src_from.clone() } else { lo.clone() };
                let j1 = if q.src_to < hi { q.src_to.clone() } else { hi.clone() };
                if Length::Finite(j0.clone()) >= j1 {
                    continue;
                }
                let (from, to, first_img) = if p.reversed {
                    let j1 = j1.finite().expect("reversed pieces are finite");
                    (
                        &p.src_from + (&p.dst_start - j1) / r1,
                        Length::Finite(&p.src_from + (&p.dst_start - &j0) / r1),
                        j1.clone(),
                    )
                } else {
                    let to = match &j1 {
                        Length::Finite(j1) => Length::Finite(&p.src_from + (j1 - &p.dst_start) / r1),
                        Length::Infinite => Length::Infinite,
                    };
                    (&p.src_from + (&j0 - &p.dst_start) / r1, to, j0.clone())
                };
                pieces.push(Piece {
                    src_edge: p.src_edge,
                    src_from: from,
                    src_to: to,
                    dst_edge: q.dst_edge,
                    dst_start: q.image_of(r2, &first_img),
                    reversed: p.reversed != q.reversed,
                });
            }
        }
        make_expansive(first.source(), self.target(), r1 * r2, pieces)
    }

    pub fn is_automorphism(&self) -> Result<bool> {
        if self.source() != self.target() {
            return Err(Error::CurveMismatch);
        }
        Ok(self.inner.r.is_one())
    }

    /// Junctions, piece midpoints and a point one unit into each infinite piece.
    pub fn sample_points(&self) -> Vec<Point> {
        let s = self.source();
        let mut pts: Vec<Point> =
            (0..s.vertex_count()).filter(|&v| !s.is_infinite_vertex(v)).map(Point::Vertex).collect();
        for p in self.inner.fwd.pieces() {
            pts.push(s.point_on_edge(p.src_edge, &p.src_from).expect("valid"));
            let inner = match &p.src_to {
                Length::Finite(t) => (&p.src_from + t) * half(),
                Length::Infinite => &p.src_from + qi(1),
            };
            pts.push(s.point_on_edge(p.src_edge, &inner).expect("valid"));
        }
        pts.retain(|p| !s.is_at_infinity(p));
        pts.sort();
        pts.dedup();
        pts
    }

    fn check_distances(&self) -> Result<()> {
        let (s, t, r) = (self.source(), self.target(), self.factor());
        let pts = self.sample_points();
        let imgs: Vec<Point> = pts.iter().map(|p| self.inner.fwd.apply(r, t, p)).collect();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = s.distance(&pts[i], &pts[j])?.scale(r);
                let di = t.distance(&imgs[i], &imgs[j])?;
                if d != di {
                    return Err(Error::FactorViolated(format!(
                        "dist({}, {}) = {di}, expected {d}",
                        t.fmt_point(&imgs[i]),
                        t.fmt_point(&imgs[j])
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::q;
    use crate::fixtures;

    fn at(c: &TropicalCurve, s: &str) -> Point {
        c.parse_point(s).unwrap()
    }

    fn piece(src_edge: usize, from: Q, to: Length, dst_edge: usize, start: Q, reversed: bool) -> Piece {
        Piece { src_edge, src_from: from, src_to: to, dst_edge, dst_start: start, reversed }
    }

    fn rot_circ2(a: Q) -> ExpansiveMap {
        circle_map(&fixtures::circ2(), &fixtures::circ2(), Q::one(), a, false).unwrap()
    }

    #[test]
    fn rotation_of_circle() {
        let c = fixtures::circ2();
        let m = make_expansive(
            &c,
            &c,
            qi(1),
            vec![
                piece(0, qi(0), Length::Finite(q(3, 2)), 0, q(1, 2), false),
                piece(0, q(3, 2), Length::Finite(qi(2)), 0, qi(0), false),
            ],
        )
        .unwrap();
        assert_eq!(m, rot_circ2(q(1, 2)));
        assert_eq!(m.apply(&at(&c, "v0")).unwrap(), at(&c, "loop@1/2"));
        assert_eq!(m.apply(&at(&c, "loop@7/4")).unwrap(), at(&c, "loop@1/4"));
        assert!(m.is_automorphism().unwrap());
        let twice = m.compose(&m).unwrap();
        assert_eq!(twice, rot_circ2(qi(1)));
        for k in 0..8 {
            let p = c.point_on_edge(0, &q(k, 4)).unwrap();
            let expected = c.point_on_edge(0, &((q(k, 4) + qi(1)) % qi(2))).unwrap();
            assert_eq!(twice.apply(&p).unwrap(), expected);
        }
    }

    #[test]
    fn circle_cannot_be_dilated() {
        let c = fixtures::circ2();
        let err = make_expansive(&c, &c, qi(2), vec![piece(0, qi(0), Length::Finite(qi(2)), 0, qi(0), false)]);
        assert!(matches!(err, Err(Error::FactorViolated(_))));
    }

    #[test]
    fn star_dilation_and_inverse() {
        let s = fixtures::star3();
        let m = ExpansiveMap::scaled_identity(&s, qi(2)).unwrap();
        assert!(!m.is_automorphism().unwrap());
        assert_eq!(m.apply(&at(&s, "ray1@3")).unwrap(), at(&s, "ray1@6"));
        let back = m.inverse();
        assert_eq!(back.factor(), &q(1, 2));
        let id = back.compose(&m).unwrap();
        assert_eq!(id, ExpansiveMap::identity(&s));
        for p in ["c", "ray2@1/3", "ray3@7", "i1"] {
            assert_eq!(id.apply(&at(&s, p)).unwrap(), at(&s, p));
            assert_eq!(m.apply_inverse(&m.apply(&at(&s, p)).unwrap()).unwrap(), at(&s, p));
        }
    }

    #[test]
    fn non_bijective_maps_fail() {
        let seg = fixtures::seg3();
        // folds the segment onto its first half
        let fold = make_expansive(
            &seg,
            &seg,
            qi(1),
            vec![
                piece(0, qi(0), Length::Finite(q(3, 2)), 0, qi(0), false),
                piece(0, q(3, 2), Length::Finite(qi(3)), 0, q(3, 2), true),
            ],
        );
        assert!(matches!(fold, Err(Error::NotBijective(_))));
        let gap = make_expansive(&seg, &seg, qi(1), vec![piece(0, qi(0), Length::Finite(qi(2)), 0, qi(0), false)]);
        assert!(matches!(gap, Err(Error::NotBijective(_))));
    }

    #[test]
    fn infinity_must_be_preserved() {
        let r = fixtures::ray();
        let flip = make_expansive(&r, &r, qi(1), vec![piece(0, qi(0), Length::Infinite, 0, qi(0), true)]);
        assert_eq!(flip.unwrap_err(), Error::InfinityNotPreserved);
    }

    #[test]
    fn theta_distances_are_checked() {
        // swaps v0 and v1 but scrambles parametrizations inconsistently
        let t = fixtures::theta();
        let bad = make_expansive(
            &t,
            &t,
            qi(1),
            vec![
                piece(0, qi(0), Length::Finite(qi(1)), 0, qi(1), true),
                piece(1, qi(0), Length::Finite(qi(1)), 1, qi(0), false),
                piece(2, qi(0), Length::Finite(qi(1)), 2, qi(1), true),
            ],
        );
        assert!(matches!(bad, Err(Error::NotBijective(_))));
    }

    #[test]
    fn factors_multiply() {
        let l = fixtures::line();
        let a = line_map(&l, &l, qi(3), q(1, 2), true).unwrap();
        let b = line_map(&l, &l, q(2, 5), qi(-1), false).unwrap();
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.factor(), &q(6, 5));
        assert_eq!(a.inverse().factor(), &q(1, 3));
        for p in ["v0", "e0@3", "e1@5/7", "vpos", "vneg"] {
            let p = at(&l, p);
            assert_eq!(ab.apply(&p).unwrap(), a.apply(&b.apply(&p).unwrap()).unwrap());
        }
    }

    #[test]
    fn mismatched_composition() {
        let s = fixtures::star3();
        let r = fixtures::ray();
        assert_eq!(ExpansiveMap::identity(&s).compose(&ExpansiveMap::identity(&r)).unwrap_err(), Error::CurveMismatch);
    }

    #[test]
    fn valence_preserved_at_samples() {
        let t = fixtures::theta();
        for m in canonical_search(&t, &t, &qi(1)) {
            for p in m.sample_points() {
                assert_eq!(t.valence(&p).unwrap(), t.valence(&m.apply(&p).unwrap()).unwrap());
            }
        }
    }
}
