//! Tropical curves as metric graphs with rational (or infinite leaf) edge lengths.
//!
//! A curve is built from a [`Model`]: a finite connected multigraph whose edges carry
//! positive rational lengths, except that a leaf edge may have length `∞`, in which case
//! its designated leaf end is a point at infinity. Internally every infinite edge is
//! oriented from its finite end (offset 0) towards its point at infinity, so offsets on an
//! infinite edge always measure the distance from the finite end.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ext::{half, parse_q, ExtRational, Length, Q};

/// One edge of a [`Model`], as supplied by the caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelEdge {
    pub id: String,
    pub ends: [String; 2],
    pub length: Length,
    /// For an infinite edge, the end identified with `∞`.
    pub inf_end: Option<String>,
}

/// An edge-weighted graph: the raw input from which a curve is built.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Model {
    pub vertices: Vec<String>,
    pub edges: Vec<ModelEdge>,
}

impl Model {
    pub fn new(vertices: &[&str]) -> Self {
        Model { vertices: vertices.iter().map(|v| v.to_string()).collect(), edges: Vec::new() }
    }

    pub fn edge(mut self, id: &str, u: &str, v: &str, length: Q) -> Self {
        self.edges.push(ModelEdge {
            id: id.to_owned(),
            ends: [u.to_owned(), v.to_owned()],
            length: Length::Finite(length),
            inf_end: None,
        });
        self
    }

    pub fn infinite_edge(mut self, id: &str, u: &str, v: &str, inf_end: &str) -> Self {
        self.edges.push(ModelEdge {
            id: id.to_owned(),
            ends: [u.to_owned(), v.to_owned()],
            length: Length::Infinite,
            inf_end: Some(inf_end.to_owned()),
        });
        self
    }
}

/// A validated edge. `tail` sits at offset 0, `head` at offset `length`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub length: Length,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum End {
    Tail,
    Head,
}

#[derive(Debug)]
struct CurveData {
    vertices: Vec<String>,
    vertex_index: HashMap<String, usize>,
    edges: Vec<Edge>,
    edge_index: HashMap<String, usize>,
    at_infinity: Vec<bool>,
    valence: Vec<usize>,
    incidence: Vec<Vec<(usize, End)>>,
    // shortest-path distances between vertices; `None` = infinite
    vdist: Vec<Vec<Option<Q>>>,
}

/// A validated tropical curve. Cloning is cheap; the data is shared and immutable.
#[derive(Clone, Debug)]
pub struct TropicalCurve {
    inner: Arc<CurveData>,
}

impl PartialEq for TropicalCurve {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.vertices == other.inner.vertices && self.inner.edges == other.inner.edges)
    }
}

impl Eq for TropicalCurve {}

/// A location on a curve.
///
/// Endpoint offsets always canonicalize to the vertex, so two `Point`s on the same curve
/// are equal iff they denote the same location. Points at infinity are the vertices that
/// are designated infinite ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Vertex(usize),
    Edge { edge: usize, offset: Q },
}

/// A half-edge at a finite point: leave `base` along `edge`, increasing the offset when
/// `forward` is set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub base: Point,
    pub edge: usize,
    pub forward: bool,
}

/// A contiguous stretch of one edge traversed in one direction. The covered offsets are
/// `[lo, hi]`; `hi` is infinite only for a forward leg running out to a point at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub edge: usize,
    pub lo: Q,
    pub hi: Length,
    pub forward: bool,
}

impl Leg {
    pub fn length(&self) -> Length {
        match &self.hi {
            Length::Finite(h) => Length::Finite(h - &self.lo),
            Length::Infinite => Length::Infinite,
        }
    }

    fn start_offset(&self) -> Length {
        if self.forward {
            Length::Finite(self.lo.clone())
        } else {
            self.hi.clone()
        }
    }

    fn end_offset(&self) -> Length {
        if self.forward {
            self.hi.clone()
        } else {
            Length::Finite(self.lo.clone())
        }
    }

    /// Offset reached after travelling `s` along the leg.
    fn offset_after(&self, s: &Q) -> Q {
        if self.forward {
            &self.lo + s
        } else {
            self.hi.finite().expect("backward legs are finite") - s
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrailEnd {
    /// Stopped at a vertex accepted by the stop predicate.
    Stop(usize),
    /// Ran out along an infinite edge to this point at infinity.
    Infinity(usize),
    /// Came back to the starting point.
    Returned,
}

/// A path traced from a [`Direction`] through 2-valent vertices.
#[derive(Clone, Debug)]
pub struct Trail {
    pub legs: Vec<Leg>,
    pub end: TrailEnd,
    pub length: Length,
}

impl Trail {
    /// The point at distance `s` from the start (`s` no larger than the trail length).
    pub fn point_at(&self, curve: &TropicalCurve, s: &Q) -> Result<Point> {
        let mut rest = s.clone();
        for leg in &self.legs {
            match leg.length() {
                Length::Finite(l) if rest > l => rest -= l,
                _ => return curve.point_on_edge(leg.edge, &leg.offset_after(&rest)),
            }
        }
        Err(Error::BadProbeGeometry(format!("distance {s} exceeds the trail")))
    }

    /// Distance along the trail at which `p` is first met, if it lies on it.
    pub fn position_of(&self, curve: &TropicalCurve, p: &Point) -> Option<Q> {
        let mut acc = Q::zero();
        for leg in &self.legs {
            match p {
                Point::Edge { edge, offset } if *edge == leg.edge => {
                    if offset >= &leg.lo && leg.hi.exceeds(offset) {
                        let along = if leg.forward { offset - &leg.lo } else { leg.hi.finite().unwrap() - offset };
                        return Some(acc + along);
                    }
                }
                Point::Vertex(_) => {
                    if let Length::Finite(o) = leg.start_offset() {
                        if curve.point_on_edge(leg.edge, &o).ok().as_ref() == Some(p) {
                            return Some(acc);
                        }
                    }
                    if let Length::Finite(o) = leg.end_offset() {
                        if curve.point_on_edge(leg.edge, &o).ok().as_ref() == Some(p) {
                            return Some(acc + leg.length().finite().unwrap());
                        }
                    }
                }
                _ => {}
            }
            match leg.length() {
                Length::Finite(l) => acc += l,
                Length::Infinite => break,
            }
        }
        None
    }
}

/// Validates a model and builds the curve it describes.
pub fn build_curve(model: &Model) -> Result<TropicalCurve> {
    if model.vertices.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut vertex_index = HashMap::new();
    for (i, v) in model.vertices.iter().enumerate() {
        if v.is_empty() || v.contains('@') {
            return Err(Error::MalformedModel(format!("invalid vertex id {v:?}")));
        }
        if vertex_index.insert(v.clone(), i).is_some() {
            return Err(Error::MalformedModel(format!("duplicate vertex id {v}")));
        }
    }
    let n = model.vertices.len();
    let mut valence = vec![0usize; n];
    let mut raw = Vec::with_capacity(model.edges.len());
    let mut edge_index = HashMap::new();
    for (i, e) in model.edges.iter().enumerate() {
        if e.id.is_empty() || e.id.contains('@') {
            return Err(Error::MalformedModel(format!("invalid edge id {:?}", e.id)));
        }
        if edge_index.insert(e.id.clone(), i).is_some() {
            return Err(Error::MalformedModel(format!("duplicate edge id {}", e.id)));
        }
        let lookup = |v: &String| {
            vertex_index
                .get(v)
                .copied()
                .ok_or_else(|| Error::MalformedModel(format!("edge {} references unknown vertex {v}", e.id)))
        };
        let (u, v) = (lookup(&e.ends[0])?, lookup(&e.ends[1])?);
        if let Length::Finite(l) = &e.length {
            if !l.is_positive() {
                return Err(Error::MalformedModel(format!("edge {} has non-positive length", e.id)));
            }
        }
        valence[u] += 1;
        valence[v] += 1;
        raw.push((u, v));
    }

    let mut at_infinity = vec![false; n];
    let mut edges = Vec::with_capacity(raw.len());
    for (e, &(u, v)) in model.edges.iter().zip(&raw) {
        let (tail, head) = match (&e.length, &e.inf_end) {
            (Length::Finite(_), None) => (u, v),
            (Length::Finite(_), Some(_)) => {
                return Err(Error::MalformedModel(format!("finite edge {} has an infinite end", e.id)))
            }
            (Length::Infinite, None) => return Err(Error::MissingInfiniteEnd(e.id.clone())),
            (Length::Infinite, Some(end)) => {
                let w = *vertex_index
                    .get(end)
                    .ok_or_else(|| Error::MalformedModel(format!("infinite end {end} of edge {} is unknown", e.id)))?;
                if w != u && w != v {
                    return Err(Error::MalformedModel(format!("{end} is not an end of edge {}", e.id)));
                }
                if u == v || valence[w] != 1 {
                    return Err(Error::InfiniteNonLeafEdge(e.id.clone()));
                }
                at_infinity[w] = true;
                if w == u {
                    (v, u)
                } else {
                    (u, v)
                }
            }
        };
        edges.push(Edge { id: e.id.clone(), tail, head, length: e.length.clone() });
    }

    let mut incidence = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        incidence[e.tail].push((i, End::Tail));
        incidence[e.head].push((i, End::Head));
    }

    // connectivity
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(ei, _) in &incidence[v] {
            for w in [edges[ei].tail, edges[ei].head] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::DisconnectedGraph);
    }

    // all-pairs shortest paths over finite edges
    let mut vdist: Vec<Vec<Option<Q>>> = vec![vec![None; n]; n];
    for (i, row) in vdist.iter_mut().enumerate() {
        row[i] = Some(Q::zero());
    }
    for e in &edges {
        if let Length::Finite(l) = &e.length {
            let (a, b) = (e.tail, e.head);
            if a != b && vdist[a][b].as_ref().is_none_or(|d| d > l) {
                vdist[a][b] = Some(l.clone());
                vdist[b][a] = Some(l.clone());
            }
        }
    }
    #[allow(clippy::needless_range_loop)]
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = vdist[i][k].clone() else { continue };
            for j in 0..n {
                if let Some(kj) = &vdist[k][j] {
                    let through = &ik + kj;
                    if vdist[i][j].as_ref().is_none_or(|d| *d > through) {
                        vdist[i][j] = Some(through);
                    }
                }
            }
        }
    }

    Ok(TropicalCurve {
        inner: Arc::new(CurveData {
            vertices: model.vertices.clone(),
            vertex_index,
            edges,
            edge_index,
            at_infinity,
            valence,
            incidence,
            vdist,
        }),
    })
}

impl TropicalCurve {
    pub fn vertex_count(&self) -> usize {
        self.inner.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.inner.edges.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.inner.vertices[v]
    }

    pub fn vertex_by_id(&self, id: &str) -> Option<usize> {
        self.inner.vertex_index.get(id).copied()
    }

    pub fn edge_by_id(&self, id: &str) -> Option<usize> {
        self.inner.edge_index.get(id).copied()
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.inner.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.inner.edges
    }

    pub fn is_singleton(&self) -> bool {
        self.inner.edges.is_empty()
    }

    pub fn is_infinite_vertex(&self, v: usize) -> bool {
        self.inner.at_infinity[v]
    }

    pub(crate) fn incidence(&self, v: usize) -> &[(usize, End)] {
        &self.inner.incidence[v]
    }

    /// The model this curve was built from, with infinite edges oriented towards `∞`.
    pub fn model(&self) -> Model {
        Model {
            vertices: self.inner.vertices.clone(),
            edges: self
                .inner
                .edges
                .iter()
                .map(|e| ModelEdge {
                    id: e.id.clone(),
                    ends: [self.vertex_id(e.tail).to_owned(), self.vertex_id(e.head).to_owned()],
                    length: e.length.clone(),
                    inf_end: e.length.is_infinite().then(|| self.vertex_id(e.head).to_owned()),
                })
                .collect(),
        }
    }

    /// Canonical point at `offset` on edge `e`.
    pub fn point_on_edge(&self, e: usize, offset: &Q) -> Result<Point> {
        let edge = self.inner.edges.get(e).ok_or_else(|| Error::PointNotOnCurve(format!("edge #{e}")))?;
        if offset.is_zero() {
            return Ok(Point::Vertex(edge.tail));
        }
        if offset.is_negative() {
            return Err(Error::PointNotOnCurve(format!("{}@{offset}", edge.id)));
        }
        match &edge.length {
            Length::Finite(l) if offset == l => Ok(Point::Vertex(edge.head)),
            Length::Finite(l) if offset > l => Err(Error::PointNotOnCurve(format!("{}@{offset}", edge.id))),
            _ => Ok(Point::Edge { edge: e, offset: offset.clone() }),
        }
    }

    /// Like [`point_on_edge`](Self::point_on_edge) but accepts `∞` on infinite edges.
    pub fn point_on_edge_ext(&self, e: usize, offset: &Length) -> Result<Point> {
        match offset {
            Length::Finite(o) => self.point_on_edge(e, o),
            Length::Infinite => {
                let edge = self.edge(e);
                if edge.length.is_infinite() {
                    Ok(Point::Vertex(edge.head))
                } else {
                    Err(Error::PointNotOnCurve(format!("{}@inf", edge.id)))
                }
            }
        }
    }

    pub fn vertex(&self, id: &str) -> Result<Point> {
        self.vertex_by_id(id).map(Point::Vertex).ok_or_else(|| Error::PointNotOnCurve(id.to_owned()))
    }

    /// Parses `"v3"`, `"e0@5/2"` or `"e0@inf"`.
    pub fn parse_point(&self, s: &str) -> Result<Point> {
        let s = s.trim();
        match s.split_once('@') {
            None => self.vertex(s),
            Some((edge, off)) => {
                let e = self.edge_by_id(edge).ok_or_else(|| Error::PointNotOnCurve(s.to_owned()))?;
                let off: Length = off.parse().map_err(|_| Error::Parse(format!("bad point {s:?}")))?;
                self.point_on_edge_ext(e, &off)
            }
        }
    }

    /// Textual form accepted by [`parse_point`](Self::parse_point).
    pub fn fmt_point(&self, p: &Point) -> String {
        match p {
            Point::Vertex(v) => self.vertex_id(*v).to_owned(),
            Point::Edge { edge, offset } => format!("{}@{}", self.edge(*edge).id, offset),
        }
    }

    /// Checks that `p` is a canonical point of this curve.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match p {
            Point::Vertex(v) if *v < self.vertex_count() => Ok(()),
            Point::Edge { edge, offset } if *edge < self.edge_count() => match self.point_on_edge(*edge, offset) {
                Ok(q) if &q == p => Ok(()),
                _ => Err(Error::PointNotOnCurve(format!("{p:?}"))),
            },
            _ => Err(Error::PointNotOnCurve(format!("{p:?}"))),
        }
    }

    pub fn is_at_infinity(&self, p: &Point) -> bool {
        matches!(p, Point::Vertex(v) if self.inner.at_infinity[*v])
    }

    pub fn points_at_infinity(&self) -> Vec<Point> {
        (0..self.vertex_count()).filter(|&v| self.inner.at_infinity[v]).map(Point::Vertex).collect()
    }

    /// Number of local branches at `p`; 1 at points at infinity.
    pub fn valence(&self, p: &Point) -> Result<usize> {
        self.check_point(p)?;
        Ok(match p {
            Point::Vertex(v) => self.inner.valence[*v],
            Point::Edge { .. } => 2,
        })
    }

    /// First Betti number, `#E − #V + 1`.
    pub fn genus(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    // (vertex, distance) pairs through which shortest paths leave a finite point
    fn anchors(&self, p: &Point) -> Vec<(usize, Q)> {
        match p {
            Point::Vertex(v) => vec![(*v, Q::zero())],
            Point::Edge { edge, offset } => {
                let e = self.edge(*edge);
                match &e.length {
                    Length::Finite(l) => vec![(e.tail, offset.clone()), (e.head, l - offset)],
                    Length::Infinite => vec![(e.tail, offset.clone())],
                }
            }
        }
    }

    /// Shortest-path distance; `+∞` whenever a point at infinity is involved (unless `p = q`).
    pub fn distance(&self, p: &Point, q: &Point) -> Result<ExtRational> {
        self.check_point(p)?;
        self.check_point(q)?;
        if p == q {
            return Ok(ExtRational::zero());
        }
        if self.is_at_infinity(p) || self.is_at_infinity(q) {
            return Ok(ExtRational::PosInf);
        }
        let mut best: Option<Q> = None;
        if let (Point::Edge { edge: e1, offset: o1 }, Point::Edge { edge: e2, offset: o2 }) = (p, q) {
            if e1 == e2 {
                best = Some((o1 - o2).abs());
            }
        }
        for (a, da) in self.anchors(p) {
            for (b, db) in self.anchors(q) {
                if let Some(dab) = &self.inner.vdist[a][b] {
                    let d = &da + dab + &db;
                    if best.as_ref().is_none_or(|x| *x > d) {
                        best = Some(d);
                    }
                }
            }
        }
        Ok(best.map_or(ExtRational::PosInf, ExtRational::Finite))
    }

    /// Half-edges at a finite point.
    pub fn directions_at(&self, p: &Point) -> Result<Vec<Direction>> {
        self.check_point(p)?;
        if self.is_at_infinity(p) {
            return Err(Error::PointAtInfinity);
        }
        Ok(match p {
            Point::Vertex(v) => self.inner.incidence[*v]
                .iter()
                .map(|&(edge, end)| Direction { base: p.clone(), edge, forward: end == End::Tail })
                .collect(),
            Point::Edge { edge, .. } => vec![
                Direction { base: p.clone(), edge: *edge, forward: true },
                Direction { base: p.clone(), edge: *edge, forward: false },
            ],
        })
    }

    /// Traces `dir` through vertices rejected by `stop` (which must be 2-valent) until it
    /// reaches a vertex accepted by `stop`, runs out to infinity, or returns to its base.
    pub fn follow(&self, dir: &Direction, stop: impl Fn(usize) -> bool) -> Trail {
        let base = &dir.base;
        let (mut edge, mut forward) = (dir.edge, dir.forward);
        let mut start = match base {
            Point::Edge { offset, .. } => offset.clone(),
            Point::Vertex(_) if forward => Q::zero(),
            Point::Vertex(_) => self.edge(edge).length.finite().expect("backward from a finite end").clone(),
        };
        let mut legs = Vec::new();
        let mut total = Q::zero();
        let mut first = true;
        loop {
            let e = self.edge(edge);
            if !first {
                if let Point::Edge { edge: be, offset: bo } = base {
                    if *be == edge {
                        total += (bo - &start).abs();
                        let (lo, hi) = if forward { (start, bo.clone()) } else { (bo.clone(), start) };
                        legs.push(Leg { edge, lo, hi: Length::Finite(hi), forward });
                        return Trail { legs, end: TrailEnd::Returned, length: Length::Finite(total) };
                    }
                }
            }
            first = false;
            let arrived = if forward {
                match &e.length {
                    Length::Infinite => {
                        legs.push(Leg { edge, lo: start, hi: Length::Infinite, forward: true });
                        return Trail { legs, end: TrailEnd::Infinity(e.head), length: Length::Infinite };
                    }
                    Length::Finite(l) => {
                        total += l - &start;
                        legs.push(Leg { edge, lo: start, hi: Length::Finite(l.clone()), forward: true });
                        (e.head, End::Head)
                    }
                }
            } else {
                total += &start;
                legs.push(Leg { edge, lo: Q::zero(), hi: Length::Finite(start), forward: false });
                (e.tail, End::Tail)
            };
            let w = arrived.0;
            if *base == Point::Vertex(w) {
                return Trail { legs, end: TrailEnd::Returned, length: Length::Finite(total) };
            }
            if stop(w) {
                return Trail { legs, end: TrailEnd::Stop(w), length: Length::Finite(total) };
            }
            debug_assert_eq!(self.inner.valence[w], 2);
            let &(next, end) = self.inner.incidence[w]
                .iter()
                .find(|&&(ei, en)| (ei, en) != (edge, arrived.1))
                .expect("2-valent vertex has a second edge end");
            edge = next;
            forward = end == End::Tail;
            start = if forward { Q::zero() } else { self.edge(edge).length.finite().unwrap().clone() };
        }
    }

    /// Traces `dir` up to the first point of valence other than 2.
    pub fn follow_to_branch(&self, dir: &Direction) -> Trail {
        self.follow(dir, |w| self.inner.valence[w] != 2 || self.inner.at_infinity[w])
    }

    /// Largest radius whose closed ball around `p` is a star of `val(p)` segments: the
    /// distance to the nearest other point of valence ≠ 2, capped at half of any cycle
    /// that returns to `p` without meeting one.
    pub fn injectivity_radius(&self, p: &Point) -> Result<Length> {
        let mut best = Length::Infinite;
        for dir in self.directions_at(p)? {
            let trail = self.follow_to_branch(&dir);
            let cand = match (&trail.end, &trail.length) {
                (TrailEnd::Returned, Length::Finite(l)) => Length::Finite(l * half()),
                (_, l) => l.clone(),
            };
            best = best.min(cand);
        }
        Ok(best)
    }

    /// Vertices of the canonical model (always vertices of the given model).
    pub fn canonical_vertices(&self) -> BTreeSet<usize> {
        let n = self.vertex_count();
        if self.is_singleton() {
            return BTreeSet::from([0]);
        }
        let mut set: BTreeSet<usize> = (0..n).filter(|&v| self.inner.valence[v] != 2).collect();
        if set.iter().all(|&v| self.inner.at_infinity[v]) {
            if set.is_empty() {
                // circle: start of the lexicographically smallest edge
                let e = self.inner.edges.iter().min_by(|a, b| a.id.cmp(&b.id)).unwrap();
                set.insert(e.tail);
            } else {
                // doubly infinite path: smallest finite vertex id
                let v = (0..n)
                    .filter(|&v| !self.inner.at_infinity[v])
                    .min_by(|&a, &b| self.vertex_id(a).cmp(self.vertex_id(b)))
                    .unwrap();
                set.insert(v);
            }
        }
        set
    }

    /// Canonical edges as trails between canonical vertices, each paired with its start.
    /// Finite starts come first, then the points at infinity; each model edge is used once.
    pub fn canonical_trails(&self) -> Vec<(usize, Trail)> {
        let canon = self.canonical_vertices();
        let mut used = vec![false; self.edge_count()];
        let mut out = Vec::new();
        let order = canon
            .iter()
            .copied()
            .filter(|&v| !self.inner.at_infinity[v])
            .chain(canon.iter().copied().filter(|&v| self.inner.at_infinity[v]));
        for k in order {
            for dir in self.directions_at(&Point::Vertex(k)).unwrap_or_default() {
                if used[dir.edge] {
                    continue;
                }
                let trail = self.follow(&dir, |w| canon.contains(&w));
                for leg in &trail.legs {
                    used[leg.edge] = true;
                }
                out.push((k, trail));
            }
        }
        out
    }

    /// Canonical model: vertices are the points of valence ≠ 2 (with the circle and
    /// doubly-infinite-path conventions); each canonical edge is named after the smallest
    /// model edge id it contains.
    pub fn canonical_model(&self) -> Model {
        let canon = self.canonical_vertices();
        let mut model =
            Model { vertices: canon.iter().map(|&v| self.vertex_id(v).to_owned()).collect(), edges: Vec::new() };
        for (k, trail) in self.canonical_trails() {
            let id = trail.legs.iter().map(|l| self.edge(l.edge).id.clone()).min().unwrap();
            let end = match trail.end {
                TrailEnd::Stop(w) | TrailEnd::Infinity(w) => w,
                TrailEnd::Returned => k,
            };
            let inf_end = trail.length.is_infinite().then(|| self.vertex_id(end).to_owned());
            model.edges.push(ModelEdge {
                id,
                ends: [self.vertex_id(k).to_owned(), self.vertex_id(end).to_owned()],
                length: trail.length.clone(),
                inf_end,
            });
        }
        model
    }

    /// `true` iff the curve is a singleton or a star of `n ≥ 1` infinite rays glued at one
    /// finite point; equivalently, every canonical edge is infinite.
    pub fn is_star_infinite(&self) -> bool {
        self.is_singleton() || self.canonical_model().edges.iter().all(|e| e.length.is_infinite())
    }

    /// Path from the point at infinity `x` back to the nearest canonical vertex, returned
    /// in the direction from that vertex towards `x`.
    pub(crate) fn tail_toward(&self, x: &Point) -> Result<Trail> {
        let Point::Vertex(xv) = x else {
            return Err(Error::NotAPointAtInfinity(self.fmt_point(x)));
        };
        if !self.inner.at_infinity[*xv] {
            return Err(Error::NotAPointAtInfinity(self.fmt_point(x)));
        }
        let canon = self.canonical_vertices();
        let (e, _) = self.inner.incidence[*xv][0];
        let base = self.edge(e).tail;
        let mut inward: Vec<Leg> = Vec::new();
        if !canon.contains(&base) {
            let dir = self
                .directions_at(&Point::Vertex(base))?
                .into_iter()
                .find(|d| d.edge != e)
                .expect("2-valent finite end");
            let trail = self.follow(&dir, |w| canon.contains(&w));
            if !matches!(trail.end, TrailEnd::Stop(_)) {
                return Err(Error::BadProbeGeometry("tail does not reach a canonical vertex".into()));
            }
            inward = trail.legs;
        }
        // reverse the inward path, then append the infinite leg
        let mut legs: Vec<Leg> = inward.into_iter().rev().map(|l| Leg { forward: !l.forward, ..l }).collect();
        legs.push(Leg { edge: e, lo: Q::zero(), hi: Length::Infinite, forward: true });
        Ok(Trail { legs, end: TrailEnd::Infinity(*xv), length: Length::Infinite })
    }

    /// Splits edge `e` at the interior offset `at`, introducing a fresh 2-valent vertex.
    pub fn subdivide(&self, e: usize, at: &Q) -> Result<TropicalCurve> {
        let p = self.point_on_edge(e, at)?;
        if !matches!(p, Point::Edge { .. }) {
            return Err(Error::MalformedModel("subdivision point must be interior".into()));
        }
        let mut model = self.model();
        let fresh_vertex = fresh_id(&model.vertices, "s");
        let ids: Vec<String> = model.edges.iter().map(|e| e.id.clone()).collect();
        let old = model.edges.remove(e);
        let id_a = fresh_id(&ids, &format!("{}.a", old.id));
        let id_b = fresh_id(&ids, &format!("{}.b", old.id));
        model.vertices.push(fresh_vertex.clone());
        let second_len = match &old.length {
            Length::Finite(l) => Length::Finite(l - at),
            Length::Infinite => Length::Infinite,
        };
        model.edges.insert(
            e,
            ModelEdge {
                id: id_a,
                ends: [old.ends[0].clone(), fresh_vertex.clone()],
                length: Length::Finite(at.clone()),
                inf_end: None,
            },
        );
        model.edges.insert(
            e + 1,
            ModelEdge { id: id_b, ends: [fresh_vertex, old.ends[1].clone()], length: second_len, inf_end: old.inf_end },
        );
        build_curve(&model)
    }

    /// A model of the same curve with every loop split at its midpoint.
    pub fn loopless(&self) -> TropicalCurve {
        let mut curve = self.clone();
        while let Some(e) = curve.edges().iter().position(|e| e.is_loop()) {
            let mid = curve.edge(e).length.finite().expect("loops are finite") * half();
            curve = curve.subdivide(e, &mid).expect("midpoint is interior");
        }
        curve
    }
}

fn fresh_id(taken: &[String], stem: &str) -> String {
    if !taken.iter().any(|t| t == stem) {
        return stem.to_owned();
    }
    (0..).map(|i| format!("{stem}{i}")).find(|cand| !taken.iter().any(|t| t == cand)).unwrap()
}

impl fmt::Display for TropicalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "curve(V={}, E={})", self.vertex_count(), self.edge_count())
    }
}

/// Convenience parser for offsets in fixtures and tests.
pub fn offset(s: &str) -> Q {
    parse_q(s).expect("valid rational literal")
}
