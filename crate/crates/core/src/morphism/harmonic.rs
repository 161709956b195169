use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use super::ExpansiveMap;
use crate::curve::{build_curve, Model, ModelEdge, Point, TropicalCurve};
use crate::error::{Error, Result};
use crate::ext::{half, qi, Length, Q};

/// A combinatorial description of a map between two models: where each vertex and edge
/// goes, and the stretch of each edge. `edge_map[e] = (e′, flipped)` sends the tail of `e`
/// to the tail of `e′` unless `flipped`.
#[derive(Clone, Debug)]
pub struct HarmonicMorphismData {
    pub source: TropicalCurve,
    pub target: TropicalCurve,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<(usize, bool)>,
    pub stretch: Vec<u32>,
    pub declared_degree: Option<u32>,
}

fn fail(clause: u8, detail: impl Into<String>) -> Error {
    Error::NotHarmonic { clause, detail: detail.into() }
}

/// Checks the four harmonicity conditions and returns the degree.
pub fn verify_harmonic(data: &HarmonicMorphismData) -> Result<u32> {
    let (g, h) = (&data.source, &data.target);
    for c in [g, h] {
        if let Some(e) = c.edges().iter().find(|e| e.is_loop()) {
            return Err(Error::LoopyModel(e.id.clone()));
        }
    }
    match (g.is_singleton(), h.is_singleton()) {
        (true, true) => {
            return match data.declared_degree {
                Some(0) => Err(fail(4, "degree must be positive")),
                d => Ok(d.unwrap_or(1)),
            }
        }
        (false, false) => {}
        _ => return Err(fail(2, "a singleton maps only to a singleton")),
    }

    if data.vertex_map.len() != g.vertex_count() {
        return Err(fail(1, "vertex map has the wrong length"));
    }
    if let Some(v) = data.vertex_map.iter().position(|&w| w >= h.vertex_count()) {
        return Err(fail(1, format!("vertex {} has no image vertex", g.vertex_id(v))));
    }
    if data.edge_map.len() != g.edge_count() || data.stretch.len() != g.edge_count() {
        return Err(fail(2, "edge map has the wrong length"));
    }

    for (i, e) in g.edges().iter().enumerate() {
        let (j, flipped) = data.edge_map[i];
        let Some(f) = h.edges().get(j) else {
            return Err(fail(2, format!("edge {} has no image edge", e.id)));
        };
        let (ft, fh) = if flipped { (f.head, f.tail) } else { (f.tail, f.head) };
        if data.vertex_map[e.tail] != ft || data.vertex_map[e.head] != fh {
            return Err(fail(2, format!("edge {} is not sent onto edge {}", e.id, f.id)));
        }
        let d = data.stretch[i];
        if d == 0 {
            return Err(fail(3, format!("edge {} has stretch 0", e.id)));
        }
        if e.length.scale(&qi(i64::from(d))) != f.length {
            return Err(fail(3, format!("edge {} is not stretched by {d} onto {}", e.id, f.id)));
        }
    }

    let mut deg_v = vec![0u32; g.vertex_count()];
    #[allow(clippy::needless_range_loop)]
    for v in 0..g.vertex_count() {
        let image = data.vertex_map[v];
        let mut sums: BTreeMap<usize, u32> = h
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, f)| f.tail == image || f.head == image)
            .map(|(j, _)| (j, 0))
            .collect();
        for (i, e) in g.edges().iter().enumerate() {
            if e.tail == v || e.head == v {
                *sums.entry(data.edge_map[i].0).or_default() += data.stretch[i];
            }
        }
        let mut values = sums.values();
        let first = values.next().copied().unwrap_or(0);
        if first == 0 || values.any(|&s| s != first) {
            return Err(fail(4, format!("local degree at {} depends on the target edge", g.vertex_id(v))));
        }
        deg_v[v] = first;
    }

    let mut fiber = vec![0u32; h.vertex_count()];
    for (v, d) in deg_v.iter().enumerate() {
        fiber[data.vertex_map[v]] += d;
    }
    let degree = fiber[0];
    if degree == 0 || fiber.iter().any(|&s| s != degree) {
        return Err(fail(4, "fibre degrees differ between target vertices"));
    }
    Ok(degree)
}

struct Subdivision {
    model: Model,
    cuts: Vec<Vec<Q>>,
}

impl Subdivision {
    fn new(curve: &TropicalCurve, mut cuts: Vec<Vec<Q>>) -> Subdivision {
        let mut model = Model {
            vertices: (0..curve.vertex_count()).map(|v| curve.vertex_id(v).to_string()).collect(),
            edges: Vec::new(),
        };
        for (e, edge) in curve.edges().iter().enumerate() {
            let c = &mut cuts[e];
            c.retain(|t| *t > Q::zero() && edge.length.exceeds(t));
            c.sort();
            c.dedup();
            let mut ends = vec![model.vertices[edge.tail].clone()];
            for t in c.iter() {
                let id = vertex_key(curve, &Point::Edge { edge: e, offset: t.clone() });
                model.vertices.push(id.clone());
                ends.push(id);
            }
            ends.push(model.vertices[edge.head].clone());
            let mut offs: Vec<Length> =
                std::iter::once(Length::Finite(Q::zero())).chain(c.iter().cloned().map(Length::Finite)).collect();
            offs.push(edge.length.clone());
            for j in 0..ends.len() - 1 {
                let length = match (&offs[j], &offs[j + 1]) {
                    (Length::Finite(a), Length::Finite(b)) => Length::Finite(b - a),
                    _ => Length::Infinite,
                };
                let inf_end = length.is_infinite().then(|| ends[j + 1].clone());
                model.edges.push(ModelEdge {
                    id: format!("{}#{j}", edge.id),
                    ends: [ends[j].clone(), ends[j + 1].clone()],
                    length,
                    inf_end,
                });
            }
        }
        Subdivision { model, cuts }
    }

    /// Index of the sub-edge of `e` containing the interior offset `t`.
    fn sub_edge(&self, e: usize, t: &Q) -> usize {
        let before: usize = self.cuts[..e].iter().map(|c| c.len() + 1).sum();
        before + self.cuts[e].iter().filter(|c| *c < t).count()
    }

    /// Interior sample offset of each sub-edge, in model order.
    fn samples(&self) -> Vec<(usize, Q)> {
        let mut out = Vec::new();
        let mut sub = self.model.edges.iter();
        for (e, c) in self.cuts.iter().enumerate() {
            let mut lo = Q::zero();
            for _ in 0..=c.len() {
                match &sub.next().expect("one sub-edge per cut").length {
                    Length::Finite(l) => {
                        out.push((e, &lo + l * half()));
                        lo += l;
                    }
                    Length::Infinite => out.push((e, &lo + qi(1))),
                }
            }
        }
        out
    }
}

fn vertex_key(curve: &TropicalCurve, p: &Point) -> String {
    match p {
        Point::Vertex(v) => curve.vertex_id(*v).to_string(),
        Point::Edge { edge, offset } => format!("{}:{offset}", curve.edge(*edge).id),
    }
}

/// Harmonic data for a map with integral factor, on models subdivided at every piece
/// boundary and piece midpoint so that both sides are loopless.
pub fn induced_harmonic(map: &ExpansiveMap) -> Result<HarmonicMorphismData> {
    let (src, dst, r) = (map.source(), map.target(), map.factor());
    let stretch = if r.is_integer() { r.to_integer().to_u32() } else { None }
        .ok_or_else(|| fail(3, format!("factor {r} is not a positive integer")))?;

    let mut src_cuts: Vec<Vec<Q>> = vec![Vec::new(); src.edge_count()];
    for p in map.pieces() {
        src_cuts[p.src_edge].push(p.src_from.clone());
        if let Length::Finite(hi) = &p.src_to {
            src_cuts[p.src_edge].push((&p.src_from + hi) * half());
            src_cuts[p.src_edge].push(hi.clone());
        }
    }
    let src_sub = Subdivision::new(src, src_cuts);

    let mut dst_cuts: Vec<Vec<Q>> = vec![Vec::new(); dst.edge_count()];
    let cut_points = src_sub
        .cuts
        .iter()
        .enumerate()
        .flat_map(|(e, c)| c.iter().map(move |t| Point::Edge { edge: e, offset: t.clone() }));
    for p in (0..src.vertex_count()).map(Point::Vertex).chain(cut_points) {
        if let Point::Edge { edge, offset } = map.apply(&p)? {
            dst_cuts[edge].push(offset);
        }
    }
    let dst_sub = Subdivision::new(dst, dst_cuts);

    let source = build_curve(&src_sub.model)?;
    let target = build_curve(&dst_sub.model)?;
    let locate = |c: &TropicalCurve, id: String| c.vertex_by_id(&id).expect("subdivision vertex");

    let mut vertex_map = Vec::with_capacity(source.vertex_count());
    for v in 0..source.vertex_count() {
        let id = source.vertex_id(v);
        let original = match src.vertex_by_id(id) {
            Some(w) => Point::Vertex(w),
            None => {
                let (edge, off) = id.rsplit_once(':').expect("cut vertex key");
                let e = src.edge_by_id(edge).expect("cut edge");
                Point::Edge { edge: e, offset: crate::ext::parse_q(off)? }
            }
        };
        vertex_map.push(locate(&target, vertex_key(dst, &map.apply(&original)?)));
    }

    let pieces = map.pieces();
    let mut edge_map = Vec::with_capacity(source.edge_count());
    for (e, t) in src_sub.samples() {
        let piece = pieces.iter().find(|p| p.src_edge == e && p.contains(&t)).expect("pieces tile the edge");
        let Point::Edge { edge, offset } = map.apply(&Point::Edge { edge: e, offset: t })? else {
            unreachable!("interior points map to interior points")
        };
        edge_map.push((dst_sub.sub_edge(edge, &offset), piece.reversed));
    }
    let stretch = vec![stretch; source.edge_count()];
    Ok(HarmonicMorphismData { source, target, vertex_map, edge_map, stretch, declared_degree: None })
}
