//! JSON formats for curves, functions, subgraphs, maps and reports.
//!
//! Rationals are strings (`"5/2"`, `"-3"`, `"inf"`) so that nothing passes through floats.
//! Emitted JSON is deterministic: maps are keyed in sorted order and re-emitting parsed
//! output reproduces it byte for byte.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curve::{build_curve, Model, ModelEdge, Point, TropicalCurve};
use crate::error::{Error, Result};
use crate::ext::{parse_q, Length};
use crate::morphism::{make_expansive, ExpansiveMap, HarmonicMorphismData, Piece};
use crate::ratfun::{Piecewise, RatFun};
use crate::semiso::RecoveryReport;
use crate::subgraph::{Interval, Subgraph};

fn perr(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    id: String,
    ends: [String; 2],
    length: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inf_end: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveJson {
    vertices: Vec<String>,
    edges: Vec<EdgeJson>,
}

fn model_from_value(v: Value) -> Result<Model> {
    let cj: CurveJson = serde_json::from_value(v).map_err(perr)?;
    let edges = cj
        .edges
        .into_iter()
        .map(|e| Ok(ModelEdge { id: e.id, ends: e.ends, length: e.length.parse::<Length>()?, inf_end: e.inf_end }))
        .collect::<Result<Vec<_>>>()?;
    Ok(Model { vertices: cj.vertices, edges })
}

fn model_value(model: &Model) -> Value {
    let cj = CurveJson {
        vertices: model.vertices.clone(),
        edges: model
            .edges
            .iter()
            .map(|e| EdgeJson {
                id: e.id.clone(),
                ends: e.ends.clone(),
                length: e.length.to_string(),
                inf_end: e.inf_end.clone(),
            })
            .collect(),
    };
    serde_json::to_value(cj).expect("serializable")
}

pub fn model_from_json(text: &str) -> Result<Model> {
    model_from_value(serde_json::from_str(text).map_err(perr)?)
}

pub fn curve_from_json(text: &str) -> Result<TropicalCurve> {
    build_curve(&model_from_json(text)?)
}

pub fn model_to_json(model: &Model) -> String {
    to_pretty(&model_value(model))
}

pub fn curve_to_json(curve: &TropicalCurve) -> String {
    model_to_json(&curve.model())
}

pub(crate) fn curve_value(curve: &TropicalCurve) -> Value {
    model_value(&curve.model())
}

/// A curve given inline or as a path (resolved against `base`). A path that does not exist
/// but names a shipped fixture loads the fixture.
pub(crate) fn curve_from_value(v: Value, base: Option<&Path>) -> Result<TropicalCurve> {
    match v {
        Value::String(path) => {
            let p = match base {
                Some(b) if Path::new(&path).is_relative() => b.join(&path),
                _ => Path::new(&path).to_path_buf(),
            };
            match std::fs::read_to_string(&p) {
                Ok(text) => curve_from_json(&text),
                Err(_) if crate::fixtures::file(&path).is_some() => {
                    curve_from_json(crate::fixtures::file(&path).unwrap())
                }
                Err(e) => Err(Error::Parse(format!("{}: {e}", p.display()))),
            }
        }
        other => build_curve(&model_from_value(other)?),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BreakJson {
    at: String,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentJson {
    breaks: Vec<BreakJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail_slope: Option<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionJson {
    curve: Value,
    #[serde(default)]
    bottom: bool,
    #[serde(default)]
    segments: BTreeMap<String, SegmentJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
}

/// Parses a function; a `"curve"` given as a path is resolved against `base`.
pub fn function_from_json(text: &str, base: Option<&Path>) -> Result<RatFun> {
    let fj: FunctionJson = serde_json::from_str(text).map_err(perr)?;
    let curve = curve_from_value(fj.curve, base)?;
    if fj.bottom {
        return Ok(RatFun::bottom(&curve));
    }
    let mut pieces = Vec::with_capacity(curve.edge_count());
    for e in curve.edges() {
        let seg =
            fj.segments.get(&e.id).ok_or_else(|| Error::MalformedFunction(format!("no segment for edge {}", e.id)))?;
        let breaks =
            seg.breaks.iter().map(|b| Ok((parse_q(&b.at)?, parse_q(&b.value)?))).collect::<Result<Vec<_>>>()?;
        pieces.push(Piecewise::new(breaks, seg.tail_slope));
    }
    if let Some(extra) = fj.segments.keys().find(|k| curve.edge_by_id(k).is_none()) {
        return Err(Error::MalformedFunction(format!("segment for unknown edge {extra}")));
    }
    let value = fj.value.as_deref().map(parse_q).transpose()?;
    RatFun::from_parts(&curve, pieces, value)
}

pub(crate) fn function_value(f: &RatFun) -> Value {
    let curve = f.curve();
    let mut segments = BTreeMap::new();
    let mut value = None;
    if let Some(pieces) = f.pieces() {
        for (e, p) in curve.edges().iter().zip(pieces) {
            let breaks =
                p.breaks().iter().map(|(x, v)| BreakJson { at: x.to_string(), value: v.to_string() }).collect();
            segments.insert(e.id.clone(), SegmentJson { breaks, tail_slope: p.tail_slope() });
        }
        if curve.is_singleton() {
            value = f.vertex_value(0).finite().map(|v| v.to_string());
        }
    }
    serde_json::to_value(FunctionJson { curve: curve_value(curve), bottom: f.is_bottom(), segments, value })
        .expect("serializable")
}

pub fn function_to_json(f: &RatFun) -> String {
    to_pretty(&function_value(f))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalJson {
    edge: String,
    from: String,
    to: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubgraphJson {
    #[serde(default)]
    intervals: Vec<IntervalJson>,
    #[serde(default)]
    points: Vec<String>,
}

pub fn subgraph_from_json(curve: &TropicalCurve, text: &str) -> Result<Subgraph> {
    let sj: SubgraphJson = serde_json::from_str(text).map_err(perr)?;
    let intervals = sj
        .intervals
        .iter()
        .map(|iv| {
            let edge = curve
                .edge_by_id(&iv.edge)
                .ok_or_else(|| Error::MalformedSubgraph(format!("unknown edge {}", iv.edge)))?;
            Ok(Interval { edge, from: parse_q(&iv.from)?, to: iv.to.parse::<Length>()? })
        })
        .collect::<Result<Vec<_>>>()?;
    let points = sj.points.iter().map(|p| curve.parse_point(p)).collect::<Result<Vec<_>>>()?;
    Subgraph::new(curve, intervals, points)
}

pub(crate) fn subgraph_value(sub: &Subgraph) -> Value {
    let curve = sub.curve();
    let sj = SubgraphJson {
        intervals: sub
            .intervals()
            .iter()
            .map(|iv| IntervalJson {
                edge: curve.edge(iv.edge).id.clone(),
                from: iv.from.to_string(),
                to: iv.to.to_string(),
            })
            .collect(),
        points: sub.points().iter().map(|p| curve.fmt_point(p)).collect(),
    };
    serde_json::to_value(sj).expect("serializable")
}

pub fn subgraph_to_json(sub: &Subgraph) -> String {
    to_pretty(&subgraph_value(sub))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceJson {
    src_edge: String,
    src_range: [String; 2],
    dst_edge: String,
    dst_start: String,
    reversed: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapJson {
    source: Value,
    target: Value,
    r: String,
    pieces: Vec<PieceJson>,
}

fn edge_index(curve: &TropicalCurve, id: &str) -> Result<usize> {
    curve.edge_by_id(id).ok_or_else(|| Error::Parse(format!("unknown edge {id}")))
}

/// Parses and validates a map; curves given as paths are resolved against `base`.
pub fn map_from_json(text: &str, base: Option<&Path>) -> Result<ExpansiveMap> {
    let mj: MapJson = serde_json::from_str(text).map_err(perr)?;
    let source = curve_from_value(mj.source, base)?;
    let target = curve_from_value(mj.target, base)?;
    let pieces = mj
        .pieces
        .iter()
        .map(|p| {
            Ok(Piece {
                src_edge: edge_index(&source, &p.src_edge)?,
                src_from: parse_q(&p.src_range[0])?,
                src_to: p.src_range[1].parse::<Length>()?,
                dst_edge: edge_index(&target, &p.dst_edge)?,
                dst_start: parse_q(&p.dst_start)?,
                reversed: p.reversed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    make_expansive(&source, &target, parse_q(&mj.r)?, pieces)
}

pub(crate) fn map_value(map: &ExpansiveMap) -> Value {
    let (s, t) = (map.source(), map.target());
    let mj = MapJson {
        source: curve_value(s),
        target: curve_value(t),
        r: map.factor().to_string(),
        pieces: map
            .pieces()
            .iter()
            .map(|p| PieceJson {
                src_edge: s.edge(p.src_edge).id.clone(),
                src_range: [p.src_from.to_string(), p.src_to.to_string()],
                dst_edge: t.edge(p.dst_edge).id.clone(),
                dst_start: p.dst_start.to_string(),
                reversed: p.reversed,
            })
            .collect(),
    };
    serde_json::to_value(mj).expect("serializable")
}

pub fn map_to_json(map: &ExpansiveMap) -> String {
    to_pretty(&map_value(map))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeImageJson {
    edge: String,
    #[serde(default)]
    flipped: bool,
    stretch: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HarmonicJson {
    source: Value,
    target: Value,
    #[serde(default)]
    vertex_map: BTreeMap<String, String>,
    #[serde(default)]
    edge_map: BTreeMap<String, EdgeImageJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree: Option<u32>,
}

/// Parses harmonic-morphism data. Every source vertex and edge must be listed.
pub fn harmonic_from_json(text: &str, base: Option<&Path>) -> Result<HarmonicMorphismData> {
    let hj: HarmonicJson = serde_json::from_str(text).map_err(perr)?;
    let source = curve_from_value(hj.source, base)?;
    let target = curve_from_value(hj.target, base)?;
    let vertex_map = (0..source.vertex_count())
        .map(|v| {
            let id = source.vertex_id(v);
            let img = hj.vertex_map.get(id).ok_or_else(|| Error::Parse(format!("no image for vertex {id}")))?;
            target.vertex_by_id(img).ok_or_else(|| Error::Parse(format!("unknown vertex {img}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut edge_map = Vec::new();
    let mut stretch = Vec::new();
    for e in source.edges() {
        let img = hj.edge_map.get(&e.id).ok_or_else(|| Error::Parse(format!("no image for edge {}", e.id)))?;
        edge_map.push((edge_index(&target, &img.edge)?, img.flipped));
        stretch.push(img.stretch);
    }
    Ok(HarmonicMorphismData { source, target, vertex_map, edge_map, stretch, declared_degree: hj.degree })
}

pub fn harmonic_to_json(data: &HarmonicMorphismData) -> String {
    let (s, t) = (&data.source, &data.target);
    let hj = HarmonicJson {
        source: curve_value(s),
        target: curve_value(t),
        vertex_map: data
            .vertex_map
            .iter()
            .enumerate()
            .map(|(v, w)| (s.vertex_id(v).to_string(), t.vertex_id(*w).to_string()))
            .collect(),
        edge_map: s
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let (j, flipped) = data.edge_map[i];
                (e.id.clone(), EdgeImageJson { edge: t.edge(j).id.clone(), flipped, stretch: data.stretch[i] })
            })
            .collect(),
        degree: data.declared_degree,
    };
    to_pretty(&hj)
}

#[derive(Serialize)]
struct TranscriptJson {
    point: String,
    eps: String,
    retries: usize,
    probes: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    anchor: Option<[String; 2]>,
}

#[derive(Serialize)]
struct ReportJson {
    r: Option<String>,
    success: bool,
    pairs: Vec<[String; 2]>,
    transcripts: Vec<TranscriptJson>,
    failures: Vec<String>,
}

pub fn report_to_json(source: &TropicalCurve, target: &TropicalCurve, rep: &RecoveryReport) -> String {
    let rj = ReportJson {
        r: rep.r.as_ref().map(|r| r.to_string()),
        success: rep.success,
        pairs: rep.pairs.iter().map(|(x, y)| [source.fmt_point(x), target.fmt_point(y)]).collect(),
        transcripts: rep
            .transcripts
            .iter()
            .map(|t| TranscriptJson {
                point: source.fmt_point(&t.point),
                eps: t.eps.to_string(),
                retries: t.retries,
                probes: t.probes.clone(),
                anchor: t.anchor.as_ref().map(|(y, yp)| [source.fmt_point(y), target.fmt_point(yp)]),
            })
            .collect(),
        failures: rep.failures.clone(),
    };
    to_pretty(&rj)
}

/// Points listed one per line (blank lines and `#` comments ignored).
pub fn points_from_text(curve: &TropicalCurve, text: &str) -> Result<Vec<Point>> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(|l| curve.parse_point(l)).collect()
}
