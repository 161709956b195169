//! Graphviz export.
//!
//! Edges are labelled with their length and, when a function is given, its breakpoints on
//! that stretch. Divisor points inside an edge split it into segments; orders are attached
//! to nodes as `xlabel`s.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_traits::Zero;

use crate::curve::{Point, TropicalCurve};
use crate::ext::{Length, Q};
use crate::ratfun::{Divisor, RatFun};

fn minus(s: String) -> String {
    s.replace('-', "\u{2212}")
}

fn num(v: &Q) -> String {
    minus(v.to_string())
}

fn order(o: i64) -> String {
    if o > 0 {
        format!("+{o}")
    } else {
        minus(o.to_string())
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

fn function_label(f: &RatFun, edge: usize, lo: &Q, hi: &Length) -> String {
    let Some(pieces) = f.pieces() else {
        return "\u{2212}\u{221e}".to_string();
    };
    let p = &pieces[edge];
    let inside = |x: &Q| x >= lo && (hi.exceeds(x) || Length::Finite(x.clone()) == *hi);
    let mut pts: Vec<String> = Vec::new();
    if !p.breaks().iter().any(|(x, _)| x == lo) {
        pts.push(format!("({}, {})", num(lo), num(&p.eval(lo))));
    }
    pts.extend(p.breaks().iter().filter(|(x, _)| inside(x)).map(|(x, v)| format!("({}, {})", num(x), num(v))));
    if let Length::Finite(h) = hi {
        if !p.breaks().iter().any(|(x, _)| x == h) {
            pts.push(format!("({}, {})", num(h), num(&p.eval(h))));
        }
    } else if let Some(s) = p.tail_slope() {
        pts.push(format!("slope {} to \u{221e}", minus(s.to_string())));
    }
    pts.join(" ")
}

/// A deterministic `graph` description of `curve`, optionally annotated with a function and
/// a divisor.
pub fn export_dot(curve: &TropicalCurve, f: Option<&RatFun>, divisor: Option<&Divisor>) -> String {
    let mut orders: BTreeMap<Point, i64> = BTreeMap::new();
    if let Some(d) = divisor {
        orders.extend(d.iter().map(|(p, o)| (p.clone(), o)));
    }
    let mut out = String::from("graph curve {\n  node [shape=circle];\n");
    for v in 0..curve.vertex_count() {
        let id = curve.vertex_id(v);
        let mut attrs = vec![format!("label={}", quote(id))];
        if curve.is_infinite_vertex(v) {
            attrs.push("shape=doublecircle".into());
        }
        if let Some(o) = orders.get(&Point::Vertex(v)) {
            attrs.push(format!("xlabel={}", quote(&order(*o))));
        }
        writeln!(out, "  {} [{}];", quote(id), attrs.join(", ")).unwrap();
    }
    if let Some(f) = f.filter(|f| curve.is_singleton() && !f.is_bottom()) {
        writeln!(out, "  label={};", quote(&num(f.vertex_value(0).finite().expect("finite")))).unwrap();
    }
    for (e, edge) in curve.edges().iter().enumerate() {
        let cuts: Vec<(Q, i64)> = orders
            .iter()
            .filter_map(|(p, o)| match p {
                Point::Edge { edge: pe, offset } if *pe == e => Some((offset.clone(), *o)),
                _ => None,
            })
            .collect();
        let mut nodes = vec![(quote(curve.vertex_id(edge.tail)), Length::Finite(Q::zero()))];
        for (t, o) in &cuts {
            let name = quote(&curve.fmt_point(&Point::Edge { edge: e, offset: t.clone() }));
            writeln!(out, "  {name} [shape=point, xlabel={}];", quote(&order(*o))).unwrap();
            nodes.push((name, Length::Finite(t.clone())));
        }
        nodes.push((quote(curve.vertex_id(edge.head)), edge.length.clone()));
        for w in nodes.windows(2) {
            let lo = w[0].1.finite().expect("segments start at a finite offset");
            let len = match &w[1].1 {
                Length::Finite(h) => num(&(h - lo)),
                Length::Infinite => "\u{221e}".to_string(),
            };
            let mut label = len;
            if let Some(f) = f {
                label.push_str("\\n");
                label.push_str(&function_label(f, e, lo, &w[1].1));
            }
            writeln!(out, "  {} -- {} [label={}];", w[0].0, w[1].0, quote(&label)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
