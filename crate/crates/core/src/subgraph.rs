//! Compact subsets of a curve with finitely many components: closed edge intervals plus
//! isolated points. Used as chip-firing supports and to report arg-max / arg-min sets.

use num_traits::{Signed, Zero};

use crate::curve::{Point, TropicalCurve};
use crate::error::{Error, Result};
use crate::ext::{Length, Q};

/// A closed interval `[from, to]` of offsets on one edge. `to = ∞` includes the point at
/// infinity of an infinite edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interval {
    pub edge: usize,
    pub from: Q,
    pub to: Length,
}

/// Normalized subgraph: intervals are disjoint, sorted and non-degenerate; `points` holds
/// only points not already covered by an interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    curve: TropicalCurve,
    intervals: Vec<Interval>,
    points: Vec<Point>,
}

impl Subgraph {
    pub fn new(curve: &TropicalCurve, intervals: Vec<Interval>, points: Vec<Point>) -> Result<Self> {
        let mut ivs = Vec::new();
        let mut pts = points;
        for iv in intervals {
            if iv.edge >= curve.edge_count() {
                return Err(Error::MalformedSubgraph(format!("unknown edge #{}", iv.edge)));
            }
            let len = &curve.edge(iv.edge).length;
            if iv.from.is_negative() || iv.to > *len || Length::Finite(iv.from.clone()) > iv.to {
                return Err(Error::MalformedSubgraph(format!(
                    "interval [{}, {}] outside edge {}",
                    iv.from,
                    iv.to,
                    curve.edge(iv.edge).id
                )));
            }
            if Length::Finite(iv.from.clone()) == iv.to {
                pts.push(curve.point_on_edge(iv.edge, &iv.from)?);
            } else {
                ivs.push(iv);
            }
        }
        for p in &pts {
            curve.check_point(p)?;
        }
        ivs.sort();
        let mut merged: Vec<Interval> = Vec::new();
        for iv in ivs {
            if let Some(last) = merged.last_mut() {
                if last.edge == iv.edge && Length::Finite(iv.from.clone()) <= last.to {
                    if iv.to > last.to {
                        last.to = iv.to;
                    }
                    continue;
                }
            }
            merged.push(iv);
        }
        let mut out = Subgraph { curve: curve.clone(), intervals: merged, points: Vec::new() };
        pts.sort();
        pts.dedup();
        out.points = pts.into_iter().filter(|p| !out.interval_contains(p)).collect();
        Ok(out)
    }

    pub fn point(curve: &TropicalCurve, p: Point) -> Result<Self> {
        Self::new(curve, Vec::new(), vec![p])
    }

    pub fn whole(curve: &TropicalCurve) -> Self {
        let intervals = (0..curve.edge_count())
            .map(|e| Interval { edge: e, from: Q::zero(), to: curve.edge(e).length.clone() })
            .collect();
        let points = if curve.is_singleton() { vec![Point::Vertex(0)] } else { Vec::new() };
        Subgraph::new(curve, intervals, points).expect("whole curve is a valid subgraph")
    }

    pub fn curve(&self) -> &TropicalCurve {
        &self.curve
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    fn interval_contains(&self, p: &Point) -> bool {
        self.intervals.iter().any(|iv| {
            let e = self.curve.edge(iv.edge);
            match p {
                Point::Edge { edge, offset } => {
                    *edge == iv.edge && *offset >= iv.from && Length::Finite(offset.clone()) <= iv.to
                }
                Point::Vertex(v) => (*v == e.tail && iv.from.is_zero()) || (*v == e.head && iv.to == e.length),
            }
        })
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.contains(p) || self.interval_contains(p)
    }

    /// The only point of the set, if it is a single point.
    pub fn single_point(&self) -> Option<&Point> {
        match (self.intervals.as_slice(), self.points.as_slice()) {
            ([], [p]) => Some(p),
            _ => None,
        }
    }

    /// Points at which a shortest path from outside can enter the set: interval endpoints
    /// and isolated points.
    pub(crate) fn boundary_points(&self) -> Vec<Point> {
        let mut out = self.points.clone();
        for iv in &self.intervals {
            out.push(self.curve.point_on_edge(iv.edge, &iv.from).unwrap());
            out.push(self.curve.point_on_edge_ext(iv.edge, &iv.to).unwrap());
        }
        out.sort();
        out.dedup();
        out
    }

    /// Rejects empty sets and components consisting of a lone point at infinity.
    pub(crate) fn check_chip_firing_support(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptySubgraph);
        }
        if self.points.iter().any(|p| self.curve.is_at_infinity(p)) {
            return Err(Error::IsolatedInfinityComponent);
        }
        Ok(())
    }

    /// Human-readable components, e.g. `["v0", "[e0@1, e0@3]"]`.
    pub fn describe(&self) -> Vec<String> {
        let mut out: Vec<String> = self.points.iter().map(|p| self.curve.fmt_point(p)).collect();
        for iv in &self.intervals {
            let id = &self.curve.edge(iv.edge).id;
            out.push(format!("[{id}@{}, {id}@{}]", iv.from, iv.to));
        }
        out
    }
}
