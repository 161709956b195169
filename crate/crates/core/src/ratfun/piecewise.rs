use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ext::{q_to_int, qi, ExtRational, Length, Q};

/// A continuous piecewise-affine function on one edge, given by its breakpoints
/// `(offset, value)`. On a finite edge the breakpoints span `[0, length]`; on an infinite
/// edge they start at 0 and the function continues past the last one with `tail` slope.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piecewise {
    pub(crate) breaks: Vec<(Q, Q)>,
    pub(crate) tail: Option<i64>,
}

impl Piecewise {
    pub fn new(breaks: Vec<(Q, Q)>, tail: Option<i64>) -> Self {
        Piecewise { breaks, tail }
    }

    pub fn constant(len: &Length, c: Q) -> Self {
        match len {
            Length::Finite(l) => Piecewise { breaks: vec![(Q::zero(), c.clone()), (l.clone(), c)], tail: None },
            Length::Infinite => Piecewise { breaks: vec![(Q::zero(), c)], tail: Some(0) },
        }
    }

    /// `t ↦ start + slope·t` over the edge.
    pub fn affine(len: &Length, start: Q, slope: i64) -> Self {
        match len {
            Length::Finite(l) => {
                let end = &start + qi(slope) * l;
                Piecewise { breaks: vec![(Q::zero(), start), (l.clone(), end)], tail: None }
            }
            Length::Infinite => Piecewise { breaks: vec![(Q::zero(), start)], tail: Some(slope) },
        }
    }

    pub fn breaks(&self) -> &[(Q, Q)] {
        &self.breaks
    }

    pub fn tail_slope(&self) -> Option<i64> {
        self.tail
    }

    pub(crate) fn validate(&self, len: &Length, edge_id: &str) -> Result<()> {
        let bad = |msg: &str| Err(Error::MalformedFunction(format!("edge {edge_id}: {msg}")));
        let Some(first) = self.breaks.first() else { return bad("no breakpoints") };
        if !first.0.is_zero() {
            return bad("first breakpoint must be at offset 0");
        }
        if self.breaks.windows(2).any(|w| w[0].0 >= w[1].0) {
            return bad("breakpoint offsets must increase strictly");
        }
        match (len, self.tail) {
            (Length::Finite(l), None) => {
                if self.breaks.len() < 2 || self.breaks.last().unwrap().0 != *l {
                    return bad("last breakpoint must be at the edge length");
                }
            }
            (Length::Infinite, Some(_)) => {}
            (Length::Finite(_), Some(_)) => return bad("tail slope on a finite edge"),
            (Length::Infinite, None) => return bad("infinite edge needs a tail slope"),
        }
        for w in self.breaks.windows(2) {
            let s = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
            if q_to_int(&s).is_none() {
                return Err(Error::NonIntegerSlope(edge_id.to_owned()));
            }
        }
        Ok(())
    }

    fn seg_slope(a: &(Q, Q), b: &(Q, Q)) -> Q {
        (&b.1 - &a.1) / (&b.0 - &a.0)
    }

    /// Integer slopes of the consecutive pieces, including the tail on an infinite edge.
    pub fn slopes(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self
            .breaks
            .windows(2)
            .map(|w| q_to_int(&Self::seg_slope(&w[0], &w[1])).expect("validated integer slope"))
            .collect();
        out.extend(self.tail);
        out
    }

    pub fn start_value(&self) -> &Q {
        &self.breaks[0].1
    }

    fn last(&self) -> &(Q, Q) {
        self.breaks.last().expect("non-empty")
    }

    /// Value at the far end: the last breakpoint on a finite edge, the limit at `∞` otherwise.
    pub fn end_value(&self) -> ExtRational {
        match self.tail {
            None => ExtRational::Finite(self.last().1.clone()),
            Some(s) => match s.cmp(&0) {
                Ordering::Greater => ExtRational::PosInf,
                Ordering::Less => ExtRational::NegInf,
                Ordering::Equal => ExtRational::Finite(self.last().1.clone()),
            },
        }
    }

    /// Value at a finite offset within the edge.
    pub fn eval(&self, t: &Q) -> Q {
        let last = self.last();
        if *t >= last.0 {
            return match self.tail {
                Some(s) => &last.1 + qi(s) * (t - &last.0),
                None => last.1.clone(),
            };
        }
        let i = self.breaks.partition_point(|(x, _)| x <= t);
        if i == 0 {
            return self.breaks[0].1.clone();
        }
        let (a, b) = (&self.breaks[i - 1], &self.breaks[i]);
        if a.0 == *t {
            return a.1.clone();
        }
        &a.1 + Self::seg_slope(a, b) * (t - &a.0)
    }

    /// Drops breakpoints where the slope does not change.
    pub(crate) fn canonical(mut self) -> Self {
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(self.breaks.len());
        for p in self.breaks.drain(..) {
            if out.last().is_some_and(|l| l.0 == p.0) {
                continue;
            }
            out.push(p);
            while out.len() >= 3 {
                let n = out.len();
                if Self::seg_slope(&out[n - 3], &out[n - 2]) == Self::seg_slope(&out[n - 2], &out[n - 1]) {
                    out.remove(n - 2);
                } else {
                    break;
                }
            }
        }
        if let Some(s) = self.tail {
            let n = out.len();
            if n >= 2 && Self::seg_slope(&out[n - 2], &out[n - 1]) == qi(s) {
                out.pop();
            }
        }
        Piecewise { breaks: out, tail: self.tail }
    }

    fn merged_offsets(a: &Self, b: &Self) -> Vec<Q> {
        let mut xs: Vec<Q> = a.breaks.iter().chain(&b.breaks).map(|p| p.0.clone()).collect();
        xs.sort();
        xs.dedup();
        xs
    }

    /// Pointwise maximum.
    pub(crate) fn max(a: &Self, b: &Self) -> Self {
        let xs = Self::merged_offsets(a, b);
        let mut out = Vec::with_capacity(xs.len() * 2);
        let mut prev: Option<(Q, Q)> = None; // (offset, a - b)
        for x in &xs {
            let (fa, fb) = (a.eval(x), b.eval(x));
            let d1 = &fa - &fb;
            if let Some((x0, d0)) = &prev {
                if (d0.is_positive() && d1.is_negative()) || (d0.is_negative() && d1.is_positive()) {
                    let t = x0 + (x - x0) * d0 / (d0 - &d1);
                    let v = a.eval(&t);
                    out.push((t, v));
                }
            }
            out.push((x.clone(), if fa >= fb { fa } else { fb }));
            prev = Some((x.clone(), d1));
        }
        let tail = match (a.tail, b.tail) {
            (Some(sa), Some(sb)) => {
                let (l, d) = prev.expect("non-empty");
                let sd = sa - sb;
                if (d.is_negative() && sd > 0) || (d.is_positive() && sd < 0) {
                    let t = &l - &d / qi(sd);
                    let v = a.eval(&t);
                    out.push((t, v));
                }
                Some(sa.max(sb))
            }
            _ => None,
        };
        Piecewise { breaks: out, tail }.canonical()
    }

    /// Pointwise sum.
    pub(crate) fn sum(a: &Self, b: &Self) -> Self {
        let xs = Self::merged_offsets(a, b);
        let breaks = xs.iter().map(|x| (x.clone(), a.eval(x) + b.eval(x))).collect();
        let tail = match (a.tail, b.tail) {
            (Some(sa), Some(sb)) => Some(sa + sb),
            _ => None,
        };
        Piecewise { breaks, tail }.canonical()
    }

    pub(crate) fn neg(&self) -> Self {
        Piecewise { breaks: self.breaks.iter().map(|(x, v)| (x.clone(), -v)).collect(), tail: self.tail.map(|s| -s) }
    }

    pub(crate) fn map_values(&self, f: impl Fn(&Q) -> Q) -> Self {
        Piecewise { breaks: self.breaks.iter().map(|(x, v)| (x.clone(), f(v))).collect(), tail: self.tail }
    }

    /// Largest breakpoint offset.
    pub fn extent(&self) -> &Q {
        &self.last().0
    }
}
