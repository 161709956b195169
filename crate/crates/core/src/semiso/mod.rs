//! Semiring isomorphisms between rational-function semifields, seen as black-box oracles.
//!
//! [`Pullback`] builds the isomorphism `f ↦ (r·f)∘φ⁻¹` from an `r`-expansive map `φ`;
//! [`recover_map`] goes the other way, reading a map off an oracle through chip-firing probes.

mod recover;
mod verify;

pub use recover::{recover_factor, recover_map, recover_point, recover_point_at_infinity, RecoveryReport, Transcript};
pub use verify::{check_divisor_correspondence, check_hom_laws, check_lemma4, HomCheck};

use num_traits::{One, Zero};

use crate::curve::TropicalCurve;
use crate::error::{Error, Result};
use crate::ext::{q, Length, Q};
use crate::morphism::ExpansiveMap;
use crate::ratfun::{Piecewise, RatFun};

/// A map `Rat(Γ₁) → Rat(Γ₂)`. Implementations must be pure.
pub trait SemifieldMap: Send + Sync {
    fn source(&self) -> &TropicalCurve;
    fn target(&self) -> &TropicalCurve;
    fn apply(&self, f: &RatFun) -> Result<RatFun>;
}

/// `f ↦ (r·f)∘φ⁻¹` for an `r`-expansive map `φ`.
#[derive(Clone, Debug)]
pub struct Pullback {
    map: ExpansiveMap,
}

pub fn pullback(map: &ExpansiveMap) -> Pullback {
    Pullback { map: map.clone() }
}

impl Pullback {
    pub fn map(&self) -> &ExpansiveMap {
        &self.map
    }

    /// The image restricted to one target edge.
    fn edge_image(&self, pieces: &[Piecewise], target_edge: usize) -> Piecewise {
        let r = self.map.factor();
        let mut breaks: Vec<(Q, Q)> = Vec::new();
        let mut tail = None;
        for p in self.map.inverse_pieces_on(target_edge) {
            let fe = &pieces[p.dst_edge];
            // target offset t ↔ source offset d ± (t − lo)/r
            let to_target = |s: &Q| {
                let d = if p.reversed { &p.dst_start - s } else { s - &p.dst_start };
                &p.src_from + r * d
            };
            let to_source = |t: &Q| {
                let d = (t - &p.src_from) / r;
                if p.reversed {
                    &p.dst_start - d
                } else {
                    &p.dst_start + d
                }
            };
            let (lo, hi) = (p.src_from.clone(), p.src_to.clone());
            let mut ts = vec![lo.clone()];
            ts.extend(fe.breaks().iter().map(|(b, _)| to_target(b)).filter(|t| *t > lo && hi.exceeds(t)));
            match &hi {
                Length::Finite(h) => ts.push(h.clone()),
                Length::Infinite => tail = fe.tail_slope(),
            }
            breaks.extend(ts.into_iter().map(|t| {
                let v = r * fe.eval(&to_source(&t));
                (t, v)
            }));
        }
        breaks.sort_by(|a, b| a.0.cmp(&b.0));
        breaks.dedup_by(|a, b| a.0 == b.0);
        Piecewise::new(breaks, tail)
    }
}

impl SemifieldMap for Pullback {
    fn source(&self) -> &TropicalCurve {
        self.map.source()
    }

    fn target(&self) -> &TropicalCurve {
        self.map.target()
    }

    fn apply(&self, f: &RatFun) -> Result<RatFun> {
        if f.curve() != self.source() {
            return Err(Error::CurveMismatch);
        }
        let target = self.target();
        let Some(pieces) = f.pieces() else {
            return Ok(RatFun::bottom(target));
        };
        let r = self.map.factor();
        if target.is_singleton() {
            let c = f.vertex_value(0).finite().cloned().expect("finite on a point");
            return Ok(RatFun::constant_q(target, r * c));
        }
        let edges = (0..target.edge_count()).map(|e| self.edge_image(pieces, e)).collect();
        RatFun::from_parts(target, edges, None)
    }
}

/// Wraps an oracle and adds `1/7` to every non-constant output. Constants, `⊕` and the
/// identity survive; `⊙` does not. Used as a negative control.
pub struct Corrupted<M>(pub M);

impl<M: SemifieldMap> SemifieldMap for Corrupted<M> {
    fn source(&self) -> &TropicalCurve {
        self.0.source()
    }

    fn target(&self) -> &TropicalCurve {
        self.0.target()
    }

    fn apply(&self, f: &RatFun) -> Result<RatFun> {
        let g = self.0.apply(f)?;
        if g.is_bottom() || g.as_constant().is_some() {
            return Ok(g);
        }
        Ok(g.shift(&q(1, 7)))
    }
}

/// `ψ₂∘ψ₁`.
pub struct Composed<A, B>(pub A, pub B);

impl<A: SemifieldMap, B: SemifieldMap> SemifieldMap for Composed<A, B> {
    fn source(&self) -> &TropicalCurve {
        self.1.source()
    }

    fn target(&self) -> &TropicalCurve {
        self.0.target()
    }

    fn apply(&self, f: &RatFun) -> Result<RatFun> {
        self.0.apply(&self.1.apply(f)?)
    }
}

pub(crate) fn one_and_zero(curve: &TropicalCurve) -> (RatFun, RatFun) {
    (RatFun::constant_q(curve, Q::one()), RatFun::constant_q(curve, Q::zero()))
}
