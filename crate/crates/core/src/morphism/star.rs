use std::collections::VecDeque;

use num_traits::{One, Zero};

use super::{line_map, star_map, ExpansiveMap};
use crate::curve::{Trail, TropicalCurve};
use crate::error::{Error, Result};
use crate::ext::{qi, Q};

/// The rays of a star-infinite curve, each running from the canonical vertex out to its
/// point at infinity, ordered by point at infinity.
pub fn rays(curve: &TropicalCurve) -> Result<Vec<Trail>> {
    if !curve.is_star_infinite() {
        return Err(Error::NotStarInfinite);
    }
    curve.points_at_infinity().iter().map(|x| curve.tail_toward(x)).collect()
}

/// Generators of the isometry group of a star-infinite curve. With `n` rays: adjacent ray
/// transpositions for `n ≥ 3`, translation by 1 and the reflection at 0 for the line, and
/// the identity alone for a ray or a point.
pub fn star_aut_generators(curve: &TropicalCurve) -> Result<Vec<ExpansiveMap>> {
    let n = rays(curve)?.len();
    match n {
        0 | 1 => Ok(vec![ExpansiveMap::identity(curve)]),
        2 => Ok(vec![
            line_map(curve, curve, Q::one(), qi(1), false)?,
            line_map(curve, curve, Q::one(), Q::zero(), true)?,
        ]),
        _ => (0..n - 1)
            .map(|i| {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.swap(i, i + 1);
                star_map(curve, curve, &perm, Q::one())
            })
            .collect(),
    }
}

/// The group generated by `gens`, or `None` once it exceeds `limit` elements.
pub fn closure(gens: &[ExpansiveMap], limit: usize) -> Option<Vec<ExpansiveMap>> {
    let first = gens.first()?;
    let mut seen = vec![ExpansiveMap::identity(first.source())];
    let mut queue: VecDeque<ExpansiveMap> = seen.iter().cloned().collect();
    while let Some(m) = queue.pop_front() {
        for g in gens {
            let next = g.compose(&m).ok()?;
            if !seen.contains(&next) {
                if seen.len() == limit {
                    return None;
                }
                seen.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Some(seen)
}

/// A dilation by 2 fixing the canonical vertex, which exists exactly for star-infinite
/// curves. On any other curve the finite canonical edges pin the factor to 1.
pub fn has_nonunit_dilation(curve: &TropicalCurve) -> Option<ExpansiveMap> {
    if !curve.is_star_infinite() {
        return None;
    }
    if curve.is_singleton() {
        return ExpansiveMap::scaled_identity(curve, qi(2)).ok();
    }
    let n = rays(curve).ok()?.len();
    star_map(curve, curve, &(0..n).collect::<Vec<_>>(), qi(2)).ok()
}
