use super::{one_and_zero, recover_factor, SemifieldMap};
use crate::error::Result;
use crate::morphism::ExpansiveMap;
use crate::ratfun::RatFun;

/// Outcome of a homomorphism check; `witness` describes the first law that failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCheck {
    pub ok: bool,
    pub witness: Option<String>,
}

fn mismatch(law: &str, lhs: &RatFun, rhs: &RatFun) -> Result<Option<String>> {
    if lhs.equals(rhs)? {
        return Ok(None);
    }
    let curve = lhs.curve();
    Ok(Some(match lhs.difference_witness(rhs)? {
        Some((p, a, b)) => format!("{law}: {a} ≠ {b} at {}", curve.fmt_point(&p)),
        None => format!("{law}: the two sides differ"),
    }))
}

/// Checks `ψ(f ⊕ g) = ψf ⊕ ψg`, `ψ(f ⊙ g) = ψf ⊙ ψg`, `ψ(−∞) = −∞` and `ψ(0) = 0`.
pub fn check_hom_laws(psi: &dyn SemifieldMap, f: &RatFun, g: &RatFun) -> Result<HomCheck> {
    let (pf, pg) = (psi.apply(f)?, psi.apply(g)?);
    let (_, zero) = one_and_zero(psi.source());
    let (_, zero_t) = one_and_zero(psi.target());
    let checks = [
        ("oplus", psi.apply(&f.oplus(g)?)?, pf.oplus(&pg)?),
        ("odot", psi.apply(&f.odot(g)?)?, pf.odot(&pg)?),
        ("zero", psi.apply(&zero)?, zero_t),
    ];
    for (law, lhs, rhs) in &checks {
        if let Some(w) = mismatch(law, lhs, rhs)? {
            return Ok(HomCheck { ok: false, witness: Some(w) });
        }
    }
    if !psi.apply(&RatFun::bottom(psi.source()))?.is_bottom() {
        return Ok(HomCheck { ok: false, witness: Some("bottom: image of -inf is not -inf".into()) });
    }
    Ok(HomCheck { ok: true, witness: None })
}

/// `max ψf = r·max f` and `min ψf = r·min f`.
pub fn check_lemma4(psi: &dyn SemifieldMap, f: &RatFun) -> Result<bool> {
    let r = recover_factor(psi)?;
    let g = psi.apply(f)?;
    Ok(g.max_value() == f.max_value().scale(&r) && g.min_value() == f.min_value().scale(&r))
}

/// The divisor of `ψf` is the push-forward of the divisor of `f` along `φ`.
pub fn check_divisor_correspondence(psi: &dyn SemifieldMap, phi: &ExpansiveMap, f: &RatFun) -> Result<bool> {
    let g = psi.apply(f)?;
    if f.is_bottom() {
        return Ok(g.is_bottom());
    }
    let pushed = f.divisor()?.push_forward(|p| phi.apply(p).expect("source point"));
    Ok(g.divisor()? == pushed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chipfire::{cf_point, cf_tail};
    use crate::ext::{q, qi};
    use crate::fixtures;
    use crate::morphism::circle_map;
    use crate::semiso::{pullback, Corrupted};

    #[test]
    fn pullbacks_are_homomorphisms() {
        let c = fixtures::circ2();
        let phi = circle_map(&c, &c, qi(1), q(1, 3), true).unwrap();
        let psi = pullback(&phi);
        let f = cf_point(&c, &c.parse_point("v0").unwrap(), &q(1, 2)).unwrap();
        let g = cf_point(&c, &c.parse_point("loop@3/2").unwrap(), &qi(1)).unwrap().shift(&q(-1, 4));
        assert_eq!(check_hom_laws(&psi, &f, &g).unwrap(), HomCheck { ok: true, witness: None });
        let b = RatFun::bottom(&c);
        assert!(check_hom_laws(&psi, &b, &b).unwrap().ok);
        assert!(check_divisor_correspondence(&psi, &phi, &f).unwrap());
        assert!(check_lemma4(&psi, &f).unwrap());
    }

    #[test]
    fn corruption_is_caught() {
        let c = fixtures::circ2();
        let psi = Corrupted(pullback(&ExpansiveMap::identity(&c)));
        let f = cf_point(&c, &c.parse_point("v0").unwrap(), &q(1, 2)).unwrap();
        let res = check_hom_laws(&psi, &f, &f).unwrap();
        assert!(!res.ok);
        assert!(res.witness.unwrap().starts_with("odot"));
    }

    #[test]
    fn extrema_with_poles_at_infinity() {
        let s = fixtures::star3();
        let psi = pullback(&crate::morphism::star_map(&s, &s, &[2, 1, 0], qi(3)).unwrap());
        let f = cf_tail(&s, &s.parse_point("ray2@1").unwrap(), &s.parse_point("i2").unwrap()).unwrap();
        assert!(check_lemma4(&psi, &f).unwrap());
        assert!(check_lemma4(&psi, &f.oinv().unwrap()).unwrap());
        assert!(check_lemma4(&psi, &RatFun::constant_q(&s, q(-5, 2))).unwrap());
    }
}
