use num_traits::{One, Signed};
use rayon::prelude::*;

use super::SemifieldMap;
use crate::chipfire::{cf_point, cf_tail, tail_point};
use crate::curve::{Point, TropicalCurve};
use crate::error::{Error, Result};
use crate::ext::{half, q, qi, ExtRational, Length, Q};
use crate::ratfun::RatFun;

const POINT_BUDGET: usize = 64;
const TAIL_BUDGET: usize = 32;

/// The probe history for one sample point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub point: Point,
    /// ε of the accepted probe (or the distance of the anchor `y` for points at infinity).
    pub eps: Q,
    pub retries: usize,
    /// Argmax (or `−∞` locus) of each probe image, as readable strings.
    pub probes: Vec<Vec<String>>,
    /// For points at infinity, the anchor pair `(y, y′)`.
    pub anchor: Option<(Point, Point)>,
}

#[derive(Clone, Debug, Default)]
pub struct RecoveryReport {
    pub r: Option<Q>,
    pub pairs: Vec<(Point, Point)>,
    pub transcripts: Vec<Transcript>,
    pub failures: Vec<String>,
    pub success: bool,
}

fn constant_of(psi: &dyn SemifieldMap, t: &Q) -> Result<ExtRational> {
    let img = psi.apply(&RatFun::constant_q(psi.source(), t.clone()))?;
    img.as_constant().ok_or_else(|| Error::NonConstantImageOfConstant(t.to_string()))
}

/// `r = ψ(1)`, checked against the images of a few other constants.
pub fn recover_factor(psi: &dyn SemifieldMap) -> Result<Q> {
    let r = match constant_of(psi, &Q::one())? {
        ExtRational::Finite(r) if r.is_positive() => r,
        other => return Err(Error::NonPositiveFactor(other.to_string())),
    };
    for t in [qi(-1), qi(2), q(1, 3)] {
        if constant_of(psi, &t)? != ExtRational::Finite(&r * &t) {
            return Err(Error::NonConstantImageOfConstant(format!("image of {t} is not {r}·{t}")));
        }
    }
    Ok(r)
}

/// Finds `x′` with `ψ(CF({x}; ε)) = CF({x′}; r·ε)`, halving ε until the probe image has that
/// shape.
pub fn recover_point(psi: &dyn SemifieldMap, r: &Q, x: &Point) -> Result<(Point, Transcript)> {
    let (src, dst) = (psi.source(), psi.target());
    if src.is_at_infinity(x) {
        return Err(Error::PointAtInfinity);
    }
    let val = src.valence(x)?;
    let mut eps = match src.injectivity_radius(x)? {
        Length::Finite(l) if l < qi(1) => l * half(),
        _ => half(),
    };
    let mut probes = Vec::new();
    for retries in 0..POINT_BUDGET {
        let g = psi.apply(&cf_point(src, x, &eps)?)?;
        let top = g.argmax_set()?;
        probes.push(top.describe());
        if let Some(xp) = top.single_point() {
            if dst.is_at_infinity(xp) {
                return Err(Error::ArgmaxAtInfinity(src.fmt_point(x)));
            }
            let image_val = dst.valence(xp)?;
            if image_val != val {
                return Err(Error::ValenceMismatch {
                    source_point: src.fmt_point(x),
                    source_valence: val,
                    image: dst.fmt_point(xp),
                    image_valence: image_val,
                });
            }
            if g.equals(&cf_point(dst, xp, &(r * &eps))?)? {
                let t = Transcript { point: x.clone(), eps, retries, probes, anchor: None };
                return Ok((xp.clone(), t));
            }
        }
        eps *= half();
    }
    Err(Error::ProbeDivergence { point: src.fmt_point(x), attempts: POINT_BUDGET })
}

/// Finds the image of a point at infinity `x` through tail probes `CF(Γ∖(y, x]; ∞)`, moving
/// `y` out along the tail until the image is again a tail probe.
pub fn recover_point_at_infinity(psi: &dyn SemifieldMap, r: &Q, x: &Point) -> Result<(Point, Transcript)> {
    let (src, dst) = (psi.source(), psi.target());
    if !src.is_at_infinity(x) {
        return Err(Error::NotAPointAtInfinity(src.fmt_point(x)));
    }
    let mut d = qi(1);
    let mut probes = Vec::new();
    for retries in 0..TAIL_BUDGET {
        let y = tail_point(src, x, &d)?;
        let g = psi.apply(&cf_tail(src, &y, x)?)?;
        let poles: Vec<Point> = dst
            .points_at_infinity()
            .into_iter()
            .filter(|p| g.eval(p).is_ok_and(|v| v == ExtRational::NegInf))
            .collect();
        probes.push(poles.iter().map(|p| dst.fmt_point(p)).collect());
        if poles.len() > 1 {
            return Err(Error::MultipleInfinitePoles(src.fmt_point(x)));
        }
        if let [xp] = poles.as_slice() {
            let (yp, _) = recover_point(psi, r, &y)?;
            if cf_tail(dst, &yp, xp).is_ok_and(|h| h.equals(&g).unwrap_or(false)) {
                let t = Transcript { point: x.clone(), eps: d, retries, probes, anchor: Some((y, yp)) };
                return Ok((xp.clone(), t));
            }
        }
        d *= qi(2);
    }
    Err(Error::ProbeDivergence { point: src.fmt_point(x), attempts: TAIL_BUDGET })
}

fn recover_one(psi: &dyn SemifieldMap, r: &Q, x: &Point) -> Result<(Point, Transcript)> {
    if psi.source().is_at_infinity(x) {
        recover_point_at_infinity(psi, r, x)
    } else {
        recover_point(psi, r, x)
    }
}

fn check_samples(src: &TropicalCurve, samples: &[Point]) -> Result<()> {
    for v in src.canonical_vertices() {
        if !samples.contains(&Point::Vertex(v)) {
            return Err(Error::MissingCanonicalVertex(src.vertex_id(v).to_string()));
        }
    }
    samples.iter().try_for_each(|p| src.check_point(p))
}

/// Recovers the factor and the image of every sample, then checks that all pairwise
/// distances scale by the factor. Samples must include every canonical vertex.
pub fn recover_map(psi: &dyn SemifieldMap, samples: &[Point]) -> Result<RecoveryReport> {
    let (src, dst) = (psi.source(), psi.target());
    check_samples(src, samples)?;
    let mut report = RecoveryReport::default();
    let r = match recover_factor(psi) {
        Ok(r) => r,
        Err(e) => {
            report.failures.push(e.to_string());
            return Ok(report);
        }
    };
    report.r = Some(r.clone());

    let results: Vec<Result<(Point, Transcript)>> = samples.par_iter().map(|x| recover_one(psi, &r, x)).collect();
    for (x, res) in samples.iter().zip(results) {
        match res {
            Ok((xp, t)) => {
                report.pairs.push((x.clone(), xp));
                report.transcripts.push(t);
            }
            Err(e) => report.failures.push(format!("{}: {e}", src.fmt_point(x))),
        }
    }

    for (i, (a, ap)) in report.pairs.iter().enumerate() {
        for (b, bp) in &report.pairs[i + 1..] {
            let want = src.distance(a, b)?.scale(&r);
            let got = dst.distance(ap, bp)?;
            if want != got {
                report.failures.push(format!(
                    "distance from {} to {} is {got}, expected {want}",
                    dst.fmt_point(ap),
                    dst.fmt_point(bp)
                ));
            }
        }
    }
    report.success = report.failures.is_empty();
    Ok(report)
}
