use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use tropical_core::chipfire::{cf, cf_point, cf_tail};
use tropical_core::dot::export_dot;
use tropical_core::ext::parse_q;
use tropical_core::io::{
    curve_from_json, function_from_json, function_to_json, harmonic_from_json, map_from_json, map_to_json,
    model_to_json, points_from_text, report_to_json, subgraph_from_json, to_pretty,
};
use tropical_core::morphism::{closure, has_nonunit_dilation, induced_harmonic, star_aut_generators, verify_harmonic};
use tropical_core::random::{random_function, random_function_or_bottom, random_point, rng};
use tropical_core::semiso::{check_divisor_correspondence, check_hom_laws, check_lemma4, recover_map};
use tropical_core::{
    fixtures, pullback, Error, ExpansiveMap, Length, Point, RatFun, Result, SemifieldMap, TropicalCurve,
};

use crate::{Cli, Command, Suite};

const CLOSURE_LIMIT: usize = 1000;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Reads a file, falling back to a shipped fixture of the same name. Returns the text and
/// the directory relative paths inside it resolve against.
fn read_or_fixture(name: &str) -> Result<(String, Option<PathBuf>)> {
    let path = Path::new(name);
    match std::fs::read_to_string(path) {
        Ok(text) => Ok((text, path.parent().map(Path::to_path_buf))),
        Err(e) => fixtures::file(path.file_name().and_then(|s| s.to_str()).unwrap_or(name))
            .map(|t| (t.to_string(), None))
            .ok_or_else(|| Error::Parse(format!("{name}: {e}"))),
    }
}

fn load_curve(name: &str) -> Result<TropicalCurve> {
    curve_from_json(&read_or_fixture(name)?.0)
}

fn load_map(name: &str) -> Result<ExpansiveMap> {
    let (text, base) = read_or_fixture(name)?;
    map_from_json(&text, base.as_deref())
}

fn load_fn(path: &Path) -> Result<RatFun> {
    function_from_json(&read(path)?, path.parent())
}

fn line(v: impl std::fmt::Display) -> String {
    format!("{v}\n")
}

fn divisor_json(f: &RatFun) -> Result<Value> {
    let d = f.divisor()?;
    Ok(Value::Array(d.describe(f.curve()).into_iter().map(|(p, o)| json!({"point": p, "order": o})).collect()))
}

pub fn run(cli: &Cli) -> Result<String> {
    let trials = |default: usize| cli.trials.unwrap_or(default);
    match &cli.command {
        Command::Genus { curve } => Ok(line(load_curve(curve)?.genus())),
        Command::CanonicalModel { curve } => Ok(model_to_json(&load_curve(curve)?.canonical_model())),
        Command::Eval { f, point } => {
            let f = load_fn(f)?;
            Ok(line(f.eval(&f.curve().parse_point(point)?)?))
        }
        Command::Oplus { f, g } => Ok(function_to_json(&load_fn(f)?.oplus(&load_fn(g)?)?)),
        Command::Odot { f, g } => Ok(function_to_json(&load_fn(f)?.odot(&load_fn(g)?)?)),
        Command::Oinv { f } => Ok(function_to_json(&load_fn(f)?.oinv()?)),
        Command::Divisor { f } => Ok(to_pretty(&divisor_json(&load_fn(f)?)?)),
        Command::Extrema { f } => {
            let f = load_fn(f)?;
            Ok(to_pretty(&json!({
                "max": f.max_value().to_string(),
                "min": f.min_value().to_string(),
                "argmax": f.argmax_set()?.describe(),
                "argmin": f.argmin_set()?.describe(),
            })))
        }
        Command::Cf { curve, subgraph, length } => {
            let c = load_curve(curve)?;
            let sub = subgraph_from_json(&c, &read(subgraph)?)?;
            Ok(function_to_json(&cf(&c, &sub, &length.parse::<Length>()?)?))
        }
        Command::CfPoint { curve, point, eps } => {
            let c = load_curve(curve)?;
            Ok(function_to_json(&cf_point(&c, &c.parse_point(point)?, &parse_q(eps)?)?))
        }
        Command::CfTail { curve, y, x } => {
            let c = load_curve(curve)?;
            Ok(function_to_json(&cf_tail(&c, &c.parse_point(y)?, &c.parse_point(x)?)?))
        }
        Command::CheckExpansive { map } => {
            let m = load_map(map)?;
            let auto = if m.source() == m.target() { Some(m.is_automorphism()?) } else { None };
            Ok(to_pretty(&json!({"valid": true, "r": m.factor().to_string(), "automorphism": auto})))
        }
        Command::Compose { outer, inner } => Ok(map_to_json(&load_map(outer)?.compose(&load_map(inner)?)?)),
        Command::CheckHarmonic { data, map } => {
            let data = match (data, map) {
                (Some(d), _) => {
                    let (text, base) = read_or_fixture(d)?;
                    harmonic_from_json(&text, base.as_deref())?
                }
                (None, Some(m)) => induced_harmonic(&load_map(m)?)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            Ok(to_pretty(&json!({"degree": verify_harmonic(&data)?})))
        }
        Command::Aut { curve, generators } => {
            let c = load_curve(curve)?;
            let gens = star_aut_generators(&c)?;
            let group = closure(&gens, CLOSURE_LIMIT);
            let as_json = |ms: &[ExpansiveMap]| -> Vec<Value> {
                ms.iter().map(|m| serde_json::from_str(&map_to_json(m)).expect("valid JSON")).collect()
            };
            let mut out = json!({
                "generators": as_json(&gens),
                "closure_size": group.as_ref().map(Vec::len),
            });
            if !generators {
                out["elements"] = group.as_deref().map_or(Value::Null, |g| Value::Array(as_json(g)));
            }
            Ok(to_pretty(&out))
        }
        Command::Classify { curve } => {
            let c = load_curve(curve)?;
            let witness = has_nonunit_dilation(&c);
            Ok(to_pretty(&json!({
                "star_infinite": c.is_star_infinite(),
                "nonunit_dilation": witness.is_some(),
                "witness_r": witness.map(|w| w.factor().to_string()),
            })))
        }
        Command::Pullback { map, f } => Ok(function_to_json(&pullback(&load_map(map)?).apply(&load_fn(f)?)?)),
        Command::Recover { map, samples } => {
            let m = load_map(map)?;
            let (source, target) = (m.source().clone(), m.target().clone());
            let psi: Box<dyn SemifieldMap> = Box::new(pullback(&m));
            drop(m);
            let mut pts: Vec<Point> = source.canonical_vertices().into_iter().map(Point::Vertex).collect();
            match samples {
                Some(path) => pts.extend(points_from_text(&source, &read(path)?)?),
                None => {
                    let mut r = rng(cli.seed);
                    pts.extend((0..trials(10)).map(|_| random_point(&source, &mut r)));
                }
            }
            let mut seen = std::collections::BTreeSet::new();
            pts.retain(|p| seen.insert(p.clone()));
            let report = recover_map(psi.as_ref(), &pts)?;
            Ok(report_to_json(&source, &target, &report))
        }
        Command::Verify { map, suite } => {
            let m = load_map(map)?;
            let psi = pullback(&m);
            let src = m.source();
            let mut r = rng(cli.seed);
            let n = trials(100);
            let mut passed = 0;
            let mut witness: Option<String> = None;
            for i in 0..n {
                let ok = match suite {
                    Suite::Homlaws => {
                        let f = random_function_or_bottom(src, &mut r);
                        let g = random_function_or_bottom(src, &mut r);
                        let res = check_hom_laws(&psi, &f, &g)?;
                        if let (None, Some(w)) = (&witness, res.witness) {
                            witness = Some(format!("trial {i}: {w}"));
                        }
                        res.ok
                    }
                    Suite::Lemma4 => check_lemma4(&psi, &random_function_or_bottom(src, &mut r))?,
                    Suite::Cor3 => check_divisor_correspondence(&psi, &m, &random_function(src, &mut r))?,
                };
                if ok {
                    passed += 1;
                } else if witness.is_none() {
                    witness = Some(format!("trial {i}"));
                }
            }
            let name = match suite {
                Suite::Lemma4 => "lemma4",
                Suite::Cor3 => "cor3",
                Suite::Homlaws => "homlaws",
            };
            Ok(to_pretty(&json!({
                "suite": name,
                "seed": cli.seed,
                "trials": n,
                "passed": passed,
                "failed": n - passed,
                "ok": passed == n,
                "witness": witness,
            })))
        }
        Command::ExportDot { curve, f, divisor } => {
            let f = f.as_deref().map(load_fn).transpose()?;
            let c = match (curve, &f) {
                (Some(name), _) => load_curve(name)?,
                (None, Some(f)) => f.curve().clone(),
                (None, None) => unreachable!("clap requires one of them"),
            };
            if let Some(f) = &f {
                if f.curve() != &c {
                    return Err(Error::CurveMismatch);
                }
            }
            let d = if *divisor { f.as_ref().map(RatFun::divisor).transpose()? } else { None };
            Ok(export_dot(&c, f.as_ref(), d.as_ref()))
        }
    }
}
