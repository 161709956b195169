//! The fixture zoo: small curves used throughout tests and examples.

use crate::curve::{Model, TropicalCurve};
use crate::io::{curve_from_json, model_from_json};

pub const PT: &str = include_str!("../fixtures/pt.json");
pub const SEG3: &str = include_str!("../fixtures/seg3.json");
pub const RAY: &str = include_str!("../fixtures/ray.json");
pub const LINE: &str = include_str!("../fixtures/line.json");
pub const STAR3: &str = include_str!("../fixtures/star3.json");
pub const CIRC2: &str = include_str!("../fixtures/circ2.json");
pub const THETA: &str = include_str!("../fixtures/theta.json");

/// `(name, json)` for every fixture.
pub const ALL: [(&str, &str); 7] =
    [("pt", PT), ("seg3", SEG3), ("ray", RAY), ("line", LINE), ("star3", STAR3), ("circ2", CIRC2), ("theta", THETA)];

/// Maps and harmonic data between fixtures. Their curves are given by fixture file name.
pub const EXTRA: [(&str, &str); 4] = [
    ("rot_circ2", include_str!("../fixtures/rot_circ2.json")),
    ("dilate_star3", include_str!("../fixtures/dilate_star3.json")),
    ("iota_line", include_str!("../fixtures/iota_line.json")),
    ("double_cover", include_str!("../fixtures/double_cover.json")),
];

/// The text of a shipped fixture file, by name with or without the `.json` suffix.
pub fn file(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    ALL.iter().chain(EXTRA.iter()).find(|(n, _)| n.eq_ignore_ascii_case(stem)).map(|(_, j)| *j)
}

fn load(json: &str) -> TropicalCurve {
    curve_from_json(json).expect("fixture is valid")
}

/// Looks a fixture up by name.
pub fn by_name(name: &str) -> Option<TropicalCurve> {
    ALL.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, j)| load(j))
}

pub fn model(name: &str) -> Option<Model> {
    ALL.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, j)| model_from_json(j).expect("fixture is valid"))
}

/// One vertex, no edges.
pub fn pt() -> TropicalCurve {
    load(PT)
}

/// A segment of length 3.
pub fn seg3() -> TropicalCurve {
    load(SEG3)
}

/// `[0, ∞]`.
pub fn ray() -> TropicalCurve {
    load(RAY)
}

/// `[−∞, ∞]`, glued at `v0`; `e0` runs towards `+∞`.
pub fn line() -> TropicalCurve {
    load(LINE)
}

/// Three infinite rays from one point.
pub fn star3() -> TropicalCurve {
    load(STAR3)
}

/// A circle of circumference 2.
pub fn circ2() -> TropicalCurve {
    load(CIRC2)
}

/// Two vertices joined by three edges of length 1.
pub fn theta() -> TropicalCurve {
    load(THETA)
}
