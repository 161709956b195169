use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Domain errors. The serialized form (`{"error": <kind>, "detail": ...}`)
/// is what the CLI prints on exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", content = "detail")]
pub enum Error {
    // curves
    #[error("the model has no vertices")]
    EmptyGraph,
    #[error("the model graph is not connected")]
    DisconnectedGraph,
    #[error("edge {0} has infinite length but its designated end is not a leaf")]
    InfiniteNonLeafEdge(String),
    #[error("edge {0} has infinite length but no designated infinite end")]
    MissingInfiniteEnd(String),
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("point {0} does not lie on the curve")]
    PointNotOnCurve(String),
    #[error("the point is at infinity")]
    PointAtInfinity,

    // rational functions
    #[error("+inf is not a constant of the tropical semifield")]
    PlusInfinityConstant,
    #[error("functions or maps live on different curves")]
    CurveMismatch,
    #[error("the constant -inf has no multiplicative inverse")]
    InvertBottom,
    #[error("operation undefined for the constant -inf")]
    BottomFunction,
    #[error("non-integer slope on edge {0}")]
    NonIntegerSlope(String),
    #[error("invalid rational function: {0}")]
    MalformedFunction(String),
    #[error("+inf + -inf is undefined")]
    IndeterminateSum,
    #[error("bad probe geometry: {0}")]
    BadProbeGeometry(String),

    // chip-firing
    #[error("the subgraph is empty")]
    EmptySubgraph,
    #[error("the subgraph has a component consisting of a single point at infinity")]
    IsolatedInfinityComponent,
    #[error("invalid subgraph: {0}")]
    MalformedSubgraph(String),
    #[error("{0} is not a point at infinity")]
    NotAPointAtInfinity(String),
    #[error("{0} is not a finite point on the leaf edge ending at the given point at infinity")]
    PointNotOnTailEdge(String),

    // maps
    #[error("map is not bijective: {0}")]
    NotBijective(String),
    #[error("expansion factor violated: {0}")]
    FactorViolated(String),
    #[error("points at infinity are not mapped onto points at infinity")]
    InfinityNotPreserved,
    #[error("not harmonic: clause ({clause}) fails: {detail}")]
    NotHarmonic { clause: u8, detail: String },
    #[error("harmonic-morphism data requires loopless models (loop {0})")]
    LoopyModel(String),
    #[error("the curve is not a star of infinite rays")]
    NotStarInfinite,

    // semiring isomorphisms
    #[error("the oracle sends a constant to a non-constant: {0}")]
    NonConstantImageOfConstant(String),
    #[error("the oracle's image of 1 is not a positive constant: {0}")]
    NonPositiveFactor(String),
    #[error("probe at {point} did not converge after {attempts} attempts")]
    ProbeDivergence { point: String, attempts: usize },
    #[error(
        "valence mismatch: {source_point} has valence {source_valence}, image {image} has valence {image_valence}"
    )]
    ValenceMismatch { source_point: String, source_valence: usize, image: String, image_valence: usize },
    #[error("probe at {0} peaks at a point at infinity")]
    ArgmaxAtInfinity(String),
    #[error("probe at {0} has several poles at infinity")]
    MultipleInfinitePoles(String),
    #[error("samples must include every canonical vertex; missing {0}")]
    MissingCanonicalVertex(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.get("error").and_then(|k| k.as_str().map(str::to_owned)))
            .unwrap_or_else(|| "Unknown".to_owned())
    }
}
