use thiserror::Error;

/// Structural problems with a diagram or with the arguments of a diagram operation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("diagram has no components")]
    EmptyDiagram,
    #[error("arc {arc} is not used exactly once as an incoming and once as an outgoing slot")]
    ArcMismatch { arc: u32 },
    #[error("component index {component} is missing or out of range")]
    ComponentGap { component: usize },
    #[error("crossing {crossing}: a strand changes component inside the crossing")]
    SlotComponentMix { crossing: usize },
    #[error("crossing {crossing}: a strand enters and leaves through the same arc")]
    DegenerateCrossing { crossing: usize },
    #[error("component {component} is not a single closed curve")]
    ComponentCycle { component: usize },
    #[error("signed crossing count between components {i} and {j} is odd")]
    NonIntegralLinking { i: usize, j: usize },
    #[error("component {component} does not exist (diagram has {count})")]
    BadComponent { component: usize, count: usize },
    #[error("crossing {crossing} does not exist (diagram has {count})")]
    BadCrossing { crossing: usize, count: usize },
    #[error("cable multiplicity {value} for component {component} must be at least 1")]
    BadMultiplicity { component: usize, value: i64 },
    #[error("expected {expected} cable multiplicities, got {found}")]
    MultiplicityCount { expected: usize, found: usize },
    #[error("not a permutation of 1..={count}")]
    BadPermutation { count: usize },
    #[error("invalid braid word: {0}")]
    InvalidBraid(String),
    #[error("invalid slice diagram: {0}")]
    InvalidSlices(String),
}

/// Failures while evaluating Conway coefficients or the invariant tower.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("expected a {expected}-component link, got {found} components")]
    WrongComponentCount { expected: usize, found: usize },
    #[error("Conway polynomial of a {components}-component link has a forbidden term of degree {degree}")]
    ParityViolation { components: usize, degree: usize },
    #[error("lowest Conway coefficient {found} differs from the linking-number prediction {expected}")]
    LowestCoefficient { expected: i128, found: i128 },
    #[error("some pairwise linking number is zero")]
    ZeroLinking,
    #[error("linking numbers do not define a good link")]
    NotGood,
    #[error("diagram has {crossings} crossings, above the limit of {limit}")]
    TooLarge { crossings: usize, limit: usize },
    #[error("unknown calculation figure {0} (expected 6..=11)")]
    BadFigure(u32),
    #[error("Alexander route failed: {0}")]
    Alexander(String),
}

/// Malformed input files and command-line payloads.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid diagram: {0}")]
    Diagram(#[from] DiagramError),
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl InputError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        InputError::Field { field: field.into(), message: message.into() }
    }
}
