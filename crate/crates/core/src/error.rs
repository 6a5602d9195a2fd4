use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("value {value} for coordinate {coordinate} is outside [0, 1]")]
    Domain { coordinate: usize, value: f64 },
    #[error("anchor of coordinate {coordinate} cannot be reached from guide {guide}")]
    Unreachable { coordinate: usize, guide: String },
    #[error("side ellipses do not intersect")]
    NoIntersection,
    #[error("side ellipses have coincident centers")]
    Degenerate,
    #[error("invalid ellipse: {0}")]
    InvalidEllipse(String),
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("node {node} is not on any reachable locus of the layout")]
    Inversion { node: usize },
    #[error("no point of the layout maps onto the requested line")]
    EmptyResult,
    #[error("row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: Box<GeometryError>,
    },
}

impl GeometryError {
    pub fn at_row(self, row: usize) -> Self {
        match self {
            GeometryError::Row { .. } => self,
            other => GeometryError::Row { row, source: Box::new(other) },
        }
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("no data rows")]
    Empty,
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("line {line}, column '{column}': '{value}' is not a number")]
    NonNumeric { line: usize, column: String, value: String },
    #[error("line {line}, column '{column}': missing value")]
    Missing { line: usize, column: String },
    #[error("label column {0} not found")]
    MissingLabel(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("rules were built for a different layout")]
    FingerprintMismatch,
    #[error("{0} partition is empty")]
    EmptyPartition(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid rectangle: {0}")]
    InvalidRect(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Umbrella error for the pipeline layer used by the CLI and the service.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Rules(#[from] RulesError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("selected case {index} is out of range ({count} cases)")]
    SelectedCase { index: usize, count: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
