//! Error types shared across the solver library.

use thiserror::Error;

/// Failures raised by model evaluations and cell-local implicit solves.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("inadmissible state for {model}: {what}")]
    Inadmissible { model: &'static str, what: String },
    #[error(
        "stiff solve did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    StiffSolveFailed { residual: f64, iterations: usize },
    #[error("singular cell-local implicit system")]
    SingularImplicitSystem,
    #[error("model {model} has no closed relaxed-limit system")]
    RelaxedLimitUnsupported { model: &'static str },
    #[error("relaxed-limit state has wrong dimension (expected {expected}, got {got})")]
    RelaxedLimitDimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GridError {
    #[error("domain must satisfy x_right > x_left (got [{x_left}, {x_right}])")]
    BadDomain { x_left: f64, x_right: f64 },
    #[error("need at least 4 cells so the stencil stays inside the interior (got {n_cells})")]
    TooFewCells { n_cells: usize },
    #[error("maximum wavespeed is zero over the whole field; no CFL time step exists")]
    DegenerateWavespeed,
    #[error("CFL number must be positive (got {cfl})")]
    NonPositiveCfl { cfl: f64 },
}

/// A time step that could not be completed, tagged with where it failed.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum StepError {
    #[error("step failed at cell {cell}: {source}")]
    AtCell {
        cell: usize,
        #[source]
        source: ModelError,
    },
    #[error("step failed at interface {interface}: {source}")]
    AtInterface {
        interface: usize,
        #[source]
        source: ModelError,
    },
    #[error("step produced a non-finite state at cell {cell}")]
    NonFinite { cell: usize },
    #[error("time step must be positive (got {dt})")]
    NonPositiveDt { dt: f64 },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StabilityError {
    #[error("amplification factor has a pole at z = {z}")]
    Pole { z: f64 },
    #[error(
        "wavenumber k*dx = {k_dx} is not representable on a periodic ring of <= {max_ring} cells"
    )]
    NotRepresentable { k_dx: f64, max_ring: usize },
    #[error("scheme response is not a pure Fourier mode (projection residual {residual:.3e}); the scheme is nonlinear for this query")]
    NonlinearityDetected { residual: f64 },
    #[error("no Fourier symbol is defined for scheme {scheme}")]
    UnsupportedScheme { scheme: &'static str },
    #[error("query violates its preconditions: {what}")]
    BadQuery { what: String },
    #[error("scheme step failed during symbol extraction: {0}")]
    Step(#[from] StepError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown test case `{0}`")]
    UnknownCase(String),
    #[error("grids are incompatible: {what}")]
    IncompatibleGrids { what: String },
    #[error("run configuration invalid: {what}")]
    BadRunConfig { what: String },
    #[error("solver failed at t = {time:.6}: {source}")]
    StepFailed {
        time: f64,
        #[source]
        source: StepError,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("reference cache I/O failed for {path}: {source}")]
    CacheIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("reference cache entry {path} is corrupt: {what}")]
    CacheCorrupt { path: String, what: String },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: missing `=` separator")]
    MissingSeparator { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {what}")]
    BadValue {
        line: usize,
        key: String,
        what: String,
    },
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CsvError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: expected {expected} fields, got {got}")]
    FieldCount {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: `{field}` is not a finite number")]
    BadNumber { line: usize, field: String },
    #[error("header must start with an `x` column")]
    BadHeader,
}
