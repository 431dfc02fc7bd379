use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the dense linear-algebra layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("{routine} did not converge (n = {dim}, norm = {norm:.3e})")]
    NoConvergence {
        routine: &'static str,
        dim: usize,
        norm: f64,
    },
    #[error("shift {zeta} is numerically singular (sigma_min(zeta I - A) ~ {sigma_min:.3e})")]
    SingularShift { zeta: Complex64, sigma_min: f64 },
    #[error("matrix exponential overflowed (norm of tA = {norm:.3e})")]
    Overflow { norm: f64 },
    #[error("eigenvalue {lambda} is defective or clustered; eigenvectors unavailable")]
    Defective { lambda: Complex64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector norm {norm} is not 1")]
    NotUnit { norm: f64 },
    #[error("vectors are parallel (|y* x| = {overlap}); the reduction is undefined")]
    ParallelVectors { overlap: f64 },
    #[error("{lambda} is not an eigenvalue (sigma_min = {sigma_min:.3e})")]
    NotAnEigenvalue { lambda: Complex64, sigma_min: f64 },
    #[error("factor {index} of the product is singular")]
    SingularFactor { index: usize },
}

/// Failures raised while building or integrating over a boundary path.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum PathError {
    #[error("loop {index} has {nodes} nodes; at least 3 are required")]
    TooFewNodes { index: usize, nodes: usize },
    #[error("eigenvalue {lambda} is not strictly inside the region (distance {distance:.3e})")]
    SpectrumOutside { lambda: Complex64, distance: f64 },
    #[error("point {z} lies within one node spacing of the boundary")]
    PointOnPath { z: Complex64 },
    #[error("quadrature certificate {certificate:.3e} above tolerance {tol:.1e} after {levels} refinements")]
    CertificateFailed {
        certificate: f64,
        tol: f64,
        levels: u32,
    },
    #[error("resolvent failed at boundary node {zeta}: {source}")]
    NodeResolvent {
        zeta: Complex64,
        #[source]
        source: LinalgError,
    },
    #[error("sampled function has {found} values for {expected} nodes")]
    SampleMismatch { expected: usize, found: usize },
}

/// Failures raised while constructing a region.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum RegionError {
    #[error("invalid region spec: {0}")]
    InvalidSpec(String),
    #[error("disk ({center}, r = {radius:.6e}) covers the whole region")]
    DiskCoversRegion { center: Complex64, radius: f64 },
    #[error("disk ({center}, r = {radius:.6e}) does not meet the region")]
    DiskMissesRegion { center: Complex64, radius: f64 },
    #[error("disk center {center} is an eigenvalue of A")]
    CenterIsEigenvalue { center: Complex64 },
    #[error("clip leaves an empty region")]
    EmptyIntersection,
    #[error("scan window too small: sigma_min <= eps on the {face} face")]
    WindowTooSmall { face: &'static str },
    #[error("no level-set contour found at eps = {eps:e}")]
    NoContour { eps: f64 },
    #[error("region loops could not be stitched: {0}")]
    Stitch(String),
    #[error("loop count ({loops}) disagrees with flood fill ({flood})")]
    ConnectivityMismatch { loops: usize, flood: usize },
    #[error("operation requires a simply connected region, found {loops} loops")]
    NotSimplyConnected { loops: usize },
    #[error("region has a reflex corner at {at}; outward smoothing needs a convex corner")]
    ReflexCorner { at: Complex64 },
    #[error("eigenvalue {lambda} lies outside or on the boundary of the region")]
    SpectrumNotInside { lambda: Complex64 },
}

/// Failures raised by the conformal map and the Blaschke lower bound.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MapError {
    #[error("map center {center} is not strictly inside the region")]
    CenterOutside { center: Complex64 },
    #[error("boundary has {corners} corners; smooth them before mapping")]
    Corners { corners: usize },
    #[error("Blaschke root {index} has modulus {modulus} > 1")]
    RootOutsideDisk { index: usize, modulus: f64 },
    #[error("boundary correspondence is not monotone at node {node}")]
    NotMonotone { node: usize },
    #[error("map sends its center to a point of modulus {residual:.3e}")]
    CenterResidual { residual: f64 },
    #[error("Szego kernel solve stalled at residual {residual:.3e}")]
    SolveStalled { residual: f64 },
    #[error("Cauchy integral for the mapped matrix changed by {change:.3e} under refinement")]
    NotConverged { change: f64 },
}

/// Failures raised by the text and JSON front-ends.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    MatrixMarket { line: usize, msg: String },
    #[error("gallery spec: {0}")]
    Gallery(String),
    #[error("region spec: {0}")]
    Region(String),
    #[error("complex literal: {0}")]
    Complex(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the failure happened while building the region rather than
    /// while evaluating something on it.
    pub fn is_region(&self) -> bool {
        matches!(self, Error::Region(_) | Error::Parse(ParseError::Region(_)))
    }
}
