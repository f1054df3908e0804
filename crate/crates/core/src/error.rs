use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to diagnose a
/// failure without chasing the call site.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields: {0} vs {1}")]
    MixedFields(String, String),
    #[error("operation requires a finite field, got {0}")]
    InfiniteField(String),
    #[error("unsupported field for this operation: {0}")]
    UnsupportedField(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is not a monic irreducible of degree {expected}: {detail}")]
    BadModulus { expected: u32, detail: String },
    #[error("field order {order} exceeds the configured bound {bound}")]
    FieldTooLarge { order: u64, bound: u64 },
    #[error("unknown field name {0:?} (expected q2..q13 or rational)")]
    UnknownField(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("points are not collinear")]
    NotCollinear,
    #[error("cross ratio needs at least three distinct points")]
    TooDegenerate,
    #[error("matrix is singular")]
    SingularMatrix,

    #[error("point is not an affine surface point: {0}")]
    NotAffineSurfacePoint(String),
    #[error("point is not on the surface: {0}")]
    NotOnSurface(String),
    #[error("point is not on the parabola: {0}")]
    NotOnParabola(String),
    #[error("plane passes through K(0,0,0,1) so the tangency point is not defined")]
    PlaneThroughQ3,
    #[error("plane contains no generator, hence is not a tangent plane")]
    NoGeneratorInPlane,
    #[error("operation requires |K| >= 4, got {0}")]
    SmallField(u64),
    #[error("scale factor must be nonzero")]
    ZeroScale,

    #[error("pair is not an antiflag: {0}")]
    NotAnAntiflag(String),
    #[error("distances disagree: {0} vs {1}")]
    DistanceMismatch(String, String),
    #[error("points are not parallel (or coincide): {0}")]
    NotParallel(String),
    #[error("rigidity witness requires u1 outside {{0, 1}}")]
    DegenerateU1,
    #[error("map is not an isometry: {0}")]
    NotAnIsometry(String),
    #[error("interpolation needs three points with distinct first parameters")]
    ParallelPoints,
    #[error("a characteristic in {{2, 3}} is not allowed here")]
    BadCharacteristic,

    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("internal consistency check failed: {0}")]
    ConsistencyFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
