use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    DivisionByZero,
    NotDivisible,
    CenterIsPole,
    ZeroPolynomial,
    Parse { pos: usize, msg: &'static str },
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::DivisionByZero => write!(f, "division by the zero polynomial"),
            PolyError::NotDivisible => write!(f, "polynomial division left a remainder"),
            PolyError::CenterIsPole => write!(f, "series center is a pole"),
            PolyError::ZeroPolynomial => write!(f, "zero polynomial not allowed here"),
            PolyError::Parse { pos, msg } => write!(f, "parse error at {}: {}", pos, msg),
        }
    }
}

impl core::error::Error for PolyError {}

#[derive(Debug, Clone, PartialEq)]
pub enum RootError {
    DegreeTooLow,
    NoConvergence { iterations: usize, residual: f64 },
    EvaluationAtRoot,
    EmptyRootSet,
}

impl fmt::Display for RootError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootError::DegreeTooLow => write!(f, "polynomial has no roots to find"),
            RootError::NoConvergence { iterations, residual } => {
                write!(f, "root finder did not converge after {} iterations (residual {:e})", iterations, residual)
            }
            RootError::EvaluationAtRoot => write!(f, "evaluation point is a root"),
            RootError::EmptyRootSet => write!(f, "empty root set"),
        }
    }
}

impl core::error::Error for RootError {}

#[derive(Debug, Clone, PartialEq)]
pub enum OdeError {
    InsufficientOrder { have: usize, need: usize },
    RepeatedRoots,
    BadAlpha,
    RootIndex,
    Root(RootError),
}

impl fmt::Display for OdeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OdeError::InsufficientOrder { have, need } => {
                write!(f, "series has {} coefficients, need more than {}", have, need)
            }
            OdeError::RepeatedRoots => write!(f, "polynomial has repeated roots"),
            OdeError::BadAlpha => write!(f, "alpha must satisfy 0 < alpha < deg P"),
            OdeError::RootIndex => write!(f, "root index out of range"),
            OdeError::Root(e) => write!(f, "{}", e),
        }
    }
}

impl core::error::Error for OdeError {}

impl From<RootError> for OdeError {
    fn from(e: RootError) -> Self {
        OdeError::Root(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveError {
    BadAlpha,
    DegenerateInput,
    DegreeTooLow,
    Root(RootError),
}

impl fmt::Display for CurveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveError::BadAlpha => write!(f, "alpha must satisfy 0 < alpha < deg P"),
            CurveError::DegenerateInput => write!(f, "point lies on the excluded locus of the coordinate change"),
            CurveError::DegreeTooLow => write!(f, "polynomial must have degree at least 2"),
            CurveError::Root(e) => write!(f, "{}", e),
        }
    }
}

impl core::error::Error for CurveError {}

impl From<RootError> for CurveError {
    fn from(e: RootError) -> Self {
        CurveError::Root(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SaddleError {
    PoleHit,
    BranchPoint { separation: f64 },
    StepFailure { steps: usize },
    AmbiguousClassification,
    NearDelta { gap: f64 },
    Curve(CurveError),
}

impl fmt::Display for SaddleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SaddleError::PoleHit => write!(f, "evaluation at a pole of the phase"),
            SaddleError::BranchPoint { separation } => {
                write!(f, "fiber has a (near) double saddle, separation {:e}", separation)
            }
            SaddleError::StepFailure { steps } => write!(f, "ascent path failed after {} steps", steps),
            SaddleError::AmbiguousClassification => write!(f, "no unique maximally relevant saddle"),
            SaddleError::NearDelta { gap } => write!(f, "two saddles have equal height (gap {:e})", gap),
            SaddleError::Curve(e) => write!(f, "{}", e),
        }
    }
}

impl core::error::Error for SaddleError {}

impl From<CurveError> for SaddleError {
    fn from(e: CurveError) -> Self {
        SaddleError::Curve(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResidueError {
    GenericityFailure,
    ContinuationFailure,
    Curve(CurveError),
}

impl fmt::Display for ResidueError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueError::GenericityFailure => write!(f, "polynomial is not strongly generic"),
            ResidueError::ContinuationFailure => write!(f, "branch continuation failed along the loop"),
            ResidueError::Curve(e) => write!(f, "{}", e),
        }
    }
}

impl core::error::Error for ResidueError {}

impl From<CurveError> for ResidueError {
    fn from(e: CurveError) -> Self {
        ResidueError::Curve(e)
    }
}

impl From<RootError> for ResidueError {
    fn from(e: RootError) -> Self {
        ResidueError::Curve(CurveError::Root(e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadraticError {
    AlphaOutOfRange,
    OnSupport,
}

impl fmt::Display for QuadraticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadraticError::AlphaOutOfRange => write!(f, "alpha must lie in (0, 2)"),
            QuadraticError::OnSupport => write!(f, "point lies on the support"),
        }
    }
}

impl core::error::Error for QuadraticError {}
