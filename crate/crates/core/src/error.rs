use thiserror::Error;

/// Everything that can go wrong while analysing or propagating a Kepler state.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HodoError {
    #[error("singular position (|x| = 0)")]
    SingularPosition,
    #[error("degenerate radial motion (J = 0)")]
    DegenerateRadialMotion,
    #[error("state lies outside the orbital plane (|x . e3| = {offset:e})")]
    OutOfPlane { offset: f64 },
    #[error("theta = {theta} lies outside the conic branch (1 + e cos theta = {denominator:e})")]
    OutsideBranch { theta: f64, denominator: f64 },
    #[error("not hyperbolic ({0})")]
    NotHyperbolic(&'static str),
    #[error("points are collinear; circle fit is singular")]
    DegenerateCollinear,
    #[error("integrator exceeded {0} steps")]
    StepLimitExceeded(usize),
    #[error("non-finite value encountered during integration at t = {0}")]
    NonFinite(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl HodoError {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            HodoError::StepLimitExceeded(_)
                | HodoError::NonFinite(_)
                | HodoError::DegenerateCollinear
                | HodoError::SingularPosition
        )
    }
}

pub type Result<T> = std::result::Result<T, HodoError>;
