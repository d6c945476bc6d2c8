use thiserror::Error;

/// Reason a parameter triple lies outside the existence window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    FroudeTooSmall,
    BelowHomoclinic,
    AboveSonic,
}

impl Rejection {
    pub fn code(self) -> &'static str {
        match self {
            Rejection::FroudeTooSmall => "froude_too_small",
            Rejection::BelowHomoclinic => "below_homoclinic",
            Rejection::AboveSonic => "above_sonic",
        }
    }
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid wave parameters: {0}")]
    InvalidParameters(Rejection),
    #[error("quadrature did not converge (estimated error {estimate:e})")]
    QuadratureNonconvergence { estimate: f64 },
    #[error("spectral parameter outside the solvability domain: Re(lambda) = {re} <= {threshold}")]
    SolvabilityViolation { re: f64, threshold: f64 },
    #[error("series recursion hit a resonant denominator at order {order}")]
    Resonance { order: usize },
    #[error("ODE integration failed: {0}")]
    StepFailure(String),
    #[error("degenerate modulation system (det A0 = {det:e})")]
    DegenerateSystem { det: f64 },
    #[error("alpha0 vanishes ({value:e})")]
    Alpha0Vanishes { value: f64 },
    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),
    #[error("no sign change in bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("contour passes too close to a zero near lambda = {re} + {im}i")]
    ContourNearZero { re: f64, im: f64 },
    #[error("contour refinement did not converge")]
    NonconvergentRefinement,
    #[error("continuation stalled at xi = {xi}")]
    ContinuationStall { xi: f64 },
    #[error("bracket endpoints do not classify differently")]
    BracketInvalid,
}

pub type Result<T> = std::result::Result<T, Error>;
