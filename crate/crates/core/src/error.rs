use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failures raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of a physical function.
    Domain { what: &'static str, value: f64 },
    /// Invalid model or grid parameter.
    InvalidParameter { name: &'static str, reason: &'static str },
    /// Richardson estimate of a kernel quadrature above tolerance.
    QuadratureNotConverged { estimate: f64, tolerance: f64, momentum: f64 },
    /// `|ln X|` exceeded the overflow cap at position `x`.
    Overflow { x: f64, log_value: f64 },
    /// `∂U/∂x + A·f₀` vanishes at momentum `p` and clamping is disabled.
    SingularDenominator { p: f64 },
    /// A non-finite value appeared in the fixed-point loop.
    NonFinite { iteration: usize },
    /// Fields of incompatible shape were combined.
    ShapeMismatch { expected: usize, found: usize },
    /// Bisection for the chemical potential failed to bracket the density.
    NoBracket { density: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::InvalidParameter { name, reason } => write!(f, "invalid parameter `{name}`: {reason}"),
            Error::QuadratureNotConverged { estimate, tolerance, momentum } => write!(
                f,
                "kernel quadrature not converged at p = {momentum}: Richardson estimate {estimate:e} > {tolerance:e}"
            ),
            Error::Overflow { x, log_value } => {
                write!(f, "X(x) overflow at x = {x} nm (ln X = {log_value})")
            }
            Error::SingularDenominator { p } => {
                write!(f, "force coefficient vanishes at p = {p} (singular P integrand)")
            }
            Error::NonFinite { iteration } => {
                write!(f, "non-finite value in fixed-point iteration {iteration}")
            }
            Error::ShapeMismatch { expected, found } => {
                write!(f, "field shape mismatch: expected {expected} points, found {found}")
            }
            Error::NoBracket { density } => {
                write!(f, "cannot bracket chemical potential for density {density}")
            }
        }
    }
}

impl core::error::Error for Error {}
