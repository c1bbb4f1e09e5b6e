use thiserror::Error;

use crate::cavity::Parity;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// `m22` underflowed; the stack does not describe a physical element.
    #[error("degenerate transfer matrix: |m22| = {0:e}")]
    DegenerateMatrix(f64),

    #[error("position {position} nm lies outside the stack extent [0, {extent}] nm")]
    PositionOutOfRange { position: f64, extent: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid wavelength range [{min}, {max}] nm with {samples} samples")]
    InvalidRange { min: f64, max: f64, samples: usize },

    #[error("invalid finesse {0}: must be finite and greater than 1")]
    InvalidFinesse(f64),

    #[error("invalid cavity geometry: {0}")]
    Geometry(String),

    #[error(
        "parity conflict at k = {k_res} rad/nm: mode index gives {index_parity:?}, \
         field symmetry gives {symmetry_parity:?}"
    )]
    ParityConflict {
        k_res: f64,
        index_parity: Parity,
        symmetry_parity: Parity,
    },

    #[error(
        "analytic coupling pole: 1 {sign} 4(d/L)ζ√(1+ζ²) vanishes for ζ = {zeta}, d/L = {d_over_l}"
    )]
    Pole {
        zeta: f64,
        d_over_l: f64,
        sign: char,
    },

    #[error("not at a transmissive point: χ = {0:e}")]
    NotTransmissive(f64),

    #[error(
        "finite-difference step degenerate: resonance shift {shift:e} rad/nm below resolution \
         {resolution:e} rad/nm at the largest allowed step {step} nm"
    )]
    StepDegenerate {
        shift: f64,
        resolution: f64,
        step: f64,
    },

    #[error(
        "lost track of the resonance near k = {k_res} rad/nm after displacing membrane {membrane}"
    )]
    TrackingLost { k_res: f64, membrane: usize },

    #[error("finite-difference coupling not converged for membrane {membrane}: relative change {relative_change:e}")]
    NotConverged {
        membrane: usize,
        relative_change: f64,
    },

    #[error("{0}")]
    Unsupported(String),

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::PositionOutOfRange { .. }
                | Error::InvalidParameter { .. }
                | Error::InvalidRange { .. }
                | Error::InvalidFinesse(_)
                | Error::Geometry(_)
                | Error::Unsupported(_)
                | Error::Config { .. }
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}
