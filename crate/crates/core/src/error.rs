use thiserror::Error;

/// Errors raised by the cavity model.
///
/// Values are carried as `f64` so the error type is independent of the scalar
/// parameter of the routine that produced it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CavityError {
    /// A precondition on an input value was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Cavity length outside the stable range `0 < L < 2R`.
    #[error("unstable cavity geometry: length {length} m, mirror radius {roc} m")]
    UnstableGeometry { length: f64, roc: f64 },

    /// Round trip so lossy that the finesse expression has no real solution.
    #[error("sub-unity finesse: round-trip power fraction {rho} too small")]
    SubUnityFinesse { rho: f64 },

    #[error("non-finite integrand value at r = {abscissa}")]
    NonFiniteIntegrand { abscissa: f64 },

    #[error("quadrature did not converge: achieved relative tolerance {achieved:e}, requested {requested:e}")]
    NoConvergence { achieved: f64, requested: f64 },

    #[error("ray {ray_id} missed surface: {reason}")]
    RayMiss { ray_id: usize, reason: String },

    #[error("total internal reflection for ray {ray_id}")]
    TotalInternalReflection { ray_id: usize },

    /// Failure while tracing the ray launched at a given height or angle.
    #[error("tracing ray launched at {launch} failed: {source}")]
    Trace {
        launch: f64,
        #[source]
        source: Box<CavityError>,
    },

    #[error("range error: {0}")]
    Range(String),

    #[error("bracket error: {0}")]
    Bracket(String),
}

pub type Result<T, E = CavityError> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(CavityError::Domain(msg.into()))
}
