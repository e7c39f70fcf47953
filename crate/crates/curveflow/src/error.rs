//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Error`]. Variants carry
//! enough context (indices, offending values) to diagnose a failure without
//! re-running the computation.

use crate::geometry::Topology;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by curve geometry, anisotropy evaluation, assembly,
/// solving, and simulation driving.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A segment of a polygonal curve is shorter than the degeneracy
    /// threshold (`1e-12` relative to the mean segment length).
    #[error("degenerate segment {index}: length {length:.3e} below threshold {threshold:.3e}")]
    DegenerateSegment {
        index: usize,
        length: f64,
        threshold: f64,
    },

    /// A curve fails basic structural requirements (node count, substrate
    /// contact, ordering of contact points, ...).
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// Two sampled fields (or a field and a curve) disagree in length or in
    /// scalar/vector kind.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A polygon handed to the symmetric-difference measure intersects
    /// itself, so "enclosed region" is ill-defined.
    #[error("self-intersecting curve: segments {seg_a} and {seg_b} cross")]
    SelfIntersectingCurve { seg_a: usize, seg_b: usize },

    /// Operation requires both curves to share a topology class.
    #[error("topology mismatch: {left:?} vs {right:?}")]
    TopologyMismatch { left: Topology, right: Topology },

    /// An anisotropy evaluated to a non-positive value, which makes the
    /// interfacial energy density meaningless.
    #[error("non-positive anisotropy value {value:.6e} at theta = {theta:.6}")]
    NonPositiveGamma { theta: f64, value: f64 },

    /// An anisotropy specification violates its structural invariants
    /// (non-symmetric metric matrix, non-positive-definite metric, k = 0, ...).
    #[error("invalid anisotropy spec: {0}")]
    InvalidSpec(String),

    /// The linear system for a time step could not be solved reliably:
    /// factorization failed or the residual check rejected the solution.
    #[error("singular or numerically unreliable step system: {0}")]
    SingularSystem(String),

    /// Contact-line mobility must be strictly positive and finite.
    #[error("invalid contact-line mobility eta = {0:.6e}; must be > 0")]
    InvalidMobility(f64),

    /// A shape request cannot be built (non-positive dimensions, missing
    /// file, too few nodes requested).
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// Simulation configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The initial curve fails the well-posedness check, so no step system
    /// can be formed.
    #[error("ill-posed initial curve: {0}")]
    IllPosedInitialCurve(String),

    /// Discrete interfacial energy increased across a step while the
    /// monotonicity assertion was active.
    #[error(
        "energy increased at t = {t:.6e}: {previous:.12e} -> {current:.12e} (relative slack 1e-10)"
    )]
    EnergyIncrease { t: f64, previous: f64, current: f64 },

    /// Convergence-study specification failed validation.
    #[error("invalid convergence spec: {0}")]
    InvalidConvergenceSpec(String),

    /// Snapshot / configuration files that cannot be parsed.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// Underlying I/O failure (reading configs, writing outputs).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
