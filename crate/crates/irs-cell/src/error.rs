//! Error types shared across the crate.

use thiserror::Error;

/// Failures of the forward circuit model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    /// The parallel combination's denominator collapsed: the ideal lossless
    /// model has an impedance pole here and no finite answer exists.
    #[error(
        "degenerate circuit: parallel-combination denominator magnitude \
         {magnitude:e} ohm is below the {floor:e} ohm floor (lossless parallel resonance)"
    )]
    DegenerateCircuit { magnitude: f64, floor: f64 },

    /// The reflection coefficient is exactly zero; a matched load has no
    /// phase.
    #[error("undefined phase: reflection coefficient is zero (matched load)")]
    UndefinedPhase,

    /// A constructor input violated a type invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Failures of the inverse design solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InverseError {
    /// The inversion quadratic has no real positive capacitance root.
    #[error(
        "infeasible target: the inversion quadratic has no real positive root \
         (discriminant {discriminant:e})"
    )]
    InfeasibleTarget { discriminant: f64 },

    /// Real positive roots exist but none lies inside the requested window,
    /// and the caller demanded an in-window solution.
    #[error("no root in range: candidates {candidates:?} all fall outside the capacitance window")]
    NoRootInRange { candidates: Vec<f64> },

    /// Lossless degenerate case: every capacitance satisfies the target
    /// (full reflection from a lossless cell).
    #[error("every capacitance satisfies the target: lossless cell reflects fully at any bias")]
    AllCapacitancesValid,

    /// A target value violated its domain.
    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Failures of the verification oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid count: need at least {minimum} evaluation points, got {requested}")]
    InvalidCount { requested: usize, minimum: usize },

    #[error("invalid range for {name}: [{lo}, {hi}] is empty or unphysical")]
    InvalidRange {
        name: &'static str,
        lo: f64,
        hi: f64,
    },
}

/// Failures of the sweep engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),

    /// The requested output varies by less than the detection threshold
    /// across the whole grid; there is no extremum to refine.
    #[error("plateau detected: output varies by {variation:e} (< {threshold:e}) across the grid")]
    PlateauDetected { variation: f64, threshold: f64 },

    #[error("requested output column is not part of the sweep")]
    MissingOutput,
}
