//! Reflection behavior of a varactor-tuned reflecting-surface unit cell.
//!
//! A unit cell is modeled as an equivalent parallel-resonant circuit: a
//! bottom-layer inductance `L1` in parallel with a series branch of the
//! top-layer inductance `L2`, the varactor capacitance `C`, and a loss
//! resistance `R`. The cell reflects an incident wave of frequency `f`
//! with reflection coefficient `Γ = 𝓡·e^{jθ}`, and tuning `C` steers the
//! phase shift `θ` and reflection amplitude `𝓡` per element — the knobs of
//! reflective beamforming.
//!
//! The crate provides four things:
//!
//! - [`circuit`] — the forward model in closed form: coefficient expansion
//!   of `Γ`, quadrant-aware `θ`, and `𝓡` without complex division.
//! - [`inverse`] — the design direction: given a desired `θ` or `𝓡`, solve
//!   the induced quadratic for the capacitance that realizes it, with both
//!   roots forward-verified and honest residual reporting.
//! - [`oracle`] — an independent ground truth (direct complex composition
//!   plus brute-force grid inversion) validating every closed form.
//! - [`sweep`] — curve generation over capacitance, frequency, or design
//!   targets, extremum location, and CSV/JSON emission.
//!
//! # Example
//!
//! ```
//! use irs_cell::circuit::{OperatingPoint, UnitCellParams};
//! use irs_cell::inverse::{self, CapacitanceWindow, PhaseTarget, WindowPolicy};
//!
//! let params = UnitCellParams::in_free_space(2.4e-9, 0.5e-9, 3.0).unwrap();
//! let op = OperatingPoint::new(1.0e-12, 2.4e9).unwrap();
//!
//! // Forward: what does this bias and frequency reflect?
//! let state = irs_cell::circuit::reflection_state(&params, &op).unwrap();
//! assert!(state.magnitude <= 1.0);
//!
//! // Inverse: which capacitance reproduces that phase?
//! let target = PhaseTarget::new(state.phase, params, 2.4e9).unwrap();
//! let sol = inverse::capacitance_from_phase(
//!     &target,
//!     &CapacitanceWindow::default(),
//!     WindowPolicy::Advisory,
//! )
//! .unwrap();
//! assert!(sol.residual < 1e-6);
//! ```
//!
//! All public numeric interfaces are SI (henries, farads, hertz, ohms,
//! radians); unit conversion belongs to front ends.

pub mod circuit;
pub mod error;
pub mod inverse;
pub mod oracle;
pub mod quadratic;
pub mod sweep;

pub use circuit::{
    OperatingPoint, PhaseCoefficients, ReflectionState, UnitCellParams, FREE_SPACE_IMPEDANCE,
};
pub use error::{CircuitError, InverseError, OracleError, SweepError};
pub use inverse::{
    AmplitudeTarget, CapacitanceWindow, DesignRequest, DesignSolution, DesignTableRow, PhaseTarget,
    QuadraticProblem, TargetKind, WindowPolicy,
};
pub use oracle::{EquivalenceTolerances, OracleReport, RoundTripReport, SweepRanges};
pub use sweep::{
    CurveData, Extremum, ExtremumKind, OutputColumn, SweepSpec, SweepVariable, DEFAULT_FIGURE_STEPS,
};
