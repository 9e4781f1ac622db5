//! Forward reflection model of a single reflecting-surface unit cell.
//!
//! The cell is an equivalent parallel-resonant circuit: a bottom-layer
//! inductance `L1` in parallel with a series branch `L2 – C – R`, where `C`
//! is the varactor's tunable capacitance. An incident wave at frequency `f`
//! sees the cell impedance `Z`, and the mismatch against the medium
//! impedance `Z0` produces the reflection coefficient
//! `Γ = (Z − Z0) / (Z + Z0) = 𝓡·e^{jθ}`.
//!
//! Everything here is closed-form: `Γ` expands to a ratio of two complex
//! numbers whose parts are polynomial in the circuit parameters, and the
//! phase shift `θ` and reflection amplitude `𝓡` fall out of that ratio
//! without ever dividing by `𝓡`. The expanded route is validated against a
//! direct complex-arithmetic evaluation in [`crate::oracle`].
//!
//! All quantities are SI: henries, farads, hertz, ohms, radians.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CircuitError;

/// Characteristic impedance of free space, ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 377.0;

/// Parallel-combination denominator magnitudes below this (in ohms) are
/// treated as the lossless parallel-resonance pole. Any loss resistance of
/// practical size keeps the denominator well above it.
pub const DEGENERACY_FLOOR_OHMS: f64 = 1e-9;

// ─── Domain types ───────────────────────────────────────────────────────────

/// Fixed electrical identity of one unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitCellParams {
    /// Bottom-layer inductance, henries.
    pub l1: f64,
    /// Top-layer inductance, henries.
    pub l2: f64,
    /// Loss resistance of the series branch, ohms.
    pub r: f64,
    /// Characteristic impedance of the incident medium, ohms.
    pub z0: f64,
}

impl UnitCellParams {
    /// Validated constructor: `l1 > 0`, `l2 ≥ 0`, `r ≥ 0`, `z0 > 0`,
    /// all finite.
    pub fn new(l1: f64, l2: f64, r: f64, z0: f64) -> Result<Self, CircuitError> {
        let p = Self { l1, l2, r, z0 };
        p.validate()?;
        Ok(p)
    }

    /// Free-space `z0` variant of [`UnitCellParams::new`].
    pub fn in_free_space(l1: f64, l2: f64, r: f64) -> Result<Self, CircuitError> {
        Self::new(l1, l2, r, FREE_SPACE_IMPEDANCE)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        fn bad(name: &str, v: f64, cond: &str) -> CircuitError {
            CircuitError::InvalidParameter(format!("{name} = {v} violates {cond}"))
        }
        if !(self.l1.is_finite() && self.l1 > 0.0) {
            return Err(bad("l1", self.l1, "l1 > 0"));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(bad("l2", self.l2, "l2 >= 0"));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(bad("r", self.r, "r >= 0"));
        }
        if !(self.z0.is_finite() && self.z0 > 0.0) {
            return Err(bad("z0", self.z0, "z0 > 0"));
        }
        Ok(())
    }
}

impl Default for UnitCellParams {
    /// Midpoints of the practical varactor-cell ranges, free-space `z0`.
    fn default() -> Self {
        Self {
            l1: 2.4e-9,
            l2: 0.48e-9,
            r: 3.0,
            z0: FREE_SPACE_IMPEDANCE,
        }
    }
}

/// Tunable state of the cell: varactor capacitance and incident frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Varactor equivalent capacitance, farads.
    pub c: f64,
    /// Incident signal frequency, hertz.
    pub f: f64,
}

impl OperatingPoint {
    /// Validated constructor: `c > 0`, `f > 0`, both finite.
    pub fn new(c: f64, f: f64) -> Result<Self, CircuitError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(CircuitError::InvalidParameter(format!(
                "c = {c} violates c > 0"
            )));
        }
        if !(f.is_finite() && f > 0.0) {
            return Err(CircuitError::InvalidParameter(format!(
                "f = {f} violates f > 0"
            )));
        }
        Ok(Self { c, f })
    }

    /// Angular frequency `ω = 2πf`, radians per second. Always derived,
    /// never stored.
    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * self.f
    }
}

/// Polar form of the reflection coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionState {
    /// Reflection amplitude `𝓡`, dimensionless, in `[0, 1]` for `r ≥ 0`.
    pub magnitude: f64,
    /// Phase shift `θ`, radians, in `(−π, π]`.
    pub phase: f64,
}

/// Expansion of `Γ` as a ratio of two complex numbers:
/// `Γ = (num_re + j·num_im) / (den_re + j·den_im)`.
///
/// The four parts are polynomial in the circuit parameters; the closed-form
/// phase and amplitude are read directly off them. Two identities pin the
/// construction down: `den_re − num_re = 2·R·Z0` and
/// `den_im + num_im = 2·ω·R·L1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseCoefficients {
    /// Real part of the `Γ` numerator, ohms².
    pub num_re: f64,
    /// Imaginary part of the `Γ` numerator, ohms².
    pub num_im: f64,
    /// Real part of the `Γ` denominator, ohms².
    pub den_re: f64,
    /// Imaginary part of the `Γ` denominator, ohms².
    pub den_im: f64,
}

// ─── Operations ─────────────────────────────────────────────────────────────

/// Impedance of the series branch `R + j(ωL2 − 1/(ωC))`, ohms.
///
/// The real part equals `p.r` exactly; `c > 0` guards the `1/(ωC)` pole.
pub fn series_branch_impedance(p: &UnitCellParams, op: &OperatingPoint) -> Complex64 {
    let w = op.angular_frequency();
    Complex64::new(p.r, w * p.l2 - 1.0 / (w * op.c))
}

/// Cell impedance: `jωL1` in parallel with the series branch.
///
/// Returns [`CircuitError::DegenerateCircuit`] when the parallel-combination
/// denominator `jωL1 + Zb` falls below [`DEGENERACY_FLOOR_OHMS`], which only
/// the exactly lossless parallel resonance reaches.
pub fn unit_cell_impedance(
    p: &UnitCellParams,
    op: &OperatingPoint,
) -> Result<Complex64, CircuitError> {
    let w = op.angular_frequency();
    let branch = series_branch_impedance(p, op);
    let top = Complex64::new(0.0, w * p.l1);
    let den = top + branch;
    let magnitude = den.norm();
    if magnitude < DEGENERACY_FLOOR_OHMS {
        return Err(CircuitError::DegenerateCircuit {
            magnitude,
            floor: DEGENERACY_FLOOR_OHMS,
        });
    }
    Ok(top * branch / den)
}

/// Reflection coefficient `Γ = (Z − Z0)/(Z + Z0)` of the cell.
pub fn reflection_coefficient(
    p: &UnitCellParams,
    op: &OperatingPoint,
) -> Result<Complex64, CircuitError> {
    let z = unit_cell_impedance(p, op)?;
    Ok(reflection_from_impedance(z, p.z0))
}

/// Mismatch map `(z − z0)/(z + z0)` for an arbitrary impedance.
///
/// Exposed so synthetic impedances (e.g. a matched load `z = z0`) can be
/// driven through the same formula the cell uses.
pub fn reflection_from_impedance(z: Complex64, z0: f64) -> Complex64 {
    (z - z0) / (z + z0)
}

/// Expanded numerator/denominator parts of `Γ`.
///
/// With `ω = 2πf`:
///
/// ```text
/// num_re = −ω²L1L2 + L1/C − RZ0        num_im = ωRL1 − (Z0ωL1 + Z0ωL2 − Z0/(ωC))
/// den_re = −ω²L1L2 + L1/C + RZ0        den_im = ωRL1 + (Z0ωL1 + Z0ωL2 − Z0/(ωC))
/// ```
///
/// The shared sub-expressions are computed once so that the defining
/// identities hold at floating precision, and so that `r = 0` makes
/// `num_re == den_re` and `num_im == −den_im` bit-exactly.
pub fn phase_coefficients(p: &UnitCellParams, op: &OperatingPoint) -> PhaseCoefficients {
    let w = op.angular_frequency();
    let resonant = -w * w * p.l1 * p.l2 + p.l1 / op.c;
    let loss_re = p.r * p.z0;
    let loss_im = w * p.r * p.l1;
    let reactive = p.z0 * w * p.l1 + p.z0 * w * p.l2 - p.z0 / (w * op.c);
    PhaseCoefficients {
        num_re: resonant - loss_re,
        num_im: loss_im - reactive,
        den_re: resonant + loss_re,
        den_im: loss_im + reactive,
    }
}

/// Closed-form phase shift `θ` of the reflected wave, radians in `(−π, π]`.
///
/// `Γ = N/D` has argument `arg(N·conj(D))`, so `θ` is the quadrant-aware
/// angle of `(num·den_re products)`; a plain arctangent of the ratio would
/// be ambiguous by π. Returns [`CircuitError::UndefinedPhase`] for an
/// exactly matched load (`Γ = 0`).
pub fn phase_shift(p: &UnitCellParams, op: &OperatingPoint) -> Result<f64, CircuitError> {
    let k = phase_coefficients(p, op);
    phase_from_coefficients(&k)
}

/// Phase read off already-computed coefficients.
pub fn phase_from_coefficients(k: &PhaseCoefficients) -> Result<f64, CircuitError> {
    let re = k.num_re * k.den_re + k.num_im * k.den_im;
    let im = k.num_im * k.den_re - k.num_re * k.den_im;
    if re == 0.0 && im == 0.0 {
        return Err(CircuitError::UndefinedPhase);
    }
    Ok(normalize_phase(im.atan2(re)))
}

/// Closed-form reflection amplitude `𝓡 = sqrt((num²)/(den²))`, dimensionless.
///
/// In `[0, 1]` whenever `r ≥ 0`; exactly 1 for a lossless cell.
pub fn reflection_amplitude(p: &UnitCellParams, op: &OperatingPoint) -> Result<f64, CircuitError> {
    let k = phase_coefficients(p, op);
    amplitude_from_coefficients(&k)
}

/// Amplitude read off already-computed coefficients.
pub fn amplitude_from_coefficients(k: &PhaseCoefficients) -> Result<f64, CircuitError> {
    let den_sq = k.den_re * k.den_re + k.den_im * k.den_im;
    if den_sq < 1e-300 {
        return Err(CircuitError::DegenerateCircuit {
            magnitude: den_sq.sqrt(),
            floor: 1e-150,
        });
    }
    let num_sq = k.num_re * k.num_re + k.num_im * k.num_im;
    Ok((num_sq / den_sq).sqrt())
}

/// Both closed forms at once, with the physical degeneracy check of the
/// impedance route: exactly on the lossless parallel resonance the cell
/// impedance has a pole and no reflection state is reported.
pub fn reflection_state(
    p: &UnitCellParams,
    op: &OperatingPoint,
) -> Result<ReflectionState, CircuitError> {
    let w = op.angular_frequency();
    let denominator = Complex64::new(p.r, w * (p.l1 + p.l2) - 1.0 / (w * op.c));
    let magnitude = denominator.norm();
    if magnitude < DEGENERACY_FLOOR_OHMS {
        return Err(CircuitError::DegenerateCircuit {
            magnitude,
            floor: DEGENERACY_FLOOR_OHMS,
        });
    }
    let k = phase_coefficients(p, op);
    Ok(ReflectionState {
        magnitude: amplitude_from_coefficients(&k)?,
        phase: phase_from_coefficients(&k)?,
    })
}

/// Map an angle to the canonical branch `(−π, π]`, sending `−π` to `+π`.
pub fn normalize_phase(theta: f64) -> f64 {
    let mut t = theta;
    if t.abs() > PI {
        t = t.rem_euclid(2.0 * PI);
        if t > PI {
            t -= 2.0 * PI;
        }
    }
    if t == -PI {
        PI
    } else {
        t
    }
}

/// Circular distance between two angles, `min(|Δ|, 2π − |Δ|)`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % (2.0 * PI);
    d.min(2.0 * PI - d)
}
