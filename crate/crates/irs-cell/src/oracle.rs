//! Independent ground truth for the closed forms.
//!
//! [`gamma_direct`] rebuilds the reflection coefficient purely by complex
//! series/parallel composition — impedances in, `(Z − Z0)/(Z + Z0)` out —
//! and never touches the expanded coefficient bundles the closed forms are
//! made of. [`equivalence_sweep`] drives both routes over seeded random
//! parameter draws and reports the worst disagreement; [`grid_invert`] is
//! the brute-force counterpart of the closed-form capacitance solvers.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{self, phase_distance, OperatingPoint, UnitCellParams, DEGENERACY_FLOOR_OHMS};
use crate::error::{CircuitError, OracleError};
use crate::inverse::TargetKind;

// ─── Direct evaluation ──────────────────────────────────────────────────────

/// Mismatch map evaluated with general complex arithmetic.
pub fn gamma_from_impedance(z: Complex64, z0: f64) -> Complex64 {
    (z - z0) / (z + z0)
}

/// Reflection coefficient by direct complex composition.
///
/// Builds the series branch, combines it in parallel with the top
/// inductance, and applies the mismatch map. Shares no code with the
/// expanded coefficient formulas it is used to validate.
pub fn gamma_direct(p: &UnitCellParams, op: &OperatingPoint) -> Result<Complex64, CircuitError> {
    let w = op.angular_frequency();
    let branch = Complex64::new(p.r, w * p.l2) + Complex64::new(0.0, -1.0 / (w * op.c));
    let top = Complex64::new(0.0, w * p.l1);
    let den = top + branch;
    let magnitude = den.norm();
    if magnitude < DEGENERACY_FLOOR_OHMS {
        return Err(CircuitError::DegenerateCircuit {
            magnitude,
            floor: DEGENERACY_FLOOR_OHMS,
        });
    }
    Ok(gamma_from_impedance(top * branch / den, p.z0))
}

// ─── Equivalence sweep ──────────────────────────────────────────────────────

/// Inclusive sampling interval.
pub type Interval = (f64, f64);

/// Parameter ranges for random sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRanges {
    pub l1: Interval,
    pub l2: Interval,
    pub r: Interval,
    pub c: Interval,
    pub f: Interval,
}

impl SweepRanges {
    pub fn validate(&self) -> Result<(), OracleError> {
        let checks: [(&'static str, Interval, f64); 5] = [
            ("l1", self.l1, f64::MIN_POSITIVE),
            ("l2", self.l2, 0.0),
            ("r", self.r, 0.0),
            ("c", self.c, f64::MIN_POSITIVE),
            ("f", self.f, f64::MIN_POSITIVE),
        ];
        for (name, (lo, hi), min_lo) in checks {
            if !(lo.is_finite() && hi.is_finite() && lo >= min_lo && lo <= hi) {
                return Err(OracleError::InvalidRange { name, lo, hi });
            }
        }
        Ok(())
    }
}

impl Default for SweepRanges {
    /// The practical cell ranges: L1 2.3–2.5 nH, L2 0.4–0.56 nH, R 2–4 Ω,
    /// C 0.47–2.35 pF, f 1–3 GHz.
    fn default() -> Self {
        Self {
            l1: (2.3e-9, 2.5e-9),
            l2: (0.4e-9, 0.56e-9),
            r: (2.0, 4.0),
            c: (0.47e-12, 2.35e-12),
            f: (1e9, 3e9),
        }
    }
}

/// Worst-case disagreement allowed before a point is recorded as a failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceTolerances {
    /// Phase disagreement, radians (circular distance).
    pub phase: f64,
    /// Magnitude disagreement: relative above [`Self::magnitude_abs_floor`],
    /// absolute below it.
    pub magnitude: f64,
    /// |Γ| under which the magnitude comparison switches to absolute error.
    pub magnitude_abs_floor: f64,
}

impl Default for EquivalenceTolerances {
    fn default() -> Self {
        Self {
            phase: 1e-9,
            magnitude: 1e-9,
            magnitude_abs_floor: 1e-6,
        }
    }
}

/// Which closed form disagreed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailedQuantity {
    Phase,
    Magnitude,
}

/// One point where a closed form exceeded its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceFailure {
    pub params: UnitCellParams,
    pub op: OperatingPoint,
    pub quantity: FailedQuantity,
    pub closed_form: f64,
    pub oracle: f64,
    pub error: f64,
}

/// Aggregated result of an equivalence sweep.
///
/// `failures` is nonempty exactly when some error exceeded its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub points_checked: usize,
    pub max_phase_error: f64,
    pub max_magnitude_error: f64,
    pub failures: Vec<EquivalenceFailure>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Log-uniform sampling kicks in when a range spans more than one decade,
/// so resonance-dense wide bands are covered evenly per octave.
fn sample_interval<R: Rng>(rng: &mut R, (lo, hi): Interval, log_wide: bool) -> f64 {
    if lo == hi {
        return lo;
    }
    if log_wide && lo > 0.0 && hi / lo > 10.0 {
        let u = rng.random_range(lo.ln()..=hi.ln());
        u.exp().clamp(lo, hi)
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Draw one random parameter set and operating point.
pub fn sample_point<R: Rng>(rng: &mut R, ranges: &SweepRanges) -> (UnitCellParams, OperatingPoint) {
    let params = UnitCellParams {
        l1: sample_interval(rng, ranges.l1, false),
        l2: sample_interval(rng, ranges.l2, false),
        r: sample_interval(rng, ranges.r, false),
        z0: circuit::FREE_SPACE_IMPEDANCE,
    };
    let c = sample_interval(rng, ranges.c, false);
    let f = sample_interval(rng, ranges.f, true);
    (params, OperatingPoint { c, f })
}

/// Compare the closed-form phase and amplitude against [`gamma_direct`] on
/// `n` seeded random points. Deterministic for a given seed.
pub fn equivalence_sweep(
    n: usize,
    ranges: &SweepRanges,
    seed: u64,
    tolerances: &EquivalenceTolerances,
) -> Result<OracleReport, OracleError> {
    if n < 1 {
        return Err(OracleError::InvalidCount {
            requested: n,
            minimum: 1,
        });
    }
    ranges.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        points_checked: 0,
        max_phase_error: 0.0,
        max_magnitude_error: 0.0,
        failures: Vec::new(),
    };

    for _ in 0..n {
        let (params, op) = sample_point(&mut rng, ranges);
        let gamma = match gamma_direct(&params, &op) {
            Ok(g) => g,
            Err(_) => continue, // lossless resonance pole: no ground truth exists there
        };
        let oracle_phase = gamma.im.atan2(gamma.re);
        let oracle_mag = gamma.norm();

        let closed_phase = match circuit::phase_shift(&params, &op) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let closed_mag = match circuit::reflection_amplitude(&params, &op) {
            Ok(m) => m,
            Err(_) => continue,
        };

        report.points_checked += 1;

        let phase_err = phase_distance(closed_phase, oracle_phase);
        if phase_err > report.max_phase_error {
            report.max_phase_error = phase_err;
        }
        if phase_err > tolerances.phase {
            report.failures.push(EquivalenceFailure {
                params,
                op,
                quantity: FailedQuantity::Phase,
                closed_form: closed_phase,
                oracle: oracle_phase,
                error: phase_err,
            });
        }

        let mag_err = if oracle_mag >= tolerances.magnitude_abs_floor {
            (closed_mag - oracle_mag).abs() / oracle_mag
        } else {
            (closed_mag - oracle_mag).abs()
        };
        if mag_err > report.max_magnitude_error {
            report.max_magnitude_error = mag_err;
        }
        if mag_err > tolerances.magnitude {
            report.failures.push(EquivalenceFailure {
                params,
                op,
                quantity: FailedQuantity::Magnitude,
                closed_form: closed_mag,
                oracle: oracle_mag,
                error: mag_err,
            });
        }
    }

    Ok(report)
}

// ─── Round-trip verification ────────────────────────────────────────────────

/// One round-trip inversion whose forward-verified residual exceeded the
/// tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundTripFailure {
    pub params: UnitCellParams,
    pub op: OperatingPoint,
    pub kind: TargetKind,
    pub target: f64,
    pub residual: f64,
}

/// Aggregated result of a round-trip inversion sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub inversions_checked: usize,
    pub max_phase_residual: f64,
    pub max_amplitude_residual: f64,
    pub failures: Vec<RoundTripFailure>,
}

impl RoundTripReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Draw `n` random in-range operating points, take their forward phase and
/// amplitude as targets, invert both closed forms, and verify the achieved
/// values. Ground truth by construction: every target is on-curve, so each
/// residual must stay below `tolerance`.
pub fn round_trip_sweep(
    n: usize,
    ranges: &SweepRanges,
    window: &crate::inverse::CapacitanceWindow,
    seed: u64,
    tolerance: f64,
) -> Result<RoundTripReport, OracleError> {
    if n < 1 {
        return Err(OracleError::InvalidCount {
            requested: n,
            minimum: 1,
        });
    }
    ranges.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = RoundTripReport {
        inversions_checked: 0,
        max_phase_residual: 0.0,
        max_amplitude_residual: 0.0,
        failures: Vec::new(),
    };

    for _ in 0..n {
        let (params, op) = sample_point(&mut rng, ranges);
        let (theta, rho) = match (
            circuit::phase_shift(&params, &op),
            circuit::reflection_amplitude(&params, &op),
        ) {
            (Ok(t), Ok(m)) => (t, m),
            _ => continue,
        };
        report.inversions_checked += 1;

        let phase_residual = crate::inverse::PhaseTarget::new(theta, params, op.f)
            .and_then(|t| {
                crate::inverse::capacitance_from_phase(
                    &t,
                    window,
                    crate::inverse::WindowPolicy::Advisory,
                )
            })
            .map(|sol| sol.residual)
            .unwrap_or(f64::INFINITY);
        report.max_phase_residual = report.max_phase_residual.max(phase_residual);
        if phase_residual > tolerance {
            report.failures.push(RoundTripFailure {
                params,
                op,
                kind: TargetKind::Phase,
                target: theta,
                residual: phase_residual,
            });
        }

        let amplitude_residual = crate::inverse::AmplitudeTarget::new(rho.min(1.0), params, op.f)
            .and_then(|t| {
                crate::inverse::capacitance_from_amplitude(
                    &t,
                    window,
                    crate::inverse::WindowPolicy::Advisory,
                )
            })
            .map(|sol| sol.residual)
            .unwrap_or(f64::INFINITY);
        report.max_amplitude_residual = report.max_amplitude_residual.max(amplitude_residual);
        if amplitude_residual > tolerance {
            report.failures.push(RoundTripFailure {
                params,
                op,
                kind: TargetKind::Amplitude,
                target: rho,
                residual: amplitude_residual,
            });
        }
    }

    Ok(report)
}

// ─── Brute-force inversion ──────────────────────────────────────────────────

/// Exhaustive counterpart of the closed-form capacitance solvers: evaluate
/// the direct model on a uniform `points`-point grid over `[c_min, c_max]`
/// and return the grid point whose output is closest to `target` (circular
/// distance for phase targets).
///
/// Panics if `points < 2` (contract violation, not a runtime error).
pub fn grid_invert(
    kind: TargetKind,
    target: f64,
    params: &UnitCellParams,
    c_min: f64,
    c_max: f64,
    points: usize,
    f: f64,
) -> f64 {
    assert!(points >= 2, "grid_invert needs at least two grid points");
    assert!(c_min > 0.0 && c_min < c_max, "invalid capacitance range");

    let span = c_max - c_min;
    let mut best_c = c_min;
    let mut best_dist = f64::INFINITY;
    for i in 0..points {
        let c = c_min + span * i as f64 / (points - 1) as f64;
        let op = OperatingPoint { c, f };
        let gamma = match gamma_direct(params, &op) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let dist = match kind {
            TargetKind::Phase => phase_distance(gamma.im.atan2(gamma.re), target),
            TargetKind::Amplitude => (gamma.norm() - target).abs(),
        };
        if dist < best_dist {
            best_dist = dist;
            best_c = c;
        }
    }
    best_c
}
