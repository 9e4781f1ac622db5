//! Inverse design: the capacitance that realizes a requested reflection.
//!
//! Both closed forms of the forward model are ratios of quadratics in the
//! capacitance once the common `1/C²` is cleared:
//!
//! ```text
//! tan θ = N(C)/D(C)       N = α·C² + β·C + γ,   D = ψ·C² + δ·C + μ
//! 𝓡²    = P(C)/Q(C)       P = χ·C² + σ·C + ϕ,   Q = λ·C² + Δ·C + ζ
//! ```
//!
//! so a phase target θ reduces to `N − tanθ·D = 0` and an amplitude target
//! `𝓡` to `P − 𝓡²·Q = 0`, each an ordinary real quadratic in `C`. Two traps
//! are handled explicitly:
//!
//! * `tan θ` is singular at ±π/2. Near it the solver multiplies through by
//!   `cos θ` and solves `cosθ·N − sinθ·D = 0`, which has the same roots and
//!   no pole.
//! * `tan` cannot tell θ from θ − π, so every root is pushed back through
//!   the forward model and the reported residual is the circular distance
//!   actually achieved. Both quadratic roots are always examined; the
//!   selected capacitance is the one with the smallest verified residual,
//!   ties broken toward the window interior and then toward the smaller
//!   capacitance.

use serde::{Deserialize, Serialize};

use crate::circuit::{self, phase_distance, OperatingPoint, ReflectionState, UnitCellParams};
use crate::error::InverseError;
use crate::quadratic::{self, QuadraticRoots};

use std::f64::consts::PI;

/// Physically admissible capacitance interval for root selection, farads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitanceWindow {
    pub min: f64,
    pub max: f64,
}

impl CapacitanceWindow {
    pub fn new(min: f64, max: f64) -> Result<Self, InverseError> {
        if !(min.is_finite() && max.is_finite() && 0.0 < min && min < max) {
            return Err(InverseError::InvalidTarget(format!(
                "capacitance window [{min:e}, {max:e}] must satisfy 0 < min < max"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, c: f64) -> bool {
        self.min <= c && c <= self.max
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }
}

impl Default for CapacitanceWindow {
    /// The practical surface-mount varactor range, 0.47–2.35 pF.
    fn default() -> Self {
        Self {
            min: 0.47e-12,
            max: 2.35e-12,
        }
    }
}

/// Whether roots outside the window disqualify a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowPolicy {
    /// Out-of-window roots are reported with `in_range = false`.
    Advisory,
    /// Out-of-window roots are rejected; no in-window root is an error.
    Required,
}

/// A requested phase shift at fixed circuit parameters and frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTarget {
    /// Desired phase, radians in `(−π, π]`.
    pub theta: f64,
    pub params: UnitCellParams,
    /// Incident frequency, hertz.
    pub f: f64,
}

impl PhaseTarget {
    pub fn new(theta: f64, params: UnitCellParams, f: f64) -> Result<Self, InverseError> {
        params.validate()?;
        if !(theta.is_finite() && -PI < theta && theta <= PI) {
            return Err(InverseError::InvalidTarget(format!(
                "theta = {theta} rad is outside (-pi, pi]"
            )));
        }
        if !(f.is_finite() && f > 0.0) {
            return Err(InverseError::InvalidTarget(format!(
                "f = {f} violates f > 0"
            )));
        }
        Ok(Self { theta, params, f })
    }
}

/// A requested reflection amplitude at fixed circuit parameters and
/// frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTarget {
    /// Desired reflection amplitude, dimensionless in `[0, 1]`.
    pub rho: f64,
    pub params: UnitCellParams,
    /// Incident frequency, hertz.
    pub f: f64,
}

impl AmplitudeTarget {
    pub fn new(rho: f64, params: UnitCellParams, f: f64) -> Result<Self, InverseError> {
        params.validate()?;
        if !(rho.is_finite() && (0.0..=1.0).contains(&rho)) {
            return Err(InverseError::InvalidTarget(format!(
                "rho = {rho} is outside [0, 1]"
            )));
        }
        if !(f.is_finite() && f > 0.0) {
            return Err(InverseError::InvalidTarget(format!(
                "f = {f} violates f > 0"
            )));
        }
        Ok(Self { rho, params, f })
    }
}

/// Which closed form an inversion quadratic came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetKind {
    Phase,
    Amplitude,
}

/// The quadratic `qa·C² + qb·C + qc = 0` for one inversion target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticProblem {
    pub qa: f64,
    pub qb: f64,
    pub qc: f64,
    pub kind: TargetKind,
    /// The requested θ (radians) or 𝓡 (dimensionless).
    pub target: f64,
    pub params: UnitCellParams,
    pub f: f64,
}

impl QuadraticProblem {
    /// Quadratic residual at `c`, normalized by the largest term.
    pub fn scaled_residual(&self, c: f64) -> f64 {
        quadratic::scaled_residual(self.qa, self.qb, self.qc, c)
    }
}

/// One solved inversion: all real positive roots, the forward-verified
/// selection, and the honestly achieved reflection state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution {
    /// Selected capacitance, farads.
    pub c_selected: f64,
    /// Every real, finite, positive root of the quadratic, ascending.
    pub c_candidates: Vec<f64>,
    /// |achieved − target| at `c_selected`: radians on the circle for phase
    /// targets, dimensionless for amplitude targets. Large residuals mean
    /// no capacitance realizes the request and the nearest tangent-matched
    /// root was reported instead.
    pub residual: f64,
    /// Forward model output at `c_selected`.
    pub achieved: ReflectionState,
    /// Whether `c_selected` lies inside the window.
    pub in_range: bool,
}

// ─── Coefficient bundles ────────────────────────────────────────────────────

/// Quadratic-over-quadratic form of one closed-form expression, as
/// coefficient triples `[c², c¹, c⁰]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalQuadratic {
    pub num: [f64; 3],
    pub den: [f64; 3],
}

/// `tan θ` as `N(C)/D(C)`.
///
/// The constants below are the capacitance-independent parts of the
/// expanded `Γ` numerator and denominator (see
/// [`circuit::phase_coefficients`]); clearing `1/C²` from
/// `Im(num·conj(den)) / Re(num·conj(den))` gives the two quadratics.
pub fn phase_rational(params: &UnitCellParams, f: f64) -> RationalQuadratic {
    let w = 2.0 * PI * f;
    let l1 = params.l1;
    let zw = params.z0 / w;

    let num_re0 = -w * w * params.l1 * params.l2 - params.r * params.z0;
    let den_re0 = -w * w * params.l1 * params.l2 + params.r * params.z0;
    let num_im0 = w * params.r * params.l1 - params.z0 * w * (params.l1 + params.l2);
    let den_im0 = w * params.r * params.l1 + params.z0 * w * (params.l1 + params.l2);

    // Im(num·conj(den)) · C² = α·C² + β·C + γ
    let alpha = num_im0 * den_re0 - num_re0 * den_im0;
    let beta = num_im0 * l1 + (den_re0 + num_re0) * zw - den_im0 * l1;
    let gamma = 2.0 * l1 * zw;
    // Re(num·conj(den)) · C² = ψ·C² + δ·C + μ
    let psi = num_re0 * den_re0 + num_im0 * den_im0;
    let delta = (num_re0 + den_re0) * l1 + (den_im0 - num_im0) * zw;
    let mu = l1 * l1 - zw * zw;

    RationalQuadratic {
        num: [alpha, beta, gamma],
        den: [psi, delta, mu],
    }
}

/// `𝓡²` as `P(C)/Q(C)`.
///
/// `|num|²` and `|den|²` of the expanded `Γ` share the same `1/C²`
/// coefficient, so `P` and `Q` have identical constant terms; their linear
/// terms also coincide (the loss terms cancel), which makes the lossless
/// full-reflection target degenerate to `0 = 0`.
pub fn amplitude_rational(params: &UnitCellParams, f: f64) -> RationalQuadratic {
    let w = 2.0 * PI * f;
    let l1 = params.l1;
    let zw = params.z0 / w;

    let num_re0 = -w * w * params.l1 * params.l2 - params.r * params.z0;
    let den_re0 = -w * w * params.l1 * params.l2 + params.r * params.z0;
    let num_im0 = w * params.r * params.l1 - params.z0 * w * (params.l1 + params.l2);
    let den_im0 = w * params.r * params.l1 + params.z0 * w * (params.l1 + params.l2);

    let chi = num_re0 * num_re0 + num_im0 * num_im0;
    let sigma = 2.0 * (num_re0 * l1 + num_im0 * zw);
    let phi = l1 * l1 + zw * zw;
    let lambda = den_re0 * den_re0 + den_im0 * den_im0;
    let big_delta = 2.0 * (den_re0 * l1 - den_im0 * zw);
    let zeta = l1 * l1 + zw * zw;

    RationalQuadratic {
        num: [chi, sigma, phi],
        den: [lambda, big_delta, zeta],
    }
}

/// Below this |cos θ| the tangent form is abandoned for the sine/cosine
/// form, which has the same root set and no pole.
const TAN_SINGULARITY_COS_FLOOR: f64 = 1e-6;

// ─── Operations ─────────────────────────────────────────────────────────────

/// Build the inversion quadratic for a phase target.
pub fn phase_quadratic(t: &PhaseTarget) -> QuadraticProblem {
    let rq = phase_rational(&t.params, t.f);
    let (cos_t, sin_t) = (t.theta.cos(), t.theta.sin());
    let [qa, qb, qc] = if cos_t.abs() < TAN_SINGULARITY_COS_FLOOR {
        [
            rq.num[0] * cos_t - rq.den[0] * sin_t,
            rq.num[1] * cos_t - rq.den[1] * sin_t,
            rq.num[2] * cos_t - rq.den[2] * sin_t,
        ]
    } else {
        let tan_t = sin_t / cos_t;
        [
            rq.num[0] - rq.den[0] * tan_t,
            rq.num[1] - rq.den[1] * tan_t,
            rq.num[2] - rq.den[2] * tan_t,
        ]
    };
    QuadraticProblem {
        qa,
        qb,
        qc,
        kind: TargetKind::Phase,
        target: t.theta,
        params: t.params,
        f: t.f,
    }
}

/// Build the inversion quadratic for an amplitude target.
pub fn amplitude_quadratic(t: &AmplitudeTarget) -> QuadraticProblem {
    let rq = amplitude_rational(&t.params, t.f);
    let rho_sq = t.rho * t.rho;
    QuadraticProblem {
        qa: rq.num[0] - rq.den[0] * rho_sq,
        qb: rq.num[1] - rq.den[1] * rho_sq,
        qc: rq.num[2] - rq.den[2] * rho_sq,
        kind: TargetKind::Amplitude,
        target: t.rho,
        params: t.params,
        f: t.f,
    }
}

/// All real, finite, positive roots of an inversion quadratic, ascending.
pub fn positive_roots(problem: &QuadraticProblem) -> Result<Vec<f64>, InverseError> {
    let roots = quadratic::solve_quadratic(problem.qa, problem.qb, problem.qc);
    let discriminant = match &roots {
        QuadraticRoots::None { discriminant } => *discriminant,
        QuadraticRoots::AllValues => return Err(InverseError::AllCapacitancesValid),
        _ => problem
            .qb
            .mul_add(problem.qb, -4.0 * problem.qa * problem.qc),
    };
    let mut candidates: Vec<f64> = roots
        .to_vec()
        .into_iter()
        .filter(|c| c.is_finite() && *c > 0.0)
        .collect();
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if candidates.is_empty() {
        return Err(InverseError::InfeasibleTarget { discriminant });
    }
    Ok(candidates)
}

/// Achieved-vs-target distance for a candidate capacitance.
fn forward_residual(problem: &QuadraticProblem, state: &ReflectionState) -> f64 {
    match problem.kind {
        TargetKind::Phase => phase_distance(state.phase, problem.target),
        TargetKind::Amplitude => (state.magnitude - problem.target).abs(),
    }
}

/// Residuals closer than this count as a tie and fall through to the
/// window-interior / smaller-capacitance preference.
const RESIDUAL_TIE_TOLERANCE: f64 = 1e-12;

fn select_candidate(
    problem: &QuadraticProblem,
    window: &CapacitanceWindow,
    policy: WindowPolicy,
) -> Result<DesignSolution, InverseError> {
    let candidates = positive_roots(problem)?;

    let mut verified: Vec<(f64, f64, ReflectionState)> = Vec::with_capacity(candidates.len());
    for &c in &candidates {
        if policy == WindowPolicy::Required && !window.contains(c) {
            continue;
        }
        let op = OperatingPoint::new(c, problem.f).map_err(InverseError::Circuit)?;
        match circuit::reflection_state(&problem.params, &op) {
            Ok(state) => verified.push((c, forward_residual(problem, &state), state)),
            Err(_) => continue, // degenerate candidate; the other root may still verify
        }
    }
    if verified.is_empty() {
        return Err(InverseError::NoRootInRange { candidates });
    }

    let mut best = &verified[0];
    for entry in &verified[1..] {
        let better = entry.1 < best.1 - RESIDUAL_TIE_TOLERANCE;
        let tie = (entry.1 - best.1).abs() <= RESIDUAL_TIE_TOLERANCE;
        let prefer_on_tie = (window.contains(entry.0) && !window.contains(best.0))
            || (window.contains(entry.0) == window.contains(best.0) && entry.0 < best.0);
        if better || (tie && prefer_on_tie) {
            best = entry;
        }
    }

    Ok(DesignSolution {
        c_selected: best.0,
        c_candidates: candidates,
        residual: best.1,
        achieved: best.2,
        in_range: window.contains(best.0),
    })
}

/// Capacitance realizing a phase target.
///
/// Residuals are circular distances; a residual near π means the target
/// phase is not on the achievable arc and the returned capacitance is the
/// tangent-matched root (the achieved phase differs from the request by
/// half a turn).
pub fn capacitance_from_phase(
    t: &PhaseTarget,
    window: &CapacitanceWindow,
    policy: WindowPolicy,
) -> Result<DesignSolution, InverseError> {
    select_candidate(&phase_quadratic(t), window, policy)
}

/// Capacitance realizing an amplitude target.
pub fn capacitance_from_amplitude(
    t: &AmplitudeTarget,
    window: &CapacitanceWindow,
    policy: WindowPolicy,
) -> Result<DesignSolution, InverseError> {
    select_candidate(&amplitude_quadratic(t), window, policy)
}

// ─── Design table ───────────────────────────────────────────────────────────

/// One requested design row: desired phase, desired amplitude, frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignRequest {
    /// Desired phase, radians.
    pub theta: f64,
    /// Desired amplitude, dimensionless.
    pub rho: f64,
    /// Frequency, hertz.
    pub f: f64,
}

/// One solved design row. A single capacitance cannot in general satisfy a
/// joint (θ, 𝓡) request, so the phase solution `c_theta` is the headline
/// value and `discrepancy` reports how far the amplitude achieved there is
/// from the requested one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignTableRow {
    pub request: DesignRequest,
    /// Capacitance realizing the requested phase, farads.
    pub c_theta: Option<f64>,
    /// Capacitance realizing the requested amplitude, farads.
    pub c_rho: Option<f64>,
    /// Forward model output at `c_theta`.
    pub achieved: Option<ReflectionState>,
    /// `|𝓡(c_theta) − rho|`, never hidden.
    pub discrepancy: Option<f64>,
    /// Row-level failures; other rows are unaffected.
    pub error: Option<String>,
}

/// Solve every row independently; failures stay in their row.
pub fn design_table(
    rows: &[DesignRequest],
    params: &UnitCellParams,
    window: &CapacitanceWindow,
) -> Vec<DesignTableRow> {
    rows.iter()
        .map(|req| {
            let mut row = DesignTableRow {
                request: *req,
                c_theta: None,
                c_rho: None,
                achieved: None,
                discrepancy: None,
                error: None,
            };
            let mut errors: Vec<String> = Vec::new();

            match PhaseTarget::new(req.theta, *params, req.f)
                .and_then(|t| capacitance_from_phase(&t, window, WindowPolicy::Advisory))
            {
                Ok(sol) => {
                    row.c_theta = Some(sol.c_selected);
                    row.achieved = Some(sol.achieved);
                    row.discrepancy = Some((sol.achieved.magnitude - req.rho).abs());
                }
                Err(e) => errors.push(format!("phase: {e}")),
            }
            match AmplitudeTarget::new(req.rho, *params, req.f)
                .and_then(|t| capacitance_from_amplitude(&t, window, WindowPolicy::Advisory))
            {
                Ok(sol) => row.c_rho = Some(sol.c_selected),
                Err(e) => errors.push(format!("amplitude: {e}")),
            }

            if !errors.is_empty() {
                row.error = Some(errors.join("; "));
            }
            row
        })
        .collect()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // expected values frozen at 17 digits
mod tests {
    use super::*;
    use crate::circuit::{phase_shift, reflection_amplitude};

    const NH: f64 = 1e-9;
    const PF: f64 = 1e-12;
    const GHZ: f64 = 1e9;

    fn params(l1: f64, l2: f64, r: f64) -> UnitCellParams {
        UnitCellParams::in_free_space(l1 * NH, l2 * NH, r).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(a.abs()).max(1e-300)
    }

    #[test]
    fn target_domains_are_enforced() {
        let p = params(2.5, 0.4, 4.0);
        assert!(PhaseTarget::new(4.0, p, 2.4 * GHZ).is_err());
        assert!(PhaseTarget::new(-PI, p, 2.4 * GHZ).is_err());
        assert!(PhaseTarget::new(PI, p, 2.4 * GHZ).is_ok());
        assert!(AmplitudeTarget::new(1.5, p, 2.4 * GHZ).is_err());
        assert!(AmplitudeTarget::new(-0.1, p, 2.4 * GHZ).is_err());
        assert!(AmplitudeTarget::new(0.0, p, 2.4 * GHZ).is_ok());
        assert!(AmplitudeTarget::new(1.0, p, 2.4 * GHZ).is_ok());
        assert!(CapacitanceWindow::new(2e-12, 1e-12).is_err());
    }

    #[test]
    fn zero_phase_target_uses_bare_bundles() {
        let t = PhaseTarget::new(0.0, params(2.5, 0.4, 4.0), 2.4 * GHZ).unwrap();
        let rq = phase_rational(&t.params, t.f);
        let q = phase_quadratic(&t);
        assert_eq!(q.qa, rq.num[0]);
        assert_eq!(q.qb, rq.num[1]);
        assert_eq!(q.qc, rq.num[2]);
    }

    #[test]
    fn phase_bundles_match_independent_evaluation() {
        // Frozen from a direct evaluation of the bundle definitions,
        // computed ahead of this implementation.
        let rq = phase_rational(&params(2.5, 0.4, 4.0), 2.4 * GHZ);
        assert!(rel_close(rq.num[0], 7.952_754_398_237_459_36e6, 1e-12));
        assert!(rel_close(rq.num[1], -9.380_293_008_794_549_78e-5, 1e-12));
        assert!(rel_close(rq.num[2], 1.250_029_448_867_594_58e-16, 1e-12));
        assert!(rel_close(rq.den[0], -2.740_067_903_585_559_13e8, 1e-12));
        assert!(rel_close(rq.den[1], 8.232_112_215_729_946_69e-4, 1e-12));
        assert!(rel_close(rq.den[2], -6.187_794_492_144_891_59e-16, 1e-12));
    }

    #[test]
    fn phase_quadratic_matches_independent_evaluation() {
        let t = PhaseTarget::new(0.5, params(2.5, 0.4, 4.0), 2.4 * GHZ).unwrap();
        let q = phase_quadratic(&t);
        assert!(rel_close(q.qa, 1.576_433_462_052_221_00e8, 1e-12));
        assert!(rel_close(q.qb, -5.435_252_701_006_207_95e-4, 1e-12));
        assert!(rel_close(q.qc, 4.630_436_986_568_042_20e-16, 1e-12));
    }

    #[test]
    fn amplitude_bundles_match_independent_evaluation() {
        let rq = amplitude_rational(&params(2.5, 0.4, 4.0), 2.4 * GHZ);
        assert!(rel_close(rq.num[0], 2.698_692_784_213_035_11e8, 1e-12));
        assert!(rel_close(rq.num[1], -8.254_851_784_270_056_35e-4, 1e-12));
        assert!(rel_close(rq.num[2], 6.312_794_492_144_890_67e-16, 1e-12));
        assert!(rel_close(rq.den[0], 2.784_420_957_609_248_76e8, 1e-12));
        assert!(rel_close(rq.den[1], -8.254_851_784_270_056_35e-4, 1e-12));
        assert!(rel_close(rq.den[2], 6.312_794_492_144_890_67e-16, 1e-12));

        let t = AmplitudeTarget::new(0.5, params(2.5, 0.4, 4.0), 2.4 * GHZ).unwrap();
        let q = amplitude_quadratic(&t);
        assert!(rel_close(q.qa, 2.002_587_544_810_723_07e8, 1e-12));
        assert!(rel_close(q.qb, -6.191_138_838_202_541_99e-4, 1e-12));
        assert!(rel_close(q.qc, 4.734_595_869_108_668_25e-16, 1e-12));
    }

    #[test]
    fn amplitude_linear_and_constant_bundles_coincide() {
        // P and Q share their C¹ and C⁰ coefficients, so an amplitude
        // quadratic always carries a (1 − 𝓡²) factor on those terms.
        for (l1, l2, r, f) in [
            (2.3, 0.56, 2.0, 2.4),
            (2.5, 0.4, 4.0, 1.7),
            (2.4, 0.5, 3.0, 2.9),
        ] {
            let rq = amplitude_rational(&params(l1, l2, r), f * GHZ);
            assert!(rel_close(rq.num[1], rq.den[1], 1e-12));
            assert_eq!(rq.num[2], rq.den[2]);
        }
    }

    #[test]
    fn zero_amplitude_target_uses_bare_bundles() {
        let t = AmplitudeTarget::new(0.0, params(2.3, 0.4, 2.0), 2.4 * GHZ).unwrap();
        let rq = amplitude_rational(&t.params, t.f);
        let q = amplitude_quadratic(&t);
        assert_eq!(q.qa, rq.num[0]);
        assert_eq!(q.qb, rq.num[1]);
        assert_eq!(q.qc, rq.num[2]);
    }

    #[test]
    fn perfect_match_is_infeasible_when_the_dip_misses_zero() {
        // Grid scan first: the amplitude never reaches zero for these
        // parameters, so a 𝓡 = 0 target must be infeasible.
        let p = params(2.3, 0.56, 2.0);
        let mut min_rho = f64::INFINITY;
        for i in 0..=100_000 {
            let c = (0.1 + 9.9 * i as f64 / 100_000.0) * PF;
            let op = OperatingPoint::new(c, 2.4 * GHZ).unwrap();
            min_rho = min_rho.min(reflection_amplitude(&p, &op).unwrap());
        }
        assert!(min_rho > 0.01, "min rho = {min_rho}");

        let t = AmplitudeTarget::new(0.0, p, 2.4 * GHZ).unwrap();
        let err =
            capacitance_from_amplitude(&t, &CapacitanceWindow::default(), WindowPolicy::Advisory)
                .unwrap_err();
        assert!(matches!(err, InverseError::InfeasibleTarget { .. }));
    }

    #[test]
    fn lossless_full_reflection_accepts_every_capacitance() {
        let t = AmplitudeTarget::new(1.0, params(2.5, 0.4, 0.0), 2.4 * GHZ).unwrap();
        let err =
            capacitance_from_amplitude(&t, &CapacitanceWindow::default(), WindowPolicy::Advisory)
                .unwrap_err();
        assert_eq!(err, InverseError::AllCapacitancesValid);
    }

    #[test]
    fn lossy_full_reflection_is_infeasible() {
        let t = AmplitudeTarget::new(1.0, params(2.5, 0.4, 4.0), 2.4 * GHZ).unwrap();
        let err =
            capacitance_from_amplitude(&t, &CapacitanceWindow::default(), WindowPolicy::Advisory)
                .unwrap_err();
        assert!(matches!(err, InverseError::InfeasibleTarget { .. }));
    }

    #[test]
    fn phase_round_trip_recovers_target() {
        let p = params(2.4, 0.5, 3.0);
        let op = OperatingPoint::new(1.0 * PF, 2.4 * GHZ).unwrap();
        let theta_star = phase_shift(&p, &op).unwrap();
        let t = PhaseTarget::new(theta_star, p, 2.4 * GHZ).unwrap();
        let sol = capacitance_from_phase(&t, &CapacitanceWindow::default(), WindowPolicy::Advisory)
            .unwrap();
        assert!(sol.residual <= 1e-6, "residual = {:e}", sol.residual);
        // The original capacitance is among the candidates even if the
        // other root also achieves the target.
        assert!(
            sol.c_candidates
                .iter()
                .any(|c| rel_close(*c, 1.0 * PF, 1e-9)),
            "candidates {:?}",
            sol.c_candidates
        );
    }

    #[test]
    fn amplitude_round_trip_recovers_target() {
        let p = params(2.5, 0.4, 4.0);
        let op = OperatingPoint::new(0.8 * PF, 2.4 * GHZ).unwrap();
        let rho_star = reflection_amplitude(&p, &op).unwrap();
        let t = AmplitudeTarget::new(rho_star, p, 2.4 * GHZ).unwrap();
        let sol =
            capacitance_from_amplitude(&t, &CapacitanceWindow::default(), WindowPolicy::Advisory)
                .unwrap();
        assert!(sol.residual <= 1e-6, "residual = {:e}", sol.residual);
        assert!(sol
            .c_candidates
            .iter()
            .any(|c| rel_close(*c, 0.8 * PF, 1e-9)));
    }

    #[test]
    fn both_roots_are_reported_and_sound() {
        let t = AmplitudeTarget::new(0.5, params(2.5, 0.4, 4.0), 2.4 * GHZ).unwrap();
        let q = amplitude_quadratic(&t);
        let sol =
            capacitance_from_amplitude(&t, &CapacitanceWindow::default(), WindowPolicy::Advisory)
                .unwrap();
        assert_eq!(sol.c_candidates.len(), 2);
        assert!(sol.c_candidates[0] < sol.c_candidates[1]);
        for &c in &sol.c_candidates {
            assert!(c > 0.0);
            assert!(
                q.scaled_residual(c) <= 1e-6,
                "residual {:e}",
                q.scaled_residual(c)
            );
            let achieved =
                reflection_amplitude(&t.params, &OperatingPoint::new(c, t.f).unwrap()).unwrap();
            assert!((achieved - 0.5).abs() <= 1e-9);
        }
    }

    #[test]
    fn reference_phase_design_point_is_reproduced() {
        // Reference design: −80° maps to ≈ 1.48 pF for this cell. Both
        // roots are tangent-matched; the achieved phase sits on the far
        // branch (target + π), which the residual reports honestly.
        let t = PhaseTarget::new(-80.0_f64.to_radians(), params(2.5, 0.4, 4.0), 2.4 * GHZ).unwrap();
        let sol = capacitance_from_phase(&t, &CapacitanceWindow::default(), WindowPolicy::Advisory)
            .unwrap();
        assert!(
            (sol.c_selected - 1.48 * PF).abs() <= 0.2 * PF,
            "c = {:e}",
            sol.c_selected
        );
        assert!(sol.in_range);
        assert!(
            phase_distance(sol.achieved.phase, t.theta + PI) <= 1e-6,
            "achieved {}",
            sol.achieved.phase
        );
        assert!(sol.residual > 3.0, "residual should expose the branch miss");
    }

    #[test]
    fn unreachable_phase_arc_reports_honest_residual() {
        // 56° is not on the achievable arc for this cell; the solver
        // returns the tangent-matched roots (achieved phase 56° − 180°).
        let t = PhaseTarget::new(56.0_f64.to_radians(), params(2.5, 0.4, 4.0), 2.4 * GHZ).unwrap();
        let sol = capacitance_from_phase(&t, &CapacitanceWindow::default(), WindowPolicy::Advisory)
            .unwrap();
        assert_eq!(sol.c_candidates.len(), 2);
        assert!(sol.c_selected > 1.5 * PF && sol.c_selected < 1.7 * PF);
        assert!(phase_distance(sol.achieved.phase, t.theta - PI) <= 1e-6);
        assert!(sol.residual > 3.0);
    }

    #[test]
    fn reference_amplitude_design_point_is_reproduced() {
        // Reference design: the deep-dip amplitude maps to ≈ 1.5 pF.
        let t = AmplitudeTarget::new(0.04, params(2.5, 0.4, 4.0), 2.4 * GHZ).unwrap();
        let sol =
            capacitance_from_amplitude(&t, &CapacitanceWindow::default(), WindowPolicy::Advisory)
                .unwrap();
        assert!((sol.c_selected - 1.5 * PF).abs() <= 0.2 * PF);
        assert!(sol.residual <= 1e-9);
    }

    #[test]
    fn tangent_singularity_targets_bracket_the_half_turn() {
        // θ just below and just above +π/2; both must resolve through the
        // sine/cosine formulation with tiny forward-verified residuals,
        // and their achieved phases must bracket π/2.
        let p = params(2.3, 0.56, 2.0);
        let below = PhaseTarget::new(PI / 2.0 - 1e-9, p, 2.4 * GHZ).unwrap();
        let above = PhaseTarget::new(PI / 2.0 + 1e-9, p, 2.4 * GHZ).unwrap();
        let w = CapacitanceWindow::default();
        let s_below = capacitance_from_phase(&below, &w, WindowPolicy::Advisory).unwrap();
        let s_above = capacitance_from_phase(&above, &w, WindowPolicy::Advisory).unwrap();
        assert!(s_below.residual <= 1e-6);
        assert!(s_above.residual <= 1e-6);
        assert!(s_below.achieved.phase < PI / 2.0);
        assert!(s_above.achieved.phase > PI / 2.0);

        // Exactly ±π/2 also resolves.
        for theta in [PI / 2.0, -PI / 2.0] {
            let t = PhaseTarget::new(theta, p, 2.4 * GHZ).unwrap();
            let sol = capacitance_from_phase(&t, &w, WindowPolicy::Advisory).unwrap();
            assert!(
                sol.residual <= 1e-6,
                "theta {theta}: residual {:e}",
                sol.residual
            );
        }
    }

    #[test]
    fn window_policy_rejects_out_of_range_roots() {
        // A narrow window that excludes both roots of a feasible target.
        let t = AmplitudeTarget::new(0.5, params(2.5, 0.4, 4.0), 2.4 * GHZ).unwrap();
        let narrow = CapacitanceWindow::new(0.47e-12, 0.6e-12).unwrap();
        let sol = capacitance_from_amplitude(&t, &narrow, WindowPolicy::Advisory).unwrap();
        assert!(!sol.in_range);
        let err = capacitance_from_amplitude(&t, &narrow, WindowPolicy::Required).unwrap_err();
        assert!(matches!(err, InverseError::NoRootInRange { .. }));
    }

    #[test]
    fn design_table_handles_rows_independently() {
        let p = params(2.3, 0.4, 2.0);
        let window = CapacitanceWindow::default();
        let rows = [
            DesignRequest {
                theta: 30.0_f64.to_radians(),
                rho: 0.39,
                f: 2.0 * GHZ,
            },
            DesignRequest {
                theta: 0.3,
                rho: 1.5, // out of domain: row error, not table abort
                f: 2.4 * GHZ,
            },
            DesignRequest {
                theta: 55.0_f64.to_radians(),
                rho: 0.8,
                f: 2.4 * GHZ,
            },
        ];
        let table = design_table(&rows, &p, &window);
        assert_eq!(table.len(), 3);

        let first = &table[0];
        assert!((first.c_theta.unwrap() - 2.34 * PF).abs() <= 0.2 * PF);
        assert!(first.discrepancy.is_some());
        assert!(first.error.is_none());

        let second = &table[1];
        assert!(second.c_rho.is_none());
        assert!(second.error.as_deref().unwrap().contains("amplitude"));
        assert!(
            second.c_theta.is_some(),
            "phase half of the row still solves"
        );

        let third = &table[2];
        assert!((third.c_theta.unwrap() - 1.56 * PF).abs() <= 0.2 * PF);
    }

    #[test]
    fn empty_design_table() {
        let table = design_table(&[], &params(2.3, 0.4, 2.0), &CapacitanceWindow::default());
        assert!(table.is_empty());
    }
}
