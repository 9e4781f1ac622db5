//! Property tests: the closed forms against the direct oracle, inversion
//! round trips, root soundness, and grid hygiene, over randomized draws
//! from the practical parameter ranges.

use proptest::prelude::*;

use irs_cell::circuit::{self, phase_distance, OperatingPoint, UnitCellParams};
use irs_cell::inverse::{self, AmplitudeTarget, CapacitanceWindow, PhaseTarget, WindowPolicy};
use irs_cell::oracle;
use irs_cell::sweep::{self, OutputColumn, SweepSpec, SweepVariable};

use std::f64::consts::PI;

fn params_strategy() -> impl Strategy<Value = UnitCellParams> {
    (2.3e-9..=2.5e-9, 0.4e-9..=0.56e-9, 2.0..=4.0f64)
        .prop_map(|(l1, l2, r)| UnitCellParams::in_free_space(l1, l2, r).unwrap())
}

fn lossy_or_lossless_params() -> impl Strategy<Value = UnitCellParams> {
    (
        2.3e-9..=2.5e-9,
        0.4e-9..=0.56e-9,
        prop_oneof![Just(0.0), 0.0..=4.0f64],
    )
        .prop_map(|(l1, l2, r)| UnitCellParams::in_free_space(l1, l2, r).unwrap())
}

fn op_strategy() -> impl Strategy<Value = OperatingPoint> {
    (0.47e-12..=2.35e-12, 1e9..=3e9f64).prop_map(|(c, f)| OperatingPoint::new(c, f).unwrap())
}

proptest! {
    /// Closed-form phase and amplitude agree with the direct complex
    /// evaluation everywhere in the practical ranges.
    #[test]
    fn closed_forms_match_oracle(p in params_strategy(), op in op_strategy()) {
        let gamma = oracle::gamma_direct(&p, &op).unwrap();
        let theta = circuit::phase_shift(&p, &op).unwrap();
        let rho = circuit::reflection_amplitude(&p, &op).unwrap();

        prop_assert!(phase_distance(theta, gamma.im.atan2(gamma.re)) <= 1e-9);
        let mag = gamma.norm();
        let err = if mag >= 1e-6 {
            (rho - mag).abs() / mag
        } else {
            (rho - mag).abs()
        };
        prop_assert!(err <= 1e-9);
    }

    /// A passive cell never reflects more than it receives.
    #[test]
    fn passivity(p in lossy_or_lossless_params(), op in op_strategy()) {
        let rho = circuit::reflection_amplitude(&p, &op).unwrap();
        prop_assert!(rho <= 1.0 + 1e-12, "rho = {rho}");
    }

    /// No NaN or infinity escapes the public operations, and the cell
    /// impedance keeps a non-negative real part.
    #[test]
    fn outputs_stay_finite(p in params_strategy(), op in op_strategy()) {
        let z = circuit::unit_cell_impedance(&p, &op).unwrap();
        prop_assert!(z.re.is_finite() && z.im.is_finite());
        prop_assert!(z.re >= -1e-12 * z.norm(), "Re Z = {}", z.re);
        let state = circuit::reflection_state(&p, &op).unwrap();
        prop_assert!(state.phase.is_finite() && state.magnitude.is_finite());
        let k = circuit::phase_coefficients(&p, &op);
        for v in [k.num_re, k.num_im, k.den_re, k.den_im] {
            prop_assert!(v.is_finite());
        }
    }

    /// A lossless cell reflects everything.
    #[test]
    fn losslessness(
        l1 in 2.3e-9..=2.5e-9f64,
        l2 in 0.4e-9..=0.56e-9f64,
        op in op_strategy(),
    ) {
        let p = UnitCellParams::in_free_space(l1, l2, 0.0).unwrap();
        // An Err here is the degenerate resonance, which is excluded.
        if let Ok(rho) = circuit::reflection_amplitude(&p, &op) {
            prop_assert!((rho - 1.0).abs() <= 1e-12);
        }
    }

    /// The two defining identities of the coefficient expansion.
    #[test]
    fn coefficient_identities(p in lossy_or_lossless_params(), op in op_strategy()) {
        let k = circuit::phase_coefficients(&p, &op);
        let w = op.angular_frequency();
        let scale = [k.num_re, k.num_im, k.den_re, k.den_im]
            .iter()
            .fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(((k.den_re - k.num_re) - 2.0 * p.r * p.z0).abs() <= 1e-12 * scale);
        prop_assert!(((k.den_im + k.num_im) - 2.0 * w * p.r * p.l1).abs() <= 1e-12 * scale);
    }

    /// Phase output stays on the canonical branch.
    #[test]
    fn phase_branch(p in params_strategy(), op in op_strategy()) {
        let theta = circuit::phase_shift(&p, &op).unwrap();
        prop_assert!(theta > -PI && theta <= PI);
    }

    /// Inverting a forward-produced phase lands back on it.
    #[test]
    fn phase_round_trip(p in params_strategy(), op in op_strategy()) {
        let theta = circuit::phase_shift(&p, &op).unwrap();
        let target = PhaseTarget::new(theta, p, op.f).unwrap();
        let sol = inverse::capacitance_from_phase(
            &target,
            &CapacitanceWindow::default(),
            WindowPolicy::Advisory,
        )
        .unwrap();
        prop_assert!(sol.residual <= 1e-6, "residual = {:e}", sol.residual);
        let q = inverse::phase_quadratic(&target);
        for &c in &sol.c_candidates {
            prop_assert!(c > 0.0 && c.is_finite());
            prop_assert!(q.scaled_residual(c) <= 1e-6);
        }
    }

    /// Inverting a forward-produced amplitude lands back on it.
    #[test]
    fn amplitude_round_trip(p in params_strategy(), op in op_strategy()) {
        let rho = circuit::reflection_amplitude(&p, &op).unwrap();
        let target = AmplitudeTarget::new(rho.min(1.0), p, op.f).unwrap();
        let sol = inverse::capacitance_from_amplitude(
            &target,
            &CapacitanceWindow::default(),
            WindowPolicy::Advisory,
        )
        .unwrap();
        prop_assert!(sol.residual <= 1e-6, "residual = {:e}", sol.residual);
        let q = inverse::amplitude_quadratic(&target);
        for &c in &sol.c_candidates {
            prop_assert!(q.scaled_residual(c) <= 1e-6);
        }
    }

    /// Half-turn targets go through the reformulated (pole-free) quadratic:
    /// the solution is either exact or exactly tangent-matched on the far
    /// branch, never garbage.
    #[test]
    fn half_turn_targets_resolve(p in params_strategy(), sign in prop_oneof![Just(1.0), Just(-1.0)]) {
        let target = PhaseTarget::new(sign * PI / 2.0, p, 2.4e9).unwrap();
        match inverse::capacitance_from_phase(
            &target,
            &CapacitanceWindow::default(),
            WindowPolicy::Advisory,
        ) {
            Ok(sol) => {
                let off_branch = (sol.residual - PI).abs();
                prop_assert!(
                    sol.residual <= 1e-6 || off_branch <= 1e-6,
                    "residual = {}",
                    sol.residual
                );
            }
            Err(irs_cell::InverseError::InfeasibleTarget { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
        }
    }

    /// Swept grids are strictly increasing with uniform spacing.
    #[test]
    fn sweep_grid_hygiene(
        start in 0.1e-12..=1.0e-12f64,
        span in 0.1e-12..=2.0e-12f64,
        steps in 2usize..=257,
    ) {
        let spec = SweepSpec {
            variable: SweepVariable::Capacitance,
            start,
            stop: start + span,
            steps,
            params: UnitCellParams::default(),
            fixed_c: None,
            fixed_f: Some(2.4e9),
            outputs: vec![OutputColumn::Rho],
            window: CapacitanceWindow::default(),
        };
        let curve = sweep::run_sweep(&spec).unwrap();
        prop_assert_eq!(curve.variable.len(), steps);
        let step = span / (steps - 1) as f64;
        for w in curve.variable.windows(2) {
            prop_assert!(w[1] > w[0]);
            prop_assert!(((w[1] - w[0]) - step).abs() <= 8.0 * f64::EPSILON * w[1]);
        }
    }

    /// 17-digit formatting round-trips arbitrary doubles.
    #[test]
    fn float_format_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::ZERO) {
        let s = sweep::format_float(v);
        let back: f64 = s.parse().unwrap();
        prop_assert_eq!(back, v);
    }
}

/// Closed-form inversion matches brute force on feasible targets drawn from
/// the forward model (small randomized version of the full concordance run).
#[test]
fn grid_concordance_sample() {
    use rand::Rng;
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let window = CapacitanceWindow::default();
    for _ in 0..10 {
        let p = UnitCellParams::in_free_space(
            rng.random_range(2.3e-9..=2.5e-9),
            rng.random_range(0.4e-9..=0.56e-9),
            rng.random_range(2.0..=4.0),
        )
        .unwrap();
        let c_true = rng.random_range(window.min..=window.max);
        let f = rng.random_range(1e9..=3e9);
        let op = OperatingPoint::new(c_true, f).unwrap();
        let theta = circuit::phase_shift(&p, &op).unwrap();

        let target = PhaseTarget::new(theta, p, f).unwrap();
        let sol =
            inverse::capacitance_from_phase(&target, &window, WindowPolicy::Advisory).unwrap();
        let c_grid = oracle::grid_invert(
            irs_cell::TargetKind::Phase,
            theta,
            &p,
            window.min,
            window.max,
            1_000_000,
            f,
        );
        let grid_phase =
            circuit::phase_shift(&p, &OperatingPoint::new(c_grid, f).unwrap()).unwrap();
        let closed_phase = sol.achieved.phase;
        assert!(
            phase_distance(grid_phase, closed_phase) <= 1e-4,
            "grid {grid_phase} vs closed {closed_phase}"
        );
    }
}
