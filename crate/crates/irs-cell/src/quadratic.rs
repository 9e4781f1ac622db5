//! Numerically careful real-quadratic solver.
//!
//! The inversion quadratics mix coefficients spanning ~24 decades
//! (`qa ~ 1e8`, `qc ~ 1e-16` in SI), so the textbook formula is written in
//! the cancellation-free form: `q = −(b + sign(b)·√disc)/2`, roots `q/a` and
//! `c/q`. The discriminant uses a fused multiply-add to keep `b² − 4ac`
//! accurate when the products nearly cancel.

/// Real solutions of `a·x² + b·x + c = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadraticRoots {
    /// No real solution (negative discriminant, or `a = b = 0` with
    /// `c ≠ 0`).
    None { discriminant: f64 },
    /// One real solution (linear case or exact double root).
    One(f64),
    /// Two distinct real solutions, unordered.
    Two(f64, f64),
    /// `a = b = c = 0`: every real number solves the equation.
    AllValues,
}

impl QuadraticRoots {
    /// The real roots as a list (empty for `None`/`AllValues`).
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            QuadraticRoots::None { .. } | QuadraticRoots::AllValues => Vec::new(),
            QuadraticRoots::One(r) => vec![*r],
            QuadraticRoots::Two(r, s) => vec![*r, *s],
        }
    }
}

/// Absolute floor under which a lone constant term counts as zero.
const DEGENERATE_EPS: f64 = 1e-300;

/// Solve `a·x² + b·x + c = 0` over the reals.
pub fn solve_quadratic(a: f64, b: f64, c: f64) -> QuadraticRoots {
    if a == 0.0 {
        if b == 0.0 {
            return if c.abs() <= DEGENERATE_EPS {
                QuadraticRoots::AllValues
            } else {
                QuadraticRoots::None { discriminant: 0.0 }
            };
        }
        return QuadraticRoots::One(-c / b);
    }
    if c == 0.0 {
        let other = -b / a;
        return if other == 0.0 {
            QuadraticRoots::One(0.0)
        } else {
            QuadraticRoots::Two(0.0, other)
        };
    }

    // b² − 4ac with one rounding on the b² term.
    let four_ac = 4.0 * a * c;
    let disc = b.mul_add(b, -four_ac);
    if disc < 0.0 {
        return QuadraticRoots::None { discriminant: disc };
    }
    if disc == 0.0 {
        return QuadraticRoots::One(-b / (2.0 * a));
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        // b == 0 and disc == -4ac > 0
        let root = (-c / a).sqrt();
        return QuadraticRoots::Two(-root, root);
    }
    QuadraticRoots::Two(q / a, c / q)
}

/// Residual of the quadratic at `x`, normalized by its largest term.
pub fn scaled_residual(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let t2 = a * x * x;
    let t1 = b * x;
    let residual = (t2 + t1 + c).abs();
    residual / t2.abs().max(t1.abs()).max(c.abs()).max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_roots() {
        match solve_quadratic(1.0, -3.0, 2.0) {
            QuadraticRoots::Two(r, s) => {
                let (lo, hi) = if r < s { (r, s) } else { (s, r) };
                assert!((lo - 1.0).abs() < 1e-14);
                assert!((hi - 2.0).abs() < 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn linear_fallback() {
        assert_eq!(solve_quadratic(0.0, 2.0, -8.0), QuadraticRoots::One(4.0));
    }

    #[test]
    fn all_values_when_identically_zero() {
        assert_eq!(solve_quadratic(0.0, 0.0, 0.0), QuadraticRoots::AllValues);
    }

    #[test]
    fn contradiction_has_no_roots() {
        assert!(matches!(
            solve_quadratic(0.0, 0.0, 3.0),
            QuadraticRoots::None { .. }
        ));
        assert!(matches!(
            solve_quadratic(1.0, 0.0, 1.0),
            QuadraticRoots::None { .. }
        ));
    }

    #[test]
    fn cancellation_prone_roots_stay_accurate() {
        // x² − 1e9·x + 1 = 0: naive formula loses the small root entirely.
        match solve_quadratic(1.0, -1e9, 1.0) {
            QuadraticRoots::Two(r, s) => {
                let small = r.min(s);
                assert!((small - 1e-9).abs() <= 1e-24, "small root {small:e}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wide_magnitude_spread_keeps_tiny_residual() {
        // Magnitudes mirroring the capacitance inversion quadratics.
        let (a, b, c) = (1.576e8, -5.435e-4, 4.630e-16);
        if let QuadraticRoots::Two(r, s) = solve_quadratic(a, b, c) {
            for x in [r, s] {
                assert!(scaled_residual(a, b, c, x) <= 1e-12);
            }
        } else {
            panic!("expected two roots");
        }
    }

    #[test]
    fn zero_constant_term_gives_exact_zero_root() {
        match solve_quadratic(2.0, -4.0, 0.0) {
            QuadraticRoots::Two(r, s) => {
                assert_eq!(r.min(s), 0.0);
                assert_eq!(r.max(s), 2.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
