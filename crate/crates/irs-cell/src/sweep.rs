//! Curve generation: sweeps of the forward and inverse models over a
//! uniform grid, extremum location with golden-section refinement, and
//! CSV/JSON emission.
//!
//! A sweep varies one quantity — capacitance, frequency, or a requested
//! phase/amplitude target — and records any subset of four output columns:
//! achieved phase, achieved amplitude, and the inverse-designed
//! capacitances. Rows that cannot be computed (degenerate circuit,
//! infeasible target) become explicit gaps so the columns stay aligned for
//! plotting tools: an empty CSV field, a JSON `null`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circuit::{self, OperatingPoint, UnitCellParams};
use crate::error::SweepError;
use crate::inverse::{self, AmplitudeTarget, CapacitanceWindow, PhaseTarget, WindowPolicy};

use std::f64::consts::PI;

/// Grid resolution that resolves the sharp resonance dip at the practical
/// parameter scale; the default for figure reproduction.
pub const DEFAULT_FIGURE_STEPS: usize = 1024;

/// Output varies less than this across the grid ⇒ plateau, nothing to
/// refine.
pub const PLATEAU_THRESHOLD: f64 = 1e-12;

/// The quantity swept along the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Varactor capacitance, farads; requires a fixed frequency.
    Capacitance,
    /// Incident frequency, hertz; requires a fixed capacitance.
    Frequency,
    /// Requested phase target, radians; rows are inverse designs.
    RequestedPhase,
    /// Requested amplitude target, dimensionless; rows are inverse designs.
    RequestedAmplitude,
}

/// One recordable output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputColumn {
    /// Phase shift, radians.
    Theta,
    /// Reflection amplitude, dimensionless.
    Rho,
    /// Capacitance realizing the phase, farads.
    CTheta,
    /// Capacitance realizing the amplitude, farads.
    CRho,
}

impl OutputColumn {
    /// Column name used in CSV headers and JSON keys.
    pub fn name(&self) -> &'static str {
        match self {
            OutputColumn::Theta => "theta_rad",
            OutputColumn::Rho => "rho",
            OutputColumn::CTheta => "c_theta_F",
            OutputColumn::CRho => "c_rho_F",
        }
    }

    const CANONICAL: [OutputColumn; 4] = [
        OutputColumn::Theta,
        OutputColumn::Rho,
        OutputColumn::CTheta,
        OutputColumn::CRho,
    ];
}

/// Full description of one sweep. Identical specs produce bit-identical
/// curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// First grid value, SI units of `variable`.
    pub start: f64,
    /// Last grid value, SI units of `variable`.
    pub stop: f64,
    /// Number of grid points including both endpoints.
    pub steps: usize,
    pub params: UnitCellParams,
    /// Fixed capacitance, farads; required for frequency sweeps.
    pub fixed_c: Option<f64>,
    /// Fixed frequency, hertz; required for every other sweep variable.
    pub fixed_f: Option<f64>,
    /// Requested output columns; stored in canonical order, deduplicated.
    pub outputs: Vec<OutputColumn>,
    /// Window used by the inverse-design columns.
    pub window: CapacitanceWindow,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |msg: String| Err(SweepError::InvalidSpec(msg));
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return bad(format!(
                "start {} must be below stop {}",
                self.start, self.stop
            ));
        }
        if self.steps < 2 {
            return bad(format!("steps = {} must be at least 2", self.steps));
        }
        if self.outputs.is_empty() {
            return bad("no output columns requested".into());
        }
        self.params
            .validate()
            .map_err(|e| SweepError::InvalidSpec(e.to_string()))?;
        match self.variable {
            SweepVariable::Capacitance => {
                if self.start <= 0.0 {
                    return bad("capacitance sweep needs start > 0".into());
                }
                self.require_fixed_f()?;
            }
            SweepVariable::Frequency => {
                if self.start <= 0.0 {
                    return bad("frequency sweep needs start > 0".into());
                }
                let c = self.fixed_c.ok_or_else(|| {
                    SweepError::InvalidSpec("frequency sweep needs a fixed capacitance".into())
                })?;
                if !(c.is_finite() && c > 0.0) {
                    return bad(format!("fixed capacitance {c} must be positive"));
                }
            }
            SweepVariable::RequestedPhase => {
                if self.start <= -PI || self.stop > PI {
                    return bad("phase targets must lie in (-pi, pi]".into());
                }
                self.require_fixed_f()?;
            }
            SweepVariable::RequestedAmplitude => {
                if self.start < 0.0 || self.stop > 1.0 {
                    return bad("amplitude targets must lie in [0, 1]".into());
                }
                self.require_fixed_f()?;
            }
        }
        Ok(())
    }

    fn require_fixed_f(&self) -> Result<(), SweepError> {
        let f = self
            .fixed_f
            .ok_or_else(|| SweepError::InvalidSpec("this sweep needs a fixed frequency".into()))?;
        if !(f.is_finite() && f > 0.0) {
            return Err(SweepError::InvalidSpec(format!(
                "fixed frequency {f} must be positive"
            )));
        }
        Ok(())
    }

    /// Requested outputs in canonical order, deduplicated.
    pub fn canonical_outputs(&self) -> Vec<OutputColumn> {
        OutputColumn::CANONICAL
            .iter()
            .copied()
            .filter(|c| self.outputs.contains(c))
            .collect()
    }

    /// The `i`-th grid value.
    pub fn grid_value(&self, i: usize) -> f64 {
        self.start + (self.stop - self.start) * i as f64 / (self.steps - 1) as f64
    }
}

/// One sweep's worth of aligned columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveData {
    pub spec: SweepSpec,
    /// Swept variable values, strictly increasing, length = `spec.steps`.
    pub variable: Vec<f64>,
    /// Requested columns in canonical order; `None` marks a gap.
    pub columns: Vec<(OutputColumn, Vec<Option<f64>>)>,
}

impl CurveData {
    pub fn column(&self, which: OutputColumn) -> Option<&[Option<f64>]> {
        self.columns
            .iter()
            .find(|(c, _)| *c == which)
            .map(|(_, v)| v.as_slice())
    }

    /// RFC-4180 CSV with an LF terminator per record. Numeric fields carry
    /// 17 significant digits and never need quoting; gaps are empty fields.
    pub fn to_csv(&self) -> String {
        let outputs = self.spec.canonical_outputs();
        let mut out = String::new();
        out.push_str("variable");
        for col in &outputs {
            out.push(',');
            out.push_str(col.name());
        }
        out.push('\n');
        for i in 0..self.variable.len() {
            out.push_str(&format_float(self.variable[i]));
            for (_, cells) in &self.columns {
                out.push(',');
                if let Some(v) = cells[i] {
                    out.push_str(&format_float(v));
                }
            }
            out.push('\n');
        }
        out
    }

    /// JSON object with a `spec` echo and a `columns` map (gaps are
    /// `null`).
    pub fn to_json(&self) -> Value {
        let mut columns = serde_json::Map::new();
        columns.insert(
            "variable".to_string(),
            Value::Array(self.variable.iter().map(|v| json!(v)).collect()),
        );
        for (col, cells) in &self.columns {
            columns.insert(
                col.name().to_string(),
                Value::Array(
                    cells
                        .iter()
                        .map(|v| match v {
                            Some(x) => json!(x),
                            None => Value::Null,
                        })
                        .collect(),
                ),
            );
        }
        json!({
            "spec": serde_json::to_value(&self.spec).expect("spec serializes"),
            "columns": Value::Object(columns),
        })
    }
}

/// 17-significant-digit decimal form; round-trips every finite `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

// ─── Sweep execution ────────────────────────────────────────────────────────

struct RowValues {
    theta: Option<f64>,
    rho: Option<f64>,
    c_theta: Option<f64>,
    c_rho: Option<f64>,
}

fn forward_row(spec: &SweepSpec, op: &OperatingPoint, want_inverse: bool) -> RowValues {
    let state = circuit::reflection_state(&spec.params, op).ok();
    let theta = state.map(|s| s.phase);
    let rho = state.map(|s| s.magnitude);
    // Self-consistency columns: re-invert the achieved values.
    let c_theta = if want_inverse {
        theta.and_then(|t| {
            PhaseTarget::new(t, spec.params, op.f)
                .and_then(|t| {
                    inverse::capacitance_from_phase(&t, &spec.window, WindowPolicy::Advisory)
                })
                .ok()
                .map(|s| s.c_selected)
        })
    } else {
        None
    };
    let c_rho = if want_inverse {
        rho.and_then(|r| {
            AmplitudeTarget::new(r.min(1.0), spec.params, op.f)
                .and_then(|t| {
                    inverse::capacitance_from_amplitude(&t, &spec.window, WindowPolicy::Advisory)
                })
                .ok()
                .map(|s| s.c_selected)
        })
    } else {
        None
    };
    RowValues {
        theta,
        rho,
        c_theta,
        c_rho,
    }
}

/// Run one sweep. Row-level failures become gaps, never aborts.
pub fn run_sweep(spec: &SweepSpec) -> Result<CurveData, SweepError> {
    spec.validate()?;
    let outputs = spec.canonical_outputs();
    let want_c_theta = outputs.contains(&OutputColumn::CTheta);
    let want_c_rho = outputs.contains(&OutputColumn::CRho);

    let mut variable = Vec::with_capacity(spec.steps);
    let mut cells: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(spec.steps); outputs.len()];

    for i in 0..spec.steps {
        let x = spec.grid_value(i);
        variable.push(x);

        let row = match spec.variable {
            SweepVariable::Capacitance => {
                let op = OperatingPoint {
                    c: x,
                    f: spec.fixed_f.unwrap(),
                };
                forward_row(spec, &op, want_c_theta || want_c_rho)
            }
            SweepVariable::Frequency => {
                let op = OperatingPoint {
                    c: spec.fixed_c.unwrap(),
                    f: x,
                };
                forward_row(spec, &op, want_c_theta || want_c_rho)
            }
            SweepVariable::RequestedPhase => {
                let sol = PhaseTarget::new(x, spec.params, spec.fixed_f.unwrap())
                    .and_then(|t| {
                        inverse::capacitance_from_phase(&t, &spec.window, WindowPolicy::Advisory)
                    })
                    .ok();
                RowValues {
                    theta: sol.as_ref().map(|s| s.achieved.phase),
                    rho: sol.as_ref().map(|s| s.achieved.magnitude),
                    c_theta: sol.as_ref().map(|s| s.c_selected),
                    c_rho: None,
                }
            }
            SweepVariable::RequestedAmplitude => {
                let sol = AmplitudeTarget::new(x, spec.params, spec.fixed_f.unwrap())
                    .and_then(|t| {
                        inverse::capacitance_from_amplitude(
                            &t,
                            &spec.window,
                            WindowPolicy::Advisory,
                        )
                    })
                    .ok();
                RowValues {
                    theta: sol.as_ref().map(|s| s.achieved.phase),
                    rho: sol.as_ref().map(|s| s.achieved.magnitude),
                    c_theta: None,
                    c_rho: sol.as_ref().map(|s| s.c_selected),
                }
            }
        };

        for (slot, col) in cells.iter_mut().zip(&outputs) {
            slot.push(match col {
                OutputColumn::Theta => row.theta,
                OutputColumn::Rho => row.rho,
                OutputColumn::CTheta => row.c_theta,
                OutputColumn::CRho => row.c_rho,
            });
        }
    }

    Ok(CurveData {
        spec: spec.clone(),
        variable,
        columns: outputs.into_iter().zip(cells).collect(),
    })
}

// ─── Extremum location ──────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    Min,
    Max,
}

/// A located extremum of one output over the swept variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub kind: ExtremumKind,
    /// Variable value at the extremum.
    pub at: f64,
    /// Output value there, recomputed from the forward model.
    pub value: f64,
    /// Whether golden-section refinement produced the reported point
    /// (false when the coarse grid sample was already better).
    pub refined: bool,
}

fn better(a: f64, b: f64, kind: ExtremumKind) -> bool {
    if a.is_nan() {
        return false;
    }
    if b.is_nan() {
        return true;
    }
    match kind {
        ExtremumKind::Min => a < b,
        ExtremumKind::Max => a > b,
    }
}

/// Locate the extremum of `theta` or `rho` over the sweep: coarse grid
/// argmin/argmax, then golden-section refinement inside the bracketing
/// grid cells, to a variable tolerance of 1e-6 of the span.
pub fn find_extremum(
    spec: &SweepSpec,
    output: OutputColumn,
    kind: ExtremumKind,
) -> Result<Extremum, SweepError> {
    if !matches!(output, OutputColumn::Theta | OutputColumn::Rho) {
        return Err(SweepError::MissingOutput);
    }
    let mut probe_spec = spec.clone();
    if !probe_spec.outputs.contains(&output) {
        return Err(SweepError::MissingOutput);
    }
    probe_spec.outputs = vec![output];
    let curve = run_sweep(&probe_spec)?;
    let cells = curve.column(output).expect("requested column present");

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut best_idx: Option<usize> = None;
    for (i, cell) in cells.iter().enumerate() {
        if let Some(v) = cell {
            lo = lo.min(*v);
            hi = hi.max(*v);
            if best_idx.is_none() || better(*v, cells[best_idx.unwrap()].unwrap(), kind) {
                best_idx = Some(i);
            }
        }
    }
    let best_idx =
        best_idx.ok_or_else(|| SweepError::InvalidSpec("every grid row is a gap".into()))?;
    let variation = hi - lo;
    if variation < PLATEAU_THRESHOLD {
        return Err(SweepError::PlateauDetected {
            variation,
            threshold: PLATEAU_THRESHOLD,
        });
    }

    let eval = |x: f64| -> f64 {
        let op = match spec.variable {
            SweepVariable::Capacitance => OperatingPoint {
                c: x,
                f: spec.fixed_f.unwrap(),
            },
            SweepVariable::Frequency => OperatingPoint {
                c: spec.fixed_c.unwrap(),
                f: x,
            },
            _ => return f64::NAN,
        };
        let value = match output {
            OutputColumn::Theta => circuit::phase_shift(&spec.params, &op),
            OutputColumn::Rho => circuit::reflection_amplitude(&spec.params, &op),
            _ => unreachable!(),
        };
        value.unwrap_or(f64::NAN)
    };
    if matches!(
        spec.variable,
        SweepVariable::RequestedPhase | SweepVariable::RequestedAmplitude
    ) {
        // Inverse sweeps have no continuous forward evaluator to refine on;
        // report the coarse best.
        return Ok(Extremum {
            kind,
            at: curve.variable[best_idx],
            value: cells[best_idx].unwrap(),
            refined: false,
        });
    }

    let coarse_at = curve.variable[best_idx];
    let coarse_value = cells[best_idx].unwrap();
    let a = curve.variable[best_idx.saturating_sub(1)];
    let b = curve.variable[(best_idx + 1).min(curve.variable.len() - 1)];
    let tol = 1e-6 * (spec.stop - spec.start);
    let (refined_at, refined_value) = golden_section(a, b, tol, kind, &eval);

    if better(refined_value, coarse_value, kind) || refined_value == coarse_value {
        Ok(Extremum {
            kind,
            at: refined_at,
            value: refined_value,
            refined: true,
        })
    } else {
        Ok(Extremum {
            kind,
            at: coarse_at,
            value: coarse_value,
            refined: false,
        })
    }
}

/// Derivative-free extremum refinement inside `[a, b]`.
fn golden_section(
    a: f64,
    b: f64,
    tol: f64,
    kind: ExtremumKind,
    eval: &dyn Fn(f64) -> f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    while hi - lo > tol {
        if better(f1, f2, kind) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, eval(mid))
}
