//! Constrained inverse design over a parameter grid.
//!
//! A design problem carries box bounds, a grid (explicit candidates or a
//! uniform resolution per parameter), a loss, and optional inequality /
//! equality constraints. The solver evaluates the full grid with the
//! fitted model as the simulator, screens infeasible points, and returns
//! the feasible minimizer together with the complete audit table.

use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::IdDmdModel;
use crate::modal::{classify_modes, modal_decomposition, ModeClassification, ModeMethod};
use crate::predict::{reconstruct_trajectory, Trajectory};

/// Default tolerance for equality constraints, in loss units.
pub const DEFAULT_EQUALITY_TOL: f64 = 1e-6;

/// Scalar objective evaluable from a trajectory or a modal decomposition.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSpec {
    /// Root mean square signal power over a state region and time window:
    /// `(1/N) sqrt(sum_{region,k} x_k^2)` with `N` the snapshot count.
    SignalPower {
        /// State indices the power is accumulated over; empty means all.
        region: Vec<usize>,
        /// Half-open step window `[start, end)`; `None` means the whole
        /// trajectory.
        window: Option<(usize, usize)>,
    },
    /// Energy dissipated relative to a reference configuration:
    /// `(E_ref - E) / E_ref` with `E = sum_k |y(k)|^2` over the window.
    EnergyDissipation {
        /// Parameter vector of the reference (e.g. the linear system).
        baseline_eps: Vec<f64>,
        /// Physical signal the energy is read from.
        signal: usize,
        window: Option<(usize, usize)>,
    },
    /// Distance of a resonant frequency from a target:
    /// `|omega_mode(eps) - omega_target|`.
    TargetFrequency {
        /// Which resonance, counted over dominant tracks by ascending
        /// median frequency (0 = first resonance).
        mode_index: usize,
        /// Target frequency in rad/s.
        omega_target: f64,
    },
    /// Arbitrary scalar functional of the reconstructed trajectory.
    /// Not serializable; available through the API only.
    #[serde(skip)]
    Custom(Arc<dyn Fn(&Trajectory) -> Result<f64> + Send + Sync>),
}

impl fmt::Debug for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossSpec::SignalPower { region, window } => f
                .debug_struct("SignalPower")
                .field("region", region)
                .field("window", window)
                .finish(),
            LossSpec::EnergyDissipation { baseline_eps, signal, window } => f
                .debug_struct("EnergyDissipation")
                .field("baseline_eps", baseline_eps)
                .field("signal", signal)
                .field("window", window)
                .finish(),
            LossSpec::TargetFrequency { mode_index, omega_target } => f
                .debug_struct("TargetFrequency")
                .field("mode_index", mode_index)
                .field("omega_target", omega_target)
                .finish(),
            LossSpec::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Affine wrapper turning a loss value into a constraint expression
/// `scale * L(eps) + offset`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub loss: LossSpec,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub offset: f64,
}

fn one() -> f64 {
    1.0
}

impl ConstraintSpec {
    pub fn value(&self, ctx: &EvalContext<'_>, eps: &[f64]) -> Result<f64> {
        Ok(self.scale * evaluate_loss_in_context(ctx, eps, &self.loss)? + self.offset)
    }
}

/// Per-parameter candidate values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    /// Uniformly spaced over the parameter's bounds.
    Resolution { steps: usize },
    /// Explicit candidate list.
    Values { values: Vec<f64> },
}

/// Inverse-design problem statement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignProblem {
    /// Per-parameter `[min, max]` bounds.
    pub bounds: Vec<(f64, f64)>,
    /// Per-parameter grid over the bounds.
    pub grid: Vec<GridSpec>,
    pub loss: LossSpec,
    /// Inequality constraints `g(eps) <= 0`.
    #[serde(default)]
    pub inequality: Vec<ConstraintSpec>,
    /// Equality constraints `|h(eps)| <= tol`.
    #[serde(default)]
    pub equality: Vec<(ConstraintSpec, f64)>,
    /// Trajectory length used by trajectory-valued losses.
    pub horizon: usize,
}

impl DesignProblem {
    /// Candidate values of one parameter.
    fn axis_values(&self, i: usize) -> Result<Vec<f64>> {
        let (lo, hi) = self.bounds[i];
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidArgument(format!(
                "parameter {i}: bounds [{lo}, {hi}] invalid"
            )));
        }
        let vals = match &self.grid[i] {
            GridSpec::Resolution { steps } => {
                if *steps == 0 {
                    return Err(Error::InvalidArgument(format!("parameter {i}: empty grid")));
                }
                if *steps == 1 {
                    vec![lo]
                } else {
                    (0..*steps)
                        .map(|k| lo + (hi - lo) * k as f64 / (*steps - 1) as f64)
                        .collect()
                }
            }
            GridSpec::Values { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidArgument(format!("parameter {i}: empty grid")));
                }
                for &v in values {
                    if v < lo || v > hi {
                        return Err(Error::InvalidArgument(format!(
                            "parameter {i}: candidate {v} outside bounds [{lo}, {hi}]"
                        )));
                    }
                }
                values.clone()
            }
        };
        Ok(vals)
    }

    /// Cartesian product of the per-parameter grids.
    pub fn grid_points(&self) -> Result<Vec<Vec<f64>>> {
        if self.bounds.len() != self.grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} bounds but {} grid axes",
                self.bounds.len(),
                self.grid.len()
            )));
        }
        let axes: Result<Vec<Vec<f64>>> =
            (0..self.bounds.len()).map(|i| self.axis_values(i)).collect();
        let axes = axes?;
        let mut points = vec![Vec::new()];
        for axis in &axes {
            let mut next = Vec::with_capacity(points.len() * axis.len());
            for p in &points {
                for &v in axis {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            points = next;
        }
        Ok(points)
    }
}

/// Everything a loss evaluation may need besides the query point.
pub struct EvalContext<'a> {
    pub model: &'a IdDmdModel,
    /// Initial raw snapshots for trajectory-valued losses.
    pub initial: Option<&'a Array2<f64>>,
    pub horizon: usize,
    pub mode_method: ModeMethod,
    /// Mode tracking over the problem grid, used by frequency losses.
    pub classification: Option<&'a ModeClassification>,
    /// Grid the classification was computed over.
    pub grid_points: Option<&'a [Vec<f64>]>,
}

fn window_slice(len: usize, window: Option<(usize, usize)>) -> Result<(usize, usize)> {
    let (a, b) = window.unwrap_or((0, len));
    if a >= b || b > len {
        return Err(Error::InvalidArgument(format!(
            "window [{a}, {b}) invalid for a {len}-step trajectory"
        )));
    }
    Ok((a, b))
}

fn trajectory_at<'a>(ctx: &EvalContext<'a>, eps: &[f64]) -> Result<Trajectory> {
    let initial = ctx.initial.ok_or_else(|| {
        Error::InvalidArgument("this loss needs an initial condition".into())
    })?;
    reconstruct_trajectory(ctx.model, eps, &initial.view(), ctx.horizon, ctx.mode_method)
}

fn signal_energy(traj: &Trajectory, signal: usize, window: Option<(usize, usize)>) -> Result<f64> {
    if signal >= traj.states.nrows() {
        return Err(Error::InvalidArgument(format!(
            "signal {signal} out of range for {} signals",
            traj.states.nrows()
        )));
    }
    let (a, b) = window_slice(traj.steps(), window)?;
    Ok(traj.states.row(signal).iter().skip(a).take(b - a).map(|v| v * v).sum())
}

/// Frequency of the `mode_index`-th resonance at a query point.
///
/// With a classification available the value is read off the matched
/// full-span track (tracking carries mode identity even when the design
/// moves the frequency); otherwise it falls back to the sorted positive
/// frequencies of the single-point decomposition.
fn resonant_frequency(ctx: &EvalContext<'_>, eps: &[f64], mode_index: usize) -> Result<f64> {
    if let (Some(cls), Some(grid)) = (ctx.classification, ctx.grid_points) {
        let tracks = cls.full_span_sorted();
        let track = tracks.get(mode_index).ok_or_else(|| {
            Error::Numeric(format!(
                "only {} full-span tracks, mode index {mode_index} unavailable",
                tracks.len()
            ))
        })?;
        let at = grid.iter().position(|g| {
            g.len() == eps.len()
                && g.iter().zip(eps).all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0))
        });
        if let Some(idx) = at {
            if let Some(w) = track.omegas[idx] {
                return Ok(w);
            }
        }
        return Ok(track.median_omega);
    }
    let dec = modal_decomposition(ctx.model, eps, ModeMethod::Projected)?;
    let mut omegas: Vec<f64> = dec.s.iter().map(|s| s.im).filter(|&w| w > 0.0).collect();
    omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    omegas.get(mode_index).copied().ok_or_else(|| {
        Error::Numeric(format!(
            "only {} positive frequencies, mode index {mode_index} unavailable",
            omegas.len()
        ))
    })
}

fn evaluate_loss_in_context(ctx: &EvalContext<'_>, eps: &[f64], spec: &LossSpec) -> Result<f64> {
    match spec {
        LossSpec::SignalPower { region, window } => {
            let traj = trajectory_at(ctx, eps)?;
            let rows: Vec<usize> = if region.is_empty() {
                (0..traj.states.nrows()).collect()
            } else {
                region.clone()
            };
            for &r in &rows {
                if r >= traj.states.nrows() {
                    return Err(Error::InvalidArgument(format!(
                        "region index {r} out of range for {} signals",
                        traj.states.nrows()
                    )));
                }
            }
            let (a, b) = window_slice(traj.steps(), *window)?;
            let n = (b - a) as f64;
            let sum: f64 = rows
                .iter()
                .map(|&r| {
                    traj.states.row(r).iter().skip(a).take(b - a).map(|v| v * v).sum::<f64>()
                })
                .sum();
            Ok(sum.sqrt() / n)
        }
        LossSpec::EnergyDissipation { baseline_eps, signal, window } => {
            let e_ref = signal_energy(&trajectory_at(ctx, baseline_eps)?, *signal, *window)?;
            if e_ref == 0.0 {
                return Err(Error::Numeric(
                    "baseline trajectory carries no energy; dissipation undefined".into(),
                ));
            }
            let e = signal_energy(&trajectory_at(ctx, eps)?, *signal, *window)?;
            Ok((e_ref - e) / e_ref)
        }
        LossSpec::TargetFrequency { mode_index, omega_target } => {
            Ok((resonant_frequency(ctx, eps, *mode_index)? - omega_target).abs())
        }
        LossSpec::Custom(f) => f(&trajectory_at(ctx, eps)?),
    }
}

/// Evaluates a loss at a single query point.
///
/// Frequency losses are evaluated from the point decomposition here; the
/// grid solver uses dominant-mode tracking instead, which is robust to
/// mode reordering.
pub fn evaluate_loss(
    model: &IdDmdModel,
    eps: &[f64],
    spec: &LossSpec,
    initial: Option<&Array2<f64>>,
    horizon: usize,
) -> Result<f64> {
    let ctx = EvalContext {
        model,
        initial,
        horizon,
        mode_method: ModeMethod::Projected,
        classification: None,
        grid_points: None,
    };
    evaluate_loss_in_context(&ctx, eps, spec)
}

/// One evaluated grid point in the audit table.
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub eps: Vec<f64>,
    pub loss: Option<f64>,
    pub constraint_values: Vec<f64>,
    pub feasible: bool,
    /// Present when the evaluation at this point failed.
    pub error: Option<String>,
}

/// Result of a grid design solve.
#[derive(Debug, Clone, Serialize)]
pub struct DesignResult {
    pub eps_opt: Vec<f64>,
    pub loss_opt: f64,
    pub n_feasible: usize,
    pub table: Vec<GridRow>,
}

fn needs_tracking(spec: &LossSpec) -> bool {
    matches!(spec, LossSpec::TargetFrequency { .. })
}

/// Exhaustively evaluates the problem grid and returns the feasible
/// minimizer; ties break toward the lexicographically smallest parameter
/// vector. The full table is kept for audit.
pub fn solve_design(
    model: &IdDmdModel,
    problem: &DesignProblem,
    initial: Option<&Array2<f64>>,
) -> Result<DesignResult> {
    let points = problem.grid_points()?;
    let track = needs_tracking(&problem.loss)
        || problem.inequality.iter().any(|c| needs_tracking(&c.loss))
        || problem.equality.iter().any(|(c, _)| needs_tracking(&c.loss));
    let classification = if track && points.len() >= 3 {
        Some(classify_modes(model, &points, crate::modal::DEFAULT_DOMINANCE_TOL)?)
    } else {
        None
    };
    let ctx = EvalContext {
        model,
        initial,
        horizon: problem.horizon,
        mode_method: ModeMethod::Projected,
        classification: classification.as_ref(),
        grid_points: Some(&points),
    };

    let evaluate_point = |eps: &Vec<f64>| -> GridRow {
        let mut constraint_values = Vec::new();
        let mut feasible = true;
        for c in &problem.inequality {
            match c.value(&ctx, eps) {
                Ok(v) => {
                    feasible &= v <= 0.0;
                    constraint_values.push(v);
                }
                Err(e) => {
                    return GridRow {
                        eps: eps.clone(),
                        loss: None,
                        constraint_values,
                        feasible: false,
                        error: Some(e.to_string()),
                    }
                }
            }
        }
        for (c, tol) in &problem.equality {
            match c.value(&ctx, eps) {
                Ok(v) => {
                    feasible &= v.abs() <= *tol;
                    constraint_values.push(v);
                }
                Err(e) => {
                    return GridRow {
                        eps: eps.clone(),
                        loss: None,
                        constraint_values,
                        feasible: false,
                        error: Some(e.to_string()),
                    }
                }
            }
        }
        match evaluate_loss_in_context(&ctx, eps, &problem.loss) {
            Ok(l) => GridRow {
                eps: eps.clone(),
                loss: Some(l),
                constraint_values,
                feasible,
                error: None,
            },
            Err(e) => GridRow {
                eps: eps.clone(),
                loss: None,
                constraint_values,
                feasible: false,
                error: Some(e.to_string()),
            },
        }
    };
    let table: Vec<GridRow> = points.par_iter().map(evaluate_point).collect();

    let mut best: Option<&GridRow> = None;
    for row in table.iter().filter(|r| r.feasible && r.loss.is_some()) {
        best = match best {
            None => Some(row),
            Some(cur) => {
                let (a, b) = (row.loss.unwrap(), cur.loss.unwrap());
                if a < b || (a == b && lex_less(&row.eps, &cur.eps)) {
                    Some(row)
                } else {
                    Some(cur)
                }
            }
        };
    }
    let n_feasible = table.iter().filter(|r| r.feasible && r.loss.is_some()).count();
    match best {
        Some(row) => Ok(DesignResult {
            eps_opt: row.eps.clone(),
            loss_opt: row.loss.unwrap(),
            n_feasible,
            table,
        }),
        None => {
            // nearest-feasible diagnostics: the point with the smallest
            // worst constraint violation
            let nearest = table
                .iter()
                .filter(|r| r.error.is_none())
                .min_by(|a, b| {
                    violation(a).partial_cmp(&violation(b)).unwrap_or(std::cmp::Ordering::Equal)
                });
            let detail = match nearest {
                Some(r) => format!(
                    "nearest candidate {:?} violates constraints by {:.3e}",
                    r.eps,
                    violation(r)
                ),
                None => "every grid point failed to evaluate".to_string(),
            };
            Err(Error::Infeasible { detail })
        }
    }
}

fn violation(row: &GridRow) -> f64 {
    row.constraint_values.iter().map(|v| v.max(0.0)).fold(0.0, f64::max)
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}
