//! Koopman lifting: polynomial + time-delay observables.
//!
//! A raw snapshot matrix with `base_dim` signals is mapped to the vector of
//! all monomials of total degree `1..=max_degree` in the delayed signals
//! `x_i(k), x_i(k-1), ..., x_i(k-d)` (signal-major order), optionally
//! preceded by a constant row. Monomials are enumerated in a fixed graded
//! order: total degree ascending, and within a degree the exponent of an
//! earlier signal decreases last, which reproduces the conventional listing
//! `[y(k), y(k-1), y^2(k), y(k)y(k-1), y^2(k-1), ...]`.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snapshots::{SnapshotRecord, SnapshotSet};

/// Lifting specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservableConfig {
    /// Number of physical signals in the raw data.
    pub base_dim: usize,
    /// Number of delayed copies appended to each signal.
    pub delay_depth: usize,
    /// Total polynomial degree cap (>= 1).
    pub max_degree: u32,
    /// Whether a constant observable row is prepended.
    pub include_constant: bool,
}

impl ObservableConfig {
    /// The identity lifting: degree one, no delays, no constant.
    pub fn identity(base_dim: usize) -> Self {
        ObservableConfig { base_dim, delay_depth: 0, max_degree: 1, include_constant: false }
    }

    pub fn is_identity(&self) -> bool {
        self.delay_depth == 0 && self.max_degree == 1 && !self.include_constant
    }

    /// Number of delayed signals `v = base_dim * (delay_depth + 1)`.
    pub fn signal_count(&self) -> usize {
        self.base_dim * (self.delay_depth + 1)
    }

    /// Dimension of the lifted state:
    /// `C(max_degree + v, v) - 1`, plus one for the constant.
    pub fn lifted_dim(&self) -> usize {
        let v = self.signal_count();
        let monomials = binomial(self.max_degree as usize + v, v) - 1;
        monomials + usize::from(self.include_constant)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_dim == 0 {
            return Err(Error::InvalidArgument("base_dim must be positive".into()));
        }
        if self.max_degree == 0 {
            return Err(Error::InvalidArgument("max_degree must be at least 1".into()));
        }
        Ok(())
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Exponent vectors over the delayed signals, in lifting row order.
///
/// The optional constant row is represented by the all-zero vector.
pub fn monomial_exponents(cfg: &ObservableConfig) -> Vec<Vec<u32>> {
    let v = cfg.signal_count();
    let mut out = Vec::with_capacity(cfg.lifted_dim());
    if cfg.include_constant {
        out.push(vec![0; v]);
    }
    let mut current = vec![0u32; v];
    for degree in 1..=cfg.max_degree {
        emit_degree(&mut out, &mut current, degree, 0, v);
    }
    out
}

fn emit_degree(out: &mut Vec<Vec<u32>>, current: &mut [u32], remaining: u32, pos: usize, v: usize) {
    if pos == v - 1 {
        current[pos] = remaining;
        out.push(current.to_vec());
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        emit_degree(out, current, remaining - e, pos + 1, v);
    }
    current[pos] = 0;
}

/// A lifted snapshot set plus the exponent vector of every row.
#[derive(Debug, Clone)]
pub struct LiftedSet {
    pub set: SnapshotSet,
    pub monomials: Vec<Vec<u32>>,
}

/// Values of the delayed signal vector at original time `t >= delay_depth`.
fn signal_values(states: &ArrayView2<f64>, cfg: &ObservableConfig, t: usize, out: &mut [f64]) {
    let d = cfg.delay_depth;
    for i in 0..cfg.base_dim {
        for delta in 0..=d {
            out[i * (d + 1) + delta] = states[(i, t - delta)];
        }
    }
}

fn eval_monomials(signals: &[f64], monomials: &[Vec<u32>], out: &mut [f64]) {
    for (row, expo) in monomials.iter().enumerate() {
        let mut acc = 1.0;
        for (s, &e) in expo.iter().enumerate() {
            if e > 0 {
                acc *= signals[s].powi(e as i32);
            }
        }
        out[row] = acc;
    }
}

/// Lifts one raw record; the output has `n - delay_depth` columns, the first
/// `delay_depth` snapshots being consumed as history.
pub fn lift_record(states: &ArrayView2<f64>, cfg: &ObservableConfig) -> Result<Array2<f64>> {
    cfg.validate()?;
    if states.nrows() != cfg.base_dim {
        return Err(Error::DimensionMismatch(format!(
            "record has {} signals, config expects {}",
            states.nrows(),
            cfg.base_dim
        )));
    }
    let d = cfg.delay_depth;
    let n = states.ncols();
    if n < d + 2 {
        return Err(Error::InvalidArgument(format!(
            "record with {n} snapshots too short for delay depth {d} (needs {})",
            d + 2
        )));
    }
    let monomials = monomial_exponents(cfg);
    let mut lifted = Array2::zeros((monomials.len(), n - d));
    let mut signals = vec![0.0; cfg.signal_count()];
    let mut column = vec![0.0; monomials.len()];
    for (k, t) in (d..n).enumerate() {
        signal_values(states, cfg, t, &mut signals);
        eval_monomials(&signals, &monomials, &mut column);
        lifted.column_mut(k).assign(&Array1::from_vec(column.clone()));
    }
    Ok(lifted)
}

/// Lifts a single snapshot given its `delay_depth + 1` raw history columns
/// (oldest first, current last).
pub fn lift_window(window: &ArrayView2<f64>, cfg: &ObservableConfig) -> Result<Array1<f64>> {
    cfg.validate()?;
    if window.nrows() != cfg.base_dim {
        return Err(Error::DimensionMismatch(format!(
            "window has {} signals, config expects {}",
            window.nrows(),
            cfg.base_dim
        )));
    }
    if window.ncols() != cfg.delay_depth + 1 {
        return Err(Error::DimensionMismatch(format!(
            "initial window has {} snapshots, delay depth {} needs {}",
            window.ncols(),
            cfg.delay_depth,
            cfg.delay_depth + 1
        )));
    }
    let monomials = monomial_exponents(cfg);
    let mut signals = vec![0.0; cfg.signal_count()];
    signal_values(window, cfg, cfg.delay_depth, &mut signals);
    let mut out = vec![0.0; monomials.len()];
    eval_monomials(&signals, &monomials, &mut out);
    Ok(Array1::from_vec(out))
}

/// Applies the polynomial/delay lifting to every record of a set.
pub fn polynomial_delay_lift(set: &SnapshotSet, cfg: &ObservableConfig) -> Result<LiftedSet> {
    cfg.validate()?;
    set.validate()?;
    if set.state_dim() != cfg.base_dim {
        return Err(Error::DimensionMismatch(format!(
            "set has {} signals, config expects {}",
            set.state_dim(),
            cfg.base_dim
        )));
    }
    let monomials = monomial_exponents(cfg);
    let mut records = Vec::with_capacity(set.records.len());
    for (idx, rec) in set.records.iter().enumerate() {
        let states = lift_record(&rec.states.view(), cfg)
            .map_err(|e| Error::Record { record: idx, detail: e.to_string() })?;
        records.push(SnapshotRecord { params: rec.params.clone(), states });
    }
    let lifted = SnapshotSet::new(records, set.dt, set.param_names.clone(), None)?;
    Ok(LiftedSet { set: lifted, monomials })
}

/// Row indices of the degree-one, zero-delay monomials in signal order.
pub fn physical_rows(cfg: &ObservableConfig) -> Vec<usize> {
    let monomials = monomial_exponents(cfg);
    let d = cfg.delay_depth;
    (0..cfg.base_dim)
        .map(|i| {
            let signal = i * (d + 1);
            monomials
                .iter()
                .position(|e| {
                    e.iter().enumerate().all(|(s, &x)| if s == signal { x == 1 } else { x == 0 })
                })
                .expect("degree-one monomial always present")
        })
        .collect()
}

/// Projects a lifted trajectory back to the physical signals.
pub fn extract_physical_states(lifted: &ArrayView2<f64>, cfg: &ObservableConfig) -> Result<Array2<f64>> {
    if lifted.nrows() != cfg.lifted_dim() {
        return Err(Error::DimensionMismatch(format!(
            "lifted trajectory has {} rows, config expects {}",
            lifted.nrows(),
            cfg.lifted_dim()
        )));
    }
    let rows = physical_rows(cfg);
    let mut out = Array2::zeros((cfg.base_dim, lifted.ncols()));
    for (i, &r) in rows.iter().enumerate() {
        out.row_mut(i).assign(&lifted.row(r));
    }
    Ok(out)
}
