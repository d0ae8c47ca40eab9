//! Trajectory reconstruction from a modal decomposition and validation
//! error metrics.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fit::IdDmdModel;
use crate::modal::{modal_decomposition, ModeMethod};
use crate::observables::{extract_physical_states, lift_window};

/// Residue threshold: the reconstruction's imaginary part must stay below
/// this fraction of the largest state magnitude.
pub const IMAG_RESIDUE_TOL: f64 = 1e-6;

/// A reconstructed (physical) trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `base_dim x K` real states.
    pub states: Array2<f64>,
    /// Time of each column relative to the initial snapshot, `k * dt`.
    pub times: Vec<f64>,
    /// Query parameters the trajectory was generated at.
    pub eps: Vec<f64>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.states.ncols()
    }
}

/// Reconstructs `K` steps from an initial condition.
///
/// `initial` holds the first `delay_depth + 1` raw snapshots
/// (`base_dim x (delay_depth + 1)`, oldest column first); for identity
/// observables that is a single column. The first reconstructed column
/// corresponds to the time of the last initial snapshot.
pub fn reconstruct_trajectory(
    model: &IdDmdModel,
    eps: &[f64],
    initial: &ArrayView2<f64>,
    steps: usize,
    method: ModeMethod,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let cfg = &model.observables;
    if initial.nrows() != cfg.base_dim {
        return Err(Error::DimensionMismatch(format!(
            "initial state has {} signals, model expects {}",
            initial.nrows(),
            cfg.base_dim
        )));
    }
    let x1 = lift_window(initial, cfg)?;
    let dec = modal_decomposition(model, eps, method)?;
    if dec.mode_count() == 0 {
        return Err(Error::Numeric("no usable modes in the decomposition".into()));
    }
    let (b, rank) = dec.amplitudes(&x1)?;
    if rank < dec.mode_count() {
        log::warn!(
            "mode matrix is rank deficient ({rank} < {}); using the minimum-norm amplitudes",
            dec.mode_count()
        );
    }
    let mu = dec.per_step_exponents();
    let growth: Vec<Complex64> = mu.iter().map(|m| m.exp()).collect();

    // coeff_k = exp(mu k) .* b, advanced one step at a time
    let r = dec.mode_count();
    let mut coeff = b;
    let mut lifted = Array2::<Complex64>::zeros((dec.phi.nrows(), steps));
    for k in 0..steps {
        let col = dec.phi.dot(&coeff);
        lifted.column_mut(k).assign(&col);
        if k + 1 < steps {
            for j in 0..r {
                coeff[j] *= growth[j];
            }
        }
    }

    let max_abs = lifted.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let max_imag = lifted.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_abs > 0.0 && max_imag > IMAG_RESIDUE_TOL * max_abs {
        return Err(Error::Numeric(format!(
            "imaginary residue {max_imag:.3e} exceeds {IMAG_RESIDUE_TOL:.0e} of the state \
             scale {max_abs:.3e}; the mode set is not conjugate-symmetric"
        )));
    }
    let lifted_real = lifted.mapv(|z| z.re);
    let states = extract_physical_states(&lifted_real.view(), cfg)?;
    let times = (0..steps).map(|k| k as f64 * model.dt).collect();
    Ok(Trajectory { states, times, eps: eps.to_vec() })
}

/// Per-step relative error (percent) and its time mean.
///
/// `eta_k = max_i |pred[i,k] - truth[i,k]| / max|truth| * 100`, the maximum
/// taken over the whole truth record; the total is the mean of `eta_k`
/// over time.
pub fn relative_error(pred: &Trajectory, truth: &Trajectory) -> Result<(Vec<f64>, f64)> {
    if pred.states.dim() != truth.states.dim() {
        return Err(Error::DimensionMismatch(format!(
            "prediction is {:?}, truth is {:?}",
            pred.states.dim(),
            truth.states.dim()
        )));
    }
    let scale = truth.states.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::InvalidArgument(
            "truth trajectory is identically zero; relative error undefined".into(),
        ));
    }
    let k = truth.states.ncols();
    let mut eta = Vec::with_capacity(k);
    for j in 0..k {
        let step_max = pred
            .states
            .column(j)
            .iter()
            .zip(truth.states.column(j).iter())
            .map(|(p, t)| (p - t).abs())
            .fold(0.0, f64::max);
        eta.push(step_max / scale * 100.0);
    }
    let total = eta.iter().sum::<f64>() / k as f64;
    Ok((eta, total))
}
