//! Scalar nonlinear oscillators: Van der Pol and the cubic-damped system.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::snapshots::SnapshotRecord;

use super::rk4_integrate;

/// `x'' - mu (1 - x^2) x' + omega_bar x = 0` from `x(0)=0.1, x'(0)=0`.
#[derive(Debug, Clone, PartialEq)]
pub struct VanDerPol {
    pub mu: f64,
    pub omega_bar: f64,
}

/// Displacement trajectory of the Van der Pol oscillator, `1 x (n+1)`.
pub fn simulate_vanderpol(vdp: &VanDerPol, horizon: f64, dt: f64) -> Result<SnapshotRecord> {
    if !(dt > 0.0 && horizon >= dt) {
        return Err(Error::InvalidArgument("need horizon >= dt > 0".into()));
    }
    let (mu, om) = (vdp.mu, vdp.omega_bar);
    let n_steps = (horizon / dt).round() as usize;
    let mut states = Array2::zeros((1, n_steps + 1));
    let rhs = move |s: &[f64], out: &mut [f64]| {
        out[0] = s[1];
        out[1] = mu * (1.0 - s[0] * s[0]) * s[1] - om * s[0];
    };
    rk4_integrate(vec![0.1, 0.0], n_steps, dt, 4, rhs, |step, s| {
        states[(0, step)] = s[0];
    })?;
    Ok(SnapshotRecord { params: vec![], states })
}

/// `y'' + c_lin y' + k y + c3 (y')^3 = 0`.
///
/// Defaults mirror the cubic-damped benchmark: unit-frequency-squared
/// stiffness 100 (10 rad/s), light linear damping 0.03, release from
/// `y(0) = 0.01`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicOscillator {
    pub c3: f64,
    pub linear_damping: f64,
    pub stiffness: f64,
    pub y0: f64,
}

impl CubicOscillator {
    pub fn new(c3: f64) -> Self {
        CubicOscillator { c3, linear_damping: 0.03, stiffness: 100.0, y0: 0.01 }
    }
}

/// Displacement trajectory of the cubic-damped oscillator, `1 x (n+1)`.
pub fn simulate_cubic_damped(
    osc: &CubicOscillator,
    horizon: f64,
    dt: f64,
) -> Result<SnapshotRecord> {
    if !(dt > 0.0 && horizon >= dt) {
        return Err(Error::InvalidArgument("need horizon >= dt > 0".into()));
    }
    let (c3, cl, k) = (osc.c3, osc.linear_damping, osc.stiffness);
    let n_steps = (horizon / dt).round() as usize;
    let mut states = Array2::zeros((1, n_steps + 1));
    let rhs = move |s: &[f64], out: &mut [f64]| {
        out[0] = s[1];
        out[1] = -cl * s[1] - k * s[0] - c3 * s[1] * s[1] * s[1];
    };
    rk4_integrate(vec![osc.y0, 0.0], n_steps, dt, 8, rhs, |step, s| {
        states[(0, step)] = s[0];
    })?;
    Ok(SnapshotRecord { params: vec![], states })
}
