//! Reference simulators: training-data generators and validation oracles.
//!
//! All simulators are pure functions of their configuration and seed. The
//! nonlinear systems integrate with fixed-step classical Runge-Kutta on an
//! internal substep grid; the linear building additionally offers the exact
//! central-difference scheme whose discrete operator is linear in the
//! bottom stiffness.

mod building;
mod burgers;
mod oscillators;
mod parametric;

pub use building::{
    central_difference_frequencies, simulate_building, undamped_natural_frequencies,
    BuildingParams, BuildingScheme,
};
pub use burgers::{sample_grf, simulate_burgers, BurgersConfig};
pub use oscillators::{simulate_cubic_damped, simulate_vanderpol, CubicOscillator, VanDerPol};
pub use parametric::{
    generate_trajectories, inject_noise, rotation_block_family,
    simulate_random_parametric_linear, RandLinConfig,
};

use crate::error::{Error, Result};

/// State-norm blowup factor that aborts a simulation.
pub const INSTABILITY_LIMIT: f64 = 1e6;

/// Fixed-step RK4 over `n_out` output steps of size `dt`, each split into
/// `substeps` internal steps. `state` starts at the initial condition;
/// `emit` receives the state after every output step (and once at the
/// start). Aborts when the state norm exceeds `INSTABILITY_LIMIT` times
/// `max(initial norm, 1)`.
pub(crate) fn rk4_integrate<F, E>(
    mut state: Vec<f64>,
    n_out: usize,
    dt: f64,
    substeps: usize,
    rhs: F,
    mut emit: E,
) -> Result<()>
where
    F: Fn(&[f64], &mut [f64]),
    E: FnMut(usize, &[f64]),
{
    let dim = state.len();
    let norm0 = state.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let h = dt / substeps as f64;
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    emit(0, &state);
    for step in 1..=n_out {
        for _ in 0..substeps {
            rhs(&state, &mut k1);
            for i in 0..dim {
                tmp[i] = state[i] + 0.5 * h * k1[i];
            }
            rhs(&tmp, &mut k2);
            for i in 0..dim {
                tmp[i] = state[i] + 0.5 * h * k2[i];
            }
            rhs(&tmp, &mut k3);
            for i in 0..dim {
                tmp[i] = state[i] + h * k3[i];
            }
            rhs(&tmp, &mut k4);
            for i in 0..dim {
                state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        let norm = state.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > INSTABILITY_LIMIT * norm0 {
            return Err(Error::Unstable { step, limit: INSTABILITY_LIMIT * norm0 });
        }
        emit(step, &state);
    }
    Ok(())
}
