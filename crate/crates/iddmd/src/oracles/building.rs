//! Four-story building: free vibration with an optional cubic damper
//! between floors two and three.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg;
use crate::snapshots::SnapshotRecord;

use super::{rk4_integrate, INSTABILITY_LIMIT};

/// Physical parameters of the 4-DoF building.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildingParams {
    /// Floor masses, kg.
    pub masses: [f64; 4],
    /// Inter-floor stiffnesses, N/m; `stiffnesses[0]` is the bottom spring.
    pub stiffnesses: [f64; 4],
    /// Linear inter-floor dampers, N m/s.
    pub dampers: [f64; 4],
    /// Cubic damper between floors 2 and 3, N m^3/s^3.
    pub c_non: f64,
    /// Initial displacements, m.
    pub x0: [f64; 4],
    /// Initial velocities, m/s.
    pub v0: [f64; 4],
}

impl Default for BuildingParams {
    fn default() -> Self {
        BuildingParams {
            masses: [5e6, 4e6, 3e6, 2e6],
            stiffnesses: [1500e6, 2000e6, 3000e6, 1000e6],
            dampers: [1e5, 1e5, 1e5, 1e5],
            c_non: 0.0,
            x0: [1.0, 0.0, 0.0, 0.0],
            v0: [0.0; 4],
        }
    }
}

impl BuildingParams {
    /// Same building with the bottom stiffness replaced (the pole-placement
    /// design parameter).
    pub fn with_bottom_stiffness(mut self, ks: f64) -> Self {
        self.stiffnesses[0] = ks;
        self
    }

    pub fn with_cubic_damper(mut self, c_non: f64) -> Self {
        self.c_non = c_non;
        self
    }

    fn validate(&self) -> Result<()> {
        for &m in &self.masses {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidArgument("masses must be positive".into()));
            }
        }
        for &k in &self.stiffnesses {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::InvalidArgument("stiffnesses must be positive".into()));
            }
        }
        Ok(())
    }

    /// Tridiagonal stiffness matrix.
    pub fn stiffness_matrix(&self) -> Array2<f64> {
        let k = &self.stiffnesses;
        ndarray::array![
            [k[0] + k[1], -k[1], 0.0, 0.0],
            [-k[1], k[1] + k[2], -k[2], 0.0],
            [0.0, -k[2], k[2] + k[3], -k[3]],
            [0.0, 0.0, -k[3], k[3]]
        ]
    }

    /// Tridiagonal damping matrix.
    pub fn damping_matrix(&self) -> Array2<f64> {
        let c = &self.dampers;
        ndarray::array![
            [c[0] + c[1], -c[1], 0.0, 0.0],
            [-c[1], c[1] + c[2], -c[2], 0.0],
            [0.0, -c[2], c[2] + c[3], -c[3]],
            [0.0, 0.0, -c[3], c[3]]
        ]
    }
}

/// Time-stepping scheme of the building simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildingScheme {
    /// Exact central-difference recurrence; the discrete operator is
    /// linear in the bottom stiffness. Linear dampers only.
    CentralDifference,
    /// Classical RK4 on the continuous equations of motion; required when
    /// the cubic damper is active.
    RungeKutta,
}

/// Free-vibration displacement response, 4 x (n_steps + 1).
///
/// Stability: the central difference scheme needs `dt < 2 / omega_max`;
/// with the default parameters `omega_max` is below 50 rad/s, so sampling
/// rates of 1/64 s and faster are safe.
pub fn simulate_building(
    params: &BuildingParams,
    horizon: f64,
    dt: f64,
    scheme: BuildingScheme,
) -> Result<SnapshotRecord> {
    params.validate()?;
    if !(dt > 0.0 && horizon >= dt) {
        return Err(Error::InvalidArgument("need horizon >= dt > 0".into()));
    }
    let n_steps = (horizon / dt).round() as usize;
    let states = match scheme {
        BuildingScheme::CentralDifference => {
            if params.c_non != 0.0 {
                return Err(Error::InvalidArgument(
                    "central difference handles the linear building only; \
                     use the Runge-Kutta scheme for a nonzero cubic damper"
                        .into(),
                ));
            }
            central_difference(params, n_steps, dt)?
        }
        BuildingScheme::RungeKutta => runge_kutta(params, n_steps, dt)?,
    };
    Ok(SnapshotRecord { params: vec![], states })
}

/// `x(k) = F1 x(k-1) + F2 x(k-2)` with `F1 = M^-1 (2M - dt C - dt^2 K)`
/// and `F2 = M^-1 (dt C - M)`; backward-difference velocity start
/// `x(-1) = x(0) - dt v(0)`.
fn central_difference(params: &BuildingParams, n_steps: usize, dt: f64) -> Result<Array2<f64>> {
    let k = params.stiffness_matrix();
    let c = params.damping_matrix();
    let m = &params.masses;
    let mut f1 = Array2::zeros((4, 4));
    let mut f2 = Array2::zeros((4, 4));
    for i in 0..4 {
        for j in 0..4 {
            let two_m = if i == j { 2.0 * m[i] } else { 0.0 };
            f1[(i, j)] = (two_m - dt * c[(i, j)] - dt * dt * k[(i, j)]) / m[i];
            let neg_m = if i == j { -m[i] } else { 0.0 };
            f2[(i, j)] = (dt * c[(i, j)] + neg_m) / m[i];
        }
    }
    let mut states = Array2::zeros((4, n_steps + 1));
    let x0 = Array1::from(params.x0.to_vec());
    let xm1 = &x0 - &(Array1::from(params.v0.to_vec()) * dt);
    states.column_mut(0).assign(&x0);
    let norm0 = x0.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let mut prev = xm1;
    for step in 1..=n_steps {
        let cur = states.column(step - 1).to_owned();
        let next = f1.dot(&cur) + f2.dot(&prev);
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > INSTABILITY_LIMIT * norm0 {
            return Err(Error::Unstable { step, limit: INSTABILITY_LIMIT * norm0 });
        }
        states.column_mut(step).assign(&next);
        prev = cur;
    }
    Ok(states)
}

fn runge_kutta(params: &BuildingParams, n_steps: usize, dt: f64) -> Result<Array2<f64>> {
    let kmat = params.stiffness_matrix();
    let cmat = params.damping_matrix();
    let m = params.masses;
    let c_non = params.c_non;
    let rhs = move |s: &[f64], out: &mut [f64]| {
        let (x, v) = s.split_at(4);
        // nonlinear damper force on floors 2 and 3
        let rel = v[2] - v[1];
        let f_non = c_non * rel * rel * rel;
        for i in 0..4 {
            out[i] = v[i];
            let mut acc = 0.0;
            for j in 0..4 {
                acc -= cmat[(i, j)] * v[j] + kmat[(i, j)] * x[j];
            }
            if i == 1 {
                acc += f_non;
            } else if i == 2 {
                acc -= f_non;
            }
            out[4 + i] = acc / m[i];
        }
    };
    let mut init = Vec::with_capacity(8);
    init.extend_from_slice(&params.x0);
    init.extend_from_slice(&params.v0);
    let mut states = Array2::zeros((4, n_steps + 1));
    rk4_integrate(init, n_steps, dt, 8, rhs, |step, s| {
        for i in 0..4 {
            states[(i, step)] = s[i];
        }
    })?;
    Ok(states)
}

/// Undamped natural frequencies from the dense generalized eigenproblem
/// `K phi = omega^2 M phi`, ascending, rad/s.
pub fn undamped_natural_frequencies(params: &BuildingParams) -> Result<[f64; 4]> {
    let k = params.stiffness_matrix();
    let mut mk = k;
    for i in 0..4 {
        for j in 0..4 {
            mk[(i, j)] /= params.masses[i];
        }
    }
    let (values, _) = linalg::eig(&mk)?;
    let mut w: Vec<f64> = values.iter().map(|l| l.re.max(0.0).sqrt()).collect();
    w.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok([w[0], w[1], w[2], w[3]])
}

/// Oscillation frequencies of the central-difference propagator, computed
/// from the dense eigenproblem of its companion form; ascending, rad/s.
///
/// This is the ground truth for what frequencies the sampled data can
/// contain at sampling time `dt`.
pub fn central_difference_frequencies(params: &BuildingParams, dt: f64) -> Result<Vec<f64>> {
    let k = params.stiffness_matrix();
    let c = params.damping_matrix();
    let m = &params.masses;
    let mut companion = Array2::zeros((8, 8));
    for i in 0..4 {
        for j in 0..4 {
            let two_m = if i == j { 2.0 * m[i] } else { 0.0 };
            companion[(i, j)] = (two_m - dt * c[(i, j)] - dt * dt * k[(i, j)]) / m[i];
            let neg_m = if i == j { -m[i] } else { 0.0 };
            companion[(i, 4 + j)] = (dt * c[(i, j)] + neg_m) / m[i];
        }
        companion[(4 + i, i)] = 1.0;
    }
    let (values, _) = linalg::eig(&companion)?;
    let mut w: Vec<f64> = values
        .iter()
        .filter(|l| l.norm() > 1e-12)
        .map(|l| (l.ln().im / dt).abs())
        .filter(|&w| w > 1e-9)
        .collect();
    w.sort_by(|a, b| a.partial_cmp(b).unwrap());
    w.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
    Ok(w)
}
