//! Modal analysis of a fitted operator family: evaluation at a query
//! parameter, eigendecomposition, full-height mode reconstruction,
//! discrete-to-continuous frequency conversion with stability clamping,
//! and dominant/spurious classification across a parameter sweep.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::IdDmdModel;
use crate::linalg;

/// Eigenvalue magnitudes below this are dropped (log undefined).
pub const EIGENVALUE_DROP_TOL: f64 = 1e-12;

/// Default relative frequency-spread tolerance for dominance.
pub const DEFAULT_DOMINANCE_TOL: f64 = 0.02;

/// How full-height modes are reconstructed from reduced eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeMethod {
    /// `Phi = C(eps) W` from the stored exact-mode factors.
    Exact,
    /// `Phi = U W`.
    Projected,
}

/// Reduced operator `At_0 + sum_i eps_i At_i` at a physical query point.
pub fn evaluate_reduced_operator(model: &IdDmdModel, eps: &[f64]) -> Result<Array2<f64>> {
    let scaled = model.scaled_params(eps)?;
    let mut op = model.reduced_ops[0].clone();
    for (i, &e) in scaled.iter().enumerate() {
        op.zip_mut_with(&model.reduced_ops[i + 1], |a, &b| *a += e * b);
    }
    Ok(op)
}

/// Exact-mode factor `C(eps) = C_0 + sum_i eps_i C_i` at a query point.
pub fn evaluate_exact_factor(model: &IdDmdModel, eps: &[f64]) -> Result<Array2<f64>> {
    let scaled = model.scaled_params(eps)?;
    let mut c = model.exact_mode_factors[0].clone();
    for (i, &e) in scaled.iter().enumerate() {
        c.zip_mut_with(&model.exact_mode_factors[i + 1], |a, &b| *a += e * b);
    }
    Ok(c)
}

/// Eigenstructure of the operator family at one query point.
#[derive(Debug, Clone)]
pub struct ModalDecomposition {
    /// Discrete eigenvalues, zero modes dropped.
    pub lambda: Vec<Complex64>,
    /// Reduced eigenvectors, `r_z x r` (one column per kept mode).
    pub w: Array2<Complex64>,
    /// Full-height modes, `m x r`.
    pub phi: Array2<Complex64>,
    /// Continuous frequencies `s_j = sigma_j + i omega_j` (1/seconds),
    /// clamped so `Re(s_j) <= 0`.
    pub s: Vec<Complex64>,
    /// Whether each mode's growth rate was clamped to zero.
    pub clamped: Vec<bool>,
    /// Sampling time used for the discrete-to-continuous conversion.
    pub dt: f64,
}

impl ModalDecomposition {
    pub fn mode_count(&self) -> usize {
        self.lambda.len()
    }

    /// Per-step exponents `log(lambda_j)` with the same clamp applied;
    /// reconstruction uses these directly so no `dt` round trip occurs.
    pub fn per_step_exponents(&self) -> Vec<Complex64> {
        self.lambda
            .iter()
            .map(|l| {
                let mu = l.ln();
                if mu.re > 0.0 {
                    Complex64::new(0.0, mu.im)
                } else {
                    mu
                }
            })
            .collect()
    }

    /// Oscillation frequencies `omega_j` in rad/s.
    pub fn omegas(&self) -> Vec<f64> {
        self.s.iter().map(|s| s.im).collect()
    }

    /// Mode amplitudes for an initial lifted state: `b = Phi^+ psi(x1)`.
    /// Returns the amplitudes and the effective rank of `Phi`.
    pub fn amplitudes(&self, x1_lifted: &Array1<f64>) -> Result<(Array1<Complex64>, usize)> {
        if x1_lifted.len() != self.phi.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "initial state has {} entries, modes have {} rows",
                x1_lifted.len(),
                self.phi.nrows()
            )));
        }
        let rhs: Vec<Complex64> =
            x1_lifted.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        linalg::lstsq_complex(&self.phi, &rhs)
    }
}

/// Eigendecomposition plus mode reconstruction at a physical query point.
pub fn modal_decomposition(
    model: &IdDmdModel,
    eps: &[f64],
    method: ModeMethod,
) -> Result<ModalDecomposition> {
    let op = evaluate_reduced_operator(model, eps)?;
    let (values, vectors) = linalg::eig(&op)?;
    let kept: Vec<usize> = (0..values.len())
        .filter(|&j| values[j].norm() >= EIGENVALUE_DROP_TOL)
        .collect();
    if kept.len() < values.len() {
        log::warn!(
            "dropping {} zero eigenvalue(s) from the decomposition",
            values.len() - kept.len()
        );
    }
    // Deterministic order: |lambda| descending, then omega descending.
    let mut order = kept;
    order.sort_by(|&a, &b| {
        let ka = (values[a].norm(), values[a].im, values[a].re);
        let kb = (values[b].norm(), values[b].im, values[b].re);
        kb.partial_cmp(&ka).expect("finite eigenvalues")
    });

    let r = order.len();
    let mut lambda = Vec::with_capacity(r);
    let mut w = Array2::zeros((op.nrows(), r));
    for (out, &j) in order.iter().enumerate() {
        lambda.push(values[j]);
        w.column_mut(out).assign(&vectors.column(j));
    }
    let phi_basis = match method {
        ModeMethod::Exact => evaluate_exact_factor(model, eps)?,
        ModeMethod::Projected => model.u.clone(),
    };
    let phi_basis_c = phi_basis.mapv(|v| Complex64::new(v, 0.0));
    let phi = phi_basis_c.dot(&w);

    let dt = model.dt;
    let mut s = Vec::with_capacity(r);
    let mut clamped = Vec::with_capacity(r);
    for l in &lambda {
        let raw = l.ln() / dt;
        if raw.re > 0.0 {
            s.push(Complex64::new(0.0, raw.im));
            clamped.push(true);
        } else {
            s.push(raw);
            clamped.push(false);
        }
    }
    Ok(ModalDecomposition { lambda, w, phi, s, clamped, dt })
}

/// Dominant/spurious label for one tracked mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeLabel {
    Dominant,
    Spurious,
}

/// One frequency track across the parameter sweep.
#[derive(Debug, Clone)]
pub struct ModeTrack {
    /// Frequency at each grid point; `None` where the track had no match.
    pub omegas: Vec<Option<f64>>,
    /// Median frequency over the matched points.
    pub median_omega: f64,
    /// Max deviation `|omega - median|` over the matched points.
    pub spread: f64,
    pub label: ModeLabel,
}

/// Classification of every tracked mode over a sweep.
#[derive(Debug, Clone)]
pub struct ModeClassification {
    pub tracks: Vec<ModeTrack>,
    /// Tolerance used: a full-sweep track is dominant iff
    /// `spread <= tol_rel * |median|`.
    pub tol_rel: f64,
}

impl ModeClassification {
    pub fn dominant(&self) -> impl Iterator<Item = &ModeTrack> {
        self.tracks.iter().filter(|t| t.label == ModeLabel::Dominant)
    }

    /// Dominant tracks sorted by median frequency ascending.
    pub fn dominant_sorted(&self) -> Vec<&ModeTrack> {
        let mut d: Vec<&ModeTrack> = self.dominant().collect();
        d.sort_by(|a, b| a.median_omega.partial_cmp(&b.median_omega).unwrap());
        d
    }

    /// Tracks matched at every grid point, sorted by median frequency
    /// ascending. These carry mode identity across the sweep whether or
    /// not the frequency itself stays put (a designed-for resonance
    /// moves on purpose).
    pub fn full_span_sorted(&self) -> Vec<&ModeTrack> {
        let mut d: Vec<&ModeTrack> = self
            .tracks
            .iter()
            .filter(|t| t.omegas.iter().all(|w| w.is_some()))
            .collect();
        d.sort_by(|a, b| a.median_omega.partial_cmp(&b.median_omega).unwrap());
        d
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Eigenvalues this much smaller than the spectral radius are numerical
/// leftovers (e.g. of a nilpotent delay block) whose angles carry no
/// frequency information; tracking skips them.
const TRACKING_MAGNITUDE_FLOOR: f64 = 1e-3;

/// Non-negative-frequency representatives at each grid point.
fn representative_omegas(
    model: &IdDmdModel,
    eps_grid: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    eps_grid
        .iter()
        .map(|eps| {
            let dec = modal_decomposition(model, eps, ModeMethod::Projected)?;
            let radius = dec.lambda.iter().map(|l| l.norm()).fold(0.0, f64::max);
            let mut omegas: Vec<f64> = dec
                .s
                .iter()
                .zip(&dec.lambda)
                .filter(|(s, l)| s.im >= 0.0 && l.norm() >= TRACKING_MAGNITUDE_FLOOR * radius)
                .map(|(s, _)| s.im)
                .collect();
            omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Ok(omegas)
        })
        .collect()
}

/// Greedy nearest-frequency matching: assigns candidates at `point` to the
/// tracks alive at `prev`, smallest distance first; unmatched candidates
/// open new tracks.
fn match_point(
    tracks: &mut Vec<Vec<Option<f64>>>,
    candidates: &[f64],
    point: usize,
    prev: usize,
    n_points: usize,
) {
    let alive: Vec<usize> =
        (0..tracks.len()).filter(|&t| tracks[t][prev].is_some()).collect();
    let mut dist: Vec<(f64, usize, usize)> = Vec::new();
    for &t in &alive {
        let w_t = tracks[t][prev].unwrap();
        for (c, &w_c) in candidates.iter().enumerate() {
            dist.push(((w_t - w_c).abs(), t, c));
        }
    }
    dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut track_used = vec![false; tracks.len()];
    let mut cand_used = vec![false; candidates.len()];
    for &(_, t, c) in &dist {
        if !track_used[t] && !cand_used[c] {
            track_used[t] = true;
            cand_used[c] = true;
            tracks[t][point] = Some(candidates[c]);
        }
    }
    for (c, &used) in cand_used.iter().enumerate() {
        if !used {
            let mut fresh = vec![None; n_points];
            fresh[point] = Some(candidates[c]);
            tracks.push(fresh);
        }
    }
}

/// Tracks modes across a sweep and labels each track dominant or spurious.
///
/// Matching is greedy nearest-frequency, growing outward from the grid
/// midpoint. A track is dominant only when it spans the whole sweep and its
/// frequency spread stays within `tol_rel` of the median; partial tracks
/// are spurious by construction.
pub fn classify_modes(
    model: &IdDmdModel,
    eps_grid: &[Vec<f64>],
    tol_rel: f64,
) -> Result<ModeClassification> {
    let n_points = eps_grid.len();
    if n_points < 3 {
        return Err(Error::InvalidArgument(format!(
            "mode classification needs at least 3 grid points, got {n_points}"
        )));
    }
    if tol_rel < 0.0 {
        return Err(Error::InvalidArgument("tol_rel must be non-negative".into()));
    }
    let omegas = representative_omegas(model, eps_grid)?;
    if omegas.iter().all(|w| w.is_empty()) {
        return Err(Error::Numeric("all decompositions are empty".into()));
    }
    let mid = n_points / 2;
    let mut tracks: Vec<Vec<Option<f64>>> = omegas[mid]
        .iter()
        .map(|&w| {
            let mut t = vec![None; n_points];
            t[mid] = Some(w);
            t
        })
        .collect();
    for g in mid + 1..n_points {
        match_point(&mut tracks, &omegas[g], g, g - 1, n_points);
    }
    for g in (0..mid).rev() {
        match_point(&mut tracks, &omegas[g], g, g + 1, n_points);
    }

    let labeled = tracks
        .into_iter()
        .map(|omegas| {
            let mut values: Vec<f64> = omegas.iter().flatten().copied().collect();
            let med = median(&mut values);
            let spread = omegas
                .iter()
                .flatten()
                .map(|w| (w - med).abs())
                .fold(0.0, f64::max);
            let full_span = omegas.iter().all(|w| w.is_some());
            // the 1e-12 relative floor absorbs eigensolver round-off so a
            // mathematically fixed frequency counts as dominant at tol 0
            let label = if full_span && spread <= (tol_rel + 1e-12) * med.abs() {
                ModeLabel::Dominant
            } else {
                ModeLabel::Spurious
            };
            ModeTrack { omegas, median_omega: med, spread, label }
        })
        .collect();
    Ok(ModeClassification { tracks: labeled, tol_rel })
}
