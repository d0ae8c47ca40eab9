//! Synthetic parametric linear fixtures and the measurement-noise injector.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;
use crate::snapshots::{SnapshotRecord, SnapshotSet};

/// Configuration of the random parametric linear generator.
#[derive(Debug, Clone)]
pub struct RandLinConfig {
    pub state_dim: usize,
    pub param_dim: usize,
    /// Worst-case spectral radius of `A(eps)` over the unit box corners.
    pub spectral_radius: f64,
    pub seed: u64,
    /// Training points in `[0, 1]^P`; defaults to the box corners plus the
    /// centroid.
    pub eps_grid: Option<Vec<Vec<f64>>>,
    pub records_per_point: usize,
    pub record_len: usize,
}

impl RandLinConfig {
    pub fn new(state_dim: usize, param_dim: usize, spectral_radius: f64, seed: u64) -> Self {
        RandLinConfig {
            state_dim,
            param_dim,
            spectral_radius,
            seed,
            eps_grid: None,
            records_per_point: 2,
            record_len: 4 * state_dim.max(2),
        }
    }

    fn grid(&self) -> Vec<Vec<f64>> {
        if let Some(g) = &self.eps_grid {
            return g.clone();
        }
        let p = self.param_dim;
        let mut points: Vec<Vec<f64>> = (0..1usize << p)
            .map(|mask| (0..p).map(|i| ((mask >> i) & 1) as f64).collect())
            .collect();
        if p > 0 {
            points.push(vec![0.5; p]);
        }
        points
    }
}

fn spectral_radius(a: &Array2<f64>) -> f64 {
    let (values, _) = linalg::eig(a).expect("eigendecomposition of a finite matrix");
    values.iter().map(|l| l.norm()).fold(0.0, f64::max)
}

/// Draws a random operator family `A_0..A_P`, rescaled so the spectral
/// radius of `A(eps)` over the corners of `[0, 1]^P` equals the target,
/// and integrates trajectories from random initial states.
pub fn simulate_random_parametric_linear(
    cfg: &RandLinConfig,
) -> Result<(Vec<Array2<f64>>, SnapshotSet)> {
    if cfg.state_dim == 0 {
        return Err(Error::InvalidArgument("state_dim must be positive".into()));
    }
    if !(cfg.spectral_radius >= 0.0 && cfg.spectral_radius < 1.0) {
        return Err(Error::InvalidArgument(
            "spectral_radius must lie in [0, 1) so trajectories stay bounded".into(),
        ));
    }
    if cfg.record_len < 2 {
        return Err(Error::InvalidArgument("record_len must be at least 2".into()));
    }
    let m = cfg.state_dim;
    let p = cfg.param_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut operators: Vec<Array2<f64>> = (0..=p)
        .map(|_| Array2::from_shape_fn((m, m), |_| rng.gen_range(-1.0..1.0)))
        .collect();
    // normalize each matrix, then rescale the family jointly
    for a in operators.iter_mut() {
        let r = spectral_radius(a);
        if r > 0.0 {
            a.mapv_inplace(|v| v / r);
        }
    }
    let mut worst = 0.0f64;
    for mask in 0..1usize << p {
        let mut at = operators[0].clone();
        for i in 0..p {
            if (mask >> i) & 1 == 1 {
                at += &operators[i + 1];
            }
        }
        worst = worst.max(spectral_radius(&at));
    }
    let scale = if worst > 0.0 { cfg.spectral_radius / worst } else { 0.0 };
    for a in operators.iter_mut() {
        a.mapv_inplace(|v| v * scale);
    }

    let grid = cfg.grid();
    let set = generate_trajectories(
        &operators,
        &grid,
        cfg.records_per_point,
        cfg.record_len,
        1.0,
        cfg.seed.wrapping_add(1),
    )?;
    Ok((operators, set))
}

/// Integrates the family `A(eps) = A_0 + sum eps_i A_i` from standard
/// normal initial states, one record per (grid point, repetition).
pub fn generate_trajectories(
    operators: &[Array2<f64>],
    eps_grid: &[Vec<f64>],
    records_per_point: usize,
    record_len: usize,
    dt: f64,
    seed: u64,
) -> Result<SnapshotSet> {
    let p = operators.len() - 1;
    let m = operators[0].nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for eps in eps_grid {
        if eps.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "grid point has {} parameters, family has {p}",
                eps.len()
            )));
        }
        let mut at = operators[0].clone();
        for (i, &e) in eps.iter().enumerate() {
            at.zip_mut_with(&operators[i + 1], |a, &b| *a += e * b);
        }
        for _ in 0..records_per_point {
            let mut states = Array2::zeros((m, record_len));
            let x0 = Array1::from_shape_fn(m, |_| -> f64 { StandardNormal.sample(&mut rng) });
            states.column_mut(0).assign(&x0);
            for k in 1..record_len {
                let prev = states.column(k - 1).to_owned();
                states.column_mut(k).assign(&at.dot(&prev));
            }
            records.push(SnapshotRecord { params: eps.clone(), states });
        }
    }
    let names = (0..p).map(|i| format!("eps{i}")).collect();
    SnapshotSet::new(records, dt, names, None)
}

/// Builds a two-operator family `[A_0, A_1]` with analytically known
/// spectrum: under a shared random orthogonal similarity, block `j` of
/// `A(eps)` is the rotation-scaling with eigenvalues
/// `(radius_j + eps * radius_shift_j) e^{+-i angle_j}`.
pub fn rotation_block_family(
    angles: &[f64],
    radii: &[f64],
    radius_shifts: &[f64],
    seed: u64,
) -> (Array2<f64>, Array2<f64>) {
    assert_eq!(angles.len(), radii.len());
    assert_eq!(angles.len(), radius_shifts.len());
    let m = 2 * angles.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = Array2::from_shape_fn((m, m), |_| rng.gen_range(-1.0..1.0));
    let (q, _, _) = linalg::thin_svd(&raw).expect("random matrix decomposes");
    let block = |scales: &[f64]| -> Array2<f64> {
        let mut b = Array2::zeros((m, m));
        for (j, (&theta, &r)) in angles.iter().zip(scales).enumerate() {
            b[(2 * j, 2 * j)] = r * theta.cos();
            b[(2 * j, 2 * j + 1)] = -r * theta.sin();
            b[(2 * j + 1, 2 * j)] = r * theta.sin();
            b[(2 * j + 1, 2 * j + 1)] = r * theta.cos();
        }
        q.dot(&b).dot(&q.t())
    };
    (block(radii), block(radius_shifts))
}

/// Adds zero-mean Gaussian noise elementwise, deterministic in the seed.
pub fn inject_noise(set: &SnapshotSet, std: f64, seed: u64) -> Result<SnapshotSet> {
    if !(std >= 0.0 && std.is_finite()) {
        return Err(Error::InvalidArgument("noise std must be non-negative".into()));
    }
    if std == 0.0 {
        return Ok(set.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noisy = set.clone();
    for rec in noisy.records.iter_mut() {
        for v in rec.states.iter_mut() {
            let draw: f64 = StandardNormal.sample(&mut rng);
            *v += std * draw;
        }
    }
    Ok(noisy)
}
