//! Acceptance suite: one test per shipped guarantee, each printing its own
//! pass line (run with `--nocapture` to see them).
//!
//! Every tolerance is pinned in the assertion itself; the helper oracles
//! here (pseudo-inverse regression, analytic block spectra, dense pencil
//! frequencies, reference integrations) are independent of the reduced
//! pipeline they check.

use iddmd::design::{ConstraintSpec, DesignProblem, GridSpec, LossSpec};
use iddmd::fit::{assemble_regression, fit_model, FitConfig, IdDmdModel};
use iddmd::linalg;
use iddmd::modal::{classify_modes, modal_decomposition, ModeMethod};
use iddmd::observables::ObservableConfig;
use iddmd::oracles::{
    central_difference_frequencies, generate_trajectories, inject_noise, rotation_block_family,
    simulate_building, simulate_burgers, simulate_cubic_damped,
    simulate_random_parametric_linear, BuildingParams, BuildingScheme, BurgersConfig,
    CubicOscillator, RandLinConfig,
};
use iddmd::predict::{reconstruct_trajectory, relative_error, Trajectory};
use iddmd::snapshots::{assemble_shifted_pairs, ScalingFactors, SnapshotRecord, SnapshotSet};
use iddmd::uq::{bagged_ensemble, ensemble_statistics, BagConfig};

use ndarray::{s, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

// ---------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------

/// Brute-force operator family `Theta = Z Xi^+` via the full SVD
/// pseudo-inverse with a hard cutoff: the independent route of the
/// low-rank identification.
fn brute_force_family(z: &Array2<f64>, xi: &Array2<f64>, p: usize) -> Vec<Array2<f64>> {
    let m = z.nrows();
    let (u, sgm, v) = linalg::thin_svd(xi).unwrap();
    let cutoff = 1e-10 * sgm[0].max(f64::MIN_POSITIVE);
    let mut zv = z.dot(&v);
    for (j, &s) in sgm.iter().enumerate() {
        if s > cutoff {
            zv.column_mut(j).mapv_inplace(|x| x / s);
        } else {
            zv.column_mut(j).fill(0.0);
        }
    }
    let theta = zv.dot(&u.t());
    (0..=p).map(|i| theta.slice(s![.., i * m..(i + 1) * m]).to_owned()).collect()
}

fn family_at(ops: &[Array2<f64>], eps: &[f64]) -> Array2<f64> {
    let mut a = ops[0].clone();
    for (i, &e) in eps.iter().enumerate() {
        a.zip_mut_with(&ops[i + 1], |x, &y| *x += e * y);
    }
    a
}

fn spectrum(a: &Array2<f64>) -> Vec<Complex64> {
    linalg::eig(a).unwrap().0
}

/// Worst pairing distance between two eigenvalue multisets (greedy
/// nearest-match, which is exact for the well-separated spectra used here).
fn spectra_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let mut best = f64::INFINITY;
        let mut pick = usize::MAX;
        for (j, y) in b.iter().enumerate() {
            if !used[j] {
                let d = (x - y).norm();
                if d < best {
                    best = d;
                    pick = j;
                }
            }
        }
        used[pick] = true;
        worst = worst.max(best);
    }
    worst
}

fn positive_frequencies(dec: &iddmd::modal::ModalDecomposition, magnitude_floor: f64) -> Vec<f64> {
    let radius = dec.lambda.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let mut w: Vec<f64> = dec
        .s
        .iter()
        .zip(&dec.lambda)
        .filter(|(s, l)| s.im > 1e-9 && l.norm() >= magnitude_floor * radius)
        .map(|(s, _)| s.im)
        .collect();
    w.sort_by(|x, y| x.partial_cmp(y).unwrap());
    w
}

fn burgers_training_set(seed: u64) -> SnapshotSet {
    let records = [0.014, 0.022, 0.030, 0.038, 0.046]
        .iter()
        .map(|&v| {
            simulate_burgers(&BurgersConfig {
                viscosity: v,
                horizon: 1.0,
                grf_seed: seed,
                ..BurgersConfig::default()
            })
            .unwrap()
        })
        .collect();
    SnapshotSet::new(records, 0.01, vec!["v".into()], None).unwrap()
}

fn burgers_model(set: &SnapshotSet) -> IdDmdModel {
    fit_model(
        set,
        &FitConfig {
            alpha: Some(vec![1.0]),
            rank_z: Some(40),
            rank_xi: Some(40),
            observables: None,
        },
    )
    .unwrap()
}

fn burgers_prediction_error(
    model: &IdDmdModel,
    ic: &Array2<f64>,
    viscosity: f64,
    horizon: f64,
    seed: u64,
) -> f64 {
    let steps = (horizon / 0.01).round() as usize + 1;
    let pred =
        reconstruct_trajectory(model, &[viscosity], &ic.view(), steps, ModeMethod::Exact).unwrap();
    let truth_rec = simulate_burgers(&BurgersConfig {
        viscosity,
        horizon,
        grf_seed: seed,
        ..BurgersConfig::default()
    })
    .unwrap();
    let truth = Trajectory {
        states: truth_rec.states.clone(),
        times: pred.times.clone(),
        eps: vec![viscosity],
    };
    let (eta, _) = relative_error(&pred, &truth).unwrap();
    eta.iter().cloned().fold(0.0, f64::max)
}

/// Cubic-damped training set per the benchmark settings: three damping
/// values, 200 s at 32 Hz, scalar displacement records.
fn cubic_training_set(linear_damping: f64) -> SnapshotSet {
    let records = [1.0, 10.0, 20.0]
        .iter()
        .map(|&c3| {
            let osc = CubicOscillator { linear_damping, ..CubicOscillator::new(c3) };
            let mut rec = simulate_cubic_damped(&osc, 200.0, 1.0 / 32.0).unwrap();
            rec.params = vec![c3];
            rec
        })
        .collect();
    SnapshotSet::new(records, 1.0 / 32.0, vec!["c3".into()], None).unwrap()
}

fn cubic_observables() -> ObservableConfig {
    // polynomial delay lifting: degree 8 over [y(k), y(k-1)] plus a
    // constant row, 45 observables in total
    ObservableConfig { base_dim: 1, delay_depth: 1, max_degree: 8, include_constant: true }
}

fn cubic_model(set: &SnapshotSet) -> IdDmdModel {
    fit_model(
        set,
        &FitConfig {
            alpha: Some(vec![0.1]),
            rank_z: Some(35),
            rank_xi: Some(35),
            observables: Some(cubic_observables()),
        },
    )
    .unwrap()
}

/// Magnitude spectrum of a scalar series at a target frequency (rad/s):
/// Hann-windowed DFT, peak magnitude within +-1 rad/s of the target.
fn spectral_peak(y: &[f64], dt: f64, omega_target: f64) -> f64 {
    let n = y.len();
    let mut buf: Vec<Complex64> = y
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos();
            Complex64::new(v * w, 0.0)
        })
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let domega = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let lo = ((omega_target - 1.0) / domega).floor().max(0.0) as usize;
    let hi = (((omega_target + 1.0) / domega).ceil() as usize).min(n / 2);
    (lo..=hi).map(|j| buf[j].norm()).fold(0.0, f64::max)
}

fn building_training_set(horizon: f64, dt: f64) -> SnapshotSet {
    let records = [1e9, 2e9, 3e9, 3.5e9]
        .iter()
        .map(|&ks| {
            let params = BuildingParams::default().with_bottom_stiffness(ks);
            let mut rec =
                simulate_building(&params, horizon, dt, BuildingScheme::CentralDifference)
                    .unwrap();
            rec.params = vec![ks];
            rec
        })
        .collect();
    SnapshotSet::new(records, dt, vec!["k_s".into()], None).unwrap()
}

// ---------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------

/// Reduced-operator spectra equal the brute-force pseudo-inverse spectra
/// on 50 random exact-rank fixtures, at every training parameter point,
/// to 1e-8 relative.
#[test]
fn criterion_01_reduced_spectra_match_pseudo_inverse_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for fixture in 0..50 {
        let m = rng.gen_range(2..=12usize);
        let p = rng.gen_range(0..=3usize);
        let cfg = RandLinConfig::new(m, p, 0.95, 7_000 + fixture);
        let (_, set) = simulate_random_parametric_linear(&cfg).unwrap();
        let alpha = ScalingFactors::identity(p);
        let pairs = assemble_shifted_pairs(&set, &alpha).unwrap();
        let reg = assemble_regression(&pairs).unwrap();
        let model = fit_model(
            &set,
            &FitConfig {
                alpha: Some(vec![1.0; p]),
                rank_z: Some(m),
                rank_xi: Some((p + 1) * m),
                observables: None,
            },
        )
        .unwrap();
        let brute = brute_force_family(&reg.z, &reg.xi, p);
        let mut eps_points: Vec<Vec<f64>> =
            set.records.iter().map(|r| r.params.clone()).collect();
        eps_points.dedup();
        for eps in &eps_points {
            let reduced = iddmd::modal::evaluate_reduced_operator(&model, eps).unwrap();
            let full = family_at(&brute, eps);
            let sr = spectrum(&reduced);
            let sf: Vec<Complex64> = spectrum(&full);
            let radius = sf.iter().map(|l| l.norm()).fold(0.0, f64::max).max(1.0);
            let dist = spectra_distance(&sr, &sf);
            assert!(
                dist <= 1e-8 * radius,
                "fixture {fixture} (m={m}, P={p}) at {eps:?}: spectra differ by {dist:.3e}"
            );
        }
    }
    println!("[PASS] criterion 1: reduced spectra match the pseudo-inverse oracle (50 fixtures, <=1e-8)");
}

/// Held-out parameter recovery on scalar and five-state families with
/// analytically known spectra: mid-grid query within 1e-6 relative.
#[test]
fn criterion_02_held_out_parameter_recovery() {
    // scalar: x_k = (0.9 + 0.05 eps) x_{k-1}, trained at eps in {0, 1}
    let records: Vec<SnapshotRecord> = [0.0, 1.0]
        .iter()
        .map(|&eps| {
            let lam = 0.9 + 0.05 * eps;
            let mut states = Array2::zeros((1, 24));
            states[(0, 0)] = 1.0;
            for k in 1..24 {
                states[(0, k)] = lam * states[(0, k - 1)];
            }
            SnapshotRecord { params: vec![eps], states }
        })
        .collect();
    let set = SnapshotSet::new(records, 1.0, vec!["eps".into()], None).unwrap();
    let model = fit_model(
        &set,
        &FitConfig {
            alpha: Some(vec![1.0]),
            rank_z: Some(1),
            rank_xi: Some(2),
            observables: None,
        },
    )
    .unwrap();
    let op = iddmd::modal::evaluate_reduced_operator(&model, &[0.5]).unwrap();
    assert!(
        (op[(0, 0)] - 0.925).abs() <= 1e-6,
        "scalar mid-grid eigenvalue {} != 0.925",
        op[(0, 0)]
    );

    // five states: two rotation blocks and one real mode under a shared
    // random orthogonal similarity; spectrum known in closed form
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let raw = Array2::from_shape_fn((5, 5), |_| rng.gen_range(-1.0..1.0));
    let (q, _, _) = linalg::thin_svd(&raw).unwrap();
    let block = |r1: f64, r2: f64, r3: f64| -> Array2<f64> {
        let mut b = Array2::zeros((5, 5));
        for (j, (theta, r)) in [(0.4f64, r1), (1.1f64, r2)].iter().enumerate() {
            b[(2 * j, 2 * j)] = r * theta.cos();
            b[(2 * j, 2 * j + 1)] = -r * theta.sin();
            b[(2 * j + 1, 2 * j)] = r * theta.sin();
            b[(2 * j + 1, 2 * j + 1)] = r * theta.cos();
        }
        b[(4, 4)] = r3;
        q.dot(&b).dot(&q.t())
    };
    let a0 = block(0.95, 0.85, 0.7);
    let a1 = &block(0.85, 0.90, 0.85) - &a0; // shifts: -0.10, +0.05, +0.15
    let eps_grid = vec![vec![0.0], vec![1.0]];
    let set = generate_trajectories(&[a0, a1], &eps_grid, 2, 30, 1.0, 5).unwrap();
    let model = fit_model(
        &set,
        &FitConfig {
            alpha: Some(vec![1.0]),
            rank_z: Some(5),
            rank_xi: Some(10),
            observables: None,
        },
    )
    .unwrap();
    let eps = 0.5;
    let got = spectrum(&iddmd::modal::evaluate_reduced_operator(&model, &[eps]).unwrap());
    let analytic: Vec<Complex64> = {
        let mut v = Vec::new();
        for (theta, r) in [(0.4f64, 0.95 - 0.10 * eps), (1.1f64, 0.85 + 0.05 * eps)] {
            v.push(Complex64::from_polar(r, theta));
            v.push(Complex64::from_polar(r, -theta));
        }
        v.push(Complex64::new(0.7 + 0.15 * eps, 0.0));
        v
    };
    let dist = spectra_distance(&got, &analytic);
    assert!(dist <= 1e-6, "five-state mid-grid spectrum off by {dist:.3e}");
    println!("[PASS] criterion 2: held-out parameter recovery (scalar + m=5, <=1e-6)");
}

/// Burgers interpolation: trained on five viscosities, predicted at
/// v = 0.02 over one second; max relative error at or below 5%.
#[test]
fn criterion_03_burgers_interpolation() {
    let seed = BurgersConfig::default().grf_seed;
    let set = burgers_training_set(seed);
    let model = burgers_model(&set);
    let ic = set.records[0].states.slice(s![.., ..1]).to_owned();
    let max_eta = burgers_prediction_error(&model, &ic, 0.02, 1.0, seed);
    assert!(max_eta <= 5.0, "interpolation max relative error {max_eta:.2}% > 5%");
    println!("[PASS] criterion 3: Burgers interpolation at v=0.02, max eta {max_eta:.2}% <= 5%");
}

/// Burgers extrapolation in viscosity and time: v = 0.01 over three
/// seconds; max relative error at or below 30%.
#[test]
fn criterion_04_burgers_extrapolation() {
    let seed = BurgersConfig::default().grf_seed;
    let set = burgers_training_set(seed);
    let model = burgers_model(&set);
    let ic = set.records[0].states.slice(s![.., ..1]).to_owned();
    let max_eta = burgers_prediction_error(&model, &ic, 0.01, 3.0, seed);
    assert!(max_eta <= 30.0, "extrapolation max relative error {max_eta:.2}% > 30%");
    println!("[PASS] criterion 4: Burgers extrapolation to v=0.01, t<=3s, max eta {max_eta:.2}% <= 30%");
}

/// The benchmark Burgers fit finishes within one second of wall time.
#[test]
fn criterion_05_fit_speed() {
    let set = burgers_training_set(BurgersConfig::default().grf_seed);
    // one warm-up builds any lazily initialized LAPACK state
    let _ = burgers_model(&set);
    let start = std::time::Instant::now();
    let _model = burgers_model(&set);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed <= 1.0, "fit took {elapsed:.3}s > 1s");
    println!("[PASS] criterion 5: benchmark fit in {elapsed:.3}s <= 1s");
}

/// Cubic-damped interpretability: dominant tracks at 10, 20, 30 rad/s
/// within 2% across the damping sweep, and the reconstructed response at
/// c3 = 15 has no 20 rad/s component above 1% of the 10 rad/s peak.
#[test]
fn criterion_06_cubic_damped_mode_structure() {
    let set = cubic_training_set(0.03);
    let model = cubic_model(&set);
    let grid: Vec<Vec<f64>> = (0..20).map(|i| vec![1.0 + i as f64]).collect();
    let cls = classify_modes(&model, &grid, 0.02).unwrap();
    for target in [10.0, 20.0, 30.0] {
        let found = cls.dominant_sorted().into_iter().any(|t| {
            (t.median_omega - target).abs() <= 0.02 * target
                && t.omegas
                    .iter()
                    .flatten()
                    .all(|w| (w - target).abs() <= 0.02 * target)
        });
        assert!(found, "no dominant track within 2% of {target} rad/s");
    }

    // unforced reconstruction at c3 = 15
    let truth = simulate_cubic_damped(&CubicOscillator::new(15.0), 200.0, 1.0 / 32.0).unwrap();
    let window = truth.states.slice(s![.., ..2]).to_owned();
    let traj = reconstruct_trajectory(&model, &[15.0], &window.view(), 6400, ModeMethod::Projected)
        .unwrap();
    let y: Vec<f64> = traj.states.row(0).to_vec();
    let p10 = spectral_peak(&y, 1.0 / 32.0, 10.0);
    let p20 = spectral_peak(&y, 1.0 / 32.0, 20.0);
    assert!(
        p20 <= 0.01 * p10,
        "20 rad/s component is {:.3}% of the 10 rad/s peak",
        100.0 * p20 / p10
    );
    println!(
        "[PASS] criterion 6: dominant tracks at 10/20/30 rad/s within 2%; \
         20 rad/s peak at {:.4}% of fundamental <= 1%",
        100.0 * p20 / p10
    );
}

/// Pole placement on the linear building: the designed bottom stiffness
/// lands in [2.7e9, 2.95e9] N/m and all four estimated resonances match
/// the dense eigenvalue oracle of the generating discretization within 1%.
#[test]
fn criterion_07_building_pole_placement() {
    let dt = 1.0 / 80.0;
    let set = building_training_set(120.0, dt);
    let observables =
        ObservableConfig { base_dim: 4, delay_depth: 3, max_degree: 1, include_constant: false };
    let model = fit_model(
        &set,
        &FitConfig {
            alpha: Some(vec![1e-9]),
            rank_z: Some(16),
            rank_xi: Some(16),
            observables: Some(observables),
        },
    )
    .unwrap();

    let problem = DesignProblem {
        bounds: vec![(1e9, 3.5e9)],
        grid: vec![GridSpec::Resolution { steps: 251 }],
        loss: LossSpec::TargetFrequency { mode_index: 0, omega_target: 10.0 },
        inequality: vec![],
        equality: vec![],
        horizon: 0,
    };
    let result = iddmd::design::solve_design(&model, &problem, None).unwrap();
    let ks = result.eps_opt[0];
    assert!(
        (2.7e9..=2.95e9).contains(&ks),
        "designed stiffness {ks:.4e} outside [2.7e9, 2.95e9]"
    );

    // oracle: dense eigenproblem of the same central-difference pencil
    let params = BuildingParams::default().with_bottom_stiffness(ks);
    let oracle = central_difference_frequencies(&params, dt).unwrap();
    let dec = modal_decomposition(&model, &[ks], ModeMethod::Projected).unwrap();
    let estimated = positive_frequencies(&dec, 0.5);
    assert_eq!(estimated.len(), 4, "expected 4 resonances, got {estimated:?}");
    for (e, o) in estimated.iter().zip(&oracle) {
        assert!(
            (e - o).abs() / o <= 0.01,
            "estimated {e:.4} vs oracle {o:.4} differs beyond 1%"
        );
    }
    // the first resonance sits on the requested pole
    assert!(
        (estimated[0] - 10.0).abs() / 10.0 <= 0.01,
        "first resonance {:.4} not within 1% of 10 rad/s",
        estimated[0]
    );
    println!(
        "[PASS] criterion 7: pole placement k_s = {ks:.3e} in [2.7e9, 2.95e9]; \
         4 resonances within 1% of the dense oracle"
    );
}

/// Energy-dissipation design on the cubic-damped system: the smallest
/// damping with at least 30% dissipation lands within 15% of 12.6, and
/// the reference integrator confirms the designed threshold.
#[test]
fn criterion_08_energy_dissipation_design() {
    // The figure this benchmark reproduces was generated with linear
    // damping 0.1 (reconstructed: it places the 30% crossing at 12.9 and
    // the 12.6 crossing at 29.5%); the printed equation's 0.03 puts the
    // crossing near 3.9 instead.
    let linear_damping = 0.1;
    let set = cubic_training_set(linear_damping);
    let model = cubic_model(&set);
    let horizon = 2560; // 80 s at 32 Hz: three decay constants
    let ic = set.records[0].states.slice(s![.., ..2]).to_owned();

    let problem = DesignProblem {
        bounds: vec![(1.0, 20.0)],
        grid: vec![GridSpec::Resolution { steps: 191 }],
        loss: LossSpec::Custom(Arc::new(|t: &Trajectory| Ok(t.eps[0]))),
        inequality: vec![ConstraintSpec {
            loss: LossSpec::EnergyDissipation {
                baseline_eps: vec![0.0],
                signal: 0,
                window: None,
            },
            scale: -1.0,
            offset: 0.30,
        }],
        equality: vec![],
        horizon,
    };
    let result = iddmd::design::solve_design(&model, &problem, Some(&ic)).unwrap();
    let c3_star = result.eps_opt[0];
    assert!(
        (c3_star - 12.6).abs() <= 0.15 * 12.6,
        "designed threshold {c3_star:.2} outside 12.6 +- 15%"
    );

    // confirm against the reference integrator at the designed point
    let energy = |c3: f64| -> f64 {
        let osc = CubicOscillator { linear_damping, ..CubicOscillator::new(c3) };
        let rec = simulate_cubic_damped(&osc, 80.0, 1.0 / 32.0).unwrap();
        rec.states.row(0).iter().map(|v| v * v).sum()
    };
    let e_lin = energy(0.0);
    let eta_at = |c3: f64| (e_lin - energy(c3)) / e_lin;
    // the integrator's dissipation brackets 30% across the grid step
    // around the designed damping
    assert!(
        eta_at(c3_star) >= 0.30 - 0.02,
        "integrator dissipation at the design is {:.3}",
        eta_at(c3_star)
    );
    assert!(
        eta_at(c3_star - 0.5) <= 0.30 + 0.02,
        "integrator crossing lies well below the design"
    );
    println!(
        "[PASS] criterion 8: dissipation threshold c3 = {c3_star:.2} within 12.6 +- 15%, \
         integrator eta({c3_star:.2}) = {:.3}",
        eta_at(c3_star)
    );
}

/// With 15% measurement noise the dominant frequencies move under 5%,
/// and the bagged 5-95% bands contain the noiseless values.
#[test]
fn criterion_09_noise_robustness_with_bagging() {
    let (a0, a1) =
        rotation_block_family(&[0.4, 1.1, 2.0], &[1.0, 1.0, 1.0], &[-0.02, -0.03, -0.01], 31);
    let eps_grid = vec![vec![0.0], vec![0.5], vec![1.0]];
    let clean = generate_trajectories(&[a0, a1], &eps_grid, 4, 300, 0.1, 17).unwrap();
    let scale = clean
        .records
        .iter()
        .flat_map(|r| r.states.iter())
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let noisy = inject_noise(&clean, 0.15 * scale, 23).unwrap();

    let cfg = FitConfig {
        alpha: Some(vec![1.0]),
        rank_z: Some(6),
        rank_xi: Some(12),
        observables: None,
    };
    let query = vec![0.25];
    let freqs = |m: &IdDmdModel| {
        positive_frequencies(&modal_decomposition(m, &query, ModeMethod::Projected).unwrap(), 0.0)
    };
    let clean_w = freqs(&fit_model(&clean, &cfg).unwrap());
    let noisy_w = freqs(&fit_model(&noisy, &cfg).unwrap());
    assert_eq!(clean_w.len(), 3);
    for w in &clean_w {
        let nearest = noisy_w
            .iter()
            .cloned()
            .min_by(|a, b| (a - w).abs().partial_cmp(&(b - w).abs()).unwrap())
            .unwrap();
        let shift = (nearest - w).abs() / w;
        assert!(shift < 0.05, "frequency {w:.3} shifted by {:.2}% under noise", 100.0 * shift);
    }

    let ensemble = bagged_ensemble(
        &noisy,
        &cfg,
        &BagConfig { n_runs: 30, column_fraction: 0.5, seed: 2029 },
    )
    .unwrap();
    for (mode, w_clean) in clean_w.iter().enumerate() {
        let summary = ensemble_statistics(&ensemble, |m| {
            let w = freqs(m);
            w.get(mode).copied().ok_or_else(|| {
                iddmd::Error::Numeric(format!("replicate lost mode {mode}"))
            })
        })
        .unwrap();
        assert!(
            summary.p5 <= *w_clean && *w_clean <= summary.p95,
            "mode {mode}: noiseless {w_clean:.4} outside band [{:.4}, {:.4}]",
            summary.p5,
            summary.p95
        );
    }
    println!(
        "[PASS] criterion 9: 15% noise moves dominant frequencies < 5%; \
         bagged 5-95% bands contain the noiseless values"
    );
}

/// Invariant suite: clamped boundedness over 1e5 steps, conjugate
/// symmetry, bagging identity at fraction one, scaling invariances, and
/// bit-exact format round trips.
#[test]
fn criterion_10_invariant_suite() {
    // clamped trajectories stay bounded over 1e5 steps
    let growing = IdDmdModel {
        reduced_ops: vec![ndarray::array![[1.03]]],
        u: ndarray::array![[1.0]],
        exact_mode_factors: vec![ndarray::array![[1.03]]],
        alpha: ScalingFactors::identity(0),
        dt: 0.01,
        rank_z: 1,
        rank_xi: 1,
        observables: ObservableConfig::identity(1),
        param_names: vec![],
    };
    let x1 = ndarray::array![[1.0]];
    let traj =
        reconstruct_trajectory(&growing, &[], &x1.view(), 100_000, ModeMethod::Exact).unwrap();
    let n0 = traj.states.column(0).mapv(f64::abs).sum();
    let nk = traj.states.column(99_999).mapv(f64::abs).sum();
    assert!(nk <= 10.0 * n0, "clamped trajectory grew from {n0} to {nk}");

    // conjugate symmetry of a fitted spectrum
    let (a0, a1) = rotation_block_family(&[0.5, 1.3], &[0.96, 0.9], &[-0.05, 0.04], 3);
    let set = generate_trajectories(&[a0, a1], &[vec![0.0], vec![1.0]], 2, 40, 0.1, 4).unwrap();
    let cfg = FitConfig {
        alpha: Some(vec![1.0]),
        rank_z: Some(4),
        rank_xi: Some(8),
        observables: None,
    };
    let model = fit_model(&set, &cfg).unwrap();
    let dec = modal_decomposition(&model, &[0.3], ModeMethod::Exact).unwrap();
    let radius = dec.lambda.iter().map(|l| l.norm()).fold(0.0, f64::max);
    for l in &dec.lambda {
        let conj_dist = dec
            .lambda
            .iter()
            .map(|x| (x - l.conj()).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(conj_dist <= 1e-8 * radius, "spectrum not closed under conjugation");
    }

    // bagging at fraction 1.0 reproduces the full fit bit for bit
    let full = fit_model(&set, &cfg).unwrap();
    let ensemble = bagged_ensemble(
        &set,
        &cfg,
        &BagConfig { n_runs: 2, column_fraction: 1.0, seed: 0 },
    )
    .unwrap();
    for rep in &ensemble {
        assert_eq!(rep.u, full.u);
        assert_eq!(rep.reduced_ops, full.reduced_ops);
    }

    // parameter rescaling leaves the physical spectrum unchanged
    let model_scaled = fit_model(
        &set,
        &FitConfig { alpha: Some(vec![0.02]), ..cfg.clone() },
    )
    .unwrap();
    let d1 = modal_decomposition(&model, &[0.7], ModeMethod::Projected).unwrap();
    let d2 = modal_decomposition(&model_scaled, &[0.7], ModeMethod::Projected).unwrap();
    let dist = spectra_distance(&d1.lambda, &d2.lambda);
    assert!(dist <= 1e-6 * radius, "alpha rescaling moved the spectrum by {dist:.2e}");

    // loss rescaling leaves the design argmin unchanged
    let ic = set.records[0].states.slice(s![.., ..1]).to_owned();
    let argmin_of = |gain: f64| {
        let problem = DesignProblem {
            bounds: vec![(0.0, 1.0)],
            grid: vec![GridSpec::Resolution { steps: 21 }],
            loss: LossSpec::Custom(Arc::new(move |t: &Trajectory| {
                Ok(gain * (t.eps[0] - 0.6).powi(2))
            })),
            inequality: vec![],
            equality: vec![],
            horizon: 2,
        };
        iddmd::design::solve_design(&model, &problem, Some(&ic)).unwrap().eps_opt
    };
    assert_eq!(argmin_of(1.0), argmin_of(250.0));

    // snapshot and model containers round-trip bit-exactly
    let dir = tempfile::tempdir().unwrap();
    let manifest =
        iddmd::save_snapshot_set(&set, dir.path(), iddmd::snapshots::DataFormat::Binary).unwrap();
    let set_back = iddmd::load_snapshot_set(&manifest).unwrap();
    assert_eq!(set_back, set);
    let model_path = dir.path().join("model.idmd");
    iddmd::save_model(&model, &model_path).unwrap();
    let model_back = iddmd::load_model(&model_path).unwrap();
    assert_eq!(model_back.u, model.u);
    assert_eq!(model_back.reduced_ops, model.reduced_ops);
    assert_eq!(model_back.exact_mode_factors, model.exact_mode_factors);

    println!("[PASS] criterion 10: invariant suite (boundedness, symmetry, bagging identity, scaling, round trips)");
}
