//! Shared generators for integration tests.
#![allow(dead_code)]

use gaussgap::linalg::{CMat, CVec, RMat};
use gaussgap::model::{build_drift_diffusion, DriftDiffusion, GklsModel};
use gaussgap::stationary::{is_stable, solve_stationary, StationaryData};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cnoise(rng: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-scale..=scale), rng.random_range(-scale..=scale))
}

pub fn cmat(rng: &mut impl Rng, r: usize, c: usize, scale: f64) -> CMat {
    CMat::from_fn(r, c, |_, _| cnoise(rng, scale))
}

pub fn rmat(rng: &mut impl Rng, r: usize, c: usize, scale: f64) -> RMat {
    RMat::from_fn(r, c, |_, _| rng.random_range(-scale..=scale))
}

pub fn cvec(rng: &mut impl Rng, d: usize, scale: f64) -> CVec {
    CVec::from_fn(d, |_, _| cnoise(rng, scale))
}

fn hermitian(rng: &mut impl Rng, d: usize, scale: f64) -> CMat {
    let a = cmat(rng, d, d, scale);
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

fn symmetric(rng: &mut impl Rng, d: usize, scale: f64) -> CMat {
    let a = cmat(rng, d, d, scale);
    (&a + a.transpose()) * Complex64::new(0.5, 0.0)
}

pub fn pipeline(model: &GklsModel) -> (DriftDiffusion, StationaryData) {
    let dd = build_drift_diffusion(model).expect("drift and diffusion");
    let st = solve_stationary(&dd, &model.zeta).expect("stationary state");
    (dd, st)
}

/// Damped and pumped modes with random couplings, `m = 2d`. Resamples until
/// the model is stable, faithful and has full Kraus rank.
pub fn stable_faithful_model(rng: &mut impl Rng, d: usize) -> GklsModel {
    loop {
        let m = 2 * d;
        let mut u = cmat(rng, m, d, 0.2);
        let mut v = cmat(rng, m, d, 0.2);
        for j in 0..d {
            v[(j, j)] += Complex64::new(rng.random_range(1.5f64..3.0).sqrt(), 0.0);
            u[(d + j, j)] += Complex64::new(rng.random_range(0.3f64..1.0).sqrt(), 0.0);
        }
        let omega = hermitian(rng, d, 1.0);
        let kappa = symmetric(rng, d, 0.3);
        let zeta = cvec(rng, d, 0.5);
        let Ok(model) = GklsModel::new(omega, kappa, u, v, zeta) else { continue };
        let Ok(dd) = build_drift_diffusion(&model) else { continue };
        if !dd.kraus_rank_full() || !is_stable(&dd).stable {
            continue;
        }
        match solve_stationary(&dd, &model.zeta) {
            Ok(st) if st.faithful && st.sigma[0] > 1.0 + 1e-6 => return model,
            _ => continue,
        }
    }
}

/// Independent one-mode closed forms.
pub fn closed_g(mu2: f64, lambda2: f64, omega: f64, kappa: f64) -> f64 {
    let gamma = (mu2 - lambda2) / 2.0;
    let root = (mu2 * lambda2 * (gamma * gamma + omega * omega) + gamma * gamma * kappa * kappa).sqrt();
    if kappa == 0.0 {
        return gamma;
    }
    gamma * (1.0 - kappa.abs() * (mu2 + lambda2) / (2.0 * root))
}

pub fn closed_g_breve(mu2: f64, lambda2: f64, omega: f64, kappa: f64) -> f64 {
    let gamma = (mu2 - lambda2) / 2.0;
    gamma * (1.0 - kappa.abs() / (omega * omega + gamma * gamma).sqrt())
}

/// Admissible means stable with a faithful invariant state.
pub fn admissible(mu2: f64, lambda2: f64, omega: f64, kappa: f64) -> bool {
    let gamma = (mu2 - lambda2) / 2.0;
    gamma > 0.0 && gamma * gamma + omega * omega - kappa * kappa > 0.0 && (lambda2 > 0.0 || kappa != 0.0)
}

/// Deterministic admissible grid of `n` one-mode parameter points.
pub fn one_dim_grid(n: usize) -> Vec<[f64; 4]> {
    let mut all = Vec::new();
    for &mu2 in &[1.5, 2.0, 2.5, 3.0, 3.5, 4.0] {
        for &lambda2 in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            for &omega in &[0.0, 1.0, 2.0] {
                let gamma: f64 = (mu2 - lambda2) / 2.0;
                let kmax = (gamma * gamma + omega * omega).sqrt();
                for &f in &[0.0, 0.3, -0.6, 0.9] {
                    let p = [mu2, lambda2, omega, f * kmax];
                    if admissible(p[0], p[1], p[2], p[3]) {
                        all.push(p);
                    }
                }
            }
        }
    }
    assert!(all.len() >= n);
    (0..n).map(|i| all[i * all.len() / n]).collect()
}
