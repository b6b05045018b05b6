//! Stability of the drift, the invariant Gaussian state and its Williamson
//! data.

use nalgebra::Schur;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, join, lyapunov, max_abs, split, sqrt_pair_real, symplectic_j, to_complex, CMat, CVec,
    RMat, RVec, I,
};
use crate::model::DriftDiffusion;

/// Faithfulness floor on `λ_min(S̃)`, relative to `λ_max(S̃)`.
pub const FAITHFUL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Stability {
    pub stable: bool,
    pub abscissa: f64,
    /// Eigenvalues of `R(Z)`, sorted by decreasing real part.
    pub eigenvalues: Vec<Complex64>,
}

pub fn is_stable(dd: &DriftDiffusion) -> Stability {
    let mut eigenvalues: Vec<Complex64> = Schur::new(dd.z2d.clone())
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect();
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let abscissa = eigenvalues[0].re;
    let scale = dd.z2d.norm();
    Stability { stable: abscissa < -1e-12 * scale, abscissa, eigenvalues }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryData {
    pub mu: CVec,
    pub s2d: RMat,
    /// `S̃ = S + iJ`.
    pub s_tilde: CMat,
    pub s_tilde_eigs: Vec<f64>,
    pub faithful: bool,
    /// Invariant state is unique (stable drift and `C_Z ≻ 0`).
    pub unique: bool,
    pub sympl_m: RMat,
    pub sigma: Vec<f64>,
    /// `S̆`, present only for faithful states.
    pub s_breve: Option<RMat>,
    pub nu: Option<Vec<f64>>,
    pub lyapunov_residual: f64,
    pub williamson_residual: f64,
    pub symplectic_residual: f64,
}

impl StationaryData {
    /// `det S̃` as the product of its (real) eigenvalues.
    pub fn det_s_tilde(&self) -> f64 {
        self.s_tilde_eigs.iter().product()
    }

    pub fn s_breve(&self) -> Result<&RMat> {
        self.s_breve
            .as_ref()
            .ok_or(Error::NotFaithful { min_sigma: self.sigma[0] })
    }
}

/// Invariant mean and covariance: `Z♯μ = ζ` and `R(Z)ᵀS + S R(Z) = -R(C)`.
pub fn solve_stationary(dd: &DriftDiffusion, zeta: &CVec) -> Result<StationaryData> {
    let stab = is_stable(dd);
    if !stab.stable {
        return Err(Error::Unstable { abscissa: stab.abscissa });
    }
    let d = dd.d;
    let zt = dd.z2d.transpose();
    let mu2d = zt.clone().lu().solve(&split(zeta)).ok_or(Error::SingularLyapunov)?;
    let mu = join(&mu2d);

    let s2d = lyapunov(&dd.z2d, &dd.c2d)?;
    let lyapunov_residual = max_abs(&(&zt * &s2d + &s2d * &dd.z2d + &dd.c2d));
    if lyapunov_residual > 1e-10 * max_abs(&dd.c2d).max(1.0) {
        return Err(Error::SingularLyapunov);
    }

    let s_tilde = to_complex(&s2d) + to_complex(&symplectic_j(d)) * I;
    let (s_tilde_eigs, _) = eigh(&s_tilde);
    let top = *s_tilde_eigs.last().unwrap();
    let faithful = s_tilde_eigs[0] > FAITHFUL_TOL * top;

    let (sympl_m, sigma) = williamson(&s2d)?;
    let williamson_residual = max_abs(&(sympl_m.transpose() * diag_twice(&sigma) * &sympl_m - &s2d));
    let j = symplectic_j(d);
    let symplectic_residual = max_abs(&(sympl_m.transpose() * &j * &sympl_m - &j));

    let (s_breve, nu) = if faithful {
        let (sb, nu) = kms_covariance(&sympl_m, &sigma)?;
        (Some(sb), Some(nu))
    } else {
        (None, None)
    };

    Ok(StationaryData {
        mu,
        s2d,
        s_tilde,
        s_tilde_eigs,
        faithful,
        unique: dd.kraus_rank_full(),
        sympl_m,
        sigma,
        s_breve,
        nu,
        lyapunov_residual,
        williamson_residual,
        symplectic_residual,
    })
}

/// `diag(x, x)` of size 2·len(x).
pub fn diag_twice(x: &[f64]) -> RMat {
    let d = x.len();
    RMat::from_diagonal(&RVec::from_fn(2 * d, |i, _| x[i % d]))
}

/// Symplectic diagonalization `S = Mᵀ diag(σ, σ) M` with `MᵀJM = J` and σ
/// ascending.
///
/// The positive spectrum of the Hermitian matrix `i·S^{-1/2} J S^{-1/2}` is
/// `{1/σ_j}`; an eigenvector `(x - iy)/√2` supplies the orthonormal pair
/// `(x, y)` that becomes the j-th and (d+j)-th columns of an orthogonal `O`,
/// and `M = D^{-1/2} Oᵀ S^{1/2}`.
pub fn williamson(s2d: &RMat) -> Result<(RMat, Vec<f64>)> {
    let n = s2d.nrows();
    if n % 2 != 0 || s2d.ncols() != n || n == 0 {
        return Err(Error::DimensionMismatch(format!("covariance is {}x{}", n, s2d.ncols())));
    }
    let d = n / 2;
    let (sq, isq) = sqrt_pair_real(s2d, 1e-13)?;
    let a = &isq * symplectic_j(d) * &isq;
    let h = to_complex(&a) * I;
    let (vals, vecs) = eigh(&h);
    // eigenvalues ascending: the top d are the positive ones, largest 1/σ first
    let mut o = RMat::zeros(n, n);
    let mut sigma = Vec::with_capacity(d);
    for k in 0..d {
        let col = n - 1 - k;
        let hval = vals[col];
        if hval <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eig: hval });
        }
        sigma.push(1.0 / hval);
        let v = crate::linalg::fix_phase(&vecs.column(col).into_owned());
        let w = v * Complex64::new(2f64.sqrt(), 0.0);
        for i in 0..n {
            o[(i, k)] = w[i].re;
            o[(i, d + k)] = -w[i].im;
        }
    }
    let dinv_sqrt = diag_twice(&sigma.iter().map(|s| 1.0 / s.sqrt()).collect::<Vec<_>>());
    let m = dinv_sqrt * o.transpose() * sq;
    Ok((m, sigma))
}

/// `ν_j = csch(coth⁻¹ σ_j) = √(σ_j² - 1)` and `S̆ = Mᵀ diag(ν, ν) M`.
pub fn kms_covariance(sympl_m: &RMat, sigma: &[f64]) -> Result<(RMat, Vec<f64>)> {
    let min_sigma = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_sigma > 1.0) {
        return Err(Error::NotFaithful { min_sigma });
    }
    let nu: Vec<f64> = sigma.iter().map(|s| (s * s - 1.0).sqrt()).collect();
    let s_breve = sympl_m.transpose() * diag_twice(&nu) * sympl_m;
    Ok((crate::linalg::symmetrize(&s_breve), nu))
}
