//! Dense linear-algebra helpers shared by the analysis modules.
//!
//! Real 2d-dimensional vectors always use the `[Re z; Im z]` layout.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;
pub type RVec = DVector<f64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `[Re z; Im z]` for a complex d-vector.
pub fn split(z: &CVec) -> RVec {
    let d = z.len();
    RVec::from_fn(2 * d, |i, _| if i < d { z[i].re } else { z[i - d].im })
}

/// Inverse of [`split`].
pub fn join(x: &RVec) -> CVec {
    let d = x.len() / 2;
    CVec::from_fn(d, |i, _| Complex64::new(x[i], x[i + d]))
}

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn symmetrize(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending and the
/// eigenvector matrix permuted to match.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitize(m));
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Real symmetric counterpart of [`eigh`].
pub fn eigh_real(m: &RMat) -> (Vec<f64>, RMat) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = RMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn min_eig(m: &CMat) -> f64 {
    eigh(m).0[0]
}

pub fn min_eig_real(m: &RMat) -> f64 {
    eigh_real(m).0[0]
}

/// Square root and inverse square root of a Hermitian positive definite
/// matrix. Eigenvalues below `floor * lambda_max` are rejected, never
/// regularized.
pub fn sqrt_pair(m: &CMat, floor: f64) -> Result<(CMat, CMat)> {
    let (vals, vecs) = eigh(m);
    let top = vals.last().copied().unwrap_or(0.0);
    if !(vals[0] > floor * top.abs()) || top <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eig: vals[0] });
    }
    let n = m.nrows();
    let build = |f: &dyn Fn(f64) -> f64| {
        let mut scaled = vecs.clone();
        for j in 0..n {
            let s = Complex64::new(f(vals[j]), 0.0);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        &scaled * vecs.adjoint()
    };
    Ok((build(&|x| x.sqrt()), build(&|x| 1.0 / x.sqrt())))
}

/// Real symmetric version of [`sqrt_pair`].
pub fn sqrt_pair_real(m: &RMat, floor: f64) -> Result<(RMat, RMat)> {
    let (vals, vecs) = eigh_real(m);
    let top = vals.last().copied().unwrap_or(0.0);
    if !(vals[0] > floor * top.abs()) || top <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eig: vals[0] });
    }
    let sq = RMat::from_diagonal(&RVec::from_iterator(vals.len(), vals.iter().map(|v| v.sqrt())));
    let isq = RMat::from_diagonal(&RVec::from_iterator(vals.len(), vals.iter().map(|v| 1.0 / v.sqrt())));
    Ok((&vecs * sq * vecs.transpose(), &vecs * isq * vecs.transpose()))
}

pub fn expm(a: &RMat) -> RMat {
    a.exp()
}

pub fn expm_c(a: &CMat) -> CMat {
    a.exp()
}

/// `(e^{tA}, ∫_0^t e^{sAᵀ} Q e^{sA} ds)` from one block exponential of
/// `[[-Aᵀ, Q], [0, A]]·t`.
pub fn gramian_integral(a: &RMat, q: &RMat, t: f64) -> (RMat, RMat) {
    let n = a.nrows();
    let mut block = RMat::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(-a.transpose() * t));
    block.view_mut((0, n), (n, n)).copy_from(&(q * t));
    block.view_mut((n, n), (n, n)).copy_from(&(a * t));
    let e = expm(&block);
    let f22 = e.view((n, n), (n, n)).into_owned();
    let f12 = e.view((0, n), (n, n)).into_owned();
    let integral = symmetrize(&(f22.transpose() * f12));
    (f22, integral)
}

/// `∫_0^t e^{sA} ds` from the block exponential of `[[A, I], [0, 0]]·t`.
pub fn exp_integral(a: &RMat, t: f64) -> RMat {
    let n = a.nrows();
    let mut block = RMat::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(a * t));
    block.view_mut((0, n), (n, n)).copy_from(&(RMat::identity(n, n) * t));
    expm(&block).view((0, n), (n, n)).into_owned()
}

/// Solves `Aᵀ X + X A = -Q` through the Kronecker (vectorized) system.
pub fn lyapunov(a: &RMat, q: &RMat) -> Result<RMat> {
    let n = a.nrows();
    let at = a.transpose();
    let eye = RMat::identity(n, n);
    // column stacking: vec(AᵀX) = (I ⊗ Aᵀ) vec X, vec(XA) = (Aᵀ ⊗ I) vec X
    let system = eye.kronecker(&at) + at.kronecker(&eye);
    let rhs = RVec::from_iterator(n * n, q.iter().map(|x| -x));
    let lu = system.lu();
    let sol = lu.solve(&rhs).ok_or(Error::SingularLyapunov)?;
    if sol.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularLyapunov);
    }
    let x = RMat::from_column_slice(n, n, sol.as_slice());
    Ok(symmetrize(&x))
}

/// Normalizes `v` and fixes its phase so the first entry of (near-)largest
/// modulus is real and positive.
pub fn fix_phase(v: &CVec) -> CVec {
    let norm = v.norm();
    if norm == 0.0 {
        return v.clone();
    }
    let u = v / Complex64::new(norm, 0.0);
    let top = u.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()));
    let pivot = u
        .iter()
        .find(|x| x.norm() >= top * (1.0 - 1e-9))
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    u * phase
}

/// Same as [`fix_phase`] for real vectors: unit norm, largest entry positive.
pub fn fix_sign(v: &RVec) -> RVec {
    let norm = v.norm();
    if norm == 0.0 {
        return v.clone();
    }
    let u = v / norm;
    let top = u.amax();
    let pivot = u.iter().find(|x| x.abs() >= top * (1.0 - 1e-9)).copied().unwrap_or(1.0);
    if pivot < 0.0 {
        -u
    } else {
        u
    }
}

/// Unit vector minimizing `‖M v‖`, with the attained residual.
pub fn null_vector(m: &CMat) -> (CVec, f64) {
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("SVD computed with v");
    let (k, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let v = v_t.row(k).adjoint();
    (fix_phase(&v), s)
}

/// Numerical rank with threshold `rel * σ_max`.
pub fn rank_c(m: &CMat, rel: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = SVD::new(m.clone(), false, false);
    let top = svd.singular_values.max();
    if top == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > rel * top).count()
}

/// Spectral norm of a Hermitian matrix (largest eigenvalue modulus).
pub fn herm_norm(m: &CMat) -> f64 {
    let (vals, _) = eigh(m);
    vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// The symplectic form `[0, I; -I, 0]` of size 2d.
pub fn symplectic_j(d: usize) -> RMat {
    let mut j = RMat::zeros(2 * d, 2 * d);
    for k in 0..d {
        j[(k, d + k)] = 1.0;
        j[(d + k, k)] = -1.0;
    }
    j
}
