//! Restriction to the position algebra (an Ornstein–Uhlenbeck generator)
//! and the inverse lift.
//!
//! The OU generator is `ℒf = ½ Σ Q_jk ∂_j∂_k f + Σ A_jk q_j ∂_k f`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh_real, max_abs, sqrt_pair_real, CMat, CVec, RMat};
use crate::model::{build_drift_diffusion, GklsModel};

/// Imaginary parts below this count as zero.
const REAL_TOL: f64 = 1e-14;
/// Eigenvalue floor for `Q ≻ 0`, relative to `λ_max(Q)`.
const DIFFUSION_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OuGenerator {
    pub q_mat: RMat,
    pub a_mat: RMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub ou: OuGenerator,
    /// `X = (V - U)/√2`.
    pub x: RMat,
    /// `R = (V + U)/√2`.
    pub r: RMat,
    /// `max(‖BR(R(Z)) + RᵀX‖, ‖BR(C_Z) - 2XᵀX‖)`.
    pub block_residual: f64,
}

fn real_part(m: &CMat) -> RMat {
    m.map(|x| x.re)
}

/// Restriction of a real-coefficient model whose Hamiltonian commutes with
/// every position `q_j` (Ω = κ real, ζ = 0; this includes H = 0).
pub fn restrict_to_ou(model: &GklsModel) -> Result<Restriction> {
    model.validate()?;
    if !model.is_real(REAL_TOL) {
        return Err(Error::NotRealCoefficients);
    }
    // H = Σ Ω_jk q_j q_k - tr(Ω)/2 exactly when κ = Ω is real
    let ham_real = model.omega.iter().chain(model.kappa.iter()).all(|x| x.im.abs() < REAL_TOL);
    let scale = crate::linalg::max_abs_c(&model.omega).max(1.0);
    let commuting = ham_real
        && crate::linalg::max_abs_c(&(&model.omega - &model.kappa)) <= 1e-12 * scale
        && model.zeta.iter().all(|z| z.norm() == 0.0);
    if !commuting {
        return Err(Error::NonCommutingHamiltonian);
    }
    let (u, v) = (real_part(&model.u), real_part(&model.v));
    let s2 = std::f64::consts::SQRT_2;
    let x = (&v - &u) / s2;
    let r = (&v + &u) / s2;
    let q_mat = x.transpose() * &x;
    let a_mat = -(r.transpose() * &x);

    let d = model.d;
    let dd = build_drift_diffusion(model)?;
    let br_z = dd.z2d.view((d, d), (d, d)).into_owned();
    let br_cz = dd.cz.view((d, d), (d, d)).map(|c| c.re);
    let block_residual = max_abs(&(br_z - &a_mat)).max(max_abs(&(br_cz - &q_mat * 2.0)));
    Ok(Restriction { ou: OuGenerator { q_mat, a_mat }, x, r, block_residual })
}

/// Gaussian QMS (H = 0, m = d) whose position restriction is `ou`.
pub fn lift_from_ou(ou: &OuGenerator) -> Result<GklsModel> {
    let d = ou.q_mat.nrows();
    if d == 0 || ou.q_mat.ncols() != d || ou.a_mat.nrows() != d || ou.a_mat.ncols() != d {
        return Err(Error::DimensionMismatch("Q and A must be square of equal size".into()));
    }
    if ou.q_mat.iter().chain(ou.a_mat.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("OU generator".into()));
    }
    let (vals, _) = eigh_real(&ou.q_mat);
    let top = *vals.last().unwrap();
    if !(vals[0] > DIFFUSION_FLOOR * top) {
        return Err(Error::DegenerateDiffusion { min_eig: vals[0] });
    }
    let (x, _) = sqrt_pair_real(&ou.q_mat, DIFFUSION_FLOOR)
        .map_err(|_| Error::DegenerateDiffusion { min_eig: vals[0] })?;
    let xt_inv = x
        .transpose()
        .try_inverse()
        .ok_or(Error::DegenerateDiffusion { min_eig: vals[0] })?;
    let r = -(xt_inv * ou.a_mat.transpose());
    let s2 = std::f64::consts::SQRT_2;
    let to_c = |m: RMat| m.map(|x| Complex64::new(x, 0.0));
    GklsModel::new(
        CMat::zeros(d, d),
        CMat::zeros(d, d),
        to_c((&r - &x) / s2),
        to_c((&r + &x) / s2),
        CVec::zeros(d),
    )
}

/// Spectral gap of a one-dimensional OU generator `ℒf = ½Q f″ + A q f′`.
pub fn classical_gap(ou: &OuGenerator) -> Result<f64> {
    let d = ou.q_mat.nrows();
    if d != 1 {
        return Err(Error::NotOneDimensional(d));
    }
    let a = ou.a_mat[(0, 0)];
    if !(a < 0.0) || !(ou.q_mat[(0, 0)] > 0.0) {
        return Ok(0.0);
    }
    Ok(-a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::model_a;

    #[test]
    fn model_a_restriction() {
        let res = restrict_to_ou(&model_a()).unwrap();
        assert!((res.ou.q_mat[(0, 0)] - 2.0).abs() < 1e-15);
        assert!((res.ou.a_mat[(0, 0)] + 1.0).abs() < 1e-15);
        // ½Q = (μ² + λ²)/4 and -A = γ
        assert!((0.5 * res.ou.q_mat[(0, 0)] - 1.0).abs() < 1e-15);
        assert!(res.block_residual < 1e-14);
        assert!((classical_gap(&res.ou).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equal_kraus_coefficients_give_zero_generator() {
        let one = CMat::from_element(1, 1, Complex64::new(1.0, 0.0));
        let model = GklsModel::new(CMat::zeros(1, 1), CMat::zeros(1, 1), one.clone(), one, CVec::zeros(1)).unwrap();
        let res = restrict_to_ou(&model).unwrap();
        assert_eq!(res.ou.q_mat[(0, 0)], 0.0);
        assert_eq!(res.ou.a_mat[(0, 0)], 0.0);
    }

    #[test]
    fn rejects_complex_and_non_commuting() {
        let mut m = model_a();
        m.u[(1, 0)] = Complex64::new(1.0, 0.5);
        assert_eq!(restrict_to_ou(&m).unwrap_err(), Error::NotRealCoefficients);
        let b = GklsModel::one_dim(3.0, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(restrict_to_ou(&b).unwrap_err(), Error::NonCommutingHamiltonian);
        let q2 = GklsModel::one_dim(3.0, 1.0, 1.5, 1.5).unwrap();
        assert!(restrict_to_ou(&q2).is_ok());
    }

    #[test]
    fn lift_examples() {
        let ou = OuGenerator { q_mat: RMat::from_element(1, 1, 1.0), a_mat: RMat::from_element(1, 1, -1.0) };
        let model = lift_from_ou(&ou).unwrap();
        assert!(model.u[(0, 0)].norm() < 1e-15);
        assert!((model.v[(0, 0)].re - 2f64.sqrt()).abs() < 1e-15);
        let back = restrict_to_ou(&model).unwrap().ou;
        assert!(max_abs(&(back.q_mat - &ou.q_mat)) < 1e-15);
        assert!(max_abs(&(back.a_mat - &ou.a_mat)) < 1e-15);

        let ou2 = OuGenerator { q_mat: RMat::identity(2, 2), a_mat: RMat::zeros(2, 2) };
        let m2 = lift_from_ou(&ou2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!(max_abs(&(real_part(&m2.u) + RMat::identity(2, 2) * h)) < 1e-15);
        assert!(max_abs(&(real_part(&m2.v) - RMat::identity(2, 2) * h)) < 1e-15);

        let singular = OuGenerator { q_mat: RMat::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]), a_mat: RMat::zeros(2, 2) };
        assert!(matches!(lift_from_ou(&singular), Err(Error::DegenerateDiffusion { .. })));
    }

    #[test]
    fn classical_gap_needs_one_dimension() {
        let ou = OuGenerator { q_mat: RMat::identity(2, 2), a_mat: -RMat::identity(2, 2) };
        assert_eq!(classical_gap(&ou), Err(Error::NotOneDimensional(2)));
    }
}
