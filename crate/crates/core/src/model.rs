//! GKLS parameters and the drift/diffusion triple `(Z, C, C_Z)`.
//!
//! Kraus operators are kept as the coefficient matrices `(U, V)`:
//! `L_ℓ = Σ_k conj(v_ℓk)·a_k + u_ℓk·a_k†`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, herm_norm, max_abs, max_abs_c, rank_c, symplectic_j, to_complex, CMat, CVec, RMat, I,
};
use crate::realops::RealLinearPair;

/// Hermiticity/symmetry tolerance, relative to `max(1, ‖·‖)`.
const HERM_TOL: f64 = 1e-12;
/// Singular-value threshold for rank decisions, relative to `σ_max`.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GklsModel {
    pub d: usize,
    pub m: usize,
    pub omega: CMat,
    pub kappa: CMat,
    pub u: CMat,
    pub v: CMat,
    pub zeta: CVec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub hermitian_residual: f64,
    pub symmetric_residual: f64,
    pub kraus_rank: usize,
    pub m: usize,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl GklsModel {
    /// Builds and validates a model.
    pub fn new(omega: CMat, kappa: CMat, u: CMat, v: CMat, zeta: CVec) -> Result<Self> {
        let model = Self { d: omega.nrows(), m: u.nrows(), omega, kappa, u, v, zeta };
        model.validate()?;
        Ok(model)
    }

    /// The one-mode family `L₁ = μa`, `L₂ = λa†`, `H = Ω a†a + κ(a†² + a²)/2`.
    ///
    /// With `λ² = 0` the vanishing second Kraus operator is dropped so the
    /// remaining one stays linearly independent.
    pub fn one_dim(mu2: f64, lambda2: f64, omega: f64, kappa: f64) -> Result<Self> {
        for (name, x) in [("mu2", mu2), ("lambda2", lambda2), ("omega", omega), ("kappa", kappa)] {
            if !x.is_finite() {
                return Err(Error::NonFinite(name.into()));
            }
        }
        if mu2 < 0.0 || lambda2 < 0.0 {
            return Err(Error::InvalidArgument("mu2 and lambda2 must be non-negative".into()));
        }
        let (mu, lambda) = (mu2.sqrt(), lambda2.sqrt());
        let (u, v) = if lambda2 == 0.0 {
            (CMat::zeros(1, 1), CMat::from_element(1, 1, c(mu)))
        } else {
            (
                CMat::from_column_slice(2, 1, &[c(0.0), c(lambda)]),
                CMat::from_column_slice(2, 1, &[c(mu), c(0.0)]),
            )
        };
        Self::new(
            CMat::from_element(1, 1, c(omega)),
            CMat::from_element(1, 1, c(kappa)),
            u,
            v,
            CVec::zeros(1),
        )
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        let (d, m) = (self.d, self.m);
        if d == 0 {
            return Err(Error::DimensionMismatch("d must be positive".into()));
        }
        if m == 0 {
            return Err(Error::DependentKraus { rank: 0, m: 0 });
        }
        let shapes = [
            ("omega", &self.omega, d, d),
            ("kappa", &self.kappa, d, d),
            ("U", &self.u, m, d),
            ("V", &self.v, m, d),
        ];
        for (name, mat, r, cols) in shapes {
            if mat.nrows() != r || mat.ncols() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {r}x{cols}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
            if mat.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        if self.zeta.len() != d {
            return Err(Error::DimensionMismatch(format!("zeta has length {}, expected {d}", self.zeta.len())));
        }
        if self.zeta.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::NonFinite("zeta".into()));
        }
        if m > 2 * d {
            return Err(Error::TooManyKraus { m, max: 2 * d });
        }
        let hermitian_residual = max_abs_c(&(&self.omega - self.omega.adjoint()));
        if hermitian_residual > HERM_TOL * max_abs_c(&self.omega).max(1.0) {
            return Err(Error::NotHermitian { residual: hermitian_residual });
        }
        let symmetric_residual = max_abs_c(&(&self.kappa - self.kappa.transpose()));
        if symmetric_residual > HERM_TOL * max_abs_c(&self.kappa).max(1.0) {
            return Err(Error::NotSymmetric { residual: symmetric_residual });
        }
        // ker(V*) ∩ ker(Uᵀ) = {0}  ⇔  the stacked 2d×m matrix has full column rank
        let mut stacked = CMat::zeros(2 * d, m);
        stacked.view_mut((0, 0), (d, m)).copy_from(&self.v.adjoint());
        stacked.view_mut((d, 0), (d, m)).copy_from(&self.u.transpose());
        let kraus_rank = rank_c(&stacked, RANK_TOL);
        if kraus_rank < m {
            return Err(Error::DependentKraus { rank: kraus_rank, m });
        }
        Ok(ValidationReport { hermitian_residual, symmetric_residual, kraus_rank, m })
    }

    /// `M = [U + conj(V), -i(U - conj(V))]`, an m×2d matrix with `C_Z = M*M`.
    pub fn m_matrix(&self) -> CMat {
        let (d, m) = (self.d, self.m);
        let vb = self.v.conjugate();
        let mut out = CMat::zeros(m, 2 * d);
        out.view_mut((0, 0), (m, d)).copy_from(&(&self.u + &vb));
        out.view_mut((0, d), (m, d)).copy_from(&((&self.u - &vb) * (-I)));
        out
    }

    /// `√C z = conj(U)z + V conj(z)`, with `C = √Cᵀ√C` as real-linear maps.
    pub fn sqrt_c_pair(&self) -> RealLinearPair {
        RealLinearPair { a1: self.u.conjugate(), a2: self.v.clone() }
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.u.iter().chain(self.v.iter()).all(|x| x.im.abs() < tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftDiffusion {
    pub d: usize,
    pub z_pair: RealLinearPair,
    pub c_pair: RealLinearPair,
    /// `R(Z)`.
    pub z2d: RMat,
    /// `R(C)`.
    pub c2d: RMat,
    pub cz: CMat,
    pub cz_eigs: Vec<f64>,
    pub cz_min_eig: f64,
    pub cz_norm: f64,
    /// Largest entrywise disagreement between the definitions and the block
    /// formulas, over `R(Z)`, `R(C)` and `C_Z`.
    pub block_residual: f64,
    /// `‖C_Z - M*M‖`.
    pub factor_residual: f64,
}

impl DriftDiffusion {
    /// `C_Z ≻ 0`, equivalently exactly 2d independent Kraus operators.
    pub fn kraus_rank_full(&self) -> bool {
        self.cz_min_eig > RANK_TOL * self.cz_norm
    }
}

/// `Z = (a1, a2)` from the definition.
pub fn drift_pair(model: &GklsModel) -> RealLinearPair {
    let (u, v) = (&model.u, &model.v);
    let half = c(0.5);
    let a1 = (u.transpose() * u.conjugate() - v.transpose() * v.conjugate()) * half + &model.omega * I;
    let a2 = (u.transpose() * v - v.transpose() * u) * half + &model.kappa * I;
    RealLinearPair { a1, a2 }
}

/// `C = (a1, a2)` from the definition.
pub fn diffusion_pair(model: &GklsModel) -> RealLinearPair {
    let (u, v) = (&model.u, &model.v);
    let a1 = u.transpose() * u.conjugate() + v.transpose() * v.conjugate();
    let a2 = u.transpose() * v + v.transpose() * u;
    RealLinearPair { a1, a2 }
}

/// `C_Z = R(C) - i(R(Z)ᵀJ + J R(Z))`.
pub fn cz_from_realizations(z2d: &RMat, c2d: &RMat) -> CMat {
    let j = symplectic_j(z2d.nrows() / 2);
    let skew = z2d.transpose() * &j + &j * z2d;
    to_complex(c2d) - to_complex(&skew) * I
}

fn blocks_r(tl: RMat, tr: RMat, bl: RMat, br: RMat) -> RMat {
    let d = tl.nrows();
    let mut out = RMat::zeros(2 * d, 2 * d);
    out.view_mut((0, 0), (d, d)).copy_from(&tl);
    out.view_mut((0, d), (d, d)).copy_from(&tr);
    out.view_mut((d, 0), (d, d)).copy_from(&bl);
    out.view_mut((d, d), (d, d)).copy_from(&br);
    out
}

fn re(m: &CMat) -> RMat {
    m.map(|x| x.re)
}

fn im(m: &CMat) -> RMat {
    m.map(|x| x.im)
}

/// `R(Z)` assembled directly from `U ± conj(V)`, Ω and κ.
pub fn block_z(model: &GklsModel) -> RMat {
    let p = &model.u + model.v.conjugate();
    let q = &model.u - model.v.conjugate();
    let (om, ka) = (&model.omega, &model.kappa);
    let dis = blocks_r(
        re(&(q.adjoint() * &p)),
        im(&(q.adjoint() * &q)),
        -im(&(p.adjoint() * &p)),
        re(&(p.adjoint() * &q)),
    ) * 0.5;
    let ham = blocks_r(-im(&(om + ka)), re(&(ka - om)), re(&(om + ka)), im(&(ka - om)));
    dis + ham
}

/// `R(C)` assembled directly from `U ± conj(V)`.
pub fn block_c(model: &GklsModel) -> RMat {
    let p = &model.u + model.v.conjugate();
    let q = &model.u - model.v.conjugate();
    blocks_r(
        re(&(p.adjoint() * &p)),
        im(&(p.adjoint() * &q)),
        -im(&(q.adjoint() * &p)),
        re(&(q.adjoint() * &q)),
    )
}

/// `C_Z` assembled directly from `U ± conj(V)`.
pub fn block_cz(model: &GklsModel) -> CMat {
    let d = model.d;
    let p = &model.u + model.v.conjugate();
    let q = &model.u - model.v.conjugate();
    let mut out = CMat::zeros(2 * d, 2 * d);
    out.view_mut((0, 0), (d, d)).copy_from(&(p.adjoint() * &p));
    out.view_mut((0, d), (d, d)).copy_from(&(p.adjoint() * &q * (-I)));
    out.view_mut((d, 0), (d, d)).copy_from(&(q.adjoint() * &p * I));
    out.view_mut((d, d), (d, d)).copy_from(&(q.adjoint() * &q));
    out
}

/// Builds `(Z, C, C_Z)` from the definitions and cross-checks every piece
/// against the block formulas.
pub fn build_drift_diffusion(model: &GklsModel) -> Result<DriftDiffusion> {
    model.validate()?;
    let z_pair = drift_pair(model);
    let c_pair = diffusion_pair(model);
    let z2d = z_pair.realize();
    let c2d = c_pair.realize();
    let cz = cz_from_realizations(&z2d, &c2d);

    let scale = max_abs(&z2d).max(max_abs(&c2d)).max(1.0);
    let block_residual = max_abs(&(&z2d - block_z(model)))
        .max(max_abs(&(&c2d - block_c(model))))
        .max(max_abs_c(&(&cz - block_cz(model))));
    if block_residual > 1e-12 * scale {
        return Err(Error::RouteMismatch { what: "drift/diffusion blocks", diff: block_residual });
    }
    let mm = model.m_matrix();
    let factor_residual = max_abs_c(&(&cz - mm.adjoint() * &mm));
    if factor_residual > 1e-10 * scale {
        return Err(Error::RouteMismatch { what: "C_Z factorization", diff: factor_residual });
    }

    let (cz_eigs, _) = eigh(&cz);
    let cz_norm = herm_norm(&cz);
    Ok(DriftDiffusion {
        d: model.d,
        z_pair,
        c_pair,
        z2d,
        c2d,
        cz_min_eig: cz_eigs[0],
        cz_eigs,
        cz_norm,
        cz,
        block_residual,
        factor_residual,
    })
}
