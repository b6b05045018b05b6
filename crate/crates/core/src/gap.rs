//! GNS and KMS spectral gaps, the one-mode closed forms and the no-gap
//! diagnostics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, eigh_real, fix_phase, fix_sign, herm_norm, max_abs_c, null_vector, sqrt_pair,
    sqrt_pair_real, to_complex, CMat, CVec, RMat, RVec,
};
use crate::model::DriftDiffusion;
use crate::stationary::{is_stable, StationaryData};

/// Eigenvalue floor for `S̃^{-1/2}` and `S̆^{-1/2}`, relative to `λ_max`.
pub const SQRT_FLOOR: f64 = 1e-13;
/// Agreement required between the two routes to `ω₀`.
pub const ROUTE_TOL: f64 = 1e-10;

/// `λ_max(y + y*)`: the optimal `ω` in `‖e^{ty}v‖² ≤ e^{tω}‖v‖²`.
pub fn optimal_growth_rate(y: &CMat) -> f64 {
    *eigh(&(y + y.adjoint())).0.last().unwrap()
}

pub fn optimal_growth_rate_real(y: &RMat) -> f64 {
    *eigh_real(&(y + y.transpose())).0.last().unwrap()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnsGap {
    pub omega0: f64,
    pub g: f64,
    /// Unit eigenvector of `Y + Y*` for `ω₀`, `Y = S̃^{1/2} 𝐙 S̃^{-1/2}`.
    pub witness: CVec,
    pub has_gap: bool,
    /// `|ω₀(similarity) - ω₀(C_Z route)|`.
    pub route_diff: f64,
    /// `‖Y + Y* + S̃^{-1/2} C_Z S̃^{-1/2}‖`.
    pub dissipative_residual: f64,
}

/// Hermitian similarity `S̃^{1/2} 𝐙 S̃^{-1/2}` with the two square roots.
pub fn gns_similarity(dd: &DriftDiffusion, st: &StationaryData) -> Result<(CMat, CMat, CMat)> {
    if !st.faithful {
        return Err(Error::NotFaithful { min_sigma: st.sigma[0] });
    }
    let (sq, isq) = sqrt_pair(&st.s_tilde, SQRT_FLOOR)
        .map_err(|_| Error::NotFaithful { min_sigma: st.sigma[0] })?;
    let y = &sq * to_complex(&dd.z2d) * &isq;
    Ok((y, sq, isq))
}

pub fn gns_gap(dd: &DriftDiffusion, st: &StationaryData) -> Result<GnsGap> {
    let stab = is_stable(dd);
    if !stab.stable {
        return Err(Error::Unstable { abscissa: stab.abscissa });
    }
    let (y, _, isq) = gns_similarity(dd, st)?;
    let sym = &y + y.adjoint();
    let (vals, vecs) = eigh(&sym);
    let n = vals.len();
    let omega0 = vals[n - 1];
    let witness = fix_phase(&vecs.column(n - 1).into_owned());

    let weighted = &isq * &dd.cz * &isq;
    let omega0_cz = -eigh(&weighted).0[0];
    let route_diff = (omega0 - omega0_cz).abs();
    if route_diff > ROUTE_TOL * omega0.abs().max(1.0) {
        return Err(Error::RouteMismatch { what: "omega0", diff: route_diff });
    }
    let dissipative_residual = max_abs_c(&(&sym + &weighted));

    let has_gap = dd.kraus_rank_full();
    let g = if has_gap { -omega0 / 2.0 } else { 0.0 };
    Ok(GnsGap { omega0, g, witness, has_gap, route_diff, dissipative_residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmsGap {
    pub omega0_breve: f64,
    pub g_breve: f64,
    pub witness: RVec,
    /// `λ_min` of `K̆ = -(R(Z)ᵀS̆ + S̆R(Z))`.
    pub k_breve_min_eig: f64,
    /// `K̆ ≻ 0`; when false the KMS gap is reported with a warning.
    pub kernel_condition: bool,
}

pub fn kms_similarity(dd: &DriftDiffusion, st: &StationaryData) -> Result<RMat> {
    let sb = st.s_breve()?;
    let (sq, isq) = sqrt_pair_real(sb, SQRT_FLOOR)
        .map_err(|_| Error::NotFaithful { min_sigma: st.sigma[0] })?;
    Ok(&sq * &dd.z2d * &isq)
}

pub fn kms_gap(dd: &DriftDiffusion, st: &StationaryData) -> Result<KmsGap> {
    let y = kms_similarity(dd, st)?;
    let (vals, vecs) = eigh_real(&(&y + y.transpose()));
    let n = vals.len();
    let omega0_breve = vals[n - 1];
    let witness = fix_sign(&vecs.column(n - 1).into_owned());
    let sb = st.s_breve()?;
    let k = -(dd.z2d.transpose() * sb + sb * &dd.z2d);
    let (kvals, _) = eigh_real(&k);
    let knorm = kvals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let k_breve_min_eig = kvals[0];
    Ok(KmsGap {
        omega0_breve,
        g_breve: -omega0_breve / 2.0,
        witness,
        k_breve_min_eig,
        kernel_condition: k_breve_min_eig > 1e-10 * knorm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForms {
    pub gamma: f64,
    pub g: f64,
    pub g_breve: f64,
    pub sigma: f64,
    pub exists_faithful: bool,
}

/// Closed forms for `L₁ = μa`, `L₂ = λa†`, `H = Ω a†a + κ(a†² + a²)/2`.
pub fn one_dim_closed_forms(mu2: f64, lambda2: f64, omega: f64, kappa: f64) -> Result<ClosedForms> {
    let gamma = (mu2 - lambda2) / 2.0;
    if !(gamma > 0.0) || lambda2 < 0.0 {
        return Err(Error::Unstable { abscissa: -gamma });
    }
    let w2 = gamma * gamma + omega * omega;
    // λ = κ = 0 leaves the vacuum, which is pure
    let exists_faithful = w2 - kappa * kappa > 0.0 && (lambda2 > 0.0 || kappa != 0.0);
    if !exists_faithful {
        return Err(Error::NoFaithfulState);
    }
    let total = mu2 + lambda2;
    let g = gamma
        * (1.0 - kappa.abs() * total / (2.0 * (mu2 * lambda2 * w2 + gamma * gamma * kappa * kappa).sqrt()));
    let g_breve = gamma * (1.0 - kappa.abs() / w2.sqrt());
    let sigma = total / (2.0 * gamma) * (w2 / (w2 - kappa * kappa)).sqrt();
    Ok(ClosedForms { gamma, g, g_breve, sigma, exists_faithful })
}

/// Which branch of the instability dichotomy applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityCase {
    /// The real invariant subspace of the eigenpair lies in `ker R(C)`.
    NoiselessSubspace,
    /// `C` is nonzero on that subspace: the covariance integral diverges.
    Divergent,
}

impl StabilityCase {
    pub fn tag(self) -> &'static str {
        match self {
            StabilityCase::NoiselessSubspace => "case1",
            StabilityCase::Divergent => "case2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Finding {
    GapExists,
    Unstable {
        eigenvalue: Complex64,
        /// Unit eigenvector of `R(Z)` over complex scalars.
        eigenvector: CVec,
        residual: f64,
        case: StabilityCase,
    },
    /// Unit vector `[z_p; z_q]` in the kernel of `C_Z`.
    CzKernel { vector: CVec, residual: f64 },
}

impl Finding {
    pub fn code(&self) -> &'static str {
        match self {
            Finding::GapExists => "GAP_EXISTS",
            Finding::Unstable { .. } => "UNSTABLE",
            Finding::CzKernel { .. } => "CZ_KERNEL",
        }
    }
}

pub fn no_gap_diagnosis(dd: &DriftDiffusion) -> Finding {
    let stab = is_stable(dd);
    if !stab.stable {
        let lambda = stab.eigenvalues[0];
        let n = dd.z2d.nrows();
        let shifted = to_complex(&dd.z2d) - CMat::identity(n, n) * lambda;
        let (w, residual) = null_vector(&shifted);
        let c_scale = herm_norm(&to_complex(&dd.c2d)).max(f64::MIN_POSITIVE);
        // span{Re w, Im w} is R(Z)-invariant; check it against ker R(C)
        let re = w.map(|x| x.re);
        let im = w.map(|x| x.im);
        let in_kernel = [re, im].iter().all(|b| {
            let bn = b.norm();
            bn == 0.0 || (&dd.c2d * b).norm() <= 1e-10 * c_scale * bn
        });
        let case = if in_kernel { StabilityCase::NoiselessSubspace } else { StabilityCase::Divergent };
        return Finding::Unstable { eigenvalue: lambda, eigenvector: w, residual, case };
    }
    if !dd.kraus_rank_full() {
        let (vector, residual) = null_vector(&dd.cz);
        return Finding::CzKernel { vector, residual };
    }
    Finding::GapExists
}
