//! Closed-form dynamics: Weyl operators, Gaussian states, decay norms in
//! both embeddings, kernel positivity and the sharpness witness.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gap::{gns_gap, gns_similarity};
use crate::linalg::{
    eigh, exp_integral, expm, gramian_integral, join, split, symplectic_j, to_complex, CMat,
    CVec, RMat, RVec, I,
};
use crate::model::DriftDiffusion;
use crate::stationary::StationaryData;

/// Largest `|s_t|` fed to the exponential.
pub const EXP_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Embedding {
    Gns,
    Kms,
}

impl Embedding {
    pub fn name(self) -> &'static str {
        match self {
            Embedding::Gns => "gns",
            Embedding::Kms => "kms",
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}

/// `e^s - 1` without cancellation for small `|s|`.
pub fn cexpm1(s: Complex64) -> Complex64 {
    let (a, b) = (s.re, s.im);
    let half = (b / 2.0).sin();
    Complex64::new(a.exp_m1() * b.cos() - 2.0 * half * half, a.exp() * b.sin())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylEvolution {
    /// `-½∫₀ᵗ Re⟨e^{sZ}z, C e^{sZ}z⟩ ds`.
    pub decay: f64,
    /// `∫₀ᵗ Re⟨ζ, e^{sZ}z⟩ ds`.
    pub phase: f64,
    pub z_t: CVec,
}

/// `𝒯_t(W(z)) = e^{decay + i·phase} W(z_t)`.
pub fn weyl_evolve(dd: &DriftDiffusion, z: &CVec, t: f64, zeta: &CVec) -> Result<WeylEvolution> {
    check_time(t)?;
    let x = split(z);
    let (etz, gram) = gramian_integral(&dd.z2d, &dd.c2d, t);
    let decay = -0.5 * x.dot(&(&gram * &x));
    let phase = split(zeta).dot(&(exp_integral(&dd.z2d, t) * &x));
    Ok(WeylEvolution { decay, phase, z_t: join(&(etz * x)) })
}

/// Gaussian state parameters: mean μ and real covariance S with `S + iJ ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub mean: CVec,
    pub cov2d: RMat,
}

impl GaussianState {
    pub fn new(mean: CVec, cov2d: RMat) -> Result<Self> {
        let d = mean.len();
        if cov2d.nrows() != 2 * d || cov2d.ncols() != 2 * d {
            return Err(Error::DimensionMismatch(format!(
                "covariance is {}x{}, expected {}x{}",
                cov2d.nrows(),
                cov2d.ncols(),
                2 * d,
                2 * d
            )));
        }
        let s_tilde = to_complex(&cov2d) + to_complex(&symplectic_j(d)) * I;
        let (vals, _) = eigh(&s_tilde);
        let top = vals.last().unwrap().abs().max(1.0);
        if vals[0] < -1e-10 * top {
            return Err(Error::NotPositiveDefinite { min_eig: vals[0] });
        }
        Ok(Self { mean, cov2d })
    }

    pub fn vacuum(d: usize) -> Self {
        Self { mean: CVec::zeros(d), cov2d: RMat::identity(2 * d, 2 * d) }
    }

    pub fn stationary(st: &StationaryData) -> Self {
        Self { mean: st.mu.clone(), cov2d: st.s2d.clone() }
    }

    /// `exp(-i Re⟨μ, z⟩ - ½ Re⟨z, Sz⟩)`.
    pub fn char_fn(&self, z: &CVec) -> Complex64 {
        let x = split(z);
        let phase = split(&self.mean).dot(&x);
        let quad = x.dot(&(&self.cov2d * &x));
        Complex64::new(-0.5 * quad, -phase).exp()
    }
}

pub fn char_fn(sp: &GaussianState, z: &CVec) -> Complex64 {
    sp.char_fn(z)
}

/// `μ_t = e^{tZ♯}μ - ∫₀ᵗe^{sZ♯}ζ ds`, `S_t = e^{tZ♯}S e^{tZ} + ∫₀ᵗe^{sZ♯}C e^{sZ} ds`.
pub fn state_evolve(dd: &DriftDiffusion, sp: &GaussianState, t: f64, zeta: &CVec) -> Result<GaussianState> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(sp.clone());
    }
    let (etz, gram) = gramian_integral(&dd.z2d, &dd.c2d, t);
    let etzt = etz.transpose();
    let zt = dd.z2d.transpose();
    let mean2d = &etzt * split(&sp.mean) - exp_integral(&zt, t) * split(zeta);
    let cov = &etzt * &sp.cov2d * &etz + gram;
    Ok(GaussianState { mean: join(&mean2d), cov2d: crate::linalg::symmetrize(&cov) })
}

/// Form matrix of the kernel: `S̃` for GNS, `S̆` for KMS.
fn kernel_form(st: &StationaryData, mode: Embedding) -> Result<CMat> {
    match mode {
        Embedding::Gns => Ok(st.s_tilde.clone()),
        Embedding::Kms => Ok(to_complex(st.s_breve()?)),
    }
}

fn points_matrix(points: &[CVec]) -> RMat {
    let n = points.first().map(|p| 2 * p.len()).unwrap_or(0);
    let cols: Vec<RVec> = points.iter().map(split).collect();
    if cols.is_empty() {
        return RMat::zeros(n, 0);
    }
    RMat::from_columns(&cols)
}

/// Gram matrix `[s_t(z_j, z_k)]` (GNS) or `[s̆_t(z_j, z_k)]` (KMS).
pub fn kernel_gram(st: &StationaryData, dd: &DriftDiffusion, points: &[CVec], t: f64, mode: Embedding) -> Result<CMat> {
    check_time(t)?;
    let form = kernel_form(st, mode)?;
    let a = to_complex(&(expm(&(&dd.z2d * t)) * points_matrix(points)));
    Ok(a.transpose() * form * a)
}

/// `s_t(z, w) = ⟨e^{t𝐙}[Re z; Im z], (𝐒 + i𝐉) e^{t𝐙}[Re w; Im w]⟩`, or the
/// KMS form `Re⟨e^{tZ}z, S̆ e^{tZ}w⟩` (returned with zero imaginary part).
pub fn kernel_s(st: &StationaryData, dd: &DriftDiffusion, z: &CVec, w: &CVec, t: f64, mode: Embedding) -> Result<Complex64> {
    Ok(kernel_gram(st, dd, &[z.clone(), w.clone()], t, mode)?[(0, 1)])
}

/// A finite combination `Σ η_j W(z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylCombo {
    pub terms: Vec<(Complex64, CVec)>,
}

impl WeylCombo {
    pub fn new(terms: Vec<(Complex64, CVec)>) -> Self {
        Self { terms }
    }

    fn points(&self) -> Vec<CVec> {
        self.terms.iter().map(|(_, z)| z.clone()).collect()
    }

    /// `ξ_j = e^{-½Re⟨z_j, S z_j⟩} η_j`.
    pub fn centered_coefficients(&self, s2d: &RMat) -> Vec<Complex64> {
        self.terms
            .iter()
            .map(|(eta, z)| {
                let x = split(z);
                eta * (-0.5 * x.dot(&(s2d * &x))).exp()
            })
            .collect()
    }
}

/// `Σ_{j,k} conj(ξ_j) ξ_k (e^{s(z_j,z_k)} - 1)` for a Hermitian kernel matrix.
fn quadratic_expm1(xi: &[Complex64], kernel: &CMat) -> Result<f64> {
    let n = xi.len();
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for j in 0..n {
        for k in 0..n {
            let s = kernel[(j, k)];
            if s.norm() > EXP_LIMIT {
                return Err(Error::RangeExceeded(s.norm()));
            }
            let w = xi[j].conj() * xi[k];
            total += w * cexpm1(s);
            scale += w.norm() * (s.re.exp() + 1.0);
        }
    }
    if total.im.abs() > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NonRealNorm(total.im));
    }
    Ok(total.re)
}

/// `‖T_t(x̃)‖²` in the chosen embedding, for the centered (ζ = 0) semigroup.
pub fn norm_decay(st: &StationaryData, dd: &DriftDiffusion, combo: &WeylCombo, t: f64, mode: Embedding) -> Result<f64> {
    if combo.terms.is_empty() {
        return Err(Error::EmptyCombo);
    }
    let gram = kernel_gram(st, dd, &combo.points(), t, mode)?;
    let herm = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    quadratic_expm1(&combo.centered_coefficients(&st.s2d), &herm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCheck {
    pub lambda_min: f64,
    /// Frobenius norm of the larger of the two kernel terms.
    pub scale: f64,
    pub pass: bool,
}

/// Positivity of `K_{n,t} = e^{-2·rate·t} s₀ⁿ - s_tⁿ` (or of the root form
/// `e^{-2·rate·t/n} s₀ - s_t`) on a point set.
#[allow(clippy::too_many_arguments)]
pub fn kernel_psd_check(
    st: &StationaryData,
    dd: &DriftDiffusion,
    points: &[CVec],
    n: u32,
    t: f64,
    rate: f64,
    mode: Embedding,
    root: bool,
) -> Result<KernelCheck> {
    if n == 0 {
        return Err(Error::InvalidArgument("kernel power must be at least 1".into()));
    }
    let s0 = kernel_gram(st, dd, points, 0.0, mode)?;
    let stt = kernel_gram(st, dd, points, t, mode)?;
    let (lead, lag) = if root {
        (s0 * Complex64::new((-2.0 * rate * t / n as f64).exp(), 0.0), stt)
    } else {
        let damp = Complex64::new((-2.0 * rate * t).exp(), 0.0);
        (s0.map(|x| x.powu(n) * damp), stt.map(|x| x.powu(n)))
    };
    // tolerance relative to the terms, since K itself can vanish identically
    let scale = lead.norm().max(lag.norm());
    let (vals, _) = eigh(&(lead - lag));
    let lambda_min = vals[0];
    Ok(KernelCheck { lambda_min, scale, pass: lambda_min >= -1e-8 * scale })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sharpness {
    /// Unit vector `z = S̃^{-1/2} v / ‖S̃^{-1/2} v‖` with `v` the `ω₀` eigenvector.
    pub z: CVec,
    pub z1: CVec,
    pub z2: CVec,
    pub coeffs: [Complex64; 2],
    pub omega0: f64,
    pub omega_test: f64,
    /// `s₀(z, z) = z* S̃ z`.
    pub s0: f64,
    /// `2(ω₀ - ω_test) s₀(z, z)`.
    pub f2: f64,
    /// Richardson-extrapolated `2 f(h)/h²` from `h = 1e-3`.
    pub f2_fd: f64,
}

impl Sharpness {
    /// The combination `W(r z₁) + i W(r z₂)`.
    pub fn combo(&self, r: f64) -> WeylCombo {
        let scale = Complex64::new(r, 0.0);
        WeylCombo::new(vec![
            (self.coeffs[0], &self.z1 * scale),
            (self.coeffs[1], &self.z2 * scale),
        ])
    }
}

/// `f(r) = d/dt (‖T_t(x̃_r)‖² - e^{tω}‖x̃_r‖²)` at `t = 0`.
pub fn sharpness_f(dd: &DriftDiffusion, st: &StationaryData, z1: &CVec, z2: &CVec, coeffs: &[Complex64; 2], omega: f64, r: f64) -> Result<f64> {
    let pts = [z1.clone(), z2.clone()];
    let x = points_matrix(&pts);
    let xc = to_complex(&x);
    let s0 = xc.transpose() * &st.s_tilde * &xc;
    // d/dt s_t(z_j, z_k) at 0 equals -⟨x_j, C_Z x_k⟩
    let sdot = -(xc.transpose() * &dd.cz * &xc);
    let r2 = r * r;
    let xi: Vec<Complex64> = (0..2).map(|j| coeffs[j] * (-0.5 * r2 * s0[(j, j)].re).exp()).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..2 {
        for k in 0..2 {
            let e = s0[(j, k)] * r2;
            if e.norm() > EXP_LIMIT {
                return Err(Error::RangeExceeded(e.norm()));
            }
            let w = xi[j].conj() * xi[k];
            total += w * (sdot[(j, k)] * r2 * e.exp() - cexpm1(e) * omega);
        }
    }
    Ok(total.re)
}

pub fn sharpness_witness(st: &StationaryData, dd: &DriftDiffusion, omega_test: f64) -> Result<Sharpness> {
    let gap = gns_gap(dd, st)?;
    let omega0 = gap.omega0;
    if !(omega_test < omega0) {
        return Err(Error::InvalidTestRate { omega_test, omega0 });
    }
    let (_, _, isq) = gns_similarity(dd, st)?;
    let raw = &isq * &gap.witness;
    let z = &raw / Complex64::new(raw.norm(), 0.0);
    let d = dd.d;
    let z1 = CVec::from_fn(d, |i, _| Complex64::new(z[i].re, z[d + i].re));
    let z2 = CVec::from_fn(d, |i, _| Complex64::new(z[i].im, z[d + i].im));
    let coeffs = [Complex64::new(1.0, 0.0), I];
    let s0 = (z.adjoint() * &st.s_tilde * &z)[(0, 0)].re;
    let f2 = 2.0 * (omega0 - omega_test) * s0;
    // 2f(h)/h² has O(h²) error; one Richardson step removes it
    let h = 1e-3;
    let quotient = |h: f64| sharpness_f(dd, st, &z1, &z2, &coeffs, omega_test, h).map(|f| 2.0 * f / (h * h));
    let f2_fd = (4.0 * quotient(h / 2.0)? - quotient(h)?) / 3.0;
    if (f2_fd - f2).abs() > 1e-4 * f2.abs() {
        return Err(Error::RouteMismatch { what: "sharpness second derivative", diff: (f2_fd - f2).abs() });
    }
    Ok(Sharpness { z, z1, z2, coeffs, omega0, omega_test, s0, f2, f2_fd })
}

/// `tr(ρ^{1/2} W(z) ρ^{1/2} W(w)) = exp(-½(Re⟨z,Sz⟩ + Re⟨w,Sw⟩ + 2Re⟨z,S̆w⟩))`
/// for the centered invariant state.
pub fn kms_weyl_trace(st: &StationaryData, z: &CVec, w: &CVec) -> Result<f64> {
    let sb = st.s_breve()?;
    let (x, y) = (split(z), split(w));
    let s = &st.s2d;
    Ok((-0.5 * (x.dot(&(s * &x)) + y.dot(&(s * &y)) + 2.0 * x.dot(&(sb * &y)))).exp())
}
