//! Brute-force truncated Fock-space oracle.
//!
//! Operators act on `span{e(n₁,…,n_d) : n_j ≤ N}` with mode 0 as the most
//! significant tensor factor. Superoperators use column stacking,
//! `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, expm_c, hermitize, CMat, CVec, RMat};
use crate::model::GklsModel;

/// Largest truncated Hilbert-space dimension.
pub const SPACE_LIMIT: usize = 4096;
/// Largest dimension for which dense superoperators are formed.
pub const SUPEROP_LIMIT: usize = 64;
/// Boundary population above which oracle results are flagged unreliable.
pub const LEAKAGE_TOL: f64 = 1e-6;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSpace {
    pub d: usize,
    pub cutoff: usize,
    pub dim: usize,
    annihilators: Vec<CMat>,
}

pub fn build_space(d: usize, cutoff: usize) -> Result<TruncatedSpace> {
    if d == 0 || cutoff == 0 {
        return Err(Error::InvalidArgument("need d ≥ 1 and cutoff ≥ 1".into()));
    }
    let per = cutoff + 1;
    let mut dim: usize = 1;
    for _ in 0..d {
        dim = dim.checked_mul(per).filter(|&n| n <= SPACE_LIMIT).ok_or(Error::DimensionTooLarge {
            dim: per.saturating_pow(d as u32),
            limit: SPACE_LIMIT,
        })?;
    }
    let single = CMat::from_fn(per, per, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { c(0.0) });
    let annihilators = (0..d)
        .map(|mode| {
            (0..d).fold(CMat::identity(1, 1), |acc, k| {
                let factor = if k == mode { single.clone() } else { CMat::identity(per, per) };
                acc.kronecker(&factor)
            })
        })
        .collect();
    Ok(TruncatedSpace { d, cutoff, dim, annihilators })
}

impl TruncatedSpace {
    pub fn a(&self, j: usize) -> &CMat {
        &self.annihilators[j]
    }

    pub fn adag(&self, j: usize) -> CMat {
        self.annihilators[j].adjoint()
    }

    pub fn q(&self, j: usize) -> CMat {
        (self.a(j) + self.adag(j)) * c(std::f64::consts::FRAC_1_SQRT_2)
    }

    pub fn p(&self, j: usize) -> CMat {
        (self.adag(j) - self.a(j)) * Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2)
    }

    /// Occupation numbers of basis state `idx`.
    pub fn occupations(&self, idx: usize) -> Vec<usize> {
        let per = self.cutoff + 1;
        let mut out = vec![0; self.d];
        let mut rest = idx;
        for k in (0..self.d).rev() {
            out[k] = rest % per;
            rest /= per;
        }
        out
    }

    /// Total population on basis states with some mode at the cutoff.
    pub fn leakage(&self, rho: &CMat) -> f64 {
        (0..self.dim)
            .filter(|&i| self.occupations(i).contains(&self.cutoff))
            .map(|i| rho[(i, i)].re.abs())
            .sum()
    }

    /// `W(z) = exp(Σ z_j a_j† - conj(z_j) a_j)` on the truncated space.
    pub fn weyl(&self, z: &CVec) -> CMat {
        let mut gen = CMat::zeros(self.dim, self.dim);
        for j in 0..self.d {
            gen += self.adag(j) * z[j] - self.a(j) * z[j].conj();
        }
        expm_c(&gen)
    }
}

pub fn hamiltonian(model: &GklsModel, space: &TruncatedSpace) -> CMat {
    let d = model.d;
    let mut h = CMat::zeros(space.dim, space.dim);
    for j in 0..d {
        let adj = space.adag(j);
        for k in 0..d {
            let adk = space.adag(k);
            h += &adj * space.a(k) * model.omega[(j, k)];
            h += &adj * &adk * (model.kappa[(j, k)] * 0.5);
            h += space.a(j) * space.a(k) * (model.kappa[(j, k)].conj() * 0.5);
        }
        h += &adj * (model.zeta[j] * 0.5) + space.a(j) * (model.zeta[j].conj() * 0.5);
    }
    h
}

/// `L_ℓ = Σ_k conj(v_ℓk) a_k + u_ℓk a_k†`.
pub fn kraus_operators(model: &GklsModel, space: &TruncatedSpace) -> Vec<CMat> {
    (0..model.m)
        .map(|l| {
            let mut op = CMat::zeros(space.dim, space.dim);
            for k in 0..model.d {
                op += space.a(k) * model.v[(l, k)].conj() + space.adag(k) * model.u[(l, k)];
            }
            op
        })
        .collect()
}

/// The GKLS generator in matrix form.
#[derive(Debug, Clone)]
pub struct Generator {
    pub h: CMat,
    pub kraus: Vec<CMat>,
    ldl: Vec<CMat>,
    ldl_sum: CMat,
}

impl Generator {
    pub fn new(model: &GklsModel, space: &TruncatedSpace) -> Result<Self> {
        model.validate()?;
        if model.d != space.d {
            return Err(Error::DimensionMismatch(format!("model has d = {}, space has d = {}", model.d, space.d)));
        }
        let h = hamiltonian(model, space);
        let kraus = kraus_operators(model, space);
        let ldl: Vec<CMat> = kraus.iter().map(|l| l.adjoint() * l).collect();
        let ldl_sum = ldl.iter().fold(CMat::zeros(space.dim, space.dim), |acc, x| acc + x);
        Ok(Self { h, kraus, ldl, ldl_sum })
    }

    /// `ℒ_*(ρ) = -i[H,ρ] + Σ (LρL† - ½{L†L, ρ})`.
    pub fn predual(&self, rho: &CMat) -> CMat {
        let i = Complex64::new(0.0, 1.0);
        let mut out = (&self.h * rho - rho * &self.h) * (-i);
        for l in &self.kraus {
            out += l * rho * l.adjoint();
        }
        out - (&self.ldl_sum * rho + rho * &self.ldl_sum) * c(0.5)
    }

    /// `ℒ(x) = i[H,x] - ½Σ(L†Lx - 2L†xL + xL†L)`.
    pub fn heisenberg(&self, x: &CMat) -> CMat {
        let i = Complex64::new(0.0, 1.0);
        let mut out = (&self.h * x - x * &self.h) * i;
        for l in &self.kraus {
            out += l.adjoint() * x * l;
        }
        out - (&self.ldl_sum * x + x * &self.ldl_sum) * c(0.5)
    }

    pub fn predual_superoperator(&self) -> Result<CMat> {
        let n = self.h.nrows();
        if n > SUPEROP_LIMIT {
            return Err(Error::DimensionTooLarge { dim: n, limit: SUPEROP_LIMIT });
        }
        let eye = CMat::identity(n, n);
        let i = Complex64::new(0.0, 1.0);
        let mut sup = eye.kronecker(&self.h) * (-i) + self.h.transpose().kronecker(&eye) * i;
        for (l, ldl) in self.kraus.iter().zip(&self.ldl) {
            sup += l.conjugate().kronecker(l);
            sup -= eye.kronecker(ldl) * c(0.5);
            sup -= ldl.transpose().kronecker(&eye) * c(0.5);
        }
        Ok(sup)
    }

    pub fn heisenberg_superoperator(&self) -> Result<CMat> {
        let n = self.h.nrows();
        if n > SUPEROP_LIMIT {
            return Err(Error::DimensionTooLarge { dim: n, limit: SUPEROP_LIMIT });
        }
        let eye = CMat::identity(n, n);
        let i = Complex64::new(0.0, 1.0);
        let mut sup = eye.kronecker(&self.h) * i - self.h.transpose().kronecker(&eye) * i;
        for (l, ldl) in self.kraus.iter().zip(&self.ldl) {
            sup += l.transpose().kronecker(&l.adjoint());
            sup -= eye.kronecker(ldl) * c(0.5);
            sup -= ldl.transpose().kronecker(&eye) * c(0.5);
        }
        Ok(sup)
    }

    /// Stationary density: null vector of the predual superoperator with the
    /// first equation replaced by the trace constraint.
    pub fn stationary_state(&self) -> Result<CMat> {
        let n = self.h.nrows();
        let mut sup = self.predual_superoperator()?;
        for col in 0..n * n {
            sup[(0, col)] = c(0.0);
        }
        for k in 0..n {
            sup[(0, k + k * n)] = c(1.0);
        }
        let mut rhs = CVec::zeros(n * n);
        rhs[0] = c(1.0);
        let sol = sup.lu().solve(&rhs).ok_or(Error::SingularLyapunov)?;
        let rho = hermitize(&CMat::from_column_slice(n, n, sol.as_slice()));
        let tr = rho.trace();
        Ok(rho / tr)
    }

    /// `e^{tℒ_*}ρ` by a Taylor series on sub-steps, in matrix form.
    pub fn evolve(&self, rho: &CMat, t: f64) -> Result<CMat> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidTime(t));
        }
        let norm = 2.0 * norm1(&self.h) + 2.0 * self.ldl.iter().map(norm1).sum::<f64>();
        let steps = ((t * norm / 0.5).ceil() as usize).max(1);
        let h = t / steps as f64;
        let mut state = rho.clone();
        for _ in 0..steps {
            let mut term = state.clone();
            let mut acc = state.clone();
            for k in 1..60 {
                term = self.predual(&term) * c(h / k as f64);
                acc += &term;
                if term.norm() <= 1e-17 * acc.norm() {
                    break;
                }
            }
            state = acc;
        }
        Ok(state)
    }
}

/// Induced 1-norm (largest column sum).
fn norm1(m: &CMat) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn oracle_char_fn(space: &TruncatedSpace, rho: &CMat, z: &CVec) -> Complex64 {
    (rho * space.weyl(z)).trace()
}

/// PSD square root with negative rounding eigenvalues clipped to zero.
pub fn density_sqrt(rho: &CMat) -> CMat {
    let (vals, vecs) = eigh(rho);
    let mut scaled = vecs.clone();
    for (j, v) in vals.iter().enumerate() {
        let s = c(v.max(0.0).sqrt());
        for i in 0..rho.nrows() {
            scaled[(i, j)] *= s;
        }
    }
    &scaled * vecs.adjoint()
}

fn is_diagonal(rho: &CMat, tol: f64) -> bool {
    let scale = rho.norm().max(f64::MIN_POSITIVE);
    (0..rho.nrows()).all(|i| (0..rho.ncols()).all(|j| i == j || rho[(i, j)].norm() <= tol * scale))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmsTrace {
    pub value: Complex64,
    /// `ρ` was diagonal in the number basis (the validated envelope).
    pub diagonal: bool,
}

/// `tr(ρ^{1/2} W(z) ρ^{1/2} W(w))`.
pub fn oracle_kms_trace(space: &TruncatedSpace, rho: &CMat, z: &CVec, w: &CVec) -> KmsTrace {
    let root = density_sqrt(rho);
    let value = (&root * space.weyl(z) * &root * space.weyl(w)).trace();
    KmsTrace { value, diagonal: is_diagonal(rho, 1e-12) }
}

/// Covariance `S` read from second moments, in the `[Re z; Im z]` layout.
pub fn moment_covariance(space: &TruncatedSpace, rho: &CMat) -> RMat {
    let d = space.d;
    let s2 = std::f64::consts::SQRT_2;
    // W(z) = exp(iF(z)) with F(z) = √2 Σ (Im z_j q_j - Re z_j p_j)
    let f: Vec<CMat> = (0..2 * d)
        .map(|a| if a < d { space.p(a) * c(-s2) } else { space.q(a - d) * c(s2) })
        .collect();
    let mean: Vec<f64> = f.iter().map(|x| (rho * x).trace().re).collect();
    RMat::from_fn(2 * d, 2 * d, |a, b| {
        let sym = (&f[a] * &f[b] + &f[b] * &f[a]) * c(0.5);
        (rho * sym).trace().re - mean[a] * mean[b]
    })
}

/// Thermal one-mode density `diag((1 - q) qⁿ)`, renormalized on the
/// truncation.
pub fn thermal_state(space: &TruncatedSpace, q: f64) -> Result<CMat> {
    if space.d != 1 {
        return Err(Error::NotOneDimensional(space.d));
    }
    let weights: Vec<f64> = (0..space.dim).map(|n| (1.0 - q) * q.powi(n as i32)).collect();
    let total: f64 = weights.iter().sum();
    Ok(CMat::from_diagonal(&CVec::from_iterator(space.dim, weights.iter().map(|w| c(w / total)))))
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm(m: &CMat) -> f64 {
    eigh(m).0.iter().map(|v| v.abs()).sum()
}

/// Stationary distribution of a continuous-time chain with off-diagonal
/// rates `rates[(i, j)]` (i → j), by Grassmann–Taksar–Heyman reduction.
pub fn gth_stationary(rates: &RMat) -> Vec<f64> {
    let n = rates.nrows();
    let mut p = rates.clone();
    for i in 0..n {
        p[(i, i)] = 0.0;
    }
    let mut outflow = vec![0.0; n];
    for k in (1..n).rev() {
        let s: f64 = (0..k).map(|j| p[(k, j)]).sum();
        outflow[k] = s;
        if s <= 0.0 {
            continue;
        }
        for i in 0..k {
            let pik = p[(i, k)];
            for j in 0..k {
                p[(i, j)] += pik * p[(k, j)] / s;
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        let inflow: f64 = (0..k).map(|i| pi[i] * p[(i, k)]).sum();
        pi[k] = if outflow[k] > 0.0 { inflow / outflow[k] } else { 0.0 };
    }
    let total: f64 = pi.iter().sum();
    pi.iter().map(|x| x / total).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleGap {
    pub gap: f64,
    pub leakage: f64,
    pub reliable: bool,
}

/// Checks the envelope where the stationary density is diagonal: d = 1,
/// κ = 0, ζ = 0 and each Kraus operator a multiple of `a` or of `a†`.
fn check_envelope(model: &GklsModel) -> Result<()> {
    if model.d != 1 {
        return Err(Error::OutsideEnvelope(format!("d = {} (only d = 1 is supported)", model.d)));
    }
    if model.kappa[(0, 0)].norm() != 0.0 {
        return Err(Error::OutsideEnvelope("kappa must vanish".into()));
    }
    if model.zeta[0].norm() != 0.0 {
        return Err(Error::OutsideEnvelope("zeta must vanish".into()));
    }
    for l in 0..model.m {
        if model.u[(l, 0)].norm() != 0.0 && model.v[(l, 0)].norm() != 0.0 {
            return Err(Error::OutsideEnvelope(format!("Kraus operator {l} mixes a and a†")));
        }
    }
    Ok(())
}

/// Spectral gap of the truncated generator in the GNS or KMS embedding.
///
/// The stationary density is diagonal in this envelope, so the Gram
/// operator of the embedding is diagonal on vectorized operators. The
/// generator is transported to the flat inner product, its symmetric part
/// is taken, the identity direction is deflated and the gap is minus the
/// top eigenvalue. The gauge symmetry keeps every off-diagonal band
/// `n - m = k` invariant, so each band is diagonalized on its own.
pub fn oracle_gap(model: &GklsModel, space: &TruncatedSpace, mode: crate::dynamics::Embedding) -> Result<OracleGap> {
    check_envelope(model)?;
    let gen = Generator::new(model, space)?;
    let n = space.dim;

    let mut rates = RMat::zeros(n, n);
    for l in &gen.kraus {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rates[(i, j)] += l[(j, i)].norm_sqr();
                }
            }
        }
    }
    let pops = gth_stationary(&rates);
    if pops.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::OutsideEnvelope("stationary state is not faithful".into()));
    }
    let rho = CMat::from_diagonal(&CVec::from_iterator(n, pops.iter().map(|&p| c(p))));
    let residual = trace_norm(&gen.predual(&rho));
    if residual > 1e-8 {
        return Err(Error::RouteMismatch { what: "diagonal stationary state", diff: residual });
    }

    // Gram weights for vec index i + j n (entry x_ij)
    let weight = |i: usize, j: usize| match mode {
        crate::dynamics::Embedding::Gns => pops[j],
        crate::dynamics::Embedding::Kms => (pops[i] * pops[j]).sqrt(),
    };
    let lh = gen.heisenberg_superoperator()?;
    let mut best = f64::NEG_INFINITY;
    for k in -(n as isize - 1)..=(n as isize - 1) {
        let idx: Vec<(usize, usize)> = (0..n)
            .filter_map(|i| {
                let j = i as isize - k;
                (0..n as isize).contains(&j).then_some((i, j as usize))
            })
            .collect();
        let size = idx.len();
        let sq: Vec<f64> = idx.iter().map(|&(i, j)| weight(i, j).sqrt()).collect();
        let mut lo = CMat::zeros(size, size);
        for (r, &(i, j)) in idx.iter().enumerate() {
            for (s, &(p, q)) in idx.iter().enumerate() {
                lo[(r, s)] = lh[(i + j * n, p + q * n)] * (sq[r] / sq[s]);
            }
        }
        let mut hs = hermitize(&lo);
        if k == 0 {
            // the identity, u ∝ G^{1/2} vec(1), is a common null vector
            let u = CVec::from_iterator(size, sq.iter().map(|&s| c(s)));
            let u = &u / c(u.norm());
            let shift = c(1.0 + hs.norm());
            hs -= &u * u.adjoint() * shift;
        }
        let top = *eigh(&hs).0.last().unwrap();
        best = best.max(top);
    }
    let leakage = space.leakage(&rho);
    Ok(OracleGap { gap: -best, leakage, reliable: leakage <= LEAKAGE_TOL })
}
