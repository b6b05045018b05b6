//! Analysis reports.
//!
//! Every section is present; a section that cannot be computed carries
//! `"status": "unavailable"` with an error code instead of a value.

use num_complex::Complex64;
use serde::Serialize;

use crate::classical::{classical_gap, restrict_to_ou};
use crate::error::Result;
use crate::gap::{gns_gap, kms_gap, no_gap_diagnosis, one_dim_closed_forms, Finding};
use crate::io::{LoadedModel, Preset};
use crate::linalg::{CVec, RMat};
use crate::model::build_drift_diffusion;
use crate::stationary::{is_stable, solve_stationary};

pub const REPORT_VERSION: u32 = 1;

pub type Pair = [f64; 2];

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn pairs(v: &CVec) -> Vec<Pair> {
    v.iter().copied().map(pair).collect()
}

fn rows(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Section<T> {
    Ok { value: T },
    Unavailable { reason: &'static str, message: String },
}

impl<T> Section<T> {
    fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(value) => Section::Ok { value },
            Err(e) => Section::Unavailable { reason: e.code(), message: e.to_string() },
        }
    }

    fn missing(reason: &'static str, message: &str) -> Self {
        Section::Unavailable { reason, message: message.into() }
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Section::Ok { value } => Some(value),
            Section::Unavailable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub d: usize,
    pub m: usize,
    pub kraus_rank: usize,
    pub hermitian_residual: f64,
    pub symmetric_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilitySection {
    pub stable: bool,
    pub abscissa: f64,
    pub eigenvalues: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CzSection {
    pub eigenvalues: Vec<f64>,
    pub min_eig: f64,
    pub full_rank: bool,
    pub block_residual: f64,
    pub factor_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarySection {
    pub mean: Vec<Pair>,
    pub s: Vec<Vec<f64>>,
    pub det_s_tilde: f64,
    pub s_tilde_eigenvalues: Vec<f64>,
    pub sigma: Vec<f64>,
    pub faithful: bool,
    pub unique: bool,
    pub lyapunov_residual: f64,
    pub williamson_residual: f64,
    pub symplectic_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GnsSection {
    pub g: f64,
    pub omega0: f64,
    pub has_gap: bool,
    pub witness: Vec<Pair>,
    pub route_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KmsSection {
    pub g_breve: f64,
    pub omega0_breve: f64,
    pub witness: Vec<f64>,
    pub kernel_condition: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosisSection {
    pub code: &'static str,
    pub eigenvalue: Option<Pair>,
    pub vector: Option<Vec<Pair>>,
    pub residual: Option<f64>,
    pub case: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormSection {
    pub gamma: f64,
    pub g: f64,
    pub g_breve: f64,
    pub sigma: f64,
    pub g_diff: Option<f64>,
    pub g_breve_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalSection {
    pub q: Vec<Vec<f64>>,
    pub a: Vec<Vec<f64>>,
    pub gap: Option<f64>,
    pub block_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub version: u32,
    pub model: ModelSummary,
    pub stability: StabilitySection,
    pub cz: CzSection,
    pub stationary: Section<StationarySection>,
    pub gns: Section<GnsSection>,
    pub kms: Section<KmsSection>,
    pub diagnosis: DiagnosisSection,
    pub closed_forms: Section<ClosedFormSection>,
    pub classical: Section<ClassicalSection>,
}

impl AnalysisReport {
    /// A GNS gap was found.
    pub fn has_gap(&self) -> bool {
        self.gns.value().is_some_and(|g| g.has_gap)
    }

    /// 0 with a gap, 2 without.
    pub fn exit_code(&self) -> i32 {
        if self.has_gap() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn diagnosis(finding: &Finding) -> DiagnosisSection {
    let mut out = DiagnosisSection { code: finding.code(), eigenvalue: None, vector: None, residual: None, case: None };
    match finding {
        Finding::GapExists => {}
        Finding::Unstable { eigenvalue, eigenvector, residual, case } => {
            out.eigenvalue = Some(pair(*eigenvalue));
            out.vector = Some(pairs(eigenvector));
            out.residual = Some(*residual);
            out.case = Some(case.tag());
        }
        Finding::CzKernel { vector, residual } => {
            out.vector = Some(pairs(vector));
            out.residual = Some(*residual);
        }
    }
    out
}

pub fn run_report(loaded: &LoadedModel) -> Result<AnalysisReport> {
    let model = &loaded.model;
    let validation = model.validate()?;
    let dd = build_drift_diffusion(model)?;
    let stab = is_stable(&dd);
    let st = solve_stationary(&dd, &model.zeta);

    let stationary = Section::from_result(st.as_ref().map_err(Clone::clone).map(|st| StationarySection {
        mean: pairs(&st.mu),
        s: rows(&st.s2d),
        det_s_tilde: st.det_s_tilde(),
        s_tilde_eigenvalues: st.s_tilde_eigs.clone(),
        sigma: st.sigma.clone(),
        faithful: st.faithful,
        unique: st.unique,
        lyapunov_residual: st.lyapunov_residual,
        williamson_residual: st.williamson_residual,
        symplectic_residual: st.symplectic_residual,
    }));
    let st = st.as_ref().map_err(Clone::clone);
    let gns = Section::from_result(st.clone().and_then(|st| gns_gap(&dd, st)).map(|g| GnsSection {
        g: g.g,
        omega0: g.omega0,
        has_gap: g.has_gap,
        witness: pairs(&g.witness),
        route_diff: g.route_diff,
    }));
    let kms = Section::from_result(st.and_then(|st| kms_gap(&dd, st)).map(|k| KmsSection {
        g_breve: k.g_breve,
        omega0_breve: k.omega0_breve,
        witness: k.witness.iter().copied().collect(),
        kernel_condition: k.kernel_condition,
    }));

    let closed_forms = match loaded.preset {
        Some(Preset::OneDim(p)) => {
            Section::from_result(one_dim_closed_forms(p.mu2, p.lambda2, p.omega, p.kappa).map(|cf| ClosedFormSection {
                gamma: cf.gamma,
                g: cf.g,
                g_breve: cf.g_breve,
                sigma: cf.sigma,
                g_diff: gns.value().map(|g| (g.g - cf.g).abs()),
                g_breve_diff: kms.value().map(|k| (k.g_breve - cf.g_breve).abs()),
            }))
        }
        None => Section::missing("NO_PRESET", "closed forms need a one_dim preset"),
    };

    let classical = Section::from_result(restrict_to_ou(model).map(|r| ClassicalSection {
        gap: classical_gap(&r.ou).ok(),
        q: rows(&r.ou.q_mat),
        a: rows(&r.ou.a_mat),
        block_residual: r.block_residual,
    }));

    Ok(AnalysisReport {
        version: REPORT_VERSION,
        model: ModelSummary {
            d: model.d,
            m: model.m,
            kraus_rank: validation.kraus_rank,
            hermitian_residual: validation.hermitian_residual,
            symmetric_residual: validation.symmetric_residual,
        },
        stability: StabilitySection {
            stable: stab.stable,
            abscissa: stab.abscissa,
            eigenvalues: stab.eigenvalues.iter().copied().map(pair).collect(),
        },
        cz: CzSection {
            eigenvalues: dd.cz_eigs.clone(),
            min_eig: dd.cz_min_eig,
            full_rank: dd.kraus_rank_full(),
            block_residual: dd.block_residual,
            factor_residual: dd.factor_residual,
        },
        stationary,
        gns,
        kms,
        diagnosis: diagnosis(&no_gap_diagnosis(&dd)),
        closed_forms,
        classical,
    })
}

/// Short plain-text rendering of a report.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("d = {}, m = {}, kraus rank = {}", r.model.d, r.model.m, r.model.kraus_rank));
    line(format!("stable: {} (abscissa {:.6e})", r.stability.stable, r.stability.abscissa));
    line(format!("C_Z min eigenvalue: {:.6e}", r.cz.min_eig));
    match &r.stationary {
        Section::Ok { value } => {
            line(format!("det S~ = {:.12}", value.det_s_tilde));
            line(format!("sigma = {:?}", value.sigma));
            line(format!("faithful: {}", value.faithful));
        }
        Section::Unavailable { reason, .. } => line(format!("stationary: unavailable ({reason})")),
    }
    match &r.gns {
        Section::Ok { value } => line(format!("g = {:.12}", value.g)),
        Section::Unavailable { reason, .. } => line(format!("g: unavailable ({reason})")),
    }
    match &r.kms {
        Section::Ok { value } => line(format!("g_breve = {:.12}", value.g_breve)),
        Section::Unavailable { reason, .. } => line(format!("g_breve: unavailable ({reason})")),
    }
    let mut diag = format!("diagnosis: {}", r.diagnosis.code);
    if let Some(case) = r.diagnosis.case {
        diag.push_str(&format!(" [{case}]"));
    }
    line(diag);
    if let Section::Ok { value } = &r.classical {
        if let Some(gap) = value.gap {
            line(format!("classical restriction gap = {gap:.12}"));
        }
    }
    out
}
