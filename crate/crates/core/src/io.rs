//! JSON model files.
//!
//! Complex entries are `[re, im]` pairs. A file either lists the full data
//! (`omega`, `kappa`, `U`, `V`, `zeta`) or a `preset`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::model::GklsModel;

pub const FORMAT_VERSION: u32 = 1;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneDimPreset {
    pub mu2: f64,
    pub lambda2: f64,
    pub omega: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    OneDim(OneDimPreset),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<Vec<Pair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<Vec<Pair>>>,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Vec<Pair>>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Vec<Pair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
}

/// A parsed model together with the preset it came from, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedModel {
    pub model: GklsModel,
    pub preset: Option<Preset>,
}

fn matrix(name: &str, rows: &[Vec<Pair>], nrows: usize, ncols: usize) -> Result<CMat> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Shape(format!("{name} must be {nrows}×{ncols}")));
    }
    let mut out = CMat::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::NonFinite(format!("{name}[{i}][{j}]")));
            }
            out[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(out)
}

fn rows_of(m: &CMat) -> Vec<Vec<Pair>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl ModelFile {
    pub fn from_model(model: &GklsModel) -> Self {
        Self {
            version: FORMAT_VERSION,
            d: Some(model.d),
            m: Some(model.m),
            omega: Some(rows_of(&model.omega)),
            kappa: Some(rows_of(&model.kappa)),
            u: Some(rows_of(&model.u)),
            v: Some(rows_of(&model.v)),
            zeta: Some(model.zeta.iter().map(|z| [z.re, z.im]).collect()),
            preset: None,
        }
    }

    pub fn into_model(self) -> Result<LoadedModel> {
        if self.version != FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!("unsupported version {}", self.version)));
        }
        if let Some(preset) = self.preset {
            let explicit = self.omega.is_some() || self.kappa.is_some() || self.u.is_some() || self.v.is_some();
            if explicit || self.zeta.is_some() {
                return Err(Error::Shape("a preset excludes explicit model data".into()));
            }
            let Preset::OneDim(p) = preset;
            let model = GklsModel::one_dim(p.mu2, p.lambda2, p.omega, p.kappa)?;
            if self.d.is_some_and(|d| d != model.d) || self.m.is_some_and(|m| m != model.m) {
                return Err(Error::Shape("d or m disagrees with the preset".into()));
            }
            return Ok(LoadedModel { model, preset: Some(preset) });
        }
        let missing = |name: &str| Error::Shape(format!("missing field {name}"));
        let d = self.d.ok_or_else(|| missing("d"))?;
        let m = self.m.ok_or_else(|| missing("m"))?;
        let omega = matrix("omega", &self.omega.ok_or_else(|| missing("omega"))?, d, d)?;
        let kappa = matrix("kappa", &self.kappa.ok_or_else(|| missing("kappa"))?, d, d)?;
        let u = matrix("U", &self.u.ok_or_else(|| missing("U"))?, m, d)?;
        let v = matrix("V", &self.v.ok_or_else(|| missing("V"))?, m, d)?;
        let zeta = match self.zeta {
            Some(z) => matrix("zeta", &[z], 1, d)?.transpose().column(0).into_owned(),
            None => CVec::zeros(d),
        };
        Ok(LoadedModel { model: GklsModel::new(omega, kappa, u, v, zeta)?, preset: None })
    }
}

pub fn parse_model(text: &str) -> Result<LoadedModel> {
    let file: ModelFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    file.into_model()
}

pub fn read_model(path: &Path) -> Result<LoadedModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}

pub fn model_to_json(model: &GklsModel) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::model_b;

    #[test]
    fn preset_expands() {
        let loaded =
            parse_model(r#"{"version":1,"preset":{"one_dim":{"mu2":3,"lambda2":1,"omega":2,"kappa":1}}}"#).unwrap();
        assert_eq!(loaded.model, model_b());
        assert_eq!(loaded.model.v[(0, 0)].re, 3f64.sqrt());
        assert_eq!(loaded.model.u[(1, 0)].re, 1.0);
    }

    #[test]
    fn round_trip() {
        let text = model_to_json(&model_b());
        assert_eq!(parse_model(&text).unwrap().model, model_b());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_model(""), Err(Error::Parse { line: 1, .. })));
        let bad = r#"{"version":1,"d":1,"m":2,"omega":[[[0,0]]],"kappa":[[[0,0]]],"U":[[[0,0]]],"V":[[[1,0]]]}"#;
        assert!(matches!(parse_model(bad), Err(Error::Shape(_))));
        let broken = "{\"version\":1,\n \"d\": x}";
        match parse_model(broken) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 7)),
            other => panic!("{other:?}"),
        }
    }
}
