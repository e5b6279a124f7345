//! One-class novelty detectors trained on legitimate attempts only, and the
//! logical-AND decision fusion of two channels.
//!
//! All three families score a sample and compare the score with a fixed
//! threshold. For diagnostics each verdict also carries a *normality margin*
//! that is non-negative exactly when the sample is judged normal:
//!
//! | family   | score            | normal iff        | margin              |
//! |----------|------------------|-------------------|---------------------|
//! | ocsvm    | `f(x)`           | `f(x) >= 0`       | `f(x)`              |
//! | iforest  | `2^(-E[h]/c)`    | `s <= threshold`  | `threshold - s`     |
//! | lof      | `LOF(x)`         | `LOF <= threshold`| `threshold - LOF`   |
//!
//! Models serialize as `{"format_version":1,"family":"ocsvm|iforest|lof","params":{...}}`.

mod iforest;
mod lof;
mod ocsvm;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use self::iforest::{
    average_path_length, depth_limit, iforest_fit, score_from_path_length, IsoForestModel,
    IsoForestParams, IsoTree, Node,
};
pub use self::lof::{lof_fit, LofModel, LofParams, LRD_CAP};
pub use self::ocsvm::{auto_gamma, ocsvm_fit, rbf, Gamma, OcSvmModel, OcSvmParams};
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

pub(crate) fn check_matrix(x: &[Vec<f64>], min_rows: usize) -> Result<()> {
    if x.len() < min_rows {
        return Err(Error::Fit(format!(
            "need at least {min_rows} training samples, got {}",
            x.len()
        )));
    }
    let d = x[0].len();
    if d == 0 {
        return Err(Error::Fit("training samples have no features".into()));
    }
    for row in x {
        if row.len() != d {
            return Err(Error::Dimension {
                expected: d,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Fit("training data contains non-finite values".into()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    Normal,
    Anomalous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pair_id: String,
    pub score: f64,
    /// Non-negative iff `prediction` is `Normal`.
    pub margin: f64,
    pub prediction: Prediction,
}

impl Verdict {
    pub fn is_normal(&self) -> bool {
        self.prediction == Prediction::Normal
    }
}

/// Legitimate only if both channels say normal. The score is the smaller
/// of the two margins and plays no part in the prediction.
pub fn decision_and(image: &Verdict, timing: &Verdict) -> Result<Verdict> {
    if image.pair_id != timing.pair_id {
        return Err(Error::PairMismatch(
            image.pair_id.clone(),
            timing.pair_id.clone(),
        ));
    }
    let normal = image.is_normal() && timing.is_normal();
    let margin = image.margin.min(timing.margin);
    Ok(Verdict {
        pair_id: image.pair_id.clone(),
        score: margin,
        margin,
        prediction: if normal {
            Prediction::Normal
        } else {
            Prediction::Anomalous
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Ocsvm,
    Iforest,
    Lof,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [ClassifierKind::Ocsvm, ClassifierKind::Iforest, ClassifierKind::Lof];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Ocsvm => "ocsvm",
            ClassifierKind::Iforest => "iforest",
            ClassifierKind::Lof => "lof",
        }
    }

    /// Distance-based families benefit from per-dimension standardization.
    pub fn is_distance_based(self) -> bool {
        matches!(self, ClassifierKind::Ocsvm | ClassifierKind::Lof)
    }
}

/// Hyperparameters for every family; only the selected one is used.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassifierParams {
    pub ocsvm: OcSvmParams,
    pub iforest: IsoForestParams,
    pub lof: LofParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum NoveltyModel {
    Ocsvm(OcSvmModel),
    Iforest(IsoForestModel),
    Lof(LofModel),
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    #[serde(flatten)]
    model: NoveltyModel,
}

impl NoveltyModel {
    pub fn fit(kind: ClassifierKind, x: &[Vec<f64>], params: &ClassifierParams) -> Result<Self> {
        Ok(match kind {
            ClassifierKind::Ocsvm => NoveltyModel::Ocsvm(ocsvm_fit(x, &params.ocsvm)?),
            ClassifierKind::Iforest => NoveltyModel::Iforest(iforest_fit(x, &params.iforest)?),
            ClassifierKind::Lof => NoveltyModel::Lof(lof_fit(x, &params.lof)?),
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            NoveltyModel::Ocsvm(_) => ClassifierKind::Ocsvm,
            NoveltyModel::Iforest(_) => ClassifierKind::Iforest,
            NoveltyModel::Lof(_) => ClassifierKind::Lof,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            NoveltyModel::Ocsvm(m) => m.dim(),
            NoveltyModel::Iforest(m) => m.dim,
            NoveltyModel::Lof(m) => m.dim(),
        }
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        match self {
            NoveltyModel::Ocsvm(m) => m.decision(x),
            NoveltyModel::Iforest(m) => m.score(x),
            NoveltyModel::Lof(m) => m.score(x),
        }
    }

    pub fn margin_of(&self, score: f64) -> f64 {
        match self {
            NoveltyModel::Ocsvm(_) => score,
            NoveltyModel::Iforest(m) => m.threshold - score,
            NoveltyModel::Lof(m) => m.threshold - score,
        }
    }

    pub fn verdict(&self, pair_id: &str, x: &[f64]) -> Result<Verdict> {
        let score = self.score(x)?;
        let margin = self.margin_of(score);
        Ok(Verdict {
            pair_id: pair_id.to_string(),
            score,
            margin,
            prediction: if margin >= 0.0 {
                Prediction::Normal
            } else {
                Prediction::Anomalous
            },
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Model(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        check_format_version(&value)?;
        let doc: ModelDocument =
            serde_json::from_value(value).map_err(|e| Error::Model(e.to_string()))?;
        Ok(doc.model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

pub(crate) fn check_format_version(value: &serde_json::Value) -> Result<()> {
    match value.get("format_version").and_then(serde_json::Value::as_u64) {
        Some(v) if v == u64::from(MODEL_FORMAT_VERSION) => Ok(()),
        Some(v) => Err(Error::Model(format!("unsupported format_version {v}"))),
        None => Err(Error::Model("missing field `format_version`".into())),
    }
}
