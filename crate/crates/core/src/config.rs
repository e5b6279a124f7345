//! Flat `key = value` experiment configuration.
//!
//! One TOML file may hold both pipeline keys and generator keys; each command
//! reads the keys it needs. Unknown keys are rejected so that typos do not
//! silently fall back to defaults. Every key is optional.
//!
//! Pipeline keys:
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `extractor` | `"lbp"` | `lbp`, `hog` or `embedding` |
//! | `embedding_file` | none | required for `extractor = "embedding"` |
//! | `lbp_grid` | 1 | regional LBP grid side |
//! | `hog_cell`, `hog_block`, `hog_stride`, `hog_bins` | 8, 2, 1, 9 | HOG layout |
//! | `segment` | true | Otsu segmentation before extraction |
//! | `polarity` | `"dark_foreground"` | or `light_foreground` |
//! | `binarize` | false | hard two-level output instead of masking |
//! | `pca_k` | 32 | components kept, capped at `min(n - 1, d)`; 0 disables PCA |
//! | `fusion` | `"cross"` | `concat`, `cross`, `none` (image only), `timing_only` |
//! | `cross_offset` | 0.0 | added to the standardized interval before crossing |
//! | `standardize_fused` | true | z-score fused vectors for `ocsvm` and `lof` |
//! | `classifier` | `"ocsvm"` | `ocsvm`, `iforest`, `lof` |
//! | `decision_fusion` | false | separate image and timing classifiers joined by AND |
//! | `timing_classifier` | `classifier` | family for the timing channel |
//! | `nu`, `gamma`, `svm_tol`, `svm_max_iter` | 0.1, auto, 1e-6, 10000 n | OC-SVM |
//! | `trees`, `psi`, `iforest_threshold` | 100, min(256, n), 0.5 | Isolation Forest |
//! | `lof_k`, `lof_threshold` | min(20, n - 1), 1.5 | LOF |
//! | `seed` | 0 | forest seed |
//! | `prepro2_resize`, `prepro2_crop`, `prepro2_mean`, `prepro2_std` | 224, 224, 0.485, 0.229 | normalization for exported images |
//!
//! Generator keys: `subjects` (10), `population_seed` (0),
//! `interval_shift_sigmas` (4), `pressure_gain` (0.4), `center_offset_px` (20),
//! `rotation_deg` (25), `smear_length_px` (6), `channel_mix` (0.5).

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::{ClassifierKind, ClassifierParams, Gamma, IsoForestParams, LofParams, OcSvmParams};
use crate::error::{Error, Result};
use crate::features::HogParams;
use crate::preprocess::{Polarity, Prepro1, Prepro2Params};
use crate::synthgen::AttackParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractorKind {
    Lbp,
    Hog,
    Embedding,
}

impl ExtractorKind {
    pub const ALL: [ExtractorKind; 3] = [ExtractorKind::Lbp, ExtractorKind::Hog, ExtractorKind::Embedding];

    pub fn name(self) -> &'static str {
        match self {
            ExtractorKind::Lbp => "lbp",
            ExtractorKind::Hog => "hog",
            ExtractorKind::Embedding => "embedding",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMode {
    Concat,
    Cross,
    /// Image features only.
    None,
    TimingOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub extractor: ExtractorKind,
    pub embedding_file: Option<PathBuf>,
    pub lbp_grid: usize,
    pub hog_cell: usize,
    pub hog_block: usize,
    pub hog_stride: usize,
    pub hog_bins: usize,
    pub segment: bool,
    pub polarity: Polarity,
    pub binarize: bool,
    pub pca_k: usize,
    pub fusion: FusionMode,
    pub cross_offset: f64,
    pub standardize_fused: bool,
    pub classifier: ClassifierKind,
    pub decision_fusion: bool,
    pub timing_classifier: Option<ClassifierKind>,
    pub nu: f64,
    pub gamma: Option<f64>,
    pub svm_tol: f64,
    pub svm_max_iter: Option<usize>,
    pub trees: usize,
    pub psi: Option<usize>,
    pub iforest_threshold: f64,
    pub lof_k: Option<usize>,
    pub lof_threshold: f64,
    pub seed: u64,
    pub prepro2_resize: usize,
    pub prepro2_crop: usize,
    pub prepro2_mean: f64,
    pub prepro2_std: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let hog = HogParams::default();
        let svm = OcSvmParams::default();
        let forest = IsoForestParams::default();
        let lof = LofParams::default();
        let p2 = Prepro2Params::default();
        let p1 = Prepro1::default();
        PipelineConfig {
            extractor: ExtractorKind::Lbp,
            embedding_file: None,
            lbp_grid: 1,
            hog_cell: hog.cell,
            hog_block: hog.block,
            hog_stride: hog.stride,
            hog_bins: hog.bins,
            segment: p1.segment,
            polarity: p1.polarity,
            binarize: p1.binarize,
            pca_k: 32,
            fusion: FusionMode::Cross,
            cross_offset: 0.0,
            standardize_fused: true,
            classifier: ClassifierKind::Ocsvm,
            decision_fusion: false,
            timing_classifier: None,
            nu: svm.nu,
            gamma: None,
            svm_tol: svm.tol,
            svm_max_iter: None,
            trees: forest.trees,
            psi: None,
            iforest_threshold: forest.threshold,
            lof_k: None,
            lof_threshold: lof.threshold,
            seed: 0,
            prepro2_resize: p2.resize_to,
            prepro2_crop: p2.crop_to,
            prepro2_mean: p2.mean,
            prepro2_std: p2.std,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.extractor == ExtractorKind::Embedding && self.embedding_file.is_none() {
            return Err(Error::Config("extractor = \"embedding\" requires embedding_file".into()));
        }
        if !self.cross_offset.is_finite() {
            return Err(Error::Config("cross_offset must be finite".into()));
        }
        if self.lbp_grid == 0 {
            return Err(Error::Config("lbp_grid must be at least 1".into()));
        }
        Ok(())
    }

    pub fn hog(&self) -> HogParams {
        HogParams {
            cell: self.hog_cell,
            block: self.hog_block,
            stride: self.hog_stride,
            bins: self.hog_bins,
        }
    }

    pub fn prepro1(&self) -> Prepro1 {
        Prepro1 {
            segment: self.segment,
            polarity: self.polarity,
            binarize: self.binarize,
        }
    }

    pub fn prepro2(&self) -> Prepro2Params {
        Prepro2Params {
            resize_to: self.prepro2_resize,
            crop_to: self.prepro2_crop,
            mean: self.prepro2_mean,
            std: self.prepro2_std,
        }
    }

    pub fn classifier_params(&self) -> ClassifierParams {
        ClassifierParams {
            ocsvm: OcSvmParams {
                nu: self.nu,
                gamma: self.gamma.map_or(Gamma::Auto, Gamma::Value),
                tol: self.svm_tol,
                max_iter: self.svm_max_iter,
            },
            iforest: IsoForestParams {
                trees: self.trees,
                psi: self.psi,
                seed: self.seed,
                threshold: self.iforest_threshold,
            },
            lof: LofParams {
                k: self.lof_k,
                threshold: self.lof_threshold,
            },
        }
    }

    pub fn from_table(table: &toml::Table) -> Result<Self> {
        from_known_keys(table, &pipeline_keys())
    }
}

/// Generator settings that are not given on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub subjects: usize,
    pub population_seed: u64,
    pub interval_shift_sigmas: f64,
    pub pressure_gain: f64,
    pub center_offset_px: f64,
    pub rotation_deg: f64,
    pub smear_length_px: u32,
    pub channel_mix: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        let a = AttackParams::default();
        GenConfig {
            subjects: 10,
            population_seed: 0,
            interval_shift_sigmas: a.interval_shift_sigmas,
            pressure_gain: a.pressure_gain,
            center_offset_px: a.center_offset_px,
            rotation_deg: a.rotation_deg,
            smear_length_px: a.smear_length_px,
            channel_mix: a.channel_mix,
        }
    }
}

impl GenConfig {
    pub fn attack(&self) -> AttackParams {
        AttackParams {
            interval_shift_sigmas: self.interval_shift_sigmas,
            pressure_gain: self.pressure_gain,
            center_offset_px: self.center_offset_px,
            rotation_deg: self.rotation_deg,
            smear_length_px: self.smear_length_px,
            channel_mix: self.channel_mix,
        }
    }

    pub fn from_table(table: &toml::Table) -> Result<Self> {
        from_known_keys(table, &gen_keys())
    }
}

fn keys_of<T: Serialize>(value: &T) -> BTreeSet<String> {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::Object(map)) => map.keys().cloned().collect(),
        _ => BTreeSet::new(),
    }
}

fn pipeline_keys() -> BTreeSet<String> {
    keys_of(&PipelineConfig::default())
}

fn gen_keys() -> BTreeSet<String> {
    keys_of(&GenConfig::default())
}

fn from_known_keys<T: for<'de> Deserialize<'de>>(table: &toml::Table, keys: &BTreeSet<String>) -> Result<T> {
    let subset: toml::Table = table
        .iter()
        .filter(|(k, _)| keys.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    toml::Value::Table(subset)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
}

/// Parsed configuration file plus command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    table: toml::Table,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let known: BTreeSet<String> = pipeline_keys().union(&gen_keys()).cloned().collect();
        if let Some(bad) = table.keys().find(|k| !known.contains(*k)) {
            return Err(Error::Config(format!("unknown key `{bad}`")));
        }
        Ok(ConfigFile { table })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Sets `key` from `raw`, read as a TOML value when possible and as a
    /// bare string otherwise.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let known: BTreeSet<String> = pipeline_keys().union(&gen_keys()).cloned().collect();
        if !known.contains(key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        self.table.insert(key.to_string(), value);
        Ok(())
    }

    pub fn set_assignment(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{assignment}`")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn pipeline(&self) -> Result<PipelineConfig> {
        let cfg = PipelineConfig::from_table(&self.table)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn generator(&self) -> Result<GenConfig> {
        GenConfig::from_table(&self.table)
    }
}
