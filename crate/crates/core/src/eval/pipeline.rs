use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classify::{check_format_version, decision_and, ClassifierKind, NoveltyModel, Verdict, MODEL_FORMAT_VERSION};
use crate::config::{ExtractorKind, FusionMode, PipelineConfig};
use crate::dataset::{press_interval, Dataset, GrayImage, Label, PressPair};
use crate::error::{Error, Result};
use crate::eval::metrics::{confusion, metrics, EvalReport};
use crate::features::{effective_k, load_embeddings, pair_features_from, pca_fit, EmbeddingTable, Extractor, PcaModel};
use crate::fusion::{fuse_concat, fuse_cross, FeatureScaler, FusionScheme};
use crate::preprocess::TimingStandardizer;

/// What a channel's classifier sees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelInput {
    Fused { scheme: FusionScheme, offset: f64 },
    Image,
    Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub input: ChannelInput,
    pub scaler: Option<FeatureScaler>,
    pub model: NoveltyModel,
}

/// One attempt ready for scoring: its image vector (after PCA) and
/// standardized interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PairInputs {
    pub pair_id: String,
    pub image: Option<Vec<f64>>,
    pub t_star: f64,
}

/// Everything fitted on the training set. Serializes as one JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedPipeline {
    pub format_version: u32,
    pub config: PipelineConfig,
    pub timing: TimingStandardizer,
    pub pca: Option<PcaModel>,
    pub channels: Vec<Channel>,
    #[serde(skip)]
    embeddings: Option<Arc<EmbeddingTable>>,
}

fn channel_inputs(cfg: &PipelineConfig) -> Vec<ChannelInput> {
    if cfg.decision_fusion {
        return vec![ChannelInput::Image, ChannelInput::Timing];
    }
    vec![match cfg.fusion {
        FusionMode::Concat => ChannelInput::Fused {
            scheme: FusionScheme::Concat,
            offset: 0.0,
        },
        FusionMode::Cross => ChannelInput::Fused {
            scheme: FusionScheme::Cross,
            offset: cfg.cross_offset,
        },
        FusionMode::None => ChannelInput::Image,
        FusionMode::TimingOnly => ChannelInput::Timing,
    }]
}

fn needs_image(cfg: &PipelineConfig) -> bool {
    cfg.decision_fusion || cfg.fusion != FusionMode::TimingOnly
}

fn load_table(cfg: &PipelineConfig) -> Result<Option<Arc<EmbeddingTable>>> {
    match (&cfg.extractor, &cfg.embedding_file) {
        (ExtractorKind::Embedding, Some(path)) => Ok(Some(Arc::new(load_embeddings(path)?))),
        (ExtractorKind::Embedding, None) => Err(Error::Config("extractor = \"embedding\" requires embedding_file".into())),
        _ => Ok(None),
    }
}

fn build_vector(input: ChannelInput, pair: &PairInputs) -> Result<Vec<f64>> {
    let image = || {
        pair.image
            .as_ref()
            .ok_or_else(|| Error::domain("image features were not computed"))
    };
    Ok(match input {
        ChannelInput::Timing => vec![pair.t_star],
        ChannelInput::Image => image()?.clone(),
        ChannelInput::Fused { scheme, offset } => {
            let fv = crate::features::FeatureVector::new(image()?.clone(), crate::features::Provenance::Pca)?;
            let fused = match scheme {
                FusionScheme::Concat => fuse_concat(&fv, pair.t_star, &pair.pair_id)?,
                FusionScheme::Cross => fuse_cross(&fv, pair.t_star, offset, &pair.pair_id)?,
            };
            fused.values.into_values()
        }
    })
}

impl TrainedPipeline {
    /// Fits every stage on `train`, which must contain no attack pairs.
    pub fn fit(train: &Dataset, cfg: &PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        if let Some(p) = train.iter().find(|p| p.label == Label::Attack) {
            return Err(Error::Protocol(format!(
                "training set contains attack pair `{}`; detectors are trained on legitimate attempts only",
                p.pair_id
            )));
        }
        let intervals = train.iter().map(press_interval).collect::<Result<Vec<f64>>>()?;
        let timing = TimingStandardizer::fit(&intervals)?;
        let mut pipeline = TrainedPipeline {
            format_version: MODEL_FORMAT_VERSION,
            config: cfg.clone(),
            timing,
            pca: None,
            channels: Vec::new(),
            embeddings: load_table(cfg)?,
        };

        let raw: Vec<Option<Vec<f64>>> = if needs_image(cfg) {
            let extractor = pipeline.extractor()?;
            let vectors = train
                .iter()
                .map(|p| pipeline.raw_image_vector(&extractor, p))
                .collect::<Result<Vec<_>>>()?;
            let d = vectors[0].len();
            let k = effective_k(cfg.pca_k, vectors.len(), d);
            if cfg.pca_k > 0 && k > 0 {
                let model = pca_fit(&vectors, k)?;
                if model.rank_deficient {
                    log::warn!("training features span fewer than {k} dimensions");
                }
                pipeline.pca = Some(model);
            }
            vectors
                .into_iter()
                .map(|v| pipeline.project(v).map(Some))
                .collect::<Result<_>>()?
        } else {
            vec![None; train.len()]
        };
        let inputs: Vec<PairInputs> = train
            .iter()
            .zip(raw)
            .zip(&intervals)
            .map(|((p, image), &t)| PairInputs {
                pair_id: p.pair_id.clone(),
                image,
                t_star: timing.standardize(t),
            })
            .collect();

        let params = cfg.classifier_params();
        for input in channel_inputs(cfg) {
            let kind = match input {
                ChannelInput::Timing if cfg.decision_fusion => cfg.timing_classifier.unwrap_or(cfg.classifier),
                _ => cfg.classifier,
            };
            let mut x = inputs.iter().map(|p| build_vector(input, p)).collect::<Result<Vec<_>>>()?;
            let scaler = if cfg.standardize_fused && kind.is_distance_based() {
                let s = FeatureScaler::fit(&x)?;
                x = x.iter().map(|v| s.transform(v)).collect::<Result<_>>()?;
                Some(s)
            } else {
                None
            };
            let model = NoveltyModel::fit(kind, &x, &params)?;
            log::info!("fitted {} on {} samples of dimension {}", kind.name(), x.len(), model.dim());
            pipeline.channels.push(Channel { input, scaler, model });
        }
        Ok(pipeline)
    }

    fn extractor(&self) -> Result<Extractor> {
        Ok(match self.config.extractor {
            ExtractorKind::Lbp => Extractor::Lbp {
                grid: self.config.lbp_grid,
            },
            ExtractorKind::Hog => Extractor::Hog(self.config.hog()),
            ExtractorKind::Embedding => Extractor::Embedding(
                self.embeddings
                    .clone()
                    .ok_or_else(|| Error::Config("embedding table not loaded".into()))?,
            ),
        })
    }

    fn raw_image_vector(&self, extractor: &Extractor, pair: &PressPair) -> Result<Vec<f64>> {
        self.raw_from_images(extractor, &pair.first, &pair.first_id, &pair.second, &pair.second_id)
    }

    fn raw_from_images(
        &self,
        extractor: &Extractor,
        first: &GrayImage,
        first_id: &str,
        second: &GrayImage,
        second_id: &str,
    ) -> Result<Vec<f64>> {
        let prep = self.config.prepro1();
        let (a, b) = match extractor {
            Extractor::Embedding(_) => (first.clone(), second.clone()),
            _ => (prep.apply(first), prep.apply(second)),
        };
        Ok(pair_features_from(&a, first_id, &b, second_id, extractor, None)?.into_values())
    }

    fn project(&self, v: Vec<f64>) -> Result<Vec<f64>> {
        match &self.pca {
            Some(m) => m.transform_slice(&v),
            None => Ok(v),
        }
    }

    /// Image vector and standardized interval of a pair.
    pub fn pair_inputs(&self, pair: &PressPair) -> Result<PairInputs> {
        let t = press_interval(pair)?;
        let image = if needs_image(&self.config) {
            let extractor = self.extractor()?;
            Some(self.project(self.raw_image_vector(&extractor, pair)?)?)
        } else {
            None
        };
        Ok(PairInputs {
            pair_id: pair.pair_id.clone(),
            image,
            t_star: self.timing.standardize(t),
        })
    }

    /// One verdict per channel, in channel order.
    pub fn channel_verdicts(&self, inputs: &PairInputs) -> Result<Vec<Verdict>> {
        self.channels
            .iter()
            .map(|ch| {
                let mut x = build_vector(ch.input, inputs)?;
                if let Some(s) = &ch.scaler {
                    x = s.transform(&x)?;
                }
                ch.model.verdict(&inputs.pair_id, &x)
            })
            .collect()
    }

    /// Final verdict: the single channel, or the AND of image and timing.
    pub fn combine(&self, verdicts: &[Verdict]) -> Result<Verdict> {
        match verdicts {
            [one] => Ok(one.clone()),
            [image, timing] => decision_and(image, timing),
            _ => Err(Error::Model(format!("pipeline has {} channels", verdicts.len()))),
        }
    }

    pub fn score_pair(&self, pair: &PressPair) -> Result<Verdict> {
        let inputs = self.pair_inputs(pair)?;
        self.combine(&self.channel_verdicts(&inputs)?)
    }

    /// Scores one attempt given directly by its two images and timestamps.
    pub fn detect(
        &self,
        first: &GrayImage,
        second: &GrayImage,
        t1: crate::dataset::CaptureInstant,
        t2: crate::dataset::CaptureInstant,
    ) -> Result<Verdict> {
        let pair = PressPair {
            pair_id: "input".into(),
            subject_id: String::new(),
            first_id: "img1".into(),
            second_id: "img2".into(),
            first: first.clone(),
            second: second.clone(),
            t1,
            t2,
            label: Label::Unlabeled,
        };
        self.score_pair(&pair)
    }

    pub fn evaluate(&self, test: &Dataset) -> Result<Evaluation> {
        let labels: HashMap<String, Label> = test.iter().map(|p| (p.pair_id.clone(), p.label)).collect();
        if let Some(p) = test.iter().find(|p| p.label == Label::Unlabeled) {
            return Err(Error::Unlabeled(p.pair_id.clone()));
        }
        let mut verdicts = Vec::with_capacity(test.len());
        let mut per_channel = Vec::with_capacity(test.len());
        for pair in test.iter() {
            let inputs = self.pair_inputs(pair)?;
            let channel = self.channel_verdicts(&inputs)?;
            verdicts.push(self.combine(&channel)?);
            per_channel.push(channel);
        }
        let report = metrics(&confusion(&verdicts, &labels)?);
        Ok(Evaluation {
            report,
            verdicts,
            channel_verdicts: per_channel,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Model(e.to_string()))
    }

    /// Reads a bundle and reloads the embedding table it refers to.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        check_format_version(&value)?;
        let mut pipeline: TrainedPipeline =
            serde_json::from_value(value).map_err(|e| Error::Model(e.to_string()))?;
        pipeline.embeddings = load_table(&pipeline.config)?;
        pipeline.check()?;
        Ok(pipeline)
    }

    fn check(&self) -> Result<()> {
        let expected = if self.config.decision_fusion { 2 } else { 1 };
        if self.channels.len() != expected {
            return Err(Error::Model(format!(
                "expected {expected} channels, found {}",
                self.channels.len()
            )));
        }
        if !(self.timing.sigma > 0.0) {
            return Err(Error::Model("timing.sigma must be positive".into()));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn classifier_kinds(&self) -> Vec<ClassifierKind> {
        self.channels.iter().map(|c| c.model.kind()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: EvalReport,
    /// Final verdicts in test-set order.
    pub verdicts: Vec<Verdict>,
    pub channel_verdicts: Vec<Vec<Verdict>>,
}

/// Fits on `train` and evaluates on `test`.
pub fn run_pipeline(train: &Dataset, test: &Dataset, cfg: &PipelineConfig) -> Result<EvalReport> {
    Ok(TrainedPipeline::fit(train, cfg)?.evaluate(test)?.report)
}
