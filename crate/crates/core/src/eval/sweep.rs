use crate::classify::ClassifierKind;
use crate::config::{ExtractorKind, FusionMode, PipelineConfig};
use crate::dataset::{split_dataset, split_dataset_by_subject, Dataset};
use crate::error::{Error, Result};
use crate::eval::metrics::EvalReport;
use crate::eval::pipeline::run_pipeline;

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub fraction: f64,
    pub train_ids: Vec<String>,
    pub report: EvalReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitUnit {
    #[default]
    Pair,
    Subject,
}

/// Trains on growing seeded subsets of `train` and evaluates each on the
/// fixed `test` set. Under one seed a smaller subset is always contained in
/// a larger one when splitting by pair.
pub fn sweep(
    train: &Dataset,
    test: &Dataset,
    fractions: &[f64],
    cfg: &PipelineConfig,
    seed: u64,
    unit: SplitUnit,
) -> Result<Vec<SweepRow>> {
    if fractions.is_empty() {
        return Err(Error::domain("no fractions given"));
    }
    let mut rows = Vec::with_capacity(fractions.len());
    for &f in fractions {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::domain(format!("fraction {f} is outside (0, 1]")));
        }
        let subset = if f == 1.0 {
            train.clone()
        } else {
            match unit {
                SplitUnit::Pair => split_dataset(train, f, seed)?.0,
                SplitUnit::Subject => split_dataset_by_subject(train, f, seed)?.0,
            }
        };
        let report = run_pipeline(&subset, test, cfg)?;
        log::info!("fraction {f}: {} training pairs", subset.len());
        rows.push(SweepRow {
            fraction: f,
            train_ids: subset.pair_ids().into_iter().map(String::from).collect(),
            report,
        });
    }
    Ok(rows)
}

fn csv_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| x.to_string())
}

/// `fraction,n_train,accuracy,fpr,recall,precision,f1`, one row per fraction.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("fraction,n_train,accuracy,fpr,recall,precision,f1\n");
    for r in rows {
        out.push_str(&format!("{},{}", r.fraction, r.train_ids.len()));
        for (_, v) in r.report.named() {
            out.push(',');
            out.push_str(&csv_cell(v));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug)]
pub struct TableRow {
    pub extractor: ExtractorKind,
    pub classifier: ClassifierKind,
    pub fusion: FusionMode,
    pub report: Result<EvalReport>,
}

/// Every extractor x classifier x {concat, cross} combination on one split.
/// Embedding rows are skipped when no embedding file is configured.
pub fn combination_table(train: &Dataset, test: &Dataset, base: &PipelineConfig) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for extractor in ExtractorKind::ALL {
        if extractor == ExtractorKind::Embedding && base.embedding_file.is_none() {
            continue;
        }
        for classifier in ClassifierKind::ALL {
            for fusion in [FusionMode::Concat, FusionMode::Cross] {
                let cfg = PipelineConfig {
                    extractor,
                    classifier,
                    fusion,
                    decision_fusion: false,
                    ..base.clone()
                };
                rows.push(TableRow {
                    extractor,
                    classifier,
                    fusion,
                    report: run_pipeline(train, test, &cfg),
                });
            }
        }
    }
    rows
}

pub fn format_table(rows: &[TableRow]) -> String {
    let mut out = format!(
        "{:<10} {:<8} {:<7} {:>9} {:>8} {:>9} {:>9} {:>5}\n",
        "features", "model", "fusion", "accuracy", "FPR", "recall", "precision", "F1"
    );
    for r in rows {
        let fusion = match r.fusion {
            FusionMode::Concat => "concat",
            FusionMode::Cross => "cross",
            FusionMode::None => "none",
            FusionMode::TimingOnly => "timing",
        };
        match &r.report {
            Ok(rep) => {
                let [a, f, rc, p, f1] = rep.display_values();
                out.push_str(&format!(
                    "{:<10} {:<8} {:<7} {a:>9} {f:>8} {rc:>9} {p:>9} {f1:>5}\n",
                    r.extractor.name(),
                    r.classifier.name(),
                    fusion
                ));
            }
            Err(e) => out.push_str(&format!(
                "{:<10} {:<8} {:<7} error: {e}\n",
                r.extractor.name(),
                r.classifier.name(),
                fusion
            )),
        }
    }
    out
}
