use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classify::Verdict;
use crate::dataset::Label;
use crate::error::{Error, Result};

/// Counts with Legitimate as the positive class: a false positive is an
/// attack that was accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        ConfusionMatrix { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn record(&mut self, label: Label, predicted_normal: bool) -> Result<()> {
        match (label, predicted_normal) {
            (Label::Legitimate, true) => self.tp += 1,
            (Label::Legitimate, false) => self.fn_ += 1,
            (Label::Attack, true) => self.fp += 1,
            (Label::Attack, false) => self.tn += 1,
            (Label::Unlabeled, _) => return Err(Error::domain("cannot score an unlabeled pair")),
        }
        Ok(())
    }
}

/// Builds the matrix from verdicts and a pair-id to label map.
pub fn confusion(verdicts: &[Verdict], labels: &HashMap<String, Label>) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::default();
    for v in verdicts {
        match labels.get(&v.pair_id) {
            Some(&label @ (Label::Legitimate | Label::Attack)) => cm.record(label, v.is_normal())?,
            _ => return Err(Error::Unlabeled(v.pair_id.clone())),
        }
    }
    Ok(cm)
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// The five metrics; `None` marks a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub cm: ConfusionMatrix,
    pub accuracy: Option<f64>,
    pub fpr: Option<f64>,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub f1: Option<f64>,
}

pub fn metrics(cm: &ConfusionMatrix) -> EvalReport {
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    EvalReport {
        cm: *cm,
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
        fpr: ratio(cm.fp, cm.fp + cm.tn),
        recall,
        precision,
        f1,
    }
}

/// Rounds half away from zero at `decimals` places, tolerating binary
/// representation error just below a tie.
pub fn round_half_up(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let scaled = value * scale;
    let nudged = scaled + scaled.signum() * 1e-9 * scaled.abs().max(1.0);
    nudged.round() / scale
}

pub fn format_percent(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{:.2}%", round_half_up(v * 100.0, 2)),
        None => "undefined".to_string(),
    }
}

pub fn format_plain(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{:.2}", round_half_up(v, 2)),
        None => "undefined".to_string(),
    }
}

fn csv_value(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => "undefined".to_string(),
    }
}

impl EvalReport {
    /// `(name, value)` in the order accuracy, fpr, recall, precision, f1.
    pub fn named(&self) -> [(&'static str, Option<f64>); 5] {
        [
            ("accuracy", self.accuracy),
            ("fpr", self.fpr),
            ("recall", self.recall),
            ("precision", self.precision),
            ("f1", self.f1),
        ]
    }

    /// `metric,value` rows, counts first, full precision values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        for (name, v) in [
            ("tp", self.cm.tp),
            ("fp", self.cm.fp),
            ("tn", self.cm.tn),
            ("fn", self.cm.fn_),
        ] {
            out.push_str(&format!("{name},{v}\n"));
        }
        for (name, v) in self.named() {
            out.push_str(&format!("{name},{}\n", csv_value(v)));
        }
        out
    }

    /// Metrics as printed in tables: percentages and F1 to two decimals.
    pub fn display_values(&self) -> [String; 5] {
        [
            format_percent(self.accuracy),
            format_percent(self.fpr),
            format_percent(self.recall),
            format_percent(self.precision),
            format_plain(self.f1),
        ]
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [acc, fpr, rec, prec, f1] = self.display_values();
        writeln!(
            f,
            "TP={} FP={} TN={} FN={} (n={})",
            self.cm.tp,
            self.cm.fp,
            self.cm.tn,
            self.cm.fn_,
            self.cm.total()
        )?;
        writeln!(f, "accuracy  {acc}")?;
        writeln!(f, "FPR       {fpr}")?;
        writeln!(f, "recall    {rec}")?;
        writeln!(f, "precision {prec}")?;
        write!(f, "F1        {f1}")
    }
}
