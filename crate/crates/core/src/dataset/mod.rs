//! On-disk dataset format, press pairs and train/eval splits.
//!
//! A dataset directory holds a `manifest.csv` with the fixed header
//! `pair_id,subject_id,img1,img2,t1,t2,label` and the referenced binary PGM
//! images (P5, 160x160, maxval 255). Image paths in the manifest are relative
//! to the dataset directory. Labels are `legit`, `attack`, or empty.

mod image;
mod timestamp;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use self::image::{GrayImage, CANONICAL_SIDE};
pub use self::timestamp::{parse_timestamp, CaptureInstant};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const MANIFEST_HEADER: [&str; 7] = ["pair_id", "subject_id", "img1", "img2", "t1", "t2", "label"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Legitimate,
    Attack,
    Unlabeled,
}

impl Label {
    pub fn as_manifest_str(self) -> &'static str {
        match self {
            Label::Legitimate => "legit",
            Label::Attack => "attack",
            Label::Unlabeled => "",
        }
    }

    pub fn from_manifest_str(s: &str) -> Option<Self> {
        match s {
            "legit" => Some(Label::Legitimate),
            "attack" => Some(Label::Attack),
            "" => Some(Label::Unlabeled),
            _ => None,
        }
    }
}

/// One authentication attempt: two consecutive presses with different fingers.
#[derive(Debug, Clone, PartialEq)]
pub struct PressPair {
    pub pair_id: String,
    pub subject_id: String,
    /// Image ids are the image file names without extension.
    pub first_id: String,
    pub second_id: String,
    pub first: GrayImage,
    pub second: GrayImage,
    pub t1: CaptureInstant,
    pub t2: CaptureInstant,
    pub label: Label,
}

impl PressPair {
    /// Inter-press interval in seconds.
    pub fn interval(&self) -> Result<f64> {
        press_interval(self)
    }
}

/// Seconds between the two captures, at microsecond resolution.
pub fn press_interval(pair: &PressPair) -> Result<f64> {
    let delta = pair.t2 - pair.t1;
    if delta < 0 {
        return Err(Error::Ordering(-delta));
    }
    Ok(delta as f64 / 1e6)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub pairs: Vec<PressPair>,
    pub source_dir: PathBuf,
}

impl Dataset {
    pub fn new(pairs: Vec<PressPair>, source_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut seen = HashSet::new();
        for pair in &pairs {
            if !seen.insert(pair.pair_id.as_str()) {
                return Err(Error::domain(format!("duplicate pair_id `{}`", pair.pair_id)));
            }
        }
        Ok(Dataset {
            pairs,
            source_dir: source_dir.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PressPair> {
        self.pairs.iter()
    }

    pub fn count_label(&self, label: Label) -> usize {
        self.pairs.iter().filter(|p| p.label == label).count()
    }

    pub fn pair_ids(&self) -> Vec<&str> {
        self.pairs.iter().map(|p| p.pair_id.as_str()).collect()
    }

    fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            pairs: indices.iter().map(|&i| self.pairs[i].clone()).collect(),
            source_dir: self.source_dir.clone(),
        }
    }
}

fn image_stem(rel: &str) -> String {
    Path::new(rel)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| rel.to_string())
}

/// Loads `dir/manifest.csv` and every image it references, in row order.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let manifest = dir.join(MANIFEST_FILE);
    if !manifest.is_file() {
        return Err(Error::io(
            &manifest,
            std::io::Error::new(std::io::ErrorKind::NotFound, "manifest not found"),
        ));
    }
    let row_err = |row: usize, message: String| Error::Manifest {
        path: manifest.clone(),
        row,
        message,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(&manifest)
        .map_err(|e| row_err(0, e.to_string()))?;
    let header = reader.headers().map_err(|e| row_err(0, e.to_string()))?.clone();
    if header.iter().ne(MANIFEST_HEADER.iter().copied()) {
        return Err(row_err(
            0,
            format!("header must be `{}`", MANIFEST_HEADER.join(",")),
        ));
    }

    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| row_err(row, e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("").trim();

        let pair_id = field(0).to_string();
        if pair_id.is_empty() {
            return Err(row_err(row, "empty pair_id".into()));
        }
        if !seen.insert(pair_id.clone()) {
            return Err(row_err(row, format!("duplicate pair_id `{pair_id}`")));
        }
        let load = |rel: &str| -> Result<GrayImage> {
            let path = dir.join(rel);
            if !path.is_file() {
                return Err(row_err(row, format!("missing image {}", path.display())));
            }
            let img = GrayImage::read_pgm(&path).map_err(|e| row_err(row, e.to_string()))?;
            if !img.is_canonical() {
                return Err(row_err(
                    row,
                    format!(
                        "{} is {}x{}, expected {CANONICAL_SIDE}x{CANONICAL_SIDE}",
                        path.display(),
                        img.width(),
                        img.height()
                    ),
                ));
            }
            Ok(img)
        };
        let first = load(field(2))?;
        let second = load(field(3))?;
        let t1 = parse_timestamp(field(4)).map_err(|e| row_err(row, e.to_string()))?;
        let t2 = parse_timestamp(field(5)).map_err(|e| row_err(row, e.to_string()))?;
        if t2 < t1 {
            return Err(row_err(row, Error::Ordering(t1 - t2).to_string()));
        }
        let label = Label::from_manifest_str(field(6))
            .ok_or_else(|| row_err(row, format!("unknown label `{}`", field(6))))?;

        pairs.push(PressPair {
            pair_id,
            subject_id: field(1).to_string(),
            first_id: image_stem(field(2)),
            second_id: image_stem(field(3)),
            first,
            second,
            t1,
            t2,
            label,
        });
    }
    Ok(Dataset {
        pairs,
        source_dir: dir.to_path_buf(),
    })
}

/// Writes `pairs` as a dataset directory; images go to `images/<image_id>.pgm`.
pub fn write_dataset(dir: &Path, pairs: &[PressPair]) -> Result<()> {
    let images = dir.join("images");
    fs::create_dir_all(&images).map_err(|e| Error::io(&images, e))?;
    let manifest = dir.join(MANIFEST_FILE);
    let mut writer = csv::Writer::from_path(&manifest).map_err(|e| Error::Manifest {
        path: manifest.clone(),
        row: 0,
        message: e.to_string(),
    })?;
    let csv_err = |row: usize, e: csv::Error| Error::Manifest {
        path: manifest.clone(),
        row,
        message: e.to_string(),
    };
    writer.write_record(MANIFEST_HEADER).map_err(|e| csv_err(0, e))?;
    for (idx, pair) in pairs.iter().enumerate() {
        let rel1 = format!("images/{}.pgm", pair.first_id);
        let rel2 = format!("images/{}.pgm", pair.second_id);
        pair.first.write_pgm(&dir.join(&rel1))?;
        pair.second.write_pgm(&dir.join(&rel2))?;
        writer
            .write_record([
                pair.pair_id.as_str(),
                pair.subject_id.as_str(),
                rel1.as_str(),
                rel2.as_str(),
                &pair.t1.to_string(),
                &pair.t2.to_string(),
                pair.label.as_manifest_str(),
            ])
            .map_err(|e| csv_err(idx + 1, e))?;
    }
    writer.flush().map_err(|e| Error::io(&manifest, e))
}

fn check_fraction(train_fraction: f64) -> Result<()> {
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(Error::domain(format!(
            "train fraction {train_fraction} not in (0, 1]"
        )));
    }
    Ok(())
}

/// Seeded shuffle of all indices; the same seed always gives the same order.
pub fn shuffled_order(len: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Pair-level split. The training part is the first `round(fraction * n)`
/// entries of a per-seed shuffle, so smaller fractions under one seed are
/// prefixes of larger ones. Both parts keep the original row order.
pub fn split_dataset(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    check_fraction(train_fraction)?;
    if ds.is_empty() {
        return Err(Error::domain("cannot split an empty dataset"));
    }
    let n_train = (train_fraction * ds.len() as f64).round() as usize;
    let order = shuffled_order(ds.len(), seed);
    let mut train: Vec<usize> = order[..n_train].to_vec();
    let mut eval: Vec<usize> = order[n_train..].to_vec();
    train.sort_unstable();
    eval.sort_unstable();
    Ok((ds.subset(&train), ds.subset(&eval)))
}

/// Subject-level split: subjects are shuffled per seed and taken whole until
/// the training part holds at least `round(fraction * n)` pairs.
pub fn split_dataset_by_subject(
    ds: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    check_fraction(train_fraction)?;
    if ds.is_empty() {
        return Err(Error::domain("cannot split an empty dataset"));
    }
    let mut subjects: Vec<&str> = Vec::new();
    for pair in &ds.pairs {
        if !subjects.contains(&pair.subject_id.as_str()) {
            subjects.push(&pair.subject_id);
        }
    }
    let target = (train_fraction * ds.len() as f64).round() as usize;
    let mut chosen = HashSet::new();
    let mut taken = 0;
    for idx in shuffled_order(subjects.len(), seed) {
        if taken >= target {
            break;
        }
        chosen.insert(subjects[idx]);
        taken += ds.pairs.iter().filter(|p| p.subject_id == subjects[idx]).count();
    }
    let (train, eval): (Vec<usize>, Vec<usize>) =
        (0..ds.len()).partition(|&i| chosen.contains(ds.pairs[i].subject_id.as_str()));
    Ok((ds.subset(&train), ds.subset(&eval)))
}
