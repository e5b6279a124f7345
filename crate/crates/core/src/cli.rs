//! Command-line front end.
//!
//! Exit codes: 0 on success (and for a `Normal` detection), 1 for an
//! `Anomalous` detection, 2 for usage and runtime errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigFile;
use crate::dataset::{load_dataset, parse_timestamp, GrayImage, Label};
use crate::error::{Error, Result};
use crate::eval::{combination_table, format_table, sweep, sweep_csv, SplitUnit, TableRow, TrainedPipeline};
use crate::synthgen::{gen_dataset, GenSpec};

#[derive(Debug, Parser)]
#[command(name = "pupguard", version, about = "Puppet-attack detection for fingerprint press pairs")]
pub struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for generation, splits and forests.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

/// Config overrides shared by the commands that build a pipeline.
#[derive(Debug, Args, Default)]
pub struct Overrides {
    /// lbp, hog or embedding.
    #[arg(long)]
    pub extractor: Option<String>,
    /// concat, cross, none or timing_only.
    #[arg(long)]
    pub fusion: Option<String>,
    /// ocsvm, iforest or lof.
    #[arg(long)]
    pub classifier: Option<String>,
    #[arg(long)]
    pub embedding_file: Option<PathBuf>,
    /// Any config key, as key=value. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset directory.
    Gen {
        #[arg(long)]
        normal: usize,
        #[arg(long)]
        attack: usize,
        #[arg(long)]
        subjects: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a pipeline on legitimate pairs and write the model bundle.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Evaluate a model on a labeled test set, or run every combination.
    Eval {
        #[arg(long, required_unless_present = "paper_table")]
        model: Option<PathBuf>,
        #[arg(long)]
        test: PathBuf,
        /// Fit and evaluate all extractor x classifier x fusion combinations.
        #[arg(long, requires = "train")]
        paper_table: bool,
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Score one attempt.
    Detect {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, required_unless_present = "dataset", requires_all = ["img2", "t1", "t2"])]
        img1: Option<PathBuf>,
        #[arg(long)]
        img2: Option<PathBuf>,
        /// First capture time, yyyymmddHHMMSS.xxxxxx.
        #[arg(long, allow_hyphen_values = true)]
        t1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t2: Option<String>,
        /// Take the pair from this dataset directory instead.
        #[arg(long, requires = "pair", conflicts_with = "img1")]
        dataset: Option<PathBuf>,
        #[arg(long)]
        pair: Option<String>,
    },
    /// Train on growing fractions of a training set.
    Sweep {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8,1.0")]
        fractions: Vec<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Split whole subjects instead of pairs.
        #[arg(long)]
        by_subject: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn load_config(cli: &Cli, overrides: Option<&Overrides>) -> Result<ConfigFile> {
    let mut cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    if let Some(o) = overrides {
        for (key, value) in [
            ("extractor", &o.extractor),
            ("fusion", &o.fusion),
            ("classifier", &o.classifier),
        ] {
            if let Some(v) = value {
                cfg.set(key, &format!("\"{v}\""))?;
            }
        }
        if let Some(path) = &o.embedding_file {
            let text = path.to_string_lossy();
            cfg.set("embedding_file", &toml::Value::String(text.into_owned()).to_string())?;
        }
        for assignment in &o.set {
            cfg.set_assignment(assignment)?;
        }
    }
    Ok(cfg)
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("features,classifier,fusion,accuracy,fpr,recall,precision,f1\n");
    for r in rows {
        let fusion = format!("{:?}", r.fusion).to_lowercase();
        let values = match &r.report {
            Ok(rep) => rep.display_values().join(","),
            Err(_) => "error,error,error,error,error".to_string(),
        };
        out.push_str(&format!("{},{},{fusion},{values}\n", r.extractor.name(), r.classifier.name()));
    }
    out
}

fn run_command(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Gen {
            normal,
            attack,
            subjects,
            out,
        } => {
            let g = load_config(cli, None)?.generator()?;
            let spec = GenSpec {
                n_normal: *normal,
                n_attack: *attack,
                n_subjects: subjects.unwrap_or(g.subjects),
                attack: g.attack(),
                seed: cli.seed.unwrap_or(0),
                population_seed: g.population_seed,
            };
            let ds = gen_dataset(&spec, out)?;
            println!(
                "wrote {} pairs to {} ({} legit, {} attack)",
                ds.len(),
                out.display(),
                ds.count_label(Label::Legitimate),
                ds.count_label(Label::Attack)
            );
            Ok(0)
        }
        Command::Train {
            train,
            model,
            overrides,
        } => {
            let cfg = load_config(cli, Some(overrides))?.pipeline()?;
            let ds = load_dataset(train)?;
            let pipeline = TrainedPipeline::fit(&ds, &cfg)?;
            pipeline.save(model)?;
            println!("trained on {} pairs; model written to {}", ds.len(), model.display());
            Ok(0)
        }
        Command::Eval {
            model,
            test,
            paper_table,
            train,
            csv,
            overrides,
        } => {
            let test_ds = load_dataset(test)?;
            if *paper_table {
                let cfg = load_config(cli, Some(overrides))?.pipeline()?;
                let train_path = train.as_ref().ok_or_else(|| Error::Config("--paper-table needs --train".into()))?;
                let train_ds = load_dataset(train_path)?;
                let rows = combination_table(&train_ds, &test_ds, &cfg);
                print!("{}", format_table(&rows));
                if let Some(path) = csv {
                    write_output(path, &table_csv(&rows))?;
                }
                return Ok(0);
            }
            let model = model.as_ref().ok_or_else(|| Error::Config("--model is required".into()))?;
            let pipeline = TrainedPipeline::load(model)?;
            let evaluation = pipeline.evaluate(&test_ds)?;
            println!("{}", evaluation.report);
            if let Some(path) = csv {
                write_output(path, &evaluation.report.to_csv())?;
            }
            Ok(0)
        }
        Command::Detect {
            model,
            img1,
            img2,
            t1,
            t2,
            dataset,
            pair,
        } => {
            let pipeline = TrainedPipeline::load(model)?;
            let verdict = match (dataset, pair) {
                (Some(dir), Some(id)) => {
                    let ds = load_dataset(dir)?;
                    let p = ds
                        .iter()
                        .find(|p| &p.pair_id == id)
                        .ok_or_else(|| Error::domain(format!("no pair `{id}` in {}", dir.display())))?;
                    pipeline.score_pair(p)?
                }
                _ => {
                    let missing = || Error::Config("--img1, --img2, --t1 and --t2 are required".into());
                    let a = GrayImage::read_pgm(img1.as_ref().ok_or_else(missing)?)?;
                    let b = GrayImage::read_pgm(img2.as_ref().ok_or_else(missing)?)?;
                    let t1 = parse_timestamp(t1.as_ref().ok_or_else(missing)?)?;
                    let t2 = parse_timestamp(t2.as_ref().ok_or_else(missing)?)?;
                    pipeline.detect(&a, &b, t1, t2)?
                }
            };
            println!("{:?} score={} margin={}", verdict.prediction, verdict.score, verdict.margin);
            Ok(if verdict.is_normal() { 0 } else { 1 })
        }
        Command::Sweep {
            train,
            test,
            fractions,
            csv,
            by_subject,
            overrides,
        } => {
            let cfg = load_config(cli, Some(overrides))?.pipeline()?;
            let train_ds = load_dataset(train)?;
            let test_ds = load_dataset(test)?;
            let unit = if *by_subject { SplitUnit::Subject } else { SplitUnit::Pair };
            let rows = sweep(&train_ds, &test_ds, fractions, &cfg, cli.seed.unwrap_or(cfg.seed), unit)?;
            let text = sweep_csv(&rows);
            print!("{text}");
            if let Some(path) = csv {
                write_output(path, &text)?;
            }
            Ok(0)
        }
    }
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match run_command(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
