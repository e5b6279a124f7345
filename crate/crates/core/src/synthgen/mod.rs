//! Synthetic press pairs for normal and coerced authentication attempts.
//!
//! A coerced attempt is anomalous in exactly one channel: with probability
//! `channel_mix` the inter-press interval is shifted, otherwise the second
//! image is pressed harder, off-centre, rotated and smeared. Random draws for
//! the attack mode, the interval, each image and the attack perturbation come
//! from separate ChaCha streams of the pair seed, so the untouched channel
//! of an attack pair is bit-identical to the normal pair with the same seed.

mod ridge;

use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use self::ridge::{darkness_centroid, gen_fingerprint_image, Press};
use crate::dataset::{load_dataset, parse_timestamp, write_dataset, CaptureInstant, Dataset, Label, PressPair};
use crate::error::{Error, Result};

/// Shortest interval ever emitted, seconds.
pub const MIN_INTERVAL: f64 = 1e-3;
const BASE_TIME: &str = "20240301090000.000000";

const STREAM_MODE: u64 = 0;
const STREAM_TIMING: u64 = 1;
const STREAM_FIRST: u64 = 2;
const STREAM_SECOND: u64 = 3;
const STREAM_ATTACK: u64 = 4;
const STREAM_CLOCK: u64 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectProfile {
    pub subject_id: String,
    /// Cycles per pixel.
    pub ridge_frequency: f64,
    pub ridge_orientation_field_seed: u64,
    pub base_interval_mean: f64,
    pub base_interval_std: f64,
    pub base_pressure: f64,
}

impl SubjectProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_interval_std > 0.0) {
            return Err(Error::domain("interval std must be positive"));
        }
        if !(self.base_interval_mean > 3.0 * self.base_interval_std) {
            return Err(Error::domain("interval mean must exceed three standard deviations"));
        }
        if !(self.base_pressure > 0.0 && self.base_pressure <= 1.0) {
            return Err(Error::domain("base pressure must be in (0, 1]"));
        }
        if !(self.ridge_frequency > 0.0 && self.ridge_frequency < 0.5) {
            return Err(Error::domain("ridge frequency must be in (0, 0.5) cycles/pixel"));
        }
        Ok(())
    }

    /// Subject `index` of a deterministic population.
    pub fn from_population(index: usize, population_seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(population_seed);
        rng.set_stream(index as u64);
        SubjectProfile {
            subject_id: format!("s{index:03}"),
            ridge_frequency: rng.random_range(0.09..0.14),
            ridge_orientation_field_seed: rng.next_u64(),
            base_interval_mean: rng.random_range(1.3..1.7),
            base_interval_std: rng.random_range(0.15..0.25),
            base_pressure: rng.random_range(0.85..1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackParams {
    /// Interval mean shift in units of the subject's interval std.
    pub interval_shift_sigmas: f64,
    /// Multiplicative pressure increase (0.4 means +40%).
    pub pressure_gain: f64,
    pub center_offset_px: f64,
    pub rotation_deg: f64,
    pub smear_length_px: u32,
    /// Fraction of attacks that are anomalous in timing only.
    pub channel_mix: f64,
}

impl Default for AttackParams {
    fn default() -> Self {
        AttackParams {
            interval_shift_sigmas: 4.0,
            pressure_gain: 0.4,
            center_offset_px: 20.0,
            rotation_deg: 25.0,
            smear_length_px: 6,
            channel_mix: 0.5,
        }
    }
}

impl AttackParams {
    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            self.interval_shift_sigmas,
            self.pressure_gain,
            self.center_offset_px,
            self.rotation_deg,
        ];
        if non_negative.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::domain("attack magnitudes must be finite and non-negative"));
        }
        if !(0.0..=1.0).contains(&self.channel_mix) {
            return Err(Error::domain("channel_mix must be in [0, 1]"));
        }
        if non_negative.iter().all(|&v| v == 0.0) && self.smear_length_px == 0 {
            return Err(Error::domain("an attack profile needs at least one non-zero perturbation"));
        }
        Ok(())
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Natural per-press variation: small offset, rotation and force changes.
fn natural_press(rng: &mut ChaCha8Rng, finger: usize) -> (Press, u64) {
    let radius = 5.0 * rng.random::<f64>().sqrt();
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let press = Press {
        pressure: rng.random_range(0.9..=1.1),
        center_offset: (radius * angle.cos(), radius * angle.sin()),
        rotation_deg: rng.random_range(-10.0..=10.0),
        smear_px: 0,
        smear_angle_deg: 0.0,
        finger,
    };
    (press, rng.next_u64())
}

fn sample_interval(rng: &mut ChaCha8Rng, mean: f64, std: f64) -> f64 {
    Normal::new(mean, std)
        .expect("validated std")
        .sample(rng)
        .max(MIN_INTERVAL)
}

/// One attempt by `profile`; `attack = None` gives a legitimate attempt.
pub fn gen_press_pair(
    profile: &SubjectProfile,
    attack: Option<&AttackParams>,
    rng_seed: u64,
) -> Result<PressPair> {
    profile.validate()?;
    if let Some(a) = attack {
        a.validate()?;
    }
    let timing_attack = match attack {
        Some(a) => stream(rng_seed, STREAM_MODE).random::<f64>() < a.channel_mix,
        None => false,
    };

    let mut mean = profile.base_interval_mean;
    if let (Some(a), true) = (attack, timing_attack) {
        mean += a.interval_shift_sigmas * profile.base_interval_std;
    }
    let interval = sample_interval(&mut stream(rng_seed, STREAM_TIMING), mean, profile.base_interval_std);

    let (first_press, first_seed) = natural_press(&mut stream(rng_seed, STREAM_FIRST), 0);
    let (mut second_press, second_seed) = natural_press(&mut stream(rng_seed, STREAM_SECOND), 1);
    if let (Some(a), false) = (attack, timing_attack) {
        let mut rng = stream(rng_seed, STREAM_ATTACK);
        let dir = rng.random_range(0.0..std::f64::consts::TAU);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        second_press.pressure = (second_press.pressure * (1.0 + a.pressure_gain)).min(2.0);
        second_press.center_offset.0 += a.center_offset_px * dir.cos();
        second_press.center_offset.1 += a.center_offset_px * dir.sin();
        second_press.rotation_deg += sign * a.rotation_deg;
        second_press.smear_px = a.smear_length_px;
        second_press.smear_angle_deg = rng.random_range(0.0..180.0);
    }

    let base = parse_timestamp(BASE_TIME)?;
    let day_offset = stream(rng_seed, STREAM_CLOCK).random_range(0..30 * 86_400_000_000i64);
    let t1 = base.checked_add_micros(day_offset)?;
    let t2 = t1.checked_add_micros((interval * 1e6).round() as i64)?;

    let pair_id = format!("{}-{rng_seed:016x}", profile.subject_id);
    Ok(PressPair {
        first_id: format!("{pair_id}_1"),
        second_id: format!("{pair_id}_2"),
        first: gen_fingerprint_image(profile, &first_press, first_seed),
        second: gen_fingerprint_image(profile, &second_press, second_seed),
        pair_id,
        subject_id: profile.subject_id.clone(),
        t1,
        t2,
        label: if attack.is_some() {
            Label::Attack
        } else {
            Label::Legitimate
        },
    })
}

/// Everything that determines a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n_normal: usize,
    pub n_attack: usize,
    pub n_subjects: usize,
    pub attack: AttackParams,
    pub seed: u64,
    /// Subjects are shared by every dataset generated with the same value,
    /// so training and test sets describe the same enrolled users.
    pub population_seed: u64,
}

impl GenSpec {
    pub fn new(n_normal: usize, n_attack: usize, n_subjects: usize, seed: u64) -> Self {
        GenSpec {
            n_normal,
            n_attack,
            n_subjects,
            attack: AttackParams::default(),
            seed,
            population_seed: 0,
        }
    }
}

/// Generates the pairs of `spec` in memory: legitimate pairs first, then
/// attacks, subjects assigned round-robin. Pair ids are `g<seed>-<n>`, so
/// datasets generated with different seeds never share image ids.
pub fn gen_pairs(spec: &GenSpec) -> Result<Vec<PressPair>> {
    if spec.n_subjects == 0 {
        return Err(Error::domain("need at least one subject"));
    }
    if spec.n_attack > 0 {
        spec.attack.validate()?;
    }
    let profiles: Vec<SubjectProfile> = (0..spec.n_subjects)
        .map(|i| SubjectProfile::from_population(i, spec.population_seed))
        .collect();
    let mut seeds = stream(spec.seed, u64::MAX);
    let base = parse_timestamp(BASE_TIME)?;
    let total = spec.n_normal + spec.n_attack;
    let mut pairs = Vec::with_capacity(total);
    for i in 0..total {
        let profile = &profiles[i % spec.n_subjects];
        let is_attack = i >= spec.n_normal;
        let pair_seed = seeds.next_u64();
        let mut pair = gen_press_pair(profile, is_attack.then_some(&spec.attack), pair_seed)?;
        let id = format!("g{}-{:05}", spec.seed, i + 1);
        // one attempt every ten minutes
        let dt = pair.t2 - pair.t1;
        pair.t1 = CaptureInstant::from_micros(base.micros_since_epoch() + i as i64 * 600_000_000)?;
        pair.t2 = pair.t1.checked_add_micros(dt)?;
        pair.first_id = format!("{id}_1");
        pair.second_id = format!("{id}_2");
        pair.pair_id = id;
        pairs.push(pair);
    }
    Ok(pairs)
}

/// Writes a dataset directory for `spec` and loads it back.
pub fn gen_dataset(spec: &GenSpec, out_dir: &Path) -> Result<Dataset> {
    let pairs = gen_pairs(spec)?;
    write_dataset(out_dir, &pairs)?;
    load_dataset(out_dir)
}
