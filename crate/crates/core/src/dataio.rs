//! Dataset files and the synthetic trial generator.
//!
//! A dataset directory holds `manifest.json` and one `trial_<i>.csv` per
//! trial. Each CSV has one row per sensor and one column per sample,
//! comma separated, no header, values written with 17 significant digits
//! so that a save/load round trip is exact.
//!
//! The generator stands in for real recordings. Every sensor carries a
//! damped sinusoid starting at the stimulus, scaled by a per-sensor gain,
//! plus white Gaussian noise on every sample:
//!
//! ```text
//! x[k][t] = gain_k · A · exp(−τ_t/τ) · sin(2π f τ_t) + σ z    (τ_t = (t − pre)·dt, t ≥ pre)
//! x[k][t] = σ z                                               (t < pre)
//! ```
//!
//! Randomness comes from SplitMix64 seeded with `seed`. Draw order is
//! fixed: `K` uniform gains in `[-1, 1)`, then Box–Muller normals for every
//! sample in trial, sensor, time order, using both outputs of each pair
//! (cosine branch first).

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::denoise::{Epoch, TrialSet, DEFAULT_POST_SAMPLES, DEFAULT_PRE_SAMPLES, DEFAULT_SENSORS};
use crate::matrix::Matrix;
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const UNIT: &str = "fT";
pub const DEFAULT_TRIALS: usize = 10;
pub const SAMPLE_PERIOD_MS: f64 = 1.0;

pub fn trial_file_name(index: usize) -> String {
    format!("trial_{index}.csv")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub sensors: usize,
    pub pre_samples: usize,
    pub post_samples: usize,
    pub trials: usize,
    pub unit: String,
    pub sample_period_ms: f64,
}

impl Manifest {
    pub fn new(sensors: usize, epoch: Epoch, trials: usize) -> Self {
        Self {
            sensors,
            pre_samples: epoch.pre_samples,
            post_samples: epoch.post_samples,
            trials,
            unit: UNIT.to_string(),
            sample_period_ms: SAMPLE_PERIOD_MS,
        }
    }

    pub fn epoch(&self) -> Epoch {
        Epoch::new(self.pre_samples, self.post_samples)
    }

    pub fn samples(&self) -> usize {
        self.pre_samples + self.post_samples
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensors == 0 || self.pre_samples == 0 || self.post_samples == 0 || self.trials == 0 {
            return Err(Error::Parameter(format!(
                "manifest counts must be at least 1: {self:?}"
            )));
        }
        if self.unit != UNIT {
            return Err(Error::Parameter(format!(
                "manifest unit must be \"{UNIT}\", got \"{}\"",
                self.unit
            )));
        }
        if !(self.sample_period_ms > 0.0) || !self.sample_period_ms.is_finite() {
            return Err(Error::Parameter(format!(
                "sample period must be positive, got {}",
                self.sample_period_ms
            )));
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub sensors: usize,
    pub pre_samples: usize,
    pub post_samples: usize,
    pub trials: usize,
    /// Noise standard deviation, fT.
    pub noise_sigma: f64,
    /// Evoked response peak amplitude, fT.
    pub response_amp: f64,
    pub response_freq_hz: f64,
    pub response_decay_ms: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            sensors: DEFAULT_SENSORS,
            pre_samples: DEFAULT_PRE_SAMPLES,
            post_samples: DEFAULT_POST_SAMPLES,
            trials: DEFAULT_TRIALS,
            noise_sigma: 100.0,
            response_amp: 200.0,
            response_freq_hz: 10.0,
            response_decay_ms: 100.0,
        }
    }
}

impl SyntheticConfig {
    pub fn epoch(&self) -> Epoch {
        Epoch::new(self.pre_samples, self.post_samples)
    }

    pub fn manifest(&self) -> Manifest {
        Manifest::new(self.sensors, self.epoch(), self.trials)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensors == 0 || self.post_samples == 0 || self.trials == 0 {
            return Err(Error::Parameter(
                "sensors, post_samples and trials must be at least 1".into(),
            ));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::Parameter(format!(
                "noise sigma must be finite and non-negative, got {}",
                self.noise_sigma
            )));
        }
        if !(self.response_decay_ms > 0.0) {
            return Err(Error::Parameter(format!(
                "response decay must be positive, got {}",
                self.response_decay_ms
            )));
        }
        if !self.response_amp.is_finite() || !self.response_freq_hz.is_finite() {
            return Err(Error::Parameter("response amplitude and frequency must be finite".into()));
        }
        Ok(())
    }
}

/// SplitMix64 generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
    spare: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed, spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller; pairs are consumed cosine first.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

pub fn generate_synthetic(config: &SyntheticConfig) -> Result<TrialSet> {
    config.validate()?;
    let mut rng = SplitMix64::new(config.seed);
    let gains: Vec<f64> = (0..config.sensors).map(|_| 2.0 * rng.next_f64() - 1.0).collect();

    let epoch = config.epoch();
    let total = epoch.total();
    let response: Vec<f64> = (0..config.post_samples)
        .map(|t| {
            let ms = t as f64 * SAMPLE_PERIOD_MS;
            config.response_amp
                * (-ms / config.response_decay_ms).exp()
                * (std::f64::consts::TAU * config.response_freq_hz * ms / 1000.0).sin()
        })
        .collect();

    let mut trials = Vec::with_capacity(config.trials);
    for _ in 0..config.trials {
        let mut m = Matrix::zeros(config.sensors, total);
        for (k, &gain) in gains.iter().enumerate() {
            let row = m.row_mut(k);
            for (t, v) in row.iter_mut().enumerate() {
                let clean = if t >= epoch.pre_samples {
                    gain * response[t - epoch.pre_samples]
                } else {
                    0.0
                };
                *v = clean + config.noise_sigma * rng.next_gaussian();
            }
        }
        trials.push(m);
    }
    TrialSet::new(trials, epoch)
}

/// Writes `matrix` as CSV with 17 significant digits.
pub fn save_matrix(matrix: &Matrix, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_matrix(matrix, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

fn write_matrix<W: Write>(matrix: &Matrix, out: &mut W) -> std::io::Result<()> {
    for row in matrix.iter_rows() {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.write_all(b",")?;
            }
            write!(out, "{v:.16e}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a CSV matrix, optionally checking its row/column counts.
pub fn load_matrix(path: &Path, rows: Option<usize>, cols: Option<usize>) -> Result<Matrix> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line: line as usize,
        message,
    };

    let mut data = Vec::new();
    let mut width = cols;
    let mut count = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(count as u64 + 1, |p| p.line());
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(parse_err(
                line,
                format!("expected {expected} columns, found {}", record.len()),
            ));
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                parse_err(line, format!("column {}: cannot parse {field:?} as a number", col + 1))
            })?;
            data.push(v);
        }
        count += 1;
    }
    if count == 0 {
        return Err(parse_err(1, "empty data file".into()));
    }
    if let Some(expected) = rows {
        if count != expected {
            return Err(Error::CountMismatch {
                path: path.to_path_buf(),
                what: "rows",
                expected,
                found: count,
            });
        }
    }
    Matrix::from_vec(count, width.unwrap_or(0), data)
}

/// Loads the trial files named in `data_paths` against a manifest.
pub fn load_trials(manifest_path: &Path, data_paths: &[PathBuf]) -> Result<TrialSet> {
    let manifest = Manifest::read(manifest_path)?;
    if data_paths.len() != manifest.trials {
        return Err(Error::CountMismatch {
            path: manifest_path.to_path_buf(),
            what: "trial files",
            expected: manifest.trials,
            found: data_paths.len(),
        });
    }
    let trials = data_paths
        .iter()
        .map(|p| load_matrix(p, Some(manifest.sensors), Some(manifest.samples())))
        .collect::<Result<Vec<_>>>()?;
    TrialSet::new(trials, manifest.epoch())
}

/// Loads `manifest.json` and `trial_<i>.csv` from `dir`.
pub fn load_dataset(dir: &Path) -> Result<(Manifest, TrialSet)> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = Manifest::read(&manifest_path)?;
    let paths: Vec<PathBuf> = (0..manifest.trials).map(|i| dir.join(trial_file_name(i))).collect();
    let set = load_trials(&manifest_path, &paths)?;
    Ok((manifest, set))
}

/// Writes `manifest.json` and one CSV per trial into `dir`, creating it.
pub fn save_dataset(dir: &Path, manifest: &Manifest, trials: &TrialSet) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    manifest.validate()?;
    if manifest.trials != trials.len()
        || manifest.sensors != trials.sensors()
        || manifest.epoch() != trials.epoch()
    {
        return Err(Error::Structure("manifest does not describe the trial set".into()));
    }
    manifest.write(&dir.join(MANIFEST_FILE))?;
    for (i, trial) in trials.trials().iter().enumerate() {
        save_matrix(trial, &dir.join(trial_file_name(i)))?;
    }
    Ok(())
}
