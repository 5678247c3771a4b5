//! Concatenate, decompose, estimate and reconstruct.
//!
//! The post-stimulus window of every sensor is laid end to end into one
//! vector of `K·N` samples (sensor-major), decomposed over `J` levels, and
//! the level-`J` approximation coefficients, rescaled by `2^{-J/2}`, become
//! one amplitude estimate per sensor in index order. Sensors beyond the
//! number of approximation coefficients are filled with their own temporal
//! mean; surplus coefficients are dropped. The denoised output holds each
//! sensor's estimate constant over the post-stimulus window.

use crate::filters::{FilterPair, Wavelet};
use crate::matrix::Matrix;
use crate::par;
use crate::transform::{approx_len, dwt_analyze, dwt_synthesize};
use crate::{Error, Result};

/// Default sensor count.
pub const DEFAULT_SENSORS: usize = 274;
/// Pre-stimulus samples (1 ms each).
pub const DEFAULT_PRE_SAMPLES: usize = 120;
/// Post-stimulus samples (1 ms each).
pub const DEFAULT_POST_SAMPLES: usize = 241;
pub const DEFAULT_LEVELS: usize = 8;

/// Split of each trial into pre- and post-stimulus samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Epoch {
    pub pre_samples: usize,
    pub post_samples: usize,
}

impl Epoch {
    pub fn new(pre_samples: usize, post_samples: usize) -> Self {
        Self {
            pre_samples,
            post_samples,
        }
    }

    pub fn total(&self) -> usize {
        self.pre_samples + self.post_samples
    }
}

impl Default for Epoch {
    fn default() -> Self {
        Self::new(DEFAULT_PRE_SAMPLES, DEFAULT_POST_SAMPLES)
    }
}

/// Stimulus-aligned recordings, each `K × (pre + post)` in fT.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialSet {
    trials: Vec<Matrix>,
    epoch: Epoch,
}

impl TrialSet {
    pub fn new(trials: Vec<Matrix>, epoch: Epoch) -> Result<Self> {
        let first = trials
            .first()
            .ok_or_else(|| Error::Structure("trial set needs at least one trial".into()))?;
        if first.rows() == 0 {
            return Err(Error::Structure("trials need at least one sensor".into()));
        }
        if epoch.post_samples == 0 {
            return Err(Error::Structure("post-stimulus window is empty".into()));
        }
        if first.cols() != epoch.total() {
            return Err(Error::Structure(format!(
                "trials have {} samples but pre + post = {}",
                first.cols(),
                epoch.total()
            )));
        }
        if let Some(i) = trials.iter().position(|t| t.shape() != first.shape()) {
            return Err(Error::Structure(format!(
                "trial {i} is {}x{}, trial 0 is {}x{}",
                trials[i].rows(),
                trials[i].cols(),
                first.rows(),
                first.cols()
            )));
        }
        Ok(Self { trials, epoch })
    }

    pub fn trials(&self) -> &[Matrix] {
        &self.trials
    }

    pub fn trial(&self, i: usize) -> Option<&Matrix> {
        self.trials.get(i)
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn sensors(&self) -> usize {
        self.trials[0].rows()
    }

    pub fn epoch(&self) -> Epoch {
        self.epoch
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Denoise only the trial with this index.
    SingleTrial(usize),
    /// Denoise every trial, then average.
    MultiTrial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DenoiseConfig {
    pub wavelet: Wavelet,
    pub levels: usize,
    pub mode: Mode,
}

impl DenoiseConfig {
    pub fn new(wavelet: Wavelet, levels: usize, mode: Mode) -> Self {
        Self {
            wavelet,
            levels,
            mode,
        }
    }

    fn filters(&self) -> Result<FilterPair> {
        if self.levels == 0 {
            return Err(Error::Parameter("decomposition depth must be at least 1".into()));
        }
        self.wavelet.filters()
    }
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        Self::new(Wavelet::AdjustedHaar(2), DEFAULT_LEVELS, Mode::MultiTrial)
    }
}

/// Per-sensor amplitude estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct SensorEstimate {
    pub values: Vec<f64>,
    /// Sensors taken from approximation coefficients.
    pub wavelet_count: usize,
    /// Sensors filled with their temporal mean.
    pub mean_filled_count: usize,
}

/// Soft-thresholding rule for [`threshold_denoise`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    /// `λ = σ √(2 ln n)` with `σ = median(|d₁|) / 0.6745`.
    #[default]
    Universal,
}

/// Number of sensors estimated from wavelet coefficients for `K` sensors,
/// `N` post-stimulus samples and `J` levels.
pub fn wavelet_sensor_count(sensors: usize, post: usize, levels: usize) -> usize {
    approx_len(sensors * post, levels).min(sensors)
}

fn check_trial(trial: &Matrix, epoch: Epoch) -> Result<()> {
    if trial.cols() != epoch.total() {
        return Err(Error::Structure(format!(
            "trial has {} samples but pre + post = {}",
            trial.cols(),
            epoch.total()
        )));
    }
    if trial.rows() == 0 || epoch.post_samples == 0 {
        return Err(Error::Structure(format!(
            "empty post-stimulus data ({} sensors, {} samples)",
            trial.rows(),
            epoch.post_samples
        )));
    }
    Ok(())
}

/// Lays the post-stimulus window of each sensor end to end:
/// `out[k·post + t] = trial[k][pre + t]`.
pub fn concatenate_post_stimulus(trial: &Matrix, epoch: Epoch) -> Result<Vec<f64>> {
    check_trial(trial, epoch)?;
    Ok(trial
        .columns(epoch.pre_samples, epoch.post_samples)?
        .into_vec())
}

/// Inverse of [`concatenate_post_stimulus`] on the post window alone.
fn split_sensors(concat: Vec<f64>, sensors: usize, post: usize) -> Result<Matrix> {
    Matrix::from_vec(sensors, post, concat)
}

fn post_mean(trial: &Matrix, epoch: Epoch, sensor: usize) -> f64 {
    let row = &trial.row(sensor)[epoch.pre_samples..];
    row.iter().sum::<f64>() / row.len() as f64
}

pub fn estimate_sensors(
    concat: &[f64],
    config: &DenoiseConfig,
    trial: &Matrix,
    epoch: Epoch,
) -> Result<SensorEstimate> {
    check_trial(trial, epoch)?;
    let sensors = trial.rows();
    if concat.len() != sensors * epoch.post_samples {
        return Err(Error::Structure(format!(
            "concatenated vector has {} samples, expected {sensors} x {}",
            concat.len(),
            epoch.post_samples
        )));
    }
    let filters = config.filters()?;
    let dec = dwt_analyze(concat, &filters, config.levels)?;
    let gain = 2f64.powf(-(config.levels as f64) / 2.0);

    let wavelet_count = dec.approx().len().min(sensors);
    let values: Vec<f64> = (0..sensors)
        .map(|i| match dec.approx().get(i) {
            Some(a) => a * gain,
            None => post_mean(trial, epoch, i),
        })
        .collect();
    Ok(SensorEstimate {
        values,
        wavelet_count,
        mean_filled_count: sensors - wavelet_count,
    })
}

/// Repeats each sensor's estimate across `post` samples.
pub fn reconstruct_denoised(est: &SensorEstimate, post: usize) -> Matrix {
    let mut out = Matrix::zeros(est.values.len(), post);
    for (i, &v) in est.values.iter().enumerate() {
        out.row_mut(i).fill(v);
    }
    out
}

/// Single-trial pipeline; returns a `K × post` matrix.
pub fn denoise_trial(trial: &Matrix, epoch: Epoch, config: &DenoiseConfig) -> Result<Matrix> {
    let concat = concatenate_post_stimulus(trial, epoch)?;
    let est = estimate_sensors(&concat, config, trial, epoch)?;
    Ok(reconstruct_denoised(&est, epoch.post_samples))
}

/// Mean of [`denoise_trial`] over every trial, summed in trial order.
pub fn denoise_multi(trials: &TrialSet, config: &DenoiseConfig) -> Result<Matrix> {
    let epoch = trials.epoch();
    let outputs = par::map_ordered(trials.trials(), |t| denoise_trial(t, epoch, config));
    mean_in_order(outputs)
}

/// Dispatches on `config.mode`.
pub fn denoise(trials: &TrialSet, config: &DenoiseConfig) -> Result<Matrix> {
    match config.mode {
        Mode::SingleTrial(i) => denoise_trial(single(trials, i)?, trials.epoch(), config),
        Mode::MultiTrial => denoise_multi(trials, config),
    }
}

fn single(trials: &TrialSet, i: usize) -> Result<&Matrix> {
    trials.trial(i).ok_or_else(|| {
        Error::Parameter(format!(
            "trial index {i} out of range for {} trials",
            trials.len()
        ))
    })
}

fn mean_in_order(outputs: Vec<Result<Matrix>>) -> Result<Matrix> {
    let outputs = outputs.into_iter().collect::<Result<Vec<_>>>()?;
    mean_of(&outputs)
}

fn mean_of(matrices: &[Matrix]) -> Result<Matrix> {
    let (first, rest) = matrices
        .split_first()
        .ok_or_else(|| Error::Structure("no trials to average".into()))?;
    let mut acc = first.clone();
    for m in rest {
        acc.ensure_same_shape(m)?;
        for (a, b) in acc.as_mut_slice().iter_mut().zip(m.as_slice()) {
            *a += b;
        }
    }
    let count = matrices.len() as f64;
    acc.as_mut_slice().iter_mut().for_each(|v| *v /= count);
    Ok(acc)
}

/// Element-wise mean over trials, full `K × (pre + post)` window.
pub fn average_trials(trials: &TrialSet) -> Matrix {
    mean_of(trials.trials()).expect("trial set is non-empty and uniform")
}

/// Universal-threshold wavelet shrinkage of the concatenated post window.
pub fn threshold_denoise(
    trial: &Matrix,
    epoch: Epoch,
    config: &DenoiseConfig,
    rule: ThresholdRule,
) -> Result<Matrix> {
    let concat = concatenate_post_stimulus(trial, epoch)?;
    let filters = config.filters()?;
    let mut dec = dwt_analyze(&concat, &filters, config.levels)?;
    let lambda = match rule {
        ThresholdRule::Universal => universal_threshold(dec.details()[0].as_slice(), concat.len()),
    };
    for band in dec.details_mut() {
        band.iter_mut().for_each(|d| *d = soft_threshold(*d, lambda));
    }
    let y = dwt_synthesize(&dec, &filters)?;
    split_sensors(y, trial.rows(), epoch.post_samples)
}

/// Threshold-denoises every trial and averages in trial order.
pub fn threshold_denoise_multi(trials: &TrialSet, config: &DenoiseConfig, rule: ThresholdRule) -> Result<Matrix> {
    let epoch = trials.epoch();
    let outputs = par::map_ordered(trials.trials(), |t| threshold_denoise(t, epoch, config, rule));
    mean_in_order(outputs)
}

/// `median(|d₁|)/0.6745 · √(2 ln n)` for finest-level details `d₁`.
pub fn universal_threshold(finest: &[f64], n: usize) -> f64 {
    let sigma = median_abs(finest) / 0.6745;
    sigma * (2.0 * (n as f64).ln()).max(0.0).sqrt()
}

pub fn soft_threshold(x: f64, lambda: f64) -> f64 {
    let mag = x.abs() - lambda;
    if mag > 0.0 {
        mag.copysign(x)
    } else {
        0.0
    }
}

fn median_abs(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut mags: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let mid = mags.len() / 2;
    if mags.len() % 2 == 1 {
        mags[mid]
    } else {
        0.5 * (mags[mid - 1] + mags[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn haar_config(levels: usize) -> DenoiseConfig {
        DenoiseConfig::new(Wavelet::AdjustedHaar(0), levels, Mode::SingleTrial(0))
    }

    #[test]
    fn concatenation_order() {
        let trial = Matrix::from_rows(&[[9.0, 1.0, 2.0], [9.0, 3.0, 4.0]]).unwrap();
        let v = concatenate_post_stimulus(&trial, Epoch::new(1, 2)).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn concatenation_constant() {
        let trial = Matrix::filled(3, 7, 2.5);
        let v = concatenate_post_stimulus(&trial, Epoch::new(2, 5)).unwrap();
        assert_eq!(v, vec![2.5; 15]);
    }

    #[test]
    fn concatenation_dimension_mismatch() {
        let trial = Matrix::zeros(2, 4);
        assert!(matches!(
            concatenate_post_stimulus(&trial, Epoch::new(1, 2)),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn full_size_counts() {
        let epoch = Epoch::default();
        let trial = Matrix::filled(274, epoch.total(), 1.0);
        let concat = concatenate_post_stimulus(&trial, epoch).unwrap();
        assert_eq!(concat.len(), 66034);
        let cfg = DenoiseConfig::new(Wavelet::Daubechies4, 8, Mode::SingleTrial(0));
        let est = estimate_sensors(&concat, &cfg, &trial, epoch).unwrap();
        assert_eq!((est.wavelet_count, est.mean_filled_count), (258, 16));
        assert_eq!(wavelet_sensor_count(274, 241, 8), 258);
    }

    #[test]
    fn surplus_coefficients_are_dropped() {
        // 4 sensors x 8 samples at J=1 gives 16 coefficients
        let trial = Matrix::filled(4, 8, -1.5);
        let epoch = Epoch::new(0, 8);
        let concat = concatenate_post_stimulus(&trial, epoch).unwrap();
        let est = estimate_sensors(&concat, &haar_config(1), &trial, epoch).unwrap();
        assert_eq!((est.wavelet_count, est.mean_filled_count), (4, 0));
        assert_eq!(est.values.len(), 4);
        for v in est.values {
            assert!((v + 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruct_repeats_values() {
        let est = SensorEstimate {
            values: vec![5.0, -3.0],
            wavelet_count: 2,
            mean_filled_count: 0,
        };
        let m = reconstruct_denoised(&est, 3);
        assert_eq!(m, Matrix::from_rows(&[[5.0; 3], [-3.0; 3]]).unwrap());
        let zero = SensorEstimate {
            values: vec![0.0; 4],
            wavelet_count: 4,
            mean_filled_count: 0,
        };
        assert_eq!(reconstruct_denoised(&zero, 2), Matrix::zeros(4, 2));
    }

    #[test]
    fn multi_of_opposite_trials_cancels() {
        let a = Matrix::from_rows(&[[0.0, 1.0, 2.0, 3.0], [0.0, 4.0, -1.0, 2.0]]).unwrap();
        let mut b = a.clone();
        b.as_mut_slice().iter_mut().for_each(|v| *v = -*v);
        let set = TrialSet::new(vec![a, b], Epoch::new(1, 3)).unwrap();
        let out = denoise_multi(&set, &haar_config(1)).unwrap();
        assert!(out.as_slice().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn average_of_two() {
        let set = TrialSet::new(
            vec![Matrix::filled(1, 1, 2.0), Matrix::filled(1, 1, 4.0)],
            Epoch::new(0, 1),
        )
        .unwrap();
        assert_eq!(average_trials(&set).as_slice(), &[3.0]);
    }

    #[test]
    fn trial_set_validation() {
        assert!(TrialSet::new(vec![], Epoch::new(0, 1)).is_err());
        assert!(TrialSet::new(vec![Matrix::zeros(2, 3)], Epoch::new(1, 1)).is_err());
        assert!(TrialSet::new(
            vec![Matrix::zeros(2, 3), Matrix::zeros(3, 3)],
            Epoch::new(1, 2)
        )
        .is_err());
    }

    #[test]
    fn single_mode_index_out_of_range() {
        let set = TrialSet::new(vec![Matrix::zeros(2, 4)], Epoch::new(0, 4)).unwrap();
        let cfg = DenoiseConfig::new(Wavelet::Coiflet1, 1, Mode::SingleTrial(3));
        assert!(matches!(denoise(&set, &cfg), Err(Error::Parameter(_))));
    }

    #[test]
    fn infeasible_depth() {
        let trial = Matrix::zeros(2, 4);
        let cfg = haar_config(9);
        assert!(matches!(
            denoise_trial(&trial, Epoch::new(0, 4), &cfg),
            Err(Error::Depth { .. })
        ));
    }

    #[test]
    fn soft_threshold_shrinks_toward_zero() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(median_abs(&[-3.0, 1.0, 2.0, -4.0]), 2.5);
    }
}
