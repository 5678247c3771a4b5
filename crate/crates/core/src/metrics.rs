//! Output SNIR and RMSE between the trial average and a denoised estimate.

use crate::matrix::Matrix;
use crate::Result;

/// Output SNIR with its per-sensor energy ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct SnirReport {
    pub per_sensor_ratio: Vec<f64>,
    /// `10 log10` of the mean ratio; `+inf` if any sensor has zero error.
    pub snir_db: f64,
    pub sensors: usize,
    pub samples: usize,
}

/// `10 log10( (1/K) Σ_i Σ_n Y_mean² / Σ_n (Y_mean − Y_calc)² )`.
///
/// Ratios are averaged before taking the log. A sensor whose error energy
/// is exactly zero gets ratio `+inf`, even when its signal is also zero.
pub fn snir(y_mean: &Matrix, y_calc: &Matrix) -> Result<SnirReport> {
    y_mean.ensure_same_shape(y_calc)?;
    let per_sensor_ratio: Vec<f64> = y_mean
        .iter_rows()
        .zip(y_calc.iter_rows())
        .map(|(m, c)| {
            let signal: f64 = m.iter().map(|v| v * v).sum();
            let error: f64 = m.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
            if error == 0.0 {
                f64::INFINITY
            } else {
                signal / error
            }
        })
        .collect();
    let sensors = y_mean.rows();
    let mean = per_sensor_ratio.iter().sum::<f64>() / sensors as f64;
    Ok(SnirReport {
        per_sensor_ratio,
        snir_db: 10.0 * mean.log10(),
        sensors,
        samples: y_mean.cols(),
    })
}

/// Root mean squared element-wise difference.
pub fn rmse(y_mean: &Matrix, y_calc: &Matrix) -> Result<f64> {
    y_mean.ensure_same_shape(y_calc)?;
    let n = y_mean.as_slice().len();
    if n == 0 {
        return Ok(0.0);
    }
    let sq: f64 = y_mean
        .as_slice()
        .iter()
        .zip(y_calc.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sq / n as f64).sqrt())
}
