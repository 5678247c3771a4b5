//! Orthonormal scaling/wavelet filter pairs.
//!
//! All filters are stored in the orthonormal convention, `Σh = √2` and
//! `Σh² = 1`, so the cascaded filter bank reconstructs perfectly without a
//! per-level gain. The high-pass filter is always the alternating flip
//! `g[k] = (-1)^k h[L-1-k]`.

use std::f64::consts::SQRT_2;
use std::fmt;

use crate::{Error, Result};

/// Largest adjusted-Haar zero parameter accepted; the filter has `2n + 2` taps.
pub const MAX_ADJUSTED_HAAR_N: usize = 64;

/// Mother wavelet family. `AdjustedHaar(n)` inserts `2n` zeros between the
/// two Haar taps; `AdjustedHaar(0)` is the plain Haar filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Wavelet {
    Daubechies4,
    Coiflet1,
    AdjustedHaar(usize),
}

impl Wavelet {
    /// Zero-count parameter (`n` for adjusted Haar, 0 otherwise).
    pub fn param(self) -> usize {
        match self {
            Wavelet::AdjustedHaar(n) => n,
            _ => 0,
        }
    }

    pub fn filters(self) -> Result<FilterPair> {
        match self {
            Wavelet::Daubechies4 => Ok(make_daubechies4()),
            Wavelet::Coiflet1 => Ok(make_coiflet1()),
            Wavelet::AdjustedHaar(n) => make_adjusted_haar(n),
        }
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wavelet::Daubechies4 => f.write_str("db4"),
            Wavelet::Coiflet1 => f.write_str("coif1"),
            Wavelet::AdjustedHaar(n) => write!(f, "ahaar(n={n})"),
        }
    }
}

/// Low-pass/high-pass analysis pair for one wavelet.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterPair {
    wavelet: Wavelet,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl FilterPair {
    fn from_lowpass(wavelet: Wavelet, lowpass: Vec<f64>) -> Self {
        let highpass = qmf_highpass(&lowpass).expect("built-in filters have even length");
        Self {
            wavelet,
            lowpass,
            highpass,
        }
    }

    pub fn wavelet(&self) -> Wavelet {
        self.wavelet
    }

    pub fn param(&self) -> usize {
        self.wavelet.param()
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Scale factor from the orthonormal taps to the convention the
    /// family is usually written in: dilation-equation coefficients
    /// summing to 2 for db4/coif1, and `0.5 [1 0 .. 0 1]` for adjusted Haar.
    pub fn literature_scale(&self) -> f64 {
        match self.wavelet {
            Wavelet::Daubechies4 | Wavelet::Coiflet1 => SQRT_2,
            Wavelet::AdjustedHaar(_) => 1.0 / SQRT_2,
        }
    }

    pub fn literature_lowpass(&self) -> Vec<f64> {
        let s = self.literature_scale();
        self.lowpass.iter().map(|h| h * s).collect()
    }

    pub fn literature_highpass(&self) -> Vec<f64> {
        let s = self.literature_scale();
        self.highpass.iter().map(|g| g * s).collect()
    }
}

/// Daubechies-4: `[(1+√3), (3+√3), (3−√3), (1−√3)] / (4√2)`.
pub fn make_daubechies4() -> FilterPair {
    let s3 = 3f64.sqrt();
    let norm = 4.0 * SQRT_2;
    let lowpass = vec![
        (1.0 + s3) / norm,
        (3.0 + s3) / norm,
        (3.0 - s3) / norm,
        (1.0 - s3) / norm,
    ];
    FilterPair::from_lowpass(Wavelet::Daubechies4, lowpass)
}

/// Six-tap Coiflet of order 1, in closed form over `√7`.
pub fn make_coiflet1() -> FilterPair {
    let s7 = 7f64.sqrt();
    let norm = 16.0 * SQRT_2;
    let lowpass = vec![
        (s7 - 3.0) / norm,
        (1.0 - s7) / norm,
        (14.0 - 2.0 * s7) / norm,
        (14.0 + 2.0 * s7) / norm,
        (5.0 + s7) / norm,
        (1.0 - s7) / norm,
    ];
    FilterPair::from_lowpass(Wavelet::Coiflet1, lowpass)
}

/// Haar scaling filter with `2n` zeros between its two taps.
pub fn make_adjusted_haar(n: usize) -> Result<FilterPair> {
    if n > MAX_ADJUSTED_HAAR_N {
        return Err(Error::Parameter(format!(
            "adjusted Haar zero parameter n={n} exceeds the maximum of {MAX_ADJUSTED_HAAR_N}"
        )));
    }
    let len = 2 * n + 2;
    let mut lowpass = vec![0.0; len];
    lowpass[0] = 1.0 / SQRT_2;
    lowpass[len - 1] = 1.0 / SQRT_2;
    Ok(FilterPair::from_lowpass(Wavelet::AdjustedHaar(n), lowpass))
}

/// Alternating flip `g[k] = (-1)^k h[L-1-k]`.
pub fn qmf_highpass(lowpass: &[f64]) -> Result<Vec<f64>> {
    if lowpass.is_empty() || !lowpass.len().is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "QMF high-pass needs a non-empty even-length low-pass filter, got {} taps",
            lowpass.len()
        )));
    }
    Ok(lowpass
        .iter()
        .rev()
        .enumerate()
        .map(|(k, &h)| if k % 2 == 0 { h } else { -h })
        .collect())
}

/// `|Ψ_n(ω)| = sin²((2n+1)ω/4) / |(2n+1)ω/4|` for the adjusted Haar wavelet.
pub fn adjusted_haar_freq_magnitude(n: usize, omega: f64) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::Parameter(format!(
            "frequency must be finite and nonzero, got {omega}"
        )));
    }
    let x = (2 * n + 1) as f64 * omega / 4.0;
    Ok(x.sin().powi(2) / x.abs())
}

/// Upper envelope `4 / |(2n+1)ω|` of [`adjusted_haar_freq_magnitude`].
pub fn adjusted_haar_freq_bound(n: usize, omega: f64) -> f64 {
    4.0 / ((2 * n + 1) as f64 * omega).abs()
}
