//! Cascaded QMF multiresolution analysis and synthesis.
//!
//! Each analysis level computes the decimated periodic correlation
//!
//! ```text
//! a[i] = Σ_k h[k] · x[(2i + k) mod N]
//! d[i] = Σ_k g[k] · x[(2i + k) mod N]
//! ```
//!
//! and cascades on `a`. A level whose input length is odd is first extended
//! by repeating its last sample, so every level halves its length with
//! ceiling (`66034 → 33017 → … → 258` after eight levels). Synthesis is the
//! adjoint of each periodized level followed by truncation to the recorded
//! length, which is an exact inverse for orthonormal filters.
//!
//! [`cwt_point`] evaluates a single continuous-transform coefficient by the
//! rectangle rule for mother wavelets that are piecewise constant.

use crate::filters::FilterPair;
use crate::par;
use crate::{Error, Result};

/// Boundary policy of a [`Decomposition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Circular wrap; odd lengths are extended by one repeated sample.
    Periodized,
}

/// Multi-level analysis result.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    approx: Vec<f64>,
    details: Vec<Vec<f64>>,
    lengths: Vec<usize>,
    boundary: Boundary,
}

impl Decomposition {
    /// Assembles a decomposition from its parts, validating the length
    /// bookkeeping. `details[0]` is the finest level and `lengths[j]` the
    /// input length of level `j + 1`.
    pub fn from_parts(approx: Vec<f64>, details: Vec<Vec<f64>>, lengths: Vec<usize>) -> Result<Self> {
        let dec = Self {
            approx,
            details,
            lengths,
            boundary: Boundary::Periodized,
        };
        dec.validate()?;
        Ok(dec)
    }

    fn validate(&self) -> Result<()> {
        let levels = self.details.len();
        if levels == 0 {
            return Err(Error::Structure("decomposition has no levels".into()));
        }
        if self.lengths.len() != levels {
            return Err(Error::Structure(format!(
                "{} recorded lengths for {levels} detail levels",
                self.lengths.len()
            )));
        }
        for (j, (&n, d)) in self.lengths.iter().zip(&self.details).enumerate() {
            if n < 2 {
                return Err(Error::Structure(format!("level {} input length {n} < 2", j + 1)));
            }
            if d.len() != ceil_half(n) {
                return Err(Error::Structure(format!(
                    "level {} has {} detail coefficients, expected {}",
                    j + 1,
                    d.len(),
                    ceil_half(n)
                )));
            }
            if let Some(&next) = self.lengths.get(j + 1) {
                if next != ceil_half(n) {
                    return Err(Error::Structure(format!(
                        "level {} length {next} does not follow from {n}",
                        j + 2
                    )));
                }
            }
        }
        if self.approx.len() != ceil_half(self.lengths[levels - 1]) {
            return Err(Error::Structure(format!(
                "{} approximation coefficients, expected {}",
                self.approx.len(),
                ceil_half(self.lengths[levels - 1])
            )));
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn approx(&self) -> &[f64] {
        &self.approx
    }

    pub fn approx_mut(&mut self) -> &mut [f64] {
        &mut self.approx
    }

    /// Detail coefficients, finest level first.
    pub fn details(&self) -> &[Vec<f64>] {
        &self.details
    }

    /// Detail coefficients at `level` (1-based, 1 = finest).
    pub fn detail(&self, level: usize) -> Option<&[f64]> {
        level.checked_sub(1).and_then(|j| self.details.get(j)).map(Vec::as_slice)
    }

    /// Mutable detail levels; lengths are fixed, values may be edited.
    pub fn details_mut(&mut self) -> impl Iterator<Item = &mut [f64]> + '_ {
        self.details.iter_mut().map(Vec::as_mut_slice)
    }

    /// Input length at each level, starting with the original signal.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn signal_len(&self) -> usize {
        self.lengths[0]
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Sum of squared coefficients over every band.
    pub fn energy(&self) -> f64 {
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        sq(&self.approx) + self.details.iter().map(|d| sq(d)).sum::<f64>()
    }
}

/// `ceil(n / 2)`.
pub fn ceil_half(n: usize) -> usize {
    n.div_ceil(2)
}

/// Length after `levels` ceiling halvings.
pub fn approx_len(len: usize, levels: usize) -> usize {
    (0..levels).fold(len, |n, _| ceil_half(n))
}

/// Deepest decomposition for a signal of `len` samples: every level needs
/// at least two input samples.
pub fn max_level(len: usize) -> usize {
    let mut n = len;
    let mut levels = 0;
    while n >= 2 {
        n = ceil_half(n);
        levels += 1;
    }
    levels
}

/// Multi-level periodized DWT of `signal`.
pub fn dwt_analyze(signal: &[f64], filters: &FilterPair, levels: usize) -> Result<Decomposition> {
    if signal.len() < 2 {
        return Err(Error::Parameter(format!(
            "signal needs at least 2 samples, got {}",
            signal.len()
        )));
    }
    if levels == 0 {
        return Err(Error::Parameter("decomposition depth must be at least 1".into()));
    }
    let max = max_level(signal.len());
    if levels > max {
        return Err(Error::Depth {
            requested: levels,
            length: signal.len(),
            max,
        });
    }

    let mut details = Vec::with_capacity(levels);
    let mut lengths = Vec::with_capacity(levels);
    let mut current = signal.to_vec();
    for _ in 0..levels {
        lengths.push(current.len());
        let (a, d) = analyze_level(&current, filters);
        details.push(d);
        current = a;
    }
    Ok(Decomposition {
        approx: current,
        details,
        lengths,
        boundary: Boundary::Periodized,
    })
}

/// Inverse of [`dwt_analyze`] for the same filters.
pub fn dwt_synthesize(dec: &Decomposition, filters: &FilterPair) -> Result<Vec<f64>> {
    dec.validate()?;
    let mut current = dec.approx.clone();
    for (detail, &len) in dec.details.iter().zip(&dec.lengths).rev() {
        let mut y = synthesize_level(&current, detail, filters);
        y.truncate(len);
        current = y;
    }
    Ok(current)
}

fn analyze_level(x: &[f64], filters: &FilterPair) -> (Vec<f64>, Vec<f64>) {
    let mut padded;
    let x = if x.len() % 2 == 1 {
        padded = Vec::with_capacity(x.len() + 1);
        padded.extend_from_slice(x);
        padded.push(x[x.len() - 1]);
        &padded[..]
    } else {
        x
    };
    let half = x.len() / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    par::fill_indexed(&mut approx, |i| periodic_correlate(x, filters.lowpass(), 2 * i));
    par::fill_indexed(&mut detail, |i| periodic_correlate(x, filters.highpass(), 2 * i));
    (approx, detail)
}

#[inline]
fn periodic_correlate(x: &[f64], taps: &[f64], start: usize) -> f64 {
    let n = x.len();
    if start + taps.len() <= n {
        taps.iter().zip(&x[start..]).map(|(t, v)| t * v).sum()
    } else {
        taps.iter()
            .enumerate()
            .map(|(k, t)| t * x[(start + k) % n])
            .sum()
    }
}

/// Adjoint of one periodized analysis level, written as a gather so each
/// output sample is computed independently.
fn synthesize_level(approx: &[f64], detail: &[f64], filters: &FilterPair) -> Vec<f64> {
    let n = 2 * approx.len();
    let h = filters.lowpass();
    let g = filters.highpass();
    let mut y = vec![0.0; n];
    par::fill_indexed(&mut y, |out| {
        let mut acc = 0.0;
        // 2i + k ≡ out (mod n) with n even forces k ≡ out (mod 2)
        let mut k = out % 2;
        while k < h.len() {
            let i = (out + n - k % n) % n / 2;
            acc += h[k] * approx[i] + g[k] * detail[i];
            k += 2;
        }
        acc
    });
    y
}

/// One constant piece `value` on `[start, end)` of a mother wavelet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

/// Piecewise-constant mother wavelet with zero integral.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseWavelet {
    pieces: Vec<Piece>,
}

impl PiecewiseWavelet {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Parameter("wavelet needs at least one piece".into()));
        }
        let mut integral = 0.0;
        let mut scale = 0.0f64;
        for p in &pieces {
            if !(p.start < p.end) || !p.value.is_finite() {
                return Err(Error::Parameter(format!("invalid wavelet piece {p:?}")));
            }
            integral += p.value * (p.end - p.start);
            scale = scale.max((p.value * (p.end - p.start)).abs());
        }
        if integral.abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::Parameter(format!(
                "mother wavelet must have zero integral, got {integral}"
            )));
        }
        Ok(Self { pieces })
    }

    /// Unit-norm Haar wavelet: +1 on `[0, ½)`, −1 on `[½, 1)`.
    pub fn haar() -> Self {
        Self {
            pieces: vec![
                Piece {
                    start: 0.0,
                    end: 0.5,
                    value: 1.0,
                },
                Piece {
                    start: 0.5,
                    end: 1.0,
                    value: -1.0,
                },
            ],
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// ψ(u); the first piece containing `u` wins, zero outside all pieces.
    pub fn eval(&self, u: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.start <= u && u < p.end)
            .map_or(0.0, |p| p.value)
    }
}

/// Scale/shift pair at which a CWT coefficient is evaluated, plus the
/// sample spacing of the signal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CwtQuery {
    scale: f64,
    shift: f64,
    dt: f64,
}

impl CwtQuery {
    pub fn new(scale: f64, shift: f64, dt: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::Parameter(format!("CWT scale must be finite and nonzero, got {scale}")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Parameter(format!("sample spacing must be positive, got {dt}")));
        }
        if !shift.is_finite() {
            return Err(Error::Parameter(format!("CWT shift must be finite, got {shift}")));
        }
        Ok(Self { scale, shift, dt })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

/// `Σ_k x[k] · |a|^{-1/2} ψ((k·dt − b)/a) · dt`, sample `k` sitting at time `k·dt`.
pub fn cwt_point(signal: &[f64], query: CwtQuery, wavelet: &PiecewiseWavelet) -> f64 {
    let CwtQuery { scale, shift, dt } = query;
    let norm = scale.abs().powf(-0.5);
    signal
        .iter()
        .enumerate()
        .map(|(k, x)| x * wavelet.eval((k as f64 * dt - shift) / scale))
        .sum::<f64>()
        * norm
        * dt
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{make_adjusted_haar, make_daubechies4};
    use std::f64::consts::SQRT_2;

    fn haar() -> FilterPair {
        make_adjusted_haar(0).unwrap()
    }

    #[test]
    fn haar_constant_signal() {
        let dec = dwt_analyze(&[1.0; 4], &haar(), 1).unwrap();
        assert_eq!(dec.approx().len(), 2);
        for a in dec.approx() {
            assert!((a - SQRT_2).abs() < 1e-12);
        }
        assert!(dec.details()[0].iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn haar_ramp() {
        let dec = dwt_analyze(&[1.0, 2.0, 3.0, 4.0], &haar(), 1).unwrap();
        let expected_a = [2.12132034, 4.94974747];
        for (a, e) in dec.approx().iter().zip(expected_a) {
            assert!((a - e).abs() < 1e-8);
        }
        for d in &dec.details()[0] {
            assert!((d + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        }
        let back = dwt_synthesize(&dec, &haar()).unwrap();
        for (b, e) in back.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((b - e).abs() < 1e-12);
        }
    }

    #[test]
    fn synthesize_from_parts() {
        let dec = Decomposition::from_parts(vec![SQRT_2, SQRT_2], vec![vec![0.0, 0.0]], vec![4]).unwrap();
        let y = dwt_synthesize(&dec, &haar()).unwrap();
        for v in y {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn from_parts_rejects_bad_bookkeeping() {
        let bad = Decomposition::from_parts(vec![1.0], vec![vec![0.0, 0.0]], vec![4]);
        assert!(matches!(bad, Err(Error::Structure(_))));
        let bad = Decomposition::from_parts(vec![1.0, 1.0], vec![vec![0.0, 0.0]], vec![4, 2]);
        assert!(matches!(bad, Err(Error::Structure(_))));
        let bad = Decomposition::from_parts(vec![1.0], vec![], vec![]);
        assert!(matches!(bad, Err(Error::Structure(_))));
    }

    #[test]
    fn full_size_length_chain() {
        let x = vec![0.5; 66034];
        let dec = dwt_analyze(&x, &make_daubechies4(), 8).unwrap();
        assert_eq!(dec.approx().len(), 258);
        assert_eq!(
            dec.lengths(),
            &[66034, 33017, 16509, 8255, 4128, 2064, 1032, 516]
        );
        assert_eq!(approx_len(66034, 8), 258);
    }

    #[test]
    fn odd_length_detail_sizes() {
        let x: Vec<f64> = (0..7).map(f64::from).collect();
        let dec = dwt_analyze(&x, &haar(), 3).unwrap();
        assert_eq!(dec.lengths(), &[7, 4, 2]);
        let sizes: Vec<_> = dec.details().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 2, 1]);
        assert_eq!(dec.approx().len(), 1);
    }

    #[test]
    fn depth_errors() {
        assert_eq!(max_level(16), 4);
        assert_eq!(max_level(17), 5);
        assert_eq!(max_level(2), 1);
        let err = dwt_analyze(&[0.0; 16], &haar(), 5).unwrap_err();
        assert!(matches!(err, Error::Depth { max: 4, .. }), "{err}");
        assert!(matches!(dwt_analyze(&[], &haar(), 1), Err(Error::Parameter(_))));
        assert!(matches!(dwt_analyze(&[1.0, 2.0], &haar(), 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn cwt_haar_self_product() {
        let dt = 0.001;
        let w = PiecewiseWavelet::haar();
        let x: Vec<f64> = (0..1000).map(|k| w.eval(k as f64 * dt)).collect();
        let v = cwt_point(&x, CwtQuery::new(1.0, 0.0, dt).unwrap(), &w);
        assert!((v - 1.0).abs() < 5e-3, "{v}");
    }

    #[test]
    fn cwt_annihilates_constants() {
        let w = PiecewiseWavelet::haar();
        let x = vec![3.7; 1000];
        let v = cwt_point(&x, CwtQuery::new(0.5, 0.25, 0.001).unwrap(), &w);
        assert!(v.abs() < 5e-3, "{v}");
    }

    #[test]
    fn cwt_query_validation() {
        assert!(CwtQuery::new(0.0, 0.0, 0.001).is_err());
        assert!(CwtQuery::new(1.0, 0.0, 0.0).is_err());
        assert!(CwtQuery::new(-1.0, 0.0, 0.001).is_ok());
    }

    #[test]
    fn piecewise_wavelet_requires_zero_mean() {
        let err = PiecewiseWavelet::new(vec![Piece {
            start: 0.0,
            end: 1.0,
            value: 1.0,
        }]);
        assert!(err.is_err());
        let ok = PiecewiseWavelet::new(vec![
            Piece { start: -1.0, end: 0.0, value: -0.5 },
            Piece { start: 0.0, end: 2.0, value: 0.25 },
        ]);
        assert!(ok.is_ok());
    }
}
