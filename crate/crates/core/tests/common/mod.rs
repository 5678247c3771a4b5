#![allow(dead_code)]

use megden_core::dataio::SplitMix64;
use megden_core::Wavelet;

pub fn random_vec(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..len).map(|_| 2.0 * rng.next_f64() - 1.0).collect()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn all_families() -> Vec<Wavelet> {
    let mut w = vec![Wavelet::Daubechies4, Wavelet::Coiflet1];
    w.extend((0..=4).map(Wavelet::AdjustedHaar));
    w
}
