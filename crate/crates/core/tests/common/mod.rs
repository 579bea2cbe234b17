//! Shared fixtures: a brute-force minimax oracle and seeded generators.

#![allow(dead_code)]

use infinorm::space::ExhaustedSpace;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn lingrid(from: f64, to: f64, count: usize) -> Vec<f64> {
    let step = (to - from) / (count - 1) as f64;
    (0..count).map(|i| from + step * i as f64).collect()
}

pub fn loggrid(from: f64, to: f64, count: usize) -> Vec<f64> {
    let (a, b) = (from.ln(), to.ln());
    let step = (b - a) / (count - 1) as f64;
    (0..count).map(|i| (a + step * i as f64).exp()).collect()
}

/// `max_i w_i |f_i - c|` at a given center.
pub fn weighted_sup(w: &[f64], f: &[f64], c: f64) -> f64 {
    w.iter().zip(f).map(|(wi, fi)| wi * (fi - c).abs()).fold(0.0, f64::max)
}

/// Brute-force minimizer of `max_i w_i |f_i - c|`, independent of the
/// bisection solver. The objective is a maximum of V-shaped cones, so its
/// minimum sits either at a sample value or where the falling branch of one
/// cone meets the rising branch of another; enumerating all O(n^2)
/// candidates and taking the best is exact.
pub fn oracle_sharp(w: &[f64], f: &[f64]) -> (f64, f64) {
    assert_eq!(w.len(), f.len());
    let mut candidates: Vec<f64> = f.to_vec();
    for i in 0..f.len() {
        for j in (i + 1)..f.len() {
            candidates.push((w[i] * f[i] + w[j] * f[j]) / (w[i] + w[j]));
        }
    }
    let mut best_c = candidates[0];
    let mut best_v = weighted_sup(w, f, best_c);
    for &c in &candidates[1..] {
        let v = weighted_sup(w, f, c);
        if v < best_v {
            best_v = v;
            best_c = c;
        }
    }
    (best_v, best_c)
}

/// Uniform heights in [0, h_max], sorted, unit measure.
pub fn random_space(rng: &mut ChaCha8Rng, n: usize, h_max: f64) -> ExhaustedSpace {
    let mut h: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..h_max)).collect();
    h.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ExhaustedSpace::from_heights(h).unwrap()
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}
