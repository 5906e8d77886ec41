//! Wall-time scaling of effect-size scoring against Relief on synthetic data.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::data::{Dataset, Label};
use crate::effect::all_effect_sizes;
use crate::error::Result;
use crate::rng;
use crate::select::relief_weights;

pub const DEFAULT_SIZES: [usize; 3] = [500, 1000, 2000];
pub const DEFAULT_FEATURES: usize = 30;
/// Relief time must grow at least this much per doubling of N.
pub const RELIEF_MIN_RATIO: f64 = 3.0;
/// Effect-size time may grow at most this much per doubling of N.
pub const EFFECT_MAX_RATIO: f64 = 2.5;

const TRIALS: usize = 5;
/// Minimum time per trial; fast workloads are looped until they reach it.
const MIN_TRIAL: Duration = Duration::from_millis(20);

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub effect_secs: f64,
    pub relief_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub features: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// `(effect, relief)` time ratios between each size and the previous one.
    pub fn ratios(&self) -> Vec<(f64, f64)> {
        self.rows
            .windows(2)
            .map(|w| (w[1].effect_secs / w[0].effect_secs, w[1].relief_secs / w[0].relief_secs))
            .collect()
    }

    /// Scaling verdict over the last doubling.
    pub fn verdict(&self) -> Option<(bool, bool)> {
        self.ratios()
            .last()
            .map(|&(e, r)| (e <= EFFECT_MAX_RATIO, r >= RELIEF_MIN_RATIO))
    }
}

/// Two Gaussian classes of equal size; feature `j` has mean shift `j / f`.
pub fn synthetic(n: usize, features: usize, seed: u64) -> Result<Dataset> {
    let mut rng = rng::stream(rng::derive_seed(seed, "bench"), n as u64);
    let labels: Vec<Label> = (0..n)
        .map(|i| if i % 2 == 0 { Label::Positive } else { Label::Negative })
        .collect();
    let cols = (0..features)
        .map(|j| {
            let shift = j as f64 / features as f64;
            labels
                .iter()
                .map(|l| {
                    // Irwin–Hall(12) - 6 is close enough to normal for timing.
                    let z: f64 = (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0;
                    z + if l.is_positive() { shift } else { 0.0 }
                })
                .collect()
        })
        .collect();
    let names = (0..features).map(|j| format!("x{j}")).collect();
    Dataset::new(names, cols, labels)
}

/// Best-of-trials seconds per call of `f`.
fn time<F: FnMut() -> Result<()>>(mut f: F) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..TRIALS {
        let start = Instant::now();
        let mut calls = 0u32;
        while calls == 0 || start.elapsed() < MIN_TRIAL {
            f()?;
            calls += 1;
        }
        best = best.min(start.elapsed().as_secs_f64() / f64::from(calls));
    }
    Ok(best)
}

pub fn run(sizes: &[usize], features: usize, seed: u64) -> Result<BenchReport> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let ds = synthetic(n, features, seed)?;
        let effect_secs = time(|| all_effect_sizes(&ds).map(drop))?;
        let relief_secs = time(|| relief_weights(&ds).map(drop))?;
        rows.push(BenchRow {
            n,
            effect_secs,
            relief_secs,
        });
    }
    Ok(BenchReport { features, rows })
}
