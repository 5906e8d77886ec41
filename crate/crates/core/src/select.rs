//! Decision-rule feature selection and the Relief baseline.

use std::fmt;

use rayon::prelude::*;

use crate::data::{Dataset, Label};
use crate::effect::{EffectSizes, Measure};
use crate::error::{Error, Result};

/// Cut for d and D ("large" effect).
pub const LARGE_EFFECT: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selector {
    Measure(Measure),
    /// Features picked by all five effect-size measures.
    Common,
    Relief,
}

impl Selector {
    /// The seven selectors in report order.
    pub const ALL: [Selector; 7] = [
        Selector::Measure(Measure::D),
        Selector::Measure(Measure::DD),
        Selector::Measure(Measure::U1),
        Selector::Measure(Measure::U2),
        Selector::Measure(Measure::U3),
        Selector::Common,
        Selector::Relief,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Selector::Measure(m) => m.key(),
            Selector::Common => "common",
            Selector::Relief => "relief",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Selector::Measure(m) => m.label(),
            Selector::Common => "Common features",
            Selector::Relief => "Relief",
        }
    }

    pub fn parse(s: &str) -> Option<Selector> {
        Selector::ALL.into_iter().find(|sel| sel.key() == s)
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub selector: Selector,
    /// The cut actually applied to `scores`.
    pub threshold: f64,
    /// `true` for `score > threshold`, `false` for `score >= threshold`.
    pub strict: bool,
    /// Tabulated decision rule, when it differs from `threshold` (U measures).
    pub decision_rule: Option<f64>,
    pub features: Vec<String>,
    /// One score per feature. For `Common` this is the number of measures
    /// that selected the feature.
    pub scores: Vec<f64>,
    pub mask: Vec<bool>,
    pub note: Option<String>,
}

impl SelectionResult {
    pub fn selected(&self) -> Vec<&str> {
        self.features
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(f, _)| f.as_str())
            .collect()
    }

    pub fn selected_indices(&self) -> Vec<usize> {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect()
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn mean_score(&self) -> f64 {
        self.scores.iter().sum::<f64>() / self.scores.len() as f64
    }

    /// Observed `(min, max)` of the scores.
    pub fn range(&self) -> (f64, f64) {
        self.scores
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)))
    }
}

pub fn select_by_threshold(
    selector: Selector,
    features: Vec<String>,
    scores: Vec<f64>,
    threshold: f64,
    strict: bool,
) -> Result<SelectionResult> {
    if features.len() != scores.len() {
        return Err(Error::InvalidArgument(format!(
            "{} feature names for {} scores",
            features.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) || !threshold.is_finite() {
        return Err(Error::NonFinite);
    }
    let mask = scores
        .iter()
        .map(|&s| if strict { s > threshold } else { s >= threshold })
        .collect();
    Ok(SelectionResult {
        selector,
        threshold,
        strict,
        decision_rule: None,
        features,
        scores,
        mask,
        note: None,
    })
}

fn mean(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::InvalidArgument("no scores to average".into()));
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Decision rule for a U measure: the mean score floored to one decimal.
pub fn u_threshold(scores: &[f64]) -> Result<f64> {
    let m = mean(scores)?;
    // The nudge keeps an exact tenth (0.7 stored as 0.69999...) on its own step.
    Ok((10.0 * m + 1e-9).floor() / 10.0)
}

/// Selection for one measure over precomputed effect sizes.
///
/// d and D keep features with a value above 0.8. U measures keep features at
/// or above the mean score; the floored decision rule is reported alongside.
pub fn select_measure(effects: &[EffectSizes], measure: Measure) -> Result<SelectionResult> {
    let features: Vec<String> = effects.iter().map(|e| e.feature.clone()).collect();
    let scores: Vec<f64> = effects.iter().map(|e| e.get(measure)).collect();
    if measure.is_u() {
        let rule = u_threshold(&scores)?;
        let cut = mean(&scores)?;
        let mut r = select_by_threshold(Selector::Measure(measure), features, scores, cut, false)?;
        r.decision_rule = Some(rule);
        Ok(r)
    } else {
        select_by_threshold(Selector::Measure(measure), features, scores, LARGE_EFFECT, true)
    }
}

/// Intersection of the five effect-size selections.
pub fn common_features(results: &[SelectionResult]) -> Result<SelectionResult> {
    let mut seen: Vec<Measure> = results
        .iter()
        .filter_map(|r| match r.selector {
            Selector::Measure(m) => Some(m),
            _ => None,
        })
        .collect();
    seen.sort();
    seen.dedup();
    if results.len() != 5 || seen.len() != 5 {
        return Err(Error::InvalidArgument(format!(
            "common features need one selection per effect-size measure, got {}",
            results.len()
        )));
    }
    let features = results[0].features.clone();
    if results.iter().any(|r| r.features != features) {
        return Err(Error::InvalidArgument("selections cover different features".into()));
    }
    let scores = (0..features.len())
        .map(|i| results.iter().filter(|r| r.mask[i]).count() as f64)
        .collect();
    select_by_threshold(Selector::Common, features, scores, 5.0, false)
}

/// The five measure selections followed by the common-features row.
pub fn select_all(effects: &[EffectSizes]) -> Result<Vec<SelectionResult>> {
    let mut out = Measure::ALL
        .into_iter()
        .map(|m| select_measure(effects, m))
        .collect::<Result<Vec<_>>>()?;
    out.push(common_features(&out)?);
    Ok(out)
}

/// Binary Relief weights using every instance once, in sample order.
///
/// Features are min-max normalized; hits and misses are nearest neighbours by
/// Euclidean distance, ties going to the lowest sample index. A constant
/// feature contributes no distance and keeps weight 0.
pub fn relief_weights(ds: &Dataset) -> Result<Vec<f64>> {
    let n = ds.n_samples();
    let f = ds.n_features();
    // Sample-major normalized copy.
    let mut x = vec![0.0; n * f];
    for j in 0..f {
        let col = ds.feature(j);
        let (lo, hi) = col
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let range = hi - lo;
        for (i, &v) in col.iter().enumerate() {
            x[i * f + j] = if range > 0.0 { (v - lo) / range } else { 0.0 };
        }
    }
    let labels = ds.labels();
    let row = |i: usize| &x[i * f..(i + 1) * f];

    let contributions: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = row(i);
            let (hit, miss) = nearest_hit_miss(&x, f, labels, i);
            // Dataset guarantees two samples per class, so both exist.
            let (h, m) = (row(hit), row(miss));
            (0..f)
                .map(|j| {
                    let dh = xi[j] - h[j];
                    let dm = xi[j] - m[j];
                    dm * dm - dh * dh
                })
                .collect()
        })
        .collect();

    let mut w = vec![0.0; f];
    for c in &contributions {
        for (wj, cj) in w.iter_mut().zip(c) {
            *wj += cj;
        }
    }
    for wj in &mut w {
        *wj /= n as f64;
    }
    Ok(w)
}

/// Nearest same-class and other-class samples to sample `i` in the
/// sample-major matrix `x` with `f` columns. Ties go to the lower index.
fn nearest_hit_miss(x: &[f64], f: usize, labels: &[Label], i: usize) -> (usize, usize) {
    let xi = &x[i * f..(i + 1) * f];
    let (mut hit, mut miss) = (usize::MAX, usize::MAX);
    let (mut hit_d, mut miss_d) = (f64::INFINITY, f64::INFINITY);
    for (k, xk) in x.chunks_exact(f).enumerate() {
        if k == i {
            continue;
        }
        let dist: f64 = xi.iter().zip(xk).map(|(a, b)| (a - b) * (a - b)).sum();
        if labels[k] == labels[i] {
            if dist < hit_d {
                hit_d = dist;
                hit = k;
            }
        } else if dist < miss_d {
            miss_d = dist;
            miss = k;
        }
    }
    (hit, miss)
}

/// Relief selection: features with weight above the mean weight.
pub fn select_relief(ds: &Dataset) -> Result<SelectionResult> {
    let w = relief_weights(ds)?;
    let cut = mean(&w)?;
    let mut r = select_by_threshold(Selector::Relief, ds.names().to_vec(), w, cut, true)?;
    if ds.n_features() == 1 {
        r.note = Some("single feature: its weight equals the mean, nothing is selected".into());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect::all_effect_sizes;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn threshold_boundaries() {
        let r = select_by_threshold(Selector::Relief, names(3), vec![0.8, 0.9, 0.1], 0.8, true).unwrap();
        assert_eq!(r.selected(), ["f1"]);
        let r = select_by_threshold(Selector::Relief, names(3), vec![0.8, 0.9, 0.1], 0.8, false).unwrap();
        assert_eq!(r.selected(), ["f0", "f1"]);
        let r = select_by_threshold(Selector::Relief, names(2), vec![0.1, 0.2], 0.8, true).unwrap();
        assert!(r.selected().is_empty());
        assert!(select_by_threshold(Selector::Relief, names(2), vec![0.1, f64::NAN], 0.8, true).is_err());
        assert!(select_by_threshold(Selector::Relief, names(2), vec![0.1], 0.8, true).is_err());
    }

    #[test]
    fn raising_threshold_never_adds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let scores: Vec<f64> = (0..50).map(|_| rng.gen_range(0.0..3.0)).collect();
        let mut prev = usize::MAX;
        for k in 0..40 {
            let t = k as f64 * 0.1;
            let r = select_by_threshold(Selector::Relief, names(50), scores.clone(), t, true).unwrap();
            assert!(r.count() <= prev);
            prev = r.count();
        }
    }

    #[test]
    fn u_threshold_floors() {
        assert_eq!(u_threshold(&[0.7, 0.7, 0.7]).unwrap(), 0.7);
        assert_eq!(u_threshold(&[0.56]).unwrap(), 0.5);
        assert_eq!(u_threshold(&[0.8, 0.88]).unwrap(), 0.8);
        assert_eq!(u_threshold(&[0.0, 0.09]).unwrap(), 0.0);
        assert!(u_threshold(&[]).is_err());
    }

    fn sel(m: Measure, mask: &[bool]) -> SelectionResult {
        SelectionResult {
            selector: Selector::Measure(m),
            threshold: 0.0,
            strict: true,
            decision_rule: None,
            features: names(mask.len()),
            scores: vec![0.0; mask.len()],
            mask: mask.to_vec(),
            note: None,
        }
    }

    #[test]
    fn common_is_intersection() {
        let same: Vec<_> = Measure::ALL.iter().map(|&m| sel(m, &[true, false, true])).collect();
        assert_eq!(common_features(&same).unwrap().selected(), ["f0", "f2"]);
        let mut disjoint = same.clone();
        disjoint[0].mask = vec![false, true, false];
        assert!(common_features(&disjoint).unwrap().selected().is_empty());
        assert!(common_features(&same[..4]).is_err());
        let mut dup = same.clone();
        dup[4] = sel(Measure::D, &[true, false, true]);
        assert!(common_features(&dup).is_err());
    }

    fn dataset(cols: Vec<Vec<f64>>, labels: Vec<Label>) -> Dataset {
        Dataset::new(names(cols.len()), cols, labels).unwrap()
    }

    #[test]
    fn relief_separating_feature() {
        use Label::*;
        // Normalized values 0, 0.1, 0.9, 1: every hit is 0.1 away; misses are
        // 0.9 away for the outer samples and 0.8 for the inner ones.
        let ds = dataset(vec![vec![0.0, 1.0, 9.0, 10.0]], vec![Negative, Negative, Positive, Positive]);
        let w = relief_weights(&ds).unwrap();
        assert!((w[0] - (0.80 + 0.63 + 0.63 + 0.80) / 4.0).abs() < 1e-12, "{w:?}");
    }

    #[test]
    fn relief_constant_feature_is_zero() {
        use Label::*;
        let ds = dataset(
            vec![vec![0.0, 1.0, 9.0, 10.0], vec![3.0; 4]],
            vec![Negative, Negative, Positive, Positive],
        );
        assert_eq!(relief_weights(&ds).unwrap()[1], 0.0);
    }

    #[test]
    fn relief_noise_feature_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 500;
        let labels: Vec<Label> = (0..n)
            .map(|i| if i % 2 == 0 { Label::Positive } else { Label::Negative })
            .collect();
        let signal: Vec<f64> = labels.iter().map(|l| l.sign() * 2.0 + rng.gen_range(-1.0..1.0)).collect();
        let noise: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let w = relief_weights(&dataset(vec![signal, noise], labels)).unwrap();
        assert!(w[0] > 0.1, "{w:?}");
        assert!(w[1].abs() < 0.05, "{w:?}");
    }

    #[test]
    fn nearest_tie_goes_to_lowest_index() {
        use Label::*;
        // Samples 1 and 2 are equidistant from sample 0.
        let x = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 5.0, 5.0, 5.0, 6.0];
        let labels = [Negative, Negative, Negative, Positive, Positive];
        assert_eq!(nearest_hit_miss(&x, 2, &labels, 0), (1, 3));
        assert_eq!(nearest_hit_miss(&x, 2, &labels, 4), (3, 2));
    }

    #[test]
    fn relief_single_feature_selects_nothing() {
        use Label::*;
        let ds = dataset(vec![vec![0.0, 1.0, 9.0, 10.0]], vec![Negative, Negative, Positive, Positive]);
        let r = select_relief(&ds).unwrap();
        assert_eq!(r.count(), 0);
        assert!(r.note.is_some());
    }

    #[test]
    fn selection_is_affine_invariant() {
        use Label::*;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 60;
        let labels: Vec<Label> = (0..n).map(|i| if i < 25 { Positive } else { Negative }).collect();
        let cols: Vec<Vec<f64>> = (0..8)
            .map(|j| {
                labels
                    .iter()
                    .map(|l| 0.3 * j as f64 * l.sign() + rng.gen_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        let moved: Vec<Vec<f64>> = cols
            .iter()
            .enumerate()
            .map(|(j, c)| c.iter().map(|v| (j as f64 + 0.5) * v - 40.0).collect())
            .collect();
        let a = select_all(&all_effect_sizes(&dataset(cols, labels.clone())).unwrap()).unwrap();
        let b = select_all(&all_effect_sizes(&dataset(moved, labels)).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.mask, y.mask, "{}", x.selector);
        }
    }

    #[test]
    fn selector_keys_round_trip() {
        for s in Selector::ALL {
            assert_eq!(Selector::parse(s.key()), Some(s));
        }
    }
}
