//! Linear SVM, repeated stratified cross-validation and classification metrics.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Per-feature z-score transform fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub mean: Vec<f64>,
    /// Population standard deviation; 1 for constant columns.
    pub scale: Vec<f64>,
}

impl Scaler {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Scaler> {
        let first = rows.first().ok_or_else(|| Error::InvalidArgument("no rows to scale".into()))?;
        let p = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; p];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; p];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Scaler { mean, scale })
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    /// Stop when the spread of projected gradients falls to this value.
    pub tol: f64,
    /// Cap on passes over the data.
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    /// Weights on standardized features.
    pub w: Vec<f64>,
    pub b: f64,
    pub scaler: Scaler,
    /// Passes used by the solver.
    pub iterations: usize,
}

impl SvmModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        let z = self.scaler.transform(x);
        dot(&self.w, &z) + self.b
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        if self.decision(x) >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Soft-margin linear SVM with hinge loss, `min 1/2 |w|^2 + c sum hinge`.
///
/// Rows are standardized with their own statistics first. The bias is an
/// extra constant feature, so it is regularized along with `w`. Solved in the
/// dual by coordinate descent with a fixed visiting-order stream.
pub fn train_svm(rows: &[Vec<f64>], labels: &[Label], params: SvmParams) -> Result<SvmModel> {
    if rows.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} rows for {} labels",
            rows.len(),
            labels.len()
        )));
    }
    if !(params.c > 0.0) || !params.c.is_finite() {
        return Err(Error::InvalidArgument(format!("c must be positive, got {}", params.c)));
    }
    if !labels.iter().any(|l| l.is_positive()) || labels.iter().all(|l| l.is_positive()) {
        return Err(Error::InvalidArgument("training data must contain both classes".into()));
    }
    let scaler = Scaler::fit(rows)?;
    // Augmented rows [z, 1].
    let z: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut v = scaler.transform(r);
            v.push(1.0);
            v
        })
        .collect();
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let n = z.len();
    let p = z[0].len();
    let c = params.c;
    let qd: Vec<f64> = z.iter().map(|v| dot(v, v)).collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; p];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let mut iterations = 0;
    loop {
        if iterations == params.max_iter {
            return Err(Error::SolverNotConverged { iterations });
        }
        iterations += 1;
        order.shuffle(&mut rng);
        let (mut pg_max, mut pg_min) = (f64::NEG_INFINITY, f64::INFINITY);
        for &i in &order {
            let g = y[i] * dot(&w, &z[i]) - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == c {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * y[i];
                for (wj, zj) in w.iter_mut().zip(&z[i]) {
                    *wj += step * zj;
                }
            }
        }
        if pg_max - pg_min <= params.tol {
            break;
        }
    }
    let b = w.pop().unwrap();
    Ok(SvmModel {
        w,
        b,
        scaler,
        iterations,
    })
}

/// Metrics for one test fold. Rates with a zero denominator are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldMetrics {
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub tnr: Option<f64>,
    pub acc: Option<f64>,
    pub auc: Option<f64>,
    pub positives: usize,
    pub negatives: usize,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Area under the ROC curve as the Mann–Whitney statistic with midranks for
/// tied scores (equal to the trapezoidal rule). `None` without both classes.
pub fn auc(scores: &[f64], labels: &[Label]) -> Option<f64> {
    let n_pos = labels.iter().filter(|l| l.is_positive()).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 || scores.len() != labels.len() {
        return None;
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && scores[idx[j]] == scores[idx[i]] {
            j += 1;
        }
        // Ranks i+1 ..= j share their average.
        let mid = (i + 1 + j) as f64 / 2.0;
        rank_sum += mid * idx[i..j].iter().filter(|&&k| labels[k].is_positive()).count() as f64;
        i = j;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Some((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

pub fn metrics_from_counts(tp: usize, fp: usize, tn: usize, fn_: usize, scores: &[f64], labels: &[Label]) -> FoldMetrics {
    FoldMetrics {
        tpr: ratio(tp, tp + fn_),
        fpr: ratio(fp, fp + tn),
        tnr: ratio(tn, fp + tn),
        acc: ratio(tp + tn, tp + fp + tn + fn_),
        auc: auc(scores, labels),
        positives: tp + fn_,
        negatives: fp + tn,
    }
}

/// Counts the confusion matrix of `scores >= 0` against `labels`.
pub fn evaluate_scores(scores: &[f64], labels: &[Label]) -> FoldMetrics {
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&s, l) in scores.iter().zip(labels) {
        match (s >= 0.0, l.is_positive()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    metrics_from_counts(tp, fp, tn, fn_, scores, labels)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub svm: SvmParams,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            repeats: 20,
            svm: SvmParams::default(),
            seed: 42,
        }
    }
}

/// Cross-validated metrics, each the mean over every (repeat, fold) where it
/// is defined.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalMetrics {
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub tnr: Option<f64>,
    pub acc: Option<f64>,
    pub auc: Option<f64>,
    pub folds: usize,
    pub repeats: usize,
    pub n_features: usize,
    pub per_fold: Vec<FoldMetrics>,
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Fold assignment for one repeat: each class is shuffled separately and dealt
/// round-robin, so class proportions match across folds.
pub fn stratified_folds(labels: &[Label], folds: usize, seed: u64, repeat: usize) -> Vec<usize> {
    let mut rng = rng::stream(seed, repeat as u64);
    let mut assign = vec![0; labels.len()];
    let mut offset = 0;
    for class in [Label::Positive, Label::Negative] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for (k, &i) in idx.iter().enumerate() {
            assign[i] = (offset + k) % folds;
        }
        // Continue dealing where this class stopped so fold sizes stay even.
        offset = (offset + idx.len()) % folds;
    }
    assign
}

fn rows_of(ds: &Dataset, features: &[usize], samples: &[usize]) -> Vec<Vec<f64>> {
    samples
        .iter()
        .map(|&i| features.iter().map(|&j| ds.feature(j)[i]).collect())
        .collect()
}

/// Trains on `train` samples of `ds` restricted to `features`.
pub fn train_on(ds: &Dataset, features: &[usize], train: &[usize], svm: SvmParams) -> Result<SvmModel> {
    let labels: Vec<Label> = train.iter().map(|&i| ds.labels()[i]).collect();
    train_svm(&rows_of(ds, features, train), &labels, svm)
}

pub fn cross_validate(ds: &Dataset, features: &[usize], cfg: &CvConfig) -> Result<EvalMetrics> {
    if features.is_empty() {
        return Err(Error::CrossValidation("no features selected".into()));
    }
    if let Some(&bad) = features.iter().find(|&&j| j >= ds.n_features()) {
        return Err(Error::FeatureIndex {
            index: bad,
            count: ds.n_features(),
        });
    }
    if cfg.folds < 2 || cfg.repeats < 1 {
        return Err(Error::InvalidArgument(format!(
            "need folds >= 2 and repeats >= 1 (got {} and {})",
            cfg.folds, cfg.repeats
        )));
    }
    let smallest = ds.n_positive().min(ds.n_negative());
    if cfg.folds > smallest {
        return Err(Error::CrossValidation(format!(
            "{} folds but the smaller class has {smallest} samples; some test fold would miss a class",
            cfg.folds
        )));
    }
    let labels = ds.labels();
    let assignments: Vec<Vec<usize>> = (0..cfg.repeats)
        .map(|r| stratified_folds(labels, cfg.folds, cfg.seed, r))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..cfg.repeats)
        .flat_map(|r| (0..cfg.folds).map(move |k| (r, k)))
        .collect();
    let per_fold: Vec<FoldMetrics> = jobs
        .par_iter()
        .map(|&(r, k)| {
            let assign = &assignments[r];
            let (test, train): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| assign[i] == k);
            let model = train_on(ds, features, &train, cfg.svm)?;
            let test_labels: Vec<Label> = test.iter().map(|&i| labels[i]).collect();
            let scores: Vec<f64> = rows_of(ds, features, &test).iter().map(|x| model.decision(x)).collect();
            Ok(evaluate_scores(&scores, &test_labels))
        })
        .collect::<Result<_>>()?;
    Ok(EvalMetrics {
        tpr: mean_defined(per_fold.iter().map(|m| m.tpr)),
        fpr: mean_defined(per_fold.iter().map(|m| m.fpr)),
        tnr: mean_defined(per_fold.iter().map(|m| m.tnr)),
        acc: mean_defined(per_fold.iter().map(|m| m.acc)),
        auc: mean_defined(per_fold.iter().map(|m| m.auc)),
        folds: cfg.folds,
        repeats: cfg.repeats,
        n_features: features.len(),
        per_fold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use Label::*;

    #[test]
    fn counts_by_hand() {
        let m = metrics_from_counts(9, 2, 8, 1, &[], &[]);
        assert!((m.tpr.unwrap() - 0.9).abs() < 1e-15);
        assert!((m.fpr.unwrap() - 0.2).abs() < 1e-15);
        assert!((m.tnr.unwrap() - 0.8).abs() < 1e-15);
        assert!((m.acc.unwrap() - 0.85).abs() < 1e-15);
        assert_eq!(m.auc, None);
        let only_pos = metrics_from_counts(3, 0, 0, 1, &[1.0, 1.0, 1.0, -1.0], &[Positive; 4]);
        assert_eq!(only_pos.fpr, None);
        assert_eq!(only_pos.auc, None);
        assert!(only_pos.tpr.is_some());
    }

    #[test]
    fn auc_examples() {
        let labels = [Negative, Negative, Positive, Positive];
        assert_eq!(auc(&[0.1, 0.2, 0.3, 0.4], &labels), Some(1.0));
        assert_eq!(auc(&[0.4, 0.3, 0.2, 0.1], &labels), Some(0.0));
        assert_eq!(auc(&[0.5; 4], &labels), Some(0.5));
        // One positive ties one negative: 3 wins + 1 half out of 4 pairs.
        assert_eq!(auc(&[0.1, 0.3, 0.3, 0.4], &labels), Some(0.875));
    }

    #[test]
    fn auc_is_rank_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let labels: Vec<Label> = (0..40).map(|i| if i % 3 == 0 { Positive } else { Negative }).collect();
        let s: Vec<f64> = (0..40).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let t: Vec<f64> = s.iter().map(|v| (3.0 * v).exp() + 7.0).collect();
        assert_eq!(auc(&s, &labels), auc(&t, &labels));
    }

    #[test]
    fn two_point_problem() {
        let m = train_svm(&[vec![1.0], vec![-1.0]], &[Positive, Negative], SvmParams::default()).unwrap();
        assert!(m.decision(&[1.0]) > 0.0);
        assert!(m.decision(&[-1.0]) < 0.0);
        assert_eq!(m.w.len(), 1);
    }

    fn blobs(seed: u64, n: usize, gap: f64) -> (Vec<Vec<f64>>, Vec<Label>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<Label> = (0..n).map(|i| if i % 2 == 0 { Positive } else { Negative }).collect();
        let rows = labels
            .iter()
            .map(|l| {
                let c = l.sign() * gap;
                vec![c + rng.gen_range(-1.0..1.0), 0.5 * c + rng.gen_range(-1.0..1.0)]
            })
            .collect();
        (rows, labels)
    }

    #[test]
    fn flipped_labels_negate_model() {
        let (rows, labels) = blobs(3, 60, 0.7);
        let flipped: Vec<Label> = labels
            .iter()
            .map(|l| if l.is_positive() { Negative } else { Positive })
            .collect();
        let a = train_svm(&rows, &labels, SvmParams::default()).unwrap();
        let b = train_svm(&rows, &flipped, SvmParams::default()).unwrap();
        for x in &rows {
            assert!((a.decision(x) + b.decision(x)).abs() < 1e-2, "{} {}", a.decision(x), b.decision(x));
        }
    }

    #[test]
    fn separable_margins() {
        let (rows, labels) = blobs(5, 80, 3.0);
        let params = SvmParams {
            c: 100.0,
            ..SvmParams::default()
        };
        let m = train_svm(&rows, &labels, params).unwrap();
        for (x, l) in rows.iter().zip(&labels) {
            assert!(l.sign() * m.decision(x) >= 1.0 - 1e-3);
        }
    }

    #[test]
    fn xor_is_not_linearly_separable() {
        // Exact XOR corners: by symmetry the optimum is w = 0, b = 0, every
        // score sits on the boundary and no sample is classified with any margin.
        let corners = [[1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]];
        let rows: Vec<Vec<f64>> = corners.iter().cycle().take(40).map(|c| c.to_vec()).collect();
        let labels: Vec<Label> = (0..40).map(|i| if i % 4 < 2 { Negative } else { Positive }).collect();
        let m = train_svm(&rows, &labels, SvmParams::default()).unwrap();
        assert!(m.w.iter().all(|w| w.abs() < 1e-3) && m.b.abs() < 1e-3, "{m:?}");
        assert!(rows.iter().all(|x| m.decision(x).abs() < 1e-3));

        // Noisy XOR: a line can at best cut off one quadrant.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..400 {
            let (a, b) = (rng.gen_bool(0.5), rng.gen_bool(0.5));
            let sx = if a { 1.0 } else { -1.0 };
            let sy = if b { 1.0 } else { -1.0 };
            rows.push(vec![sx + rng.gen_range(-0.3..0.3), sy + rng.gen_range(-0.3..0.3)]);
            labels.push(if a ^ b { Positive } else { Negative });
        }
        let m = train_svm(&rows, &labels, SvmParams::default()).unwrap();
        let right = rows.iter().zip(&labels).filter(|(x, l)| m.predict(x) == **l).count();
        let acc = right as f64 / rows.len() as f64;
        assert!(acc < 0.85, "xor accuracy {acc}");
    }

    #[test]
    fn rejects_bad_training_input() {
        assert!(train_svm(&[vec![1.0], vec![2.0]], &[Positive, Positive], SvmParams::default()).is_err());
        let p = SvmParams { c: 0.0, ..SvmParams::default() };
        assert!(train_svm(&[vec![1.0], vec![2.0]], &[Positive, Negative], p).is_err());
    }

    #[test]
    fn iteration_cap_is_reported() {
        let (rows, labels) = blobs(6, 50, 0.2);
        let p = SvmParams {
            max_iter: 1,
            tol: 1e-12,
            ..SvmParams::default()
        };
        assert!(matches!(train_svm(&rows, &labels, p), Err(Error::SolverNotConverged { iterations: 1 })));
    }

    #[test]
    fn folds_are_stratified() {
        let labels: Vec<Label> = (0..57).map(|i| if i < 21 { Positive } else { Negative }).collect();
        let a = stratified_folds(&labels, 10, 42, 0);
        for k in 0..10 {
            let pos = (0..57).filter(|&i| a[i] == k && labels[i].is_positive()).count();
            let all = a.iter().filter(|&&f| f == k).count();
            assert!((2..=3).contains(&pos));
            assert!((5..=6).contains(&all));
        }
        assert_eq!(a, stratified_folds(&labels, 10, 42, 0));
        assert_ne!(a, stratified_folds(&labels, 10, 42, 1));
    }

    fn toy_dataset(seed: u64, n: usize, signal: f64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<Label> = (0..n).map(|i| if i % 3 == 0 { Positive } else { Negative }).collect();
        let cols = (0..3)
            .map(|j| {
                labels
                    .iter()
                    .map(|l| signal * (j as f64 + 1.0) * l.sign() + rng.gen_range(-1.0..1.0) * 10f64.powi(j))
                    .collect()
            })
            .collect();
        Dataset::new(vec!["a".into(), "b".into(), "c".into()], cols, labels).unwrap()
    }

    #[test]
    fn cross_validation_is_deterministic_and_consistent() {
        let ds = toy_dataset(1, 120, 0.6);
        let cfg = CvConfig {
            folds: 5,
            repeats: 3,
            ..CvConfig::default()
        };
        let a = cross_validate(&ds, &[0, 1, 2], &cfg).unwrap();
        let b = cross_validate(&ds, &[0, 1, 2], &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_fold.len(), 15);
        for f in &a.per_fold {
            let (p, n) = (f.positives as f64, f.negatives as f64);
            let expect = (p * f.tpr.unwrap() + n * (1.0 - f.fpr.unwrap())) / (p + n);
            assert!((f.acc.unwrap() - expect).abs() < 1e-12);
            assert!((f.tnr.unwrap() + f.fpr.unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(a.acc.unwrap() > 0.8);
    }

    #[test]
    fn noise_gives_chance_auc() {
        let ds = toy_dataset(2, 300, 0.0);
        let cfg = CvConfig {
            folds: 5,
            repeats: 4,
            ..CvConfig::default()
        };
        let m = cross_validate(&ds, &[0, 1, 2], &cfg).unwrap();
        assert!((m.auc.unwrap() - 0.5).abs() < 0.1, "{m:?}");
    }

    #[test]
    fn scaler_ignores_test_rows() {
        let ds = toy_dataset(3, 90, 0.5);
        let labels = ds.labels().to_vec();
        let assign = stratified_folds(&labels, 5, 7, 0);
        let train: Vec<usize> = (0..90).filter(|&i| assign[i] != 0).collect();
        let test: Vec<usize> = (0..90).filter(|&i| assign[i] == 0).collect();
        let before = train_on(&ds, &[0, 1, 2], &train, SvmParams::default()).unwrap();

        // Blow up every test row by 1e6 and retrain on the same training rows.
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|j| {
                let mut c = ds.feature(j).to_vec();
                for &i in &test {
                    c[i] *= 1e6;
                }
                c
            })
            .collect();
        let mutated = Dataset::new(ds.names().to_vec(), cols, labels).unwrap();
        let after = train_on(&mutated, &[0, 1, 2], &train, SvmParams::default()).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn cross_validation_errors() {
        let ds = toy_dataset(4, 30, 0.5);
        assert!(cross_validate(&ds, &[], &CvConfig::default()).is_err());
        assert!(cross_validate(&ds, &[7], &CvConfig::default()).is_err());
        let too_many = CvConfig { folds: 11, ..CvConfig::default() };
        assert!(matches!(cross_validate(&ds, &[0], &too_many), Err(Error::CrossValidation(_))));
        let one = CvConfig { folds: 1, ..CvConfig::default() };
        assert!(cross_validate(&ds, &[0], &one).is_err());
    }
}
