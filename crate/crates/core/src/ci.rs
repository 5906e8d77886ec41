//! Confidence intervals: the noncentrality-parameter pivot for d and D, and a
//! nested (studentized) bootstrap-t for the U measures.

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rayon::prelude::*;

use crate::data::GroupedFeature;
use crate::effect::{u_measures, GroupStats, Measure, UMeasures};
use crate::error::{Error, Result};
use crate::numstats::{bracket_root, nct_cdf};
use crate::rng;

/// Bisection width for noncentrality bounds.
const NCP_TOL: f64 = 1e-10;
/// Largest accepted `|nct_cdf(t, nu, bound) - target|`.
pub const NCP_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiMethod {
    Ncp,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// Confidence level `1 - alpha`.
    pub level: f64,
    pub method: CiMethod,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "confidence level must lie in (0, 1), got {level}"
        )))
    }
}

/// Observed two-sample t statistic with pooled variance; estimates the
/// noncentrality parameter.
pub fn t_stat(g: &GroupedFeature) -> Result<f64> {
    let s = GroupStats::of(g)?;
    let sd = s.pooled_sd();
    if !(sd > 0.0) {
        return Err(Error::Degenerate {
            feature: g.name.clone(),
            reason: "zero pooled variance",
        });
    }
    let (n1, n2) = (g.n1() as f64, g.n2() as f64);
    Ok(s.mean_diff() / (sd * (1.0 / n1 + 1.0 / n2).sqrt()))
}

fn welch_se(s: &GroupStats) -> f64 {
    (s.m.variance() / s.m.n as f64 + s.b.variance() / s.b.n as f64).sqrt()
}

/// Welch's t statistic (unpooled standard error).
pub fn welch_t_stat(g: &GroupedFeature) -> Result<f64> {
    let s = GroupStats::of(g)?;
    let se = welch_se(&s);
    if !(se > 0.0) {
        return Err(Error::Degenerate {
            feature: g.name.clone(),
            reason: "both groups have zero variance",
        });
    }
    Ok(s.mean_diff() / se)
}

/// Welch–Satterthwaite degrees of freedom.
pub fn welch_df(g: &GroupedFeature) -> Result<f64> {
    welch_df_of(&GroupStats::of(g)?).ok_or_else(|| Error::Degenerate {
        feature: g.name.clone(),
        reason: "both groups have zero variance",
    })
}

fn welch_df_of(s: &GroupStats) -> Option<f64> {
    let (n1, n2) = (s.m.n as f64, s.b.n as f64);
    let a = s.m.variance() / n1;
    let b = s.b.variance() / n2;
    let num = (a + b) * (a + b);
    let den = a * a / (n1 - 1.0) + b * b / (n2 - 1.0);
    (den > 0.0).then(|| num / den)
}

/// Noncentrality bounds `(lo, hi)` with `nct_cdf(t_obs, nu, lo) = 1 - alpha/2`
/// and `nct_cdf(t_obs, nu, hi) = alpha/2`.
pub fn ncp_interval(t_obs: f64, nu: f64, level: f64) -> Result<(f64, f64)> {
    check_level(level)?;
    if !(nu > 0.0) || !t_obs.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noncentrality interval needs finite t and nu > 0 (t = {t_obs}, nu = {nu})"
        )));
    }
    let alpha = 1.0 - level;
    let bound = |target: f64| -> Result<f64> {
        let fail = |reason: String| Error::IntervalSearch { t_obs, nu, reason };
        // The CDF can fail deep in the tails; treat that as "not yet bracketed"
        // and keep the first error for the report.
        let first_err = std::cell::RefCell::new(None);
        let f = |ncp: f64| match nct_cdf(t_obs, nu, ncp) {
            Ok(p) => p - target,
            Err(e) => {
                first_err.borrow_mut().get_or_insert(e.to_string());
                f64::NAN
            }
        };
        let root = bracket_root(f, t_obs, 1.0, NCP_TOL).map_err(|e| {
            let detail = first_err.borrow().clone().unwrap_or_else(|| e.to_string());
            fail(detail)
        })?;
        let residual = nct_cdf(t_obs, nu, root).map_err(|e| fail(e.to_string()))? - target;
        if residual.abs() > NCP_RESIDUAL {
            return Err(fail(format!("root residual {residual:e} exceeds {NCP_RESIDUAL:e}")));
        }
        Ok(root)
    };
    let lo = bound(1.0 - alpha / 2.0)?;
    let hi = bound(alpha / 2.0)?;
    Ok((lo, hi))
}

/// Interval for Cohen's d: pivot on the pooled t statistic with
/// `nu = N1 + N2 - 2`, rescaled by `sqrt((N1 + N2) / (N1 N2))`.
pub fn ci_cohens_d(g: &GroupedFeature, level: f64) -> Result<Interval> {
    let t = t_stat(g)?;
    let (n1, n2) = (g.n1() as f64, g.n2() as f64);
    let (lo, hi) = ncp_interval(t, n1 + n2 - 2.0, level)?;
    let scale = ((n1 + n2) / (n1 * n2)).sqrt();
    Ok(Interval {
        lo: lo * scale,
        hi: hi * scale,
        level,
        method: CiMethod::Ncp,
    })
}

/// Interval for Cohen's D: pivot on Welch's t with Welch–Satterthwaite
/// degrees of freedom, rescaled by the ratio of the Welch standard error to the
/// averaged standard deviation.
pub fn ci_cohens_dd(g: &GroupedFeature, level: f64) -> Result<Interval> {
    let s = GroupStats::of(g)?;
    let t = welch_t_stat(g)?;
    let nu = welch_df(g)?;
    let (lo, hi) = ncp_interval(t, nu, level)?;
    let scale = welch_se(&s) / s.average_sd();
    Ok(Interval {
        lo: lo * scale,
        hi: hi * scale,
        level,
        method: CiMethod::Ncp,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapConfig {
    /// Outer resamples.
    pub b1: usize,
    /// Nested resamples per outer resample, for its standard error.
    pub b2: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            b1: 2000,
            b2: 200,
            seed: 42,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.b1 < 100 || self.b2 < 25 {
            return Err(Error::InvalidArgument(format!(
                "bootstrap needs b1 >= 100 and b2 >= 25 (got b1 = {}, b2 = {})",
                self.b1, self.b2
            )));
        }
        Ok(())
    }
}

/// One outer replicate: its statistic and the nested standard error, per U measure.
#[derive(Debug, Clone, Copy)]
struct Replicate {
    theta: [f64; 3],
    se: [f64; 3],
    redraws: usize,
}

fn as_array(u: UMeasures) -> [f64; 3] {
    [u.u1, u.u2, u.u3]
}

/// Resamples `src` into `out`; returns the mean and sum of squared deviations.
fn resample_into<R: Rng>(src: &[f64], pick: &Uniform<u32>, rng: &mut R, out: &mut [f64]) -> (f64, f64) {
    for slot in out.iter_mut() {
        *slot = src[pick.sample(rng) as usize];
    }
    let n = out.len() as f64;
    let mean = out.iter().sum::<f64>() / n;
    let ss = out.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, ss)
}

/// Mean and sum of squared deviations of a resample of `src`, without storing
/// it. Sums are taken about `shift` (the mean of `src`) to limit cancellation.
fn resample_moments<R: Rng>(src: &[f64], shift: f64, pick: &Uniform<u32>, rng: &mut R) -> (f64, f64) {
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..src.len() {
        let v = src[pick.sample(rng) as usize] - shift;
        s1 += v;
        s2 += v * v;
    }
    let n = src.len() as f64;
    let m = s1 / n;
    (shift + m, (s2 - n * m * m).max(0.0))
}

fn pooled_d(m: (f64, f64), b: (f64, f64), df: f64) -> Option<f64> {
    let pooled = ((m.1 + b.1) / df).sqrt();
    // Relative floor: a constant resample can leave rounding residue in the
    // shifted sums.
    let scale = m.0.abs().max(b.0.abs()).max(f64::MIN_POSITIVE);
    (pooled > 1e-12 * scale).then(|| (m.0 - b.0) / pooled)
}

fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn run_replicate(g: &GroupedFeature, cfg: &BootstrapConfig, index: usize, limit: usize) -> Result<Replicate> {
    let mut rng = rng::stream(cfg.seed, index as u64);
    let (n1, n2) = (g.n1(), g.n2());
    let pick_m = Uniform::new(0, n1 as u32);
    let pick_b = Uniform::new(0, n2 as u32);
    let mut outer_m = vec![0.0; n1];
    let mut outer_b = vec![0.0; n2];
    let mut redraws = 0;
    let over = |redraws| Error::BootstrapDegenerate { redraws, limit };

    let df = (n1 + n2 - 2) as f64;

    let (om, ob) = loop {
        let om = resample_into(&g.m, &pick_m, &mut rng, &mut outer_m);
        let ob = resample_into(&g.b, &pick_b, &mut rng, &mut outer_b);
        match pooled_d(om, ob, df) {
            Some(_) => break (om, ob),
            None => {
                redraws += 1;
                if redraws > limit {
                    return Err(over(redraws));
                }
            }
        }
    };
    let theta = as_array(u_measures(pooled_d(om, ob, df).unwrap_or(0.0)));

    let mut nested: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(cfg.b2));
    while nested[0].len() < cfg.b2 {
        let im = resample_moments(&outer_m, om.0, &pick_m, &mut rng);
        let ib = resample_moments(&outer_b, ob.0, &pick_b, &mut rng);
        match pooled_d(im, ib, df) {
            Some(d) => {
                for (k, v) in as_array(u_measures(d)).into_iter().enumerate() {
                    nested[k].push(v);
                }
            }
            None => {
                redraws += 1;
                if redraws > limit {
                    return Err(over(redraws));
                }
            }
        }
    }
    let se = std::array::from_fn(|k| sample_sd(&nested[k]));
    Ok(Replicate { theta, se, redraws })
}

/// Type-7 (linear interpolation) quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi || sorted[lo] == sorted[hi] {
        return sorted[lo];
    }
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Bootstrap-t interval from outer replicates `(theta*_b, se*_b)`.
///
/// `T*_b = (theta*_b - theta_hat) / se*_b`; the returned bounds are
/// `theta_hat - t*_{1-a/2} sd(theta*)` and `theta_hat - t*_{a/2} sd(theta*)`,
/// where `sd(theta*)` is the spread of the outer replicates. Replicates are
/// sorted before any reduction, so the result does not depend on their order.
fn studentized_bounds(theta_hat: f64, replicates: &[(f64, f64)], level: f64) -> (f64, f64) {
    let alpha = 1.0 - level;
    let mut thetas: Vec<f64> = replicates.iter().map(|r| r.0).collect();
    thetas.sort_by(f64::total_cmp);
    let spread = sample_sd(&thetas);
    let mut t: Vec<f64> = replicates
        .iter()
        .map(|&(theta, se)| {
            let diff = theta - theta_hat;
            if se > 0.0 {
                diff / se
            } else if diff == 0.0 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            }
        })
        .collect();
    t.sort_by(f64::total_cmp);
    let t_lo = quantile(&t, alpha / 2.0);
    let t_hi = quantile(&t, 1.0 - alpha / 2.0);
    let bound = |tq: f64| {
        if spread == 0.0 {
            theta_hat
        } else {
            theta_hat - tq * spread
        }
    };
    (bound(t_hi).clamp(0.0, 1.0), bound(t_lo).clamp(0.0, 1.0))
}

/// Bootstrap-t intervals for U1, U2 and U3 from one shared set of resamples.
///
/// Resampling is stratified: each replicate draws `N1` values from `g.m` and
/// `N2` from `g.b` with replacement. Replicate `b` uses its own random stream
/// derived from `(cfg.seed, b)`, so the result is identical however the
/// replicates are scheduled. Resamples with zero pooled variance are redrawn;
/// more than `10 * b1` redraws in total is an error.
pub fn bootstrap_ci_u_all(g: &GroupedFeature, cfg: &BootstrapConfig, level: f64) -> Result<[Interval; 3]> {
    cfg.validate()?;
    check_level(level)?;
    let theta_hat = as_array(u_measures(
        GroupStats::of(g)?.cohens_d().map_err(|e| e.for_feature(&g.name))?,
    ));
    let limit = 10 * cfg.b1;
    let replicates: Vec<Replicate> = (0..cfg.b1)
        .into_par_iter()
        .map(|b| run_replicate(g, cfg, b, limit))
        .collect::<Result<_>>()?;
    let redraws: usize = replicates.iter().map(|r| r.redraws).sum();
    if redraws > limit {
        return Err(Error::BootstrapDegenerate { redraws, limit });
    }
    Ok(std::array::from_fn(|k| {
        let pairs: Vec<(f64, f64)> = replicates.iter().map(|r| (r.theta[k], r.se[k])).collect();
        let (lo, hi) = studentized_bounds(theta_hat[k], &pairs, level);
        Interval {
            lo,
            hi,
            level,
            method: CiMethod::Bootstrap,
        }
    }))
}

/// Bootstrap-t interval for one U measure. See [`bootstrap_ci_u_all`].
pub fn bootstrap_ci_u(g: &GroupedFeature, measure: Measure, cfg: &BootstrapConfig, level: f64) -> Result<Interval> {
    let slot = match measure {
        Measure::U1 => 0,
        Measure::U2 => 1,
        Measure::U3 => 2,
        other => {
            return Err(Error::InvalidArgument(format!(
                "bootstrap intervals are for U measures, not {}",
                other.key()
            )))
        }
    };
    Ok(bootstrap_ci_u_all(g, cfg, level)?[slot])
}
