//! Numerical kernel: sample statistics, the standard normal CDF, central and
//! noncentral Student t CDFs (real-valued degrees of freedom) and bracketed
//! bisection.

use crate::error::{Error, Result};

/// Term cap for the noncentral t series and the incomplete beta fraction.
pub const MAX_SERIES_TERMS: usize = 10_000;
const SERIES_TOL: f64 = 1e-12;
/// Maximum number of bracket doublings in [`bracket_root`].
pub const MAX_BRACKET_EXPANSIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    /// Bessel-corrected (divisor `n - 1`).
    pub sd: f64,
}

impl SampleStats {
    pub fn variance(&self) -> f64 {
        self.sd * self.sd
    }
}

/// Mean and Bessel-corrected standard deviation. Two-pass for accuracy.
pub fn stats(x: &[f64]) -> Result<SampleStats> {
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(SampleStats {
        n: x.len(),
        mean,
        sd: (ss / (n - 1.0)).sqrt(),
    })
}

/// Standard normal CDF.
pub fn phi(z: f64) -> f64 {
    // erfc keeps full relative accuracy in the lower tail.
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "incomplete beta needs a, b > 0 (a = {a}, b = {b})"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "incomplete beta needs 0 <= x <= 1 (x = {x})"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(ln_front.exp() * beta_fraction(x, a, b)? / a)
    } else {
        Ok(1.0 - ln_front.exp() * beta_fraction(1.0 - x, b, a)? / b)
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_fraction(x: f64, a: f64, b: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_SERIES_TERMS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let step = d * c;
        h *= step;
        if (step - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::InvalidArgument(format!(
        "incomplete beta fraction did not converge (x = {x}, a = {a}, b = {b})"
    )))
}

fn check_df(nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "degrees of freedom must be positive and finite, got {nu}"
        )))
    }
}

/// Central Student t CDF for real-valued `nu > 0`.
pub fn t_cdf(t: f64, nu: f64) -> Result<f64> {
    check_df(nu)?;
    if t.is_nan() {
        return Err(Error::NonFinite);
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let x = nu / (nu + t * t);
    let tail = 0.5 * inc_beta(x, 0.5 * nu, 0.5)?;
    Ok(if t > 0.0 { 1.0 - tail } else { tail })
}

/// Noncentral t CDF `P(T <= t | nu, ncp)`.
///
/// Sums the Poisson-weighted incomplete beta series outward from the mode of
/// the Poisson weights, so large noncentralities do not underflow. The forward
/// tail is bounded by a geometric majorant of the remaining Poisson weights
/// times the current beta value; summation stops once that bound drops below
/// 1e-12.
pub fn nct_cdf(t: f64, nu: f64, ncp: f64) -> Result<f64> {
    check_df(nu)?;
    if t.is_nan() || !ncp.is_finite() {
        return Err(Error::NonFinite);
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let p = if t >= 0.0 {
        nct_series(t, nu, ncp)?
    } else {
        1.0 - nct_series(-t, nu, -ncp)?
    };
    Ok(p.clamp(0.0, 1.0))
}

fn nct_series(t: f64, nu: f64, ncp: f64) -> Result<f64> {
    let not_converged = |terms| Error::SeriesNotConverged { t, nu, ncp, terms };
    let base = phi(-ncp);
    let x = t * t / (t * t + nu);
    if x == 0.0 {
        return Ok(base);
    }
    let b = 0.5 * nu;
    let lambda = 0.5 * ncp * ncp;
    let c = ncp / std::f64::consts::SQRT_2;

    if lambda == 0.0 {
        return Ok(base + 0.5 * inc_beta(x, 0.5, b)?);
    }

    let ln_x = x.ln();
    let ln_1mx = (-x).ln_1p();
    let ln_lambda = lambda.ln();
    // Ratio I_x(a, b) - I_x(a + 1, b).
    let gap = |a: f64| (ln_gamma(a + b) - ln_gamma(a + 1.0) - ln_gamma(b) + a * ln_x + b * ln_1mx).exp();

    let k = lambda.floor();
    let p_mode = (-lambda + k * ln_lambda - ln_gamma(k + 1.0)).exp();
    let q_mode = (-lambda + k * ln_lambda - ln_gamma(k + 1.5)).exp();
    let ip_mode = inc_beta(x, k + 0.5, b)?;
    let iq_mode = inc_beta(x, k + 1.0, b)?;
    let gp_mode = gap(k + 0.5);
    let gq_mode = gap(k + 1.0);

    let mut sum = p_mode * ip_mode + c * q_mode * iq_mode;

    // Forward from the mode.
    let (mut p, mut q) = (p_mode, q_mode);
    let (mut ip, mut iq) = (ip_mode, iq_mode);
    let (mut gp, mut gq) = (gp_mode, gq_mode);
    let (mut ap, mut aq) = (k + 0.5, k + 1.0);
    let mut i = k;
    let mut converged = false;
    for _ in 0..MAX_SERIES_TERMS {
        i += 1.0;
        ip -= gp;
        gp *= x * (ap + b) / (ap + 1.0);
        ap += 1.0;
        iq -= gq;
        gq *= x * (aq + b) / (aq + 1.0);
        aq += 1.0;
        p *= lambda / i;
        q *= lambda / (i + 0.5);
        sum += p * ip + c * q * iq;
        // Past the mode the weight ratios lambda / j shrink, so the Poisson
        // tail is below a geometric series; Q_j <= P_j and I_x(j + 1) <= I_x(j + 1/2).
        let next = p * lambda / (i + 1.0);
        let tail = next / (1.0 - lambda / (i + 2.0));
        let bound = 0.5 * (1.0 + c.abs()) * tail * ip.max(0.0);
        if bound < SERIES_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(not_converged(MAX_SERIES_TERMS));
    }

    // Backward to zero; finite, but stop once terms are negligible.
    let (mut p, mut q) = (p_mode, q_mode);
    let (mut ip, mut iq) = (ip_mode, iq_mode);
    let (mut gp, mut gq) = (gp_mode, gq_mode);
    let (mut ap, mut aq) = (k + 0.5, k + 1.0);
    let mut i = k;
    while i >= 1.0 {
        gp *= ap / ((ap + b - 1.0) * x);
        ap -= 1.0;
        ip += gp;
        gq *= aq / ((aq + b - 1.0) * x);
        aq -= 1.0;
        iq += gq;
        p *= i / lambda;
        q *= (i + 0.5) / lambda;
        i -= 1.0;
        let term = p * ip + c * q * iq;
        sum += term;
        if p * ip.abs() < 1e-18 && (c * q * iq).abs() < 1e-18 {
            break;
        }
    }

    Ok(base + 0.5 * sum)
}

/// Bisection on `[lo, hi]` until the bracket is at most `tol` wide.
pub fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    let tol = tol.max(0.0);
    // 2000 halvings cover any finite bracket down to subnormal widths.
    for _ in 0..2000 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// Bisection after growing a bracket `[guess - step, guess + step]`, doubling
/// `step` up to [`MAX_BRACKET_EXPANSIONS`] times until `f` changes sign.
pub fn bracket_root<F: Fn(f64) -> f64>(f: F, guess: f64, step: f64, tol: f64) -> Result<f64> {
    let mut step = step.abs().max(f64::MIN_POSITIVE);
    for _ in 0..=MAX_BRACKET_EXPANSIONS {
        let (lo, hi) = (guess - step, guess + step);
        let (f_lo, f_hi) = (f(lo), f(hi));
        if !f_lo.is_nan() && !f_hi.is_nan() && (f_lo == 0.0 || f_hi == 0.0 || f_lo.signum() != f_hi.signum()) {
            return find_root(f, lo, hi, tol);
        }
        step *= 2.0;
    }
    Err(Error::NoBracket {
        lo: guess - step,
        hi: guess + step,
    })
}
