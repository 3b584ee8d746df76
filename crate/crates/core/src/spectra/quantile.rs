//! Upper-tail quantiles of the standard normal and F distributions.
//!
//! CDFs go through the regularized incomplete gamma and beta functions
//! (series plus modified-Lentz continued fractions); quantiles are found by
//! bisection on the survival function.

use crate::{Error, Result};

const CF_MAX_ITER: usize = 500;
const CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const BISECTION_STEPS: usize = 200;

fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let log_prefactor = a * libm::log(x) - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut del = 1.0 / a;
        let mut sum = del;
        for _ in 0..CF_MAX_ITER {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * CF_EPS {
                break;
            }
        }
        sum * libm::exp(log_prefactor)
    } else {
        1.0 - upper_gamma_cf(a, x, log_prefactor)
    }
}

/// `Q(a, x)` by continued fraction, valid for `x >= a + 1`.
fn upper_gamma_cf(a: f64, x: f64, log_prefactor: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    libm::exp(log_prefactor) * h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let log_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * libm::log(x) + b * libm::log1p(-x);
    let front = libm::exp(log_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
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
    for m in 1..CF_MAX_ITER {
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
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Standard normal CDF, `Phi(z) = (1 + sign(z) P(1/2, z^2/2)) / 2`.
pub fn normal_cdf(z: f64) -> f64 {
    let p = reg_lower_gamma(0.5, z * z / 2.0);
    if z >= 0.0 {
        0.5 + 0.5 * p
    } else {
        0.5 - 0.5 * p
    }
}

/// CDF of the F distribution with `(d1, d2)` degrees of freedom.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    reg_inc_beta(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Bisection for the point where a decreasing survival function equals `alpha`.
fn bisect_survival(mut lo: f64, mut hi: f64, alpha: f64, sf: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Upper-`alpha` quantile `C_alpha` of the standard normal: `P(Z > C_alpha) = alpha`.
pub fn normal_quantile(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(bisect_survival(-40.0, 40.0, alpha, |z| 1.0 - normal_cdf(z)))
}

/// Upper-`alpha` quantile of `F(d1, d2)`.
pub fn f_quantile(d1: f64, d2: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(d1 >= 1.0 && d2 >= 1.0) || !d1.is_finite() || !d2.is_finite() {
        return Err(Error::InvalidDegreesOfFreedom);
    }
    let sf = |x: f64| 1.0 - f_cdf(x, d1, d2);
    let mut hi = 1.0;
    while sf(hi) > alpha {
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    Ok(bisect_survival(0.0, hi, alpha, sf))
}
