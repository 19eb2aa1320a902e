//! Normal distribution function and its inverse, log-gamma and the
//! regularized incomplete gamma function.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `erf(z)` for `0 <= z < 2` from the everywhere-positive series
/// `erf z = 2/√π e^{-z²} Σ (2z²)^k z / (1·3···(2k+1))`.
fn erf_series(z: f64) -> f64 {
    let z2 = 2.0 * z * z;
    let mut term = z;
    let mut sum = z;
    let mut k = 0.0;
    while term > 1e-17 * sum {
        k += 1.0;
        term *= z2 / (2.0 * k + 1.0);
        sum += term;
    }
    2.0 * FRAC_1_SQRT_PI * (-z * z).exp() * sum
}

/// `erfc(z)` for `z >= 2` from the continued fraction
/// `erfc z = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))`,
/// evaluated with the modified Lentz method.
fn erfc_cf(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI * (-z * z).exp() / f
}

/// Error function.
pub fn erf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let a = z.abs();
    let v = if a < 2.0 { erf_series(a) } else { 1.0 - erfc_cf(a) };
    v.copysign(z)
}

/// Complementary error function, accurate to a few ulps relative in the
/// upper tail.
pub fn erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        2.0 - erfc(-z)
    } else if z < 2.0 {
        1.0 - erf_series(z)
    } else {
        erfc_cf(z)
    }
}

/// Standard normal distribution function `Φ(x)`.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(x) = Φ(-x)`, without cancellation for large `x`.
pub fn std_normal_sf(x: f64) -> f64 {
    std_normal_cdf(-x)
}

/// `Φ(b) - Φ(a)` for `a <= b`, computed on the side that avoids cancellation.
pub fn normal_interval(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        std_normal_sf(a) - std_normal_sf(b)
    } else if b <= 0.0 {
        std_normal_cdf(b) - std_normal_cdf(a)
    } else {
        // both halves are positive, no cancellation for short intervals
        0.5 * (erf(b * FRAC_1_SQRT_2) + erf(-a * FRAC_1_SQRT_2))
    }
}

/// Quantile `Ψ = Φ^{-1}` on `(0, 1)`.
///
/// Bisection on `Φ` brackets the root, then safeguarded Newton steps polish
/// it. The lower tail is always solved directly (`1 - q` is exact for
/// `q >= 1/2`), so small probabilities keep full relative precision.
pub fn std_normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::QuantileDomain(q));
    }
    if q == 0.5 {
        return Ok(0.0);
    }
    let (p, sign) = if q < 0.5 { (q, 1.0) } else { (1.0 - q, -1.0) };
    let (mut lo, mut hi) = (-39.0_f64, 0.0_f64);
    while hi - lo > 1e-2 {
        let mid = 0.5 * (lo + hi);
        if std_normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let fx = std_normal_cdf(x) - p;
        if fx == 0.0 {
            break;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - fx / std_normal_pdf(x);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(sign * x)
}

/// Derivative of the quantile, `Ψ'(q) = √(2π) e^{Ψ(q)²/2}`.
pub fn std_normal_quantile_derivative(q: f64) -> Result<f64> {
    let x = std_normal_quantile(q)?;
    Ok((2.0 * PI).sqrt() * (0.5 * x * x).exp())
}

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let t = x + 7.5;
        let mut a = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        sum * log_prefactor.exp()
    } else {
        // continued fraction for Q(a, x), modified Lentz
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
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
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        1.0 - log_prefactor.exp() * h
    }
}

/// `F(s) = ∫_0^s e^{-r²/2} r^{n-1} dr`, the radial kernel of the Gaussian
/// volume in polar coordinates.
///
/// For `n = 2` this is `1 - e^{-s²/2}`; in general
/// `F(s) = 2^{n/2-1} Γ(n/2) P(n/2, s²/2)`.
pub fn radial_volume_kernel(s: f64, n: usize) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    if n == 2 {
        return -(-0.5 * s * s).exp_m1();
    }
    let a = n as f64 / 2.0;
    let total = ((a - 1.0) * 2f64.ln() + ln_gamma(a)).exp();
    total * gamma_p(a, 0.5 * s * s)
}

/// Gaussian volume of the centered ball of radius `r` in `R^n`.
pub fn gauss_ball_volume(r: f64, n: usize) -> f64 {
    if !(r > 0.0) {
        return 0.0;
    }
    if n == 2 {
        return -(-0.5 * r * r).exp_m1();
    }
    gamma_p(n as f64 / 2.0, 0.5 * r * r)
}
