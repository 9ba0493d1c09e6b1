//! Pearson correlation test with two-sided p-values from the t distribution.
//!
//! With `df = n - 2` and `t = r * sqrt(df / (1 - r^2))`, the two-sided tail is
//! `I_{1 - r^2}(df / 2, 1 / 2)`, the regularized incomplete beta function, which is
//! evaluated here by Lentz's continued fraction.

use crate::error::{Error, Result};

/// Result of one correlation test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearsonTest {
    pub r: f64,
    pub p: f64,
    /// One of the vectors had zero variance; reported as `r = 0`, `p = 1`.
    pub degenerate: bool,
}

/// Two-sided Pearson correlation test of `x` against `y`.
pub fn pearson_pvalue(x: &[f64], y: &[f64]) -> Result<PearsonTest> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::DimensionMismatch(alloc::format!(
            "vectors of length {n} and {}",
            y.len()
        )));
    }
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    if let Some(index) = x.iter().chain(y).position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!(
            "non-finite value at position {index}"
        )));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxx += da * da;
        syy += db * db;
        sxy += da * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(PearsonTest {
            r: 0.0,
            p: 1.0,
            degenerate: true,
        });
    }
    let r = (sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0);
    Ok(PearsonTest {
        r,
        p: correlation_pvalue(r, n),
        degenerate: false,
    })
}

/// Two-sided p-value of a sample correlation `r` over `n >= 3` samples.
pub fn correlation_pvalue(r: f64, n: usize) -> f64 {
    debug_assert!(n >= 3);
    let r = r.clamp(-1.0, 1.0);
    let one_minus_r2 = (1.0 - r) * (1.0 + r);
    if one_minus_r2 <= 0.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    regularized_beta_half(df / 2.0, one_minus_r2).clamp(0.0, 1.0)
}

/// `ln(Gamma(z + 1/2) / Gamma(z))` for `z > 0`.
fn ln_gamma_half_ratio(z: f64) -> f64 {
    // Shift up with Gamma(z + 1) = z Gamma(z) until the asymptotic series is accurate.
    let mut z = z;
    let mut ratio = 1.0;
    while z < 30.0 {
        ratio *= z / (z + 0.5);
        z += 1.0;
    }
    let z2 = z * z;
    let series = 0.5 * libm::log(z) - 1.0 / (8.0 * z) + 1.0 / (192.0 * z * z2)
        - 1.0 / (640.0 * z * z2 * z2)
        + 17.0 / (14336.0 * z * z2 * z2 * z2);
    series + libm::log(ratio)
}

/// `ln B(a, 1/2)`.
fn ln_beta_half(a: f64) -> f64 {
    const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;
    LN_SQRT_PI - ln_gamma_half_ratio(a)
}

/// `I_x(a, 1/2)`.
fn regularized_beta_half(a: f64, x: f64) -> f64 {
    let b = 0.5;
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = a * libm::log(x) + b * libm::log1p(-x) - ln_beta_half(a);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 100_000;
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
    for m in 1..=MAX_ITER {
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
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 50-digit incomplete-beta evaluation.
    #[allow(clippy::excessive_precision)]
    const REFERENCE: [(usize, f64, f64); 8] = [
        (10, 0.75, 0.012477874755859375),
        (10, 0.1, 0.7834244062499999882),
        (50, 0.3, 0.03428618003292997269),
        (100, -0.5, 1.18049202703762689e-7),
        (5, 0.99, 0.001198619511402006452),
        (200, 0.05, 0.4819843684855046930),
        (1000, 0.2, 1.756786237178944072e-10),
        (30, 0.9999, 2.447037929666267079e-53),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for &(n, r, p) in &REFERENCE {
            let got = correlation_pvalue(r, n);
            assert!((got - p).abs() <= 1e-12, "n={n} r={r}: {got} vs {p}");
            if p > 1e-300 {
                assert!(
                    ((got - p) / p).abs() < 1e-9,
                    "relative n={n} r={r}: {got} vs {p}"
                );
            }
        }
    }

    #[test]
    fn zero_and_perfect_correlation() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, -1.0, -1.0, 1.0];
        let t = pearson_pvalue(&x, &y).unwrap();
        assert_eq!(t.r, 0.0);
        assert_eq!(t.p, 1.0);
        let t = pearson_pvalue(&x, &x).unwrap();
        assert_eq!(t.p, 0.0);
        let neg: [f64; 4] = [-2.0, -4.0, -6.0, -8.0];
        assert_eq!(pearson_pvalue(&x, &neg).unwrap().p, 0.0);
    }

    #[test]
    fn constant_vector_is_degenerate() {
        let t = pearson_pvalue(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert!(t.degenerate);
        assert_eq!(t.p, 1.0);
    }

    #[test]
    fn input_errors() {
        assert!(matches!(
            pearson_pvalue(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(pearson_pvalue(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
        assert!(pearson_pvalue(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
