//! Shapiro-Wilk W test with Royston's approximation for the coefficients and
//! the p-value (algorithm AS R94).

use alloc::vec::Vec;

use super::distributions::{normal_quantile, normal_sf};
use super::{StatTestResult, TestKind};
use crate::math::{asin, exp, ln, sqrt};
use crate::{Error, Result};

const SMALL: f64 = 1e-19;

/// `c[0] + c[1] x + c[2] x^2 + ...`
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Coefficients for the lower half of the order statistics (positive values,
/// applied antisymmetrically).
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return alloc::vec![core::f64::consts::FRAC_1_SQRT_2];
    }
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
    let an = n as f64;
    let m: Vec<f64> = (1..=half)
        .map(|i| normal_quantile((i as f64 - 0.375) / (an + 0.25)))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = sqrt(summ2);
    let rsn = 1.0 / sqrt(an);
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    let mut a = alloc::vec![0.0; half];
    a[0] = a1;
    let (first_free, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        (2, fac)
    } else {
        (1, sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)))
    };
    for i in first_free..half {
        a[i] = -m[i] / fac;
    }
    a
}

pub fn shapiro_wilk(xs: &[f64]) -> Result<StatTestResult> {
    let n = xs.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::input(alloc::format!(
            "Shapiro-Wilk needs 3 to 5000 values, got {n}"
        )));
    }
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("Shapiro-Wilk needs finite values"));
    }
    let mut x = Vec::from(xs);
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range < SMALL {
        return Err(Error::DegenerateVariance("all values are identical".into()));
    }
    // scale by the range for numerical stability, as the reference algorithm does
    for v in &mut x {
        *v /= range;
    }
    let a = coefficients(n);
    let numerator: f64 = a.iter().enumerate().map(|(i, ai)| ai * (x[n - 1 - i] - x[i])).sum();
    let mean = x.iter().sum::<f64>() / n as f64;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let w = (numerator * numerator / ss).min(1.0);

    let p = if n == 3 {
        const SIX_OVER_PI: f64 = 1.909_859_317_102_744;
        const PI_OVER_THREE: f64 = 1.047_197_551_196_597_6;
        (SIX_OVER_PI * (asin(sqrt(w)) - PI_OVER_THREE)).max(0.0)
    } else {
        let mut y = ln(1.0 - w);
        let an = n as f64;
        let (m, s) = if n <= 11 {
            let gamma = poly(&[-2.273, 0.459], an);
            if y >= gamma {
                return Ok(StatTestResult::new(TestKind::ShapiroWilk, w, 1e-99));
            }
            y = -ln(gamma - y);
            (
                poly(&[0.544, -0.39978, 0.025054, -6.714e-4], an),
                exp(poly(&[1.3822, -0.77857, 0.062767, -0.0020322], an)),
            )
        } else {
            let ln_n = ln(an);
            (
                poly(&[-1.5861, -0.31082, -0.083751, 0.0038915], ln_n),
                exp(poly(&[-0.4803, -0.082676, 0.0030302], ln_n)),
            )
        };
        normal_sf((y - m) / s)
    };
    Ok(StatTestResult::new(TestKind::ShapiroWilk, w, p))
}
