//! Sine integral, needed for the analytic tail of truncated Fourier integrals.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

const MAX_ITER: usize = 500;

/// `Si(x) = ∫_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    let t = x.abs();
    let si = if t <= 2.0 {
        si_series(t)
    } else {
        FRAC_PI_2 - si_tail_cf(t)
    };
    si.copysign(x)
}

/// `∫_x^∞ sin(t)/t dt = pi/2 - Si(x)` for `x >= 0`, evaluated without
/// cancellation for large `x`.
pub fn sine_integral_tail(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= 2.0 {
        FRAC_PI_2 - si_series(x)
    } else {
        si_tail_cf(x)
    }
}

fn si_series(t: f64) -> f64 {
    // sum_n (-1)^n t^{2n+1} / ((2n+1) (2n+1)!)
    let t2 = t * t;
    let mut term = t; // t^{2n+1}/(2n+1)!
    let mut sum = t;
    for n in 1..MAX_ITER {
        let k = (2 * n) as f64;
        term *= -t2 / (k * (k + 1.0));
        let add = term / (k + 1.0);
        sum += add;
        if add.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    sum
}

/// Continued fraction for `E1(i t)` (modified Lentz); `-Im[e^{-it} cf]` is the
/// sine-integral tail.
fn si_tail_cf(t: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, t);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..MAX_ITER {
        let a = -((i * i) as f64);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    let h = Complex64::new(t.cos(), -t.sin()) * h;
    -h.im
}
