//! Exact dynamics of a two-level atom coupled resonantly to a lossy cavity
//! mode (Lorentzian spectral density, vacuum reservoir).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::damping_basis::BathParams;
use crate::error::{check_time, Error, Result};
use crate::kernel_solutions::Branch;
use crate::kernel_solutions::{damped_oscillator, BranchInfo, RatioA, DEGENERATE_BAND};
use crate::quadrature;
use crate::special::sine_integral_tail;

/// Half-width of the quadrature window in units of `lambda_bar`.
pub const QUADRATURE_HALF_WIDTH: f64 = 200.0;

/// Bound on the normalized quadrature error estimate; relative to
/// `gamma0_bar * lambda_bar`.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

/// Residual truncation error after the analytic tail correction, relative to
/// `gamma0_bar * lambda_bar`: `2/(5 pi W^5)` for window half-width `W`.
pub fn tail_residual_bound() -> f64 {
    2.0 / (5.0 * PI * QUADRATURE_HALF_WIDTH.powi(5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianBath {
    omega0: f64,
    gamma0_bar: f64,
    lambda_bar: f64,
}

impl LorentzianBath {
    pub fn new(omega0: f64, gamma0_bar: f64, lambda_bar: f64) -> Result<Self> {
        if !omega0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega0",
                value: omega0,
                reason: "must be finite",
            });
        }
        if !(gamma0_bar >= 0.0 && gamma0_bar.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma0_bar",
                value: gamma0_bar,
                reason: "must be finite and >= 0",
            });
        }
        if !(lambda_bar > 0.0 && lambda_bar.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda_bar",
                value: lambda_bar,
                reason: "must be finite and > 0",
            });
        }
        Ok(LorentzianBath {
            omega0,
            gamma0_bar,
            lambda_bar,
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn gamma0_bar(&self) -> f64 {
        self.gamma0_bar
    }

    pub fn lambda_bar(&self) -> f64 {
        self.lambda_bar
    }

    /// Zero-temperature bath parameters with `gamma0 = gamma0_bar` and
    /// `gamma = lambda_bar`.
    pub fn to_bath_params(&self) -> BathParams {
        BathParams::new(self.gamma0_bar, self.lambda_bar, 0.0).expect("validated on construction")
    }

    /// `R = gamma0_bar / lambda_bar`.
    pub fn ratio(&self) -> f64 {
        self.gamma0_bar / self.lambda_bar
    }
}

/// `J(omega) = (1/pi) gamma0_bar lambda_bar^2 / ((omega0 - omega)^2 + lambda_bar^2)`.
pub fn spectral_density(bath: &LorentzianBath, omega: f64) -> f64 {
    let d = bath.omega0 - omega;
    let l = bath.lambda_bar;
    bath.gamma0_bar * l * l / (PI * (d * d + l * l))
}

/// Closed-form correlation kernel `gamma0_bar lambda_bar e^{-lambda_bar t}`.
pub fn correlation_kernel_closed(bath: &LorentzianBath, t: f64) -> Result<Complex64> {
    check_time(t)?;
    Ok(Complex64::new(
        bath.gamma0_bar * bath.lambda_bar * (-bath.lambda_bar * t).exp(),
        0.0,
    ))
}

/// `∫_W^∞ cos(k x)/(1 + x^2) dx` through `1/x^2 - 1/x^4`; the neglected
/// remainder is below `1/(5 W^5)`.
fn cosine_tail(k: f64, w: f64) -> f64 {
    let kw = k * w;
    let (c, s) = (kw.cos(), kw.sin());
    let c2 = c / w - k * sine_integral_tail(kw);
    let i3 = s / (2.0 * w * w) + 0.5 * k * c2;
    let c4 = c / (3.0 * w * w * w) - k * i3 / 3.0;
    c2 - c4
}

/// Correlation kernel `∫ J(omega) e^{i(omega - omega0) t} d omega` evaluated by
/// adaptive quadrature over `omega0 ± 200 lambda_bar`, plus an analytic
/// correction for the Lorentzian tails outside the window. The sine part
/// of the tails cancels by symmetry; after the cosine correction the
/// truncation error is below [`tail_residual_bound`].
pub fn correlation_kernel_quadrature(bath: &LorentzianBath, t: f64) -> Result<Complex64> {
    check_time(t)?;
    let scale = bath.gamma0_bar * bath.lambda_bar;
    if scale == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let k = bath.lambda_bar * t;
    let w = QUADRATURE_HALF_WIDTH;
    // x = (omega - omega0)/lambda_bar; J d omega = (scale/pi) dx / (1 + x^2)
    let abs_tol = 1e-14;
    let max_intervals = 20_000;
    let re = quadrature::integrate(
        |x| (k * x).cos() / (1.0 + x * x),
        -w,
        w,
        abs_tol,
        0.0,
        max_intervals,
    );
    let im = quadrature::integrate(
        |x| (k * x).sin() / (1.0 + x * x),
        -w,
        w,
        abs_tol,
        0.0,
        max_intervals,
    );
    let estimate = (re.error + im.error) / PI;
    if estimate > QUADRATURE_TOLERANCE {
        return Err(Error::Quadrature {
            estimate: estimate * scale,
            tolerance: QUADRATURE_TOLERANCE * scale,
        });
    }
    let tail = 2.0 * cosine_tail(k, w);
    Ok(Complex64::new(re.value + tail, im.value) * (scale / PI))
}

/// Branch of the exact amplitude, discriminant `1 - 2R`.
pub fn exact_branch(ratio: RatioA) -> BranchInfo {
    let discriminant = 1.0 - 2.0 * ratio.value();
    let branch = if discriminant.abs() <= DEGENERATE_BAND {
        Branch::Degenerate
    } else if discriminant > 0.0 {
        Branch::Hyperbolic
    } else {
        Branch::Trigonometric
    };
    BranchInfo {
        discriminant,
        branch,
    }
}

/// Excited-state amplitude factor `c(tau)`,
/// `e^{-tau/2}[cosh(d tau/2) + sinh(d tau/2)/d]` with `d = sqrt(1 - 2R)`,
/// continued to `cos`/`sin` for `2R > 1`. `c(0) = 1`, `c'(0) = 0`.
pub fn exact_amplitude(ratio: RatioA, tau: f64) -> Result<f64> {
    RatioA::new(ratio.value())?;
    check_time(tau)?;
    Ok(damped_oscillator(1.0 - 2.0 * ratio.value(), tau))
}

/// Excited-state population `p0 c(tau)^2`.
pub fn exact_excited_population(ratio: RatioA, tau: f64, p0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidParameter {
            name: "p0",
            value: p0,
            reason: "initial population must lie in [0, 1]",
        });
    }
    let c = exact_amplitude(ratio, tau)?;
    Ok(p0 * c * c)
}
