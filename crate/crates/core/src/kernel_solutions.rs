//! Closed-form decay factors for the post-Markovian and memory-kernel master
//! equations with kernel `k(t) = gamma exp(-gamma t)`.
//!
//! In the damping basis both equations decouple into scalar problems for
//! each eigenvalue `lambda`. With `a = |lambda|/gamma` and `tau = gamma t`
//! their Laplace transforms are
//!
//! ```text
//! post-Markovian:  (s + 1 + a) / ((s + a)(s + 1))
//! memory kernel:   (s + 1)     / (s^2 + s + a)
//! ```
//!
//! The first has two real poles for every `a >= 0` and inverts to the
//! two-exponential form `(e^{-a tau} - a e^{-tau}) / (1 - a)`; the second
//! switches from hyperbolic to trigonometric behaviour at `4a = 1`.

use serde::{Deserialize, Serialize};

use crate::damping_basis::{spectrum, BathParams};
use crate::error::{check_time, Error, Result};
use crate::qubit_state::AffineBlochMap;

/// Half-width of the band around a double pole inside which the series
/// expansion replaces the generic formula.
pub const DEGENERATE_BAND: f64 = 1e-9;

/// Dimensionless ratio `|lambda|/gamma` for one damping-basis eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct RatioA(f64);

impl RatioA {
    pub fn new(a: f64) -> Result<Self> {
        if a >= 0.0 && a.is_finite() {
            Ok(RatioA(a))
        } else {
            Err(Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "ratio must be finite and >= 0",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which ratio feeds the coherence factor.
///
/// `Consistent` uses `|lambda3|/gamma = R/2`, the value implied by the
/// damping-basis eigenvalues; `PaperLiteral` uses `2R` as printed in the
/// published solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CoherenceArgMode {
    #[default]
    Consistent,
    PaperLiteral,
}

impl CoherenceArgMode {
    /// Coherence ratio given the population ratio `R = |lambda2|/gamma`.
    pub fn coherence_ratio(self, ratio: f64) -> f64 {
        match self {
            CoherenceArgMode::Consistent => 0.5 * ratio,
            CoherenceArgMode::PaperLiteral => 2.0 * ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Hyperbolic,
    Trigonometric,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchInfo {
    pub discriminant: f64,
    pub branch: Branch,
}

impl BranchInfo {
    fn classify(discriminant: f64) -> Self {
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
}

/// `r(a) = 4a/(1+a)^2`; never exceeds 1.
pub fn r_of(a: RatioA) -> f64 {
    let a = a.0;
    4.0 * a / ((1.0 + a) * (1.0 + a))
}

/// Branch of the post-Markovian factor. The discriminant is `1 - r(a)`,
/// which is a perfect square and never negative; the degenerate band is
/// measured on the pole separation `1 - a`.
pub fn post_markovian_branch(a: RatioA) -> BranchInfo {
    let discriminant = 1.0 - r_of(a);
    let branch = if (1.0 - a.0).abs() <= DEGENERATE_BAND {
        Branch::Degenerate
    } else if discriminant >= 0.0 {
        Branch::Hyperbolic
    } else {
        Branch::Trigonometric
    };
    BranchInfo {
        discriminant,
        branch,
    }
}

/// Branch of the memory-kernel factor, discriminant `1 - 4a`.
pub fn memory_kernel_branch(a: RatioA) -> BranchInfo {
    BranchInfo::classify(1.0 - 4.0 * a.0)
}

fn check(a: RatioA, tau: f64) -> Result<()> {
    RatioA::new(a.0)?;
    check_time(tau)
}

/// Post-Markovian decay factor `(e^{-a tau} - a e^{-tau})/(1 - a)`.
pub fn xi_post_markovian(a: RatioA, tau: f64) -> Result<f64> {
    check(a, tau)?;
    Ok(post_markovian_unchecked(a.0, tau))
}

pub(crate) fn post_markovian_unchecked(a: f64, tau: f64) -> f64 {
    if (1.0 - a).abs() <= DEGENERATE_BAND {
        degenerate_series(a, tau)
    } else {
        two_exponential(a, tau)
    }
}

// e^{-tau} [(1 + tau) + eps tau^2/2 + eps^2 tau^3/6], eps = 1 - a
fn degenerate_series(a: f64, tau: f64) -> f64 {
    let eps = 1.0 - a;
    let t2 = tau * tau;
    (-tau).exp() * ((1.0 + tau) + eps * t2 / 2.0 + eps * eps * t2 * tau / 6.0)
}

fn two_exponential(a: f64, tau: f64) -> f64 {
    let eps = 1.0 - a;
    if eps.abs() < 0.5 {
        // e^{-tau} [1 + expm1(eps tau)/eps], free of cancellation near a = 1
        let et = (-tau).exp();
        if et == 0.0 {
            // e^{-a tau}/(1 - a) dominates once e^{-tau} underflows
            return ((-a * tau).exp() / eps).max(0.0);
        }
        et * (1.0 + (eps * tau).exp_m1() / eps)
    } else {
        ((-a * tau).exp() - a * (-tau).exp()) / eps
    }
}

/// Third-order expansion of the post-Markovian factor about `a = 1`,
/// evaluated at any `a`. Accurate to `O((1 - a)^3 tau^4 e^{-tau})`.
pub fn xi_post_markovian_series(a: RatioA, tau: f64) -> Result<f64> {
    check(a, tau)?;
    Ok(degenerate_series(a.0, tau))
}

/// Two-exponential form of the post-Markovian factor, for `a != 1`.
pub fn xi_post_markovian_two_exponential(a: RatioA, tau: f64) -> Result<f64> {
    check(a, tau)?;
    if a.0 == 1.0 {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a.0,
            reason: "two-exponential form is singular at a = 1",
        });
    }
    Ok(two_exponential(a.0, tau))
}

/// The cosh/sinh form written in terms of `r(a)`. Kept as an independent
/// algebraic route for cross-validation of [`xi_post_markovian`].
pub fn xi_post_markovian_hyperbolic(a: RatioA, tau: f64) -> Result<f64> {
    check(a, tau)?;
    let r = r_of(a);
    let s = (1.0 - r).abs().sqrt();
    let x = (a.0 + 1.0) * tau / 2.0;
    let env = (-x).exp();
    let sx = s * x;
    let value = if s == 0.0 {
        env * (1.0 + x)
    } else if r <= 1.0 && sx >= 20.0 {
        // cosh and sinh overflow long before the product does
        0.5 * ((1.0 + 1.0 / s) * (-(1.0 - s) * x).exp() + (1.0 - 1.0 / s) * (-(1.0 + s) * x).exp())
    } else if r <= 1.0 {
        env * (sx.cosh() + sx.sinh() / s)
    } else {
        env * (sx.cos() + sx.sin() / s)
    };
    Ok(value)
}

/// Memory-kernel decay factor
/// `e^{-tau/2} [cosh(b tau/2) + sinh(b tau/2)/b]`, `b = sqrt(1 - 4a)`, with
/// the trigonometric continuation for `4a > 1`.
pub fn xi_memory_kernel(a: RatioA, tau: f64) -> Result<f64> {
    check(a, tau)?;
    Ok(damped_oscillator(1.0 - 4.0 * a.0, tau))
}

/// `e^{-x}[cosh(sqrt(d) x) + sinh(sqrt(d) x)/sqrt(d)]` at `x = tau/2`,
/// continued analytically through `d = 0` and to `d < 0`. This is the unit
/// initial-value, zero-slope solution of `y'' + y' + ((1 - d)/4) y = 0`.
pub(crate) fn damped_oscillator(d: f64, tau: f64) -> f64 {
    let x = 0.5 * tau;
    if d.abs() <= DEGENERATE_BAND {
        let x2 = x * x;
        let series = 1.0
            + x
            + d * (x2 / 2.0 + x2 * x / 6.0)
            + d * d * (x2 * x2 / 24.0 + x2 * x2 * x / 120.0);
        return (-x).exp() * series;
    }
    if d > 0.0 {
        let b = d.sqrt();
        let bx = b * x;
        if bx < 20.0 {
            (-x).exp() * (bx.cosh() + bx.sinh() / b)
        } else {
            0.5 * ((1.0 + 1.0 / b) * (-(1.0 - b) * x).exp()
                + (1.0 - 1.0 / b) * (-(1.0 + b) * x).exp())
        }
    } else {
        let w = (-d).sqrt();
        let wx = w * x;
        (-x).exp() * (wx.cos() + wx.sin() / w)
    }
}

fn assemble(
    params: &BathParams,
    mode: CoherenceArgMode,
    t: f64,
    factor: fn(f64, f64) -> f64,
) -> Result<AffineBlochMap> {
    check_time(t)?;
    let tau = params.gamma() * t;
    let spec = spectrum(params);
    let a_pop = spec.lambda2.abs() / params.gamma();
    let a_coh = mode.coherence_ratio(a_pop);
    Ok(AffineBlochMap::new(
        factor(a_coh, tau),
        factor(a_pop, tau),
        params.wz_equilibrium(),
    ))
}

/// Post-Markovian dynamical map at physical time `t`.
pub fn post_markovian_map(
    params: &BathParams,
    mode: CoherenceArgMode,
    t: f64,
) -> Result<AffineBlochMap> {
    assemble(params, mode, t, post_markovian_unchecked)
}

/// Memory-kernel dynamical map at physical time `t`.
pub fn memory_kernel_map(
    params: &BathParams,
    mode: CoherenceArgMode,
    t: f64,
) -> Result<AffineBlochMap> {
    assemble(params, mode, t, |a, tau| {
        damped_oscillator(1.0 - 4.0 * a, tau)
    })
}
