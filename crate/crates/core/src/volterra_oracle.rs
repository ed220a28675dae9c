//! Brute-force solver for the scalar Volterra integro-differential equations
//! behind every closed form in this crate:
//!
//! ```text
//! dmu/dtau = -c ∫_0^tau K(tau - s) mu(s) ds,   mu(0) = 1
//! ```
//!
//! | form            | c     | K(u)               |
//! |-----------------|-------|--------------------|
//! | PostMarkovian   | a     | e^{-(1 + a) u}     |
//! | MemoryKernel    | a     | e^{-u}             |
//! | ExactAmplitude  | a / 2 | e^{-u}             |
//!
//! with `a = |lambda|/gamma`. The convolution is integrated with the
//! trapezoidal rule over the full history at every step (O(n^2) work) and
//! time-stepped with a Heun predictor-corrector. The exponential kernel is
//! deliberately *not* reduced to a local ODE system, so nothing here shares
//! algebra with the Laplace-domain closed forms.
//!
//! This module must not depend on `kernel_solutions` or `exact_jc`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Solutions whose magnitude exceeds this are reported as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Largest step for which accuracy claims are made.
pub const MAX_ACCURATE_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VolterraForm {
    PostMarkovian,
    MemoryKernel,
    ExactAmplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolterraProblem {
    lambda: f64,
    gamma: f64,
    form: VolterraForm,
    step: f64,
    tau_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    /// `(tau, mu)` on the uniform grid, starting at `(0, 1)`.
    pub samples: Vec<(f64, f64)>,
    /// Largest predictor/corrector disagreement over all steps.
    pub max_step_error_estimate: f64,
    step: f64,
    slopes: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RichardsonReport {
    /// `log2(d_coarse / d_fine)`; `None` when both differences vanish.
    pub order: Option<f64>,
    /// max |mu_h - mu_{h/2}| on the coarse grid.
    pub diff_coarse: f64,
    /// max |mu_{h/2} - mu_{h/4}| on the coarse grid.
    pub diff_fine: f64,
}

impl VolterraProblem {
    pub fn new(
        lambda: f64,
        gamma: f64,
        form: VolterraForm,
        step: f64,
        tau_max: f64,
    ) -> Result<Self> {
        if !(lambda <= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "eigenvalue must be finite and <= 0",
            });
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "kernel rate must be finite and > 0",
            });
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "step",
                value: step,
                reason: "must be finite and > 0",
            });
        }
        if !(tau_max >= 0.0 && tau_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tau_max",
                value: tau_max,
                reason: "must be finite and >= 0",
            });
        }
        let n = (tau_max / step).round();
        if (n * step - tau_max).abs() > 1e-9 * tau_max.max(step) {
            return Err(Error::InvalidParameter {
                name: "tau_max",
                value: tau_max,
                reason: "must be an integer multiple of the step",
            });
        }
        Ok(VolterraProblem {
            lambda,
            gamma,
            form,
            step,
            tau_max,
        })
    }

    /// Problem in dimensionless units (`gamma = 1`, `lambda = -a`).
    pub fn from_ratio(form: VolterraForm, a: f64, step: f64, tau_max: f64) -> Result<Self> {
        VolterraProblem::new(-a, 1.0, form, step, tau_max)
    }

    pub fn form(&self) -> VolterraForm {
        self.form
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    /// `a = |lambda|/gamma`.
    pub fn ratio(&self) -> f64 {
        -self.lambda / self.gamma
    }

    pub fn steps(&self) -> usize {
        (self.tau_max / self.step).round() as usize
    }

    pub fn with_step(&self, step: f64) -> Result<Self> {
        VolterraProblem::new(self.lambda, self.gamma, self.form, step, self.tau_max)
    }

    /// Returns `(c, beta)` with the kernel `K(u) = e^{-beta u}`.
    fn coefficients(&self) -> (f64, f64) {
        let a = self.ratio();
        match self.form {
            VolterraForm::PostMarkovian => (a, 1.0 + a),
            VolterraForm::MemoryKernel => (a, 1.0),
            VolterraForm::ExactAmplitude => (0.5 * a, 1.0),
        }
    }
}

impl OracleSolution {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|&(_, v)| v)
    }

    pub fn final_value(&self) -> f64 {
        self.samples.last().map(|&(_, v)| v).unwrap_or(1.0)
    }

    /// Cubic Hermite interpolation from grid values and slopes; `None`
    /// outside the solved horizon.
    pub fn value_at(&self, tau: f64) -> Option<f64> {
        let n = self.samples.len() - 1;
        let t_end = self.samples[n].0;
        if !(0.0..=t_end * (1.0 + 1e-12)).contains(&tau) {
            return None;
        }
        let pos = tau / self.step;
        let i = (pos.floor() as usize).min(n.saturating_sub(1));
        if n == 0 {
            return Some(self.samples[0].1);
        }
        let s = pos - i as f64;
        if s.abs() < 1e-12 {
            return Some(self.samples[i].1);
        }
        if (s - 1.0).abs() < 1e-12 {
            return Some(self.samples[i + 1].1);
        }
        let (y0, y1) = (self.samples[i].1, self.samples[i + 1].1);
        let (m0, m1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        Some(
            (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                + (s3 - 2.0 * s2 + s) * m0
                + (-2.0 * s3 + 3.0 * s2) * y1
                + (s3 - s2) * m1,
        )
    }
}

/// Solves one problem on its uniform grid.
pub fn solve(problem: &VolterraProblem) -> Result<OracleSolution> {
    let n = problem.steps();
    let h = problem.step;
    let (c, beta) = problem.coefficients();
    let kernel: Vec<f64> = (0..=n).map(|j| (-beta * h * j as f64).exp()).collect();

    let mut mu = Vec::with_capacity(n + 1);
    let mut slope = Vec::with_capacity(n + 1);
    mu.push(1.0);
    slope.push(0.0);
    let mut max_err: f64 = 0.0;

    for m in 0..n {
        // trapezoid over the known history for the convolution at tau_{m+1}
        let history: f64 = kernel[1..=m]
            .iter()
            .rev()
            .zip(&mu[1..=m])
            .map(|(k, y)| k * y)
            .sum();
        let known = h * (0.5 * kernel[m + 1] * mu[0] + history);
        let rate = |y_next: f64| -c * (known + 0.5 * h * kernel[0] * y_next);

        let predicted = mu[m] + h * slope[m];
        let corrected = mu[m] + 0.5 * h * (slope[m] + rate(predicted));
        max_err = max_err.max((corrected - predicted).abs());

        if !corrected.is_finite() || corrected.abs() > DIVERGENCE_LIMIT {
            return Err(Error::Divergence {
                tau: (m + 1) as f64 * h,
                value: corrected.abs(),
            });
        }
        mu.push(corrected);
        slope.push(rate(corrected));
    }

    Ok(OracleSolution {
        samples: mu
            .iter()
            .enumerate()
            .map(|(i, &y)| (i as f64 * h, y))
            .collect(),
        max_step_error_estimate: max_err,
        step: h,
        slopes: slope,
    })
}

/// Solves many independent problems, in parallel when requested.
pub fn solve_batch(exec: Execution, problems: &[VolterraProblem]) -> Vec<Result<OracleSolution>> {
    exec.map(problems, solve)
}

/// Empirical convergence order from solutions at `h`, `h/2` and `h/4`.
pub fn richardson_check(problem: &VolterraProblem) -> Result<RichardsonReport> {
    let h = problem.step;
    let runs = [
        *problem,
        problem.with_step(h / 2.0)?,
        problem.with_step(h / 4.0)?,
    ];
    let sols: Vec<OracleSolution> = solve_batch(Execution::Parallel, &runs)
        .into_iter()
        .collect::<Result<_>>()?;
    let n = problem.steps();
    let at = |s: &OracleSolution, stride: usize, i: usize| s.samples[i * stride].1;
    let mut diff_coarse: f64 = 0.0;
    let mut diff_fine: f64 = 0.0;
    for i in 0..=n {
        diff_coarse = diff_coarse.max((at(&sols[0], 1, i) - at(&sols[1], 2, i)).abs());
        diff_fine = diff_fine.max((at(&sols[1], 2, i) - at(&sols[2], 4, i)).abs());
    }
    let order = if diff_coarse == 0.0 && diff_fine == 0.0 {
        None
    } else {
        Some((diff_coarse / diff_fine).log2())
    };
    Ok(RichardsonReport {
        order,
        diff_coarse,
        diff_fine,
    })
}
