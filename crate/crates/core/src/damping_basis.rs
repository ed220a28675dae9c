//! Markovian (Lindblad) generator of a qubit in a thermal bosonic bath, its
//! damping basis, and the Markovian reference propagator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_time, Error, Result};
use crate::qubit_state::{AffineBlochMap, Operator2};

/// Bath parameters: coupling rate `gamma0`, inverse memory time `gamma`
/// (the kernel is `gamma * exp(-gamma t)`), mean thermal occupation `n_thermal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    gamma0: f64,
    gamma: f64,
    n_thermal: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiouvillianSpectrum {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
}

impl BathParams {
    pub fn new(gamma0: f64, gamma: f64, n_thermal: f64) -> Result<Self> {
        if !(gamma0 >= 0.0 && gamma0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma0",
                value: gamma0,
                reason: "must be finite and >= 0",
            });
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be finite and > 0",
            });
        }
        if !(n_thermal >= 0.0 && n_thermal.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "N",
                value: n_thermal,
                reason: "must be finite and >= 0",
            });
        }
        Ok(BathParams {
            gamma0,
            gamma,
            n_thermal,
        })
    }

    /// Parameters with `gamma = 1` chosen so that `|lambda2|/gamma = ratio`.
    /// Times are then already dimensionless (`tau = gamma t = t`).
    pub fn from_ratio(ratio: f64, n_thermal: f64) -> Result<Self> {
        if !(ratio >= 0.0 && ratio.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "R",
                value: ratio,
                reason: "must be finite and >= 0",
            });
        }
        BathParams::new(ratio / (2.0 * n_thermal + 1.0), 1.0, n_thermal)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_thermal(&self) -> f64 {
        self.n_thermal
    }

    /// `R = |lambda2|/gamma = 2 gamma0 (N + 1/2)/gamma`.
    pub fn ratio(&self) -> f64 {
        2.0 * self.gamma0 * (self.n_thermal + 0.5) / self.gamma
    }

    /// Stationary Bloch z-component `-1/(2N+1)`.
    pub fn wz_equilibrium(&self) -> f64 {
        -1.0 / (2.0 * self.n_thermal + 1.0)
    }

    /// Converts a dimensionless time `tau = gamma t` to physical time.
    pub fn time_of(&self, tau: f64) -> f64 {
        tau / self.gamma
    }
}

pub fn spectrum(params: &BathParams) -> LiouvillianSpectrum {
    let lambda3 = -params.gamma0 * (params.n_thermal + 0.5);
    LiouvillianSpectrum {
        lambda1: 0.0,
        lambda2: 2.0 * lambda3,
        lambda3,
        lambda4: lambda3,
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Raising operator `|e><g|`.
pub fn sigma_raise() -> Operator2 {
    Operator2::new(c(0.0), c(1.0), c(0.0), c(0.0))
}

/// Lowering operator `|g><e|`.
pub fn sigma_lower() -> Operator2 {
    Operator2::new(c(0.0), c(0.0), c(1.0), c(0.0))
}

pub fn sigma_z() -> Operator2 {
    Operator2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

/// Damping basis `{sigma_0, sigma_z, sigma_+, sigma_-}` paired with the
/// eigenvalues `{lambda1, lambda2, lambda3, lambda4}`; `sigma_0` is the
/// stationary state `[I - sigma_z/(2N+1)]/2` and `sigma_± = sigma_x ± i sigma_y`.
pub fn damping_basis(params: &BathParams) -> [(f64, Operator2); 4] {
    let spec = spectrum(params);
    let sigma0 =
        (Operator2::identity() - sigma_z() * c(1.0 / (2.0 * params.n_thermal + 1.0))) * c(0.5);
    [
        (spec.lambda1, sigma0),
        (spec.lambda2, sigma_z()),
        (spec.lambda3, sigma_raise() * c(2.0)),
        (spec.lambda4, sigma_lower() * c(2.0)),
    ]
}

fn dissipator(jump: &Operator2, rho: &Operator2) -> Operator2 {
    let jd = jump.adjoint();
    let jdj = jd * jump;
    jump * rho * jd - (jdj * rho + rho * jdj) * c(0.5)
}

/// Lindblad generator acting on an arbitrary operator: emission at rate
/// `gamma0 (N+1)` and absorption at rate `gamma0 N`. The output is traceless.
pub fn apply_liouvillian(params: &BathParams, rho: &Operator2) -> Operator2 {
    let down = dissipator(&sigma_lower(), rho) * c(params.gamma0 * (params.n_thermal + 1.0));
    let up = dissipator(&sigma_raise(), rho) * c(params.gamma0 * params.n_thermal);
    down + up
}

/// Markovian propagator `exp(L t)` as a Bloch map.
pub fn markovian_map(params: &BathParams, t: f64) -> Result<AffineBlochMap> {
    check_time(t)?;
    let spec = spectrum(params);
    Ok(AffineBlochMap::new(
        (spec.lambda3 * t).exp(),
        (spec.lambda2 * t).exp(),
        params.wz_equilibrium(),
    ))
}
