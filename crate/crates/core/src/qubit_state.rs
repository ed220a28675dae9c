//! Qubit density matrices, Bloch vectors and the axially symmetric affine
//! maps produced by every dynamics in this crate.
//!
//! Basis ordering: index 1 is the excited state (`σz = +1`), index 2 the
//! ground state, so `rho11` is the excited-state population and
//! `wz = rho11 - rho22`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// 2x2 complex operator in the (excited, ground) basis.
pub type Operator2 = Matrix2<Complex64>;

/// Hermitian, unit-trace qubit state. Positivity is not enforced: maps that
/// break positivity still produce representable (unphysical) states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    /// Excited-state population.
    pub rho11: f64,
    /// Coherence `<e|rho|g>`; `rho21` is its conjugate.
    pub rho12: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector {
    pub wx: f64,
    pub wy: f64,
    pub wz: f64,
}

/// `w -> (xi_perp wx, xi_perp wy, wz_fixed + xi_z (wz - wz_fixed))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineBlochMap {
    pub xi_perp: f64,
    pub xi_z: f64,
    pub wz_fixed: f64,
}

impl QubitState {
    pub fn new(rho11: f64, rho12: Complex64) -> Self {
        QubitState { rho11, rho12 }
    }

    pub fn excited() -> Self {
        QubitState::new(1.0, Complex64::new(0.0, 0.0))
    }

    pub fn ground() -> Self {
        QubitState::new(0.0, Complex64::new(0.0, 0.0))
    }

    pub fn maximally_mixed() -> Self {
        QubitState::new(0.5, Complex64::new(0.0, 0.0))
    }

    /// Ground-state population.
    pub fn rho22(&self) -> f64 {
        1.0 - self.rho11
    }

    pub fn rho21(&self) -> Complex64 {
        self.rho12.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22()
    }

    pub fn to_matrix(&self) -> Operator2 {
        Matrix2::new(
            Complex64::new(self.rho11, 0.0),
            self.rho12,
            self.rho21(),
            Complex64::new(self.rho22(), 0.0),
        )
    }

    pub fn to_bloch(&self) -> BlochVector {
        to_bloch(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self)
    }

    /// `det(rho) >= 0`, equivalently `|w| <= 1`.
    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue() >= -PHYSICALITY_TOL
    }
}

/// Slack allowed on eigenvalues when classifying a state as physical.
pub const PHYSICALITY_TOL: f64 = 1e-12;

impl BlochVector {
    pub const fn new(wx: f64, wy: f64, wz: f64) -> Self {
        BlochVector { wx, wy, wz }
    }

    pub fn norm(&self) -> f64 {
        (self.wx * self.wx + self.wy * self.wy + self.wz * self.wz).sqrt()
    }

    pub fn to_state(&self) -> QubitState {
        from_bloch(self)
    }
}

impl AffineBlochMap {
    pub const IDENTITY: AffineBlochMap = AffineBlochMap {
        xi_perp: 1.0,
        xi_z: 1.0,
        wz_fixed: 0.0,
    };

    pub fn new(xi_perp: f64, xi_z: f64, wz_fixed: f64) -> Self {
        AffineBlochMap {
            xi_perp,
            xi_z,
            wz_fixed,
        }
    }

    /// z-component of the image of the Bloch-ball centre.
    pub fn z_offset(&self) -> f64 {
        self.wz_fixed * (1.0 - self.xi_z)
    }

    pub fn apply_bloch(&self, w: &BlochVector) -> BlochVector {
        BlochVector {
            wx: self.xi_perp * w.wx,
            wy: self.xi_perp * w.wy,
            wz: self.xi_z * w.wz + (1.0 - self.xi_z) * self.wz_fixed,
        }
    }

    pub fn apply(&self, state: &QubitState) -> QubitState {
        apply_map(self, state)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &AffineBlochMap) -> AffineBlochMap {
        let xi_z = self.xi_z * other.xi_z;
        let offset = self.xi_z * other.z_offset() + self.z_offset();
        let wz_fixed = if (1.0 - xi_z).abs() > 0.0 {
            offset / (1.0 - xi_z)
        } else {
            self.wz_fixed
        };
        AffineBlochMap::new(self.xi_perp * other.xi_perp, xi_z, wz_fixed)
    }
}

/// `wx = 2 Re rho12`, `wy = -2 Im rho12`, `wz = rho11 - rho22`.
pub fn to_bloch(state: &QubitState) -> BlochVector {
    BlochVector {
        wx: 2.0 * state.rho12.re,
        wy: -2.0 * state.rho12.im,
        wz: state.rho11 - state.rho22(),
    }
}

/// Inverse of [`to_bloch`]; accepts `|w| > 1`.
pub fn from_bloch(w: &BlochVector) -> QubitState {
    QubitState {
        rho11: 0.5 * (1.0 + w.wz),
        rho12: Complex64::new(0.5 * w.wx, -0.5 * w.wy),
    }
}

/// Smaller eigenvalue `(1 - |w|)/2`; negative iff the state is unphysical.
pub fn min_eigenvalue(state: &QubitState) -> f64 {
    0.5 * (1.0 - to_bloch(state).norm())
}

/// Applies the map directly on matrix elements. The population is updated
/// as `xi_z p + (1 - xi_z) p_fixed`, which is the Bloch action rewritten so
/// that the identity map returns its input bit for bit.
pub fn apply_map(map: &AffineBlochMap, state: &QubitState) -> QubitState {
    let p_fixed = 0.5 * (1.0 + map.wz_fixed);
    QubitState {
        rho11: map.xi_z * state.rho11 + (1.0 - map.xi_z) * p_fixed,
        rho12: state.rho12 * map.xi_perp,
    }
}
