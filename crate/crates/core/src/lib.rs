//! Non-Markovian dynamics of a single qubit coupled to a bosonic bath.
//!
//! Three dynamical descriptions are provided as affine maps on the Bloch
//! vector: the post-Markovian master equation and the memory-kernel master
//! equation (both with an exponential kernel), and the exact solution for a
//! resonant Lorentzian (cavity) bath at zero temperature. Every closed form
//! can be checked against [`volterra_oracle`], a brute-force solver of the
//! underlying integro-differential equations, and [`positivity`] analyses
//! whether the resulting maps stay physical.

pub mod damping_basis;
pub mod error;
pub mod exact_jc;
pub mod exec;
pub mod kernel_solutions;
pub mod positivity;
pub mod quadrature;
pub mod qubit_state;
pub mod special;
pub mod volterra_oracle;

pub use damping_basis::{BathParams, LiouvillianSpectrum};
pub use error::{Error, Result};
pub use exact_jc::LorentzianBath;
pub use exec::Execution;
pub use kernel_solutions::{Branch, BranchInfo, CoherenceArgMode, RatioA};
pub use positivity::{Method, PositivityReport, Probe};
pub use qubit_state::{AffineBlochMap, BlochVector, QubitState};
pub use volterra_oracle::{OracleSolution, VolterraForm, VolterraProblem};
