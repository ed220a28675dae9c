//! Positivity and complete positivity of the qubit dynamical maps.
//!
//! All maps in this crate are axially symmetric affine maps of the Bloch
//! ball. Positivity is decided exactly by checking that the image
//! ellipsoid (semi-axes `|xi_perp|, |xi_perp|, |xi_z|`, centre
//! `(0, 0, wz_fixed (1 - xi_z))`) stays inside the unit ball. The weaker
//! componentwise test `|w_i| <= 1` and single-state probes are available
//! for comparison, and complete positivity is read off the Choi matrix.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::damping_basis::{markovian_map, BathParams};
use crate::error::{Error, Result};
use crate::exact_jc::exact_amplitude;
use crate::exec::Execution;
use crate::kernel_solutions::{memory_kernel_map, post_markovian_map, CoherenceArgMode, RatioA};
use crate::qubit_state::{AffineBlochMap, BlochVector, Operator2, QubitState};

/// A margin below `-MARGIN_TOL` counts as a violation.
pub const MARGIN_TOL: f64 = 1e-12;

/// Choi eigenvalues above `-CP_TOL` count as nonnegative.
pub const CP_TOL: f64 = 1e-10;

/// Dense scan step in dimensionless time.
pub const SCAN_STEP: f64 = 1e-3;

/// Final bracket width of the violation-onset bisection.
pub const BISECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Markovian,
    PostMarkovian,
    MemoryKernel,
    Exact,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Markovian,
        Method::PostMarkovian,
        Method::MemoryKernel,
        Method::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Markovian => "markovian",
            Method::PostMarkovian => "post-markovian",
            Method::MemoryKernel => "memory-kernel",
            Method::Exact => "exact",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// Dynamical map of `method` at physical time `t`.
///
/// The exact model is defined only for a vacuum bath (`N = 0`). Its
/// coherence factor is the excited-state amplitude `c(tau)` itself, an
/// extension: only the population `c(tau)^2` is a published result.
pub fn method_map(
    method: Method,
    params: &BathParams,
    mode: CoherenceArgMode,
    t: f64,
) -> Result<AffineBlochMap> {
    match method {
        Method::Markovian => markovian_map(params, t),
        Method::PostMarkovian => post_markovian_map(params, mode, t),
        Method::MemoryKernel => memory_kernel_map(params, mode, t),
        Method::Exact => {
            if params.n_thermal() != 0.0 {
                return Err(Error::Unsupported(format!(
                    "exact dynamics requires a vacuum bath (N = 0), got N = {}",
                    params.n_thermal()
                )));
            }
            let c = exact_amplitude(RatioA::new(params.ratio())?, params.gamma() * t)?;
            Ok(AffineBlochMap::new(c, c * c, -1.0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapPositivity {
    pub is_positive: bool,
    /// `1 - max |w_out|` over pure inputs (or the criterion's analogue).
    pub margin: f64,
}

impl MapPositivity {
    fn from_margin(margin: f64) -> Self {
        MapPositivity {
            is_positive: margin >= -MARGIN_TOL,
            margin,
        }
    }
}

/// Largest `|w_out|^2` over the Bloch sphere.
///
/// For an input with `wz = u` the squared image norm is
/// `p^2 (1 - u^2) + (c + z u)^2`, a quadratic in `u` on `[-1, 1]`; its
/// maximum sits at an endpoint or, when concave, at `u* = c z / (p^2 - z^2)`.
fn max_image_norm_sq(map: &AffineBlochMap) -> f64 {
    let p2 = map.xi_perp * map.xi_perp;
    let z = map.xi_z;
    let c = map.z_offset();
    let ends = (c + z).powi(2).max((c - z).powi(2));
    let curvature = p2 - z * z;
    if curvature > 0.0 {
        let u = c * z / curvature;
        if u.abs() <= 1.0 {
            let interior = p2 + c * c + c * c * z * z / curvature;
            return ends.max(interior);
        }
    }
    ends
}

/// Exact positivity: the image of the Bloch ball lies inside the ball.
pub fn map_positivity(map: &AffineBlochMap) -> MapPositivity {
    MapPositivity::from_margin(1.0 - max_image_norm_sq(map).sqrt())
}

/// Componentwise criterion `|w_i(tau)| <= 1` for every pure input. Necessary
/// but not sufficient for positivity.
pub fn componentwise_positivity(map: &AffineBlochMap) -> MapPositivity {
    let worst = map.xi_perp.abs().max(map.z_offset().abs() + map.xi_z.abs());
    MapPositivity::from_margin(1.0 - worst)
}

/// `1 - |w_out|` for a single input state.
pub fn state_margin(map: &AffineBlochMap, input: &BlochVector) -> f64 {
    1.0 - map.apply_bloch(input).norm()
}

/// Linear extension of the map to arbitrary 2x2 operators.
pub fn apply_to_operator(map: &AffineBlochMap, x: &Operator2) -> Operator2 {
    // X = (x0 I + x . sigma)/2 with x0 = tr X, x_k = tr(X sigma_k)
    let x0 = x[(0, 0)] + x[(1, 1)];
    let xx = x[(0, 1)] + x[(1, 0)];
    let xy = Complex64::i() * (x[(0, 1)] - x[(1, 0)]);
    let xz = x[(0, 0)] - x[(1, 1)];
    let yx = xx * map.xi_perp;
    let yy = xy * map.xi_perp;
    let yz = xz * map.xi_z + x0 * map.z_offset();
    let half = Complex64::new(0.5, 0.0);
    Operator2::new(
        (x0 + yz) * half,
        (yx - Complex64::i() * yy) * half,
        (yx + Complex64::i() * yy) * half,
        (x0 - yz) * half,
    )
}

/// Trace-one Choi matrix `(1/2) sum_ij |i><j| ⊗ Phi(|i><j|)`.
pub fn choi_matrix(map: &AffineBlochMap) -> Matrix4<Complex64> {
    let mut choi = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let mut e = Operator2::zeros();
            e[(i, j)] = Complex64::new(1.0, 0.0);
            let out = apply_to_operator(map, &e);
            for a in 0..2 {
                for b in 0..2 {
                    choi[(2 * i + a, 2 * j + b)] = out[(a, b)] * 0.5;
                }
            }
        }
    }
    choi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpCheck {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
}

/// Complete positivity from the smallest Choi eigenvalue.
pub fn choi_cp_check(map: &AffineBlochMap) -> CpCheck {
    let min_eigenvalue = choi_matrix(map)
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    CpCheck {
        is_cp: min_eigenvalue >= -CP_TOL,
        min_eigenvalue,
    }
}

/// What a violation is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Probe {
    /// Worst-case input, exact ellipsoid-in-ball criterion.
    Map,
    /// Componentwise `|w_i| <= 1` criterion.
    Componentwise,
    /// A single initial state.
    State(BlochVector),
}

impl Probe {
    pub fn excited() -> Probe {
        Probe::State(BlochVector::new(0.0, 0.0, 1.0))
    }

    fn margin(&self, map: &AffineBlochMap) -> f64 {
        match self {
            Probe::Map => map_positivity(map).margin,
            Probe::Componentwise => componentwise_positivity(map).margin,
            Probe::State(w) => state_margin(map, w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub method: Method,
    pub params: BathParams,
    pub ratio: f64,
    pub mode: CoherenceArgMode,
    pub probe: Probe,
    pub tau_max: f64,
    /// No violation of the selected probe over `[0, tau_max]`.
    pub is_positive_map: bool,
    pub first_violation_tau: Option<f64>,
    /// Smallest margin of the selected probe over the scan.
    pub min_margin: f64,
    /// Smallest output eigenvalue: of the probed state for `State`, of the
    /// worst-case pure input otherwise.
    pub min_state_eigenvalue: f64,
    pub min_choi_eigenvalue: f64,
    /// Exact criterion over the whole scan, regardless of probe.
    pub exact_positive: bool,
    /// Componentwise criterion over the whole scan, regardless of probe.
    pub componentwise_positive: bool,
}

fn violates(probe: &Probe, map: &AffineBlochMap) -> bool {
    probe.margin(map) < -MARGIN_TOL
}

/// Scans `tau in [0, tau_max]` at [`SCAN_STEP`] and locates the first
/// violation of `probe` by bisection to [`BISECTION_TOL`].
pub fn first_violation(
    method: Method,
    params: &BathParams,
    mode: CoherenceArgMode,
    probe: Probe,
    tau_max: f64,
) -> Result<PositivityReport> {
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tau_max",
            value: tau_max,
            reason: "must be finite and > 0",
        });
    }
    let map_at = |tau: f64| method_map(method, params, mode, params.time_of(tau));
    let n = (tau_max / SCAN_STEP).ceil() as usize;
    let tau_of = |i: usize| (i as f64 * SCAN_STEP).min(tau_max);

    let mut min_margin = f64::INFINITY;
    let mut min_state = f64::INFINITY;
    let mut min_choi = f64::INFINITY;
    let mut exact_positive = true;
    let mut componentwise_positive = true;
    let mut first_bad: Option<usize> = None;

    for i in 0..=n {
        let map = map_at(tau_of(i))?;
        let margin = probe.margin(&map);
        min_margin = min_margin.min(margin);
        let exact = map_positivity(&map);
        exact_positive &= exact.is_positive;
        componentwise_positive &= componentwise_positivity(&map).is_positive;
        let state_eig = match probe {
            Probe::State(_) => 0.5 * margin,
            _ => 0.5 * exact.margin,
        };
        min_state = min_state.min(state_eig);
        min_choi = min_choi.min(choi_cp_check(&map).min_eigenvalue);
        if first_bad.is_none() && margin < -MARGIN_TOL {
            first_bad = Some(i);
        }
    }

    let first_violation_tau = match first_bad {
        None => None,
        Some(0) => Some(0.0),
        Some(i) => {
            let (mut lo, mut hi) = (tau_of(i - 1), tau_of(i));
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if violates(&probe, &map_at(mid)?) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(hi)
        }
    };

    Ok(PositivityReport {
        method,
        params: *params,
        ratio: params.ratio(),
        mode,
        probe,
        tau_max,
        is_positive_map: first_violation_tau.is_none(),
        first_violation_tau,
        min_margin,
        min_state_eigenvalue: min_state,
        min_choi_eigenvalue: min_choi,
        exact_positive,
        componentwise_positive,
    })
}

/// One [`first_violation`] report per ratio `R` (with `gamma = 1`), in
/// grid order.
pub fn scan_plane(
    method: Method,
    ratios: &[f64],
    n_thermal: f64,
    mode: CoherenceArgMode,
    probe: Probe,
    tau_max: f64,
    exec: Execution,
) -> Result<Vec<PositivityReport>> {
    if ratios.is_empty() {
        return Err(Error::InvalidParameter {
            name: "ratios",
            value: 0.0,
            reason: "grid must not be empty",
        });
    }
    exec.try_map(ratios, |&r| {
        let params = BathParams::from_ratio(r, n_thermal)?;
        first_violation(method, &params, mode, probe, tau_max)
    })
}

/// Output state of `method` for `input` at dimensionless time `tau`.
pub fn evolve_state(
    method: Method,
    params: &BathParams,
    mode: CoherenceArgMode,
    input: &QubitState,
    tau: f64,
) -> Result<QubitState> {
    Ok(method_map(method, params, mode, params.time_of(tau))?.apply(input))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_solutions::xi_memory_kernel;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    // Closed-form Choi spectrum of this family: two diagonal entries plus
    // the 2x2 block coupling |ee> and |gg>.
    fn choi_eigen_oracle(m: &AffineBlochMap) -> [f64; 4] {
        let (p, z, t) = (m.xi_perp, m.xi_z, m.z_offset());
        let root = (t * t + 4.0 * p * p).sqrt();
        [
            0.25 * (1.0 - t - z),
            0.25 * (1.0 + t - z),
            0.25 * (1.0 + z + root),
            0.25 * (1.0 + z - root),
        ]
    }

    fn sampled_max_norm(map: &AffineBlochMap, n: usize, seed: u64) -> f64 {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut best: f64 = 0.0;
        for _ in 0..n {
            let u: f64 = rng.random_range(-1.0..=1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let s = (1.0 - u * u).sqrt();
            let w = BlochVector::new(s * phi.cos(), s * phi.sin(), u);
            best = best.max(map.apply_bloch(&w).norm());
        }
        for u in [-1.0, 1.0] {
            best = best.max(map.apply_bloch(&BlochVector::new(0.0, 0.0, u)).norm());
        }
        best
    }

    #[test]
    fn map_positivity_examples() {
        let id = map_positivity(&AffineBlochMap::IDENTITY);
        assert!(id.is_positive);
        assert_eq!(id.margin, 0.0);
        let half = map_positivity(&AffineBlochMap::new(0.5, 0.5, -1.0));
        assert!(half.is_positive);
        assert!(half.margin.abs() < 1e-15);
    }

    #[test]
    fn map_positivity_matches_sampling() {
        let map = AffineBlochMap::new(0.1, -0.2, -1.0);
        let analytic = 1.0 - map_positivity(&map).margin;
        let sampled = sampled_max_norm(&map, 1_000_000, 7);
        assert!(sampled <= analytic + 1e-12);
        assert!(analytic - sampled < 1e-6, "{analytic} vs {sampled}");
        assert!((analytic - 1.4).abs() < 1e-12);
        assert!(!map_positivity(&map).is_positive);

        // interior maximum: coherence factor exceeds sqrt(xi_z)
        let map = AffineBlochMap::new(0.9, 0.5, -1.0);
        let analytic = 1.0 - map_positivity(&map).margin;
        let sampled = sampled_max_norm(&map, 1_000_000, 11);
        assert!(analytic > 1.0);
        assert!((analytic - sampled).abs() < 1e-6);
    }

    #[test]
    fn componentwise_is_weaker_than_exact() {
        let map = AffineBlochMap::new(0.9, 0.5, -1.0);
        assert!(componentwise_positivity(&map).is_positive);
        assert!(!map_positivity(&map).is_positive);
    }

    #[test]
    fn choi_examples() {
        let id = choi_cp_check(&AffineBlochMap::IDENTITY);
        assert!(id.is_cp);
        assert!(id.min_eigenvalue.abs() < 1e-15);
        let eig = choi_matrix(&AffineBlochMap::IDENTITY).symmetric_eigenvalues();
        let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((max - 1.0).abs() < 1e-15);

        let ground = choi_cp_check(&AffineBlochMap::new(0.0, 0.0, -1.0));
        assert!(ground.is_cp);

        let p = BathParams::from_ratio(5.0, 0.0).unwrap();
        let m = memory_kernel_map(&p, CoherenceArgMode::Consistent, 1.545).unwrap();
        let cp = choi_cp_check(&m);
        assert!(!cp.is_cp);
        let oracle = choi_eigen_oracle(&m)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert!((cp.min_eigenvalue - oracle).abs() < 1e-14);
    }

    #[test]
    fn choi_trace_and_hermiticity() {
        let m = AffineBlochMap::new(0.3, 0.6, -0.4);
        let c = choi_matrix(&m);
        assert!((c.trace().re - 1.0).abs() < 1e-15);
        assert!((c - c.adjoint()).norm() < 1e-15);
    }

    #[test]
    fn operator_extension_matches_state_action() {
        let m = AffineBlochMap::new(0.3, -0.6, -0.4);
        let s = QubitState::new(0.8, Complex64::new(0.1, 0.25));
        let via_op = apply_to_operator(&m, &s.to_matrix());
        assert!((via_op - m.apply(&s).to_matrix()).norm() < 1e-15);
    }

    #[test]
    fn exact_method_requires_vacuum() {
        let p = BathParams::from_ratio(1.0, 0.5).unwrap();
        let err = method_map(Method::Exact, &p, CoherenceArgMode::Consistent, 1.0);
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("lindblad".parse::<Method>().is_err());
    }

    #[test]
    fn memory_kernel_population_zero_crossing() {
        let p = BathParams::from_ratio(1.0, 0.0).unwrap();
        let r = first_violation(
            Method::MemoryKernel,
            &p,
            CoherenceArgMode::Consistent,
            Probe::excited(),
            10.0,
        )
        .unwrap();
        let tau = r.first_violation_tau.unwrap();
        assert!((tau - 2.418399152).abs() < 1e-5, "{tau}");
        assert!(!r.is_positive_map);
        assert!(r.min_state_eigenvalue < 0.0);
    }

    #[test]
    fn bisection_brackets_the_onset() {
        let p = BathParams::from_ratio(1.0, 0.0).unwrap();
        for probe in [Probe::excited(), Probe::Map, Probe::Componentwise] {
            let r = first_violation(
                Method::MemoryKernel,
                &p,
                CoherenceArgMode::Consistent,
                probe,
                10.0,
            )
            .unwrap();
            let tau = r.first_violation_tau.unwrap();
            let at = |t: f64| {
                probe.margin(&memory_kernel_map(&p, CoherenceArgMode::Consistent, t).unwrap())
            };
            assert!(at(tau - 1e-5) >= -MARGIN_TOL, "{probe:?}");
            assert!(at(tau + 1e-5) < -MARGIN_TOL, "{probe:?}");
        }
    }

    #[test]
    fn post_markovian_never_violates() {
        for r in [0.01, 0.3, 1.0, 4.0, 25.0, 100.0] {
            for n in [0.0, 1.0] {
                let p = BathParams::from_ratio(r, n).unwrap();
                for mode in [CoherenceArgMode::Consistent, CoherenceArgMode::PaperLiteral] {
                    let rep =
                        first_violation(Method::PostMarkovian, &p, mode, Probe::Map, 20.0).unwrap();
                    assert!(rep.is_positive_map, "R={r} N={n}");
                    assert!(rep.min_margin >= -1e-12);
                    assert!(rep.componentwise_positive);
                }
            }
        }
    }

    #[test]
    fn memory_kernel_threshold_population_channel() {
        for r in [0.05, 0.2, 0.24, 0.26, 0.3, 1.0] {
            let p = BathParams::from_ratio(r, 0.0).unwrap();
            for probe in [Probe::excited(), Probe::Componentwise] {
                let rep = first_violation(
                    Method::MemoryKernel,
                    &p,
                    CoherenceArgMode::Consistent,
                    probe,
                    50.0,
                )
                .unwrap();
                assert_eq!(rep.is_positive_map, 4.0 * r <= 1.0, "R={r} {probe:?}");
            }
        }
    }

    #[test]
    fn exact_criterion_sees_consistent_mode_coherence_bulge() {
        // Below the population threshold the consistent-mode coherence factor
        // still exceeds sqrt(xi_z), which pushes some pure states out of the ball.
        let p = BathParams::from_ratio(0.2, 0.0).unwrap();
        let rep = first_violation(
            Method::MemoryKernel,
            &p,
            CoherenceArgMode::Consistent,
            Probe::Map,
            50.0,
        )
        .unwrap();
        assert!(!rep.is_positive_map);
        assert!(rep.componentwise_positive);
        assert!(rep.min_margin > -0.01);
        let rep = first_violation(
            Method::MemoryKernel,
            &p,
            CoherenceArgMode::PaperLiteral,
            Probe::Map,
            50.0,
        )
        .unwrap();
        assert!(rep.is_positive_map);
    }

    #[test]
    fn scan_plane_examples() {
        let reps = scan_plane(
            Method::PostMarkovian,
            &[0.1, 1.0, 10.0],
            0.0,
            CoherenceArgMode::Consistent,
            Probe::Map,
            20.0,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(reps.len(), 3);
        assert!(reps.iter().all(|r| r.is_positive_map));
        assert_eq!(reps[1].ratio, 1.0);

        let reps = scan_plane(
            Method::MemoryKernel,
            &[0.2, 0.3],
            0.0,
            CoherenceArgMode::Consistent,
            Probe::Componentwise,
            50.0,
            Execution::Sequential,
        )
        .unwrap();
        assert!(reps[0].is_positive_map);
        assert!(!reps[1].is_positive_map);

        let reps = scan_plane(
            Method::MemoryKernel,
            &[0.0],
            0.0,
            CoherenceArgMode::Consistent,
            Probe::Map,
            5.0,
            Execution::Parallel,
        )
        .unwrap();
        assert!(reps[0].is_positive_map);
        assert!(reps[0].min_margin.abs() < 1e-15);

        assert!(scan_plane(
            Method::MemoryKernel,
            &[],
            0.0,
            CoherenceArgMode::Consistent,
            Probe::Map,
            5.0,
            Execution::Parallel
        )
        .is_err());
    }

    #[test]
    fn scan_is_identical_sequential_and_parallel() {
        let grid = [0.1, 0.22, 0.27, 0.6, 2.0];
        let run = |exec| {
            scan_plane(
                Method::MemoryKernel,
                &grid,
                0.5,
                CoherenceArgMode::PaperLiteral,
                Probe::Map,
                8.0,
                exec,
            )
            .unwrap()
        };
        assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }

    #[test]
    fn memory_kernel_minimum_population_is_negative() {
        let p = BathParams::from_ratio(5.0, 0.0).unwrap();
        let m = memory_kernel_map(&p, CoherenceArgMode::Consistent, 1.441461569).unwrap();
        let pe = m.apply(&QubitState::excited()).rho11;
        let a = RatioA::new(5.0).unwrap();
        assert!((pe - xi_memory_kernel(a, 1.441461569).unwrap()).abs() < 1e-15);
        assert!(pe < -0.48);
    }

    fn map_strategy() -> impl Strategy<Value = AffineBlochMap> {
        (-1.5..1.5f64, -1.5..1.5f64, -1.0..1.0f64)
            .prop_map(|(p, z, f)| AffineBlochMap::new(p, z, f))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn cp_implies_positive(map in map_strategy()) {
            if choi_cp_check(&map).is_cp {
                prop_assert!(map_positivity(&map).margin >= -1e-9);
            }
        }

        #[test]
        fn choi_matches_block_oracle(map in map_strategy()) {
            let mut oracle = choi_eigen_oracle(&map);
            oracle.sort_by(f64::total_cmp);
            let mut eig: Vec<f64> = choi_matrix(&map).symmetric_eigenvalues().iter().cloned().collect();
            eig.sort_by(f64::total_cmp);
            for (a, b) in eig.iter().zip(oracle.iter()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn exact_criterion_implies_componentwise(map in map_strategy()) {
            if map_positivity(&map).is_positive {
                prop_assert!(componentwise_positivity(&map).is_positive);
            }
        }
    }

    #[test]
    fn post_markovian_margin_nonnegative_random() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..20_000 {
            let r: f64 = rng.random_range(1e-6..100.0);
            let n: f64 = rng.random_range(0.0..3.0);
            let tau: f64 = rng.random_range(0.0..50.0);
            let p = BathParams::from_ratio(r, n).unwrap();
            for mode in [CoherenceArgMode::Consistent, CoherenceArgMode::PaperLiteral] {
                let m = post_markovian_map(&p, mode, tau).unwrap();
                assert!(map_positivity(&m).margin >= -1e-12, "R={r} N={n} tau={tau}");
            }
        }
    }
}
