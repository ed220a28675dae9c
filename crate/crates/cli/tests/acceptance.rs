//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::path::Path;
use std::process::Command;

use nmqubit::damping_basis::markovian_map;
use nmqubit::exact_jc::exact_excited_population;
use nmqubit::kernel_solutions::{
    xi_memory_kernel, xi_post_markovian, xi_post_markovian_hyperbolic, xi_post_markovian_series,
    xi_post_markovian_two_exponential,
};
use nmqubit::positivity::{first_violation, scan_plane};
use nmqubit::volterra_oracle::{richardson_check, solve, solve_batch};
use nmqubit::{
    BathParams, BlochVector, CoherenceArgMode, Execution, LorentzianBath, Method, Probe, RatioA,
    VolterraForm, VolterraProblem,
};
use nmqubit_cli::commands::run_kernel_check;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ra(a: f64) -> RatioA {
    RatioA::new(a).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const ORACLE_GRID: [f64; 6] = [0.05, 0.25, 0.5, 1.0, 2.0, 5.0];

fn oracle_gap(form: VolterraForm, ratios: &[f64], closed: impl Fn(f64, f64) -> f64) -> Outcome {
    let problems: Vec<VolterraProblem> = ratios
        .iter()
        .map(|&a| VolterraProblem::from_ratio(form, a, 1e-3, 10.0).unwrap())
        .collect();
    let mut worst: f64 = 0.0;
    for (a, sol) in ratios
        .iter()
        .zip(solve_batch(Execution::Parallel, &problems))
    {
        let sol = sol.map_err(|e| e.to_string())?;
        for &(tau, mu) in &sol.samples {
            let gap = (closed(*a, tau) - mu).abs();
            ensure(gap < 1e-6, || format!("a={a} tau={tau}: gap {gap:e}"))?;
            worst = worst.max(gap);
        }
    }
    Ok(format!("max gap {worst:.2e}"))
}

fn criterion_1() -> Outcome {
    oracle_gap(VolterraForm::PostMarkovian, &ORACLE_GRID, |a, t| {
        xi_post_markovian(ra(a), t).unwrap()
    })
}

fn criterion_2() -> Outcome {
    oracle_gap(VolterraForm::MemoryKernel, &ORACLE_GRID, |a, t| {
        xi_memory_kernel(ra(a), t).unwrap()
    })
}

fn criterion_3() -> Outcome {
    let ratios = [0.05, 0.5, 1.0, 5.0];
    let mut worst: f64 = 0.0;
    for r in ratios {
        let p = VolterraProblem::from_ratio(VolterraForm::ExactAmplitude, r, 1e-3, 10.0).unwrap();
        let sol = solve(&p).map_err(|e| e.to_string())?;
        for &(tau, c) in &sol.samples {
            let gap = (c * c - exact_excited_population(ra(r), tau, 1.0).unwrap()).abs();
            ensure(gap < 1e-6, || format!("R={r} tau={tau}: gap {gap:e}"))?;
            worst = worst.max(gap);
        }
    }
    Ok(format!("max population gap {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20);
    for _ in 0..100_000 {
        let a: f64 = 100.0 - rng.random_range(0.0..100.0);
        let tau: f64 = rng.random_range(0.0..=50.0);
        let x = xi_post_markovian(ra(a), tau).unwrap();
        ensure((0.0..=1.0).contains(&x), || format!("xi({a}, {tau}) = {x}"))?;
    }
    let ratios: Vec<f64> = (0..40).map(|i| 0.01 * 1.2f64.powi(i)).collect();
    let mut scanned = 0;
    for n in [0.0, 1.0] {
        for mode in [CoherenceArgMode::Consistent, CoherenceArgMode::PaperLiteral] {
            for probe in [Probe::Map, Probe::Componentwise, Probe::excited()] {
                let reps = scan_plane(
                    Method::PostMarkovian,
                    &ratios,
                    n,
                    mode,
                    probe,
                    20.0,
                    Execution::Parallel,
                )
                .map_err(|e| e.to_string())?;
                for r in &reps {
                    ensure(r.first_violation_tau.is_none(), || {
                        format!("violation at R={} N={n} {mode:?} {probe:?}", r.ratio)
                    })?;
                }
                scanned += reps.len();
            }
        }
    }
    Ok(format!(
        "1e5 samples in [0, 1]; {scanned} scans without violation"
    ))
}

fn criterion_5() -> Outcome {
    // Just above 4a = 1 the first negative lobe is ~exp(-pi/sqrt(4a - 1)) deep
    // and drowns in rounding; 0.26 is the closest ratio with a resolvable dip.
    let ratios = [
        0.05, 0.1, 0.2, 0.24, 0.249, 0.25, 0.26, 0.3, 0.5, 1.0, 2.0, 5.0,
    ];
    for probe in [Probe::excited(), Probe::Componentwise] {
        let reps = scan_plane(
            Method::MemoryKernel,
            &ratios,
            0.0,
            CoherenceArgMode::Consistent,
            probe,
            200.0,
            Execution::Parallel,
        )
        .map_err(|e| e.to_string())?;
        for r in &reps {
            ensure(r.is_positive_map == (4.0 * r.ratio <= 1.0), || {
                format!("R={} {probe:?}: positive = {}", r.ratio, r.is_positive_map)
            })?;
        }
    }

    let p = BathParams::from_ratio(1.0, 0.0).unwrap();
    let rep = first_violation(
        Method::MemoryKernel,
        &p,
        CoherenceArgMode::Consistent,
        Probe::excited(),
        10.0,
    )
    .map_err(|e| e.to_string())?;
    let zero = rep.first_violation_tau.ok_or("no zero crossing at R = 1")?;
    let target = 4.0 * std::f64::consts::PI / (3.0 * 3f64.sqrt());
    ensure((zero - target).abs() < 1e-5, || {
        format!("R=1 zero at {zero}")
    })?;

    // R = 5 minimum from the Volterra oracle, independent of the closed form
    let sol =
        solve(&VolterraProblem::from_ratio(VolterraForm::MemoryKernel, 5.0, 1e-3, 3.0).unwrap())
            .map_err(|e| e.to_string())?;
    let (tau_min, oracle_min) =
        sol.samples
            .iter()
            .cloned()
            .fold(
                (0.0, f64::INFINITY),
                |acc, (t, v)| if v < acc.1 { (t, v) } else { acc },
            );
    let closed_min = golden_min(|t| xi_memory_kernel(ra(5.0), t).unwrap(), 1.0, 2.0);
    ensure((closed_min - oracle_min).abs() < 1e-5, || {
        format!("R=5 minimum {closed_min} vs oracle {oracle_min}")
    })?;
    // -exp(-pi/sqrt(19)); a quoted target of -0.474 disagrees with both routes
    let derived = -(-std::f64::consts::PI / 19f64.sqrt()).exp();
    ensure((closed_min - derived).abs() <= 2e-3, || {
        format!("R=5 minimum {closed_min} vs {derived}")
    })?;
    Ok(format!(
        "threshold 4a = 1; R=1 zero at {zero:.6}; R=5 minimum {closed_min:.6} at tau {tau_min:.3} \
         (oracle {oracle_min:.6}), not the quoted -0.474"
    ))
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-10 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

fn read_column(path: &Path, name: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(i).unwrap().parse().unwrap())
        .collect()
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_nmqubit"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out)
}

fn criterion_6() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path().to_str().unwrap();
    run_cli(&["figure1", "--out", d])?;
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut notes = Vec::new();
    for tag in ["R5", "R1"] {
        let f = dir.path().join(format!("figure1_{tag}.csv"));
        let mk = min(&read_column(&f, "memory-kernel_pe"));
        let ex = min(&read_column(&f, "exact_pe"));
        let pm = read_column(&f, "post-markovian_pe");
        ensure(mk < 0.0, || format!("{tag}: memory kernel stays >= 0"))?;
        ensure(ex >= -1e-12, || format!("{tag}: exact dips to {ex}"))?;
        ensure(pm.iter().all(|p| (0.0..=1.0).contains(p)), || {
            format!("{tag}: post-Markovian leaves [0, 1]")
        })?;
        notes.push(format!("{tag} mk min {mk:.4}, exact min {ex:.1e}"));
    }
    let f = dir.path().join("figure1_R0p05.csv");
    let cols: Vec<Vec<f64>> = ["post-markovian_pe", "exact_pe", "memory-kernel_pe"]
        .iter()
        .map(|c| read_column(&f, c))
        .collect();
    for c in &cols {
        ensure(c.windows(2).all(|w| w[1] <= w[0]), || {
            "R0p05: not monotone".into()
        })?;
    }
    let mut spread: f64 = 0.0;
    for ((a, b), c) in cols[0].iter().zip(&cols[1]).zip(&cols[2]) {
        let v = [*a, *b, *c];
        spread = spread.max(v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - min(&v));
    }
    ensure(spread < 0.02, || format!("R0p05 spread {spread}"))?;
    notes.push(format!("R0p05 spread {spread:.2e}"));
    Ok(notes.join("; "))
}

fn criterion_7() -> Outcome {
    let a = 0.01;
    let bound = a / (1.0 - a);
    let mut worst: f64 = 0.0;
    for i in 0..=200_000 {
        let tau = i as f64 * 0.01;
        let d = xi_post_markovian(ra(a), tau).unwrap() - (-a * tau).exp();
        ensure((0.0..=bound).contains(&d), || format!("tau={tau}: {d}"))?;
        worst = worst.max(d);
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..10_000 {
        let p =
            BathParams::new(rng.random_range(0.0..3.0), 1.0, rng.random_range(0.0..3.0)).unwrap();
        let (t1, t2): (f64, f64) = (rng.random_range(0.0..5.0), rng.random_range(0.0..5.0));
        let whole = markovian_map(&p, t1 + t2).unwrap();
        let parts = markovian_map(&p, t1)
            .unwrap()
            .compose(&markovian_map(&p, t2).unwrap());
        let w = BlochVector::new(0.3, -0.4, 0.5);
        let (x, y) = (whole.apply_bloch(&w), parts.apply_bloch(&w));
        let gap = (x.wx - y.wx)
            .abs()
            .max((x.wy - y.wy).abs())
            .max((x.wz - y.wz).abs());
        ensure(gap < 1e-12, || format!("semigroup gap {gap:e}"))?;
        let eq = BlochVector::new(0.0, 0.0, p.wz_equilibrium());
        let out = markovian_map(&p, t1).unwrap().apply_bloch(&eq);
        ensure((out.wz - eq.wz).abs() < 1e-12 && out.wx == 0.0, || {
            "stationarity".into()
        })?;
    }
    Ok(format!(
        "max excess {worst:.5} <= {bound:.5}; semigroup and stationarity hold"
    ))
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    for (omega0, g0, lambda) in [(0.0, 1.0, 1.0), (1.0, 0.3, 2.0), (5.0, 2.0, 0.1)] {
        let bath = LorentzianBath::new(omega0, g0, lambda).map_err(|e| e.to_string())?;
        let rep = run_kernel_check(&bath, Execution::Parallel).map_err(|e| e.to_string())?;
        ensure(rep.pass, || {
            format!("bath ({omega0}, {g0}, {lambda}): {:e}", rep.max_rel_error)
        })?;
        worst = worst.max(rep.max_rel_error);
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut a = 0.01;
    while a < 100.0 {
        if (a - 1.0f64).abs() > 1e-3 {
            for i in 0..=200 {
                let tau = i as f64 * 0.1;
                let d = (xi_post_markovian(ra(a), tau).unwrap()
                    - xi_post_markovian_hyperbolic(ra(a), tau).unwrap())
                .abs();
                ensure(d <= 1e-11, || format!("a={a} tau={tau}: {d:e}"))?;
                worst = worst.max(d);
            }
        }
        a *= 1.07;
    }
    let mut series_gap: f64 = 0.0;
    for a in [1.0 - 1e-8, 1.0 + 1e-8] {
        for i in 0..=500 {
            let tau = i as f64 * 0.1;
            let d = (xi_post_markovian_series(ra(a), tau).unwrap()
                - xi_post_markovian_two_exponential(ra(a), tau).unwrap())
            .abs();
            ensure(d < 1e-10, || format!("a={a} tau={tau}: {d:e}"))?;
            series_gap = series_gap.max(d);
        }
    }
    Ok(format!("form gap {worst:.1e}; series gap {series_gap:.1e}"))
}

fn criterion_10() -> Outcome {
    let mut orders = Vec::new();
    for form in [
        VolterraForm::PostMarkovian,
        VolterraForm::MemoryKernel,
        VolterraForm::ExactAmplitude,
    ] {
        for a in [0.05, 1.0, 5.0] {
            let p = VolterraProblem::from_ratio(form, a, 1e-2, 10.0).unwrap();
            let rep = richardson_check(&p).map_err(|e| e.to_string())?;
            let order = rep.order.ok_or("degenerate Richardson differences")?;
            ensure((order - 2.0).abs() <= 0.2, || {
                format!("{form:?} a={a}: order {order}")
            })?;
            orders.push(order);
        }
    }
    let lo = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = orders.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(format!("orders in [{lo:.3}, {hi:.3}]"))
}

fn criterion_11() -> Outcome {
    let runs: [&[&str]; 3] = [
        &[
            "evolve",
            "--method",
            "exact",
            "--method",
            "memory-kernel",
            "--method",
            "post-markovian",
            "--R",
            "1",
            "--oracle",
            "--tau-stop",
            "3",
        ],
        &[
            "scan",
            "--method",
            "memory-kernel",
            "--r-min",
            "0.2",
            "--r-max",
            "1",
            "--r-steps",
            "5",
        ],
        &[
            "compare",
            "--method",
            "exact",
            "--method",
            "post-markovian",
            "--R",
            "0.05",
        ],
    ];
    for args in runs {
        let a = run_cli(args)?.stdout;
        let b = run_cli(args)?.stdout;
        ensure(!a.is_empty() && a == b, || {
            format!("{args:?} differs between runs")
        })?;
    }
    let d1 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d2 = tempfile::tempdir().map_err(|e| e.to_string())?;
    for d in [&d1, &d2] {
        run_cli(&["figure1", "--out", d.path().to_str().unwrap()])?;
    }
    for f in [
        "figure1_R5.csv",
        "figure1_R1.csv",
        "figure1_R0p05.csv",
        "figure1.meta.json",
    ] {
        let a = std::fs::read(d1.path().join(f)).map_err(|e| e.to_string())?;
        let b = std::fs::read(d2.path().join(f)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{f} differs between runs"))?;
    }
    Ok("evolve, scan, compare and figure1 outputs byte-identical".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("oracle equivalence, post-Markovian", criterion_1),
        ("oracle equivalence, memory kernel", criterion_2),
        ("oracle equivalence, exact model", criterion_3),
        ("post-Markovian bounds and positivity", criterion_4),
        ("memory-kernel positivity threshold", criterion_5),
        ("three-panel comparison datasets", criterion_6),
        ("Markovian limit", criterion_7),
        ("microscopic correlation kernel", criterion_8),
        ("algebraic forms and degenerate series", criterion_9),
        ("Volterra solver order", criterion_10),
        ("CLI determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
