//! Acceptance suite: one test per criterion, each printing a single
//! `criterion K: PASS|FAIL` line before asserting.
//!
//! Run with `cargo test -p kicked-top --test acceptance -- --nocapture`.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::process::Command;

use kicked_top::classical::ClassicalState;
use kicked_top::cli::output::{RunManifest, Table};
use kicked_top::floquet::{evolve_record, Ensemble};
use kicked_top::observables::{bipartite_fluctuations, fit_growth_exponent, long_time_average, participation_ratio};
use kicked_top::scan::lyapunov_sweep;
use kicked_top::spin::coherent_state;
use kicked_top::{
    CoherentParams, Execution, FloquetOperator, GridSpec, PowerNormalization, Scanner, SpinSystem, StateVector,
    TimeAverage, DEFAULT_KICKS, DEFAULT_KICK_STRENGTH,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REGULAR: (f64, f64) = (2.254, -0.945);
const BORDER: (f64, f64) = (2.254, -0.535);
const CHAOTIC: (f64, f64) = (2.254, 0.44);

fn report(criterion: &str, pass: bool, detail: String) {
    println!("criterion {criterion}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn fluctuation_series(n: usize, kappa: f64, start: (f64, f64), kicks: usize) -> kicked_top::TimeSeries {
    let sys = SpinSystem::new(n).unwrap();
    let op = FloquetOperator::new(&sys, kappa, DEFAULT_KICK_STRENGTH).unwrap();
    let p = CoherentParams::new(start.0, start.1).unwrap();
    evolve_record(&op, &sys, p, kicks).unwrap().fluctuation_series()
}

fn fbar(n: usize, kappa: f64, start: (f64, f64)) -> f64 {
    let ts = fluctuation_series(n, kappa, start, DEFAULT_KICKS);
    long_time_average(&ts, DEFAULT_KICKS, TimeAverage::ExcludeInitial).unwrap()
}

#[test]
fn criterion_01_fluctuation_power_saturation() {
    let scanner = Scanner::new(160).unwrap();
    let grid = GridSpec::new(15, 15).unwrap();
    let p = scanner.fluctuation_power(6.0, &grid, 400, PowerNormalization::CoordinateArea).unwrap();
    report("1", (p - 0.18).abs() <= 0.02, format!("power(κ=6, N=160, 15x15, 400 kicks) = {p:.5} (target 0.18 ± 0.02)"));
}

#[test]
fn criterion_02_regular_chaotic_contrast() {
    let regular = fbar(120, 3.0, REGULAR);
    let chaotic: Vec<f64> = [60, 120, 160].iter().map(|&n| fbar(n, 3.0, CHAOTIC)).collect();
    let contrast = regular < 0.5 * chaotic[1];
    let mean = chaotic.iter().sum::<f64>() / 3.0;
    let spread = chaotic.iter().map(|f| (f - mean).abs() / mean).fold(0.0, f64::max);
    report(
        "2",
        contrast && spread < 0.05,
        format!(
            "F̄ regular = {regular:.4}, chaotic N=60/120/160 = {:.4}/{:.4}/{:.4}, max deviation from mean {:.2}%",
            chaotic[0],
            chaotic[1],
            chaotic[2],
            100.0 * spread
        ),
    );
}

/// Largest `hi` such that the fit over `[10, hi]` has exponent in `(0, 0.5)`
/// with `R² ≥ 0.5`.
fn polynomial_window(n: usize) -> usize {
    let ts = fluctuation_series(n, 3.0, BORDER, DEFAULT_KICKS);
    (11..=DEFAULT_KICKS)
        .filter(|&hi| {
            let fit = fit_growth_exponent(&ts, 10, hi).unwrap();
            fit.exponent > 0.0 && fit.exponent < 0.5 && fit.r_squared >= 0.5
        })
        .max()
        .unwrap_or(0)
}

#[test]
fn criterion_03_polynomial_regime() {
    let ts = fluctuation_series(160, 3.0, BORDER, DEFAULT_KICKS);
    let fit = fit_growth_exponent(&ts, 10, 100).unwrap();
    let (w120, w240) = (polynomial_window(120), polynomial_window(240));
    report(
        "3",
        (fit.exponent - 0.2).abs() <= 0.1 && w240 > w120,
        format!(
            "border exponent over [10,100] = {:.3} (R² {:.3}); polynomial window N=120 → {w120}, N=240 → {w240}",
            fit.exponent, fit.r_squared
        ),
    );
}

#[test]
fn criterion_04_short_time_linear_growth() {
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, start) in [("chaotic", CHAOTIC), ("border", BORDER)] {
        for n in [120, 160] {
            let ts = fluctuation_series(n, 3.0, start, 4);
            let slope = fit_growth_exponent(&ts, 1, 4).unwrap().exponent;
            pass &= (slope - 1.0).abs() <= 0.3;
            parts.push(format!("{label} N={n}: {slope:.3}"));
        }
    }
    report("4", pass, format!("log-log slope over [1,4] (target 1.0 ± 0.3): {}", parts.join(", ")));
}

#[test]
fn criterion_05_lyapunov_trend() {
    let grid = GridSpec::new(15, 15).unwrap();
    let kappas = [1.0, 1.5, 2.5, 3.0, 5.0, 6.0];
    let sweep = lyapunov_sweep(&kappas, &grid, 10_000, 100, Execution::Parallel).unwrap();
    let l: Vec<f64> = sweep.iter().map(|p| p.1).collect();
    let pass = l[0] < 0.02 && l[1] < 0.02 && l[3] > l[2] && l[2] > 0.0 && l[5] > l[4];
    let detail = kappas.iter().zip(&l).map(|(k, v)| format!("λ({k})={v:.4}")).collect::<Vec<_>>().join(" ");
    report("5", pass, detail);
}

#[test]
fn criterion_06_power_curve_shape() {
    let scanner = Scanner::new(160).unwrap().with_execution(Execution::Parallel);
    let grid = GridSpec::new(15, 15).unwrap();
    let kappas: Vec<f64> = (0..=70).map(|i| i as f64 * 0.1).collect();
    let sweep = scanner.kappa_sweep(&kappas, &grid, 400, PowerNormalization::CoordinateArea).unwrap();
    let at = |k: f64| sweep.iter().find(|p| (p.0 - k).abs() < 1e-9).unwrap().1;
    let slow = (at(2.2) - at(1.8)) / 0.4;
    let fast = (at(3.5) - at(2.4)) / 1.1;
    let plateau: Vec<f64> = sweep.iter().filter(|p| p.0 >= 5.5 - 1e-9).map(|p| p.1).collect();
    let (lo, hi) = plateau.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    let mean = plateau.iter().sum::<f64>() / plateau.len() as f64;
    let change = (hi - lo) / mean;
    report(
        "6",
        slow < fast && change < 0.05,
        format!(
            "mean slope [1.8,2.2] = {slow:.4}, [2.4,3.5] = {fast:.4}; plateau [5.5,7] change {:.2}% (mean {mean:.4})",
            100.0 * change
        ),
    );
}

#[test]
fn criterion_07_oracle_equivalence() {
    let (n, kappa, v) = (2, 3.0, DEFAULT_KICK_STRENGTH);
    let sys = SpinSystem::new(n).unwrap();
    let op = FloquetOperator::new(&sys, kappa, v).unwrap();
    let oracle = common::floquet(n, kappa, v);
    let mut worst: f64 = 0.0;
    for (theta, phi) in [CHAOTIC, REGULAR, (0.3, 1.0), (FRAC_PI_2, 0.0)] {
        let start = CoherentParams::new(theta, phi).unwrap();
        let psi0 = coherent_state(&sys, start);
        let mut reference = DVector::from_vec(common::coherent(n, theta, phi));
        worst = worst.max((psi0.amplitudes() - &reference).camax());
        let mut ensemble = Ensemble::new(&[psi0]).unwrap();
        for _ in 0..10 {
            ensemble.kick(&op).unwrap();
            reference = &oracle * reference;
            worst = worst.max((ensemble.state(0).amplitudes() - &reference).camax());
        }
    }
    let matrix = (op.matrix() - &oracle).camax();
    report(
        "7",
        worst < 1e-9 && matrix < 1e-9,
        format!("N=2, κ=3, 10 kicks: max amplitude error {worst:.2e}, max Floquet matrix error {matrix:.2e}"),
    );
}

#[test]
fn criterion_08_analytic_coherent_statistics() {
    let mut worst: f64 = 0.0;
    for n in [10, 100, 1000] {
        let sys = SpinSystem::new(n).unwrap();
        for i in 0..20 {
            let theta = (i as f64 + 0.5) * PI / 20.0;
            for k in 0..20 {
                let phi = -PI + (k as f64 + 0.5) * 2.0 * PI / 20.0;
                let s = coherent_state(&sys, CoherentParams::new(theta, phi).unwrap());
                let p = (theta / 2.0).cos().powi(2);
                let exact = (p * (1.0 - p) / n as f64).sqrt();
                worst = worst.max((bipartite_fluctuations(&s).unwrap() - exact).abs());
            }
        }
    }
    let mut fock_ok = true;
    let mut uniform_err: f64 = 0.0;
    for n in [1, 10, 100, 1000] {
        let sys = SpinSystem::new(n).unwrap();
        for l in [0, n / 2, n] {
            fock_ok &= participation_ratio(&StateVector::fock(&sys, l).unwrap()) == 1.0;
        }
        let d = sys.dim() as f64;
        uniform_err = uniform_err.max((participation_ratio(&StateVector::uniform(&sys)) - d).abs() / d);
    }
    report(
        "8",
        worst < 1e-10 && fock_ok && uniform_err <= 4.0 * f64::EPSILON,
        format!(
            "max |F(0) - sqrt(p(1-p)/N)| = {worst:.2e}; η(Fock) = 1: {fock_ok}; η(uniform)/D - 1 = {uniform_err:.1e}"
        ),
    );
}

#[test]
fn criterion_09_structural_invariants() {
    let mut unitarity: f64 = 0.0;
    for n in [1, 2, 7, 40, 120, 160, 200] {
        let sys = SpinSystem::new(n).unwrap();
        for kappa in [0.0, 3.0, 6.0] {
            unitarity =
                unitarity.max(FloquetOperator::new(&sys, kappa, DEFAULT_KICK_STRENGTH).unwrap().unitarity_defect());
        }
    }

    let sys = SpinSystem::new(160).unwrap();
    let op = FloquetOperator::new(&sys, 3.0, DEFAULT_KICK_STRENGTH).unwrap();
    let mut psi = coherent_state(&sys, CoherentParams::new(CHAOTIC.0, CHAOTIC.1).unwrap());
    for _ in 0..10_000 {
        psi = op.apply(&psi).unwrap();
    }
    let drift = (psi.norm() - 1.0).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut sphere: f64 = 0.0;
    for _ in 0..10 {
        let p = CoherentParams::new(rng.gen_range(0.0..PI), rng.gen_range(-PI..PI)).unwrap();
        let mut c = ClassicalState::from_angles(p);
        for _ in 0..10_000 {
            c = c.kick(6.0);
        }
        sphere = sphere.max((c.norm() - 1.0).abs());
    }

    let h = 1e-6;
    let mut jac: f64 = 0.0;
    for kappa in [0.5, 3.0, 6.0] {
        for _ in 0..100 {
            let p = CoherentParams::new(rng.gen_range(0.0..PI), rng.gen_range(-PI..PI)).unwrap();
            let c = ClassicalState::from_angles(p);
            let analytic = c.jacobian(kappa);
            for col in 0..3 {
                let mut plus = c.as_vector();
                let mut minus = c.as_vector();
                plus[col] += h;
                minus[col] -= h;
                let fp = ClassicalState::new(plus[0], plus[1], plus[2]).kick(kappa).as_vector();
                let fm = ClassicalState::new(minus[0], minus[1], minus[2]).kick(kappa).as_vector();
                let fd = (fp - fm) / (2.0 * h);
                let exact = analytic.column(col);
                jac = jac.max((fd - exact).norm() / exact.norm().max(1.0));
            }
        }
    }

    report(
        "9",
        unitarity < 1e-10 && drift < 1e-9 && sphere < 1e-9 && jac < 1e-5,
        format!(
            "max |U†U - I| = {unitarity:.1e}; norm drift after 1e4 kicks = {drift:.1e}; sphere drift = {sphere:.1e}; Jacobian FD relative error = {jac:.1e}"
        ),
    );
}

#[test]
fn criterion_10_quantum_classical_correspondence() {
    let sys = SpinSystem::new(160).unwrap();
    let op = FloquetOperator::new(&sys, 3.0, DEFAULT_KICK_STRENGTH).unwrap();
    let start = CoherentParams::new(REGULAR.0, REGULAR.1).unwrap();
    let record = evolve_record(&op, &sys, start, 5).unwrap();
    let mut c = ClassicalState::from_angles(start);
    let mut worst: f64 = 0.0;
    for s in &record.samples {
        worst = worst.max((s.z - c.z).abs());
        c = c.kick(3.0);
    }
    report("10", worst < 0.05, format!("max |⟨Jz⟩/j - Z_n| for n ≤ 5 at N=160, κ=3 = {worst:.4}"));
}

fn run_cli(out: &Path, args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_kicked-top"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("KICKED_TOP_THREADS")
        .status()
        .unwrap();
    assert!(status.success(), "kicked-top {args:?} exited with {status}");
}

fn check_table(path: &Path, columns: &[&str], rows: usize) -> Result<(), String> {
    let table = Table::read(path).map_err(|e| e.to_string())?;
    if table.columns != columns {
        return Err(format!("{}: columns {:?}", path.display(), table.columns));
    }
    if table.rows.len() != rows {
        return Err(format!("{}: {} rows, expected {rows}", path.display(), table.rows.len()));
    }
    if table.rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(format!("{}: non-finite cell", path.display()));
    }
    let manifest = RunManifest::read(&kicked_top::cli::output::manifest_path(path)).map_err(|e| e.to_string())?;
    if manifest.output.rows != rows || !manifest.verify(path).map_err(|e| e.to_string())? {
        return Err(format!("{}: manifest does not match the data file", path.display()));
    }
    Ok(())
}

#[test]
fn criterion_smoke_portrait_and_scan_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_cli(out, &["portrait", "--kappa", "3"]);
    run_cli(out, &["scan", "--n", "40", "--kappa", "3", "--kicks", "50", "--grid", "6x8"]);
    run_cli(out, &["scan", "--n", "40", "--kappa", "3", "--kicks", "50", "--grid", "6x8", "--observable", "pr"]);
    run_cli(
        out,
        &[
            "scan",
            "--n",
            "40",
            "--kappa",
            "3",
            "--kicks",
            "50",
            "--grid",
            "1x21",
            "--theta",
            "2.254",
            "--name",
            "slice.csv",
        ],
    );
    let checks = [
        check_table(&out.join("portrait.csv"), &["trajectory_id", "kick", "theta", "phi"], 157 * 300),
        check_table(&out.join("scan_fbar.csv"), &["theta", "phi", "value"], 48),
        check_table(&out.join("scan_pr.csv"), &["theta", "phi", "value"], 48),
        check_table(&out.join("slice.csv"), &["theta", "phi", "value"], 21),
    ];
    let errors: Vec<String> = checks.into_iter().filter_map(Result::err).collect();
    report(
        "smoke",
        errors.is_empty(),
        if errors.is_empty() {
            "portrait 157x300 rows, scans 48/48/21 rows, all re-parsed with matching digests".into()
        } else {
            errors.join("; ")
        },
    );
}
