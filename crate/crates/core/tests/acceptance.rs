//! Acceptance criteria 1-7. Each test prints one `criterion N: PASS|FAIL` line;
//! run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use num_bigint::Sign;
use reho::polynomials::{hermite, pseudo_hermite_raw};
use reho::reference::REFERENCE_TOLERANCE;
use reho::tables::{build_table, CellStatus, TableCell, TableId};
use reho::validation::report::{susy_defect, tolerance, HEISENBERG_BOUND};
use reho::validation::{analytic_spectrum, fd_spectrum, run_suite, xm_orthogonality, SuiteOptions};
use reho::{
    exceptional_hermite, uncertainty, Codimension, FamilySpec, GridSpec, Polynomial, QuadConfig,
    RehoSystem, WaveState,
};

fn verdict(criterion: u32, failures: &[String], detail: &str) {
    if failures.is_empty() {
        println!("criterion {criterion}: PASS ({detail})");
    } else {
        println!("criterion {criterion}: FAIL ({detail})");
        for f in failures {
            println!("  {f}");
        }
    }
    assert!(failures.is_empty(), "criterion {criterion}: {failures:#?}");
}

fn describe(c: &TableCell) -> String {
    format!(
        "{} {} m={} n={} lambda={:?}: computed {:.6}, published {:.4}",
        c.source,
        c.quantity.name(),
        c.state.spec.m(),
        c.state.n,
        c.state.spec.lambda(),
        c.computed,
        c.reference.unwrap_or(f64::NAN)
    )
}

fn cell_failures(cells: &[TableCell]) -> Vec<String> {
    cells.iter().filter(|c| c.status != CellStatus::Pass).map(describe).collect()
}

fn dx_dp(state: WaveState) -> f64 {
    uncertainty(&state, None).unwrap().dx_dp
}

#[test]
fn criterion_1_table_5() {
    let start = Instant::now();
    let cells = build_table(TableId::UnRe, None, None).unwrap();
    let elapsed = start.elapsed();
    let published = [
        (0, [0.5, 1.5, 2.5]),
        (2, [0.5172, 1.554, 2.3412]),
        (4, [0.5212, 1.6152, 2.2102]),
    ];
    let mut failures = Vec::new();
    for (m, row) in published {
        for (n, want) in (-1..=1).zip(row) {
            let got = dx_dp(WaveState::reho(m, n).unwrap());
            if (got - want).abs() > REFERENCE_TOLERANCE {
                failures.push(format!("m={m} n={n}: {got:.6} vs {want}"));
            }
        }
    }
    failures.extend(cell_failures(&cells));
    if cells.len() != 9 {
        failures.push(format!("{} cells, expected 9", cells.len()));
    }
    if elapsed >= Duration::from_secs(10) {
        failures.push(format!("runtime {elapsed:?} >= 10 s"));
    }
    verdict(1, &failures, &format!("9 cells within {REFERENCE_TOLERANCE}, {elapsed:.2?}"));
}

/// Ground-state `dx dp` at `lambda = 1e-12` from an independent 50-digit
/// quadrature of the closed-form state.
const ORACLE_TINY_LAMBDA: [(i64, f64); 3] = [(0, 0.5254824307), (2, 0.5253936575), (4, 0.5248931277)];

#[test]
fn criterion_2_table_6() {
    let cells = build_table(TableId::UnIso, None, None).unwrap();
    let mut failures = cell_failures(&cells);
    if cells.len() != 18 {
        failures.push(format!("{} cells, expected 18", cells.len()));
    }
    let flagged = cells.iter().filter(|c| c.status == CellStatus::Flagged).count();
    verdict(
        2,
        &failures,
        &format!("{} of {} cells within {REFERENCE_TOLERANCE}, {flagged} flagged", cells.len() - flagged, cells.len()),
    );
}

/// The parts of criterion 2 that do not depend on the published values of the
/// flagged cells: the large-lambda limit and agreement of every flagged cell
/// with the independent oracle.
#[test]
fn criterion_2_flagged_cells_carry_oracle_values() {
    let cells = build_table(TableId::UnIso, None, None).unwrap();
    for (m, want) in [(0, 0.5), (2, 0.5172)] {
        let c = cells
            .iter()
            .find(|c| c.state.spec.m().get() == m && c.state.spec.lambda() == Some(100.0))
            .unwrap();
        assert!((c.computed - want).abs() < REFERENCE_TOLERANCE, "m={m}: {}", c.computed);
        assert_eq!(c.status, CellStatus::Pass);
    }
    for c in cells.iter().filter(|c| c.status == CellStatus::Flagged) {
        let m = i64::from(c.state.spec.m().get());
        let oracle = ORACLE_TINY_LAMBDA.iter().find(|(om, _)| *om == m).map(|(_, v)| *v);
        assert_eq!(c.state.spec.lambda(), Some(1e-12), "{}", describe(c));
        let oracle = oracle.unwrap();
        assert!((c.computed - oracle).abs() < 1e-6, "{}: oracle {oracle}", describe(c));
        println!("  flagged {}; independent value {oracle:.10}", describe(c));
    }
}

#[test]
fn criterion_3_table_7() {
    let cells = build_table(TableId::UnPam, None, None).unwrap();
    let mut failures = cell_failures(&cells);
    let mut worst = 0.0f64;
    for m in [0, 2, 4] {
        for n in [0, 1, 2, 3, 10] {
            let find = |label: &str| {
                cells
                    .iter()
                    .find(|c| c.state.spec.label() == label && c.state.spec.m().get() == m && c.state.n == n)
                    .map(|c| c.computed)
            };
            match (find("pursey"), find("am")) {
                (Some(p), Some(a)) => {
                    worst = worst.max((p - a).abs());
                    if (p - a).abs() > 1e-8 {
                        failures.push(format!("m={m} n={n}: pursey {p} vs am {a}"));
                    }
                }
                _ => failures.push(format!("m={m} n={n}: missing cell")),
            }
        }
    }
    for (m, n, want) in [(0, 0, 0.50184), (4, 10, 10.4987)] {
        let got = dx_dp(WaveState::pursey(m, n).unwrap());
        if (got - want).abs() > REFERENCE_TOLERANCE {
            failures.push(format!("m={m} n={n}: {got:.6} vs {want}"));
        }
    }
    verdict(3, &failures, &format!("{} cells, max |pursey - am| = {worst:.1e}", cells.len()));
}

#[test]
fn criterion_4_appendices() {
    let mut cells = build_table(TableId::AppendixA, None, None).unwrap();
    cells.extend(build_table(TableId::AppendixB, None, None).unwrap());
    let mut failures = cell_failures(&cells);
    for m in [0, 2, 4] {
        for lambda in [1e-3, 0.1, 100.0] {
            let a = uncertainty(&WaveState::isospectral(m, lambda, -1).unwrap(), None).unwrap();
            let b = uncertainty(&WaveState::isospectral(m, -(lambda + 1.0), -1).unwrap(), None).unwrap();
            if (a.mean_x + b.mean_x).abs() > 1e-8 || (a.mean_x2 - b.mean_x2).abs() > 1e-8 {
                failures.push(format!(
                    "m={m} lambda={lambda}: <x> {} / {}, <x^2> {} / {}",
                    a.mean_x, b.mean_x, a.mean_x2, b.mean_x2
                ));
            }
        }
    }
    verdict(4, &failures, &format!("{} cells, reflection law at 3 lambdas per m", cells.len()));
}

fn fd_levels(spec: FamilySpec, k: usize) -> Vec<f64> {
    let top = analytic_spectrum(spec, k).last().copied().unwrap();
    fd_spectrum(spec, GridSpec::for_energy(top), k).unwrap().computed
}

#[test]
fn criterion_5_spectrum_oracle() {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut check = |label: String, computed: &[f64], expected: &[f64]| {
        for (i, (c, e)) in computed.iter().zip(expected).enumerate() {
            worst = worst.max((c - e).abs());
            if (c - e).abs() > tolerance::SPECTRUM {
                failures.push(format!("{label} level {i}: {c} vs {e}"));
            }
        }
    };
    for m in [0, 2, 4] {
        let mut expected = vec![0.0];
        expected.extend((0..5).map(|n| 2.0 * f64::from(n + m + 1)));
        let reho_levels = &expected[..5];

        let start = Instant::now();
        let computed = fd_levels(FamilySpec::reho(i64::from(m)).unwrap(), 5);
        slowest = slowest.max(start.elapsed());
        check(format!("reho m={m}"), &computed, reho_levels);

        for lambda in [0.5, 100.0, -2.0] {
            let start = Instant::now();
            let computed = fd_levels(FamilySpec::isospectral(i64::from(m), lambda).unwrap(), 5);
            slowest = slowest.max(start.elapsed());
            check(format!("iso m={m} lambda={lambda}"), &computed, reho_levels);
        }
        for spec in [FamilySpec::pursey(i64::from(m)).unwrap(), FamilySpec::abraham_moses(i64::from(m)).unwrap()] {
            let start = Instant::now();
            let computed = fd_levels(spec, 5);
            slowest = slowest.max(start.elapsed());
            check(format!("{} m={m}", spec.label()), &computed, &expected[1..]);
        }
    }
    if slowest >= Duration::from_secs(30) {
        failures.push(format!("slowest family took {slowest:?}"));
    }
    verdict(5, &failures, &format!("max error {worst:.2e}, slowest family {slowest:.2?}"));
}

fn identities_hold(failures: &mut Vec<String>) {
    let two = Polynomial::constant(2);
    let x2 = &two * &Polynomial::x();
    let h: Vec<Polynomial> = (0..=31).map(hermite).collect();
    let p: Vec<Polynomial> = (0..=31).map(pseudo_hermite_raw).collect();
    for n in 1..=30usize {
        let k = Polynomial::constant(2 * n as i64);
        if h[n + 1] != &(&x2 * &h[n]) - &(&k * &h[n - 1]) {
            failures.push(format!("Hermite recurrence at n={n}"));
        }
        if h[n].derivative() != &k * &h[n - 1] {
            failures.push(format!("Hermite derivative at n={n}"));
        }
        if p[n + 1] != &(&x2 * &p[n]) + &(&k * &p[n - 1]) {
            failures.push(format!("pseudo-Hermite recurrence at n={n}"));
        }
        if p[n].derivative() != &k * &p[n - 1] {
            failures.push(format!("pseudo-Hermite derivative at n={n}"));
        }
    }
    for m in (0..=20).step_by(2) {
        for n in 0..=10i64 {
            let y = exceptional_hermite(m, n).unwrap();
            let pm = &p[m as usize];
            let expect = &(pm * &h[n as usize + 1]) + &(&pm.derivative() * &h[n as usize]);
            if y != expect || y.degree() != Some(m as usize + n as usize + 1) {
                failures.push(format!("X_m polynomial m={m} n={n}"));
            }
        }
    }
}

#[test]
fn criterion_6_property_suite() {
    let mut failures = Vec::new();
    identities_hold(&mut failures);

    for m in (0..=20).step_by(2) {
        let pm = pseudo_hermite_raw(m);
        let lowest = (0..=4000).map(|i| pm.eval(-20.0 + i as f64 * 0.01)).fold(f64::INFINITY, f64::min);
        if lowest <= 0.0 || pm.coeffs().iter().any(|c| c.sign() == Sign::Minus) {
            failures.push(format!("P_{m} not positive (min {lowest})"));
        }
    }

    let cfg = QuadConfig::default();
    for m in [0, 2, 4] {
        let dev = xm_orthogonality(Codimension::new(m).unwrap(), 6, &cfg).unwrap();
        if dev > tolerance::ORTHOGONALITY {
            failures.push(format!("X_{m} orthogonality deviation {dev:e}"));
        }
        let susy = susy_defect(Codimension::new(m).unwrap());
        if susy > tolerance::SUSY {
            failures.push(format!("SUSY defect m={m}: {susy:e}"));
        }
    }

    let records = run_suite(&SuiteOptions::default()).unwrap();
    for check in ["orthonormality", "residual", "heisenberg", "momentum-routes", "susy-identity", "xm-orthogonality"] {
        let subset: Vec<_> = records.iter().filter(|r| r.check == check).collect();
        if subset.is_empty() {
            failures.push(format!("no {check} records"));
        }
        for r in subset.iter().filter(|r| !r.pass) {
            failures.push(format!("{check} {} m={} n={:?} lambda={:?}: {:e}", r.family, r.m, r.n, r.lambda, r.value));
        }
    }

    let mut computed = 0;
    for id in TableId::ALL {
        for c in build_table(id, None, None).unwrap() {
            if c.quantity.name() == "dx_dp" {
                computed += 1;
                if c.computed < HEISENBERG_BOUND - tolerance::HEISENBERG {
                    failures.push(format!("Heisenberg bound: {}", describe(&c)));
                }
            }
        }
    }

    let sys = RehoSystem::for_m(2).unwrap();
    let deviation = |lambda: f64| {
        (0..=1200)
            .map(|i| -6.0 + i as f64 * 0.01)
            .map(|x| (sys.isospectral_potential(lambda, x) - sys.potential(x)).abs())
            .fold(0.0, f64::max)
    };
    let sweep: Vec<f64> = [1e2, 1e4, 1e6, 1e8].iter().map(|&l| deviation(l)).collect();
    if !sweep.windows(2).all(|w| w[1] < w[0]) || sweep[3] > 1e-6 {
        failures.push(format!("lambda -> infinity: {sweep:?}"));
    }

    verdict(
        6,
        &failures,
        &format!("{} suite records, {computed} table products, large-lambda deviation {:.1e}", records.len(), sweep[3]),
    );
}

#[test]
fn criterion_7_trends() {
    let mut failures = Vec::new();
    let ground: Vec<f64> = [0, 2, 4].iter().map(|&m| dx_dp(WaveState::reho(m, -1).unwrap())).collect();
    if !ground.windows(2).all(|w| w[1] > w[0]) {
        failures.push(format!("ground state not increasing in m: {ground:?}"));
    }
    let change: Vec<f64> = (0..=3)
        .map(|n| dx_dp(WaveState::reho(8, n).unwrap()) - dx_dp(WaveState::reho(0, n).unwrap()))
        .collect();
    let even_up = change[0] > 0.0 && change[2] > 0.0;
    let even_down = change[0] < 0.0 && change[2] < 0.0;
    let odd_up = change[1] > 0.0 && change[3] > 0.0;
    let odd_down = change[1] < 0.0 && change[3] < 0.0;
    if !((even_up && odd_down) || (even_down && odd_up)) {
        failures.push(format!("no opposite parity monotonicity: changes {change:?}"));
    }
    verdict(7, &failures, &format!("ground {ground:.4?}, m=0 to m=8 changes {change:.4?}"));
}
