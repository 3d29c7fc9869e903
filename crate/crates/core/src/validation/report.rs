//! Validation suite producing one JSON-lines record per check.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::expectation::quadrature::QuadConfig;
use crate::expectation::{expect_p2, expect_p2_identity, uncertainty_of};
use crate::polynomials::Codimension;
use crate::potentials::{FamilySpec, RehoSystem};
use crate::states::{Eigenstate, WaveState};

use super::{fd_spectrum, gram_matrix, identity_deviation, residual_of, xm_orthogonality, GridSpec};

/// Lower bound on `dx dp` with `hbar = 1`.
pub const HEISENBERG_BOUND: f64 = 0.5;

/// One check. `value` is an error measure compared with `tolerance`, except
/// for `heisenberg`, where `value` is `dx dp` and must not fall below
/// `0.5 - tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRecord {
    pub family: &'static str,
    pub m: u32,
    pub lambda: Option<f64>,
    pub n: Option<i64>,
    pub check: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ValidationRecord {
    fn error(spec: &FamilySpec, n: Option<i64>, check: &'static str, value: f64, tolerance: f64) -> Self {
        ValidationRecord {
            family: spec.label(),
            m: spec.m().get(),
            lambda: spec.lambda(),
            n,
            check,
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub ms: Vec<i64>,
    pub lambdas: Vec<f64>,
    /// Levels checked per family.
    pub levels: usize,
    pub grid: Option<GridSpec>,
    pub quad: Option<QuadConfig>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            ms: vec![0, 2, 4],
            lambdas: vec![0.5, 100.0, -2.0],
            levels: 5,
            grid: None,
            quad: None,
        }
    }
}

/// Tolerances of the individual checks.
pub mod tolerance {
    pub const SPECTRUM: f64 = 1e-3;
    pub const GRAM: f64 = 1e-6;
    pub const RESIDUAL: f64 = 1e-6;
    pub const HEISENBERG: f64 = 1e-9;
    pub const ORTHOGONALITY: f64 = 1e-6;
    pub const SUSY: f64 = 1e-9;
    pub const MOMENTUM_ROUTES: f64 = 1e-7;
}

fn families(m: i64, lambdas: &[f64]) -> Result<Vec<FamilySpec>> {
    let mut out = vec![FamilySpec::reho(m)?];
    for &l in lambdas {
        out.push(FamilySpec::isospectral(m, l)?);
    }
    out.push(FamilySpec::pursey(m)?);
    out.push(FamilySpec::abraham_moses(m)?);
    Ok(out)
}

/// Everything that only involves a single family.
fn family_checks(spec: FamilySpec, opts: &SuiteOptions) -> Result<(Vec<f64>, Vec<ValidationRecord>)> {
    let states = WaveState::lowest(spec, opts.levels);
    let top = states.last().map(WaveState::energy).unwrap_or(0.0);
    let grid = opts.grid.unwrap_or_else(|| GridSpec::for_energy(top));
    let quad = opts.quad.unwrap_or_else(|| QuadConfig::for_energy(top));
    let mut records = Vec::new();

    let spectrum = fd_spectrum(spec, grid, opts.levels)?;
    for (s, (c, a)) in states.iter().zip(spectrum.computed.iter().zip(&spectrum.analytic)) {
        records.push(ValidationRecord::error(&spec, Some(s.n), "spectrum", (c - a).abs(), tolerance::SPECTRUM));
    }

    let gram = gram_matrix(spec, opts.levels.min(6), Some(&quad))?;
    records.push(ValidationRecord::error(
        &spec,
        None,
        "orthonormality",
        identity_deviation(&gram),
        tolerance::GRAM,
    ));

    for s in &states {
        let es = Eigenstate::closed_form(*s);
        let r = residual_of(|x| es.value(x), &spec, s.energy(), &grid);
        records.push(ValidationRecord::error(&spec, Some(s.n), "residual", r, tolerance::RESIDUAL));

        let a = expect_p2(&es, &quad)?;
        let b = expect_p2_identity(&es, &quad)?;
        records.push(ValidationRecord::error(
            &spec,
            Some(s.n),
            "momentum-routes",
            (a - b).abs(),
            tolerance::MOMENTUM_ROUTES,
        ));

        let report = uncertainty_of(&es, &quad)?;
        records.push(ValidationRecord {
            pass: report.dx_dp >= HEISENBERG_BOUND - tolerance::HEISENBERG,
            ..ValidationRecord::error(&spec, Some(s.n), "heisenberg", report.dx_dp, tolerance::HEISENBERG)
        });
    }
    Ok((spectrum.computed, records))
}

/// Largest `|W^2 - W' + eps - V|` on `[-8, 8]`.
pub fn susy_defect(m: Codimension) -> f64 {
    let sys = RehoSystem::get(m);
    let eps = sys.factorization_energy();
    (0..=1600)
        .map(|i| -8.0 + i as f64 * 0.01)
        .map(|x| {
            let w = sys.superpotential(x);
            let dw = sys.superpotential_derivative(x);
            let minus = (w * w - dw + eps - sys.potential(x)).abs();
            let plus = (w * w + dw + eps - sys.partner_potential(x)).abs();
            minus.max(plus)
        })
        .fold(0.0, f64::max)
}

fn codimension_checks(m: i64, opts: &SuiteOptions) -> Result<Vec<ValidationRecord>> {
    let specs = families(m, &opts.lambdas)?;
    let results: Vec<(Vec<f64>, Vec<ValidationRecord>)> = specs
        .par_iter()
        .map(|&spec| family_checks(spec, opts))
        .collect::<Result<_>>()?;

    let mut records: Vec<ValidationRecord> = Vec::new();
    for (_, r) in &results {
        records.extend(r.iter().cloned());
    }
    let reho = &specs[0];
    let base = &results[0].0;
    let pursey = &results[results.len() - 2].0;
    let am = &results[results.len() - 1].0;
    for (spec, (levels, _)) in specs.iter().zip(&results).skip(1).take(opts.lambdas.len()) {
        for (i, (a, b)) in base.iter().zip(levels).enumerate() {
            let n = spec.lowest_index() + i as i64;
            records.push(ValidationRecord::error(spec, Some(n), "isospectral", (a - b).abs(), tolerance::SPECTRUM));
        }
    }
    let am_spec = specs[specs.len() - 1];
    for (n, (p, a)) in pursey.iter().zip(am).enumerate() {
        records.push(ValidationRecord::error(&am_spec, Some(n as i64), "pursey-am", (p - a).abs(), tolerance::SPECTRUM));
    }
    let pursey_spec = specs[specs.len() - 2];
    for (n, (p, r)) in pursey.iter().zip(base.iter().skip(1)).enumerate() {
        records.push(ValidationRecord::error(
            &pursey_spec,
            Some(n as i64),
            "reho-minus-ground",
            (p - r).abs(),
            tolerance::SPECTRUM,
        ));
    }

    let quad = opts.quad.unwrap_or_else(|| QuadConfig::for_energy(2.0 * (opts.levels as f64 + m as f64)));
    let cosine = xm_orthogonality(reho.m(), opts.levels, &quad)?;
    records.push(ValidationRecord::error(reho, None, "xm-orthogonality", cosine, tolerance::ORTHOGONALITY));
    records.push(ValidationRecord::error(reho, None, "susy-identity", susy_defect(reho.m()), tolerance::SUSY));
    Ok(records)
}

/// Runs every check for every requested codimension. Record order is fixed
/// by the options, not by scheduling.
pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<ValidationRecord>> {
    let per_m: Vec<Vec<ValidationRecord>> = opts
        .ms
        .par_iter()
        .map(|&m| codimension_checks(m, opts))
        .collect::<Result<_>>()?;
    Ok(per_m.into_iter().flatten().collect())
}
