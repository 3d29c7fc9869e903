//! Independent numerical oracles: a finite-difference eigensolver, a
//! Schrodinger residual, Gram matrices and weighted polynomial orthogonality.

pub mod report;
pub mod tridiagonal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectation::quadrature::{integrate_real_line, QuadConfig};
use crate::polynomials::{exceptional_hermite_for, Codimension};
use crate::potentials::{FamilySpec, RehoSystem};
use crate::states::{Eigenstate, WaveState};

pub use report::{run_suite, SuiteOptions, ValidationRecord};

/// Distance kept between the outermost classical turning point and the box edge.
pub const TURNING_MARGIN: f64 = 4.0;

/// Uniform grid on `[-half_width, half_width]` with Dirichlet ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_width: 12.0,
            points: 4801,
        }
    }
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        let g = GridSpec { half_width, points };
        g.validate()?;
        Ok(g)
    }

    /// Grid with spacing as close as possible to `spacing` (rounded so the
    /// point count is odd).
    pub fn with_spacing(half_width: f64, spacing: f64) -> Result<Self> {
        let intervals = (2.0 * half_width / spacing).round() as usize;
        let intervals = intervals + intervals % 2;
        Self::new(half_width, intervals + 1)
    }

    /// Default spacing 0.005, widened to `sqrt(2 E) + 8` for high levels.
    pub fn for_energy(energy: f64) -> Self {
        let half_width = ((2.0 * energy.max(0.0)).sqrt() + 8.0).max(12.0);
        Self::with_spacing(half_width, 0.005).expect("positive width")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "grid half-width must be positive, got {}",
                self.half_width
            )));
        }
        if self.points < 501 || self.points % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "grid needs an odd number of points >= 501, got {}",
                self.points
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.x(i))
    }
}

/// Finite-difference eigenvalues next to their closed-form values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub family: FamilySpec,
    pub computed: Vec<f64>,
    pub analytic: Vec<f64>,
    pub max_abs_err: f64,
}

/// Closed-form energies of the `k` lowest states of a family.
pub fn analytic_spectrum(spec: FamilySpec, k: usize) -> Vec<f64> {
    WaveState::lowest(spec, k).iter().map(WaveState::energy).collect()
}

/// Outermost `|x|` on the grid where `V - eps < energy`.
fn turning_point(spec: &FamilySpec, grid: &GridSpec, energy: f64) -> f64 {
    let eps = spec.factorization_energy();
    let sys = spec.system();
    grid.nodes()
        .filter(|&x| spec.potential_in(&sys, x) - eps < energy)
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// Lowest `k` eigenvalues of `-d^2/dx^2 + V - eps` on `grid`, by three-point
/// differences and Sturm bisection.
pub fn fd_spectrum(spec: FamilySpec, grid: GridSpec, k: usize) -> Result<SpectrumReport> {
    grid.validate()?;
    let analytic = analytic_spectrum(spec, k);
    let top = analytic.last().copied().unwrap_or(0.0);
    let turning = turning_point(&spec, &grid, top);
    if turning > grid.half_width - TURNING_MARGIN {
        return Err(Error::GridTooNarrow {
            half_width: grid.half_width,
            turning_point: turning,
            margin: TURNING_MARGIN,
        });
    }
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let eps = spec.factorization_energy();
    let sys = spec.system();
    let diag: Vec<f64> = (1..grid.points - 1)
        .map(|i| 2.0 * inv_h2 + spec.potential_in(&sys, grid.x(i)) - eps)
        .collect();
    let off = vec![-inv_h2; diag.len() - 1];
    let computed = tridiagonal::lowest_eigenvalues(&diag, &off, k);
    let max_abs_err = computed
        .iter()
        .zip(&analytic)
        .map(|(c, a)| (c - a).abs())
        .fold(0.0, f64::max);
    Ok(SpectrumReport {
        family: spec,
        computed,
        analytic,
        max_abs_err,
    })
}

/// `max |-psi'' + (V - eps) psi - E psi| / max |psi|` over interior nodes,
/// with a five-point second difference.
pub fn residual(state: &WaveState, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    let es = Eigenstate::closed_form(*state);
    Ok(residual_of(|x| es.value(x), &state.spec, state.energy(), grid))
}

/// Residual of an arbitrary function against the family Hamiltonian.
pub fn residual_of<F: Fn(f64) -> f64>(psi: F, spec: &FamilySpec, energy: f64, grid: &GridSpec) -> f64 {
    let h = grid.spacing();
    let values: Vec<f64> = grid.nodes().map(psi).collect();
    let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    let eps = spec.factorization_energy();
    let sys = spec.system();
    let mut worst = 0.0f64;
    for i in 2..values.len() - 2 {
        let d2 = (-values[i - 2] + 16.0 * values[i - 1] - 30.0 * values[i] + 16.0 * values[i + 1]
            - values[i + 2])
            / (12.0 * h * h);
        let x = grid.x(i);
        let r = -d2 + (spec.potential_in(&sys, x) - eps - energy) * values[i];
        worst = worst.max(r.abs());
    }
    worst / peak
}

/// Pairwise inner products of the `k` lowest closed-form states of a family.
pub fn gram_matrix(spec: FamilySpec, k: usize, cfg: Option<&QuadConfig>) -> Result<Vec<Vec<f64>>> {
    let states: Vec<Eigenstate> = WaveState::lowest(spec, k)
        .into_iter()
        .map(Eigenstate::closed_form)
        .collect();
    let top = states.last().map(|s| s.energy()).unwrap_or(0.0);
    let cfg = cfg.copied().unwrap_or_else(|| QuadConfig::for_energy(top));
    let mut breaks: Vec<f64> = states.iter().flat_map(|s| s.breakpoints(&cfg)).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut gram = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let (a, b) = (&states[i], &states[j]);
            let v = integrate_real_line(|x| a.value(x) * b.value(x), &breaks, &cfg)?.value;
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    Ok(gram)
}

/// Largest `|G - 1|` entry of a Gram matrix.
pub fn identity_deviation(gram: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    worst
}

/// Largest normalized cosine between distinct members `y_0, y_{m+1}, ...` of
/// the exceptional system under the weight `exp(-x^2) / P_m^2`.
pub fn xm_orthogonality(m: Codimension, k: usize, cfg: &QuadConfig) -> Result<f64> {
    let sys = RehoSystem::get(m);
    let polys: Vec<_> = (-1..k as i64 - 1)
        .map(|n| exceptional_hermite_for(m, n).to_float())
        .collect();
    let weight = |x: f64| {
        let p = sys.pseudo_derivatives(x).0;
        (-x * x).exp() / (p * p)
    };
    let inner = |i: usize, j: usize, cfg: &QuadConfig| {
        integrate_real_line(
            |x| {
                let w = weight(x);
                if w == 0.0 {
                    0.0
                } else {
                    w * polys[i].eval_compensated(x) * polys[j].eval_compensated(x)
                }
            },
            &[0.0],
            cfg,
        )
        .map(|o| o.value)
    };
    let norms: Vec<f64> = (0..k).map(|i| inner(i, i, cfg)).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in i + 1..k {
            // Off-diagonal products vanish; resolve them relative to the norms.
            let scale = (norms[i] * norms[j]).sqrt();
            let pair_cfg = QuadConfig {
                abs_tol: cfg.abs_tol.max(1e-10 * scale),
                ..*cfg
            };
            worst = worst.max((inner(i, j, &pair_cfg)? / scale).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fine() -> GridSpec {
        GridSpec::with_spacing(12.0, 0.01).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(12.0, 500).is_err());
        assert!(GridSpec::new(12.0, 502).is_err());
        assert!(GridSpec::new(-1.0, 601).is_err());
        let g = GridSpec::default();
        assert!((g.spacing() - 0.005).abs() < 1e-15);
        assert_eq!(GridSpec::with_spacing(12.0, 0.005).unwrap(), g);
    }

    #[test]
    fn oscillator_spectrum() {
        let r = fd_spectrum(FamilySpec::reho(0).unwrap(), GridSpec::default(), 4).unwrap();
        assert_eq!(r.analytic, vec![0.0, 2.0, 4.0, 6.0]);
        assert!(r.max_abs_err < 1e-4, "{r:?}");
        // The three-point scheme lowers level n by h^2 <p^4> / 12 with
        // <p^4> = 3 (2n^2 + 2n + 1) / 4, so at h = 0.01 the fourth level is
        // off by 1.5625e-4.
        let r = fd_spectrum(FamilySpec::reho(0).unwrap(), fine(), 4).unwrap();
        for (n, (c, a)) in r.computed.iter().zip(&r.analytic).enumerate() {
            let n = n as f64;
            let predicted = 1e-4 / 12.0 * 0.75 * (2.0 * n * n + 2.0 * n + 1.0);
            assert!(((a - c) - predicted).abs() < 0.02 * predicted, "n={n}: {}", a - c);
        }
    }

    #[test]
    fn reho_m2_spectrum_has_gap() {
        let r = fd_spectrum(FamilySpec::reho(2).unwrap(), GridSpec::default(), 3).unwrap();
        assert_eq!(r.analytic, vec![0.0, 6.0, 8.0]);
        assert!(r.max_abs_err < 1e-3, "{r:?}");
    }

    #[test]
    fn pursey_loses_ground_state() {
        let r = fd_spectrum(FamilySpec::pursey(0).unwrap(), GridSpec::default(), 3).unwrap();
        assert_eq!(r.analytic, vec![2.0, 4.0, 6.0]);
        assert!(r.max_abs_err < 1e-3, "{r:?}");
    }

    #[test]
    fn narrow_grid_rejected() {
        let g = GridSpec::new(5.0, 1001).unwrap();
        let err = fd_spectrum(FamilySpec::reho(0).unwrap(), g, 5).unwrap_err();
        assert!(matches!(err, Error::GridTooNarrow { .. }));
    }

    #[test]
    fn second_order_convergence() {
        for spec in [FamilySpec::reho(2).unwrap(), FamilySpec::isospectral(0, 0.5).unwrap()] {
            let errs: Vec<f64> = [0.02, 0.01, 0.005]
                .iter()
                .map(|&h| {
                    let g = GridSpec::with_spacing(12.0, h).unwrap();
                    fd_spectrum(spec, g, 3).unwrap().max_abs_err
                })
                .collect();
            for w in errs.windows(2) {
                let ratio = w[0] / w[1];
                assert!(ratio > 3.5 && ratio < 4.5, "{spec}: {errs:?}");
            }
        }
    }

    #[test]
    fn isospectral_families_share_spectrum() {
        for m in [0, 2] {
            let base = fd_spectrum(FamilySpec::reho(m).unwrap(), GridSpec::default(), 4).unwrap();
            for lambda in [0.5, 100.0, -2.0] {
                let iso = fd_spectrum(FamilySpec::isospectral(m, lambda).unwrap(), GridSpec::default(), 4)
                    .unwrap();
                for (a, b) in base.computed.iter().zip(&iso.computed) {
                    assert!((a - b).abs() < 1e-3, "m={m} l={lambda}");
                }
            }
            let p = fd_spectrum(FamilySpec::pursey(m).unwrap(), GridSpec::default(), 3).unwrap();
            let a = fd_spectrum(FamilySpec::abraham_moses(m).unwrap(), GridSpec::default(), 3).unwrap();
            for i in 0..3 {
                assert!((p.computed[i] - a.computed[i]).abs() < 1e-3);
                assert!((p.computed[i] - base.computed[i + 1]).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn residual_examples() {
        let g = GridSpec::default();
        assert!(residual(&WaveState::reho(2, 0).unwrap(), &g).unwrap() < 1e-6);
        assert!(residual(&WaveState::isospectral(0, 0.1, -1).unwrap(), &g).unwrap() < 1e-6);
        let spec = FamilySpec::reho(0).unwrap();
        assert_eq!(residual_of(|_| 0.0, &spec, 0.0, &g), 0.0);
        // A wrong energy leaves a residual of order the energy error.
        let es = Eigenstate::closed_form(WaveState::reho(0, 0).unwrap());
        assert!(residual_of(|x| es.value(x), &spec, 2.5, &g) > 0.4);
    }

    #[test]
    fn gram_identity() {
        let g = gram_matrix(FamilySpec::reho(2).unwrap(), 4, None).unwrap();
        assert!(identity_deviation(&g) < 1e-6, "{g:?}");
        let g = gram_matrix(FamilySpec::isospectral(0, 1.0).unwrap(), 3, None).unwrap();
        assert!(identity_deviation(&g) < 1e-6, "{g:?}");
        for (i, row) in g.iter().enumerate() {
            assert!((row[i] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn exceptional_polynomials_orthogonal() {
        for m in [0, 2, 4] {
            let c = xm_orthogonality(Codimension::new(m).unwrap(), 5, &QuadConfig::for_energy(20.0)).unwrap();
            assert!(c < 1e-6, "m={m}: {c}");
        }
    }
}
