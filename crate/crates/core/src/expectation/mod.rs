//! Position and momentum moments of eigenstates, and the Heisenberg product.
//!
//! All wavefunctions are real, so `<p> = 0` identically and is never
//! integrated. `<p^2>` is `int psi'^2 dx` with the analytic derivative; the
//! Schrodinger relation `E - int (V - eps) psi^2 dx` is kept as a second route.

pub mod quadrature;

use serde::Serialize;

use crate::error::Result;
use crate::states::{Eigenstate, WaveState};
use quadrature::{integrate_real_line, QuadConfig};

/// Moments of one state and its uncertainty product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub mean_x: f64,
    pub mean_x2: f64,
    pub mean_p2: f64,
    /// `sqrt(Var(x) <p^2>)`, with the variance from the centered moment.
    pub dx_dp: f64,
    pub state: WaveState,
}

impl UncertaintyReport {
    pub fn variance_x(&self) -> f64 {
        self.dx_dp * self.dx_dp / self.mean_p2
    }
}

/// Quadrature settings used when the caller gives none.
pub fn default_config(state: &WaveState) -> QuadConfig {
    QuadConfig::for_energy(state.energy())
}

fn moment<F: Fn(f64) -> f64>(es: &Eigenstate, weight: F, cfg: &QuadConfig) -> Result<f64> {
    let breaks = es.breakpoints(cfg);
    integrate_real_line(|x| weight(x) * es.value(x).powi(2), &breaks, cfg).map(|o| o.value)
}

pub fn expect_x(es: &Eigenstate, cfg: &QuadConfig) -> Result<f64> {
    moment(es, |x| x, cfg)
}

pub fn expect_x2(es: &Eigenstate, cfg: &QuadConfig) -> Result<f64> {
    moment(es, |x| x * x, cfg)
}

/// `<p^2> = int psi'(x)^2 dx`.
pub fn expect_p2(es: &Eigenstate, cfg: &QuadConfig) -> Result<f64> {
    let breaks = es.breakpoints(cfg);
    integrate_real_line(|x| es.derivative(x).powi(2), &breaks, cfg).map(|o| o.value)
}

/// `<p^2> = E - int (V - eps) psi^2 dx`.
pub fn expect_p2_identity(es: &Eigenstate, cfg: &QuadConfig) -> Result<f64> {
    let spec = es.state().spec;
    let eps = spec.factorization_energy();
    let sys = es.system();
    let potential_energy = moment(es, |x| spec.potential_in(sys, x) - eps, cfg)?;
    Ok(es.energy() - potential_energy)
}

/// Full report for `state`, with `cfg` or the energy-scaled default.
pub fn uncertainty(state: &WaveState, cfg: Option<&QuadConfig>) -> Result<UncertaintyReport> {
    let cfg = cfg.copied().unwrap_or_else(|| default_config(state));
    cfg.validate()?;
    let es = Eigenstate::new(*state, &cfg)?;
    uncertainty_of(&es, &cfg)
}

pub fn uncertainty_of(es: &Eigenstate, cfg: &QuadConfig) -> Result<UncertaintyReport> {
    let mean_x = expect_x(es, cfg)?;
    let mean_x2 = expect_x2(es, cfg)?;
    let variance = moment(es, |x| (x - mean_x).powi(2), cfg)?;
    let mean_p2 = expect_p2(es, cfg)?;
    Ok(UncertaintyReport {
        mean_x,
        mean_x2,
        mean_p2,
        dx_dp: (variance * mean_p2).sqrt(),
        state: *es.state(),
    })
}
