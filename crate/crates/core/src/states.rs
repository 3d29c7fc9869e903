//! Closed-form eigenfunctions and energies of every family member.
//!
//! Quantum numbers follow one scheme throughout: `n = -1` is the zero-energy
//! ground state of the REHO and isospectral potentials, `n >= 0` labels the
//! excited state `psi_{n+1}` with energy `2(n + m + 1)`. Partner, Pursey and
//! AM have no zero-energy state and start at `n = 0` with the same energies.
//!
//! Isospectral excited states are
//! `N exp(-x^2/2) (y_{n+1}/P_m + H_n phi)` with `phi = psi_0^2 / (I + lambda)`;
//! Pursey and AM are the same expression at `lambda = 0` and `-1`. With this
//! convention `psi_am(n, x) = (-1)^(n+1) psi_pursey(n, -x)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectation::quadrature::{integrate_real_line, QuadConfig};
use crate::polynomials::{exceptional_hermite_for, hermite, FloatPoly};
use crate::potentials::{check_lambda, FamilyKind, FamilySpec, RehoSystem};

/// Deviation of the measured norm from 1 beyond which a state is rescaled.
pub const NORM_TOLERANCE: f64 = 1e-7;

/// One eigenfunction: family member plus quantum number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveState {
    pub spec: FamilySpec,
    pub n: i64,
}

impl WaveState {
    pub fn new(spec: FamilySpec, n: i64) -> Result<Self> {
        let min = spec.lowest_index();
        if n < min {
            return Err(Error::InvalidQuantumNumber {
                family: spec.label(),
                n,
                min,
            });
        }
        Ok(WaveState { spec, n })
    }

    pub fn reho(m: i64, n: i64) -> Result<Self> {
        Self::new(FamilySpec::reho(m)?, n)
    }

    pub fn isospectral(m: i64, lambda: f64, n: i64) -> Result<Self> {
        Self::new(FamilySpec::isospectral(m, lambda)?, n)
    }

    pub fn pursey(m: i64, n: i64) -> Result<Self> {
        Self::new(FamilySpec::pursey(m)?, n)
    }

    pub fn abraham_moses(m: i64, n: i64) -> Result<Self> {
        Self::new(FamilySpec::abraham_moses(m)?, n)
    }

    pub fn partner(m: i64, n: i64) -> Result<Self> {
        Self::new(FamilySpec::partner(m)?, n)
    }

    pub fn energy(&self) -> f64 {
        energy(self)
    }

    /// The `k` lowest states of a family, in order of increasing energy.
    pub fn lowest(spec: FamilySpec, k: usize) -> Vec<WaveState> {
        let start = spec.lowest_index();
        (0..k as i64)
            .map(|i| WaveState { spec, n: start + i })
            .collect()
    }
}

impl fmt::Display for WaveState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={}", self.spec, self.n)
    }
}

/// Energy eigenvalue: 0 for the ground state, `2(n + m + 1)` otherwise.
pub fn energy(state: &WaveState) -> f64 {
    if state.n < 0 {
        0.0
    } else {
        2.0 * (state.n as f64 + f64::from(state.spec.m().get()) + 1.0)
    }
}

/// Closed-form prefactor of a state's wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormConstant {
    pub value: f64,
    pub state: WaveState,
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `[E 2^n n! sqrt(pi)]^(-1/2)` for excited states.
fn excited_prefactor(n: i64, m: u32) -> f64 {
    let e = 2.0 * (n as f64 + f64::from(m) + 1.0);
    let ln = e.ln() + n as f64 * 2f64.ln() + ln_factorial(n as u64) + 0.5 * PI.ln();
    (-0.5 * ln).exp()
}

/// `[2^n n! sqrt(pi)]^(-1/2)` for oscillator states.
fn oscillator_prefactor(n: i64) -> f64 {
    let ln = n as f64 * 2f64.ln() + ln_factorial(n as u64) + 0.5 * PI.ln();
    (-0.5 * ln).exp()
}

pub fn norm_constant(state: &WaveState) -> NormConstant {
    let sys = state.spec.system();
    let m = state.spec.m().get();
    let value = match (state.spec.kind(), state.n) {
        (FamilyKind::Reho, -1) => sys.ground_norm(),
        (FamilyKind::Isospectral { lambda }, -1) => (lambda * (1.0 + lambda)).sqrt(),
        (FamilyKind::Partner, n) => oscillator_prefactor(n),
        (_, n) => excited_prefactor(n, m),
    };
    NormConstant {
        value,
        state: *state,
    }
}

/// Polynomial pieces of an excited state, in double precision.
#[derive(Debug, Clone)]
struct ExcitedParts {
    y: FloatPoly,
    dy: FloatPoly,
    hn: FloatPoly,
    dhn: FloatPoly,
}

#[derive(Debug, Clone)]
enum Form {
    RehoGround,
    IsoGround { lambda: f64 },
    Excited { parts: ExcitedParts, lambda: Option<f64> },
    Oscillator { hn: FloatPoly, dhn: FloatPoly },
}

/// Recorded when a closed-form state had to be renormalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormDiagnostic {
    pub measured_norm: f64,
}

/// Evaluator for one eigenfunction and its analytic derivative.
#[derive(Debug, Clone)]
pub struct Eigenstate {
    state: WaveState,
    sys: Arc<RehoSystem>,
    form: Form,
    prefactor: f64,
    scale: f64,
    diagnostic: Option<NormDiagnostic>,
}

impl Eigenstate {
    /// The closed form exactly as written, without re-measuring the norm.
    pub fn closed_form(state: WaveState) -> Eigenstate {
        let sys = state.spec.system();
        let m = state.spec.m();
        let n = state.n;
        let excited = |lambda: Option<f64>| {
            let y = exceptional_hermite_for(m, n);
            let hn = hermite(n as usize);
            Form::Excited {
                parts: ExcitedParts {
                    y: y.to_float(),
                    dy: y.derivative().to_float(),
                    hn: hn.to_float(),
                    dhn: hn.derivative().to_float(),
                },
                lambda,
            }
        };
        let (form, prefactor) = match state.spec.kind() {
            FamilyKind::Reho if n < 0 => (Form::RehoGround, 1.0),
            FamilyKind::Reho => (excited(None), excited_prefactor(n, m.get())),
            FamilyKind::Isospectral { lambda } if n < 0 => {
                // sqrt(lambda (1 + lambda)) is real on both branches; the sign
                // makes the state positive for lambda < -1 as well.
                let c = (lambda * (1.0 + lambda)).sqrt();
                (Form::IsoGround { lambda }, c.copysign(lambda))
            }
            FamilyKind::Isospectral { lambda } => {
                (excited(Some(lambda)), excited_prefactor(n, m.get()))
            }
            FamilyKind::Pursey => (excited(Some(0.0)), excited_prefactor(n, m.get())),
            FamilyKind::AbrahamMoses => (excited(Some(-1.0)), excited_prefactor(n, m.get())),
            FamilyKind::Partner => {
                let hn = hermite(n as usize);
                (
                    Form::Oscillator {
                        hn: hn.to_float(),
                        dhn: hn.derivative().to_float(),
                    },
                    oscillator_prefactor(n),
                )
            }
        };
        Eigenstate {
            state,
            sys,
            form,
            prefactor,
            scale: 1.0,
            diagnostic: None,
        }
    }

    /// Closed form, with its norm measured by quadrature. A deviation beyond
    /// [`NORM_TOLERANCE`] rescales the state and leaves a diagnostic.
    pub fn new(state: WaveState, cfg: &QuadConfig) -> Result<Eigenstate> {
        let mut es = Eigenstate::closed_form(state);
        let norm = es.measure_norm(cfg)?;
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            es.scale = norm.sqrt().recip();
            es.diagnostic = Some(NormDiagnostic {
                measured_norm: norm,
            });
        }
        Ok(es)
    }

    pub fn state(&self) -> &WaveState {
        &self.state
    }

    pub fn energy(&self) -> f64 {
        self.state.energy()
    }

    pub fn diagnostic(&self) -> Option<NormDiagnostic> {
        self.diagnostic
    }

    pub fn system(&self) -> &RehoSystem {
        &self.sys
    }

    /// `int psi^2 dx` of the current (possibly rescaled) state.
    pub fn measure_norm(&self, cfg: &QuadConfig) -> Result<f64> {
        let breaks = self.breakpoints(cfg);
        integrate_real_line(|x| self.value(x).powi(2), &breaks, cfg).map(|o| o.value)
    }

    /// Integration breakpoints: the origin, plus the peak of a deformed
    /// ground state, which drifts into the left (or right) tail as
    /// `lambda -> 0` (or `-1`).
    pub fn breakpoints(&self, cfg: &QuadConfig) -> Vec<f64> {
        let mut out = vec![0.0];
        if let Form::IsoGround { .. } = self.form {
            out.push(self.peak_location(cfg.half_width));
        }
        out
    }

    /// Location of the maximum of `psi^2` on `[-half_width, half_width]`:
    /// coarse scan, then golden-section refinement.
    pub fn peak_location(&self, half_width: f64) -> f64 {
        let density = |x: f64| self.value(x).powi(2);
        let step = 0.05;
        let count = (2.0 * half_width / step).ceil() as usize;
        let (mut best_x, mut best) = (-half_width, f64::NEG_INFINITY);
        for i in 0..=count {
            let x = -half_width + i as f64 * step;
            let d = density(x);
            if d > best {
                best = d;
                best_x = x;
            }
        }
        let (mut a, mut b) = (best_x - step, best_x + step);
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut fc, mut fd) = (density(c), density(d));
        for _ in 0..60 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = density(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = density(d);
            }
        }
        0.5 * (a + b)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.value_and_derivative(x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.value_and_derivative(x).1
    }

    /// `(psi(x), psi'(x))`, both analytic.
    pub fn value_and_derivative(&self, x: f64) -> (f64, f64) {
        let sys = &*self.sys;
        let c = self.prefactor * self.scale;
        match &self.form {
            Form::RehoGround => {
                let psi = c * sys.ground(x);
                (psi, -sys.superpotential(x) * psi)
            }
            Form::IsoGround { lambda } => {
                let psi = c * sys.ground_over_shift(*lambda, x);
                let phi = sys.log_derivative(*lambda, x);
                (psi, -(sys.superpotential(x) + phi) * psi)
            }
            Form::Excited { parts, lambda } => {
                let gauss = (-0.5 * x * x).exp();
                if gauss == 0.0 {
                    return (0.0, 0.0);
                }
                let (h, dh, _) = sys.pseudo_derivatives(x);
                let y = parts.y.eval_compensated(x);
                let dy = parts.dy.eval_compensated(x);
                let ratio = y / h;
                let mut value = ratio;
                let mut slope = dy / h - ratio * dh / h - x * ratio;
                if let Some(lambda) = lambda {
                    let phi = sys.log_derivative(*lambda, x);
                    let hn = parts.hn.eval_compensated(x);
                    let dhn = parts.dhn.eval_compensated(x);
                    let dphi = -2.0 * sys.superpotential(x) * phi - phi * phi;
                    value += hn * phi;
                    slope += (dhn - x * hn) * phi + hn * dphi;
                }
                (c * gauss * value, c * gauss * slope)
            }
            Form::Oscillator { hn, dhn } => {
                let gauss = (-0.5 * x * x).exp();
                let h = hn.eval_compensated(x);
                let dh = dhn.eval_compensated(x);
                (c * gauss * h, c * gauss * (dh - x * h))
            }
        }
    }
}

pub fn psi_reho(m: i64, n: i64, x: f64) -> Result<f64> {
    Ok(Eigenstate::closed_form(WaveState::reho(m, n)?).value(x))
}

pub fn psi_iso(m: i64, lambda: f64, n: i64, x: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(Eigenstate::closed_form(WaveState::isospectral(m, lambda, n)?).value(x))
}

pub fn psi_pursey(m: i64, n: i64, x: f64) -> Result<f64> {
    Ok(Eigenstate::closed_form(WaveState::pursey(m, n)?).value(x))
}

pub fn psi_am(m: i64, n: i64, x: f64) -> Result<f64> {
    Ok(Eigenstate::closed_form(WaveState::abraham_moses(m, n)?).value(x))
}
