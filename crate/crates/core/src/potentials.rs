//! Closed-form potentials of the rationally extended oscillator and its
//! one-parameter isospectral deformation.
//!
//! Units are `hbar = 2 mass = 1`. The Hamiltonian is `-d^2/dx^2 + V - eps`
//! with factorization energy `eps = -2m - 1`.
//!
//! All per-codimension data (floating copies of the pseudo-Hermite polynomial
//! and its derivatives, the tail polynomial of the cumulative ground-state
//! probability) lives in a [`RehoSystem`] that is built once per `m` and
//! then shared read-only.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectation::quadrature::{integrate_interval, QuadConfig};
use crate::polynomials::{pseudo_hermite_raw, Codimension, FloatPoly, Polynomial};

/// Which member of the potential family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKind {
    Reho,
    /// SUSY partner `W^2 + W' + eps`; equals the plain oscillator `x^2`.
    Partner,
    Isospectral {
        lambda: f64,
    },
    /// `lambda = 0` limit; the ground state is lost.
    Pursey,
    /// `lambda = -1` limit; the ground state is lost.
    AbrahamMoses,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    kind: FamilyKind,
    m: Codimension,
}

/// Accepts `lambda > 0` or `lambda < -1`.
pub fn check_lambda(lambda: f64) -> Result<f64> {
    if lambda.is_finite() && (lambda > 0.0 || lambda < -1.0) {
        Ok(lambda)
    } else {
        Err(Error::SingularLambda(lambda))
    }
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, m: i64) -> Result<Self> {
        if let FamilyKind::Isospectral { lambda } = kind {
            check_lambda(lambda)?;
        }
        Ok(FamilySpec {
            kind,
            m: Codimension::new(m)?,
        })
    }

    pub fn reho(m: i64) -> Result<Self> {
        Self::new(FamilyKind::Reho, m)
    }

    pub fn partner(m: i64) -> Result<Self> {
        Self::new(FamilyKind::Partner, m)
    }

    pub fn isospectral(m: i64, lambda: f64) -> Result<Self> {
        Self::new(FamilyKind::Isospectral { lambda }, m)
    }

    pub fn pursey(m: i64) -> Result<Self> {
        Self::new(FamilyKind::Pursey, m)
    }

    pub fn abraham_moses(m: i64) -> Result<Self> {
        Self::new(FamilyKind::AbrahamMoses, m)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn m(&self) -> Codimension {
        self.m
    }

    /// Deformation parameter: the family's `lambda`, 0 for Pursey, -1 for AM.
    pub fn lambda(&self) -> Option<f64> {
        match self.kind {
            FamilyKind::Isospectral { lambda } => Some(lambda),
            FamilyKind::Pursey => Some(0.0),
            FamilyKind::AbrahamMoses => Some(-1.0),
            FamilyKind::Reho | FamilyKind::Partner => None,
        }
    }

    /// Short identifier used in file output.
    pub fn label(&self) -> &'static str {
        match self.kind {
            FamilyKind::Reho => "reho",
            FamilyKind::Partner => "partner",
            FamilyKind::Isospectral { .. } => "iso",
            FamilyKind::Pursey => "pursey",
            FamilyKind::AbrahamMoses => "am",
        }
    }

    /// Lowest valid quantum number: -1 where the zero-energy ground state exists.
    pub fn lowest_index(&self) -> i64 {
        match self.kind {
            FamilyKind::Reho | FamilyKind::Isospectral { .. } => -1,
            FamilyKind::Partner | FamilyKind::Pursey | FamilyKind::AbrahamMoses => 0,
        }
    }

    pub fn factorization_energy(&self) -> f64 {
        factorization_energy(self.m)
    }

    pub fn system(&self) -> Arc<RehoSystem> {
        RehoSystem::get(self.m)
    }

    /// Potential `V(x)` of this family member.
    pub fn potential(&self, x: f64) -> f64 {
        self.potential_in(&self.system(), x)
    }

    /// [`FamilySpec::potential`] with the per-codimension data already at hand,
    /// for loops over many points.
    pub fn potential_in(&self, sys: &RehoSystem, x: f64) -> f64 {
        debug_assert_eq!(sys.m(), self.m);
        match self.kind {
            FamilyKind::Reho => sys.potential(x),
            FamilyKind::Partner => sys.partner_potential(x),
            FamilyKind::Isospectral { lambda } => sys.isospectral_potential(lambda, x),
            FamilyKind::Pursey => sys.isospectral_potential(0.0, x),
            FamilyKind::AbrahamMoses => sys.isospectral_potential(-1.0, x),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::Isospectral { lambda } => write!(f, "iso(m={}, lambda={lambda})", self.m),
            _ => write!(f, "{}(m={})", self.label(), self.m),
        }
    }
}

pub fn factorization_energy(m: Codimension) -> f64 {
    -2.0 * f64::from(m.get()) - 1.0
}

/// Per-codimension data, immutable after construction.
#[derive(Debug)]
pub struct RehoSystem {
    m: Codimension,
    pseudo: Polynomial,
    tail_exact: Vec<BigRational>,
    h: FloatPoly,
    dh: FloatPoly,
    d2h: FloatPoly,
    tail: FloatPoly,
    /// `ln sqrt(2^m m! / sqrt(pi))`
    ln_norm: f64,
}

/// Below this fraction of the erfc term the closed form of the lower tail is
/// dominated by cancellation and the direct tail integral is used instead.
const CANCELLATION_LIMIT: f64 = 1e-3;
/// `erfc` underflows past this argument.
const ERFC_RANGE: f64 = 26.0;

fn system_cache() -> &'static Mutex<HashMap<Codimension, Arc<RehoSystem>>> {
    static CACHE: OnceLock<Mutex<HashMap<Codimension, Arc<RehoSystem>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

impl RehoSystem {
    /// Shared, frozen system for codimension `m`.
    pub fn get(m: Codimension) -> Arc<RehoSystem> {
        let mut cache = system_cache().lock().unwrap_or_else(|e| e.into_inner());
        cache
            .entry(m)
            .or_insert_with(|| Arc::new(RehoSystem::build(m)))
            .clone()
    }

    pub fn for_m(m: i64) -> Result<Arc<RehoSystem>> {
        Ok(Self::get(Codimension::new(m)?))
    }

    fn build(m: Codimension) -> RehoSystem {
        let pseudo = pseudo_hermite_raw(m.as_usize());
        let d1 = pseudo.derivative();
        let d2 = d1.derivative();
        let tail_exact = tail_polynomial(&pseudo, m);
        let tail = FloatPoly::new(
            tail_exact
                .iter()
                .map(|c| c.to_f64().unwrap_or(f64::NAN))
                .collect(),
        );
        let mf = f64::from(m.get());
        let ln_norm = 0.5 * (mf * 2f64.ln() + ln_factorial(m.get()) - 0.5 * PI.ln());
        RehoSystem {
            m,
            h: pseudo.to_float(),
            dh: d1.to_float(),
            d2h: d2.to_float(),
            pseudo,
            tail_exact,
            tail,
            ln_norm,
        }
    }

    pub fn m(&self) -> Codimension {
        self.m
    }

    pub fn pseudo_hermite(&self) -> &Polynomial {
        &self.pseudo
    }

    /// Coefficients of `S` in `I(x) = erfc(-x)/2 + exp(-x^2) S(x) / (sqrt(pi) P_m(x))`.
    pub fn tail_coefficients(&self) -> &[BigRational] {
        &self.tail_exact
    }

    pub fn factorization_energy(&self) -> f64 {
        factorization_energy(self.m)
    }

    /// Normalization of the ground state, `(2^m m! / sqrt(pi))^(1/2)`.
    pub fn ground_norm(&self) -> f64 {
        self.ln_norm.exp()
    }

    /// `(P, P', P'')` at `x`.
    #[inline]
    pub fn pseudo_derivatives(&self, x: f64) -> (f64, f64, f64) {
        (self.h.eval(x), self.dh.eval(x), self.d2h.eval(x))
    }

    /// Ground state `psi_0(x) = N exp(-x^2/2) / P_m(x)`.
    #[inline]
    pub fn ground(&self, x: f64) -> f64 {
        (self.ln_norm - 0.5 * x * x).exp() / self.h.eval(x)
    }

    #[inline]
    pub fn ground_sq(&self, x: f64) -> f64 {
        let g = self.ground(x);
        g * g
    }

    /// `W = -(ln psi_0)' = x + P'/P`.
    pub fn superpotential(&self, x: f64) -> f64 {
        x + self.dh.eval(x) / self.h.eval(x)
    }

    pub fn superpotential_derivative(&self, x: f64) -> f64 {
        let (h, dh, d2h) = self.pseudo_derivatives(x);
        let r = dh / h;
        1.0 + d2h / h - r * r
    }

    /// `V^-(x) = x^2 - 2 [P''/P - (P'/P)^2 + 1]`.
    pub fn potential(&self, x: f64) -> f64 {
        let (h, dh, d2h) = self.pseudo_derivatives(x);
        let r = dh / h;
        x * x - 2.0 * (d2h / h - r * r + 1.0)
    }

    /// `V^+ = W^2 + W' + eps`.
    pub fn partner_potential(&self, x: f64) -> f64 {
        let w = self.superpotential(x);
        w * w + self.superpotential_derivative(x) + self.factorization_energy()
    }

    /// `I(x)`, the ground-state probability on `(-inf, x]`.
    pub fn cumulative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            self.lower_tail(x)
        } else {
            1.0 - self.lower_tail(-x)
        }
    }

    /// `1 - I(x)`, accurate in relative terms for large positive `x`.
    pub fn cumulative_complement(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.lower_tail(-x)
        } else {
            1.0 - self.lower_tail(x)
        }
    }

    /// Closed form of `I(x)` for `x <= 0` when free of cancellation.
    fn lower_tail_closed(&self, x: f64) -> Option<f64> {
        let t = -x;
        if t >= ERFC_RANGE {
            return None;
        }
        let a = 0.5 * libm::erfc(t);
        if self.m.get() == 0 {
            return Some(a);
        }
        let b = (-t * t).exp() * self.tail.eval(t) / (PI.sqrt() * self.h.eval(t));
        let diff = a - b;
        (diff > CANCELLATION_LIMIT * a).then_some(diff)
    }

    fn lower_tail(&self, x: f64) -> f64 {
        debug_assert!(x <= 0.0);
        match self.lower_tail_closed(x) {
            Some(v) => v,
            None => self.tail_ratio_by_quadrature(x) * self.ground_sq(x),
        }
    }

    /// `I(x) / psi_0(x)^2` for `x <= 0`; finite even where both underflow.
    pub fn lower_ratio(&self, x: f64) -> f64 {
        debug_assert!(x <= 0.0);
        if let Some(v) = self.lower_tail_closed(x) {
            let g2 = self.ground_sq(x);
            if g2 > 1e-250 {
                return v / g2;
            }
        }
        self.tail_ratio_by_quadrature(x)
    }

    /// `int_0^inf exp(2xs - s^2) (P(x)/P(x-s))^2 ds`, which equals `I(x)/psi_0(x)^2`.
    fn tail_ratio_by_quadrature(&self, x: f64) -> f64 {
        let t = -x;
        let hx = self.h.eval(x);
        let s_max = -t + (t * t + 45.0).sqrt();
        let integrand = |s: f64| {
            let q = hx / self.h.eval(x - s);
            (-(2.0 * t + s) * s).exp() * q * q
        };
        let cfg = QuadConfig {
            half_width: s_max,
            rel_tol: 5e-14,
            abs_tol: 1e-300,
            max_depth: 40,
        };
        integrate_interval(integrand, 0.0, s_max, &[], &cfg)
            .map(|o| o.value)
            .unwrap_or(f64::NAN)
    }

    /// Independent route to `I(x)`: direct quadrature of `psi_0^2`.
    pub fn cumulative_by_quadrature(&self, x: f64, cfg: &QuadConfig) -> Result<f64> {
        let lo = -cfg.half_width.max(x.abs() + 12.0);
        if x <= lo {
            return Ok(0.0);
        }
        let breaks = [0.0];
        integrate_interval(|t| self.ground_sq(t), lo, x, &breaks, cfg).map(|o| o.value)
    }

    /// `phi = d/dx ln(I + lambda) = psi_0^2 / (I + lambda)`.
    ///
    /// Valid for `lambda >= 0` or `lambda <= -1`; both Pursey and AM limits
    /// are included. Values in `(-1, 0)` produce a pole.
    pub fn log_derivative(&self, lambda: f64, x: f64) -> f64 {
        if lambda <= -1.0 {
            // I(x) - 1 - mu = -(I(-x) + mu) with mu = -1 - lambda.
            return -self.log_derivative(-1.0 - lambda, -x);
        }
        if x <= 0.0 {
            let r = self.lower_ratio(x);
            if lambda == 0.0 {
                return 1.0 / r;
            }
            let g2 = self.ground_sq(x);
            if g2 == 0.0 {
                return 0.0;
            }
            1.0 / (r + lambda / g2)
        } else {
            self.ground_sq(x) / (1.0 - self.lower_tail(-x) + lambda)
        }
    }

    /// `d^2/dx^2 ln(I + lambda) = -2 W phi - phi^2`, using `I' = psi_0^2`.
    pub fn log_second_derivative(&self, lambda: f64, x: f64) -> f64 {
        let phi = self.log_derivative(lambda, x);
        -2.0 * self.superpotential(x) * phi - phi * phi
    }

    /// `psi_0(x) / (I(x) + lambda)` without forming either factor where it underflows.
    pub fn ground_over_shift(&self, lambda: f64, x: f64) -> f64 {
        if lambda <= -1.0 {
            return -self.ground_over_shift(-1.0 - lambda, -x);
        }
        let g = self.ground(x);
        if x <= 0.0 {
            if g == 0.0 {
                return 0.0;
            }
            1.0 / (self.lower_ratio(x) * g + lambda / g)
        } else {
            g / (1.0 - self.lower_tail(-x) + lambda)
        }
    }

    /// `V^- - 2 (ln(I + lambda))''`, expanded as `V^- + 4 W phi + 2 phi^2`.
    pub fn isospectral_potential(&self, lambda: f64, x: f64) -> f64 {
        let phi = self.log_derivative(lambda, x);
        self.potential(x) + 4.0 * self.superpotential(x) * phi + 2.0 * phi * phi
    }
}

/// Solves `2^m m! = P^2 + (S' - 2xS) P - S P'` for `S` of degree `m - 1`,
/// which makes `erfc(-x)/2 + exp(-x^2) S / (sqrt(pi) P)` an antiderivative of
/// `psi_0^2` vanishing at `-inf`.
fn tail_polynomial(pseudo: &Polynomial, m: Codimension) -> Vec<BigRational> {
    let m = m.as_usize();
    if m == 0 {
        return Vec::new();
    }
    let p: Vec<BigRational> = (0..=m)
        .map(|k| BigRational::from_integer(pseudo.coeff(k)))
        .collect();
    let dp: Vec<BigRational> = (1..=m)
        .map(|k| &p[k] * BigRational::from_integer(BigInt::from(k)))
        .collect();
    let lead = p[m].clone();
    let mut s = vec![BigRational::zero(); m];

    let residual = |s: &[BigRational]| -> Vec<BigRational> {
        let mut out = rat_mul(&p, &p);
        let ds: Vec<BigRational> = (1..s.len())
            .map(|k| &s[k] * BigRational::from_integer(BigInt::from(k)))
            .collect();
        let mut two_x_s = vec![BigRational::zero()];
        two_x_s.extend(s.iter().map(|c| c * BigRational::from_integer(BigInt::from(2))));
        let bracket = rat_sub(&ds, &two_x_s);
        out = rat_add(&out, &rat_mul(&bracket, &p));
        rat_sub(&out, &rat_mul(s, &dp))
    };

    let two = BigRational::from_integer(BigInt::from(2));
    for j in 0..m {
        let k = m - 1 - j;
        let degree = 2 * m - j;
        let r = residual(&s);
        let coeff = r.get(degree).cloned().unwrap_or_else(BigRational::zero);
        s[k] = coeff / (&two * &lead);
    }

    let r = residual(&s);
    let target: BigInt = (1..=m).fold(BigInt::from(1) << m, |acc, k| acc * BigInt::from(k));
    debug_assert!(r
        .iter()
        .enumerate()
        .all(|(k, c)| if k == 0 { *c == BigRational::from_integer(target.clone()) } else { c.is_zero() }));
    s
}

fn rat_add(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(k).cloned().unwrap_or_else(BigRational::zero);
            x + y
        })
        .collect()
}

fn rat_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let neg: Vec<BigRational> = b.iter().map(|c| -c).collect();
    rat_add(a, &neg)
}

fn rat_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn reho_potential(m: i64, x: f64) -> Result<f64> {
    Ok(RehoSystem::for_m(m)?.potential(x))
}

pub fn superpotential(m: i64, x: f64) -> Result<f64> {
    Ok(RehoSystem::for_m(m)?.superpotential(x))
}

pub fn partner_potential(m: i64, x: f64) -> Result<f64> {
    Ok(RehoSystem::for_m(m)?.partner_potential(x))
}

/// Cumulative ground-state probability `I_m(x)`, in `[0, 1]`.
pub fn integral_i(m: i64, x: f64) -> Result<f64> {
    Ok(RehoSystem::for_m(m)?.cumulative(x))
}

pub fn isospectral_potential(m: i64, lambda: f64, x: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(RehoSystem::for_m(m)?.isospectral_potential(lambda, x))
}

pub fn pursey_potential(m: i64, x: f64) -> Result<f64> {
    Ok(RehoSystem::for_m(m)?.isospectral_potential(0.0, x))
}

pub fn am_potential(m: i64, x: f64) -> Result<f64> {
    Ok(RehoSystem::for_m(m)?.isospectral_potential(-1.0, x))
}
