//! Globally adaptive 21-point Gauss-Kronrod quadrature on a truncated real line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation and tolerance settings for real-line integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Integrals over the real line are evaluated on `[-half_width, half_width]`.
    pub half_width: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            half_width: 12.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 60,
        }
    }
}

impl QuadConfig {
    /// Classical turning point of a state with energy `energy` plus a margin
    /// for the Gaussian tail.
    pub fn for_energy(energy: f64) -> Self {
        QuadConfig {
            half_width: (2.0 * energy.max(0.0)).sqrt() + 12.0,
            ..QuadConfig::default()
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.half_width) || !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(Error::InvalidConfig(format!(
                "quadrature settings must be positive and finite: {self:?}"
            )));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidConfig("max_depth must be at least 1".into()));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    /// Truncation actually used, after any tail-driven widening.
    pub half_width: f64,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Hard cap on subintervals, independent of depth.
const MAX_SEGMENTS: usize = 20_000;
/// Tail-driven widening steps before giving up.
/// Widest initial panel on the real line.
pub const PANEL_WIDTH: f64 = 1.0;
const MAX_WIDENINGS: usize = 10;
const WIDEN_STEP: f64 = 4.0;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrates `f` over `[a, b]`, splitting first at any `breaks` inside the interval.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadOutcome> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidConfig(format!("bad interval [{a}, {b}]")));
    }
    let mut points: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > a && *p < b)
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut edges = Vec::with_capacity(points.len() + 2);
    edges.push(a);
    edges.extend(points);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in edges.windows(2) {
        let (value, error) = gauss_kronrod_21(&f, w[0], w[1]);
        evaluations += 21;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
            depth: 0,
        });
    }

    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence {
                estimate: value,
                error,
                tolerance: cfg.abs_tol,
            });
        }
        let tolerance = cfg.tolerance(value);
        if error <= tolerance {
            return Ok(QuadOutcome {
                value,
                error,
                evaluations,
                half_width: 0.5 * (b - a),
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        let exhausted = worst.depth >= cfg.max_depth
            || heap.len() + 2 > MAX_SEGMENTS
            || !(mid > worst.a && mid < worst.b);
        if exhausted {
            return Err(Error::NonConvergence {
                estimate: value,
                error,
                tolerance,
            });
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = gauss_kronrod_21(&f, lo, hi);
            evaluations += 21;
            heap.push(Segment {
                a: lo,
                b: hi,
                value: v,
                error: e,
                depth: worst.depth + 1,
            });
        }
    }
}

/// Integrates over the truncated real line `[-L, L]`.
///
/// The line is first cut into panels no wider than [`PANEL_WIDTH`], so that
/// a peak narrower than one panel is still sampled. The truncation is accepted only once the Gaussian-tail estimate
/// `(|f(-L)| + |f(L)|) / L` of the discarded mass is below `abs_tol`;
/// otherwise `L` is widened.
pub fn integrate_real_line<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadOutcome> {
    cfg.validate()?;
    let mut half_width = cfg.half_width;
    for _ in 0..=MAX_WIDENINGS {
        let tail = (f(-half_width).abs() + f(half_width).abs()) / half_width;
        if tail.is_finite() && tail < cfg.abs_tol {
            let count = (2.0 * half_width / PANEL_WIDTH).ceil() as usize;
            let mut all: Vec<f64> = (1..count)
                .map(|i| -half_width + 2.0 * half_width * i as f64 / count as f64)
                .collect();
            all.extend_from_slice(breaks);
            return integrate_interval(&f, -half_width, half_width, &all, cfg);
        }
        half_width += WIDEN_STEP;
    }
    Err(Error::NonConvergence {
        estimate: f64::NAN,
        error: (f(-half_width).abs() + f(half_width).abs()) / half_width,
        tolerance: cfg.abs_tol,
    })
}

/// Value of the real-line integral of `f`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, cfg: &QuadConfig) -> Result<f64> {
    integrate_real_line(f, &[], cfg).map(|o| o.value)
}
