//! Quadrature building blocks: Gauss–Legendre panel rules, an adaptive
//! Gauss–Kronrod integrator with user breakpoints, and a progressive
//! tanh-sinh (double-exponential) rule for endpoint-singular integrands.

use crate::{Error, Result};
use std::sync::OnceLock;

/// A Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss-Legendre order must be at least 2");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over `[a, b]` with `npanels` equal panels of this rule.
    pub fn integrate_panels<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, npanels: usize) -> f64 {
        let h = (b - a) / npanels as f64;
        let mut total = 0.0;
        for k in 0..npanels {
            let lo = a + k as f64 * h;
            let mid = lo + 0.5 * h;
            let half = 0.5 * h;
            let mut acc = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += w * f(mid + half * x);
            }
            total += half * acc;
        }
        total
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared fixed-order rules.
pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

pub fn gl10() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(10))
}

// 21-point Gauss-Kronrod pair (10-point Gauss embedded), standard abscissae.
#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
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
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
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

/// One 21-point Gauss-Kronrod evaluation over `[a, b]`.
/// Returns `(integral, error_estimate)`.
fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_kronrod = fc * WGK21[10];
    let mut res_gauss = 0.0;
    let mut res_abs = res_kronrod.abs();
    let mut fv = [0.0f64; 21];
    fv[10] = fc;
    for j in 0..10 {
        let x = half * XGK21[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[20 - j] = f2;
        let sum = f1 + f2;
        res_kronrod += WGK21[j] * sum;
        res_abs += WGK21[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG10[j / 2] * sum;
        }
    }
    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK21[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK21[j] * ((fv[j] - mean).abs() + (fv[20 - j] - mean).abs());
    }
    let value = res_kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// `breakpoints` seeds the subdivision with known structure (kinks, narrow
/// features) so the bisection does not have to discover it; points outside
/// `(a, b)` are ignored. The integration stops when the summed error estimate
/// drops below `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive_gk<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    const MAX_INTERVALS: usize = 4000;
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let mut edges: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| *x > a && *x < b && x.is_finite())
        .collect();
    edges.push(a);
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();

    let mut intervals = Vec::with_capacity(MAX_INTERVALS);
    for w in edges.windows(2) {
        let (value, error) = qk21(&f, w[0], w[1]);
        intervals.push(Interval { a: w[0], b: w[1], value, error });
    }

    loop {
        let total: f64 = intervals.iter().map(|i| i.value).sum();
        let err: f64 = intervals.iter().map(|i| i.error).sum();
        let target = abs_tol.max(rel_tol * total.abs());
        if err <= target {
            return Ok(QuadResult { value: total, error: err });
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureNonconvergence { achieved: err, requested: target });
        }
        // Split the interval with the largest error estimate.
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.error.partial_cmp(&y.error).unwrap())
            .unwrap();
        let Interval { a: ia, b: ib, .. } = intervals[worst];
        let mid = 0.5 * (ia + ib);
        if mid <= ia || mid >= ib {
            // Interval at floating-point resolution; accept what we have.
            let total: f64 = intervals.iter().map(|i| i.value).sum();
            let err: f64 = intervals.iter().map(|i| i.error).sum();
            return Ok(QuadResult { value: total, error: err });
        }
        let (v1, e1) = qk21(&f, ia, mid);
        let (v2, e2) = qk21(&f, mid, ib);
        intervals[worst] = Interval { a: ia, b: mid, value: v1, error: e1 };
        intervals.push(Interval { a: mid, b: ib, value: v2, error: e2 });
    }
}

/// Tanh-sinh rule specialized to integrals of the form
/// `∫₀¹ n(λ) / (λ(1-λ)) dλ`.
///
/// Under `λ(x) = 1/(1 + e^{-π sinh x})` the Jacobian is
/// `dλ = π cosh(x) λ(1-λ) dx`, so the endpoint denominator cancels exactly
/// and the transformed integrand is `π cosh(x) · n(λ(x))` — no division by
/// a vanishing quantity ever occurs. Nodes store `λ` and `1-λ` separately so
/// both stay accurate into the far tails.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinhNode {
    /// λ ∈ (0, 1)
    pub lambda: f64,
    /// 1 - λ, computed without cancellation
    pub lambda_comp: f64,
    /// π cosh(x) (multiply by the step h of the level in use)
    pub jacobian: f64,
    /// |x| of the node
    pub abscissa: f64,
}

fn tanh_sinh_node(x: f64) -> TanhSinhNode {
    let e = (-std::f64::consts::PI * x.sinh()).exp();
    TanhSinhNode {
        lambda: 1.0 / (1.0 + e),
        lambda_comp: e / (1.0 + e),
        jacobian: std::f64::consts::PI * x.cosh(),
        abscissa: x.abs(),
    }
}

/// Progressive tanh-sinh evaluation of `∫₀¹ n(λ)/(λ(1-λ)) dλ`.
///
/// `numerator` receives `(λ, 1-λ)`. Levels double the node density until two
/// consecutive levels agree within `tol` (absolute) or the level budget is
/// exhausted. `x_max` bounds the node range; `asinh(6/min(α,1))`-style values
/// cover algebraic endpoint decay `n ~ λ^α`.
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(numerator: F, tol: f64, x_max: f64) -> Result<QuadResult> {
    const MAX_LEVEL: usize = 10;
    let h0 = 0.5;
    // Level 0: nodes at multiples of h0.
    let n0 = (x_max / h0).ceil() as i64;
    let mut sum = 0.0;
    for j in -n0..=n0 {
        let node = tanh_sinh_node(j as f64 * h0);
        sum += node.jacobian * numerator(node.lambda, node.lambda_comp);
    }
    let mut value = sum * h0;
    let mut h = h0;
    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        // New nodes are the odd multiples of the new step.
        let n = (x_max / h).ceil() as i64;
        let mut new_sum = 0.0;
        let mut j = -n + (1 - (n % 2).abs()); // first odd index >= -n
        if j % 2 == 0 {
            j += 1;
        }
        while j <= n {
            let node = tanh_sinh_node(j as f64 * h);
            new_sum += node.jacobian * numerator(node.lambda, node.lambda_comp);
            j += 2;
        }
        let new_value = 0.5 * value + h * new_sum;
        let diff = (new_value - value).abs();
        value = new_value;
        if diff <= tol.max(4.0 * f64::EPSILON * value.abs()) {
            return Ok(QuadResult { value, error: diff });
        }
    }
    Err(Error::QuadratureNonconvergence {
        achieved: f64::NAN,
        requested: tol,
    })
}
