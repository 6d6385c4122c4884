//! Pointwise special functions of the theory: the Rényi entropy function
//! `h_α`, the Fermi function, and the two-point integrand `U_α`.
//!
//! `h_α : [0,1] → [0, ln 2]` is
//!
//! ```text
//! h_α(t) = (1-α)^{-1} ln[t^α + (1-t)^α]      (α ≠ 1)
//! h_1(t) = -t ln t - (1-t) ln(1-t)
//! ```
//!
//! with `h_α(0) = h_α(1) = 0`. The two-point function
//!
//! ```text
//! U_α(r,t) = ∫₀¹ dλ [h_α((1-λ)r + λt) - (1-λ)h_α(r) - λ h_α(t)] / (λ(1-λ))
//! ```
//!
//! is nonnegative and symmetric by concavity of `h_α`; it measures the
//! entropy mismatch between two occupations and drives the surface
//! coefficient in [`crate::boundary`].

use crate::quad::tanh_sinh;
use crate::{Error, Result};

/// Default clamping tolerance for occupations slightly outside `[0, 1]`.
/// Discretized operators leak spectrally by about this much.
pub const DEFAULT_CLAMP_TOL: f64 = 1e-9;

/// A validated Rényi index `α > 0`. `α = 1` selects the von Neumann forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenyiIndex(f64);

impl RenyiIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "Renyi index must be a positive finite real, got {alpha}"
            )));
        }
        Ok(RenyiIndex(alpha))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_von_neumann(self) -> bool {
        self.0 == 1.0
    }
}

/// The von Neumann index, `α = 1`.
pub const VON_NEUMANN: RenyiIndex = RenyiIndex(1.0);

/// An entropy value in `[0, ln 2]` (natural log base).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyValue(pub f64);

impl EntropyValue {
    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// `h_α(t)` for `t` already known to lie in `[0, 1]`.
///
/// Endpoints give exactly zero. Near the endpoints the `α = 1` branch uses
/// `ln1p` on the `(1-t)` term and the `α ≠ 1` branch evaluates
/// `ln1p(t^α + expm1(α ln1p(-t)))` so no cancellation occurs.
#[inline]
pub fn h_alpha_raw(alpha: f64, t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    if alpha == 1.0 {
        -t * t.ln() - (1.0 - t) * (-t).ln_1p()
    } else {
        // t^α + (1-t)^α - 1, with the second term through expm1.
        let sum_m1 = t.powf(alpha) + (alpha * (-t).ln_1p()).exp_m1();
        sum_m1.ln_1p() / (1.0 - alpha)
    }
}

/// `h_α` evaluated from the pair `(t, 1-t)`, each accurate on its own.
/// Used by the λ-quadrature where both values are carried exactly.
#[inline]
fn h_alpha_pair(alpha: f64, t: f64, t_comp: f64) -> f64 {
    if t <= 0.0 || t_comp <= 0.0 {
        return 0.0;
    }
    if alpha == 1.0 {
        -t * t.ln() - t_comp * t_comp.ln()
    } else {
        (t.powf(alpha) + t_comp.powf(alpha)).ln() / (1.0 - alpha)
    }
}

/// Second derivative `h_α''(t)` for `t ∈ (0, 1)`. Always negative.
pub fn h_alpha_second_derivative(alpha: f64, t: f64) -> f64 {
    if alpha == 1.0 {
        return -1.0 / (t * (1.0 - t));
    }
    let u = 1.0 - t;
    let s = t.powf(alpha) + u.powf(alpha);
    let s1 = alpha * (t.powf(alpha - 1.0) - u.powf(alpha - 1.0));
    let s2 = alpha * (alpha - 1.0) * (t.powf(alpha - 2.0) + u.powf(alpha - 2.0));
    (s2 * s - s1 * s1) / ((1.0 - alpha) * s * s)
}

/// `-h_α''(t) · t²(1-t)²`, stable for `t` arbitrarily close to the endpoints.
///
/// This is the combination that appears in the near-diagonal limit of the
/// surface integrand, where `h''` alone would overflow while the occupation
/// factors underflow.
pub fn curvature_density(alpha: f64, t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    if alpha == 1.0 {
        return t * (1.0 - t);
    }
    let u = 1.0 - t;
    let s = t.powf(alpha) + u.powf(alpha);
    // -h'' t²u² = [α t^α u² + α u^α t² - α(α-1)(t^α u² + u^α t²) ... ] grouped:
    // S2 t²u² = α(α-1)(t^α u² + u^α t²); S1² t²u² = α²(t^α u - u^α t)².
    let s2_tu = alpha * (alpha - 1.0) * (t.powf(alpha) * u * u + u.powf(alpha) * t * t);
    let s1_tu = alpha * (t.powf(alpha) * u - u.powf(alpha) * t);
    -(s2_tu * s - s1_tu * s1_tu) / ((1.0 - alpha) * s * s)
}

/// The Rényi entropy function with the default clamping tolerance.
pub fn renyi_entropy_function(alpha: RenyiIndex, t: f64) -> Result<EntropyValue> {
    renyi_entropy_clamped(alpha, t, DEFAULT_CLAMP_TOL)
}

/// The Rényi entropy function, clamping `t` into `[0, 1]` when it lies within
/// `clamp_tol` of the interval and rejecting it otherwise (an out-of-range
/// occupation signals an invalid eigenvalue upstream).
pub fn renyi_entropy_clamped(alpha: RenyiIndex, t: f64, clamp_tol: f64) -> Result<EntropyValue> {
    if !t.is_finite() || t < -clamp_tol || t > 1.0 + clamp_tol {
        return Err(Error::ClampViolation { value: t, tolerance: clamp_tol });
    }
    Ok(EntropyValue(h_alpha_raw(alpha.get(), t.clamp(0.0, 1.0))))
}

/// The Fermi function `f_T(E) = [1 + exp(E/T)]^{-1}`, `T > 0`.
///
/// The two exponential branches share the denominator `1 + e^{-|E|/T}`, so
/// `f_T(E) + f_T(-E) = 1` holds to rounding, and the tails underflow to exact
/// `0.0` / `1.0` only past the floating-point range.
#[inline]
pub fn fermi_function(temperature: f64, energy: f64) -> f64 {
    debug_assert!(temperature > 0.0, "Fermi function requires T > 0");
    fermi_scaled(energy / temperature)
}

/// `1/(1 + e^x)` on the already-scaled argument.
#[inline]
pub fn fermi_scaled(x: f64) -> f64 {
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Derivative `f_T'(E) = -f(1-f)/T` expressed through the function value.
#[inline]
pub fn fermi_derivative_scaled(x: f64) -> f64 {
    let f = fermi_scaled(x);
    -f * (1.0 - f)
}

/// The two-point entropy integrand `U_α(r, t)` to absolute accuracy `tol`.
///
/// The λ-integrand has removable endpoint singularities (the numerator
/// vanishes there); the tanh-sinh substitution in [`crate::quad::tanh_sinh`]
/// absorbs the `1/(λ(1-λ))` denominator analytically, so points with `r` or
/// `t` at or near `{0, 1}` need no special casing. Exactly zero at `r = t`.
pub fn u_alpha(alpha: RenyiIndex, r: f64, t: f64, tol: f64) -> Result<f64> {
    u_alpha_clamped(alpha, r, t, tol, DEFAULT_CLAMP_TOL)
}

/// [`u_alpha`] with an explicit occupation clamping tolerance.
pub fn u_alpha_clamped(
    alpha: RenyiIndex,
    r: f64,
    t: f64,
    tol: f64,
    clamp_tol: f64,
) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    for v in [r, t] {
        if !v.is_finite() || v < -clamp_tol || v > 1.0 + clamp_tol {
            return Err(Error::ClampViolation { value: v, tolerance: clamp_tol });
        }
    }
    let r = r.clamp(0.0, 1.0);
    let t = t.clamp(0.0, 1.0);
    if r == t {
        return Ok(0.0);
    }
    Ok(u_alpha_raw(alpha.get(), r, t, tol)?.value)
}

/// Inner evaluation used by the hot paths; assumes `r, t ∈ [0, 1]`, `r ≠ t`.
pub(crate) fn u_alpha_raw(alpha: f64, r: f64, t: f64, tol: f64) -> Result<crate::quad::QuadResult> {
    let hr = h_alpha_pair(alpha, r, 1.0 - r);
    let ht = h_alpha_pair(alpha, t, 1.0 - t);
    // Node range wide enough for the slowest endpoint decay n(λ) ~ λ^min(α,1).
    let x_max = (6.0 / alpha.min(1.0)).asinh().max(4.5).min(7.0);
    let numerator = |lam: f64, lam_comp: f64| {
        let arg = lam_comp * r + lam * t;
        let arg_comp = lam_comp * (1.0 - r) + lam * (1.0 - t);
        h_alpha_pair(alpha, arg, arg_comp) - lam_comp * hr - lam * ht
    };
    tanh_sinh(numerator, tol, x_max)
}

/// `U_α` in the near-diagonal regime: `U_α(m-e, m+e) ≈ -h_α''(m)·(2e)²/2`
/// with midpoint accuracy `O(e⁴)`. Expressed through [`curvature_density`]
/// divided out by the occupation factors, which the caller supplies as the
/// ratio `(r - t)/(m(1-m))` to keep the product finite in the far tails.
#[inline]
pub(crate) fn u_alpha_near_diagonal(alpha: f64, midpoint: f64, scaled_gap: f64) -> f64 {
    0.5 * curvature_density(alpha, midpoint) * scaled_gap * scaled_gap
}
