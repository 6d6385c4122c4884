//! Dispersion models ε(p) and their integrated density of states.
//!
//! All supported dispersions are isotropic and nondecreasing in |p|, so the
//! integrated density of states is the phase-space ball volume
//!
//! ```text
//! N(E) = (2πħ)^{-d} V_d · p_E^d,     ε(p_E) = E,
//! ```
//!
//! with `V_d` the unit-ball volume. For the ideal gas `ε(p) = p²/2m` this is
//! the closed form `Θ(E)/(d/2)! · (mE/2πħ²)^{d/2}`.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Γ(k/2) for positive integer k, by the half-integer recursion.
pub(crate) fn gamma_half(k: usize) -> f64 {
    debug_assert!(k >= 1);
    let mut value = if k % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut arg = if k % 2 == 0 { 2 } else { 1 };
    while arg < k {
        value *= arg as f64 / 2.0;
        arg += 2;
    }
    value
}

/// Volume of the unit ball in `d` dimensions.
pub fn unit_ball_volume(d: usize) -> f64 {
    std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half(d + 2)
}

/// Surface measure of the unit sphere S^{d-1} (so `ω_0 = 2`).
pub fn unit_sphere_area(d: usize) -> f64 {
    if d == 0 {
        return 2.0;
    }
    2.0 * std::f64::consts::PI.powf((d + 1) as f64 / 2.0) / gamma_half(d + 1)
}

/// The dispersion model variants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum DispersionKind {
    /// ε(p) = p²/(2m)
    IdealGas { mass: f64 },
    /// ε(p) = c·|p|^γ
    IsotropicPowerLaw { coefficient: f64, exponent: f64 },
    /// Radial samples (|p|, ε(|p|)), strictly increasing in both coordinates;
    /// interpolated by a monotone cubic.
    TabulatedIsotropic { samples: Vec<(f64, f64)> },
}

/// A dispersion relation together with its dimension and ħ convention.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dispersion {
    kind: DispersionKind,
    dim: usize,
    hbar: f64,
    #[serde(skip)]
    tabulated: Option<MonotoneCubic>,
}

impl Dispersion {
    pub fn new(kind: DispersionKind, dim: usize, hbar: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        match &kind {
            DispersionKind::IdealGas { mass } if !(*mass > 0.0) => {
                return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
            }
            DispersionKind::IsotropicPowerLaw { coefficient, exponent }
                if !(*coefficient > 0.0 && *exponent > 0.0) =>
            {
                return Err(Error::InvalidArgument(format!(
                    "power law requires c > 0 and gamma > 0, got c={coefficient}, gamma={exponent}"
                )));
            }
            DispersionKind::TabulatedIsotropic { samples } => {
                if samples.len() < 4 {
                    return Err(Error::InvalidArgument(
                        "tabulated dispersion needs at least 4 samples".into(),
                    ));
                }
                if samples[0].0 != 0.0 || samples[0].1 < 0.0 {
                    return Err(Error::InvalidArgument(
                        "tabulated dispersion must start at p = 0 with eps >= 0".into(),
                    ));
                }
                for w in samples.windows(2) {
                    if !(w[1].0 > w[0].0) || !(w[1].1 > w[0].1) {
                        return Err(Error::InvalidArgument(
                            "tabulated samples must be strictly increasing in p and eps".into(),
                        ));
                    }
                }
            }
            _ => {}
        }
        let tabulated = match &kind {
            DispersionKind::TabulatedIsotropic { samples } => {
                let ps: Vec<f64> = samples.iter().map(|s| s.0).collect();
                let es: Vec<f64> = samples.iter().map(|s| s.1).collect();
                Some(MonotoneCubic::new(&ps, &es))
            }
            _ => None,
        };
        Ok(Dispersion { kind, dim, hbar, tabulated })
    }

    /// Ideal gas `ε = p²/2m` with ħ = 1.
    pub fn ideal_gas(dim: usize, mass: f64) -> Result<Self> {
        Self::new(DispersionKind::IdealGas { mass }, dim, 1.0)
    }

    /// Power law `ε = c|p|^γ` with ħ = 1.
    pub fn power_law(dim: usize, coefficient: f64, exponent: f64) -> Result<Self> {
        Self::new(DispersionKind::IsotropicPowerLaw { coefficient, exponent }, dim, 1.0)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn kind(&self) -> &DispersionKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// All representable dispersions are isotropic; anisotropic input is
    /// rejected at the configuration boundary before one is constructed.
    pub fn is_isotropic(&self) -> bool {
        true
    }

    /// Radial dispersion ε(|p|).
    pub fn energy(&self, p: f64) -> f64 {
        let p = p.abs();
        match &self.kind {
            DispersionKind::IdealGas { mass } => 0.5 * p * p / mass,
            DispersionKind::IsotropicPowerLaw { coefficient, exponent } => {
                coefficient * p.powf(*exponent)
            }
            DispersionKind::TabulatedIsotropic { samples } => {
                let interp = self.tabulated.as_ref().expect("interpolant built at construction");
                let last = samples.last().unwrap();
                if p >= last.0 {
                    // quadratic continuation beyond the table keeps ε confining
                    let slope = interp.derivative(last.0).max(last.1 / last.0);
                    return last.1 + slope * (p - last.0) + (p - last.0).powi(2) * slope / last.0;
                }
                interp.value(p)
            }
        }
    }

    /// dε/dp at radial momentum `p >= 0`.
    pub fn energy_derivative(&self, p: f64) -> f64 {
        let p = p.abs();
        match &self.kind {
            DispersionKind::IdealGas { mass } => p / mass,
            DispersionKind::IsotropicPowerLaw { coefficient, exponent } => {
                coefficient * exponent * p.powf(exponent - 1.0)
            }
            DispersionKind::TabulatedIsotropic { samples } => {
                let interp = self.tabulated.as_ref().unwrap();
                let last = samples.last().unwrap();
                if p >= last.0 {
                    let slope = interp.derivative(last.0).max(last.1 / last.0);
                    return slope + 2.0 * (p - last.0) * slope / last.0;
                }
                interp.derivative(p)
            }
        }
    }

    /// Radial momentum with `ε(p) = e`, when it exists (`e` above the band
    /// bottom). Monotonicity guarantees uniqueness.
    pub fn radial_inverse(&self, e: f64) -> Option<f64> {
        match &self.kind {
            DispersionKind::IdealGas { mass } => {
                if e < 0.0 {
                    None
                } else {
                    Some((2.0 * mass * e).sqrt())
                }
            }
            DispersionKind::IsotropicPowerLaw { coefficient, exponent } => {
                if e < 0.0 {
                    None
                } else {
                    Some((e / coefficient).powf(1.0 / exponent))
                }
            }
            DispersionKind::TabulatedIsotropic { samples } => {
                let bottom = samples[0].1;
                if e < bottom {
                    return None;
                }
                // bisection on the monotone radial profile
                let mut lo = 0.0;
                let mut hi = samples.last().unwrap().0;
                while self.energy(hi) < e {
                    hi *= 2.0;
                    if hi > 1e12 {
                        return None;
                    }
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.energy(mid) < e {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * hi.max(1.0) {
                        break;
                    }
                }
                Some(0.5 * (lo + hi))
            }
        }
    }

    /// Fermi momentum `p_F` with `ε(p_F) = μ`, if the Fermi sea is nonempty.
    pub fn fermi_momentum(&self, mu: f64) -> Option<f64> {
        let p = self.radial_inverse(mu)?;
        if p > 0.0 {
            Some(p)
        } else {
            None
        }
    }

    /// Integrated density of states `N(E)`.
    pub fn integrated_dos(&self, e: f64) -> f64 {
        self.integrated_dos_in_dim(e, self.dim)
    }

    /// Derivative `N'(E)` — the density of states.
    pub fn integrated_dos_derivative(&self, e: f64) -> f64 {
        match &self.kind {
            DispersionKind::IdealGas { mass } => {
                if e <= 0.0 {
                    return 0.0;
                }
                let d = self.dim as f64;
                let base = mass / (2.0 * std::f64::consts::PI * self.hbar * self.hbar);
                base.powf(d / 2.0) * (d / 2.0) * e.powf(d / 2.0 - 1.0) / gamma_half(self.dim + 2)
            }
            _ => {
                // N'(E) = N(E) · d · p'(E)/p(E) with p'(E) = 1/ε'(p).
                match self.radial_inverse(e) {
                    None => 0.0,
                    Some(p) if p == 0.0 => 0.0,
                    Some(p) => {
                        let deriv = self.energy_derivative(p);
                        if deriv <= 0.0 {
                            return 0.0;
                        }
                        self.integrated_dos(e) * self.dim as f64 / (p * deriv)
                    }
                }
            }
        }
    }

    /// `N(E)` for the same radial dispersion restricted to `dim_override`
    /// dimensions. Appears in the Fermi-surface factor, which couples the
    /// `d`-dimensional dispersion to a `(d-1)`-dimensional state count.
    pub fn integrated_dos_in_dim(&self, e: f64, dim_override: usize) -> f64 {
        match &self.kind {
            DispersionKind::IdealGas { mass } => {
                if e <= 0.0 {
                    return 0.0;
                }
                let d = dim_override as f64;
                let x = mass * e / (2.0 * std::f64::consts::PI * self.hbar * self.hbar);
                x.powf(d / 2.0) / gamma_half(dim_override + 2)
            }
            _ => match self.radial_inverse(e) {
                None => 0.0,
                Some(p) => {
                    let d = dim_override as f64;
                    unit_ball_volume(dim_override)
                        * (p / (2.0 * std::f64::consts::PI * self.hbar)).powf(d)
                }
            },
        }
    }
}

/// Monotone (Fritsch–Carlson) cubic Hermite interpolant. Preserves the
/// monotonicity of the data, so differentiating it never produces a
/// negative density of states.
#[derive(Debug, Clone)]
pub(crate) struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        assert!(n >= 2 && n == ys.len());
        let mut delta = vec![0.0; n - 1];
        for i in 0..n - 1 {
            delta[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        }
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            m[i] = if delta[i - 1] * delta[i] <= 0.0 {
                0.0
            } else {
                // harmonic mean weighted by interval lengths
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
            };
        }
        // Fritsch–Carlson limiter
        for i in 0..n - 1 {
            if delta[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
            } else {
                let a = m[i] / delta[i];
                let b = m[i + 1] / delta[i];
                let s = (a * a + b * b).sqrt();
                if s > 3.0 {
                    m[i] = 3.0 * a / s * delta[i];
                    m[i + 1] = 3.0 * b / s * delta[i];
                }
            }
        }
        MonotoneCubic { xs: xs.to_vec(), ys: ys.to_vec(), slopes: m }
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.ys[i] + d10 * self.slopes[i] + d01 * self.ys[i + 1] + d11 * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_half_values() {
        assert_relative_eq!(gamma_half(1), std::f64::consts::PI.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(gamma_half(2), 1.0, epsilon = 1e-15);
        assert_relative_eq!(gamma_half(3), 0.5 * std::f64::consts::PI.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(gamma_half(4), 1.0, epsilon = 1e-15);
        assert_relative_eq!(gamma_half(5), 0.75 * std::f64::consts::PI.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(gamma_half(8), 6.0, epsilon = 1e-15);
    }

    #[test]
    fn ideal_gas_idos_d1() {
        // N(1) = sqrt(2)/π for m = ħ = 1, d = 1
        let disp = Dispersion::ideal_gas(1, 1.0).unwrap();
        assert_relative_eq!(
            disp.integrated_dos(1.0),
            std::f64::consts::SQRT_2 / std::f64::consts::PI,
            epsilon = 1e-14
        );
        assert_eq!(disp.integrated_dos(-1.0), 0.0);
    }

    #[test]
    fn ideal_gas_idos_d3() {
        // N(1) = (1/Γ(5/2)) (2π)^{-3/2}
        let disp = Dispersion::ideal_gas(3, 1.0).unwrap();
        let expect = 1.0 / gamma_half(5) / (2.0 * std::f64::consts::PI).powf(1.5);
        assert_relative_eq!(disp.integrated_dos(1.0), expect, epsilon = 1e-14);
        assert_relative_eq!(expect, 0.047771, epsilon = 1e-6);
    }

    #[test]
    fn idos_derivative_consistent_with_finite_difference() {
        for disp in [
            Dispersion::ideal_gas(1, 1.0).unwrap(),
            Dispersion::ideal_gas(3, 2.0).unwrap(),
            Dispersion::power_law(2, 0.7, 3.0).unwrap(),
        ] {
            for e in [0.5, 1.0, 4.0] {
                let h = 1e-6 * e;
                let fd = (disp.integrated_dos(e + h) - disp.integrated_dos(e - h)) / (2.0 * h);
                assert_relative_eq!(disp.integrated_dos_derivative(e), fd, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn power_law_reduces_to_ideal_gas() {
        let ig = Dispersion::ideal_gas(2, 1.0).unwrap();
        let pl = Dispersion::power_law(2, 0.5, 2.0).unwrap();
        for e in [0.3, 1.0, 7.0] {
            assert_relative_eq!(ig.integrated_dos(e), pl.integrated_dos(e), max_relative = 1e-13);
        }
    }

    #[test]
    fn tabulated_matches_sampled_ideal_gas() {
        let samples: Vec<(f64, f64)> = (0..200).map(|i| {
            let p = i as f64 * 0.05;
            (p, 0.5 * p * p)
        }).collect();
        let tab = Dispersion::new(DispersionKind::TabulatedIsotropic { samples }, 1, 1.0).unwrap();
        let ig = Dispersion::ideal_gas(1, 1.0).unwrap();
        for e in [0.2, 1.0, 3.5] {
            assert_relative_eq!(tab.integrated_dos(e), ig.integrated_dos(e), max_relative = 1e-6);
            assert_relative_eq!(
                tab.integrated_dos_derivative(e),
                ig.integrated_dos_derivative(e),
                max_relative = 1e-4
            );
        }
        assert_relative_eq!(tab.radial_inverse(2.0).unwrap(), 2.0, max_relative = 1e-8);
    }

    #[test]
    fn idos_nondecreasing() {
        let disp = Dispersion::power_law(3, 1.3, 1.5).unwrap();
        let mut prev = 0.0;
        for i in 0..100 {
            let e = i as f64 * 0.1;
            let n = disp.integrated_dos(e);
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn monotone_cubic_stays_monotone() {
        // data with a sharp knee that a plain cubic spline would overshoot
        let xs = [0.0, 1.0, 1.1, 2.0, 3.0];
        let ys = [0.0, 0.1, 2.0, 2.1, 2.2];
        let interp = MonotoneCubic::new(&xs, &ys);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=300 {
            let x = 3.0 * i as f64 / 300.0;
            let v = interp.value(x);
            assert!(v >= prev - 1e-12, "x={x}");
            assert!(interp.derivative(x) >= -1e-12);
            prev = v;
        }
    }
}
