//! Fermi–Dirac thermodynamics: pressure, particle density, Rényi entropy
//! densities, chemical-potential inversion, and the low-/high-temperature
//! asymptotic reports.
//!
//! Energy integrals are evaluated in the radial momentum variable, where the
//! integrands are smooth for every supported dispersion:
//!
//! ```text
//! p(T,μ)   = V_d (2πħ)^{-d} ∫ p^d ε'(p) f_T(ε(p)-μ) dp
//! ρ(T,μ)   = ω_{d-1} (2πħ)^{-d} ∫ p^{d-1} f_T(ε(p)-μ) dp
//! s_α(T)   = ω_{d-1} (2πħ)^{-d} ∫ p^{d-1} h_α(f_T(ε(p)-μ)) dp
//! ```
//!
//! For `α ≠ 1` the entropy density also satisfies the pressure identity
//! `s_α(T) = α/((α-1)T) · [p(T) - p(T/α)]`, which
//! [`entropy_density_via_pressure`] evaluates as an independent route.

use crate::dispersion::{unit_ball_volume, unit_sphere_area, Dispersion};
use crate::entropy::{fermi_scaled, h_alpha_raw, RenyiIndex};
use crate::fit;
use crate::quad::adaptive_gk;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Energy-window truncation in units of `T`: `f_T` underflows past this.
const FERMI_CUTOFF: f64 = 745.0;

/// Fixing either the chemical potential or the mean particle density.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    FixedMu { mu: f64 },
    FixedRho { rho: f64 },
}

/// A resolved thermodynamic state: temperature and chemical potential, plus
/// the density and Fermi energy when the state was specified by density.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub temperature: f64,
    pub mu: f64,
    pub rho: Option<f64>,
    pub fermi_energy: Option<f64>,
}

impl ThermoPoint {
    pub fn with_mu(temperature: f64, mu: f64) -> Self {
        ThermoPoint { temperature, mu, rho: None, fermi_energy: None }
    }

    /// Resolve a fixed-density state by inverting `ρ = ρ(T, μ)`.
    pub fn with_density(disp: &Dispersion, temperature: f64, rho: f64, tol: f64) -> Result<Self> {
        let mu = chemical_potential_from_density(disp, temperature, rho, tol)?;
        let fermi_energy = fermi_energy_from_density(disp, rho).ok();
        Ok(ThermoPoint { temperature, mu, rho: Some(rho), fermi_energy })
    }

    pub fn resolve(disp: &Dispersion, temperature: f64, constraint: Constraint, tol: f64) -> Result<Self> {
        match constraint {
            Constraint::FixedMu { mu } => Ok(Self::with_mu(temperature, mu)),
            Constraint::FixedRho { rho } => Self::with_density(disp, temperature, rho, tol),
        }
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::InvalidArgument(format!("{name} must be positive, got {value}")));
    }
    Ok(())
}

/// Momentum cutoff where `f_T(ε(p)-μ)` falls below the double-precision
/// floor (or below `exp(-x_cut)` for the given cutoff exponent).
fn momentum_cutoff(disp: &Dispersion, temperature: f64, mu: f64, x_cut: f64) -> Option<f64> {
    let e_max = mu.max(0.0) + x_cut * temperature;
    disp.radial_inverse(e_max)
}

fn momentum_breakpoints(disp: &Dispersion, temperature: f64, mu: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    if let Some(pf) = disp.fermi_momentum(mu) {
        pts.push(pf);
    }
    for window in [2.0, 10.0, 40.0] {
        if let Some(p) = disp.radial_inverse(mu + window * temperature) {
            pts.push(p);
        }
        if let Some(p) = disp.radial_inverse(mu - window * temperature) {
            pts.push(p);
        }
    }
    pts
}

/// Grand-canonical pressure `p(T, μ)` to relative accuracy `tol`.
pub fn pressure(disp: &Dispersion, temperature: f64, mu: f64, tol: f64) -> Result<f64> {
    check_positive("temperature", temperature)?;
    check_positive("tolerance", tol)?;
    let Some(p_hi) = momentum_cutoff(disp, temperature, mu, FERMI_CUTOFF) else {
        return Ok(0.0);
    };
    if p_hi == 0.0 {
        return Ok(0.0);
    }
    let d = disp.dim() as f64;
    let prefactor = unit_ball_volume(disp.dim())
        / (2.0 * std::f64::consts::PI * disp.hbar()).powf(d);
    let integrand = |p: f64| {
        p.powf(d) * disp.energy_derivative(p) * fermi_scaled((disp.energy(p) - mu) / temperature)
    };
    let bp = momentum_breakpoints(disp, temperature, mu);
    let r = adaptive_gk(integrand, 0.0, p_hi, &bp, f64::MIN_POSITIVE, tol)?;
    Ok(prefactor * r.value)
}

/// Particle density `ρ(T, μ) = ∂p/∂μ` to relative accuracy `tol`.
pub fn density_from_mu(disp: &Dispersion, temperature: f64, mu: f64, tol: f64) -> Result<f64> {
    check_positive("temperature", temperature)?;
    check_positive("tolerance", tol)?;
    let Some(p_hi) = momentum_cutoff(disp, temperature, mu, FERMI_CUTOFF) else {
        return Ok(0.0);
    };
    if p_hi == 0.0 {
        return Ok(0.0);
    }
    let d = disp.dim() as f64;
    let prefactor = unit_sphere_area(disp.dim())
        / (2.0 * std::f64::consts::PI * disp.hbar()).powf(d);
    let integrand =
        |p: f64| p.powf(d - 1.0) * fermi_scaled((disp.energy(p) - mu) / temperature);
    let bp = momentum_breakpoints(disp, temperature, mu);
    let r = adaptive_gk(integrand, 0.0, p_hi, &bp, f64::MIN_POSITIVE, tol)?;
    Ok(prefactor * r.value)
}

/// Thermal α-Rényi entropy density `s_α(T)` at a resolved state, to relative
/// accuracy `tol`.
pub fn entropy_density(
    disp: &Dispersion,
    alpha: RenyiIndex,
    point: &ThermoPoint,
    tol: f64,
) -> Result<f64> {
    check_positive("temperature", point.temperature)?;
    check_positive("tolerance", tol)?;
    let a = alpha.get();
    // h_α(f) ~ f^min(α,1) for f → 0, so small α needs a wider window.
    let x_cut = FERMI_CUTOFF.max(50.0 / a.min(1.0));
    let Some(p_hi) = momentum_cutoff(disp, point.temperature, point.mu, x_cut) else {
        return Ok(0.0);
    };
    if p_hi == 0.0 {
        return Ok(0.0);
    }
    let d = disp.dim() as f64;
    let prefactor = unit_sphere_area(disp.dim())
        / (2.0 * std::f64::consts::PI * disp.hbar()).powf(d);
    let integrand = |p: f64| {
        let f = fermi_scaled((disp.energy(p) - point.mu) / point.temperature);
        p.powf(d - 1.0) * h_alpha_raw(a, f)
    };
    let bp = momentum_breakpoints(disp, point.temperature, point.mu);
    let r = adaptive_gk(integrand, 0.0, p_hi, &bp, f64::MIN_POSITIVE, tol)?;
    Ok(prefactor * r.value)
}

/// `s_α(T)` through the pressure identity `α/((α-1)T)·[p(T) - p(T/α)]`,
/// valid for `α ≠ 1`. Kept as an independent algebraic route for
/// cross-checking [`entropy_density`].
pub fn entropy_density_via_pressure(
    disp: &Dispersion,
    alpha: RenyiIndex,
    temperature: f64,
    mu: f64,
    tol: f64,
) -> Result<f64> {
    let a = alpha.get();
    if alpha.is_von_neumann() {
        return Err(Error::InvalidArgument(
            "pressure identity requires alpha != 1 (the limit is the T-derivative)".into(),
        ));
    }
    let p1 = pressure(disp, temperature, mu, tol)?;
    let p2 = pressure(disp, temperature / a, mu, tol)?;
    Ok(a / ((a - 1.0) * temperature) * (p1 - p2))
}

/// Invert `ρ(T, μ) = ρ` for `μ`. The map is strictly increasing in `μ`, so
/// the root is unique; expanding bracket search plus bisection with a secant
/// polish.
pub fn chemical_potential_from_density(
    disp: &Dispersion,
    temperature: f64,
    rho: f64,
    tol: f64,
) -> Result<f64> {
    check_positive("temperature", temperature)?;
    check_positive("density", rho)?;
    check_positive("tolerance", tol)?;
    let quad_tol = (tol * 1e-2).min(1e-11);
    let eval = |mu: f64| density_from_mu(disp, temperature, mu, quad_tol);

    // Initial scale: the zero-temperature guess when N is invertible.
    let guess = fermi_energy_from_density(disp, rho).unwrap_or(temperature);
    let mut lo = guess - 10.0 * temperature.max(1.0);
    let mut hi = guess + 10.0 * temperature.max(1.0);
    let mut f_lo = eval(lo)? - rho;
    let mut f_hi = eval(hi)? - rho;
    let mut expansions = 0;
    while f_lo > 0.0 {
        let span = hi - lo;
        lo -= 2.0 * span;
        f_lo = eval(lo)? - rho;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::BracketFailure(format!(
                "no lower bracket for rho = {rho} at T = {temperature}"
            )));
        }
    }
    while f_hi < 0.0 {
        let span = hi - lo;
        hi += 2.0 * span;
        f_hi = eval(hi)? - rho;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::BracketFailure(format!(
                "rho = {rho} exceeds representable densities at T = {temperature}"
            )));
        }
    }

    // Safeguarded bisection/secant.
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        // secant proposal from the bracket endpoints, safeguarded into it
        let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        mid = if secant.is_finite() && secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let f_mid = eval(mid)? - rho;
        if f_mid.abs() <= tol * rho {
            return Ok(mid);
        }
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(mid)
}

/// Fermi energy from the density: the solution of `N(ε_F) = ρ`.
pub fn fermi_energy_from_density(disp: &Dispersion, rho: f64) -> Result<f64> {
    check_positive("density", rho)?;
    // bisection on the nondecreasing N(E)
    let mut hi = 1.0;
    let mut tries = 0;
    while disp.integrated_dos(hi) < rho {
        hi *= 4.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::BracketFailure(format!("N(E) never reaches rho = {rho}")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if disp.integrated_dos(mid) < rho {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1e-300) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Low-temperature report: the measured entropy slope `s_α(T)/T`
/// extrapolated to `T → 0` against the Sommerfeld prediction
/// `(π²/3) N'(μ) (1+α)/(2α)`.
#[derive(Debug, Clone, Serialize)]
pub struct LowTemperatureReport {
    pub alpha: f64,
    pub mu: f64,
    pub t_grid: Vec<f64>,
    pub slopes: Vec<f64>,
    /// Intercept of the `a + b T²` fit through the three smallest
    /// temperatures (the next Sommerfeld correction is quadratic).
    pub extrapolated_slope: f64,
    pub predicted_slope: f64,
    pub relative_deviation: f64,
}

/// Default grid for the low-temperature extrapolation.
pub const LOW_T_GRID: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

pub fn low_temperature_report(
    disp: &Dispersion,
    alpha: RenyiIndex,
    constraint: Constraint,
    t_grid: &[f64],
    tol: f64,
) -> Result<LowTemperatureReport> {
    if t_grid.len() < 3 {
        return Err(Error::InvalidArgument("low-T grid needs at least 3 temperatures".into()));
    }
    let mut ts: Vec<f64> = t_grid.to_vec();
    ts.sort_by(|a, b| b.partial_cmp(a).unwrap()); // decreasing
    let mut slopes = Vec::with_capacity(ts.len());
    let mut mu_ref = f64::NAN;
    for &t in &ts {
        let point = ThermoPoint::resolve(disp, t, constraint, tol)?;
        mu_ref = point.fermi_energy.unwrap_or(point.mu);
        let s = entropy_density(disp, alpha, &point, tol)?;
        slopes.push(s / t);
    }
    // fit a + b T² on the three smallest temperatures
    let k = ts.len();
    let xs: Vec<f64> = ts[k - 3..].iter().map(|t| t * t).collect();
    let ys: Vec<f64> = slopes[k - 3..].to_vec();
    let (a, _b) = fit::affine_fit(&xs, &ys)?;
    let prediction =
        std::f64::consts::PI.powi(2) / 3.0 * disp.integrated_dos_derivative(mu_ref)
            * (1.0 + alpha.get())
            / (2.0 * alpha.get());
    let relative_deviation = if prediction != 0.0 { a / prediction - 1.0 } else { f64::NAN };
    Ok(LowTemperatureReport {
        alpha: alpha.get(),
        mu: mu_ref,
        t_grid: ts,
        slopes,
        extrapolated_slope: a,
        predicted_slope: prediction,
        relative_deviation,
    })
}

/// High-temperature growth of the entropy density.
#[derive(Debug, Clone, Serialize)]
pub enum HighTemperatureGrowth {
    /// `s ~ T^exponent` (log-log fit)
    PowerLaw {
        fitted_exponent: f64,
        fitted_prefactor: f64,
        exponent_stderr: f64,
        predicted_exponent: f64,
    },
    /// `s ~ ln T`: decade increments `s(10T) - s(T)`, which are
    /// T-independent in the limit.
    Logarithmic { increments: Vec<(f64, f64)>, max_relative_spread: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct HighTemperatureReport {
    pub alpha: f64,
    pub constraint: Constraint,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub growth: HighTemperatureGrowth,
}

/// Log-spaced default grid `T ∈ [10², 10⁴]`.
pub fn high_t_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| 10f64.powf(2.0 + 2.0 * i as f64 / (n - 1) as f64)).collect()
}

pub fn high_temperature_report(
    disp: &Dispersion,
    alpha: RenyiIndex,
    constraint: Constraint,
    t_grid: &[f64],
    tol: f64,
) -> Result<HighTemperatureReport> {
    let eval = |t: f64| -> Result<f64> {
        let point = ThermoPoint::resolve(disp, t, constraint, tol)?;
        entropy_density(disp, alpha, &point, tol)
    };
    let values: Vec<f64> = t_grid.iter().map(|&t| eval(t)).collect::<Result<_>>()?;
    let log_mode = alpha.is_von_neumann() && matches!(constraint, Constraint::FixedRho { .. });
    let growth = if log_mode {
        let mut increments = Vec::new();
        for &t in t_grid {
            if t * 10.0 <= t_grid.last().copied().unwrap_or(0.0) * 1.0000001 {
                let d = eval(10.0 * t)? - eval(t)?;
                increments.push((t, d));
            }
        }
        if increments.is_empty() {
            let lo = t_grid[0];
            let d = eval(10.0 * lo)? - eval(lo)?;
            increments.push((lo, d));
        }
        let max = increments.iter().map(|x| x.1).fold(f64::MIN, f64::max);
        let min = increments.iter().map(|x| x.1).fold(f64::MAX, f64::min);
        let spread = (max - min) / max.abs().max(1e-300);
        HighTemperatureGrowth::Logarithmic { increments, max_relative_spread: spread }
    } else {
        let series = fit::SampleSeries::new(t_grid.to_vec(), values.clone(), "s_alpha(T)")?;
        let pl = fit::fit_power_law(&series)?;
        let d = disp.dim() as f64;
        let predicted = match constraint {
            Constraint::FixedMu { .. } => d / 2.0,
            Constraint::FixedRho { .. } => d / 2.0 * (1.0 - alpha.get()).max(0.0),
        };
        HighTemperatureGrowth::PowerLaw {
            fitted_exponent: pl.exponent,
            fitted_prefactor: pl.prefactor,
            exponent_stderr: pl.exponent_stderr,
            predicted_exponent: predicted,
        }
    };
    Ok(HighTemperatureReport {
        alpha: alpha.get(),
        constraint,
        t_grid: t_grid.to_vec(),
        values,
        growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::VON_NEUMANN;
    use approx::assert_relative_eq;

    fn ideal_1d() -> Dispersion {
        Dispersion::ideal_gas(1, 1.0).unwrap()
    }

    #[test]
    fn pressure_zero_temperature_limit() {
        // T → 0 at μ = 1: ∫₀¹ N(E) dE = (2/3)·√2/π
        let p = pressure(&ideal_1d(), 1e-6, 1.0, 1e-10).unwrap();
        let exact = 2.0 * std::f64::consts::SQRT_2 / (3.0 * std::f64::consts::PI);
        assert_relative_eq!(p, exact, max_relative = 1e-4);
    }

    #[test]
    fn pressure_maxwell_boltzmann_limit() {
        // μ = -12 at T = 1: p ≈ e^μ ∫ N e^{-E} dE = e^{-12}/√(2π), quantum
        // correction O(e^{2μ}) is below 0.01% relative.
        let p = pressure(&ideal_1d(), 1.0, -12.0, 1e-10).unwrap();
        let mb = (-12.0f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(p, mb, max_relative = 1e-4);
    }

    #[test]
    fn pressure_vanishes_deep_in_the_gap() {
        let p = pressure(&ideal_1d(), 0.5, -2000.0, 1e-8).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn density_matches_linearly_spaced_reference() {
        // frozen from an independent adaptive quadrature
        let rho = density_from_mu(&ideal_1d(), 0.1, 1.0, 1e-11).unwrap();
        assert_relative_eq!(rho, 0.448_206_642_141_645, max_relative = 1e-9);
    }

    #[test]
    fn pressure_identity_for_renyi_densities() {
        let disp = ideal_1d();
        for alpha in [0.5, 2.0, 3.0] {
            let a = RenyiIndex::new(alpha).unwrap();
            for t in [0.1, 1.0, 10.0] {
                for mu in [-1.0, 0.0, 1.0] {
                    let direct =
                        entropy_density(&disp, a, &ThermoPoint::with_mu(t, mu), 1e-10).unwrap();
                    let via_p = entropy_density_via_pressure(&disp, a, t, mu, 1e-11).unwrap();
                    assert_relative_eq!(direct, via_p, max_relative = 1e-8);
                }
            }
        }
    }

    #[test]
    fn entropy_density_nonnegative() {
        let disp = ideal_1d();
        for alpha in [0.5, 1.0, 2.0] {
            let a = RenyiIndex::new(alpha).unwrap();
            for mu in [-3.0, 0.0, 2.0] {
                let s = entropy_density(&disp, a, &ThermoPoint::with_mu(0.7, mu), 1e-9).unwrap();
                assert!(s >= 0.0);
            }
        }
    }

    #[test]
    fn sommerfeld_slope_at_small_t() {
        // s(T)/T → (π²/3) N'(1) = π/(3√2) ≈ 0.740480 for d=1, μ=1
        let disp = ideal_1d();
        let s = entropy_density(&disp, VON_NEUMANN, &ThermoPoint::with_mu(1e-3, 1.0), 1e-10)
            .unwrap();
        assert_relative_eq!(s / 1e-3, 0.740_480_489_693, max_relative = 1e-3);
    }

    #[test]
    fn von_neumann_rejects_pressure_identity() {
        assert!(entropy_density_via_pressure(&ideal_1d(), VON_NEUMANN, 1.0, 0.0, 1e-8).is_err());
    }

    #[test]
    fn chemical_potential_round_trip_grid() {
        let disp = ideal_1d();
        for i in 0..5 {
            for j in 0..5 {
                let t = 0.05 * 4f64.powi(i);
                let rho = 0.2 * 2.2f64.powi(j);
                let mu = chemical_potential_from_density(&disp, t, rho, 1e-12).unwrap();
                let back = density_from_mu(&disp, t, mu, 1e-13).unwrap();
                assert_relative_eq!(back, rho, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn chemical_potential_degenerate_limit() {
        // T → 0 at ρ = 1 for d=1: μ → ε_F = (ρπ)²/2 = π²/2
        let mu = chemical_potential_from_density(&ideal_1d(), 1e-6, 1.0, 1e-11).unwrap();
        assert_relative_eq!(mu, std::f64::consts::PI.powi(2) / 2.0, max_relative = 1e-4);
    }

    #[test]
    fn fermi_energy_closed_form() {
        let ef = fermi_energy_from_density(&ideal_1d(), 1.0).unwrap();
        assert_relative_eq!(ef, std::f64::consts::PI.powi(2) / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn mu_low_t_correction_quadratic() {
        // μ(T,ρ) - ε_F ≈ -(π²/6)(N''/N')(ε_F) T² = +T²/6 for d=1, ρ=1
        let disp = ideal_1d();
        let ef = std::f64::consts::PI.powi(2) / 2.0;
        for t in [1e-2, 5e-3] {
            let mu = chemical_potential_from_density(&disp, t, 1.0, 1e-12).unwrap();
            assert_relative_eq!((mu - ef) / (t * t), 1.0 / 6.0, max_relative = 2e-2);
        }
    }

    #[test]
    fn activated_regime_entropy_decay() {
        // μ < 0: s(T) vanishes faster than any power as T → 0
        let disp = ideal_1d();
        let s1 = entropy_density(&disp, VON_NEUMANN, &ThermoPoint::with_mu(0.05, -1.0), 1e-9)
            .unwrap();
        let s2 = entropy_density(&disp, VON_NEUMANN, &ThermoPoint::with_mu(0.025, -1.0), 1e-9)
            .unwrap();
        assert!(s2 < s1 * 1e-6, "s(T/2) = {s2} not activated relative to s(T) = {s1}");
    }

    #[test]
    fn low_temperature_report_matches_prediction() {
        let disp = ideal_1d();
        for (alpha, factor) in [(1.0, 1.0), (2.0, 0.75)] {
            let rep = low_temperature_report(
                &disp,
                RenyiIndex::new(alpha).unwrap(),
                Constraint::FixedMu { mu: 1.0 },
                &LOW_T_GRID,
                1e-10,
            )
            .unwrap();
            assert_relative_eq!(rep.predicted_slope, 0.740_480_489_693 * factor, max_relative = 1e-9);
            assert!(rep.relative_deviation.abs() < 5e-3, "{:?}", rep);
        }
    }

    #[test]
    fn pressure_convex_nondecreasing_in_mu() {
        let disp = ideal_1d();
        let t = 0.7;
        let mus: Vec<f64> = (0..12).map(|i| -2.0 + 0.4 * i as f64).collect();
        let ps: Vec<f64> = mus.iter().map(|&m| pressure(&disp, t, m, 1e-10).unwrap()).collect();
        for w in ps.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for w in ps.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-10);
        }
    }
}
