//! Physical observables of the probe field: absorption coefficient, real
//! refractive index, and group velocity.
//!
//! All three derive from the steady-state coherence σ₃₁ of the dilute vapor:
//!
//! * α = (1/λ_p)·(Nλ₀³π/(Ω_p/Γ))·Im σ₃₁, in 1/m,
//! * n_R = 1 + (Nλ₀³π/(Ω_p/Γ))·Re σ₃₁,
//! * V_g = c/(n_R − ω_p·dn_R/dΔ), with ω_p = 2πc/λ₀ − Δ·Γ_phys the probe
//!   frequency at detuning Δ (red detuning increases Δ here, hence the minus
//!   signs).
//!
//! Δ, Ω and rates are dimensionless (units of Γ) throughout the model;
//! `MediumParams::gamma_hz` carries the physical Γ in rad/s and converts the
//! dispersion slope to seconds where frequency enters. The steep dispersion of
//! the EIT window makes n_R − ω_p·dn_R/dΔ of order 10⁸, hence group
//! velocities of order meters per second.

use crate::error::EitError;
use crate::liouvillian::{build_averaged_generator, ParameterId};
use crate::params::{validate_params, MediumParams, SystemParams, ValidationReport};
use crate::solver::solve_steady_state_and_derivative;
use crate::state::idx;

/// Speed of light in vacuum, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;

/// Default central-difference step for the dispersion slope, in Γ units.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Below this magnitude of n_R − ω_p·dn_R/dΔ the group velocity is treated
/// as singular (superluminal/diverging regime outside the model's scope).
pub const DENOMINATOR_FLOOR: f64 = 1e-6;

/// How the dispersion slope dn_R/dΔ is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMethod {
    /// Exact parametric derivative of the steady-state linear system
    /// (d vec σ/dΔ = −A⁻¹·(∂G/∂Δ)·vec σ). No step-size tuning; the default.
    AnalyticDerivative,
    /// Central difference over two extra steady-state solves at Δ±h,
    /// h in Γ units. Retained as an independent cross-check.
    CentralDifference { h: f64 },
}

impl Default for DerivativeMethod {
    fn default() -> Self {
        DerivativeMethod::AnalyticDerivative
    }
}

/// Probe observables at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalResponse {
    /// Absorption coefficient, 1/m.
    pub alpha: f64,
    /// Real refractive index, dimensionless.
    pub n_r: f64,
    /// Dispersion slope dn_R/dΔ with Δ in rad/s, hence units of seconds.
    pub dn_r_ddelta: f64,
    /// Group velocity c/(n_R − ω_p·dn_R/dΔ), m/s.
    pub v_g: f64,
}

impl OpticalResponse {
    /// Slowing factor c/V_g = n_R − ω_p·dn_R/dΔ (the group index).
    pub fn group_index(&self) -> f64 {
        C_LIGHT / self.v_g
    }
}

/// Probe angular frequency at detuning Δ (Γ units): ω_p = 2πc/λ₀ − Δ·Γ_phys.
/// The correction is < 10⁻⁷ relative in all plotted regimes but kept exact.
pub fn probe_angular_frequency(delta: f64, medium: &MediumParams) -> f64 {
    2.0 * std::f64::consts::PI * C_LIGHT / medium.lambda0 - delta * medium.gamma_hz
}

/// Dimensionless coupling strength Nλ₀³π/(Ω_p/Γ) shared by α and n_R.
fn medium_coupling(params: &SystemParams, medium: &MediumParams) -> f64 {
    medium.number_density * medium.lambda0.powi(3) * std::f64::consts::PI / params.omega_p_rabi
}

/// Absorption coefficient for a given steady-state coherence. Requires
/// Ω_p > 0 (enforced by [`optical_response`]; direct callers must uphold it).
pub fn absorption(sigma31: crate::state::C64, params: &SystemParams, medium: &MediumParams) -> f64 {
    let omega_p = probe_angular_frequency(params.delta, medium);
    let lambda_p = 2.0 * std::f64::consts::PI * C_LIGHT / omega_p;
    medium_coupling(params, medium) * sigma31.im / lambda_p
}

/// Real refractive index for a given steady-state coherence.
pub fn refractive_index(
    sigma31: crate::state::C64,
    params: &SystemParams,
    medium: &MediumParams,
) -> f64 {
    1.0 + medium_coupling(params, medium) * sigma31.re
}

fn validate_all(params: &SystemParams, medium: &MediumParams) -> Result<(), EitError> {
    let mut report = validate_params(params);
    report.violations.extend(medium.validate().violations);
    if report.is_valid() {
        Ok(())
    } else {
        Err(EitError::InvalidParams(ValidationReport {
            violations: report.violations,
        }))
    }
}

/// Maps a steady-state coherence and its detuning slope (both in Γ units) to
/// the full set of observables. Shared by [`optical_response`] and the sweep
/// engine so the group-index singularity is handled in exactly one place.
pub(crate) fn response_from_coherence(
    sigma31: crate::state::C64,
    dre31_ddelta: f64,
    params: &SystemParams,
    medium: &MediumParams,
) -> Result<OpticalResponse, EitError> {
    let alpha = absorption(sigma31, params, medium);
    let n_r = refractive_index(sigma31, params, medium);
    // Slope per physical rad/s of detuning.
    let dn_r_ddelta = medium_coupling(params, medium) * dre31_ddelta / medium.gamma_hz;

    let omega_p = probe_angular_frequency(params.delta, medium);
    let denominator = n_r - omega_p * dn_r_ddelta;
    if denominator.abs() < DENOMINATOR_FLOOR {
        return Err(EitError::VanishingDenominator { denominator });
    }
    Ok(OpticalResponse {
        alpha,
        n_r,
        dn_r_ddelta,
        v_g: C_LIGHT / denominator,
    })
}

/// Solves the steady state at `params` and maps it to all probe observables.
pub fn optical_response(
    params: &SystemParams,
    medium: &MediumParams,
    method: DerivativeMethod,
) -> Result<OpticalResponse, EitError> {
    validate_all(params, medium)?;

    let gen = build_averaged_generator(params)?;
    let (s31, dre31_ddelta) = match method {
        DerivativeMethod::AnalyticDerivative => {
            let (ss, dv) = solve_steady_state_and_derivative(&gen, ParameterId::Delta)?;
            // σ₃₁ = conj σ₁₃, so d Re σ₃₁/dΔ equals the Re σ₁₃ component.
            (ss.sigma.sigma31(), dv[idx::RE13])
        }
        DerivativeMethod::CentralDifference { h } => {
            let ss = crate::solver::solve_steady_state(&gen)?;
            let solve_at = |delta: f64| -> Result<f64, EitError> {
                let g = build_averaged_generator(&params.with_delta(delta))?;
                Ok(crate::solver::solve_steady_state(&g)?.sigma.sigma31().re)
            };
            let slope = (solve_at(params.delta + h)? - solve_at(params.delta - h)?) / (2.0 * h);
            (ss.sigma.sigma31(), slope)
        }
    };

    response_from_coherence(s31, dre31_ddelta, params, medium)
}

/// Group velocity of the probe at `params`, m/s.
pub fn group_velocity(
    params: &SystemParams,
    medium: &MediumParams,
    method: DerivativeMethod,
) -> Result<f64, EitError> {
    optical_response(params, medium, method).map(|r| r.v_g)
}

/// Noise-free absorption at the far-detuned reference point Δ = 3Γ, used to
/// pin the dimensionless vertical scale of the spectra ("arbitrary units").
pub fn alpha_reference(params: &SystemParams, medium: &MediumParams) -> Result<f64, EitError> {
    let reference = params.with_delta(3.0).with_f0sq(0.0);
    validate_all(&reference, medium)?;
    let gen = build_averaged_generator(&reference)?;
    let ss = crate::solver::solve_steady_state(&gen)?;
    Ok(absorption(ss.sigma.sigma31(), &reference, medium))
}
