//! Browser bindings: the interactive demo's three entry points.
//!
//! Thin wrappers over the core steady-state solver — all physics lives in
//! `eit-core`. The demo varies the coupling Ω_c and the noise strength f₀²
//! over the standard scan ranges at the fixed ⁸⁵Rb parameter point, so the
//! exports take just those two knobs plus grid resolution.
//!
//! The `*_impl` functions carry the logic and run under native tests;
//! `JsError` can only be constructed on a wasm target.

use eit_core::{
    build_averaged_generator, optical_response, solve_steady_state, DerivativeMethod, EitError,
    GammaConvention, MediumParams, SystemParams,
};
use wasm_bindgen::prelude::*;

fn system(omega_c: f64, f0sq: f64) -> SystemParams {
    SystemParams::reference_defaults()
        .with_omega_c(omega_c)
        .with_f0sq(f0sq)
}

fn medium() -> MediumParams {
    MediumParams::rb85(GammaConvention::RadPerSec)
}

fn spectrum_impl(omega_c: f64, f0sq: f64, n_points: u32) -> Result<Vec<f64>, String> {
    if n_points < 2 {
        return Err("n_points must be at least 2".to_string());
    }
    let mut alphas = Vec::with_capacity(n_points as usize);
    for i in 0..n_points {
        let delta = -3.0 + 6.0 * i as f64 / (n_points - 1) as f64;
        let params = system(omega_c, f0sq).with_delta(delta);
        let gen = build_averaged_generator(&params).map_err(|e| e.to_string())?;
        let ss = solve_steady_state(&gen).map_err(|e| e.to_string())?;
        alphas.push(eit_core::absorption(ss.sigma.sigma31(), &params, &medium()));
    }
    Ok(alphas)
}

fn group_velocity_impl(omega_c: f64, f0sq: f64, delta: f64) -> Result<f64, String> {
    let params = system(omega_c, f0sq).with_delta(delta);
    match optical_response(&params, &medium(), DerivativeMethod::default()) {
        Ok(response) => Ok(response.v_g),
        Err(EitError::VanishingDenominator { .. }) => Ok(f64::NAN),
        Err(e) => Err(e.to_string()),
    }
}

fn reference_impl() -> Result<f64, String> {
    eit_core::alpha_reference(&SystemParams::reference_defaults(), &medium())
        .map_err(|e| e.to_string())
}

/// Absorption α(Δ) in 1/m on an `n_points` grid over Δ ∈ [−3Γ, 3Γ].
#[wasm_bindgen]
pub fn absorption_spectrum(omega_c: f64, f0sq: f64, n_points: u32) -> Result<Vec<f64>, JsError> {
    spectrum_impl(omega_c, f0sq, n_points).map_err(|e| JsError::new(&e))
}

/// Group velocity in m/s at detuning Δ (Γ units, rad/s reading of Γ = 5 MHz).
/// NaN marks the vanishing-denominator pole where V_g changes sign.
#[wasm_bindgen]
pub fn group_velocity_at(omega_c: f64, f0sq: f64, delta: f64) -> Result<f64, JsError> {
    group_velocity_impl(omega_c, f0sq, delta).map_err(|e| JsError::new(&e))
}

/// Absorption α(Δ = 3Γ, f₀² = 0): the wing value used to express spectra in
/// arbitrary units for plotting.
#[wasm_bindgen]
pub fn reference_absorption() -> Result<f64, JsError> {
    reference_impl().map_err(|e| JsError::new(&e))
}
