//! Physical parameters of the driven Λ system and of the vapor medium.
//!
//! Internally every rate and frequency is dimensionless, in units of
//! Γ ≡ Γ₁ (the |3⟩→|1⟩ decay). That convention matches the usual plot axes
//! (Δ/Γ, Ω_c/Γ, f₀²/Γ) and keeps the generator well conditioned. Physical
//! units appear only in [`MediumParams`], which carries the atom density, the
//! resonance wavelength and the rad/s value of Γ used to convert detunings.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Parameters of the three-level Λ system, all in units of Γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Probe Rabi frequency Ω_p (must be > 0; the probe defines σ₃₁).
    pub omega_p_rabi: f64,
    /// Coupling Rabi frequency Ω_c.
    pub omega_c_rabi: f64,
    /// Probe detuning Δ, defined by ħω_p = E₃ − E₁ − ħΔ.
    pub delta: f64,
    /// Spontaneous decay rate Γ₁ of |3⟩→|1⟩ (1 by definition of the unit).
    pub gamma1: f64,
    /// Spontaneous decay rate Γ₂ of |3⟩→|2⟩ (0 at the reference point).
    pub gamma2: f64,
    /// Injected noise strength f₀² (⟨f(t)f(t′)⟩ = f₀²δ(t−t′)).
    pub f0sq: f64,
    /// Rotation frequency ω_μ ≡ ω₂ − ω₁ − Δ of the noise frame; only the
    /// explicit stochastic integration depends on it.
    pub omega_mu: f64,
}

impl SystemParams {
    /// The canonical parameter point: Ω_p/Γ = 10⁻³, Ω_c/Γ = 1, Γ₂ = 0,
    /// noise off, ω_μ/Γ = 600 (≈ the ⁸⁵Rb ground hyperfine splitting
    /// over Γ).
    pub fn reference_defaults() -> Self {
        SystemParams {
            omega_p_rabi: 1e-3,
            omega_c_rabi: 1.0,
            delta: 0.0,
            gamma1: 1.0,
            gamma2: 0.0,
            f0sq: 0.0,
            omega_mu: 600.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_f0sq(mut self, f0sq: f64) -> Self {
        self.f0sq = f0sq;
        self
    }

    pub fn with_omega_c(mut self, omega_c: f64) -> Self {
        self.omega_c_rabi = omega_c;
        self
    }

    /// Total coherence decay rate (f₀²+Γ₁+Γ₂)/2 of σ₁₃ and σ₂₃.
    pub fn gamma_coherence(&self) -> f64 {
        0.5 * (self.f0sq + self.gamma1 + self.gamma2)
    }
}

/// One validation failure: which field, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

/// Outcome of [`validate_params`]: empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.violations {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "{}: {}", v.field, v.message)?;
            first = false;
        }
        Ok(())
    }
}

/// Checks the [`SystemParams`] invariants, returning every violation rather
/// than stopping at the first. Pure: never mutates, same input → same report.
pub fn validate_params(params: &SystemParams) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push = |field: &'static str, message: String| {
        violations.push(Violation { field, message });
    };

    if !params.omega_p_rabi.is_finite() || params.omega_p_rabi <= 0.0 {
        push(
            "omega_p_rabi",
            "probe Rabi frequency must be > 0 (a zero probe makes sigma_31 \
             identically zero and the observables undefined)"
                .into(),
        );
    }
    if !params.omega_c_rabi.is_finite() || params.omega_c_rabi < 0.0 {
        push("omega_c_rabi", "omega_c_rabi must be non-negative".into());
    }
    if !params.delta.is_finite() {
        push("delta", "detuning must be finite".into());
    }
    if !params.gamma1.is_finite() || params.gamma1 < 0.0 {
        push("gamma1", "gamma1 must be non-negative".into());
    }
    if !params.gamma2.is_finite() || params.gamma2 < 0.0 {
        push("gamma2", "gamma2 must be non-negative".into());
    }
    if !params.f0sq.is_finite() || params.f0sq < 0.0 {
        push("f0sq", "negative noise strength (f0sq must be >= 0)".into());
    }
    if !params.omega_mu.is_finite() || params.omega_mu < 0.0 {
        push("omega_mu", "omega_mu must be non-negative".into());
    }
    if params.gamma1 >= 0.0 && params.gamma2 >= 0.0 && params.gamma1 + params.gamma2 == 0.0 {
        push(
            "gamma1",
            "no decay channel (gamma1 + gamma2 must be > 0 for a unique steady state)".into(),
        );
    }

    ValidationReport { violations }
}

/// How to read a decay rate quoted in megahertz ("Γ = 5 MHz") when
/// converting dimensionless detunings to rad/s. Such quotes are ambiguous
/// about a factor of 2π; the rad/s reading reproduces the sub-m/s group
/// velocity scale and is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaConvention {
    /// Γ = 5×10⁶ rad/s (default).
    RadPerSec,
    /// Γ = 2π × 5×10⁶ rad/s.
    TwoPiHz,
}

impl GammaConvention {
    /// Converts a rate quoted as a plain "Hz" number (e.g. 5e6 for 5 MHz)
    /// into rad/s under this convention.
    pub fn to_rad_per_s(self, quoted_hz: f64) -> f64 {
        match self {
            GammaConvention::RadPerSec => quoted_hz,
            GammaConvention::TwoPiHz => 2.0 * std::f64::consts::PI * quoted_hz,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GammaConvention::RadPerSec => "rad",
            GammaConvention::TwoPiHz => "2pi",
        }
    }
}

impl FromStr for GammaConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rad" => Ok(GammaConvention::RadPerSec),
            "2pi" => Ok(GammaConvention::TwoPiHz),
            other => Err(format!(
                "unknown gamma convention {other:?}; expected \"rad\" or \"2pi\""
            )),
        }
    }
}

/// Properties of the vapor medium entering the expressions for α, n_R and V_g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Atomic number density N, atoms per m³.
    pub number_density: f64,
    /// Resonance wavelength λ₀ = 2πc/(ω₃−ω₁), meters.
    pub lambda0: f64,
    /// Physical value of Γ in rad/s, used to convert Δ/Γ to rad/s.
    pub gamma_hz: f64,
}

impl MediumParams {
    /// The canonical ⁸⁵Rb vapor: N = 10¹⁸ m⁻³, λ₀ = 780 nm,
    /// Γ = 5 MHz under the given convention.
    pub fn rb85(convention: GammaConvention) -> Self {
        MediumParams {
            number_density: 1e18,
            lambda0: 780e-9,
            gamma_hz: convention.to_rad_per_s(5e6),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if !(self.number_density > 0.0) {
            violations.push(Violation {
                field: "number_density",
                message: "number_density must be > 0".into(),
            });
        }
        if !(self.lambda0 > 0.0) {
            violations.push(Violation {
                field: "lambda0",
                message: "lambda0 must be > 0".into(),
            });
        }
        if !(self.gamma_hz > 0.0) {
            violations.push(Violation {
                field: "gamma_hz",
                message: "gamma_hz must be > 0".into(),
            });
        }
        ValidationReport { violations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_parameter_point_is_valid() {
        let report = validate_params(&SystemParams::reference_defaults());
        assert!(report.is_valid(), "unexpected violations: {report}");
    }

    #[test]
    fn missing_decay_channel_is_reported() {
        let mut p = SystemParams::reference_defaults();
        p.gamma1 = 0.0;
        p.gamma2 = 0.0;
        let report = validate_params(&p);
        assert!(!report.is_valid());
        assert!(
            report.violations.iter().any(|v| v.message.contains("no decay channel")),
            "expected a 'no decay channel' violation, got: {report}"
        );
    }

    #[test]
    fn negative_noise_strength_is_reported() {
        let p = SystemParams::reference_defaults().with_f0sq(-0.1);
        let report = validate_params(&p);
        assert!(!report.is_valid());
        assert!(
            report
                .violations
                .iter()
                .any(|v| v.field == "f0sq" && v.message.contains("negative noise strength")),
            "expected a 'negative noise strength' violation, got: {report}"
        );
    }

    #[test]
    fn negative_gamma_names_the_field() {
        let mut p = SystemParams::reference_defaults();
        p.gamma1 = -1.0;
        let report = validate_params(&p);
        assert!(report
            .violations
            .iter()
            .any(|v| v.field == "gamma1" && v.message.contains("must be non-negative")));
    }

    #[test]
    fn validation_is_pure() {
        let p = SystemParams::reference_defaults().with_f0sq(-2.0);
        assert_eq!(validate_params(&p), validate_params(&p));
    }

    #[test]
    fn gamma_conventions_differ_by_two_pi() {
        let rad = GammaConvention::RadPerSec.to_rad_per_s(5e6);
        let two_pi = GammaConvention::TwoPiHz.to_rad_per_s(5e6);
        assert_eq!(rad, 5e6);
        assert!((two_pi / rad - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn convention_labels_round_trip() {
        for conv in [GammaConvention::RadPerSec, GammaConvention::TwoPiHz] {
            assert_eq!(conv.label().parse::<GammaConvention>().unwrap(), conv);
        }
        assert!("degrees".parse::<GammaConvention>().is_err());
    }
}
