//! Flat-key run configuration.
//!
//! Every knob has a built-in default matching the reference parameter point
//! (weak probe Ω_p = 10⁻³Γ, coupling Ω_c = Γ, ⁸⁵Rb vapor medium). A JSON
//! config file with the same flat keys overrides the defaults, and
//! command-line flags override the file — so any emitted artifact can be
//! reproduced from its embedded config echo alone.

use std::path::PathBuf;
use std::str::FromStr;

use eit_core::{GammaConvention, MediumParams, SystemParams};
use serde::{Deserialize, Serialize};

/// Resolved configuration for one command invocation.
///
/// `out` and `threads` are deliberately excluded from serialization: output
/// files embed the serialized config as provenance metadata, and the data
/// must be byte-identical regardless of where it is written or how many
/// worker threads gathered it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    // System parameters, dimensionless (Γ units).
    pub omega_p_rabi: f64,
    pub omega_c_rabi: f64,
    pub delta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub f0sq: f64,
    pub omega_mu: f64,

    // Medium: vapor density (1/m³), resonance wavelength (m), and the decay
    // rate quoted as a plain frequency (5e6 for "Γ = 5 MHz"), converted to
    // rad/s under `gamma_convention` ("rad" or "2pi").
    pub number_density: f64,
    pub lambda0: f64,
    pub gamma_quoted_hz: f64,
    pub gamma_convention: String,

    // Detuning grid (spectrum, groupvel).
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,

    // Coupling grid (contour rows).
    pub omega_c_min: f64,
    pub omega_c_max: f64,
    pub omega_c_points: usize,

    // Noise grid (contour columns; groupvel noise scans).
    pub f0sq_min: f64,
    pub f0sq_max: f64,
    pub f0sq_points: usize,

    /// Scan axis for `groupvel`: "delta" (V_g across the dip) or "f0sq"
    /// (V_g against noise strength at the configured detuning).
    pub groupvel_axis: String,

    // Monte-Carlo settings (mc-validate).
    pub n_traj: usize,
    pub t_final: f64,
    pub dt: f64,
    pub seed: u64,

    /// Output format: "csv" or "json".
    pub format: String,

    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let system = SystemParams::reference_defaults();
        RunConfig {
            omega_p_rabi: system.omega_p_rabi,
            omega_c_rabi: system.omega_c_rabi,
            delta: system.delta,
            gamma1: system.gamma1,
            gamma2: system.gamma2,
            f0sq: system.f0sq,
            omega_mu: system.omega_mu,
            number_density: 1e18,
            lambda0: 780e-9,
            gamma_quoted_hz: 5e6,
            gamma_convention: "rad".to_string(),
            delta_min: -3.0,
            delta_max: 3.0,
            delta_points: 601,
            omega_c_min: 0.2,
            omega_c_max: 2.2,
            omega_c_points: 61,
            f0sq_min: 0.0,
            f0sq_max: 2.0,
            f0sq_points: 41,
            groupvel_axis: "delta".to_string(),
            n_traj: 2000,
            t_final: 30.0,
            dt: 1e-4,
            seed: 1,
            format: "csv".to_string(),
            out: None,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &PathBuf) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn system(&self) -> SystemParams {
        SystemParams {
            omega_p_rabi: self.omega_p_rabi,
            omega_c_rabi: self.omega_c_rabi,
            delta: self.delta,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            f0sq: self.f0sq,
            omega_mu: self.omega_mu,
        }
    }

    pub fn convention(&self) -> Result<GammaConvention, String> {
        GammaConvention::from_str(&self.gamma_convention)
    }

    pub fn medium(&self) -> Result<MediumParams, String> {
        Ok(MediumParams {
            number_density: self.number_density,
            lambda0: self.lambda0,
            gamma_hz: self.convention()?.to_rad_per_s(self.gamma_quoted_hz),
        })
    }

    /// Structural checks on the CLI-only knobs (the physics parameters are
    /// validated downstream with field-by-field reports).
    pub fn check(&self) -> Result<(), String> {
        self.convention()?;
        match self.format.as_str() {
            "csv" | "json" => {}
            other => return Err(format!("format must be \"csv\" or \"json\", got {other:?}")),
        }
        match self.groupvel_axis.as_str() {
            "delta" | "f0sq" => {}
            other => {
                return Err(format!(
                    "groupvel_axis must be \"delta\" or \"f0sq\", got {other:?}"
                ))
            }
        }
        Ok(())
    }

    /// The config echo embedded in every output artifact: all serializable
    /// keys (alphabetical, deterministic), the command name, and the resolved
    /// Γ in rad/s so the units convention is explicit in the data file.
    pub fn echo(&self, command: &str) -> serde_json::Map<String, serde_json::Value> {
        let mut map = match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(map)) => map,
            _ => unreachable!("RunConfig serializes to an object"),
        };
        map.insert("command".to_string(), command.into());
        if let Ok(medium) = self.medium() {
            map.insert("gamma_rad_per_s".to_string(), medium.gamma_hz.into());
        }
        map
    }
}

/// A `min:max:n` grid specification from the command line.
#[derive(Debug, Clone, Copy)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl FromStr for GridRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected min:max:n, got {s:?}"));
        }
        let min: f64 = parts[0].parse().map_err(|e| format!("bad range min: {e}"))?;
        let max: f64 = parts[1].parse().map_err(|e| format!("bad range max: {e}"))?;
        let n: usize = parts[2].parse().map_err(|e| format!("bad range count: {e}"))?;
        Ok(GridRange { min, max, n })
    }
}
