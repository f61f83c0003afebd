//! Error type shared by all modules.

use crate::params::ValidationReport;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum EitError {
    /// Parameter validation failed; the report names every offending field.
    #[error("invalid parameters: {0}")]
    InvalidParams(ValidationReport),

    /// The trace-replaced steady-state system is singular: the steady state is
    /// not unique (e.g. Ω_c = f₀² = 0 with Γ₂ = 0 strands population in |2⟩).
    #[error("steady-state system is singular: null space has dimension {null_dim}; \
             the steady state is not unique for these parameters")]
    SingularSystem { null_dim: usize },

    /// A fixed-step integration blew up; the step size does not resolve the
    /// fastest rate in the generator.
    #[error("integration unstable at t = {t}: matrix entry reached {max_entry:.3e} (> 10); \
             reduce dt below {dt}")]
    Unstable { t: f64, dt: f64, max_entry: f64 },

    /// |n_R − ω_p·dn_R/dΔ| fell below 1e-6: the group velocity is in a
    /// superluminal/singular regime where V_g = c/(n_R + ω dn/dω) breaks down.
    #[error("group-velocity denominator n_R - ω_p·dn_R/dΔ = {denominator:.3e} is below 1e-6; \
             superluminal/singular dispersion regime")]
    VanishingDenominator { denominator: f64 },

    /// A parameter name could not be parsed into a [`crate::ParameterId`].
    #[error("unknown parameter id {0:?}; expected one of: delta, omega_c, omega_p, f0sq")]
    UnknownParameter(String),

    /// A sweep specification violated its invariants (axis count, bounds, …).
    #[error("invalid sweep spec: {0}")]
    InvalidSweep(String),
}
