//! Simulation of electromagnetically induced transparency (EIT) in a
//! three-level Λ system whose dipole-forbidden |1⟩↔|2⟩ transition is driven
//! by externally injected Gaussian white noise.
//!
//! The crate exposes two routes to the same physics:
//!
//! * the **noise-averaged** master equation — a real, linear 9×9 generator for
//!   the vectorized density matrix, solved directly for its steady state
//!   ([`solver::solve_steady_state`]) or propagated in time
//!   ([`solver::propagate`]); and
//! * the **pre-averaged stochastic** equations with an explicit white-noise
//!   realization per trajectory ([`stochastic::integrate_stochastic`]), whose
//!   ensemble mean must reproduce the averaged generator — the Novikov-theorem
//!   consistency check ([`stochastic::validate_novikov`]).
//!
//! Steady-state coherences map to the probe absorption coefficient, refractive
//! index and group velocity in [`observables`], and [`sweep`] evaluates those
//! observables over detuning / coupling-strength / noise-strength grids.
//!
//! All rates and frequencies are dimensionless in units of Γ ≡ Γ₁ (the
//! |3⟩→|1⟩ spontaneous decay rate); physical units enter only through
//! [`params::MediumParams`] when observables are formed.

pub mod error;
pub mod liouvillian;
pub mod observables;
pub mod params;
pub mod solver;
pub mod state;
pub mod stochastic;
pub mod sweep;

pub use error::EitError;
pub use liouvillian::{build_averaged_generator, build_generator_derivative, Liouvillian, ParameterId};
pub use observables::{
    absorption, alpha_reference, group_velocity, optical_response, refractive_index,
    DerivativeMethod, OpticalResponse, C_LIGHT,
};
pub use params::{validate_params, GammaConvention, MediumParams, SystemParams, ValidationReport};
pub use solver::{
    propagate, solve_steady_state, solve_steady_state_and_derivative,
    steady_state_via_propagation, SolveMethod, SteadyStateResult,
};
pub use state::{devectorize, vectorize, DensityMatrix, StateVector9};
pub use stochastic::{
    ensemble_series, integrate_stochastic, integrate_with_noise, run_ensemble, validate_novikov,
    EnsembleEstimate, NoiseTrajectory, NovikovReport, Verdict,
};
pub use sweep::{
    contour_grid, dip_metrics, run_sweep, Axis, AxisParam, ContourGrid, DipMetrics,
    SpectrumRecord, SweepSpec,
};
