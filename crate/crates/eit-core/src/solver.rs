//! Steady-state and time-domain solvers for the averaged generator.
//!
//! The steady state solves G·vec σ = 0 with Tr σ = 1. Because the trace row
//! annihilates G, the 9×9 system is rank-deficient by construction; we replace
//! the σ₃₃ population row with the trace row (1,1,1,0,…,0) and right-hand side
//! 1, keeping the ground-state population rows — which carry the noise
//! exchange physics — intact for residual reporting. The replaced system is
//! solved by LU with partial pivoting plus one step of iterative refinement.
//!
//! A fixed-step 4th-order propagator serves as an independent oracle: starting
//! from any density matrix it must relax to the same steady state, and it is
//! the only route in genuinely degenerate regimes (e.g. the two-level limit
//! Ω_c = f₀² = Γ₂ = 0, where level |2⟩ decouples and the steady state is not
//! unique).

use crate::error::EitError;
use crate::liouvillian::{build_generator_derivative, Liouvillian, Matrix9, ParameterId};
use crate::params::{ValidationReport, Violation};
use crate::state::{devectorize, idx, vectorize, DensityMatrix, StateVector9};
use nalgebra::LU;

/// How a steady state was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    LinearSolve,
    TimeIntegrate,
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveMethod::LinearSolve => write!(f, "linear-solve"),
            SolveMethod::TimeIntegrate => write!(f, "time-integrate"),
        }
    }
}

/// A steady state together with its defect under the original generator.
#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    /// Noise-averaged steady state σ.
    pub sigma: DensityMatrix,
    /// ∞-norm of G·vec σ restricted to the rows that were *not* replaced.
    /// ≤ 1e-10 for linear solves, ≤ 1e-8 for time integration.
    pub residual: f64,
    pub method: SolveMethod,
}

/// Relative pivot threshold below which a U-diagonal entry counts as zero.
const PIVOT_TOL: f64 = 1e-12;

/// Residual over all rows except the replaced σ₃₃ row.
fn residual_excluding_trace_row(g: &Matrix9, v: &StateVector9) -> f64 {
    let defect = g * v;
    let mut worst: f64 = 0.0;
    for r in 0..9 {
        if r != idx::P3 {
            worst = worst.max(defect[r].abs());
        }
    }
    worst
}

struct ReplacedSystem {
    a: Matrix9,
    lu: LU<f64, nalgebra::Const<9>, nalgebra::Const<9>>,
}

impl ReplacedSystem {
    /// Factors G with its σ₃₃ row replaced by the trace row, rejecting
    /// rank-deficient systems with the null-space dimension spelled out.
    fn factor(g: &Matrix9) -> Result<Self, EitError> {
        let mut a = *g;
        for j in 0..9 {
            a[(idx::P3, j)] = if j < 3 { 1.0 } else { 0.0 };
        }
        let lu = a.lu();
        let u = lu.u();
        let mut max_pivot: f64 = 0.0;
        for k in 0..9 {
            max_pivot = max_pivot.max(u[(k, k)].abs());
        }
        let null_dim = (0..9)
            .filter(|&k| u[(k, k)].abs() <= PIVOT_TOL * max_pivot)
            .count();
        if max_pivot == 0.0 || null_dim > 0 {
            return Err(EitError::SingularSystem {
                null_dim: if max_pivot == 0.0 { 9 } else { null_dim },
            });
        }
        Ok(ReplacedSystem { a, lu })
    }

    /// Solve A·x = b with one step of iterative refinement.
    fn solve_refined(&self, b: &StateVector9) -> StateVector9 {
        let mut x = self.lu.solve(b).expect("pivots checked non-zero");
        let r = b - self.a * x;
        if let Some(dx) = self.lu.solve(&r) {
            x += dx;
        }
        x
    }
}

fn require_decay_channel(gen: &Liouvillian) -> Result<(), EitError> {
    if gen.params.gamma1 + gen.params.gamma2 > 0.0 {
        Ok(())
    } else {
        Err(EitError::InvalidParams(ValidationReport {
            violations: vec![Violation {
                field: "gamma1",
                message: "no decay channel: gamma1 + gamma2 must be positive".to_string(),
            }],
        }))
    }
}

/// Computes the unique steady state of the averaged generator.
pub fn solve_steady_state(gen: &Liouvillian) -> Result<SteadyStateResult, EitError> {
    require_decay_channel(gen)?;
    let system = ReplacedSystem::factor(&gen.matrix)?;
    let mut b = StateVector9::zeros();
    b[idx::P3] = 1.0;
    let v = system.solve_refined(&b);
    Ok(SteadyStateResult {
        sigma: devectorize(&v),
        residual: residual_excluding_trace_row(&gen.matrix, &v),
        method: SolveMethod::LinearSolve,
    })
}

/// Steady state together with its exact parametric derivative d(vec σ)/dx.
///
/// Differentiating A·v = b at fixed right-hand side gives
/// A·(dv/dx) = −(∂G/∂x)·v with the replaced trace row contributing zero
/// (the trace of σ stays 1 along any parameter path). The same LU factors
/// serve both solves, so the derivative costs one extra back-substitution.
pub fn solve_steady_state_and_derivative(
    gen: &Liouvillian,
    wrt: ParameterId,
) -> Result<(SteadyStateResult, StateVector9), EitError> {
    require_decay_channel(gen)?;
    let system = ReplacedSystem::factor(&gen.matrix)?;
    let mut b = StateVector9::zeros();
    b[idx::P3] = 1.0;
    let v = system.solve_refined(&b);

    let mut rhs = -(build_generator_derivative(wrt) * v);
    rhs[idx::P3] = 0.0;
    let dv = system.solve_refined(&rhs);

    let result = SteadyStateResult {
        sigma: devectorize(&v),
        residual: residual_excluding_trace_row(&gen.matrix, &v),
        method: SolveMethod::LinearSolve,
    };
    Ok((result, dv))
}

/// Beyond this amplitude the integration has certainly blown up: every
/// physical entry of a density matrix is bounded by 1.
const INSTABILITY_BOUND: f64 = 10.0;

/// Fixed-step classical 4th-order integration of d(vec σ)/dt = G·vec σ.
///
/// Fixed step keeps the oracle bit-reproducible across runs. Times are in
/// units of 1/Γ. A trailing partial step covers any remainder of t_final not
/// divisible by dt.
pub fn propagate(
    gen: &Liouvillian,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix, EitError> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(EitError::InvalidParams(ValidationReport {
            violations: vec![Violation {
                field: "dt",
                message: format!("propagation needs dt > 0 and t_final >= 0, got dt = {dt}, t_final = {t_final}"),
            }],
        }));
    }
    let g = &gen.matrix;
    let mut v = vectorize(rho0);
    let n_full = (t_final / dt).floor() as u64;
    let remainder = t_final - n_full as f64 * dt;

    let step = |v: &mut StateVector9, h: f64, t: f64| -> Result<(), EitError> {
        let k1 = g * *v;
        let k2 = g * (*v + k1 * (0.5 * h));
        let k3 = g * (*v + k2 * (0.5 * h));
        let k4 = g * (*v + k3 * h);
        *v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let max_entry = v.amax();
        if max_entry > INSTABILITY_BOUND {
            return Err(EitError::Unstable {
                t: t + h,
                dt: h,
                max_entry,
            });
        }
        Ok(())
    };

    for k in 0..n_full {
        step(&mut v, dt, k as f64 * dt)?;
    }
    if remainder > 1e-12 * dt.max(1.0) {
        step(&mut v, remainder, n_full as f64 * dt)?;
    }
    Ok(devectorize(&v))
}

/// Steady state by relaxation: propagate from the ground state |1⟩⟨1| for
/// `t_final` and report the result with its residual. Independent oracle for
/// [`solve_steady_state`] and the only route when the linear system is
/// singular.
pub fn steady_state_via_propagation(
    gen: &Liouvillian,
    t_final: f64,
    dt: f64,
) -> Result<SteadyStateResult, EitError> {
    let sigma = propagate(gen, &DensityMatrix::ground(), t_final, dt)?;
    let v = vectorize(&sigma);
    Ok(SteadyStateResult {
        sigma,
        residual: residual_excluding_trace_row(&gen.matrix, &v),
        method: SolveMethod::TimeIntegrate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::build_averaged_generator;
    use crate::params::SystemParams;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn gen(params: &SystemParams) -> Liouvillian {
        build_averaged_generator(params).unwrap()
    }

    #[test]
    fn dark_state_gives_exact_transparency_on_two_photon_resonance() {
        let lv = gen(&SystemParams::reference_defaults());
        let ss = solve_steady_state(&lv).unwrap();
        assert!(ss.sigma.sigma31().im.abs() <= 1e-9);
        // Population parked in |1⟩ up to O(Ω_p²/Ω_c²) = 1e-6 leakage.
        assert!(ss.sigma.entries[(0, 0)].re > 1.0 - 5e-6);
        assert!(ss.residual <= 1e-10);
        assert_eq!(ss.method, SolveMethod::LinearSolve);
    }

    #[test]
    fn weak_probe_coherence_matches_adiabatic_elimination() {
        // At Δ = 0.5Γ the eliminated coherence is
        // σ₃₁ ≈ conj(Ω_p/(Δ + iΓ/2 − Ω_c²/Δ)) = −6.0e-4 + 2.0e-4 i.
        let lv = gen(&SystemParams::reference_defaults().with_delta(0.5));
        let s31 = solve_steady_state(&lv).unwrap().sigma.sigma31();
        assert_abs_diff_eq!(s31.re, -6.0e-4, epsilon = 1e-8);
        assert_abs_diff_eq!(s31.im, 2.0e-4, epsilon = 1e-8);
    }

    #[test]
    fn decoupled_level_is_reported_as_singular_with_null_dimension() {
        // Ω_c = f₀² = Γ₂ = 0 strands any population placed in |2⟩: one extra
        // zero mode survives the trace constraint.
        let mut p = SystemParams::reference_defaults();
        p.omega_c_rabi = 0.0;
        let lv = gen(&p);
        match solve_steady_state(&lv) {
            Err(EitError::SingularSystem { null_dim }) => assert_eq!(null_dim, 1),
            other => panic!("expected singular-system error, got {other:?}"),
        }
    }

    #[test]
    fn missing_decay_channel_is_rejected() {
        let mut p = SystemParams::reference_defaults();
        p.gamma1 = 0.0;
        let err = solve_steady_state(&gen(&p)).unwrap_err();
        assert!(err.to_string().contains("no decay channel"));
    }

    #[test]
    fn propagate_zero_time_returns_initial_state() {
        let lv = gen(&SystemParams::reference_defaults().with_f0sq(0.7));
        let rho0 = DensityMatrix::superposition_12();
        let rho = propagate(&lv, &rho0, 0.0, 1e-3).unwrap();
        assert_eq!(vectorize(&rho), vectorize(&rho0));
    }

    #[test]
    fn propagation_relaxes_to_the_linear_steady_state() {
        let lv = gen(&SystemParams::reference_defaults().with_delta(0.3).with_f0sq(0.7));
        let ss = solve_steady_state(&lv).unwrap();
        let relaxed = steady_state_via_propagation(&lv, 200.0, 1e-3).unwrap();
        let diff = (vectorize(&relaxed.sigma) - vectorize(&ss.sigma)).amax();
        assert!(diff <= 1e-7, "propagated state off by {diff:e}");
        assert!(relaxed.residual <= 1e-8);
        assert_eq!(relaxed.method, SolveMethod::TimeIntegrate);
    }

    #[test]
    fn trace_is_preserved_along_the_whole_trajectory() {
        let lv = gen(&SystemParams::reference_defaults().with_f0sq(1.6));
        // Checkpoints every 0.5/Γ reuse the previous state, so together they
        // form one continuous fixed-step trajectory to t = 50/Γ.
        let mut rho = DensityMatrix::maximally_mixed();
        for _ in 0..100 {
            rho = propagate(&lv, &rho, 0.5, 1e-3).unwrap();
            assert!((rho.trace().re - 1.0).abs() <= 1e-10);
            assert!(rho.hermiticity_error() == 0.0);
        }
    }

    #[test]
    fn oversized_steps_report_instability() {
        // dt far beyond the stability boundary of the fastest detuning mode.
        let lv = gen(&SystemParams::reference_defaults().with_delta(40.0));
        match propagate(&lv, &DensityMatrix::ground(), 50.0, 1.0) {
            Err(EitError::Unstable { max_entry, .. }) => assert!(max_entry > 10.0),
            other => panic!("expected instability, got {other:?}"),
        }
    }

    #[test]
    fn steady_state_derivative_matches_central_difference() {
        let p = SystemParams::reference_defaults().with_delta(0.3).with_f0sq(0.7);
        let (_, dv) = solve_steady_state_and_derivative(&gen(&p), ParameterId::Delta).unwrap();
        let h = 1e-4;
        let vp = vectorize(&solve_steady_state(&gen(&p.with_delta(0.3 + h))).unwrap().sigma);
        let vm = vectorize(&solve_steady_state(&gen(&p.with_delta(0.3 - h))).unwrap().sigma);
        let fd = (vp - vm) / (2.0 * h);
        assert!((dv - fd).amax() <= 1e-8);
    }

    fn scan_range_params() -> impl Strategy<Value = SystemParams> {
        (
            -3.0f64..3.0,
            0.2f64..2.2,
            0.0f64..2.0,
        )
            .prop_map(|(delta, omega_c, f0sq)| {
                SystemParams::reference_defaults()
                    .with_delta(delta)
                    .with_omega_c(omega_c)
                    .with_f0sq(f0sq)
            })
    }

    proptest! {
        #[test]
        fn steady_state_is_physical_across_scan_ranges(p in scan_range_params()) {
            let ss = solve_steady_state(&gen(&p)).unwrap();
            prop_assert!(ss.residual <= 1e-10);
            prop_assert!((ss.sigma.trace().re - 1.0).abs() <= 1e-12);
            prop_assert!(ss.sigma.hermiticity_error() == 0.0);
            prop_assert!(ss.sigma.min_eigenvalue() >= -1e-9);
        }

        #[test]
        fn coherence_has_definite_parity_in_detuning(p in scan_range_params()) {
            let plus = solve_steady_state(&gen(&p)).unwrap().sigma.sigma31();
            let minus = solve_steady_state(&gen(&p.with_delta(-p.delta))).unwrap().sigma.sigma31();
            // σ₃₁(−Δ) = −conj σ₃₁(Δ): Re odd, Im even.
            prop_assert!((plus.re + minus.re).abs() <= 1e-9);
            prop_assert!((plus.im - minus.im).abs() <= 1e-9);
        }

        #[test]
        fn propagated_states_stay_hermitian(p in scan_range_params(), which in 0usize..3) {
            let rho0 = match which {
                0 => DensityMatrix::ground(),
                1 => DensityMatrix::superposition_12(),
                _ => DensityMatrix::maximally_mixed(),
            };
            let rho = propagate(&gen(&p), &rho0, 2.0, 1e-2).unwrap();
            prop_assert!(rho.hermiticity_error() == 0.0);
            prop_assert!((rho.trace().re - 1.0).abs() <= 1e-10);
        }
    }
}
