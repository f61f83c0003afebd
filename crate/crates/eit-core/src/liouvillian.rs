//! The noise-averaged linear generator of the Λ-system master equation.
//!
//! After averaging the stochastic equations of motion over the Gaussian white
//! noise (Novikov's theorem) and dropping terms rotating at e^{±2iω_μt}, the
//! dynamics of the averaged density matrix σ close into a linear system
//! d(vec σ)/dt = G·vec σ on the real 9-vectorization. The noise enters in
//! exactly three ways:
//!
//! * symmetric population exchange between |1⟩ and |2⟩ at rate f₀²,
//! * decay of the ground-state coherence σ₁₂ at rate f₀²,
//! * extra decay f₀²/2 on the optical coherences σ₁₃ and σ₂₃, on top of the
//!   spontaneous (Γ₁+Γ₂)/2.
//!
//! Equivalently (and verified in the tests): the averaged generator is the
//! Lindblad generator with jump operators |1⟩⟨3| (rate Γ₁), |2⟩⟨3| (rate Γ₂),
//! |1⟩⟨2| and |2⟩⟨1| (both at rate f₀²), and Hamiltonian
//! H = −Δ|1⟩⟨1| − Ω_p(|3⟩⟨1|+|1⟩⟨3|) − Ω_c(|3⟩⟨2|+|2⟩⟨3|).
//! Complete positivity of the averaged evolution is therefore structural.

use crate::error::EitError;
use crate::params::{SystemParams, ValidationReport, Violation};
use crate::state::idx::*;
use nalgebra::SMatrix;
use std::str::FromStr;

pub type Matrix9 = SMatrix<f64, 9, 9>;

/// The averaged generator together with the parameters it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    /// Real 9×9 G with d(vec σ)/dt = G·vec σ.
    pub matrix: Matrix9,
    /// Snapshot of the parameters used to build `matrix`.
    pub params: SystemParams,
}

impl Liouvillian {
    /// ∞-norm of the left trace row (1,1,1,0,…,0)·G. Zero (to rounding) for
    /// every valid generator: population derivatives sum to zero.
    pub fn trace_annihilation_error(&self) -> f64 {
        let g = &self.matrix;
        let mut worst: f64 = 0.0;
        for j in 0..9 {
            worst = worst.max((g[(P1, j)] + g[(P2, j)] + g[(P3, j)]).abs());
        }
        worst
    }
}

/// Structural validity needed to *build* a generator: finite entries and
/// non-negative rates. Deliberately weaker than [`crate::validate_params`]:
/// Ω_p = 0 or Γ₁ = Γ₂ = 0 make observables or the steady state degenerate,
/// but the generator itself (and time propagation under it) is perfectly well
/// defined there — the pure-dephasing limits depend on exactly those points.
pub fn validate_structural(params: &SystemParams) -> ValidationReport {
    let mut violations = Vec::new();
    let mut check = |field: &'static str, value: f64, allow_negative: bool| {
        if !value.is_finite() {
            violations.push(Violation {
                field,
                message: format!("{field} must be finite"),
            });
        } else if !allow_negative && value < 0.0 {
            violations.push(Violation {
                field,
                message: format!("{field} must be non-negative"),
            });
        }
    };
    check("omega_p_rabi", params.omega_p_rabi, false);
    check("omega_c_rabi", params.omega_c_rabi, false);
    check("delta", params.delta, true);
    check("gamma1", params.gamma1, false);
    check("gamma2", params.gamma2, false);
    check("f0sq", params.f0sq, false);
    check("omega_mu", params.omega_mu, false);
    ValidationReport { violations }
}

/// Builds the averaged generator G for the given parameters.
pub fn build_averaged_generator(params: &SystemParams) -> Result<Liouvillian, EitError> {
    let report = validate_structural(params);
    if !report.is_valid() {
        return Err(EitError::InvalidParams(report));
    }

    let op = params.omega_p_rabi;
    let oc = params.omega_c_rabi;
    let d = params.delta;
    let g1 = params.gamma1;
    let g2 = params.gamma2;
    let f2 = params.f0sq;
    // Optical coherences relax at the spontaneous rate plus half the noise.
    let gcoh = 0.5 * (f2 + g1 + g2);

    let mut g = Matrix9::zeros();

    // σ̇₁₁: probe-drive population transfer, feeding by |3⟩→|1⟩ decay, and
    // noise-induced exchange with |2⟩.
    g[(P1, IM13)] = 2.0 * op;
    g[(P1, P3)] = g1;
    g[(P1, P2)] = f2;
    g[(P1, P1)] = -f2;

    // σ̇₂₂: coupling-drive transfer, |3⟩→|2⟩ decay, opposite noise exchange.
    g[(P2, IM23)] = 2.0 * oc;
    g[(P2, P3)] = g2;
    g[(P2, P1)] = f2;
    g[(P2, P2)] = -f2;

    // σ̇₃₃: loses both drive terms and decays with Γ₁+Γ₂ (trace closure).
    g[(P3, IM13)] = -2.0 * op;
    g[(P3, IM23)] = -2.0 * oc;
    g[(P3, P3)] = -(g1 + g2);

    // σ̇₁₂ (ground coherence): detuning rotation, noise dephasing at the full
    // f₀², and Raman coupling through both optical coherences.
    g[(RE12, IM12)] = -d;
    g[(RE12, RE12)] = -f2;
    g[(RE12, IM23)] = op;
    g[(RE12, IM13)] = oc;
    g[(IM12, RE12)] = d;
    g[(IM12, IM12)] = -f2;
    g[(IM12, RE23)] = op;
    g[(IM12, RE13)] = -oc;

    // σ̇₁₃ (probe coherence): detuning rotation, total coherence decay, and
    // the probe source term Ω_p(σ₃₃−σ₁₁).
    g[(RE13, IM13)] = -d;
    g[(RE13, RE13)] = -gcoh;
    g[(RE13, IM12)] = oc;
    g[(IM13, RE13)] = d;
    g[(IM13, IM13)] = -gcoh;
    g[(IM13, RE12)] = -oc;
    g[(IM13, P3)] = op;
    g[(IM13, P1)] = -op;

    // σ̇₂₃ (coupling coherence): no detuning (coupling on resonance), total
    // coherence decay, source term Ω_c(σ₃₃−σ₂₂).
    g[(RE23, RE23)] = -gcoh;
    g[(RE23, IM12)] = -op;
    g[(IM23, IM23)] = -gcoh;
    g[(IM23, RE12)] = -op;
    g[(IM23, P3)] = oc;
    g[(IM23, P2)] = -oc;

    Ok(Liouvillian {
        matrix: g,
        params: *params,
    })
}

/// Parameters G depends on affinely; derivatives are exact constant matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterId {
    Delta,
    OmegaC,
    OmegaP,
    F0Sq,
}

impl FromStr for ParameterId {
    type Err = EitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "delta" => Ok(ParameterId::Delta),
            "omega_c" => Ok(ParameterId::OmegaC),
            "omega_p" => Ok(ParameterId::OmegaP),
            "f0sq" => Ok(ParameterId::F0Sq),
            other => Err(EitError::UnknownParameter(other.to_string())),
        }
    }
}

/// ∂G/∂(wrt). G is affine in each of Δ, Ω_c, Ω_p and f₀² separately, so these
/// matrices are parameter-independent and satisfy G(x) = G(0) + x·∂G/∂x.
pub fn build_generator_derivative(wrt: ParameterId) -> Matrix9 {
    let mut dg = Matrix9::zeros();
    match wrt {
        // Δ multiplies the rotation blocks of σ₁₂ and σ₁₃ only.
        ParameterId::Delta => {
            dg[(RE12, IM12)] = -1.0;
            dg[(IM12, RE12)] = 1.0;
            dg[(RE13, IM13)] = -1.0;
            dg[(IM13, RE13)] = 1.0;
        }
        ParameterId::OmegaC => {
            dg[(P2, IM23)] = 2.0;
            dg[(P3, IM23)] = -2.0;
            dg[(RE12, IM13)] = 1.0;
            dg[(IM12, RE13)] = -1.0;
            dg[(RE13, IM12)] = 1.0;
            dg[(IM13, RE12)] = -1.0;
            dg[(IM23, P3)] = 1.0;
            dg[(IM23, P2)] = -1.0;
        }
        ParameterId::OmegaP => {
            dg[(P1, IM13)] = 2.0;
            dg[(P3, IM13)] = -2.0;
            dg[(RE12, IM23)] = 1.0;
            dg[(IM12, RE23)] = 1.0;
            dg[(IM13, P3)] = 1.0;
            dg[(IM13, P1)] = -1.0;
            dg[(RE23, IM12)] = -1.0;
            dg[(IM23, RE12)] = -1.0;
        }
        // f₀² exchanges the ground populations, dephases σ₁₂ at full rate
        // and each optical coherence at half rate.
        ParameterId::F0Sq => {
            dg[(P1, P1)] = -1.0;
            dg[(P1, P2)] = 1.0;
            dg[(P2, P1)] = 1.0;
            dg[(P2, P2)] = -1.0;
            dg[(RE12, RE12)] = -1.0;
            dg[(IM12, IM12)] = -1.0;
            dg[(RE13, RE13)] = -0.5;
            dg[(IM13, IM13)] = -0.5;
            dg[(RE23, RE23)] = -0.5;
            dg[(IM23, IM23)] = -0.5;
        }
    }
    dg
}
