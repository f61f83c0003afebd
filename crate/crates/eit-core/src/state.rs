//! Density matrix of the three-level system and its real 9-vectorization.
//!
//! A Hermitian 3×3 ρ has nine real degrees of freedom. The fixed component
//! order
//!
//! ```text
//! (ρ₁₁, ρ₂₂, ρ₃₃, Re ρ₁₂, Im ρ₁₂, Re ρ₁₃, Im ρ₁₃, Re ρ₂₃, Im ρ₂₃)
//! ```
//!
//! makes the equations of motion a real 9×9 linear system in which
//! hermiticity is structural (it cannot be violated by construction) and the
//! trace is the literal row sum of the first three components.

use nalgebra::{Matrix3, SMatrix, SVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;

/// Real 9-vector holding a Hermitian 3×3 matrix in the fixed order above.
pub type StateVector9 = SVector<f64, 9>;

/// Indices of the vectorized components, to keep generator rows readable.
pub mod idx {
    pub const P1: usize = 0;
    pub const P2: usize = 1;
    pub const P3: usize = 2;
    pub const RE12: usize = 3;
    pub const IM12: usize = 4;
    pub const RE13: usize = 5;
    pub const IM13: usize = 6;
    pub const RE23: usize = 7;
    pub const IM23: usize = 8;
}

/// 3×3 complex density matrix over the levels |1⟩, |2⟩, |3⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    pub entries: Matrix3<C64>,
}

impl DensityMatrix {
    pub fn new(entries: Matrix3<C64>) -> Self {
        DensityMatrix { entries }
    }

    /// Pure ground state |1⟩⟨1| — the natural initial condition for every
    /// relaxation run here.
    pub fn ground() -> Self {
        let mut m = Matrix3::zeros();
        m[(0, 0)] = C64::new(1.0, 0.0);
        DensityMatrix { entries: m }
    }

    /// Pure state |level⟩⟨level| with `level` ∈ {0, 1, 2} for |1⟩, |2⟩, |3⟩.
    pub fn pure(level: usize) -> Self {
        assert!(level < 3, "level index out of range");
        let mut m = Matrix3::zeros();
        m[(level, level)] = C64::new(1.0, 0.0);
        DensityMatrix { entries: m }
    }

    /// Equal superposition (|1⟩+|2⟩)/√2 as a projector; its ρ₁₂ = 1/2 is the
    /// canonical probe of pure dephasing.
    pub fn superposition_12() -> Self {
        let h = C64::new(0.5, 0.0);
        let mut m = Matrix3::zeros();
        m[(0, 0)] = h;
        m[(1, 1)] = h;
        m[(0, 1)] = h;
        m[(1, 0)] = h;
        DensityMatrix { entries: m }
    }

    /// Maximally mixed state 1/3.
    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            entries: Matrix3::identity() * C64::new(1.0 / 3.0, 0.0),
        }
    }

    pub fn trace(&self) -> C64 {
        self.entries[(0, 0)] + self.entries[(1, 1)] + self.entries[(2, 2)]
    }

    /// σ₃₁ = ⟨3|ρ|1⟩, the coherence that carries the probe response.
    pub fn sigma31(&self) -> C64 {
        self.entries[(2, 0)]
    }

    /// Largest absolute entry-wise deviation from hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.entries;
        let mut err: f64 = 0.0;
        for i in 0..3 {
            err = err.max(m[(i, i)].im.abs());
            for j in (i + 1)..3 {
                err = err.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// Eigenvalues of the Hermitian part, ascending.
    ///
    /// A Hermitian H = A + iB shares its spectrum (doubled) with the real
    /// symmetric 6×6 embedding [[A, −B], [B, A]]; the symmetric QR
    /// factorization of that embedding is backward-stable, so degenerate
    /// spectra (pure states have a double eigenvalue 0) come out accurate to
    /// machine rounding rather than the √ε of closed-form root extraction.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let m = &self.entries;
        let mut embed = SMatrix::<f64, 6, 6>::zeros();
        for i in 0..3 {
            for j in 0..3 {
                // Hermitian part: (m + m†)/2 guards callers that hold
                // slightly asymmetric numerical matrices.
                let e = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                embed[(i, j)] = e.re;
                embed[(i + 3, j + 3)] = e.re;
                embed[(i + 3, j)] = e.im;
                embed[(i, j + 3)] = -e.im;
            }
        }
        let mut doubled: Vec<f64> = embed.symmetric_eigen().eigenvalues.iter().copied().collect();
        doubled.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Each eigenvalue of H appears twice; sorted pairs sit adjacent.
        [doubled[0], doubled[2], doubled[4]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Packs a Hermitian ρ into the fixed real 9-vector order. Off-diagonal
/// entries are taken from the upper triangle; callers should hold Hermitian
/// matrices (see [`DensityMatrix::hermiticity_error`]).
pub fn vectorize(rho: &DensityMatrix) -> StateVector9 {
    let m = &rho.entries;
    StateVector9::from_column_slice(&[
        m[(0, 0)].re,
        m[(1, 1)].re,
        m[(2, 2)].re,
        m[(0, 1)].re,
        m[(0, 1)].im,
        m[(0, 2)].re,
        m[(0, 2)].im,
        m[(1, 2)].re,
        m[(1, 2)].im,
    ])
}

/// Rebuilds the (exactly Hermitian) density matrix from its 9-vector.
pub fn devectorize(v: &StateVector9) -> DensityMatrix {
    let mut m = Matrix3::zeros();
    m[(0, 0)] = C64::new(v[idx::P1], 0.0);
    m[(1, 1)] = C64::new(v[idx::P2], 0.0);
    m[(2, 2)] = C64::new(v[idx::P3], 0.0);
    m[(0, 1)] = C64::new(v[idx::RE12], v[idx::IM12]);
    m[(1, 0)] = C64::new(v[idx::RE12], -v[idx::IM12]);
    m[(0, 2)] = C64::new(v[idx::RE13], v[idx::IM13]);
    m[(2, 0)] = C64::new(v[idx::RE13], -v[idx::IM13]);
    m[(1, 2)] = C64::new(v[idx::RE23], v[idx::IM23]);
    m[(2, 1)] = C64::new(v[idx::RE23], -v[idx::IM23]);
    DensityMatrix { entries: m }
}
