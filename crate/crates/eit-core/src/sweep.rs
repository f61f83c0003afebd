//! Parameter-sweep engine behind the spectra and contour data.
//!
//! Three sweep families cover the standard scans: detuning scans of the
//! absorption spectrum at fixed noise strengths, noise scans of the group
//! velocity at fixed detunings, and the 2-D (Ω_c, f₀²) absorption grid at
//! resonance. Grid points are independent steady-state solves; they are
//! evaluated (optionally in parallel) and gathered by index, so the output is
//! byte-identical for any thread count. A failure at one grid point — e.g. a
//! singular steady state or a diverging group index — flags that record and
//! the sweep continues.

use crate::error::EitError;
use crate::liouvillian::build_averaged_generator;
use crate::observables::{absorption, refractive_index, response_from_coherence};
use crate::params::{validate_params, MediumParams, SystemParams};
use crate::solver::solve_steady_state_and_derivative;
use crate::state::idx;
use serde::Serialize;

pub use crate::liouvillian::ParameterId as AxisParam;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// One linearly spaced sweep axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

impl Axis {
    pub fn new(param: AxisParam, min: f64, max: f64, n_points: usize) -> Self {
        Axis { param, min, max, n_points }
    }

    fn validate(&self) -> Result<(), EitError> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(EitError::InvalidSweep(format!(
                "axis {:?} has non-finite bounds [{}, {}]",
                self.param, self.min, self.max
            )));
        }
        match self.n_points {
            0 => Err(EitError::InvalidSweep(format!(
                "axis {:?} needs at least one point",
                self.param
            ))),
            // A one-point axis is the degenerate sweep: a direct single solve.
            1 if self.min == self.max => Ok(()),
            1 => Err(EitError::InvalidSweep(format!(
                "single-point axis {:?} requires min == max, got [{}, {}]",
                self.param, self.min, self.max
            ))),
            _ if self.min < self.max => Ok(()),
            _ => Err(EitError::InvalidSweep(format!(
                "axis {:?} requires min < max, got [{}, {}]",
                self.param, self.min, self.max
            ))),
        }
    }

    /// The grid values, endpoints inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.n_points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                if i + 1 == self.n_points {
                    self.max
                } else {
                    self.min + i as f64 * step
                }
            })
            .collect()
    }

    fn apply(&self, params: &SystemParams, value: f64) -> SystemParams {
        let mut p = *params;
        match self.param {
            AxisParam::Delta => p.delta = value,
            AxisParam::OmegaC => p.omega_c_rabi = value,
            AxisParam::OmegaP => p.omega_p_rabi = value,
            AxisParam::F0Sq => p.f0sq = value,
        }
        p
    }
}

/// A 1-D or 2-D sweep specification over a fixed parameter baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis1: Axis,
    /// Second (inner) axis for contour grids.
    pub axis2: Option<Axis>,
    pub fixed: SystemParams,
    pub medium: MediumParams,
}

impl SweepSpec {
    /// Detuning scan behind the absorption/dispersion spectra: 601 points
    /// across Δ ∈ [−3Γ, 3Γ], resolving the EIT dip by ≥ 50 points.
    pub fn delta_scan(fixed: SystemParams, medium: MediumParams) -> Self {
        SweepSpec {
            axis1: Axis::new(AxisParam::Delta, -3.0, 3.0, 601),
            axis2: None,
            fixed,
            medium,
        }
    }

    /// Noise scan behind the group-velocity curves: f₀² ∈ [0, 2Γ].
    pub fn noise_scan(fixed: SystemParams, medium: MediumParams, n_points: usize) -> Self {
        SweepSpec {
            axis1: Axis::new(AxisParam::F0Sq, 0.0, 2.0, n_points),
            axis2: None,
            fixed,
            medium,
        }
    }

    /// Default resonance contour grid: 61×41 over Ω_c/Γ ∈ [0.2, 2.2] and
    /// f₀²/Γ ∈ [0, 2].
    pub fn contour_default(fixed: SystemParams, medium: MediumParams) -> Self {
        SweepSpec {
            axis1: Axis::new(AxisParam::OmegaC, 0.2, 2.2, 61),
            axis2: Some(Axis::new(AxisParam::F0Sq, 0.0, 2.0, 41)),
            fixed,
            medium,
        }
    }

    fn validate(&self) -> Result<(), EitError> {
        self.axis1.validate()?;
        if let Some(axis2) = &self.axis2 {
            axis2.validate()?;
            if axis2.param == self.axis1.param {
                return Err(EitError::InvalidSweep(format!(
                    "both axes sweep {:?}; axis parameters must differ",
                    self.axis1.param
                )));
            }
        }
        let medium_report = self.medium.validate();
        if !medium_report.is_valid() {
            return Err(EitError::InvalidParams(medium_report));
        }
        Ok(())
    }
}

/// One grid point: inputs and observables together, so dumped files are
/// self-describing. A point where the solver or the group-velocity
/// denominator failed carries the error text and NaN for the affected
/// outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRecord {
    pub delta: f64,
    pub omega_c: f64,
    pub f0sq: f64,
    pub re_sigma31: f64,
    pub im_sigma31: f64,
    pub alpha: f64,
    pub n_r: f64,
    pub v_g: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Evaluates one parameter point into a record, flagging failures in place.
fn point_record(params: &SystemParams, medium: &MediumParams) -> SpectrumRecord {
    let mut rec = SpectrumRecord {
        delta: params.delta,
        omega_c: params.omega_c_rabi,
        f0sq: params.f0sq,
        re_sigma31: f64::NAN,
        im_sigma31: f64::NAN,
        alpha: f64::NAN,
        n_r: f64::NAN,
        v_g: f64::NAN,
        error: None,
    };

    let solved = (|| {
        let report = validate_params(params);
        if !report.is_valid() {
            return Err(EitError::InvalidParams(report));
        }
        let gen = build_averaged_generator(params)?;
        solve_steady_state_and_derivative(&gen, AxisParam::Delta)
    })();

    match solved {
        Err(e) => rec.error = Some(e.to_string()),
        Ok((ss, dv)) => {
            let s31 = ss.sigma.sigma31();
            rec.re_sigma31 = s31.re;
            rec.im_sigma31 = s31.im;
            match response_from_coherence(s31, dv[idx::RE13], params, medium) {
                Ok(r) => {
                    rec.alpha = r.alpha;
                    rec.n_r = r.n_r;
                    rec.v_g = r.v_g;
                }
                // Only V_g is undefined at a group-index zero; absorption and
                // refraction remain well defined and are still reported.
                Err(e) => {
                    rec.alpha = absorption(s31, params, medium);
                    rec.n_r = refractive_index(s31, params, medium);
                    rec.error = Some(e.to_string());
                }
            }
        }
    }
    rec
}

/// Runs the sweep and returns one record per grid point in row-major order
/// (axis1 outer, axis2 inner). Deterministic for any parallelism.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SpectrumRecord>, EitError> {
    spec.validate()?;
    let outer = spec.axis1.values();
    let inner = spec.axis2.as_ref().map(|a| a.values());

    let points: Vec<SystemParams> = match (&spec.axis2, &inner) {
        (Some(axis2), Some(inner_values)) => outer
            .iter()
            .flat_map(|&v1| {
                let p1 = spec.axis1.apply(&spec.fixed, v1);
                inner_values.iter().map(move |&v2| axis2.apply(&p1, v2))
            })
            .collect(),
        _ => outer
            .iter()
            .map(|&v1| spec.axis1.apply(&spec.fixed, v1))
            .collect(),
    };

    #[cfg(feature = "parallel")]
    let records = points.par_iter().map(|p| point_record(p, &spec.medium)).collect();
    #[cfg(not(feature = "parallel"))]
    let records = points.iter().map(|p| point_record(p, &spec.medium)).collect();
    Ok(records)
}

/// Absorption over a 2-D grid with its axis headers; iso-line extraction is
/// left to external plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourGrid {
    /// Row coordinate: coupling Rabi frequency values.
    pub omega_c: Vec<f64>,
    /// Column coordinate: noise strength values.
    pub f0sq: Vec<f64>,
    /// alpha[row][col] in 1/m; NaN where the point is flagged.
    pub alpha: Vec<Vec<f64>>,
}

/// Evaluates an (Ω_c, f₀²) absorption grid at fixed detuning.
pub fn contour_grid(spec: &SweepSpec) -> Result<ContourGrid, EitError> {
    if spec.axis1.param != AxisParam::OmegaC {
        return Err(EitError::InvalidSweep(format!(
            "contour grids sweep omega_c on axis 1, got {:?}",
            spec.axis1.param
        )));
    }
    let axis2 = spec.axis2.as_ref().ok_or_else(|| {
        EitError::InvalidSweep("contour grids need a second axis over f0sq".to_string())
    })?;
    if axis2.param != AxisParam::F0Sq {
        return Err(EitError::InvalidSweep(format!(
            "contour grids sweep f0sq on axis 2, got {:?}",
            axis2.param
        )));
    }

    let records = run_sweep(spec)?;
    let omega_c = spec.axis1.values();
    let f0sq = axis2.values();
    let alpha = records
        .chunks(f0sq.len())
        .map(|row| row.iter().map(|r| r.alpha).collect())
        .collect();
    Ok(ContourGrid { omega_c, f0sq, alpha })
}

/// Shape of the transparency dip in a detuning scan, in the scan's Γ units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DipMetrics {
    /// Absorption at the dip floor (the grid minimum).
    pub alpha_floor: f64,
    /// Peak-to-floor absorption contrast.
    pub depth: f64,
    /// Full width of the dip at half its depth.
    pub fwhd: f64,
}

/// Measures the transparency dip of a single-axis detuning scan: floor at the
/// interior minimum between the two absorption shoulders (the grid minimum
/// itself can sit on a wing once noise raises the dip floor above the far
/// wings), depth to the absorption peak, and the width between the two
/// half-depth crossings scanned outward from the floor. Returns `None` when
/// any record failed or no dip is bracketed (flat or monotone spectra).
pub fn dip_metrics(records: &[SpectrumRecord]) -> Option<DipMetrics> {
    if records.len() < 3 || records.iter().any(|r| !r.alpha.is_finite()) {
        return None;
    }
    let argmax = |range: std::ops::Range<usize>| -> usize {
        range
            .min_by(|&a, &b| records[b].alpha.partial_cmp(&records[a].alpha).unwrap())
            .unwrap()
    };
    let i_left = argmax(0..records.len() / 2);
    let i_right = argmax(records.len() / 2..records.len());
    let i_floor = (i_left..=i_right)
        .min_by(|&a, &b| records[a].alpha.partial_cmp(&records[b].alpha).unwrap())?;
    if i_floor == i_left || i_floor == i_right {
        return None;
    }
    let floor = records[i_floor].alpha;
    let peak = records.iter().map(|r| r.alpha).fold(f64::MIN, f64::max);
    let depth = peak - floor;
    if !(depth > 0.0) {
        return None;
    }
    let level = floor + 0.5 * depth;

    // Linear interpolation of the first level crossing walking from the floor
    // toward each end of the grid.
    let crossing = |mut i: usize, step: isize| -> Option<f64> {
        loop {
            let j = i.checked_add_signed(step)?;
            if j >= records.len() {
                return None;
            }
            let (a0, a1) = (records[i].alpha, records[j].alpha);
            if (a0 < level) != (a1 < level) {
                let frac = (level - a0) / (a1 - a0);
                return Some(records[i].delta + frac * (records[j].delta - records[i].delta));
            }
            i = j;
        }
    };
    let left = crossing(i_floor, -1)?;
    let right = crossing(i_floor, 1)?;
    Some(DipMetrics { alpha_floor: floor, depth, fwhd: right - left })
}
