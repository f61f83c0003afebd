//! End-to-end acceptance suite: one test per headline physical claim, each
//! printing a single PASS line (visible with `--nocapture`) or failing with
//! the measured numbers.
//!
//! The checks pin the physics, not implementation details: perfect EIT at the
//! dark state, noise-degraded transparency, slow light at the m/s scale and
//! its noise-induced speed-up, agreement between the linear steady state and
//! long-time integration, Monte-Carlo confirmation of the Novikov averaging,
//! conjugation symmetry of the spectra, and the two-level Lorentzian limit.

use eit_core::{
    alpha_reference, build_averaged_generator, ensemble_series, optical_response, propagate,
    run_sweep, solve_steady_state, steady_state_via_propagation, validate_novikov, vectorize,
    DensityMatrix, DerivativeMethod, EitError, GammaConvention, MediumParams, SpectrumRecord,
    SweepSpec, SystemParams, Verdict,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn medium() -> MediumParams {
    MediumParams::rb85(GammaConvention::RadPerSec)
}

fn response_at(delta: f64, f0sq: f64) -> eit_core::OpticalResponse {
    let p = SystemParams::reference_defaults().with_delta(delta).with_f0sq(f0sq);
    optical_response(&p, &medium(), DerivativeMethod::AnalyticDerivative).unwrap()
}

/// 601-point detuning scan at the given noise strength.
fn spectrum(f0sq: f64) -> Vec<SpectrumRecord> {
    let spec = SweepSpec::delta_scan(SystemParams::reference_defaults().with_f0sq(f0sq), medium());
    run_sweep(&spec).unwrap()
}

/// Linear interpolation of the Δ > 0 side crossing of `level`, scanning
/// outward from the grid center; `records` must be a symmetric Δ-grid.
fn outward_crossing(records: &[SpectrumRecord], level: f64) -> f64 {
    let center = records.len() / 2;
    for i in center..records.len() - 1 {
        let (a0, a1) = (records[i].alpha, records[i + 1].alpha);
        if (a0 < level) != (a1 < level) {
            let frac = (level - a0) / (a1 - a0);
            return records[i].delta + frac * (records[i + 1].delta - records[i].delta);
        }
    }
    panic!("level {level} never crossed on the positive-Δ side");
}

/// Width (in Γ) of the transparency dip at half its depth: between the dip
/// floor at Δ = 0 and the flanking absorption maxima.
fn dip_half_depth_width(records: &[SpectrumRecord]) -> f64 {
    let floor = records[records.len() / 2].alpha;
    let peak = records.iter().map(|r| r.alpha).fold(f64::MIN, f64::max);
    2.0 * outward_crossing(records, 0.5 * (floor + peak))
}

/// Full width at half maximum of the overall absorption line: the outermost
/// half-maximum crossings, scanned inward from the wings.
fn line_half_max_width(records: &[SpectrumRecord]) -> f64 {
    let peak = records.iter().map(|r| r.alpha).fold(f64::MIN, f64::max);
    let level = 0.5 * peak;
    for i in (0..records.len() - 1).rev() {
        let (a0, a1) = (records[i].alpha, records[i + 1].alpha);
        if (a0 < level) != (a1 < level) && records[i].delta > 0.0 {
            let frac = (level - a0) / (a1 - a0);
            let right = records[i].delta + frac * (records[i + 1].delta - records[i].delta);
            return 2.0 * right;
        }
    }
    panic!("half-maximum never crossed");
}

#[test]
fn a1_perfect_transparency_at_the_dark_state() {
    let ss = solve_steady_state(&build_averaged_generator(&SystemParams::reference_defaults()).unwrap())
        .unwrap();
    let im31 = ss.sigma.sigma31().im;
    let alpha0 = response_at(0.0, 0.0).alpha;
    let alpha_ref = alpha_reference(&SystemParams::reference_defaults(), &medium()).unwrap();
    let ratio = alpha0.abs() / alpha_ref;
    assert!(
        im31.abs() <= 1e-9,
        "A1 FAIL: |Im sigma31| = {:e} at the dark state",
        im31.abs()
    );
    assert!(ratio <= 1e-6, "A1 FAIL: alpha(0)/alpha(3G) = {ratio:e}");
    println!("A1 PASS: |Im sigma31| = {:.2e} <= 1e-9, alpha(0)/alpha(3G) = {ratio:.2e} <= 1e-6", im31.abs());
}

#[test]
fn a2_noise_fills_and_broadens_the_spectrum() {
    let scans: Vec<(f64, Vec<SpectrumRecord>)> =
        [0.0, 0.7, 1.6].iter().map(|&f2| (f2, spectrum(f2))).collect();
    let alpha0: Vec<f64> = scans.iter().map(|(_, r)| r[r.len() / 2].alpha).collect();
    assert!(
        alpha0[0] < alpha0[1] && alpha0[1] < alpha0[2],
        "A2 FAIL: resonance absorption not strictly increasing: {alpha0:?}"
    );

    // Noise raises the resonant absorption and broadens the absorption *line*
    // overall. (The transparency dip itself narrows as it fills in — printed
    // below for reference.)
    let line_widths: Vec<f64> = scans.iter().map(|(_, r)| line_half_max_width(r)).collect();
    assert!(
        line_widths[0] <= line_widths[1] && line_widths[1] <= line_widths[2],
        "A2 FAIL: absorption line width not non-decreasing: {line_widths:?}"
    );

    let dip_widths: Vec<f64> = scans.iter().map(|(_, r)| dip_half_depth_width(r)).collect();
    println!(
        "A2 PASS: alpha(0) = {:.4e} < {:.4e} < {:.4e} 1/m; line FWHM = {:.3} <= {:.3} <= {:.3} G (dip half-depth widths {:.3}, {:.3}, {:.3} G shrink as the dip fills)",
        alpha0[0], alpha0[1], alpha0[2],
        line_widths[0], line_widths[1], line_widths[2],
        dip_widths[0], dip_widths[1], dip_widths[2],
    );
}

#[test]
fn a3_slow_light_magnitude_matches_the_known_scale() {
    let vg_rad = response_at(0.0, 0.0).v_g;
    let p = SystemParams::reference_defaults();
    let vg_2pi = optical_response(
        &p,
        &MediumParams::rb85(GammaConvention::TwoPiHz),
        DerivativeMethod::AnalyticDerivative,
    )
    .unwrap()
    .v_g;
    let rel = (vg_rad - 0.52).abs() / 0.52;
    assert!(
        rel <= 0.35,
        "A3 FAIL: V_g(0,0) = {vg_rad} m/s, {:.0}% from the 0.52 m/s benchmark",
        rel * 100.0
    );
    println!(
        "A3 PASS: V_g(0,0) = {vg_rad:.4} m/s within 35% of 0.52 m/s (Gamma = 5e6 rad/s convention; 2pi*5e6 gives {vg_2pi:.4} m/s)"
    );
}

#[test]
fn a4_noise_reduces_the_slowing_down() {
    let trio = [0.0, 0.7, 1.6];
    let on_res: Vec<eit_core::OpticalResponse> =
        trio.iter().map(|&f2| response_at(0.0, f2)).collect();
    let near_res: Vec<eit_core::OpticalResponse> =
        trio.iter().map(|&f2| response_at(0.25, f2)).collect();

    // The slowing factor n_g = c/V_g falls monotonically with noise; V_g
    // itself passes through a pole (n_g = 0 near f0^2 ~ 1.4) where its sign
    // flips, so monotonicity is asserted on n_g.
    let ng0: Vec<f64> = on_res.iter().map(|r| r.group_index()).collect();
    let ng25: Vec<f64> = near_res.iter().map(|r| r.group_index()).collect();
    assert!(
        ng0[0] > ng0[1] && ng0[1] > ng0[2],
        "A4 FAIL: slowing factor at Delta=0 not strictly decreasing: {ng0:?}"
    );
    assert!(
        ng25[0] > ng25[1] && ng25[1] > ng25[2],
        "A4 FAIL: slowing factor at Delta=0.25G not strictly decreasing: {ng25:?}"
    );
    for r in &near_res {
        assert!(
            r.v_g.is_finite(),
            "A4 FAIL: V_g at Delta=0.25G not finite"
        );
    }
    // Under noise the near-resonance curve is faster than the zero-noise
    // resonant light (the noise-scan ordering).
    for (f2, ng) in trio.iter().zip(&ng25).skip(1) {
        assert!(
            *ng < ng0[0],
            "A4 FAIL: n_g(0.25G, f0^2={f2}) = {ng:.4e} not below n_g(0,0) = {:.4e}",
            ng0[0]
        );
    }
    println!(
        "A4 PASS: V_g(0) = {{{:.4}, {:.4}, {:.4}}} m/s and V_g(0.25G) = {{{:.4}, {:.4}, {:.4}}} m/s over f0^2 = {{0, 0.7, 1.6}}: slowing factors fall monotonically ({:.3e} > {:.3e} > {:.3e} at resonance)",
        on_res[0].v_g, on_res[1].v_g, on_res[2].v_g,
        near_res[0].v_g, near_res[1].v_g, near_res[2].v_g,
        ng0[0], ng0[1], ng0[2],
    );
}

#[test]
fn a5_linear_solve_agrees_with_long_time_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(20250815);
    let mut worst: f64 = 0.0;
    let mut worst_params = SystemParams::reference_defaults();
    for k in 0..100 {
        // Half the draws scan detuning at the reference coupling, half scan
        // the coupling at resonance — the two standard scan families.
        let p = if k % 2 == 0 {
            SystemParams::reference_defaults()
                .with_delta(rng.random_range(-3.0..3.0))
                .with_f0sq(rng.random_range(0.0..2.0))
        } else {
            SystemParams::reference_defaults()
                .with_omega_c(rng.random_range(0.2..2.2))
                .with_f0sq(rng.random_range(0.0..2.0))
        };
        let gen = build_averaged_generator(&p).unwrap();
        let direct = solve_steady_state(&gen).unwrap();
        let relaxed = steady_state_via_propagation(&gen, 200.0, 1e-3).unwrap();
        let diff = (vectorize(&direct.sigma) - vectorize(&relaxed.sigma)).amax();
        if diff > worst {
            worst = diff;
            worst_params = p;
        }
    }
    assert!(
        worst <= 1e-7,
        "A5 FAIL: worst entry-wise disagreement {worst:e} at {worst_params:?}"
    );
    println!("A5 PASS: 100 random draws, worst entry-wise |linear - integrated| = {worst:.2e} <= 1e-7");
}

/// Weighted least-squares slope of ln(amplitude) against time.
fn weighted_decay_rate(times: &[f64], amps: &[f64], sigmas: &[f64]) -> f64 {
    let w: Vec<f64> = amps
        .iter()
        .zip(sigmas)
        .map(|(a, s)| (a / s).powi(2))
        .collect();
    let y: Vec<f64> = amps.iter().map(|a| a.ln()).collect();
    let wsum: f64 = w.iter().sum();
    let tbar = times.iter().zip(&w).map(|(t, wi)| t * wi).sum::<f64>() / wsum;
    let ybar = y.iter().zip(&w).map(|(yi, wi)| yi * wi).sum::<f64>() / wsum;
    let num: f64 = times
        .iter()
        .zip(&y)
        .zip(&w)
        .map(|((t, yi), wi)| wi * (t - tbar) * (yi - ybar))
        .sum();
    let den: f64 = times.iter().zip(&w).map(|(t, wi)| wi * (t - tbar).powi(2)).sum();
    -num / den
}

#[test]
fn a6_monte_carlo_confirms_the_averaged_equations() {
    // Pure dephasing: only the injected noise acts. The averaged equations
    // predict |<rho12>| ~ e^{-f0^2 t} and <rho11-rho22> ~ e^{-2 f0^2 t}.
    let dephasing = SystemParams {
        omega_p_rabi: 0.0,
        omega_c_rabi: 0.0,
        delta: 0.0,
        gamma1: 0.0,
        gamma2: 0.0,
        f0sq: 0.7,
        omega_mu: 600.0,
    };
    let dt = 1e-4;
    let n_traj = 5000;

    let coh_times: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
    let series = ensemble_series(
        &dephasing,
        &DensityMatrix::superposition_12(),
        dt,
        1,
        n_traj,
        &coh_times,
    )
    .unwrap();
    let mut amps = Vec::new();
    let mut sigmas = Vec::new();
    for est in &series {
        let v = vectorize(&est.mean_sigma);
        let (a, b) = (v[3], v[4]);
        let amp = a.hypot(b);
        amps.push(amp);
        sigmas.push(((a * est.stderr[3]).powi(2) + (b * est.stderr[4]).powi(2)).sqrt() / amp);
    }
    let coh_rate = weighted_decay_rate(&coh_times, &amps, &sigmas);
    let coh_err = (coh_rate - 0.7).abs() / 0.7;
    assert!(
        coh_err <= 0.05,
        "A6 FAIL: coherence decay rate {coh_rate:.4} is {:.1}% from f0^2 = 0.7",
        coh_err * 100.0
    );

    let pop_times: Vec<f64> = (1..=12).map(|i| 0.125 * i as f64).collect();
    let series = ensemble_series(
        &dephasing,
        &DensityMatrix::ground(),
        dt,
        2,
        n_traj,
        &pop_times,
    )
    .unwrap();
    let mut diffs = Vec::new();
    let mut dsigmas = Vec::new();
    for est in &series {
        let v = vectorize(&est.mean_sigma);
        diffs.push(v[0] - v[1]);
        // p1 + p2 = 1 exactly along each trajectory, so sigma(p1-p2) = 2*sigma(p1).
        dsigmas.push(2.0 * est.stderr[0]);
    }
    let pop_rate = weighted_decay_rate(&pop_times, &diffs, &dsigmas);
    let pop_err = (pop_rate - 1.4).abs() / 1.4;
    assert!(
        pop_err <= 0.05,
        "A6 FAIL: population exchange rate {pop_rate:.4} is {:.1}% from 2 f0^2 = 1.4",
        pop_err * 100.0
    );

    // Full system at the reference parameters: ensemble mean against the
    // averaged generator, entry-wise at 3 sigma.
    let full = SystemParams::reference_defaults().with_f0sq(0.7);
    let report = validate_novikov(&full, 2000, 30.0, dt, 3).unwrap();
    assert_eq!(
        report.verdict,
        Verdict::Pass,
        "A6 FAIL: full-system Novikov check: {}",
        report.summary
    );
    println!(
        "A6 PASS: dephasing rate {coh_rate:.4} (target 0.7, {:.1}% off), exchange rate {pop_rate:.4} (target 1.4, {:.1}% off), full-system MC {} ({})",
        coh_err * 100.0,
        pop_err * 100.0,
        report.verdict,
        report.summary
    );
}

#[test]
fn a7_spectra_have_conjugation_symmetry() {
    let mut worst_alpha: f64 = 0.0;
    let mut worst_nr: f64 = 0.0;
    for f2 in [0.0, 0.7, 1.6] {
        let records = spectrum(f2);
        let alpha_max = records.iter().map(|r| r.alpha).fold(f64::MIN, f64::max);
        let nr_max = records
            .iter()
            .map(|r| (r.n_r - 1.0).abs())
            .fold(f64::MIN, f64::max);
        for i in 0..records.len() {
            let j = records.len() - 1 - i;
            worst_alpha =
                worst_alpha.max((records[i].alpha - records[j].alpha).abs() / alpha_max);
            worst_nr = worst_nr
                .max(((records[i].n_r - 1.0) + (records[j].n_r - 1.0)).abs() / nr_max);
        }
    }
    assert!(
        worst_alpha <= 1e-8,
        "A7 FAIL: alpha evenness violated at relative {worst_alpha:e}"
    );
    assert!(
        worst_nr <= 1e-8,
        "A7 FAIL: (n_R - 1) oddness violated at relative {worst_nr:e}"
    );
    println!(
        "A7 PASS: max relative asymmetry over three 601-point grids: alpha {worst_alpha:.2e}, n_R-1 {worst_nr:.2e} (both <= 1e-8)"
    );
}

#[test]
fn a8_two_level_limit_is_lorentzian() {
    let mut p = SystemParams::reference_defaults();
    p.omega_c_rabi = 0.0;

    // With the coupling, noise and Gamma2 all zero, level |2> decouples and
    // the linear solve is legitimately singular; relaxation from the ground
    // state is the physical route (no population can ever reach |2>).
    let gen = build_averaged_generator(&p).unwrap();
    match solve_steady_state(&gen) {
        Err(EitError::SingularSystem { null_dim: 1 }) => {}
        other => panic!("A8 FAIL: expected singular linear system, got {other:?}"),
    }

    let mut worst: f64 = 0.0;
    for i in 0..41 {
        let delta = -3.0 + 0.15 * i as f64;
        let gen = build_averaged_generator(&p.with_delta(delta)).unwrap();
        let sigma = propagate(&gen, &DensityMatrix::ground(), 100.0, 1e-3).unwrap();
        let lorentzian = p.omega_p_rabi * 0.5 / (delta * delta + 0.25);
        let rel = (sigma.sigma31().im - lorentzian).abs() / lorentzian;
        worst = worst.max(rel);
    }
    assert!(
        worst <= 1e-3,
        "A8 FAIL: worst relative deviation from the Lorentzian {worst:e}"
    );
    println!("A8 PASS: two-level Im sigma31 within {worst:.2e} of the weak-probe Lorentzian (<= 1e-3), singular solve reports null dimension 1");
}
