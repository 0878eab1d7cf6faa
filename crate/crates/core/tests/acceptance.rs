//! Acceptance checks. Runs without the libtest harness so that every
//! criterion prints a PASS/FAIL line; exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use discordbench_core::linalg::{fidelity, partial_trace, purity};
use discordbench_core::measures::{concurrence, discord, discord_bell_diagonal_oracle, von_neumann_entropy};
use discordbench_core::multiphoton::{error_fraction, ErrorModelParams};
use discordbench_core::optics::{
    case_output, coherent_output, delayed_incoherent_output, hom_dip, incoherent_output,
    phase_averaged_coherent_output, SourceParams, DEFAULT_N_MAX,
};
use discordbench_core::states::{bell_diagonal, rho_coh};
use discordbench_core::tomography::{mle_reconstruct, simulate_counts, standard_settings, MleOptions};
use discordbench_core::{Complex, ComplexMatrix, DensityMatrix, Subsystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_time(elapsed: Duration, limit: Duration) -> std::result::Result<(), String> {
    ensure(elapsed <= limit, format!("took {elapsed:.2?}, limit {limit:.0?}"))
}

fn matrix(rows: [[f64; 4]; 4]) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |i, j| Complex::new(rows[i][j], 0.0))
}

fn incoherent_matrix() -> ComplexMatrix {
    matrix([
        [0.25, 0.0, 0.0, 0.0],
        [0.0, 0.25, -0.25, 0.0],
        [0.0, -0.25, 0.25, 0.0],
        [0.0, 0.0, 0.0, 0.25],
    ])
}

fn state(m: ComplexMatrix) -> DensityMatrix {
    DensityMatrix::new(m).expect("valid test state")
}

fn expected_incoherent_discord() -> f64 {
    -0.75 * 0.75f64.log2()
}

fn c1_incoherent_discord() -> Check {
    let start = Instant::now();
    let d = discord(&state(incoherent_matrix())).map_err(|e| e.to_string())?.discord;
    let elapsed = start.elapsed();
    let want = expected_incoherent_discord();
    ensure((d - want).abs() <= 1e-4, format!("discord {d:.6}, expected {want:.6}"))?;
    within_time(elapsed, Duration::from_secs(1))?;
    Ok(format!("D = {d:.6} in {elapsed:.2?}"))
}

fn c2_coherent_has_no_correlations() -> Check {
    let start = Instant::now();
    let mut worst = (0.0f64, 0.0f64);
    for phi in [0.0, PI / 4.0, PI / 2.0, PI] {
        let simulated = coherent_output(&SourceParams::default().with_phi(phi).map_err(|e| e.to_string())?, DEFAULT_N_MAX)
            .map_err(|e| e.to_string())?;
        for rho in [rho_coh(phi), simulated] {
            let d = discord(&rho).map_err(|e| e.to_string())?.discord;
            let c = concurrence(&rho).map_err(|e| e.to_string())?;
            ensure(d <= 1e-6, format!("phi={phi}: discord {d:e}"))?;
            ensure(c <= 1e-8, format!("phi={phi}: concurrence {c:e}"))?;
            worst = (worst.0.max(d), worst.1.max(c));
        }
    }
    let elapsed = start.elapsed();
    within_time(elapsed, Duration::from_secs(5))?;
    Ok(format!("max D = {:.1e}, max C = {:.1e} in {elapsed:.2?}", worst.0, worst.1))
}

fn c3_incoherent_is_separable() -> Check {
    let c = concurrence(&state(incoherent_matrix())).map_err(|e| e.to_string())?;
    ensure(c == 0.0, format!("concurrence {c:e}"))?;
    let simulated = incoherent_output(&SourceParams::default()).map_err(|e| e.to_string())?;
    let cs = concurrence(&simulated).map_err(|e| e.to_string())?;
    ensure(cs == 0.0, format!("simulated concurrence {cs:e}"))?;
    Ok("C = 0".into())
}

fn c4_phase_average() -> Check {
    let params = SourceParams::default();
    let avg = phase_averaged_coherent_output(&params, 5, DEFAULT_N_MAX).map_err(|e| e.to_string())?;
    let incoh = incoherent_output(&params).map_err(|e| e.to_string())?;
    let diff = avg.matrix().max_abs_diff(incoh.matrix());
    ensure(diff <= 1e-12, format!("max entry difference {diff:e}"))?;
    Ok(format!("max |Δ| = {diff:.1e}"))
}

fn c5_case_outputs() -> Check {
    let case1 = matrix([
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.5, -0.5, 0.0],
        [0.0, -0.5, 0.5, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ]);
    let case2 = matrix([[1.0, 0.0, 0.0, 0.0], [0.0; 4], [0.0; 4], [0.0; 4]]);
    let case3 = matrix([[0.0; 4], [0.0; 4], [0.0; 4], [0.0, 0.0, 0.0, 1.0]]);
    let mut worst = 0.0f64;
    for ((i, j), want) in [((1, 1), case1), ((2, 0), case2), ((0, 2), case3)] {
        let out = case_output(i, j).map_err(|e| e.to_string())?;
        let diff = out.rho.matrix().max_abs_diff(&want);
        ensure(diff <= 1e-12, format!("case ({i},{j}) differs by {diff:e}"))?;
        worst = worst.max(diff);
    }
    for mu in [0.01, 0.1, 1.0] {
        let params = SourceParams::default().with_mu(mu).map_err(|e| e.to_string())?;
        let rho = incoherent_output(&params).map_err(|e| e.to_string())?;
        let diff = rho.matrix().max_abs_diff(&incoherent_matrix());
        ensure(diff <= 1e-12, format!("mixture at mu={mu} differs by {diff:e}"))?;
        worst = worst.max(diff);
    }
    Ok(format!("max |Δ| = {worst:.1e}"))
}

fn c6_multiphoton_error() -> Check {
    let start = Instant::now();
    let e = error_fraction(&ErrorModelParams::with_default_cut(0.1).map_err(|e| e.to_string())?);
    ensure((e - 0.096).abs() <= 1e-3, format!("E(0.1) = {e:.5}"))?;
    let mut prev = 0.0;
    for k in 1..=100 {
        let mu = 0.01 * f64::from(k);
        let v = error_fraction(&ErrorModelParams::with_default_cut(mu).map_err(|e| e.to_string())?);
        ensure(v > prev, format!("not increasing at mu={mu}"))?;
        prev = v;
    }
    let elapsed = start.elapsed();
    within_time(elapsed, Duration::from_secs(1))?;
    Ok(format!("E(0.1) = {e:.5}, monotone on [0.01, 1] in {elapsed:.2?}"))
}

fn c7_hom_dip() -> Check {
    let params = SourceParams::new(0.1, 0.0, 785.0, 3.0).map_err(|e| e.to_string())?;
    let deltas: Vec<f64> = (-4000..=4000).map(|k| 0.1 * f64::from(k)).collect();
    let dip = hom_dip(&params, &deltas).map_err(|e| e.to_string())?;
    ensure((dip.visibility - 0.5).abs() <= 1e-9, format!("visibility {}", dip.visibility))?;
    ensure((170.0..=215.0).contains(&dip.fwhm_um), format!("FWHM {} µm", dip.fwhm_um))?;
    // width read off the sampled curve
    let half = 1.0 - 0.5 * dip.visibility;
    let below: Vec<f64> = dip
        .points
        .iter()
        .filter(|p| p.coincidence_norm <= half)
        .map(|p| p.delta_um)
        .collect();
    let sampled = below.last().unwrap_or(&0.0) - below.first().unwrap_or(&0.0);
    ensure((sampled - dip.fwhm_um).abs() <= 0.2, format!("sampled width {sampled} vs {}", dip.fwhm_um))?;
    Ok(format!("V = {:.12}, FWHM = {:.3} µm", dip.visibility, dip.fwhm_um))
}

fn c8_delay_endpoints() -> Check {
    let params = SourceParams::default();
    let at0 = delayed_incoherent_output(&params, 0.0).map_err(|e| e.to_string())?;
    let (p0, d0) = (purity(&at0), discord(&at0).map_err(|e| e.to_string())?.discord);
    ensure((p0 - 0.375).abs() <= 1e-4, format!("purity(0) = {p0}"))?;
    ensure((d0 - 0.3113).abs() <= 1e-4, format!("discord(0) = {d0}"))?;
    let far = delayed_incoherent_output(&params, 500.0).map_err(|e| e.to_string())?;
    let (p1, d1) = (purity(&far), discord(&far).map_err(|e| e.to_string())?.discord);
    ensure((p1 - 0.25).abs() <= 1e-6, format!("purity(500) = {p1}"))?;
    ensure(d1 <= 1e-6, format!("discord(500) = {d1:e}"))?;
    Ok(format!("δ=0: P={p0:.6} D={d0:.6}; δ=500: P={p1:.8} D={d1:.1e}"))
}

fn c9_tomography() -> Check {
    let start = Instant::now();
    let settings = standard_settings();
    let opts = MleOptions::default();
    let seeds = 50u64;
    let coh = rho_coh(0.0);
    let incoh = state(incoherent_matrix());
    let mut fid = 0.0;
    let mut disc = 0.0;
    for seed in 0..seeds {
        let fit = mle_reconstruct(&simulate_counts(&coh, &settings, 1e4, seed).map_err(|e| e.to_string())?, &opts)
            .map_err(|e| e.to_string())?;
        fid += fidelity(&fit.rho, &coh).map_err(|e| e.to_string())?;
        let fit = mle_reconstruct(&simulate_counts(&incoh, &settings, 1e4, seed).map_err(|e| e.to_string())?, &opts)
            .map_err(|e| e.to_string())?;
        disc += discord(&fit.rho).map_err(|e| e.to_string())?.discord;
    }
    let (fid, disc) = (fid / seeds as f64, disc / seeds as f64);
    let elapsed = start.elapsed();
    ensure(fid >= 0.99, format!("mean fidelity {fid:.5}"))?;
    ensure((0.20..=0.35).contains(&disc), format!("mean discord {disc:.4}"))?;
    within_time(elapsed, Duration::from_secs(300))?;
    Ok(format!("mean F(coh) = {fid:.5}, mean D(incoh) = {disc:.4} in {elapsed:.2?}"))
}

fn random_bell_diagonal(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let w: Vec<f64> = (0..4).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    let signs = [[1.0, -1.0, 1.0], [-1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [-1.0, -1.0, -1.0]];
    let mut coeffs = [0.0; 3];
    for (wk, sk) in w.iter().zip(signs) {
        for i in 0..3 {
            coeffs[i] += wk / s * sk[i];
        }
    }
    bell_diagonal(coeffs).expect("convex combination of Bell states")
}

fn c10_bell_diagonal_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let rho = random_bell_diagonal(&mut rng);
        let numeric = discord(&rho).map_err(|e| e.to_string())?.discord;
        let oracle = discord_bell_diagonal_oracle(&rho).map_err(|e| e.to_string())?;
        let diff = (numeric - oracle).abs();
        ensure(diff <= 1e-5, format!("state {k}: {numeric} vs {oracle}"))?;
        worst = worst.max(diff);
    }
    let elapsed = start.elapsed();
    within_time(elapsed, Duration::from_secs(120))?;
    Ok(format!("max |Δ| = {worst:.1e} over 100 states in {elapsed:.2?}"))
}

fn c11_pure_states() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let raw: Vec<Complex> = (0..4)
            .map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let ket: Vec<Complex> = raw.iter().map(|z| z / norm).collect();
        let rho = DensityMatrix::pure(&ket).map_err(|e| e.to_string())?;
        let d = discord(&rho).map_err(|e| e.to_string())?.discord;
        let s = von_neumann_entropy(&partial_trace(&rho, Subsystem::A).map_err(|e| e.to_string())?);
        let diff = (d - s).abs();
        ensure(diff <= 1e-5, format!("state {k}: D={d} S={s}"))?;
        worst = worst.max(diff);
    }
    Ok(format!("max |D − S(ρ_A)| = {worst:.1e} over 50 states"))
}

fn main() -> ExitCode {
    let checks: [Criterion; 11] = [
        ("discord of the incoherent state", c1_incoherent_discord),
        ("coherent inputs carry no correlations", c2_coherent_has_no_correlations),
        ("incoherent state is separable", c3_incoherent_is_separable),
        ("phase average equals incoherent output", c4_phase_average),
        ("post-selected case outputs and mixture", c5_case_outputs),
        ("multi-photon error fraction", c6_multiphoton_error),
        ("classical HOM dip", c7_hom_dip),
        ("delay-scan endpoints", c8_delay_endpoints),
        ("tomography pipeline", c9_tomography),
        ("Bell-diagonal oracle agreement", c10_bell_diagonal_oracle),
        ("pure-state discord equals entanglement entropy", c11_pure_states),
    ];
    let mut failed = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
