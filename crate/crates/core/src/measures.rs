//! Entropies, mutual information, quantum discord and concurrence.
//!
//! All logarithms are base 2, so every information quantity is in bits.
//! Discord is asymmetric; by default the projective measurement acts on
//! subsystem B (output port `d`).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{
    c, partial_trace, sandwiched_spectrum, RANK_FLOOR, support_factor, Complex, ComplexMatrix, DensityMatrix, Subsystem,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};

/// Outcomes with probability below this contribute nothing to the conditional entropy.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;

/// Computed discord in `[-DISCORD_CLAMP, 0)` is reported as zero.
pub const DISCORD_CLAMP: f64 = 1e-6;

/// Bell-diagonal residual tolerance for [`discord_bell_diagonal_oracle`].
const BELL_DIAGONAL_TOL: f64 = 1e-9;

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy of a spectrum, `−Σ λ log₂ λ` with `0 log 0 = 0`.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    -values.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues()).max(0.0)
}

/// Entropy of `m / Tr m` for a 2x2 PSD matrix, using the closed-form spectrum.
fn normalized_qubit_entropy(m: [[Complex; 2]; 2], trace: f64) -> f64 {
    let a = m[0][0].re / trace;
    let d = m[1][1].re / trace;
    let b = m[0][1].norm() / trace;
    let half_gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let mid = 0.5 * (a + d);
    entropy_of_spectrum(&[mid + half_gap, mid - half_gap])
}

pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let sa = von_neumann_entropy(&partial_trace(rho, Subsystem::A)?);
    let sb = von_neumann_entropy(&partial_trace(rho, Subsystem::B)?);
    Ok(sa + sb - von_neumann_entropy(rho))
}

/// Rank-1 projective qubit measurement `{|n⟩⟨n|, |n⊥⟩⟨n⊥|}` with
/// `|n⟩ = cos(θ/2)|H⟩ + e^{iφ} sin(θ/2)|V⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorPair {
    theta: f64,
    phi: f64,
}

impl ProjectorPair {
    /// Any real `(theta, phi)` is accepted and folded into `θ ∈ [0, π]`, `φ ∈ [0, 2π)`
    /// describing the same `|n⟩` up to global phase.
    pub fn new(theta: f64, phi: f64) -> Self {
        let two_pi = 2.0 * PI;
        let mut theta = theta.rem_euclid(two_pi);
        let mut phi = phi;
        if theta > PI {
            theta = two_pi - theta;
            phi += PI;
        }
        let mut phi = phi.rem_euclid(two_pi);
        if phi >= two_pi {
            phi = 0.0;
        }
        Self { theta, phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(|n⟩, |n⊥⟩)`
    pub fn kets(&self) -> [[Complex; 2]; 2] {
        let (s, co) = (0.5 * self.theta).sin_cos();
        let e = Complex::from_polar(1.0, self.phi);
        [
            [c(co, 0.0), e * s],
            [-e.conj() * s, c(co, 0.0)],
        ]
    }

    pub fn projectors(&self) -> [ComplexMatrix; 2] {
        let [n, m] = self.kets();
        [ComplexMatrix::outer(&n, &n), ComplexMatrix::outer(&m, &m)]
    }
}

/// Unnormalized state of the unmeasured qubit after projecting the other onto `ket`.
fn conditional_block(rho: &ComplexMatrix, ket: &[Complex; 2], measured: Subsystem) -> [[Complex; 2]; 2] {
    let idx = |kept: usize, meas: usize| match measured {
        Subsystem::B => 2 * kept + meas,
        Subsystem::A => 2 * meas + kept,
    };
    let mut out = [[Complex::default(); 2]; 2];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let mut acc = Complex::default();
            for x in 0..2 {
                for y in 0..2 {
                    acc += ket[x].conj() * rho[(idx(a, x), idx(b, y))] * ket[y];
                }
            }
            *entry = acc;
        }
    }
    out
}

fn conditional_entropy_raw(rho: &ComplexMatrix, meas: &ProjectorPair, measured: Subsystem) -> f64 {
    meas.kets()
        .iter()
        .map(|ket| {
            let block = conditional_block(rho, ket, measured);
            let p = block[0][0].re + block[1][1].re;
            if p < MIN_OUTCOME_PROBABILITY {
                0.0
            } else {
                p * normalized_qubit_entropy(block, p)
            }
        })
        .sum()
}

/// `S(A|{Π_j^B}) = Σ_j P_j S(ρ_{A|Π_j})` for a measurement on B.
pub fn conditional_entropy(rho: &DensityMatrix, meas: &ProjectorPair) -> Result<f64> {
    conditional_entropy_on(rho, meas, Subsystem::B)
}

/// Conditional entropy of the unmeasured qubit given a measurement on `measured`.
pub fn conditional_entropy_on(rho: &DensityMatrix, meas: &ProjectorPair, measured: Subsystem) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch("conditional entropy needs a two-qubit state".into()));
    }
    Ok(conditional_entropy_raw(rho.matrix(), meas, measured))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscordResult {
    pub discord: f64,
    pub mutual_information: f64,
    /// `max_Π J(ρ)_Π`
    pub classical_correlation: f64,
    pub optimal_measurement: ProjectorPair,
    pub measured: Subsystem,
}

/// Grid density and refinement tolerance of the measurement search.
#[derive(Debug, Clone, Copy)]
pub struct DiscordOptions {
    pub theta_steps: usize,
    pub phi_steps: usize,
    /// Nelder–Mead parameter tolerance.
    pub xtol: f64,
    /// Number of best grid points refined locally.
    pub refine_starts: usize,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        Self {
            theta_steps: 40,
            phi_steps: 80,
            xtol: 1e-7,
            refine_starts: 3,
        }
    }
}

/// Quantum discord with the measurement on subsystem B.
pub fn discord(rho: &DensityMatrix) -> Result<DiscordResult> {
    discord_with(rho, Subsystem::B, &DiscordOptions::default())
}

pub fn discord_measuring(rho: &DensityMatrix, measured: Subsystem) -> Result<DiscordResult> {
    discord_with(rho, measured, &DiscordOptions::default())
}

pub fn discord_with(rho: &DensityMatrix, measured: Subsystem, opts: &DiscordOptions) -> Result<DiscordResult> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch("discord needs a two-qubit state".into()));
    }
    if opts.theta_steps < 2 || opts.phi_steps < 1 {
        return Err(Error::InvalidParameter("discord grid needs at least 2x1 points".into()));
    }
    let mutual = mutual_information(rho)?;
    let s_unmeasured = von_neumann_entropy(&partial_trace(rho, measured.other())?);
    let m = rho.matrix();
    let cost = |x: &[f64]| conditional_entropy_raw(m, &ProjectorPair::new(x[0], x[1]), measured);

    let d_theta = PI / (opts.theta_steps - 1) as f64;
    let d_phi = 2.0 * PI / opts.phi_steps as f64;
    let mut grid: Vec<(f64, usize, usize)> = Vec::with_capacity(opts.theta_steps * opts.phi_steps);
    for i in 0..opts.theta_steps {
        for j in 0..opts.phi_steps {
            let x = [i as f64 * d_theta, j as f64 * d_phi];
            grid.push((cost(&x), i, j));
        }
    }
    // ties broken by grid index so the result does not depend on evaluation order
    grid.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let nm = NelderMeadOptions {
        xtol: opts.xtol,
        ..NelderMeadOptions::default()
    };
    let mut best: Option<(f64, ProjectorPair)> = None;
    for &(_, i, j) in grid.iter().take(opts.refine_starts.max(1)) {
        let x0 = [i as f64 * d_theta, j as f64 * d_phi];
        let found = nelder_mead(cost, &x0, &[0.5 * d_theta, 0.5 * d_phi], nm);
        let pair = ProjectorPair::new(found.x[0], found.x[1]);
        if best.as_ref().is_none_or(|(v, _)| found.value < *v) {
            best = Some((found.value, pair));
        }
    }
    let (min_cond, optimal_measurement) = best.expect("at least one refinement");

    let classical = (s_unmeasured - min_cond).min(mutual);
    let mut discord = mutual - classical;
    if discord < -DISCORD_CLAMP {
        return Err(Error::NegativeDiscord(discord));
    }
    if discord < 0.0 {
        discord = 0.0;
    }
    Ok(DiscordResult {
        discord,
        mutual_information: mutual,
        classical_correlation: classical.max(0.0).min(mutual),
        optimal_measurement,
        measured,
    })
}

/// Closed-form discord for Bell-diagonal states `¼(I⊗I + Σ cᵢ σᵢ⊗σᵢ)`.
///
/// Uses only the correlation coefficients: the joint spectrum is
/// `¼(1 − c₁ − c₂ − c₃)`, `¼(1 − c₁ + c₂ + c₃)`, `¼(1 + c₁ − c₂ + c₃)`,
/// `¼(1 + c₁ + c₂ − c₃)`, both marginals are maximally mixed, and the
/// optimal classical correlation depends on `max |cᵢ|` only.
pub fn discord_bell_diagonal_oracle(rho: &DensityMatrix) -> Result<f64> {
    let coeffs = bell_correlations(rho)?;
    let [c1, c2, c3] = coeffs;
    let spectrum = [
        0.25 * (1.0 - c1 - c2 - c3),
        0.25 * (1.0 - c1 + c2 + c3),
        0.25 * (1.0 + c1 - c2 + c3),
        0.25 * (1.0 + c1 + c2 - c3),
    ];
    let mutual = 2.0 - entropy_of_spectrum(&spectrum);
    let cmax = coeffs.iter().fold(0.0_f64, |m, x| m.max(x.abs())).min(1.0);
    let classical = 0.5 * (1.0 - cmax) * log2_or_zero(1.0 - cmax) + 0.5 * (1.0 + cmax) * log2_or_zero(1.0 + cmax);
    Ok((mutual - classical).max(0.0))
}

fn log2_or_zero(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.log2()
    }
}

/// `cᵢ = Tr(ρ σᵢ⊗σᵢ)`, after checking that ρ is Bell-diagonal.
pub fn bell_correlations(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch("Bell-diagonal check needs a two-qubit state".into()));
    }
    let paulis = ComplexMatrix::pauli();
    let mut coeffs = [0.0; 3];
    let mut model = ComplexMatrix::identity(4);
    for (k, s) in paulis.iter().enumerate() {
        let ss = s.tensor(s);
        coeffs[k] = ss.inner(rho.matrix()).re;
        model = &model + &ss.scale_real(coeffs[k]);
    }
    let residual = model.scale_real(0.25).max_abs_diff(rho.matrix());
    if residual > BELL_DIAGONAL_TOL {
        return Err(Error::NotBellDiagonal { residual });
    }
    Ok(coeffs)
}

/// Wootters concurrence.
///
/// The `λᵢ` are the square roots of the eigenvalues of `ρ ρ̃`, where
/// `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)` with conjugation in the `{HH,HV,VH,VV}`
/// basis. They are computed as the spectrum of the Hermitian matrix
/// `A† ρ̃ A` with `ρ = A A†`, which shares the nonzero eigenvalues of `ρ ρ̃`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch("concurrence needs a two-qubit state".into()));
    }
    let [_, sy, _] = ComplexMatrix::pauli();
    let yy = sy.tensor(&sy);
    let flipped = &(&yy * &rho.matrix().conj()) * &yy;

    let spectrum = sandwiched_spectrum(&support_factor(rho), &flipped);
    let mut lambdas = [0.0; 4];
    for (l, v) in lambdas.iter_mut().zip(&spectrum) {
        // round-off sized eigenvalues would otherwise contribute O(1e-8)
        *l = if *v > RANK_FLOOR { v.sqrt() } else { 0.0 };
    }
    let value = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(value.clamp(0.0, 1.0))
}

/// Swaps the two tensor factors of a two-qubit state.
pub fn swap_subsystems(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let perm = [0usize, 2, 1, 3];
    let m = rho.matrix();
    DensityMatrix::new(ComplexMatrix::from_fn(4, 4, |i, j| m[(perm[i], perm[j])]))
}
