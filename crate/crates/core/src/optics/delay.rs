//! Temporal distinguishability: path-length delay between the two inputs.
//!
//! A delay `δ` reduces the overlap of the two filtered wave packets. The
//! overlap factor
//!
//! ```text
//! γ(δ) = exp(−δ² / (2σ²)),   σ = l_c / (2√(2 ln 2)),   l_c = (4 ln 2 / π) λ₀² / Δλ
//! ```
//!
//! has FWHM equal to the coherence length `l_c` of a Gaussian spectrum. In
//! the one-photon-per-input case it scales the two-photon interference term:
//! the `HV`/`VH` coherence of the post-selected state and, for identically
//! polarized inputs, the suppression of coincidences (the classical HOM dip).
//! Both are governed by the same overlap, so the dip has FWHM `l_c`. Cases
//! with both photons from one pulse do not depend on the delay.

use std::f64::consts::{LN_2, PI};

use super::fock::{bs_transform, CreationPolynomial, ModeConfig, Port};
use super::{incoherent_mixture, SourceParams};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, DensityMatrix};
use crate::multiphoton::poisson_pmf;

/// Coherence length in µm of the filtered pulses, Gaussian-spectrum convention.
pub fn coherence_length_um(params: &SourceParams) -> f64 {
    let lambda0 = params.lambda0_nm();
    4.0 * LN_2 / PI * lambda0 * lambda0 / params.fwhm_lambda_nm() * 1e-3
}

/// Gaussian width σ of the overlap factor, in µm.
pub fn overlap_sigma_um(params: &SourceParams) -> f64 {
    coherence_length_um(params) / (2.0 * (2.0 * LN_2).sqrt())
}

/// Wave-packet overlap `γ(δ) ∈ (0, 1]` for a path-length difference `δ` in µm.
pub fn overlap(params: &SourceParams, delta_um: f64) -> f64 {
    let sigma = overlap_sigma_um(params);
    (-delta_um * delta_um / (2.0 * sigma * sigma)).exp()
}

/// `ρ ↦ γ ρ + (1 − γ) diag(ρ)`: partial loss of coherence between the basis
/// states of a distinguishable photon pair.
fn dephase(rho: &DensityMatrix, gamma: f64) -> Result<DensityMatrix> {
    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(4, 4, |i, j| if i == j { m[(i, j)] } else { m[(i, j)] * gamma });
    DensityMatrix::new(out)
}

/// Phase-randomized output state at path-length difference `delta_um`.
pub fn delayed_incoherent_output(params: &SourceParams, delta_um: f64) -> Result<DensityMatrix> {
    if !(delta_um >= 0.0) || !delta_um.is_finite() {
        return Err(Error::InvalidParameter(format!("delay must be a finite non-negative number, got {delta_um}")));
    }
    let gamma = overlap(params, delta_um);
    let terms = incoherent_mixture(params.mu())?;
    let mut states = Vec::with_capacity(terms.len());
    for t in &terms {
        let rho = if t.photons == (1, 1) { dephase(&t.rho, gamma)? } else { t.rho.clone() };
        states.push((t.weight, rho));
    }
    let parts: Vec<(f64, &DensityMatrix)> = states.iter().map(|(w, r)| (*w, r)).collect();
    DensityMatrix::mixture(&parts)
}

/// Probability that both output ports register at least one photon.
fn coincidence_probability(input: &CreationPolynomial) -> Result<f64> {
    let out = bs_transform(input, input.max_photons())?;
    Ok(out.probability_where(|cfg| cfg.port_total(Port::First) > 0 && cfg.port_total(Port::Second) > 0))
}

/// Coincidence probabilities of the two-photon sector for identically
/// H-polarized inputs: `(fully overlapping (1,1), fully distinguishable (1,1),
/// two photons from one pulse)`. Each entry is already weighted by the Poisson
/// probability of its input photon numbers.
fn hom_sector(params: &SourceParams) -> Result<(f64, f64, f64)> {
    let mu = params.mu();
    let one = c(1.0, 0.0);
    let pair = poisson_pmf(mu, 1) * poisson_pmf(mu, 1);
    let split = poisson_pmf(mu, 2) * poisson_pmf(mu, 0);
    let r = std::f64::consts::FRAC_1_SQRT_2;

    let same_mode = CreationPolynomial::monomial(ModeConfig::new([1, 0], [1, 0]), one);
    // temporally distinguishable photons behave like photons in orthogonal modes
    let other_mode = CreationPolynomial::monomial(ModeConfig::new([1, 0], [0, 1]), one);
    let two_in_a = CreationPolynomial::monomial(ModeConfig::new([2, 0], [0, 0]), c(r, 0.0));
    let two_in_b = CreationPolynomial::monomial(ModeConfig::new([0, 0], [2, 0]), c(r, 0.0));

    Ok((
        pair * coincidence_probability(&same_mode)?,
        pair * coincidence_probability(&other_mode)?,
        split * (coincidence_probability(&two_in_a)? + coincidence_probability(&two_in_b)?),
    ))
}

fn normalized_coincidence(sector: (f64, f64, f64), gamma: f64) -> f64 {
    let (overlapping, distinguishable, single_pulse) = sector;
    let rate = gamma * overlapping + (1.0 - gamma) * distinguishable + single_pulse;
    rate / (distinguishable + single_pulse)
}

/// Dip visibility `1 − R(0)/R(∞)` of phase-randomized pulses.
pub fn hom_visibility(params: &SourceParams) -> Result<f64> {
    Ok(1.0 - normalized_coincidence(hom_sector(params)?, 1.0))
}

/// Full width at half depth of the dip, µm. Equals [`coherence_length_um`].
pub fn hom_dip_fwhm_um(params: &SourceParams) -> f64 {
    2.0 * overlap_sigma_um(params) * (2.0 * LN_2).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomPoint {
    pub delta_um: f64,
    /// Coincidence rate relative to the non-interfering rate.
    pub coincidence_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomDip {
    pub visibility: f64,
    pub fwhm_um: f64,
    pub points: Vec<HomPoint>,
}

/// Normalized coincidence rate of identically polarized, phase-randomized
/// pulses versus delay.
pub fn hom_dip(params: &SourceParams, deltas_um: &[f64]) -> Result<HomDip> {
    if deltas_um.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter("delays must be finite".into()));
    }
    let sector = hom_sector(params)?;
    let points = deltas_um
        .iter()
        .map(|&d| HomPoint {
            delta_um: d,
            coincidence_norm: normalized_coincidence(sector, overlap(params, d.abs())),
        })
        .collect();
    Ok(HomDip {
        visibility: 1.0 - normalized_coincidence(sector, 1.0),
        fwhm_um: hom_dip_fwhm_um(params),
        points,
    })
}
