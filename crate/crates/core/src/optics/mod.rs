//! Beamsplitter interference of attenuated laser pulses and the
//! post-selected two-qubit polarization states it produces.
//!
//! Input `a` carries an H-polarized pulse and input `b` a V-polarized one.
//! With a fixed relative phase the post-selected output is the pure product
//! state returned by [`coherent_output`]; with a randomized phase it is the
//! Poisson-weighted mixture of the one-photon-per-input and
//! two-photons-in-one-input cases returned by [`incoherent_output`].

pub mod delay;
pub mod fock;

pub use delay::{
    coherence_length_um, delayed_incoherent_output, hom_dip, hom_dip_fwhm_um, hom_visibility, overlap, HomDip,
    HomPoint,
};
pub use fock::{
    bs_transform, bs_transform_unnormalized, postselect_two_qubit, CreationPolynomial, FockAmplitude, FockState,
    ModeConfig, Polarization, Port, Postselected,
};

use crate::error::{Error, Result};
use crate::linalg::{c, Complex, DensityMatrix};
use crate::multiphoton::poisson_pmf;

/// Default Fock truncation for [`coherent_output`].
pub const DEFAULT_N_MAX: u32 = 4;

/// Parameters of the attenuated, spectrally filtered pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    mu: f64,
    phi: f64,
    lambda0_nm: f64,
    fwhm_lambda_nm: f64,
}

impl SourceParams {
    pub fn new(mu: f64, phi: f64, lambda0_nm: f64, fwhm_lambda_nm: f64) -> Result<Self> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(mu) {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
        }
        if !positive(lambda0_nm) {
            return Err(Error::InvalidParameter(format!("lambda0 must be positive, got {lambda0_nm}")));
        }
        if !positive(fwhm_lambda_nm) {
            return Err(Error::InvalidParameter(format!(
                "filter bandwidth must be positive, got {fwhm_lambda_nm}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter("phi must be finite".into()));
        }
        Ok(Self {
            mu,
            phi,
            lambda0_nm,
            fwhm_lambda_nm,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn lambda0_nm(&self) -> f64 {
        self.lambda0_nm
    }

    pub fn fwhm_lambda_nm(&self) -> f64 {
        self.fwhm_lambda_nm
    }

    pub fn with_phi(self, phi: f64) -> Result<Self> {
        Self::new(self.mu, phi, self.lambda0_nm, self.fwhm_lambda_nm)
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        Self::new(mu, self.phi, self.lambda0_nm, self.fwhm_lambda_nm)
    }
}

impl Default for SourceParams {
    /// μ = 0.1, φ = 0, 785 nm center wavelength, 3 nm filter.
    fn default() -> Self {
        Self {
            mu: 0.1,
            phi: 0.0,
            lambda0_nm: 785.0,
            fwhm_lambda_nm: 3.0,
        }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Two mutually coherent pulses, truncated at `n_max` photons:
/// `e^{−μ} Σ μ^{(m+n)/2}/(m! n!) (a†_H)^m (e^{iφ} b†_V)^n |0⟩`.
pub fn coherent_input(params: &SourceParams, n_max: u32) -> CreationPolynomial {
    let mu = params.mu;
    let mut poly = CreationPolynomial::new();
    for m in 0..=n_max {
        for n in 0..=(n_max - m) {
            let magnitude = (-mu).exp() * mu.powf(0.5 * f64::from(m + n)) / (factorial(m) * factorial(n));
            let phase = Complex::from_polar(1.0, f64::from(n) * params.phi);
            poly.add_term(ModeConfig::new([m, 0], [0, n]), phase * magnitude);
        }
    }
    poly
}

/// Post-selected two-qubit state for mutually coherent inputs.
pub fn coherent_output(params: &SourceParams, n_max: u32) -> Result<DensityMatrix> {
    let input = coherent_input(params, n_max);
    let out = bs_transform(&input, n_max)?;
    Ok(postselect_two_qubit(&out)?.rho)
}

/// Normalized Fock input with `i` H-photons in `a` and `j` V-photons in `b`:
/// `(a†_H)^i (b†_V)^j / √(i! j!) |0⟩`.
pub fn case_input(i: u32, j: u32) -> CreationPolynomial {
    let k = 1.0 / (factorial(i) * factorial(j)).sqrt();
    CreationPolynomial::monomial(ModeConfig::new([i, 0], [0, j]), c(k, 0.0))
}

/// Post-selected output of [`case_input`].
pub fn case_output(i: u32, j: u32) -> Result<Postselected> {
    postselect_two_qubit(&bs_transform(&case_input(i, j), i + j)?)
}

/// One component of the phase-randomized mixture.
#[derive(Debug, Clone)]
pub struct MixtureTerm {
    /// Photon numbers `(i, j)` entering ports `a` and `b`.
    pub photons: (u32, u32),
    /// `P(μ,i) P(μ,j)` times the post-selection success probability.
    pub raw_weight: f64,
    /// `raw_weight` normalized over the mixture.
    pub weight: f64,
    pub rho: DensityMatrix,
}

/// The two-photon input cases that survive post-selection, `(1,1)`, `(2,0)`
/// and `(0,2)`, weighted by Poisson photon statistics. Phase randomization
/// removes coherence between cases with different `(i, j)`.
pub fn incoherent_mixture(mu: f64) -> Result<Vec<MixtureTerm>> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
    }
    let mut terms = Vec::with_capacity(3);
    for (i, j) in [(1, 1), (2, 0), (0, 2)] {
        let out = case_output(i, j)?;
        terms.push(MixtureTerm {
            photons: (i, j),
            raw_weight: poisson_pmf(mu, i) * poisson_pmf(mu, j) * out.success_prob,
            weight: 0.0,
            rho: out.rho,
        });
    }
    let total: f64 = terms.iter().map(|t| t.raw_weight).sum();
    for t in &mut terms {
        t.weight = t.raw_weight / total;
    }
    Ok(terms)
}

/// Post-selected two-qubit state for mutually incoherent inputs.
pub fn incoherent_output(params: &SourceParams) -> Result<DensityMatrix> {
    let terms = incoherent_mixture(params.mu)?;
    let parts: Vec<(f64, &DensityMatrix)> = terms.iter().map(|t| (t.weight, &t.rho)).collect();
    DensityMatrix::mixture(&parts)
}

/// Mean of [`coherent_output`] over `k` equally spaced phases.
pub fn phase_averaged_coherent_output(params: &SourceParams, k: usize, n_max: u32) -> Result<DensityMatrix> {
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one phase".into()));
    }
    let states = (0..k)
        .map(|n| coherent_output(&params.with_phi(2.0 * std::f64::consts::PI * n as f64 / k as f64)?, n_max))
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<(f64, &DensityMatrix)> = states.iter().map(|s| (1.0, s)).collect();
    DensityMatrix::mixture(&parts)
}
