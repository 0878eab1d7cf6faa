//! Multimode Fock-space algebra for a lossless symmetric beamsplitter.
//!
//! Modes are labelled by `(port, polarization)`. On the input side the ports
//! are `a` and `b`, on the output side `c` and `d`; both use [`ModeConfig`]
//! with index 0 for the first port and 1 for the second. The beamsplitter
//! acts on creation operators and preserves polarization:
//!
//! ```text
//! a†_s → (c†_s + i d†_s)/√2
//! b†_s → (i c†_s + d†_s)/√2
//! ```

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{c, Complex, DensityMatrix};

/// Kept norm below which post-selection is considered empty.
pub const EMPTY_POSTSELECTION_NORM: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    /// `a` on the input side, `c` on the output side.
    First = 0,
    /// `b` on the input side, `d` on the output side.
    Second = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H = 0,
    V = 1,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];
}

impl Port {
    pub const BOTH: [Port; 2] = [Port::First, Port::Second];
}

/// Photon numbers per `(port, polarization)` mode.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ModeConfig {
    n: [[u32; 2]; 2],
}

impl ModeConfig {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// `first` and `second` are `[H, V]` occupations of the two ports.
    pub fn new(first: [u32; 2], second: [u32; 2]) -> Self {
        Self { n: [first, second] }
    }

    pub fn get(&self, port: Port, pol: Polarization) -> u32 {
        self.n[port as usize][pol as usize]
    }

    pub fn with_added(mut self, port: Port, pol: Polarization, count: u32) -> Self {
        self.n[port as usize][pol as usize] += count;
        self
    }

    pub fn total(&self) -> u32 {
        self.n.iter().flatten().sum()
    }

    pub fn port_total(&self, port: Port) -> u32 {
        self.n[port as usize].iter().sum()
    }

    /// `√(Π nₖ!)`, the norm of the monomial `Π (c†ₖ)^{nₖ} |0⟩`.
    pub fn monomial_norm(&self) -> f64 {
        self.n
            .iter()
            .flatten()
            .map(|&k| (1..=k).map(f64::from).product::<f64>())
            .product::<f64>()
            .sqrt()
    }
}

impl fmt::Debug for ModeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|{}H {}V ; {}H {}V⟩",
            self.n[0][0], self.n[0][1], self.n[1][0], self.n[1][1]
        )
    }
}

/// Amplitude of one multimode photon-number configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockAmplitude {
    pub config: ModeConfig,
    pub amp: Complex,
}

/// A polynomial in creation operators applied to vacuum, stored as
/// monomial exponents → coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CreationPolynomial {
    terms: BTreeMap<ModeConfig, Complex>,
}

impl CreationPolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(config: ModeConfig, coeff: Complex) -> Self {
        let mut p = Self::new();
        p.add_term(config, coeff);
        p
    }

    pub fn add_term(&mut self, config: ModeConfig, coeff: Complex) {
        *self.terms.entry(config).or_default() += coeff;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModeConfig, &Complex)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, config: &ModeConfig) -> Complex {
        self.terms.get(config).copied().unwrap_or_default()
    }

    pub fn max_photons(&self) -> u32 {
        self.terms.keys().map(ModeConfig::total).max().unwrap_or(0)
    }

    /// Multiplies by the linear form `Σ weight · (creation operator of mode)`.
    fn times_linear(&self, form: &[(Port, Polarization, Complex)]) -> Self {
        let mut out = Self::new();
        for (config, coeff) in &self.terms {
            for &(port, pol, w) in form {
                out.add_term(config.with_added(port, pol, 1), coeff * w);
            }
        }
        out
    }

    pub fn to_state(&self) -> FockState {
        let amps = self
            .terms
            .iter()
            .map(|(cfg, k)| (*cfg, k * cfg.monomial_norm()))
            .collect();
        FockState { amps }
    }
}

/// State vector in the photon-number basis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FockState {
    amps: BTreeMap<ModeConfig, Complex>,
}

impl FockState {
    pub fn from_amplitudes(amps: impl IntoIterator<Item = FockAmplitude>) -> Self {
        let mut map = BTreeMap::new();
        for a in amps {
            *map.entry(a.config).or_default() += a.amp;
        }
        Self { amps: map }
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = FockAmplitude> + '_ {
        self.amps.iter().map(|(config, amp)| FockAmplitude {
            config: *config,
            amp: *amp,
        })
    }

    pub fn amplitude(&self, config: &ModeConfig) -> Complex {
        self.amps.get(config).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0) {
            return Err(Error::InvalidParameter("cannot normalize a zero state".into()));
        }
        Ok(Self {
            amps: self.amps.iter().map(|(k, v)| (*k, v / n)).collect(),
        })
    }

    /// Back to creation-operator coefficients.
    pub fn to_polynomial(&self) -> CreationPolynomial {
        let mut p = CreationPolynomial::new();
        for (cfg, amp) in &self.amps {
            p.add_term(*cfg, amp / cfg.monomial_norm());
        }
        p
    }

    /// Probability mass on configurations satisfying `pred`.
    pub fn probability_where(&self, pred: impl Fn(&ModeConfig) -> bool) -> f64 {
        self.amps
            .iter()
            .filter(|(cfg, _)| pred(cfg))
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// Image of one input creation operator under the beamsplitter.
fn output_form(port: Port, pol: Polarization) -> [(Port, Polarization, Complex); 2] {
    let r = FRAC_1_SQRT_2;
    match port {
        Port::First => [(Port::First, pol, c(r, 0.0)), (Port::Second, pol, c(0.0, r))],
        Port::Second => [(Port::First, pol, c(0.0, r)), (Port::Second, pol, c(r, 0.0))],
    }
}

/// Beamsplitter output without renormalization; the norm equals the input's.
pub fn bs_transform_unnormalized(input: &CreationPolynomial, n_max: u32) -> Result<FockState> {
    let photons = input.max_photons();
    if photons > n_max {
        return Err(Error::TruncationOverflow { photons, n_max });
    }
    let mut out = CreationPolynomial::new();
    for (config, coeff) in input.terms() {
        let mut poly = CreationPolynomial::monomial(ModeConfig::vacuum(), *coeff);
        for port in Port::BOTH {
            for pol in Polarization::BOTH {
                let form = output_form(port, pol);
                for _ in 0..config.get(port, pol) {
                    poly = poly.times_linear(&form);
                }
            }
        }
        for (cfg, k) in poly.terms() {
            out.add_term(*cfg, *k);
        }
    }
    Ok(out.to_state())
}

/// Applies the beamsplitter to `input` (a polynomial in input-mode creation
/// operators acting on vacuum) and returns the normalized output state.
pub fn bs_transform(input: &CreationPolynomial, n_max: u32) -> Result<FockState> {
    bs_transform_unnormalized(input, n_max)?.normalized()
}

/// Output of post-selecting exactly one photon in each output port.
#[derive(Debug, Clone)]
pub struct Postselected {
    pub rho: DensityMatrix,
    pub success_prob: f64,
}

/// Two-qubit basis index of a configuration with one photon per port, or `None`.
pub fn two_qubit_index(config: &ModeConfig) -> Option<usize> {
    if config.total() != 2 || config.port_total(Port::First) != 1 {
        return None;
    }
    let pol_c = usize::from(config.get(Port::First, Polarization::V) == 1);
    let pol_d = usize::from(config.get(Port::Second, Polarization::V) == 1);
    Some(2 * pol_c + pol_d)
}

/// Keeps one-photon-per-port configurations and maps `(c-pol, d-pol)` onto
/// the `{HH, HV, VH, VV}` basis.
pub fn postselect_two_qubit(state: &FockState) -> Result<Postselected> {
    let total = state.norm_sqr();
    let mut ket = [Complex::default(); 4];
    for a in state.amplitudes() {
        if let Some(idx) = two_qubit_index(&a.config) {
            ket[idx] += a.amp;
        }
    }
    let kept: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
    if kept.sqrt() < EMPTY_POSTSELECTION_NORM {
        return Err(Error::EmptyPostselection);
    }
    Ok(Postselected {
        rho: DensityMatrix::pure(&ket)?,
        success_prob: kept / total,
    })
}
