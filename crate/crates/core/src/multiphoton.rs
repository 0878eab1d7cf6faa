//! Multi-photon contamination of coincidence counts.
//!
//! With threshold detectors, input events where `i + j ≥ 3` photons reach
//! the beamsplitter can still register as a coincidence. The error fraction
//! is the share of such events among all coincidences,
//!
//! ```text
//! E(μ) = Σ_{i+j≥3} p(μ,i,j) / Σ_{i+j≥2} p(μ,i,j),   p(μ,i,j) = P(μ,i) P(μ,j) Q(i+j)
//! ```
//!
//! with Poisson photon statistics `P` and the coincidence-involvement
//! probability `Q(n) = 1 − 2^{1−n}`.

use crate::error::{Error, Result};

/// Default photon-number truncation of the double sum (on `i + j`).
pub const DEFAULT_N_CUT: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModelParams {
    mu: f64,
    n_cut: u32,
}

impl ErrorModelParams {
    pub fn new(mu: f64, n_cut: u32) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mean photon number must be positive, got {mu}")));
        }
        if n_cut < 3 {
            return Err(Error::InvalidParameter(format!("n_cut must be at least 3, got {n_cut}")));
        }
        Ok(Self { mu, n_cut })
    }

    pub fn with_default_cut(mu: f64) -> Result<Self> {
        Self::new(mu, DEFAULT_N_CUT)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n_cut(&self) -> u32 {
        self.n_cut
    }
}

/// `e^{−μ} μⁿ / n!`, evaluated in the log domain.
pub fn poisson_pmf(mu: f64, n: u32) -> f64 {
    if mu == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (2..=n).map(|k| f64::from(k).ln()).sum();
    (-mu + f64::from(n) * mu.ln() - ln_fact).exp()
}

/// Poisson probabilities for `n = 0..=n_max` by the ratio recurrence `P(n) = P(n−1) μ/n`.
pub fn poisson_table(mu: f64, n_max: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut p = (-mu).exp();
    out.push(p);
    for n in 1..=n_max {
        p *= mu / f64::from(n);
        out.push(p);
    }
    out
}

/// `Q(n) = 1 − (1/2)^{n−1}`; zero for `n ≤ 1`.
pub fn coincidence_involvement(n: u32) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    1.0 - 0.5f64.powi(n as i32 - 1)
}

/// Share of coincidences that involve more than two photons.
pub fn error_fraction(params: &ErrorModelParams) -> f64 {
    let n_cut = params.n_cut;
    let p = poisson_table(params.mu, n_cut);
    // group the double sum by total photon number s = i + j
    let mut multi = 0.0;
    let mut two = 0.0;
    for s in 2..=n_cut {
        let joint: f64 = (0..=s).map(|i| p[i as usize] * p[(s - i) as usize]).sum();
        let term = joint * coincidence_involvement(s);
        if s == 2 {
            two += term;
        } else {
            multi += term;
        }
    }
    let total = two + multi;
    if total == 0.0 {
        0.0
    } else {
        (multi / total).clamp(0.0, 1.0)
    }
}
