//! Simulated two-qubit polarization tomography.
//!
//! Each arm projects onto one of `H`, `V`, `D = (H+V)/√2` or `R = (H+iV)/√2`;
//! the 16 pairwise combinations form the measurement schedule. Counts are
//! Poisson distributed with mean `mean_total · ⟨ψ_k|ρ|ψ_k⟩`.

mod bootstrap;
mod mle;

pub use bootstrap::{bootstrap_uncertainty, BootstrapSummary, Statistic};
pub use mle::{mle_reconstruct, mle_reconstruct_weighted, MleOptions, ReconstructionResult};

use std::f64::consts::FRAC_1_SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::linalg::{c, Complex, ComplexMatrix, DensityMatrix};

/// Local analyzer states of the standard schedule, in order.
pub const STANDARD_LOCAL_STATES: [char; 4] = ['H', 'V', 'D', 'R'];

/// Single-qubit analyzer ket for a polarization label (`H V D A R L`).
pub fn local_ket(label: char) -> Option<[Complex; 2]> {
    let r = FRAC_1_SQRT_2;
    Some(match label {
        'H' => [c(1.0, 0.0), c(0.0, 0.0)],
        'V' => [c(0.0, 0.0), c(1.0, 0.0)],
        'D' => [c(r, 0.0), c(r, 0.0)],
        'A' => [c(r, 0.0), c(-r, 0.0)],
        'R' => [c(r, 0.0), c(0.0, r)],
        'L' => [c(r, 0.0), c(0.0, -r)],
        _ => return None,
    })
}

/// A product projector `|a⟩⟨a| ⊗ |b⟩⟨b|` applied to outputs `c` and `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSetting {
    pub label: String,
    pub ket_a: [Complex; 2],
    pub ket_b: [Complex; 2],
}

impl ProjectorSetting {
    pub fn new(label: impl Into<String>, ket_a: [Complex; 2], ket_b: [Complex; 2]) -> Result<Self> {
        for ket in [&ket_a, &ket_b] {
            let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("analyzer ket has norm² {norm}")));
            }
        }
        Ok(Self {
            label: label.into(),
            ket_a,
            ket_b,
        })
    }

    /// Parses a two-letter label such as `"RD"`.
    pub fn from_label(label: &str) -> Result<Self> {
        let chars: Vec<char> = label.chars().collect();
        let bad = || Error::InvalidParameter(format!("unknown projector label {label:?}"));
        if chars.len() != 2 {
            return Err(bad());
        }
        let a = local_ket(chars[0]).ok_or_else(bad)?;
        let b = local_ket(chars[1]).ok_or_else(bad)?;
        Self::new(label, a, b)
    }

    /// `|a⟩ ⊗ |b⟩` in the `{HH, HV, VH, VV}` basis.
    pub fn ket(&self) -> [Complex; 4] {
        let (a, b) = (self.ket_a, self.ket_b);
        [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    }

    pub fn projector(&self) -> ComplexMatrix {
        let k = self.ket();
        ComplexMatrix::outer(&k, &k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyRecord {
    pub setting: ProjectorSetting,
    pub count: u64,
}

/// `{H,V,D,R} ⊗ {H,V,D,R}`, first letter for output `c`.
pub fn standard_settings() -> Vec<ProjectorSetting> {
    let mut out = Vec::with_capacity(16);
    for a in STANDARD_LOCAL_STATES {
        for b in STANDARD_LOCAL_STATES {
            out.push(ProjectorSetting::from_label(&format!("{a}{b}")).expect("standard labels parse"));
        }
    }
    out
}

/// Mean count `mean_total · ⟨ψ|ρ|ψ⟩` for each setting.
pub fn expected_counts(rho: &DensityMatrix, settings: &[ProjectorSetting], mean_total: f64) -> Vec<f64> {
    settings
        .iter()
        .map(|s| mean_total * rho.probability(&s.ket()).max(0.0))
        .collect()
}

/// Poisson-distributed counts; identical output for identical `seed`.
pub fn simulate_counts(
    rho_true: &DensityMatrix,
    settings: &[ProjectorSetting],
    mean_total: f64,
    seed: u64,
) -> Result<Vec<TomographyRecord>> {
    if rho_true.dim() != 4 {
        return Err(Error::DimensionMismatch("tomography simulates two-qubit states".into()));
    }
    if !(mean_total > 0.0) || !mean_total.is_finite() {
        return Err(Error::InvalidParameter(format!("mean_total must be positive, got {mean_total}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means = expected_counts(rho_true, settings, mean_total);
    settings
        .iter()
        .zip(means)
        .map(|(s, mean)| {
            Ok(TomographyRecord {
                setting: s.clone(),
                count: poisson_draw(&mut rng, mean)?,
            })
        })
        .collect()
}

pub(crate) fn poisson_draw<R: rand::Rng>(rng: &mut R, mean: f64) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidParameter(format!("Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::rho_incoh;

    #[test]
    fn schedule_has_sixteen_normalized_settings() {
        let s = standard_settings();
        assert_eq!(s.len(), 16);
        assert_eq!(s[0].label, "HH");
        assert_eq!(s[0].ket_a, [c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(s[0].ket_b, [c(1.0, 0.0), c(0.0, 0.0)]);
        for setting in &s {
            for ket in [setting.ket_a, setting.ket_b] {
                let n: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
        let labels: Vec<&str> = s.iter().map(|x| x.label.as_str()).collect();
        assert_eq!(labels[7], "VR");
        assert_eq!(labels[14], "RD");
    }

    #[test]
    fn label_parsing() {
        let s = ProjectorSetting::from_label("RD").unwrap();
        assert_eq!(s.ket_a, local_ket('R').unwrap());
        assert_eq!(s.ket_b, local_ket('D').unwrap());
        assert!(ProjectorSetting::from_label("HX").is_err());
        assert!(ProjectorSetting::from_label("HHH").is_err());
        assert!(ProjectorSetting::new("bad", [c(1.0, 0.0), c(1.0, 0.0)], local_ket('H').unwrap()).is_err());
    }

    #[test]
    fn orthogonal_projection_gets_no_counts() {
        let hh = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let vv = vec![ProjectorSetting::from_label("VV").unwrap()];
        assert_eq!(expected_counts(&hh, &vv, 1e4), vec![0.0]);
        for seed in 0..20 {
            assert_eq!(simulate_counts(&hh, &vv, 1e4, seed).unwrap()[0].count, 0);
        }
    }

    #[test]
    fn maximally_mixed_state_gives_uniform_means() {
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        for m in expected_counts(&mixed, &standard_settings(), 1000.0) {
            assert!((m - 250.0).abs() < 1e-9);
        }
    }

    #[test]
    fn simulated_mean_matches_expectation() {
        let hh = vec![ProjectorSetting::from_label("HH").unwrap()];
        let mean_total = 400.0;
        let n = 10_000;
        let sum: u64 = (0..n)
            .map(|seed| simulate_counts(&rho_incoh(), &hh, mean_total, seed).unwrap()[0].count)
            .sum();
        let mean = sum as f64 / n as f64;
        let expected = mean_total * 0.25;
        let sigma = (expected / n as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * sigma, "{mean} vs {expected}");
    }

    #[test]
    fn simulation_is_seed_deterministic() {
        let s = standard_settings();
        let a = simulate_counts(&rho_incoh(), &s, 1e4, 42).unwrap();
        let b = simulate_counts(&rho_incoh(), &s, 1e4, 42).unwrap();
        let c2 = simulate_counts(&rho_incoh(), &s, 1e4, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c2);
        assert!(simulate_counts(&rho_incoh(), &s, 0.0, 1).is_err());
    }
}
