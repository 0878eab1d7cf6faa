//! Closed-form reference states.
//!
//! These are written out entry by entry so that the beamsplitter simulation
//! in [`crate::optics`] can be checked against them independently.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::{c, Complex, ComplexMatrix, DensityMatrix};

/// Post-selected state for mutually coherent inputs with relative phase `phi`.
pub fn rho_coh(phi: f64) -> DensityMatrix {
    let e = |k: f64| Complex::from_polar(1.0, k * phi);
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    let rows = [
        [one, i * e(-1.0), -i * e(-1.0), e(-2.0)],
        [-i * e(1.0), one, -one, -i * e(-1.0)],
        [i * e(1.0), -one, one, i * e(-1.0)],
        [e(2.0), i * e(1.0), -i * e(1.0), one],
    ];
    let m = ComplexMatrix::from_rows(&rows).unwrap().scale_real(0.25);
    DensityMatrix::new(m).expect("closed-form coherent state is valid")
}

/// Post-selected state for mutually incoherent (phase-randomized) inputs.
pub fn rho_incoh() -> DensityMatrix {
    rho_incoh_with_coherence(1.0)
}

/// The incoherent-input state with its `HV`/`VH` coherence scaled by `gamma`.
pub fn rho_incoh_with_coherence(gamma: f64) -> DensityMatrix {
    let mut m = ComplexMatrix::identity(4).scale_real(0.25);
    m[(1, 2)] = c(-0.25 * gamma, 0.0);
    m[(2, 1)] = c(-0.25 * gamma, 0.0);
    DensityMatrix::new(m).expect("gamma in [0, 1] gives a valid state")
}

/// Reduced state at output `c` for coherent inputs.
pub fn rho_coh_c(phi: f64) -> DensityMatrix {
    let e = Complex::from_polar(1.0, phi);
    let m = ComplexMatrix::from_rows(&[
        [c(0.5, 0.0), c(0.0, -0.5) * e.conj()],
        [c(0.0, 0.5) * e, c(0.5, 0.0)],
    ])
    .unwrap();
    DensityMatrix::new(m).unwrap()
}

/// Reduced state at output `d` for coherent inputs.
pub fn rho_coh_d(phi: f64) -> DensityMatrix {
    let e = Complex::from_polar(1.0, phi);
    let m = ComplexMatrix::from_rows(&[
        [c(0.5, 0.0), c(0.0, 0.5) * e.conj()],
        [c(0.0, -0.5) * e, c(0.5, 0.0)],
    ])
    .unwrap();
    DensityMatrix::new(m).unwrap()
}

/// `(|HV⟩ − |VH⟩)/√2`
pub fn psi_minus_ket() -> [Complex; 4] {
    [
        c(0.0, 0.0),
        c(FRAC_1_SQRT_2, 0.0),
        c(-FRAC_1_SQRT_2, 0.0),
        c(0.0, 0.0),
    ]
}

pub fn psi_minus() -> DensityMatrix {
    DensityMatrix::pure(&psi_minus_ket()).unwrap()
}

/// `p |ψ⁻⟩⟨ψ⁻| + (1 − p) I/4`
pub fn werner(p: f64) -> DensityMatrix {
    let bell = psi_minus();
    let noise = DensityMatrix::maximally_mixed(4).unwrap();
    DensityMatrix::mixture(&[(p, &bell), (1.0 - p, &noise)]).unwrap()
}

/// `¼(I⊗I + Σ cᵢ σᵢ⊗σᵢ)`; returns `None` when the coefficients give a non-physical matrix.
pub fn bell_diagonal(coeffs: [f64; 3]) -> Option<DensityMatrix> {
    let paulis = ComplexMatrix::pauli();
    let mut m = ComplexMatrix::identity(4);
    for (ci, s) in coeffs.iter().zip(&paulis) {
        m = &m + &s.tensor(s).scale_real(*ci);
    }
    DensityMatrix::new(m.scale_real(0.25)).ok()
}
