//! Dense complex linear algebra for one- and two-qubit states.
//!
//! Two-qubit matrices use the product basis `{HH, HV, VH, VV}` throughout,
//! with the first tensor factor being output port `c` (subsystem A) and the
//! second being output port `d` (subsystem B). See [`TWO_QUBIT_BASIS`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Labels of the two-qubit product basis, in matrix index order.
pub const TWO_QUBIT_BASIS: [&str; 4] = ["HH", "HV", "VH", "VV"];

/// Labels of the single-qubit basis, in matrix index order.
pub const ONE_QUBIT_BASIS: [&str; 2] = ["H", "V"];

/// Max-norm tolerance on `ρ - ρ†` accepted by [`DensityMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `|Tr ρ - 1|` accepted by [`DensityMatrix::new`].
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything lower is rejected.
pub const PSD_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

pub(crate) fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Which tensor factor of a two-qubit state an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    /// First factor, output port `c`.
    A,
    /// Second factor, output port `d`.
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::BadShape {
                rows,
                cols,
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a square or rectangular matrix from nested rows.
    pub fn from_rows<R: AsRef<[Complex]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != n_cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(n_rows, n_cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) })
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[Complex], w: &[Complex]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    /// Pauli matrices in the `{H, V}` basis: `σ_x`, `σ_y`, `σ_z`.
    pub fn pauli() -> [Self; 3] {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        [
            Self::from_rows(&[[z, one], [one, z]]).unwrap(),
            Self::from_rows(&[[z, -i], [i, z]]).unwrap(),
            Self::from_rows(&[[one, z], [z, -one]]).unwrap(),
        ]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate in the stored basis.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, k: Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(c(k, 0.0))
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn apply(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `⟨v|M|v⟩`
    pub fn expectation(&self, v: &[Complex]) -> Complex {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖M − M†‖_max`
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Kronecker product; `self` carries the slow index.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Frobenius inner product `Tr(A† B)`.
    pub fn inner(&self, other: &Self) -> Complex {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        ComplexMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum()
        })
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, aligned with `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `V f(Λ) V†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        &(v * &ComplexMatrix::diagonal(&mapped)) * &v.adjoint()
    }
}

/// Cyclic complex Jacobi diagonalization.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale: f64 = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off <= 1e-32 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let b_abs = b.norm();
                if b_abs * b_abs <= 1e-36 * scale {
                    a[(p, q)] = c(0.0, 0.0);
                    a[(q, p)] = c(0.0, 0.0);
                    continue;
                }
                let phase = c(b.re / b_abs, -b.im / b_abs); // e^{-iα}
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * b_abs);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let g_pp = c(cs, 0.0);
                let g_pq = c(sn, 0.0);
                let g_qp = phase * (-sn);
                let g_qq = phase * cs;

                // A <- A G, V <- V G
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
                // A <- G† A
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Hermitian, unit-trace, positive-semidefinite 2x2 or 4x4 matrix.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `mat` as a density matrix.
    ///
    /// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero and the result is
    /// renormalized; the stored matrix is made exactly Hermitian.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() || !(mat.rows == 2 || mat.rows == 4) {
            return Err(Error::DimensionMismatch(format!(
                "density matrices must be 2x2 or 4x4, got {}x{}",
                mat.rows, mat.cols
            )));
        }
        let deviation = mat.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = mat.trace();
        if (trace - c(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        let mat = mat.hermitian_part();
        let eig = hermitian_eig(&mat, HERMITIAN_TOL)?;
        let min = *eig.values.last().unwrap();
        if min < -PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        if min < 0.0 {
            let clamped = eig.reconstruct_with(|x| x.max(0.0)).hermitian_part();
            let tr = clamped.trace().re;
            return Ok(Self {
                mat: clamped.scale_real(1.0 / tr),
            });
        }
        Ok(Self { mat })
    }

    /// `|ψ⟩⟨ψ|` for a ket normalized on the fly.
    pub fn pure(ket: &[Complex]) -> Result<Self> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("ket has zero or non-finite norm".into()));
        }
        let ket: Vec<Complex> = ket.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&ket, &ket))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Convex combination `Σ w_i ρ_i / Σ w_i`.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let dim = first.1.dim();
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) || !(total > 0.0) {
            return Err(Error::InvalidParameter(
                "mixture weights must be non-negative with positive sum".into(),
            ));
        }
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch("mixture of unequal dims".into()));
            }
            acc = &acc + &rho.mat.scale_real(w / total);
        }
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eigen(&self) -> HermitianEigen {
        hermitian_eig(&self.mat, HERMITIAN_TOL).expect("density matrix is Hermitian")
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().values
    }

    /// Probability `⟨ψ|ρ|ψ⟩` for a normalized ket.
    pub fn probability(&self, ket: &[Complex]) -> f64 {
        self.mat.expectation(ket).re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.mat.tensor(&other.mat))
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix({:?})", self.mat)
    }
}

/// Reduces a two-qubit state to the subsystem named by `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "partial trace is defined for two-qubit states".into(),
        ));
    }
    let m = rho.matrix();
    let reduced = ComplexMatrix::from_fn(2, 2, |i, j| match keep {
        Subsystem::A => (0..2).map(|k| m[(2 * i + k, 2 * j + k)]).sum(),
        Subsystem::B => (0..2).map(|k| m[(2 * k + i, 2 * k + j)]).sum(),
    });
    DensityMatrix::new(reduced)
}

/// Eigenvalues below this are treated as numerically zero by [`support_factor`].
pub(crate) const RANK_FLOOR: f64 = 1e-14;

/// `A` with `ρ ≈ A A†`, keeping only eigen-directions with eigenvalue above [`RANK_FLOOR`].
///
/// Square roots of round-off eigenvalues would otherwise leak `O(1e-8)` errors
/// into quantities such as the fidelity of pure states.
pub(crate) fn support_factor(rho: &DensityMatrix) -> ComplexMatrix {
    let eig = rho.eigen();
    let kept: Vec<usize> = (0..rho.dim()).filter(|&k| eig.values[k] > RANK_FLOOR).collect();
    ComplexMatrix::from_fn(rho.dim(), kept.len(), |i, j| {
        eig.vectors[(i, kept[j])] * eig.values[kept[j]].sqrt()
    })
}

/// Spectrum of `A† M A`, symmetrized before diagonalization.
pub(crate) fn sandwiched_spectrum(factor: &ComplexMatrix, m: &ComplexMatrix) -> Vec<f64> {
    let inner = &(&factor.adjoint() * m) * factor;
    hermitian_eig(&inner.hermitian_part(), 1e-9)
        .expect("sandwich of a Hermitian matrix is Hermitian")
        .values
}

/// Uhlmann fidelity `(Tr √(√a b √a))²`.
///
/// Evaluated as `(Σ √μᵢ)²` over the spectrum `μ` of `A† b A` with `a = A A†`,
/// which coincides with the spectrum of `√a b √a` on its support.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between {}-dim and {}-dim states",
            a.dim(),
            b.dim()
        )));
    }
    let spectrum = sandwiched_spectrum(&support_factor(a), b.matrix());
    let root_trace: f64 = spectrum
        .iter()
        .filter(|&&x| x > RANK_FLOOR)
        .map(|x| x.sqrt())
        .sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// `Tr ρ²`
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    m.inner(m).re
}
