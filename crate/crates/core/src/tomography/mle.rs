//! Maximum-likelihood reconstruction with a Cholesky parametrization.
//!
//! The unnormalized estimate is `T†T` with `T` lower triangular (real
//! diagonal, complex below), so every iterate is positive semidefinite.
//! Its trace plays the role of the total intensity `N`, and the predicted
//! count for projector `ψ_k` is `λ_k = ‖Tψ_k‖²`. The Poisson log-likelihood
//! `Σ_k (n_k ln λ_k − λ_k)` is maximized with L-BFGS.

use std::collections::VecDeque;

use super::{ProjectorSetting, TomographyRecord};
use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eig, Complex, ComplexMatrix, DensityMatrix};

const DIM: usize = 4;
const N_PARAMS: usize = DIM * DIM;
const LBFGS_MEMORY: usize = 8;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
/// Consecutive small-change iterations required before declaring convergence.
const STALL_ITERATIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    pub max_iter: usize,
    /// Relative change of the log-likelihood that counts as converged.
    pub tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub rho: DensityMatrix,
    /// `Σ_k (n_k ln λ_k − λ_k)` at the returned estimate.
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood after each accepted step, starting from the initial guess.
    pub history: Vec<f64>,
}

/// Index pairs `(row, col)` of the strictly lower triangle, in parameter order.
const LOWER: [(usize, usize); 6] = [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];

fn unpack(x: &[f64]) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(DIM, DIM);
    for i in 0..DIM {
        t[(i, i)] = c(x[i], 0.0);
    }
    for (k, &(i, j)) in LOWER.iter().enumerate() {
        t[(i, j)] = c(x[DIM + 2 * k], x[DIM + 2 * k + 1]);
    }
    t
}

struct Problem {
    kets: Vec<[Complex; 4]>,
    counts: Vec<f64>,
}

impl Problem {
    /// Negative log-likelihood and its gradient. `None` when a setting with
    /// counts has zero predicted rate.
    fn evaluate(&self, x: &[f64], want_grad: bool) -> Option<(f64, Vec<f64>)> {
        let t = unpack(x);
        let mut f = 0.0;
        let mut g = ComplexMatrix::zeros(DIM, DIM);
        for (psi, &n) in self.kets.iter().zip(&self.counts) {
            let v = t.apply(psi);
            let lambda: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if n > 0.0 {
                if lambda <= 0.0 {
                    return None;
                }
                f += lambda - n * lambda.ln();
            } else {
                f += lambda;
            }
            if want_grad {
                let w = 1.0 - if n > 0.0 { n / lambda } else { 0.0 };
                for i in 0..DIM {
                    for j in 0..=i {
                        g[(i, j)] += v[i] * psi[j].conj() * w;
                    }
                }
            }
        }
        if !f.is_finite() {
            return None;
        }
        let mut grad = vec![0.0; if want_grad { N_PARAMS } else { 0 }];
        if want_grad {
            for i in 0..DIM {
                grad[i] = 2.0 * g[(i, i)].re;
            }
            for (k, &(i, j)) in LOWER.iter().enumerate() {
                grad[DIM + 2 * k] = 2.0 * g[(i, j)].re;
                grad[DIM + 2 * k + 1] = 2.0 * g[(i, j)].im;
            }
        }
        Some((f, grad))
    }

    fn value(&self, x: &[f64]) -> Option<f64> {
        self.evaluate(x, false).map(|(f, _)| f)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rank of the real span of the projectors, via the Gram matrix `Tr(P_k P_l)`.
fn projector_span_rank(kets: &[[Complex; 4]]) -> Result<usize> {
    let n = kets.len();
    let gram = ComplexMatrix::from_fn(n, n, |k, l| {
        let overlap: Complex = kets[k].iter().zip(&kets[l]).map(|(a, b)| a.conj() * b).sum();
        c(overlap.norm_sqr(), 0.0)
    });
    let values = hermitian_eig(&gram, 1e-14)?.values;
    let largest = values.iter().cloned().fold(0.0, f64::max);
    Ok(values.iter().filter(|&&v| v > 1e-10 * largest.max(1.0)).count())
}

/// Reconstructs a density matrix from integer counts.
pub fn mle_reconstruct(records: &[TomographyRecord], opts: &MleOptions) -> Result<ReconstructionResult> {
    let settings: Vec<ProjectorSetting> = records.iter().map(|r| r.setting.clone()).collect();
    let counts: Vec<f64> = records.iter().map(|r| r.count as f64).collect();
    mle_reconstruct_weighted(&settings, &counts, opts)
}

/// Same as [`mle_reconstruct`] but accepts non-integer (e.g. expected) counts.
pub fn mle_reconstruct_weighted(
    settings: &[ProjectorSetting],
    counts: &[f64],
    opts: &MleOptions,
) -> Result<ReconstructionResult> {
    if settings.len() != counts.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} settings but {} counts",
            settings.len(),
            counts.len()
        )));
    }
    if counts.iter().any(|n| !n.is_finite() || *n < 0.0) {
        return Err(Error::InvalidParameter("counts must be finite and non-negative".into()));
    }
    if opts.max_iter == 0 || !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("max_iter and tol must be positive".into()));
    }
    let kets: Vec<[Complex; 4]> = settings.iter().map(|s| s.ket()).collect();
    let rank = projector_span_rank(&kets)?;
    if rank < N_PARAMS {
        return Err(Error::NotInformationallyComplete(format!(
            "projectors span a {rank}-dimensional space, {N_PARAMS} required"
        )));
    }
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return Err(Error::NotInformationallyComplete("no counts recorded".into()));
    }

    let problem = Problem {
        kets,
        counts: counts.to_vec(),
    };
    let mut x = vec![0.0; N_PARAMS];
    let scale = (total / settings.len() as f64).sqrt();
    for xi in x.iter_mut().take(DIM) {
        *xi = scale;
    }
    let (mut f, mut g) = problem.evaluate(&x, true).ok_or(Error::NonFinite)?;
    let mut history = vec![-f];
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(LBFGS_MEMORY);
    let mut stalled = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let mut d = lbfgs_direction(&g, &memory);
        if dot(&d, &g) >= 0.0 {
            memory.clear();
            d = g.iter().map(|v| -v).collect();
        }
        let step = match line_search(&problem, &x, f, &g, &d) {
            Some(s) => s,
            None if !memory.is_empty() => {
                memory.clear();
                let sd: Vec<f64> = g.iter().map(|v| -v).collect();
                match line_search(&problem, &x, f, &g, &sd) {
                    Some(s) => s,
                    None => {
                        // no representable improvement along the gradient
                        converged = true;
                        break;
                    }
                }
            }
            None => {
                converged = true;
                break;
            }
        };
        let (x_new, f_new) = step;
        let (_, g_new) = problem.evaluate(&x_new, true).ok_or(Error::NonFinite)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if memory.len() == LBFGS_MEMORY {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        let change = (f - f_new).abs() / f_new.abs().max(1.0);
        x = x_new;
        f = f_new;
        g = g_new;
        history.push(-f);
        if change < opts.tol {
            stalled += 1;
            if stalled >= STALL_ITERATIONS {
                converged = true;
                break;
            }
        } else {
            stalled = 0;
        }
    }

    let t = unpack(&x);
    let unnormalized = &t.adjoint() * &t;
    let trace = unnormalized.trace().re;
    if !(trace > 0.0) {
        return Err(Error::NonFinite);
    }
    let rho = DensityMatrix::new(unnormalized.scale_real(1.0 / trace))?;
    Ok(ReconstructionResult {
        rho,
        log_likelihood: -f,
        iterations,
        converged,
        history,
    })
}

/// Two-loop recursion; plain steepest descent when the memory is empty.
fn lbfgs_direction(g: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter().map(|v| -v).collect()
}

/// Armijo backtracking from a unit step; only strict decreases are accepted.
fn line_search(problem: &Problem, x: &[f64], f: f64, g: &[f64], d: &[f64]) -> Option<(Vec<f64>, f64)> {
    let slope = dot(g, d);
    let mut alpha = 1.0;
    for _ in 0..MAX_BACKTRACKS {
        let trial: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect();
        if let Some(ft) = problem.value(&trial) {
            if ft < f && ft <= f + ARMIJO_C1 * alpha * slope {
                return Some((trial, ft));
            }
        }
        alpha *= 0.5;
    }
    None
}
