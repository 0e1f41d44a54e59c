//! Operator norms by power iteration, numeric rank, and norm profiles.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::carrier::Carrier;
use crate::fock::{eval_poly, FockError, Representation};
use crate::path_space::FockBasis;
use crate::poly::NcPolynomial;
use crate::sparse::SparseOperator;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("truncation levels must be ascending")]
    NotAscending,
    #[error("power iteration stopped after {iterations} steps with gap {gap:e} above {tolerance:e}")]
    NotConverged {
        iterations: usize,
        gap: f64,
        tolerance: f64,
    },
}

/// Power-iteration parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            tol: 1e-10,
            max_iter: 200_000,
            seed: 0x5eed,
        }
    }
}

impl NormOptions {
    pub fn with_tol(tol: f64) -> Self {
        NormOptions {
            tol,
            ..Self::default()
        }
    }
}

/// Largest singular value estimate.
///
/// `value` is `sqrt` of a Rayleigh quotient of `A^*A`, hence never above
/// the true norm. `gap` is `sqrt(ρ + ‖r‖) - sqrt(ρ)` for the residual `r`
/// of the final iterate: an eigenvalue of `A^*A` lies within `‖r‖` of `ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl NormEstimate {
    pub fn upper(&self) -> f64 {
        self.value + self.gap
    }

    /// The estimate, or an error when it did not converge.
    pub fn require(self) -> Result<Self, NormError> {
        if self.converged {
            Ok(self)
        } else {
            Err(NormError::NotConverged {
                iterations: self.iterations,
                gap: self.gap,
                tolerance: self.tolerance,
            })
        }
    }
}

fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn op_norm(a: &SparseOperator, opts: NormOptions) -> NormEstimate {
    assert!(opts.tol > 0.0, "tolerance must be positive");
    if a.is_zero() {
        return NormEstimate {
            value: 0.0,
            gap: 0.0,
            tolerance: opts.tol,
            iterations: 0,
            converged: true,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Complex64> = (0..a.cols())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let n0 = norm2(&x);
    x.iter_mut().for_each(|v| *v /= n0);
    let mut value = 0.0;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let y = a.adjoint_matvec(&a.matvec(&x));
        let rho: f64 = x.iter().zip(&y).map(|(xi, yi)| (xi.conj() * yi).re).sum::<f64>().max(0.0);
        let resid = norm2(
            &y.iter()
                .zip(&x)
                .map(|(yi, xi)| yi - xi * rho)
                .collect::<Vec<_>>(),
        );
        value = rho.sqrt();
        gap = (rho + resid).sqrt() - value;
        if gap <= opts.tol {
            break;
        }
        let ny = norm2(&y);
        if ny == 0.0 {
            // The start vector fell into the kernel; the operator is nonzero,
            // so restart from a fresh random vector.
            x.iter_mut()
                .for_each(|v| *v = Complex64::new(rng.random_range(-1.0..1.0), 0.0));
            let n = norm2(&x);
            x.iter_mut().for_each(|v| *v /= n);
            continue;
        }
        x = y.into_iter().map(|v| v / ny).collect();
    }
    NormEstimate {
        value,
        gap,
        tolerance: opts.tol,
        iterations,
        converged: gap <= opts.tol,
    }
}

/// Dense copy of the rows and columns that carry entries.
fn dense_support(a: &SparseOperator) -> DMatrix<Complex64> {
    let mut rows: Vec<usize> = a.entries().map(|(r, _, _)| r).collect();
    let mut cols: Vec<usize> = a.entries().map(|(_, c, _)| c).collect();
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    let sub = a.restrict(&rows, &cols);
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (r, c, v) in sub.entries() {
        m[(r, c)] = v;
    }
    m
}

/// Singular values in descending order, from a dense decomposition.
pub fn dense_singular_values(a: &SparseOperator) -> Vec<f64> {
    if a.is_zero() {
        return Vec::new();
    }
    let mut s: Vec<f64> = dense_support(a).singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Number of singular values above `tol`.
pub fn numeric_rank(a: &SparseOperator, tol: f64) -> usize {
    dense_singular_values(a).iter().filter(|&&s| s > tol).count()
}

/// `‖Π_N p Π_N‖` on the Fock space for each `N` in `levels`.
pub fn truncated_norm_profile(
    p: &NcPolynomial,
    carrier: &Carrier,
    levels: &[usize],
    opts: NormOptions,
) -> Result<Vec<NormEstimate>, NormError> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NormError::NotAscending);
    }
    let carrier = Arc::new(carrier.clone());
    levels
        .iter()
        .map(|&n| {
            let basis = FockBasis::new(carrier.clone(), n);
            op_norm(&eval_poly(p, &basis)?, opts).require()
        })
        .collect()
}

/// `|‖p(A)‖ - ‖p(B)‖|`.
pub fn isometry_gap(
    p: &NcPolynomial,
    a: &dyn Representation,
    b: &dyn Representation,
    opts: NormOptions,
) -> Result<f64, NormError> {
    let na = op_norm(&eval_poly(p, a)?, opts).require()?;
    let nb = op_norm(&eval_poly(p, b)?, opts).require()?;
    Ok((na.value - nb.value).abs())
}
