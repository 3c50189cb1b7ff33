//! Preconditioned conjugate gradients with Lanczos spectral estimates.

use serde::{Deserialize, Serialize};

use super::{axpy, dot, norm2, LinearOperator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// `‖r_k‖₂` for `k = 0..=iterations`.
    pub residual_history: Vec<f64>,
    /// Extreme eigenvalue estimates of the preconditioned operator.
    pub lanczos_eigs: (f64, f64),
    pub converged: bool,
}

impl SolveReport {
    pub fn condition_estimate(&self) -> f64 {
        let (lo, hi) = self.lanczos_eigs;
        if lo > 0.0 {
            hi / lo
        } else {
            f64::INFINITY
        }
    }
}

/// Solves `A x = b` from a zero initial guess. Stops when
/// `‖b − A x‖₂ ≤ tol ‖b‖₂` or after `maxit` iterations.
pub fn pcg(
    a: &dyn LinearOperator,
    p: &dyn LinearOperator,
    b: &[f64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = b.len();
    if a.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
    }
    if p.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let bnorm = norm2(b);
    let mut history = vec![bnorm];
    let target = tol * bnorm;
    if bnorm <= target || n == 0 {
        let report = SolveReport {
            iterations: 0,
            residual_history: history,
            lanczos_eigs: (0.0, 0.0),
            converged: true,
        };
        return Ok((x, report));
    }

    let mut z = vec![0.0; n];
    p.apply_to(&r, &mut z);
    let mut rz = dot(&r, &z);
    if rz.is_nan() || rz <= 0.0 {
        return Err(Error::Breakdown { iteration: 0, value: rz });
    }
    let mut dir = z.clone();
    let mut q = vec![0.0; n];
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut converged = false;

    for it in 0..maxit {
        a.apply_to(&dir, &mut q);
        let pap = dot(&dir, &q);
        if pap.is_nan() || pap <= 0.0 {
            return Err(Error::Breakdown { iteration: it + 1, value: pap });
        }
        let alpha = rz / pap;
        axpy(alpha, &dir, &mut x);
        axpy(-alpha, &q, &mut r);
        alphas.push(alpha);
        let rnorm = norm2(&r);
        history.push(rnorm);
        if rnorm <= target {
            converged = true;
            break;
        }
        p.apply_to(&r, &mut z);
        let rz_new = dot(&r, &z);
        if rz_new.is_nan() || rz_new <= 0.0 {
            return Err(Error::Breakdown { iteration: it + 1, value: rz_new });
        }
        let beta = rz_new / rz;
        betas.push(beta);
        rz = rz_new;
        for (d, zi) in dir.iter_mut().zip(&z) {
            *d = zi + beta * *d;
        }
    }

    let lanczos_eigs = lanczos_extremes(&alphas, &betas);
    let report = SolveReport {
        iterations: alphas.len(),
        residual_history: history,
        lanczos_eigs,
        converged,
    };
    Ok((x, report))
}

fn lanczos_extremes(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    if k == 0 {
        return (0.0, 0.0);
    }
    let mut diag = vec![0.0; k];
    let mut off = vec![0.0; k.saturating_sub(1)];
    diag[0] = 1.0 / alphas[0];
    for j in 1..k {
        diag[j] = 1.0 / alphas[j] + betas[j - 1] / alphas[j - 1];
        off[j - 1] = betas[j - 1].sqrt() / alphas[j - 1];
    }
    tridiagonal_extremes(&diag, &off)
}

/// Smallest and largest eigenvalue of the symmetric tridiagonal matrix
/// with the given diagonal and off-diagonal.
pub fn tridiagonal_extremes(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let k = diag.len();
    if k == 0 {
        return (0.0, 0.0);
    }
    assert_eq!(off.len(), k - 1);
    let t = faer::Mat::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            diag[i]
        } else if i == j + 1 {
            off[j]
        } else if j == i + 1 {
            off[i]
        } else {
            0.0
        }
    });
    match t.self_adjoint_eigenvalues(faer::Side::Lower) {
        Ok(ev) => (ev[0], ev[k - 1]),
        Err(_) => (f64::NAN, f64::NAN),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{factorize, FactorKind, Identity, SparseSym};

    #[test]
    fn identity_converges_in_one() {
        let b = [1.0, -2.0, 3.0];
        let (x, rep) = pcg(&Identity(3), &Identity(3), &b, 1e-12, 10).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert_eq!(x, b.to_vec());
    }

    #[test]
    fn finite_termination() {
        let d: Vec<f64> = (1..=10).map(f64::from).collect();
        let a = SparseSym::from_diagonal(&d);
        let (_, rep) = pcg(&a, &Identity(10), &[1.0; 10], 1e-6, 100).unwrap();
        assert!(rep.converged);
        assert!(rep.iterations <= 10);
        let (lo, hi) = rep.lanczos_eigs;
        assert!(lo >= 1.0 - 1e-8 && hi <= 10.0 + 1e-8 && lo <= hi);
    }

    #[test]
    fn exact_preconditioner_spectrum() {
        let a = SparseSym::from_diagonal(&[1.0, 100.0]);
        let p = factorize(&a, FactorKind::SpdCholesky).unwrap();
        let (_, rep) = pcg(&a, &p, &[1.0, 1.0], 1e-12, 10).unwrap();
        assert!(rep.converged && rep.iterations <= 2);
        assert!((rep.lanczos_eigs.0 - 1.0).abs() < 1e-8);
        assert!((rep.lanczos_eigs.1 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn breakdown_is_reported() {
        let a = SparseSym::from_diagonal(&[1.0, -1.0]);
        let r = pcg(&a, &Identity(2), &[0.0, 1.0], 1e-10, 10);
        assert!(matches!(r, Err(Error::Breakdown { .. })));
    }

    #[test]
    fn zero_rhs() {
        let (x, rep) = pcg(&Identity(2), &Identity(2), &[0.0, 0.0], 1e-6, 5).unwrap();
        assert!(rep.converged && rep.iterations == 0 && x == vec![0.0, 0.0]);
    }

    #[test]
    fn tridiagonal_known_spectrum() {
        // eigenvalues of tridiag(-1, 2, -1) of size k: 2 - 2cos(jπ/(k+1))
        let k = 6;
        let (lo, hi) = tridiagonal_extremes(&vec![2.0; k], &vec![-1.0; k - 1]);
        let ev = |j: f64| 2.0 - 2.0 * (j * std::f64::consts::PI / (k as f64 + 1.0)).cos();
        assert!((lo - ev(1.0)).abs() < 1e-13);
        assert!((hi - ev(k as f64)).abs() < 1e-13);
    }
}
