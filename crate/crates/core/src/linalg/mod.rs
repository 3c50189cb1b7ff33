//! Sparse and dense kernels, direct factorizations and preconditioned CG.

mod dense;
mod factor;
mod pcg;
mod sparse;

pub use dense::{DenseCholesky, DenseLu, DenseMatrix};
pub use factor::{factorize, FactorKind, Factorization, SaddlePoint, SparseRow};
pub use pcg::{pcg, tridiagonal_extremes, SolveReport};
pub use sparse::{SparseSym, TripletBuilder};

/// A square linear map acting on real vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply_to(&self, x: &[f64], y: &mut [f64]);
}

/// Adapts a closure into a [`LinearOperator`].
pub struct FnOperator<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_to(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

/// The identity map on `R^n`.
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply_to(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += s x`
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}
