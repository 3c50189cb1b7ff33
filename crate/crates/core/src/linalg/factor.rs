//! Direct solvers: sparse Cholesky for SPD matrices, dense LU for small
//! symmetric-indefinite systems, and a constrained (saddle-point) solver
//! built on top of a Cholesky factor by block elimination.

use faer::linalg::solvers::SolveCore;

use super::dense::{DenseCholesky, DenseLu, DenseMatrix};
use super::sparse::SparseSym;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    SpdCholesky,
    SymmetricIndefinite,
}

/// A reusable direct factorization.
pub enum Factorization {
    Empty,
    Sparse { n: usize, llt: faer::sparse::linalg::solvers::Llt<usize, f64> },
    Dense(DenseLu),
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Factorization::Empty => write!(f, "Factorization::Empty"),
            Factorization::Sparse { n, .. } => write!(f, "Factorization::Sparse(n={n})"),
            Factorization::Dense(lu) => write!(f, "Factorization::Dense(n={})", lu.dim()),
        }
    }
}

pub fn factorize(a: &SparseSym, kind: FactorKind) -> Result<Factorization> {
    let n = a.dim();
    if n == 0 {
        return Ok(Factorization::Empty);
    }
    match kind {
        FactorKind::SpdCholesky => {
            let llt = a.to_faer().sp_cholesky(faer::Side::Lower).map_err(|e| match e {
                faer::sparse::linalg::LltError::Numeric(
                    faer::linalg::cholesky::llt::factor::LltError::NonPositivePivot { index },
                ) => Error::NotPositiveDefinite { pivot: index },
                faer::sparse::linalg::LltError::Generic(g) => Error::InvalidInput(format!("{g:?}")),
            })?;
            Ok(Factorization::Sparse { n, llt })
        }
        FactorKind::SymmetricIndefinite => {
            let dense = DenseMatrix::from_rows(n, n, a.to_dense());
            Ok(Factorization::Dense(DenseLu::factor(&dense)?))
        }
    }
}

impl Factorization {
    pub fn dim(&self) -> usize {
        match self {
            Factorization::Empty => 0,
            Factorization::Sparse { n, .. } => *n,
            Factorization::Dense(lu) => lu.dim(),
        }
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        assert_eq!(x.len() % n.max(1), 0);
        self.solve_many_in_place(x, if n == 0 { 0 } else { x.len() / n });
    }

    /// Solves for `ncols` right-hand sides stored column-major in `x`.
    pub fn solve_many_in_place(&self, x: &mut [f64], ncols: usize) {
        let n = self.dim();
        assert_eq!(x.len(), n * ncols);
        if n == 0 || ncols == 0 {
            return;
        }
        match self {
            Factorization::Empty => {}
            Factorization::Sparse { llt, .. } => {
                let view = faer::MatMut::from_column_major_slice_mut(x, n, ncols);
                llt.solve_in_place_with_conj(faer::Conj::No, view);
            }
            Factorization::Dense(lu) => {
                for col in x.chunks_mut(n) {
                    let sol = lu.solve(col);
                    col.copy_from_slice(&sol);
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

impl super::LinearOperator for Factorization {
    fn dim(&self) -> usize {
        Factorization::dim(self)
    }

    fn apply_to(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
        self.solve_in_place(y);
    }
}

/// Sparse row vector as `(column, value)` pairs.
pub type SparseRow = Vec<(usize, f64)>;

fn row_dot(row: &SparseRow, x: &[f64]) -> f64 {
    row.iter().map(|&(j, v)| v * x[j]).sum()
}

/// Solver for `[A Cᵀ; C 0] [x; λ] = [f; g]` with `A` SPD and `C` of full
/// row rank. Uses `A⁻¹` and the Schur complement `S = C A⁻¹ Cᵀ`.
#[derive(Debug)]
pub struct SaddlePoint {
    n: usize,
    a: Factorization,
    rows: Vec<SparseRow>,
    /// `A⁻¹ Cᵀ`, column-major `n × m`.
    y: Vec<f64>,
    schur: DenseMatrix,
    schur_llt: Option<DenseCholesky>,
}

impl SaddlePoint {
    pub fn new(a: &SparseSym, rows: Vec<SparseRow>) -> Result<Self> {
        let n = a.dim();
        let fa = factorize(a, FactorKind::SpdCholesky)?;
        Self::from_factor(fa, n, rows)
    }

    pub fn from_factor(a: Factorization, n: usize, rows: Vec<SparseRow>) -> Result<Self> {
        let m = rows.len();
        let mut y = vec![0.0; n * m];
        for (k, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                if j >= n {
                    return Err(Error::DimensionMismatch { expected: n, got: j + 1 });
                }
                y[k * n + j] += v;
            }
        }
        a.solve_many_in_place(&mut y, m);
        let mut schur = DenseMatrix::zeros(m, m);
        for k in 0..m {
            for l in 0..=k {
                let v = row_dot(&rows[k], &y[l * n..(l + 1) * n]);
                schur[(k, l)] = v;
                schur[(l, k)] = v;
            }
        }
        let schur_llt = if m > 0 {
            Some(DenseCholesky::factor(&schur).map_err(|e| match e {
                Error::NotPositiveDefinite { pivot } => Error::Singular { pivot: n + pivot },
                other => other,
            })?)
        } else {
            None
        };
        Ok(Self { n, a, rows, y, schur, schur_llt })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn n_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    /// `A⁻¹ Cᵀ` column `k`.
    pub fn y_col(&self, k: usize) -> &[f64] {
        &self.y[k * self.n..(k + 1) * self.n]
    }

    /// `C A⁻¹ Cᵀ`
    pub fn schur(&self) -> &DenseMatrix {
        &self.schur
    }

    pub fn solve_schur(&self, b: &[f64]) -> Vec<f64> {
        match &self.schur_llt {
            Some(l) => l.solve(b),
            None => Vec::new(),
        }
    }

    pub fn apply_constraints(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| row_dot(r, x)).collect()
    }

    pub fn solve_a(&self, b: &[f64]) -> Vec<f64> {
        self.a.solve(b)
    }

    /// Returns `(x, λ)`.
    pub fn solve(&self, f: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(f.len(), self.n);
        assert_eq!(g.len(), self.rows.len());
        let mut x = self.a.solve(f);
        if self.rows.is_empty() {
            return (x, Vec::new());
        }
        let cx: Vec<f64> = self.apply_constraints(&x).iter().zip(g).map(|(a, b)| a - b).collect();
        let lambda = self.solve_schur(&cx);
        for (k, &l) in lambda.iter().enumerate() {
            super::axpy(-l, self.y_col(k), &mut x);
        }
        (x, lambda)
    }
}
