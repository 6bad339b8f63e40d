//! Sparse storage and symmetric positive definite solvers.

mod cg;
mod cholesky;
pub mod csr;
pub mod ordering;

use std::sync::atomic::{AtomicUsize, Ordering};

pub use cholesky::SparseCholesky;
pub use csr::{CsrMatrix, TripletBuilder};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },
    #[error("matrix is not positive definite: pivot {pivot:e} at original index {column}")]
    NotPositiveDefinite { column: usize, pivot: f64 },
    #[error(
        "conjugate gradients did not converge in {iterations} iterations (relative residual {relative_residual:e})"
    )]
    NoConvergence { iterations: usize, relative_residual: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    /// Sparse Cholesky with nested-dissection ordering.
    DirectCholesky,
    /// Conjugate gradients with a Jacobi preconditioner.
    CgJacobi,
}

impl std::str::FromStr for SolverMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "direct" | "cholesky" | "direct-cholesky" => Ok(Self::DirectCholesky),
            "cg" | "cg-jacobi" => Ok(Self::CgJacobi),
            other => Err(format!("unknown solver method '{other}' (expected direct-cholesky or cg-jacobi)")),
        }
    }
}

impl std::fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::DirectCholesky => "direct-cholesky",
            Self::CgJacobi => "cg-jacobi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: SolverMethod,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { method: SolverMethod::DirectCholesky, rel_tol: 1e-12, max_iter: 20_000 }
    }
}

impl SolverConfig {
    pub fn cg() -> Self {
        Self { method: SolverMethod::CgJacobi, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), LinalgError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(LinalgError::InvalidConfig(format!("tolerance {} not in (0, 1)", self.rel_tol)));
        }
        if self.max_iter == 0 {
            return Err(LinalgError::InvalidConfig("max iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// A prepared SPD solver: the factorization (or preconditioner) is computed
/// once and reused for every right-hand side.
///
/// `solve` takes `&self` and allocates its own work vectors, so one
/// instance can serve concurrent solves.
#[derive(Debug)]
pub struct SpdSolver {
    kind: SolverKind,
    cg_iterations: AtomicUsize,
}

#[derive(Debug)]
enum SolverKind {
    Direct(SparseCholesky),
    Cg { matrix: CsrMatrix, inv_diag: Vec<f64>, rel_tol: f64, max_iter: usize },
}

impl SpdSolver {
    pub fn new(a: &CsrMatrix, cfg: &SolverConfig) -> Result<Self, LinalgError> {
        cfg.validate()?;
        if !a.is_square() {
            return Err(LinalgError::NotSquare { nrows: a.nrows(), ncols: a.ncols() });
        }
        let kind = match cfg.method {
            SolverMethod::DirectCholesky => SolverKind::Direct(SparseCholesky::factor(a)?),
            SolverMethod::CgJacobi => {
                let mut inv_diag = Vec::with_capacity(a.nrows());
                for (i, d) in a.diagonal().into_iter().enumerate() {
                    if !(d > 0.0) {
                        return Err(LinalgError::NotPositiveDefinite { column: i, pivot: d });
                    }
                    inv_diag.push(1.0 / d);
                }
                SolverKind::Cg { matrix: a.clone(), inv_diag, rel_tol: cfg.rel_tol, max_iter: cfg.max_iter }
            }
        };
        Ok(Self { kind, cg_iterations: AtomicUsize::new(0) })
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SolverKind::Direct(f) => f.dim(),
            SolverKind::Cg { matrix, .. } => matrix.nrows(),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        match &self.kind {
            SolverKind::Direct(f) => f.solve(b),
            SolverKind::Cg { matrix, inv_diag, rel_tol, max_iter } => {
                let (x, its) = cg::pcg_jacobi(matrix, inv_diag, b, *rel_tol, *max_iter)?;
                self.cg_iterations.fetch_add(its, Ordering::Relaxed);
                Ok(x)
            }
        }
    }

    /// Total CG iterations spent so far (always 0 for the direct path).
    pub fn cg_iterations(&self) -> usize {
        self.cg_iterations.load(Ordering::Relaxed)
    }
}

/// One-shot solve of `A x = b`.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>, LinalgError> {
    SpdSolver::new(a, cfg)?.solve(b)
}
