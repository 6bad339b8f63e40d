//! Fixed-stress splitting of the fully discrete Biot system: the classical
//! time-stepping scheme (FS) and the parallel-in-time variant (PFS).
//!
//! Both schemes solve, for n = 1…N,
//!
//! ```text
//! (1/β) M (p^n − p^{n−1}) + α Bc (u^n − u^{n−1}) + τ C p^n = τ f^n
//! A u^n − α Bcᵀ p^n = g
//! ```
//!
//! The flow step carries the stabilization `L M (p^{n,i} − p^{n−1,i})`,
//! lagged by one iteration on the right-hand side.

mod rate;
mod scheme;
mod state;

use thiserror::Error;

use crate::assembly::AssemblyError;
use crate::linalg::{LinalgError, SolverConfig};

pub use rate::{observed_rate, theoretical_rate, ObservedRate};
pub use scheme::{flow_step, flow_sweep, fs_solve, mechanics_stage, mechanics_step, pfs_solve, Operators};
pub use state::{InitialState, IterationReport, SpaceTimeState, SweepRecord};

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("linear solve failed at time step {step}: {source}")]
    Solve { step: usize, source: LinalgError },
    #[error("failed to set up the {operator} operator: {source}")]
    Setup { operator: &'static str, source: LinalgError },
    #[error("invalid splitting configuration: {0}")]
    InvalidConfig(String),
    #[error("iteration {0} has no contraction ratio (ratios start at iteration 2)")]
    NoSuchIteration(usize),
    #[error("could not start the worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitMethod {
    /// classical, time step by time step
    Fs,
    /// parallel in time
    Pfs,
}

impl std::str::FromStr for SplitMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fs" => Ok(Self::Fs),
            "pfs" => Ok(Self::Pfs),
            other => Err(format!("unknown splitting method '{other}' (expected fs or pfs)")),
        }
    }
}

impl std::fmt::Display for SplitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Fs => "fs",
            Self::Pfs => "pfs",
        })
    }
}

/// Starting iterate of each FS time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsGuess {
    /// the initial condition, as for PFS
    InitialCondition,
    /// the converged solution of the previous step
    PreviousStep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitConfig {
    /// stabilization parameter L [1/Pa]
    pub l: f64,
    /// weight of the pressure increment in the stopping test
    pub tol_p: f64,
    /// weight of the displacement increment in the stopping test
    pub tol_u: f64,
    /// stopping threshold
    pub tol: f64,
    pub max_iter: usize,
    pub workers: usize,
    pub solver: SolverConfig,
    pub fs_guess: FsGuess,
}

impl SplitConfig {
    pub fn new(l: f64) -> Self {
        Self {
            l,
            tol_p: 1e-8,
            tol_u: 1e2,
            tol: 1e-8,
            max_iter: 100,
            workers: 1,
            solver: SolverConfig::default(),
            fs_guess: FsGuess::InitialCondition,
        }
    }

    pub fn validate(&self) -> Result<(), SplitError> {
        let bad = |m: String| Err(SplitError::InvalidConfig(m));
        if !(self.l >= 0.0 && self.l.is_finite()) {
            return bad(format!("stabilization must be finite and nonnegative, got {}", self.l));
        }
        if !(self.tol > 0.0 && self.tol_p >= 0.0 && self.tol_u >= 0.0) {
            return bad("stopping weights must be nonnegative and the threshold positive".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("worker count must be at least 1".into());
        }
        self.solver.validate().map_err(|e| SplitError::InvalidConfig(e.to_string()))
    }

    /// Weighted increment of one time level.
    pub fn criterion(&self, dp_norm: f64, du_norm: f64) -> f64 {
        self.tol_p * dp_norm + self.tol_u * du_norm
    }
}
