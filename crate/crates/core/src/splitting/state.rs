use super::SplitMethod;

/// Displacement and pressure at every time level 0…N.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeState {
    pub u: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub tau: f64,
}

impl SpaceTimeState {
    /// Every level set to the initial data.
    pub fn constant(initial: &InitialState, steps: usize, tau: f64) -> Self {
        Self { u: vec![initial.u.clone(); steps + 1], p: vec![initial.p.clone(); steps + 1], tau }
    }

    pub fn steps(&self) -> usize {
        self.p.len() - 1
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.tau
    }
}

/// Coefficient vectors of the initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

/// One global sweep (PFS) or one aggregated FS step iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// 1-based sweep index
    pub sweep: usize,
    /// max over n of ‖δp^n‖
    pub max_dp: f64,
    /// max over n of ‖δu^n‖
    pub max_du: f64,
    /// max over n of the weighted stopping quantity
    pub criterion: f64,
    /// Σ_n τ ‖(δp^n − δp^{n−1}) / τ‖²
    pub pressure_increment: f64,
    /// ratio to the previous sweep, from sweep 2 on
    pub observed_rate: Option<f64>,
    /// wall time of the flow sweep [s]
    pub flow_time: f64,
    /// wall time of the mechanics stage [s]
    pub mechanics_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub method: SplitMethod,
    pub l: f64,
    /// L / (1/β + L)
    pub theoretical_rate: f64,
    /// Global iterations (PFS) or the largest per-step count (FS). The sweep
    /// that only confirms convergence is not counted, so a decoupled problem
    /// reports 1.
    pub iterations: usize,
    pub converged: bool,
    /// first time step that failed to converge (FS)
    pub failed_step: Option<usize>,
    /// PFS: one record per global sweep
    pub sweeps: Vec<SweepRecord>,
    /// FS: iterations per time step
    pub step_iterations: Vec<usize>,
    pub setup_time: f64,
    pub flow_time: f64,
    pub mechanics_time: f64,
    /// number of matrix factorizations performed
    pub factorizations: usize,
}

impl IterationReport {
    pub(crate) fn new(method: SplitMethod, l: f64, theoretical_rate: f64) -> Self {
        Self {
            method,
            l,
            theoretical_rate,
            iterations: 0,
            converged: false,
            failed_step: None,
            sweeps: Vec::new(),
            step_iterations: Vec::new(),
            setup_time: 0.0,
            flow_time: 0.0,
            mechanics_time: 0.0,
            factorizations: 0,
        }
    }

    /// Mean per-step iteration count of an FS run.
    pub fn mean_step_iterations(&self) -> Option<f64> {
        if self.step_iterations.is_empty() {
            return None;
        }
        Some(self.step_iterations.iter().sum::<usize>() as f64 / self.step_iterations.len() as f64)
    }

    /// The figure comparable across methods: global iterations for PFS, the
    /// mean per-step count for FS.
    pub fn headline_iterations(&self) -> f64 {
        match self.method {
            SplitMethod::Pfs => self.iterations as f64,
            SplitMethod::Fs => self.mean_step_iterations().unwrap_or(0.0),
        }
    }

    pub fn total_time(&self) -> f64 {
        self.setup_time + self.flow_time + self.mechanics_time
    }
}
