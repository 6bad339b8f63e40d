use std::time::Instant;

use rayon::prelude::*;

use super::rate::{pressure_increment_norm, theoretical_rate};
use super::{
    FsGuess, InitialState, IterationReport, SpaceTimeState, SplitConfig, SplitError, SplitMethod, SweepRecord,
};
use crate::assembly::{ConstrainedSystem, MaterialParams};
use crate::linalg::csr::norm2;
use crate::linalg::{CsrMatrix, SpdSolver};

/// Prepared operators of one run: both matrices are factorized here and
/// only here.
pub struct Operators<'a> {
    sys: &'a ConstrainedSystem,
    alpha: f64,
    l: f64,
    /// 1/β + L
    s: f64,
    tau: f64,
    /// unconstrained (1/β + L) M + τ C, needed for lifting
    flow_raw: CsrMatrix,
    flow: SpdSolver,
    mechanics: SpdSolver,
}

impl<'a> Operators<'a> {
    pub fn new(
        sys: &'a ConstrainedSystem,
        params: &MaterialParams,
        cfg: &SplitConfig,
        tau: f64,
    ) -> Result<Self, SplitError> {
        cfg.validate()?;
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(SplitError::InvalidConfig(format!("time step must be positive, got {tau}")));
        }
        if cfg.l < params.l_min() {
            log::warn!(
                "stabilization L = {:e} is below L_min = {:e}; convergence is not guaranteed",
                cfg.l,
                params.l_min()
            );
        }
        let s = params.storage() + cfg.l;
        let flow_raw = sys.raw.mass.linear_combination(s, &sys.raw.c, tau);
        let flow_matrix = sys.p_constraints.constrain_matrix(&flow_raw);
        let flow = SpdSolver::new(&flow_matrix, &cfg.solver)
            .map_err(|source| SplitError::Setup { operator: "flow", source })?;
        let mechanics = SpdSolver::new(&sys.mechanics_matrix, &cfg.solver)
            .map_err(|source| SplitError::Setup { operator: "mechanics", source })?;
        Ok(Self { sys, alpha: params.biot_coefficient, l: cfg.l, s, tau, flow_raw, flow, mechanics })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn system(&self) -> &ConstrainedSystem {
        self.sys
    }

    /// CG iterations spent by the flow and mechanics solvers so far.
    pub fn cg_iterations(&self) -> (usize, usize) {
        (self.flow.cg_iterations(), self.mechanics.cg_iterations())
    }
}

/// One flow solve at time level n:
///
/// ```text
/// [(1/β+L) M + τ C] p^{n,i} = (1/β+L) M p^{n−1,i} − α Bc (u^{n,i−1} − u^{n−1,i−1})
///                            + L M (p^{n,i−1} − p^{n−1,i−1}) + τ f
/// ```
pub fn flow_step(
    ops: &Operators,
    step: usize,
    p_prev_new: &[f64],
    u_cur_old: &[f64],
    u_prev_old: &[f64],
    p_cur_old: &[f64],
    p_prev_old: &[f64],
) -> Result<Vec<f64>, SplitError> {
    let sys = ops.sys;
    let mix: Vec<f64> =
        (0..p_prev_new.len()).map(|k| ops.s * p_prev_new[k] + ops.l * (p_cur_old[k] - p_prev_old[k])).collect();
    let mut rhs = sys.raw.mass.spmv(&mix).map_err(|source| SplitError::Solve { step, source })?;
    if ops.alpha != 0.0 {
        let du: Vec<f64> = u_cur_old.iter().zip(u_prev_old).map(|(a, b)| a - b).collect();
        let bdu = sys.raw.coupling.spmv(&du).map_err(|source| SplitError::Solve { step, source })?;
        for (r, v) in rhs.iter_mut().zip(&bdu) {
            *r -= ops.alpha * v;
        }
    }
    for (r, f) in rhs.iter_mut().zip(&sys.raw.f_load) {
        *r += ops.tau * f;
    }
    let rhs = sys.p_constraints.constrain_rhs(&ops.flow_raw, &rhs);
    let mut p = ops.flow.solve(&rhs).map_err(|source| SplitError::Solve { step, source })?;
    sys.p_constraints.expand(&mut p);
    Ok(p)
}

/// One mechanics solve `A u = α Bcᵀ p + g` with the plate tie active.
pub fn mechanics_step(ops: &Operators, step: usize, p: &[f64]) -> Result<Vec<f64>, SplitError> {
    let rhs = ops.sys.mechanics_rhs(ops.alpha, p);
    let mut u = ops.mechanics.solve(&rhs).map_err(|source| SplitError::Solve { step, source })?;
    ops.sys.u_constraints.expand(&mut u);
    Ok(u)
}

/// Sequential sweep over n = 1…N of the flow step, lagging the previous
/// iterate `old`. Level 0 is copied from `old`.
pub fn flow_sweep(ops: &Operators, old: &SpaceTimeState) -> Result<Vec<Vec<f64>>, SplitError> {
    let steps = old.steps();
    let mut p = Vec::with_capacity(steps + 1);
    p.push(old.p[0].clone());
    for n in 1..=steps {
        let next = flow_step(ops, n, &p[n - 1], &old.u[n], &old.u[n - 1], &old.p[n], &old.p[n - 1])?;
        p.push(next);
    }
    Ok(p)
}

/// Independent mechanics solves for n = 1…N on `pool`; level 0 is `u0`.
/// The result does not depend on the number of workers.
pub fn mechanics_stage(
    ops: &Operators,
    pressures: &[Vec<f64>],
    u0: &[f64],
    pool: &rayon::ThreadPool,
) -> Result<Vec<Vec<f64>>, SplitError> {
    let solved: Result<Vec<Vec<f64>>, SplitError> =
        pool.install(|| (1..pressures.len()).into_par_iter().map(|n| mechanics_step(ops, n, &pressures[n])).collect());
    let mut u = Vec::with_capacity(pressures.len());
    u.push(u0.to_vec());
    u.extend(solved?);
    Ok(u)
}

/// Sweeps needed to reach an accepted iterate. A sweep that reproduces its
/// predecessor exactly only confirms it and is not counted.
fn counted_iterations(sweep: usize, criterion: f64) -> usize {
    if criterion == 0.0 && sweep > 1 {
        sweep - 1
    } else {
        sweep
    }
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn check_initial(sys: &ConstrainedSystem, initial: &InitialState, steps: usize) -> Result<(), SplitError> {
    if steps == 0 {
        return Err(SplitError::InvalidConfig("at least one time step is required".into()));
    }
    if initial.u.len() != sys.raw.num_u() || initial.p.len() != sys.raw.num_p() {
        return Err(SplitError::InvalidConfig("initial state does not match the system dimensions".into()));
    }
    Ok(())
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool, SplitError> {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| SplitError::ThreadPool(e.to_string()))
}

/// Parallel-in-time fixed-stress iteration over the whole time window,
/// started from the initial condition held constant in time.
pub fn pfs_solve(
    sys: &ConstrainedSystem,
    params: &MaterialParams,
    cfg: &SplitConfig,
    steps: usize,
    tau: f64,
    initial: &InitialState,
) -> Result<(SpaceTimeState, IterationReport), SplitError> {
    check_initial(sys, initial, steps)?;
    let mut report = IterationReport::new(SplitMethod::Pfs, cfg.l, theoretical_rate(params, cfg.l));
    let t0 = Instant::now();
    let ops = Operators::new(sys, params, cfg, tau)?;
    let pool = build_pool(cfg.workers)?;
    report.setup_time = t0.elapsed().as_secs_f64();
    report.factorizations = 2;

    let mut state = SpaceTimeState::constant(initial, steps, tau);
    for sweep in 1..=cfg.max_iter {
        let t = Instant::now();
        let p = flow_sweep(&ops, &state)?;
        let flow_time = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let u = mechanics_stage(&ops, &p, &initial.u, &pool)?;
        let mechanics_time = t.elapsed().as_secs_f64();

        let dp: Vec<Vec<f64>> = p.iter().zip(&state.p).map(|(a, b)| diff(a, b)).collect();
        let (mut max_dp, mut max_du, mut criterion) = (0.0f64, 0.0f64, 0.0f64);
        for n in 1..=steps {
            let dpn = norm2(&dp[n]);
            let dun = norm2(&diff(&u[n], &state.u[n]));
            max_dp = max_dp.max(dpn);
            max_du = max_du.max(dun);
            criterion = criterion.max(cfg.criterion(dpn, dun));
        }
        let pressure_increment = pressure_increment_norm(&dp, tau);
        let observed_rate = report
            .sweeps
            .last()
            .filter(|prev| prev.pressure_increment > 0.0)
            .map(|prev| pressure_increment / prev.pressure_increment);
        report.sweeps.push(SweepRecord {
            sweep,
            max_dp,
            max_du,
            criterion,
            pressure_increment,
            observed_rate,
            flow_time,
            mechanics_time,
        });
        report.flow_time += flow_time;
        report.mechanics_time += mechanics_time;
        state.p = p;
        state.u = u;
        log::debug!("pfs sweep {sweep}: criterion {criterion:.3e}, increment {pressure_increment:.3e}");
        if criterion <= cfg.tol {
            report.converged = true;
            report.iterations = counted_iterations(sweep, criterion);
            break;
        }
        report.iterations = sweep;
    }
    Ok((state, report))
}

/// Classical fixed-stress iteration, converged one time step at a time.
pub fn fs_solve(
    sys: &ConstrainedSystem,
    params: &MaterialParams,
    cfg: &SplitConfig,
    steps: usize,
    tau: f64,
    initial: &InitialState,
) -> Result<(SpaceTimeState, IterationReport), SplitError> {
    check_initial(sys, initial, steps)?;
    let mut report = IterationReport::new(SplitMethod::Fs, cfg.l, theoretical_rate(params, cfg.l));
    let t0 = Instant::now();
    let ops = Operators::new(sys, params, cfg, tau)?;
    report.setup_time = t0.elapsed().as_secs_f64();
    report.factorizations = 2;

    let mut state = SpaceTimeState::constant(initial, steps, tau);
    report.converged = true;
    for n in 1..=steps {
        let (mut u_old, mut p_old) = match cfg.fs_guess {
            FsGuess::InitialCondition => (initial.u.clone(), initial.p.clone()),
            FsGuess::PreviousStep => (state.u[n - 1].clone(), state.p[n - 1].clone()),
        };
        let mut count = None;
        for sweep in 1..=cfg.max_iter {
            let t = Instant::now();
            let p = flow_step(&ops, n, &state.p[n - 1], &u_old, &state.u[n - 1], &p_old, &state.p[n - 1])?;
            report.flow_time += t.elapsed().as_secs_f64();
            let t = Instant::now();
            let u = mechanics_step(&ops, n, &p)?;
            report.mechanics_time += t.elapsed().as_secs_f64();
            let crit = cfg.criterion(norm2(&diff(&p, &p_old)), norm2(&diff(&u, &u_old)));
            u_old = u;
            p_old = p;
            if crit <= cfg.tol {
                count = Some(counted_iterations(sweep, crit));
                break;
            }
        }
        state.u[n] = u_old;
        state.p[n] = p_old;
        match count {
            Some(c) => report.step_iterations.push(c),
            None => {
                report.step_iterations.push(cfg.max_iter);
                report.converged = false;
                report.failed_step = Some(n);
                log::warn!("fs: time step {n} did not converge in {} iterations", cfg.max_iter);
                break;
            }
        }
    }
    report.iterations = report.step_iterations.iter().copied().max().unwrap_or(0);
    Ok((state, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{
        apply_constraints, build_dof_map, interpolate_displacement, BiotSystem, BoundaryConditions, FlowCondition,
        MechanicsCondition,
    };
    use crate::mandel::{benchmark_params, ProblemDef};
    use crate::mesh::{BoundaryTag, Mesh};
    use crate::splitting::{observed_rate, ObservedRate};

    fn unit_material(alpha: f64) -> MaterialParams {
        MaterialParams {
            youngs_modulus: 8.0 / 3.0,
            poisson_ratio: 1.0 / 3.0,
            biot_coefficient: alpha,
            biot_modulus: 2.0,
            permeability: 0.5,
            fluid_viscosity: 1.0,
            bulk_density: 0.0,
            fluid_density: 0.0,
            porosity: 0.0,
            gravity: [0.0, 0.0],
            skempton: 0.8,
        }
    }

    fn mandel_like(mesh: &Mesh, mat: &MaterialParams, force: f64) -> ConstrainedSystem {
        let bcs = BoundaryConditions::default()
            .with(BoundaryTag::Left, FlowCondition::NoFlux, MechanicsCondition::NormalFixed)
            .with(BoundaryTag::Bottom, FlowCondition::NoFlux, MechanicsCondition::NormalFixed)
            .with(BoundaryTag::Right, FlowCondition::Pressure(0.0), MechanicsCondition::TractionFree)
            .with(BoundaryTag::Top, FlowCondition::NoFlux, MechanicsCondition::RigidPlate);
        let sys = BiotSystem::assemble(mesh, mat).unwrap();
        apply_constraints(sys, build_dof_map(mesh, &bcs).unwrap(), force).unwrap()
    }

    fn bumpy_initial(mesh: &Mesh) -> InitialState {
        InitialState {
            u: interpolate_displacement(mesh, |x, y| [0.1 * x * y, -0.2 * y]),
            p: mesh.nodes().iter().map(|&[x, y]| 1.0 + x * (1.0 - y)).collect(),
        }
    }

    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            a.swap(k, piv);
            b.swap(k, piv);
            for r in k + 1..n {
                let f = a[r][k] / a[k][k];
                for c in k..n {
                    a[r][c] -= f * a[k][c];
                }
                b[r] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|c| a[k][c] * x[c]).sum();
            x[k] = (b[k] - s) / a[k][k];
        }
        x
    }

    #[test]
    fn decoupled_problem_converges_in_one_iteration() {
        let mesh = Mesh::build_rect(2.0, 1.0, 4, 3).unwrap();
        let mat = unit_material(0.0);
        let sys = mandel_like(&mesh, &mat, 1.0);
        let init = bumpy_initial(&mesh);
        let cfg = SplitConfig::new(0.0);
        let (state, report) = pfs_solve(&sys, &mat, &cfg, 5, 0.1, &init).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
        assert_eq!(observed_rate(&report, 2).unwrap(), ObservedRate::Ratio(0.0));

        // plain backward Euler for (1/β) M ṗ + C p = 0
        let ops = Operators::new(&sys, &mat, &cfg, 0.1).unwrap();
        let mut p = init.p.clone();
        for n in 1..=5 {
            p = flow_step(&ops, n, &p, &init.u, &init.u, &init.p, &init.p).unwrap();
            assert_eq!(p, state.p[n]);
        }

        let (_, fs) = fs_solve(&sys, &mat, &cfg, 5, 0.1, &init).unwrap();
        assert_eq!(fs.step_iterations, vec![1; 5]);
    }

    #[test]
    fn zero_data_stays_zero() {
        let mesh = Mesh::build_rect(2.0, 1.0, 3, 2).unwrap();
        let mat = unit_material(1.0);
        let sys = mandel_like(&mesh, &mat, 0.0);
        let init = InitialState { u: vec![0.0; sys.raw.num_u()], p: vec![0.0; sys.raw.num_p()] };
        let (state, report) = pfs_solve(&sys, &mat, &SplitConfig::new(mat.l_phys()), 4, 0.5, &init).unwrap();
        assert!(report.converged);
        assert!(state.p.iter().chain(&state.u).all(|v| v.iter().all(|&x| x == 0.0)));
        let ops = Operators::new(&sys, &mat, &SplitConfig::new(0.0), 0.5).unwrap();
        assert!(mechanics_step(&ops, 1, &init.p).unwrap().iter().all(|&x| x == 0.0));
    }

    /// Two-triangle mesh, one step: the flow sweep against a dense solve of
    /// the same equations with the drained side eliminated by hand.
    #[test]
    fn single_step_flow_matches_dense_oracle() {
        let mesh = Mesh::build_rect(1.0, 1.0, 1, 1).unwrap();
        let mat = unit_material(0.7);
        let sys = mandel_like(&mesh, &mat, 0.3);
        let (tau, l) = (0.25, 0.4);
        let cfg = SplitConfig::new(l);
        let ops = Operators::new(&sys, &mat, &cfg, tau).unwrap();
        let init = bumpy_initial(&mesh);
        let old = SpaceTimeState {
            u: vec![init.u.clone(), interpolate_displacement(&mesh, |x, y| [0.3 * x, -0.1 * x * y])],
            p: vec![init.p.clone(), vec![0.5, -0.2, 0.1, 0.9]],
            tau,
        };
        let p = flow_sweep(&ops, &old).unwrap();

        let s = mat.storage() + l;
        let m = sys.raw.mass.to_dense();
        let c = sys.raw.c.to_dense();
        let b = sys.raw.coupling.to_dense();
        let np = m.len();
        let mut k = vec![vec![0.0; np]; np];
        let mut rhs = vec![0.0; np];
        for i in 0..np {
            for j in 0..np {
                k[i][j] = s * m[i][j] + tau * c[i][j];
                rhs[i] += m[i][j] * (s * old.p[0][j] + l * (old.p[1][j] - old.p[0][j]));
            }
            for (j, bij) in b[i].iter().enumerate() {
                rhs[i] -= mat.biot_coefficient * bij * (old.u[1][j] - old.u[0][j]);
            }
        }
        // nodes 1 and 3 lie on x = 1 where p = 0
        for d in [1, 3] {
            for j in 0..np {
                k[d][j] = if j == d { 1.0 } else { 0.0 };
            }
            rhs[d] = 0.0;
        }
        let oracle = dense_solve(k, rhs);
        for (a, o) in p[1].iter().zip(&oracle) {
            assert!((a - o).abs() <= 1e-10, "{:?} vs {oracle:?}", p[1]);
        }
        assert_eq!(p[0], old.p[0]);
    }

    /// Uniform pore pressure on a body held only by symmetry conditions:
    /// the effective stress α p0 I gives u = α p0 / (2(G + λ)) (x, y).
    #[test]
    fn uniform_pressure_gives_uniform_dilation() {
        let mesh = Mesh::build_rect(1.0, 1.0, 1, 1).unwrap();
        let mat = unit_material(0.9);
        let bcs = BoundaryConditions::default()
            .with(BoundaryTag::Left, FlowCondition::NoFlux, MechanicsCondition::NormalFixed)
            .with(BoundaryTag::Bottom, FlowCondition::NoFlux, MechanicsCondition::NormalFixed);
        let sys =
            apply_constraints(BiotSystem::assemble(&mesh, &mat).unwrap(), build_dof_map(&mesh, &bcs).unwrap(), 0.0)
                .unwrap();
        let ops = Operators::new(&sys, &mat, &SplitConfig::new(0.0), 1.0).unwrap();
        let p0 = 3.0;
        let u = mechanics_step(&ops, 1, &[p0; 4]).unwrap();

        // dense oracle on the free dofs of the unconstrained stiffness
        let a = sys.raw.a.to_dense();
        let f: Vec<f64> = sys.raw.coupling.spmv_transpose(&[p0; 4]).unwrap().iter().map(|v| 0.9 * v).collect();
        let free: Vec<usize> = (0..a.len()).filter(|&i| !sys.dofmap.fixed_u().contains(&i)).collect();
        let sub: Vec<Vec<f64>> = free.iter().map(|&i| free.iter().map(|&j| a[i][j]).collect()).collect();
        let rhs: Vec<f64> = free.iter().map(|&i| f[i]).collect();
        let x = dense_solve(sub, rhs);
        let k = 0.9 * p0 / (2.0 * (mat.shear_modulus() + mat.lame_lambda()));
        let exact = interpolate_displacement(&mesh, |x, y| [k * x, k * y]);
        for (&i, xi) in free.iter().zip(&x) {
            assert!((u[i] - xi).abs() <= 1e-9 * k);
        }
        for (a, e) in u.iter().zip(&exact) {
            assert!((a - e).abs() <= 1e-9 * k, "{a} vs {e}");
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let setup = ProblemDef::new(benchmark_params(0.4), 8, 8).setup().unwrap();
        let mat = benchmark_params(0.4).material;
        let run = |workers| {
            let mut cfg = SplitConfig::new(mat.l_phys());
            cfg.workers = workers;
            pfs_solve(&setup.system, &mat, &cfg, 12, 1.0, &setup.initial).unwrap()
        };
        let (s1, r1) = run(1);
        for w in [2, 3, 8] {
            let (sw, rw) = run(w);
            assert_eq!(s1, sw);
            assert_eq!(r1.iterations, rw.iterations);
        }
    }

    #[test]
    fn fs_and_pfs_reach_the_same_fixed_point() {
        let setup = ProblemDef::new(benchmark_params(0.3), 10, 6).setup().unwrap();
        let mat = benchmark_params(0.3).material;
        let cfg = SplitConfig::new(mat.l_phys());
        let (pfs, rp) = pfs_solve(&setup.system, &mat, &cfg, 10, 2.0, &setup.initial).unwrap();
        let (fs, rf) = fs_solve(&setup.system, &mat, &cfg, 10, 2.0, &setup.initial).unwrap();
        assert!(rp.converged && rf.converged);
        let rel = |a: &[f64], b: &[f64]| {
            let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            let den: f64 = a.iter().map(|x| x * x).sum();
            (num / den).sqrt()
        };
        for n in 0..=10 {
            assert!(rel(&fs.p[n], &pfs.p[n]) <= 1e-6);
            assert!(rel(&fs.u[n], &pfs.u[n]) <= 1e-6);
        }
        assert_eq!(rf.step_iterations.len(), 10);
        for s in rp.sweeps.iter().skip(1) {
            assert!(s.observed_rate.unwrap() <= rp.theoretical_rate + 0.05);
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let setup = ProblemDef::new(benchmark_params(0.3), 2, 2).setup().unwrap();
        let mat = benchmark_params(0.3).material;
        let cfg = SplitConfig::new(mat.l_phys());
        assert!(pfs_solve(&setup.system, &mat, &cfg, 0, 1.0, &setup.initial).is_err());
        assert!(pfs_solve(&setup.system, &mat, &cfg, 3, -1.0, &setup.initial).is_err());
        let bad = InitialState { u: vec![0.0; 3], p: setup.initial.p.clone() };
        assert!(fs_solve(&setup.system, &mat, &cfg, 3, 1.0, &bad).is_err());
        assert!(SplitConfig { workers: 0, ..cfg.clone() }.validate().is_err());
        assert!(SplitConfig { l: -1.0, ..cfg }.validate().is_err());
    }

    #[test]
    fn unconverged_run_is_flagged() {
        let setup = ProblemDef::new(benchmark_params(0.2), 6, 4).setup().unwrap();
        let mat = benchmark_params(0.2).material;
        let cfg = SplitConfig { max_iter: 2, ..SplitConfig::new(mat.l_phys()) };
        let (_, rp) = pfs_solve(&setup.system, &mat, &cfg, 8, 1.0, &setup.initial).unwrap();
        assert!(!rp.converged);
        assert_eq!(rp.sweeps.len(), 2);
        let (_, rf) = fs_solve(&setup.system, &mat, &cfg, 8, 1.0, &setup.initial).unwrap();
        assert!(!rf.converged);
        assert_eq!(rf.failed_step, Some(1));
    }
}
