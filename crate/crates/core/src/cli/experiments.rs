use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::csv::{num, opt, Table};
use super::{CliError, RunConfig};
use crate::linalg::SolverConfig;
use crate::mandel::{mandel_cryer_profile, preset, MandelParams, MandelSeries, MandelSetup, ProblemDef};
use crate::splitting::{
    fs_solve, pfs_solve, FsGuess, IterationReport, SpaceTimeState, SplitConfig, SplitError, SplitMethod,
};

/// Files written by a subcommand and whether every solve converged.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub converged: bool,
    pub files: Vec<PathBuf>,
}

fn split_config(cfg: &RunConfig, l: f64, workers: usize) -> SplitConfig {
    SplitConfig {
        l,
        tol_p: cfg.tol_p,
        tol_u: cfg.tol_u,
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        workers,
        solver: SolverConfig { method: cfg.linear, ..SolverConfig::default() },
        fs_guess: FsGuess::InitialCondition,
    }
}

fn solve(
    setup: &MandelSetup,
    params: &MandelParams,
    sc: &SplitConfig,
    method: SplitMethod,
    steps: usize,
    tau: f64,
) -> Result<(SpaceTimeState, IterationReport), SplitError> {
    let f = match method {
        SplitMethod::Fs => fs_solve,
        SplitMethod::Pfs => pfs_solve,
    };
    f(&setup.system, &params.material, sc, steps, tau, &setup.initial)
}

fn setup_for(params: &MandelParams, nx: usize, ny: usize) -> Result<MandelSetup, CliError> {
    Ok(ProblemDef::new(params.clone(), nx, ny).setup()?)
}

fn write_summary(path: &Path, text: &str) -> Result<PathBuf, CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

fn describe_problem(s: &mut String, cfg: &RunConfig) {
    let m = &cfg.params.material;
    let _ = writeln!(s, "preset: {}", cfg.preset);
    let _ = writeln!(s, "poisson_ratio: {}", m.poisson_ratio);
    let _ = writeln!(s, "biot_coefficient: {}", m.biot_coefficient);
    let _ = writeln!(s, "grid: {} x {} cells", cfg.nx, cfg.ny);
    let _ = writeln!(s, "tau: {}", cfg.tau);
    let _ = writeln!(s, "final_time: {}", cfg.final_time);
    let _ = writeln!(s, "linear_solver: {}", cfg.linear);
    let _ = writeln!(s, "L_phys: {}", num(m.l_phys()));
    let _ = writeln!(s, "L_min: {}", num(m.l_min()));
}

fn solution_table(cfg: &RunConfig, setup: &MandelSetup, state: &SpaceTimeState) -> Result<Table, CliError> {
    let mut header = vec!["n".to_string(), "t".to_string(), "plate_uy".to_string()];
    header.extend(cfg.probes.iter().map(|x| format!("p_x{x}")));
    let mut table = Table::new(&header);
    let profiles =
        cfg.probes.iter().map(|&x| mandel_cryer_profile(&setup.mesh, state, x)).collect::<Result<Vec<_>, _>>()?;
    for (n, u) in state.u.iter().enumerate() {
        let mut row = vec![n.to_string(), num(state.time(n)), opt(setup.system.plate_displacement(u))];
        row.extend(profiles.iter().map(|pr| num(pr[n].1)));
        table.push(row);
    }
    Ok(table)
}

fn iteration_table(report: &IterationReport, tau: f64) -> Table {
    match report.method {
        SplitMethod::Pfs => {
            let mut t = Table::new(&[
                "sweep",
                "max_dp",
                "max_du",
                "criterion",
                "pressure_increment",
                "observed_rate",
                "theoretical_rate",
                "flow_time",
                "mechanics_time",
            ]);
            for s in &report.sweeps {
                t.push(vec![
                    s.sweep.to_string(),
                    num(s.max_dp),
                    num(s.max_du),
                    num(s.criterion),
                    num(s.pressure_increment),
                    opt(s.observed_rate),
                    num(report.theoretical_rate),
                    num(s.flow_time),
                    num(s.mechanics_time),
                ]);
            }
            t
        }
        SplitMethod::Fs => {
            let mut t = Table::new(&["step", "t", "iterations", "theoretical_rate"]);
            for (k, &it) in report.step_iterations.iter().enumerate() {
                t.push(vec![
                    (k + 1).to_string(),
                    num((k + 1) as f64 * tau),
                    it.to_string(),
                    num(report.theoretical_rate),
                ]);
            }
            t
        }
    }
}

/// Solves the configured problem with the configured method.
///
/// Writes `<method>_solution.csv`, `<method>_iterations.csv` and
/// `<method>_summary.txt` into the output directory. A failed linear solve
/// is recorded in the summary and reported as not converged.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let setup = setup_for(&cfg.params, cfg.nx, cfg.ny)?;
    let l = cfg.l_value();
    let sc = split_config(cfg, l, cfg.workers);
    let tag = cfg.method.to_string();
    let dir = &cfg.out_dir;
    let mut files = Vec::new();

    let mut s = String::new();
    let _ = writeln!(s, "method: {tag}");
    describe_problem(&mut s, cfg);
    let _ = writeln!(s, "steps: {}", cfg.steps());
    let _ = writeln!(s, "workers: {}", cfg.workers);
    let _ = writeln!(s, "L: {}", num(l));
    let _ = writeln!(s, "L_over_L_phys: {}", num(l / cfg.params.material.l_phys()));

    let converged = match solve(&setup, &cfg.params, &sc, cfg.method, cfg.steps(), cfg.tau) {
        Ok((state, report)) => {
            files.push(solution_table(cfg, &setup, &state)?.write(&dir.join(format!("{tag}_solution.csv")))?);
            files.push(iteration_table(&report, cfg.tau).write(&dir.join(format!("{tag}_iterations.csv")))?);
            let _ = writeln!(s, "rate_bound: {}", num(report.theoretical_rate));
            let _ = writeln!(s, "iterations: {}", report.iterations);
            if let Some(mean) = report.mean_step_iterations() {
                let _ = writeln!(s, "mean_step_iterations: {}", num(mean));
            }
            let _ = writeln!(s, "converged: {}", report.converged);
            if let Some(n) = report.failed_step {
                let _ = writeln!(s, "failed_step: {n}");
            }
            let _ = writeln!(s, "setup_time_s: {:.3}", report.setup_time);
            let _ = writeln!(s, "flow_time_s: {:.3}", report.flow_time);
            let _ = writeln!(s, "mechanics_time_s: {:.3}", report.mechanics_time);
            report.converged
        }
        Err(e) => {
            log::error!("{tag} run failed: {e}");
            let _ = writeln!(s, "rate_bound: {}", num(crate::splitting::theoretical_rate(&cfg.params.material, l)));
            let _ = writeln!(s, "converged: false");
            let _ = writeln!(s, "error: {e}");
            false
        }
    };
    s.push_str(&format!(
        "\ncolumns of {tag}_solution.csv:\n  n: time level\n  t: time [s]\n  plate_uy: vertical displacement of the rigid plate [m]\n  p_x<x>: pressure at (x, 0) [Pa]\n"
    ));
    s.push_str(&match cfg.method {
        SplitMethod::Pfs => format!(
            "columns of {tag}_iterations.csv (one row per sweep over all time levels):\n  sweep: iteration index\n  max_dp, max_du: largest Euclidean norm of the pressure / displacement increment over time levels\n  criterion: max over time levels of tol_p |dp| + tol_u |du|\n  pressure_increment: sum over n of |dp^n - dp^(n-1)|^2 / tau\n  observed_rate: ratio of consecutive pressure_increment values (empty on the first sweep)\n  theoretical_rate: L / (1/beta + L)\n  flow_time, mechanics_time: stage wall times [s]\n"
        ),
        SplitMethod::Fs => format!(
            "columns of {tag}_iterations.csv (one row per time step):\n  step: time level\n  t: time [s]\n  iterations: fixed-stress iterations spent on the step\n  theoretical_rate: L / (1/beta + L)\n"
        ),
    });
    files.push(write_summary(&dir.join(format!("{tag}_summary.txt")), &s)?);
    Ok(Outcome { converged, files })
}

/// The stabilization values of the sweep: explicit values, or L_phys · 2^k.
pub fn sweep_values(cfg: &RunConfig) -> Vec<f64> {
    match &cfg.sweep_values {
        Some(v) => v.clone(),
        None => {
            let lp = cfg.params.material.l_phys();
            cfg.sweep_exponents.iter().map(|&k| lp * 2f64.powi(k)).collect()
        }
    }
}

/// Iteration counts over a grid of L for every configured method, written to
/// `l_sweep.csv`. Failed runs are recorded as not converged.
pub fn l_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let setup = setup_for(&cfg.params, cfg.nx, cfg.ny)?;
    let lp = cfg.params.material.l_phys();
    let mut table = Table::new(&["method", "L", "L_over_L_phys", "iterations", "mean_iterations", "converged"]);
    let mut all = true;
    for &method in &cfg.sweep_methods {
        for l in sweep_values(cfg) {
            let sc = split_config(cfg, l, cfg.workers);
            let (iters, mean, ok) = match solve(&setup, &cfg.params, &sc, method, cfg.steps(), cfg.tau) {
                Ok((_, r)) => (r.iterations.to_string(), num(r.headline_iterations()), r.converged),
                Err(e) => {
                    log::error!("{method} at L = {l:e} failed: {e}");
                    (String::new(), String::new(), false)
                }
            };
            all &= ok;
            table.push(vec![method.to_string(), num(l), num(l / lp), iters, mean, ok.to_string()]);
        }
    }
    let mut files = vec![table.write(&cfg.out_dir.join("l_sweep.csv"))?];
    let mut s = String::from("l-sweep\n");
    describe_problem(&mut s, cfg);
    s.push_str(
        "\ncolumns of l_sweep.csv:\n  method: fs or pfs\n  L: stabilization [1/Pa]\n  L_over_L_phys: L relative to alpha^2 / (G + lambda)\n  iterations: pfs global sweeps, or the largest per-step count for fs\n  mean_iterations: pfs global sweeps, or the mean per-step count for fs\n  converged: whether the run met the stopping test within max_iter\n",
    );
    files.push(write_summary(&cfg.out_dir.join("l_sweep_summary.txt"), &s)?);
    Ok(Outcome { converged: all, files })
}

/// Cells per direction for vertical spacing `h` (nx = ny = b / h).
pub fn cells_for_spacing(params: &MandelParams, h: f64) -> Result<usize, CliError> {
    let n = (params.b / h).round();
    if !(n >= 1.0) || ((n * h - params.b).abs() > 1e-9 * params.b) {
        return Err(CliError::Invalid(format!("spacing {h} does not divide the height {}", params.b)));
    }
    Ok(n as usize)
}

/// PFS global and FS mean iteration counts under τ refinement (at
/// `refine.tau_preset`) and h refinement (at `refine.h_preset`), written to
/// `refine_table.csv`.
pub fn refinement_table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut table = Table::new(&[
        "block",
        "preset",
        "nu",
        "tau",
        "h",
        "nx",
        "ny",
        "steps",
        "pfs_iterations",
        "pfs_converged",
        "fs_mean_iterations",
        "fs_max_iterations",
        "fs_converged",
    ]);
    let mut all = true;
    let mut cases: Vec<(&str, &str, f64, f64)> = Vec::new();
    for &tau in &cfg.refine_taus {
        cases.push(("tau", &cfg.refine_tau_preset, tau, cfg.refine_tau_h));
    }
    for &h in &cfg.refine_hs {
        cases.push(("h", &cfg.refine_h_preset, cfg.tau, h));
    }
    for (block, name, tau, h) in cases {
        let params = preset(name)?;
        let n = cells_for_spacing(&params, h)?;
        let steps = super::steps_for(tau, cfg.final_time)?;
        let setup = setup_for(&params, n, n)?;
        let sc = split_config(cfg, params.material.l_phys(), cfg.workers);
        log::info!("refine-table: {block} block, tau = {tau}, h = {h} ({n} x {n})");
        let mut row = vec![
            block.to_string(),
            name.to_string(),
            params.material.poisson_ratio.to_string(),
            num(tau),
            num(h),
            n.to_string(),
            n.to_string(),
            steps.to_string(),
        ];
        match solve(&setup, &params, &sc, SplitMethod::Pfs, steps, tau) {
            Ok((_, r)) => {
                all &= r.converged;
                row.extend([r.iterations.to_string(), r.converged.to_string()]);
            }
            Err(e) => {
                log::error!("pfs failed: {e}");
                all = false;
                row.extend([String::new(), "false".to_string()]);
            }
        }
        match solve(&setup, &params, &sc, SplitMethod::Fs, steps, tau) {
            Ok((_, r)) => {
                all &= r.converged;
                row.extend([opt(r.mean_step_iterations()), r.iterations.to_string(), r.converged.to_string()]);
            }
            Err(e) => {
                log::error!("fs failed: {e}");
                all = false;
                row.extend([String::new(), String::new(), "false".to_string()]);
            }
        }
        table.push(row);
    }
    let mut files = vec![table.write(&cfg.out_dir.join("refine_table.csv"))?];
    let s = format!(
        "refine-table\nfinal_time: {}\nL: L_phys of each preset\nlinear_solver: {}\n\ncolumns of refine_table.csv:\n  block: tau (time-step refinement) or h (mesh refinement)\n  preset, nu: material of the row\n  tau: time step [s]\n  h: vertical cell size b / ny [m]\n  nx, ny: cells per direction\n  steps: number of time steps\n  pfs_iterations: global pfs sweeps\n  fs_mean_iterations, fs_max_iterations: fs iterations per step, mean and largest\n  pfs_converged, fs_converged: convergence flags\n",
        cfg.final_time, cfg.linear
    );
    files.push(write_summary(&cfg.out_dir.join("refine_table_summary.txt"), &s)?);
    Ok(Outcome { converged: all, files })
}

/// Flow and mechanics wall times of PFS per preset and worker count, with
/// one FS reference run per preset, written to `bench.csv`.
pub fn bench(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut table = Table::new(&[
        "preset",
        "nu",
        "method",
        "workers",
        "iterations",
        "setup_time",
        "flow_time",
        "mechanics_time",
        "total_time",
        "flow_share",
        "mechanics_share",
        "identical_to_first",
    ]);
    let mut all = true;
    for name in &cfg.bench_presets {
        let params = preset(name)?;
        let setup = setup_for(&params, cfg.nx, cfg.ny)?;
        let l = cfg.l.resolve(&params);
        let mut runs: Vec<(SplitMethod, usize)> = cfg.bench_workers.iter().map(|&w| (SplitMethod::Pfs, w)).collect();
        runs.push((SplitMethod::Fs, 1));
        let mut first: Option<SpaceTimeState> = None;
        for (method, workers) in runs {
            let sc = split_config(cfg, l, workers);
            let mut row =
                vec![name.clone(), params.material.poisson_ratio.to_string(), method.to_string(), workers.to_string()];
            match solve(&setup, &params, &sc, method, cfg.steps(), cfg.tau) {
                Ok((state, r)) => {
                    all &= r.converged;
                    let stages = r.flow_time + r.mechanics_time;
                    let share = |x: f64| if stages > 0.0 { x / stages } else { 0.0 };
                    let same = match (method, &first) {
                        (SplitMethod::Fs, _) => String::new(),
                        (_, None) => "true".to_string(),
                        (_, Some(f)) => (f == &state).to_string(),
                    };
                    row.extend([
                        r.headline_iterations().to_string(),
                        num(r.setup_time),
                        num(r.flow_time),
                        num(r.mechanics_time),
                        num(r.total_time()),
                        num(share(r.flow_time)),
                        num(share(r.mechanics_time)),
                        same,
                    ]);
                    if method == SplitMethod::Pfs && first.is_none() {
                        first = Some(state);
                    }
                }
                Err(e) => {
                    log::error!("{method} with {workers} workers failed: {e}");
                    all = false;
                    row.extend(std::iter::repeat_n(String::new(), 8));
                }
            }
            table.push(row);
        }
    }
    let mut files = vec![table.write(&cfg.out_dir.join("bench.csv"))?];
    let s = format!(
        "bench\ngrid: {} x {} cells\ntau: {}\nfinal_time: {}\nlinear_solver: {}\n\ncolumns of bench.csv:\n  preset, nu: material of the row\n  method, workers: splitting method and mechanics threads\n  iterations: pfs sweeps or fs mean per-step count\n  setup_time: factorization time [s]\n  flow_time, mechanics_time: stage wall times [s]\n  total_time: setup + flow + mechanics [s]\n  flow_share, mechanics_share: stage fractions of flow + mechanics\n  identical_to_first: pfs solution bitwise equal to the first worker count\n",
        cfg.nx, cfg.ny, cfg.tau, cfg.final_time, cfg.linear
    );
    files.push(write_summary(&cfg.out_dir.join("bench_summary.txt"), &s)?);
    Ok(Outcome { converged: all, files })
}

/// Analytical pressure along y = 0 and displacement along y = b at the
/// configured times, written to `analytic_pressure.csv` and
/// `analytic_displacement.csv`.
pub fn analytic(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let series = MandelSeries::new(&cfg.params)?;
    let (a, b) = (cfg.params.a, cfg.params.b);
    let xs: Vec<f64> = (0..cfg.analytic_points).map(|k| a * k as f64 / (cfg.analytic_points - 1) as f64).collect();
    let mut pt = Table::new(&["t", "x", "p"]);
    let mut dt = Table::new(&["t", "x", "ux", "uy"]);
    for &t in &cfg.analytic_times {
        for &x in &xs {
            pt.push(vec![num(t), num(x), num(series.pressure(x, t))]);
            let [ux, uy] = series.displacement(x, b, t);
            dt.push(vec![num(t), num(x), num(ux), num(uy)]);
        }
    }
    let mut files = vec![
        pt.write(&cfg.out_dir.join("analytic_pressure.csv"))?,
        dt.write(&cfg.out_dir.join("analytic_displacement.csv"))?,
    ];
    let mut s = String::from("analytic\n");
    describe_problem(&mut s, cfg);
    let _ = writeln!(s, "initial_pressure: {}", num(cfg.params.initial_pressure()));
    let _ = writeln!(s, "diffusivity: {}", num(cfg.params.material.diffusivity()));
    let _ = writeln!(s, "series_terms: {}", cfg.params.series_terms);
    s.push_str("\ncolumns of analytic_pressure.csv:\n  t: time [s]\n  x: abscissa on y = 0 [m]\n  p: pressure [Pa]\ncolumns of analytic_displacement.csv:\n  t: time [s]\n  x: abscissa on y = b [m]\n  ux, uy: displacement [m]\n");
    files.push(write_summary(&cfg.out_dir.join("analytic_summary.txt"), &s)?);
    Ok(Outcome { converged: true, files })
}
