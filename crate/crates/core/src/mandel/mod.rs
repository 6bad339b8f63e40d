//! Mandel's consolidation problem on the quarter domain [0,a]×[0,b].

mod series;

use thiserror::Error;

use crate::assembly::{
    apply_constraints, build_dof_map, evaluate_pressure, interpolate_displacement, interpolate_pressure, AssemblyError,
    BiotSystem, BoundaryConditions, ConstrainedSystem, FlowCondition, MaterialParams, MechanicsCondition,
};
use crate::mesh::{BoundaryTag, Mesh, MeshError};
use crate::splitting::{InitialState, SpaceTimeState};

pub use series::{find_series_roots, MandelSeries};

/// 1 darcy in m².
pub const DARCY: f64 = 9.869233e-13;
/// 1 centipoise in Pa·s.
pub const CENTIPOISE: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum MandelError {
    #[error("series ratio must exceed 1, got {0}")]
    BadRatio(f64),
    #[error("no sign change bracketing series root {index}")]
    Bracket { index: usize },
    #[error("invalid Mandel parameters: {0}")]
    InvalidParams(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MandelParams {
    /// half-width [m]
    pub a: f64,
    /// half-height [m]
    pub b: f64,
    /// force intensity on the quarter domain [N/m]
    pub force: f64,
    pub material: MaterialParams,
    pub series_terms: usize,
    pub root_tol: f64,
}

impl MandelParams {
    pub fn validate(&self) -> Result<(), MandelError> {
        let bad = |m: String| Err(MandelError::InvalidParams(m));
        if !(self.a > 0.0 && self.b > 0.0 && self.force > 0.0) {
            return bad(format!("a, b and F must be positive (a = {}, b = {}, F = {})", self.a, self.b, self.force));
        }
        if self.series_terms < 50 {
            return bad(format!("at least 50 series terms are required, got {}", self.series_terms));
        }
        if !(self.root_tol > 0.0 && self.root_tol <= 1e-12) {
            return bad(format!("root tolerance must lie in (0, 1e-12], got {}", self.root_tol));
        }
        self.material.validate().map_err(|e| MandelError::InvalidParams(e.to_string()))
    }

    /// p0 = F B (1 + ν_u) / (3a)
    pub fn initial_pressure(&self) -> f64 {
        let m = &self.material;
        self.force * m.skempton * (1.0 + m.undrained_poisson_ratio()) / (3.0 * self.a)
    }

    pub fn initial_conditions(&self) -> InitialConditions {
        let m = &self.material;
        let g = m.shear_modulus();
        let nu_u = m.undrained_poisson_ratio();
        InitialConditions {
            p0: self.initial_pressure(),
            strain_x: self.force * nu_u / (2.0 * g * self.a),
            strain_y: -self.force * (1.0 - nu_u) / (2.0 * g * self.a),
        }
    }
}

/// Undrained state right after loading: uniform pressure and a uniform
/// strain field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    pub p0: f64,
    /// u_x / x
    pub strain_x: f64,
    /// u_y / y
    pub strain_y: f64,
}

impl InitialConditions {
    pub fn displacement(&self, x: f64, y: f64) -> [f64; 2] {
        [self.strain_x * x, self.strain_y * y]
    }
}

pub fn initial_conditions(mp: &MandelParams) -> InitialConditions {
    mp.initial_conditions()
}

/// The benchmark material with the given Poisson ratio.
pub fn benchmark_material(poisson_ratio: f64) -> MaterialParams {
    MaterialParams {
        youngs_modulus: 5.94e9,
        poisson_ratio,
        biot_coefficient: 1.0,
        biot_modulus: 1.65e10,
        permeability: 100.0 * DARCY,
        fluid_viscosity: 10.0 * CENTIPOISE,
        bulk_density: 0.0,
        fluid_density: 0.0,
        porosity: 0.0,
        gravity: [0.0, 0.0],
        skempton: 0.83333,
    }
}

pub fn benchmark_params(poisson_ratio: f64) -> MandelParams {
    MandelParams {
        a: 100.0,
        b: 10.0,
        force: 6.8e8,
        material: benchmark_material(poisson_ratio),
        series_terms: 200,
        root_tol: 1e-14,
    }
}

/// Preset names and their Poisson ratios.
pub const PRESETS: [(&str, f64); 6] =
    [("fig3", 0.2), ("nu0.4", 0.4), ("nu0.49", 0.49), ("nu0.499", 0.499), ("nu0.4999", 0.4999), ("nu0.49999", 0.49999)];

pub fn preset(name: &str) -> Result<MandelParams, MandelError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, nu)| benchmark_params(nu))
        .ok_or_else(|| MandelError::UnknownPreset(name.to_string()))
}

/// Flow and mechanics conditions of the quarter domain.
pub fn boundary_conditions() -> BoundaryConditions {
    BoundaryConditions::default()
        .with(BoundaryTag::Left, FlowCondition::NoFlux, MechanicsCondition::NormalFixed)
        .with(BoundaryTag::Bottom, FlowCondition::NoFlux, MechanicsCondition::NormalFixed)
        .with(BoundaryTag::Right, FlowCondition::Pressure(0.0), MechanicsCondition::TractionFree)
        .with(BoundaryTag::Top, FlowCondition::NoFlux, MechanicsCondition::RigidPlate)
}

/// A Mandel problem on a structured grid.
#[derive(Debug, Clone)]
pub struct ProblemDef {
    pub params: MandelParams,
    pub nx: usize,
    pub ny: usize,
    pub bcs: BoundaryConditions,
}

/// Everything a splitting run needs.
#[derive(Debug, Clone)]
pub struct MandelSetup {
    pub mesh: Mesh,
    pub system: ConstrainedSystem,
    pub initial: InitialState,
}

impl ProblemDef {
    pub fn new(params: MandelParams, nx: usize, ny: usize) -> Self {
        Self { params, nx, ny, bcs: boundary_conditions() }
    }

    pub fn mesh(&self) -> Result<Mesh, MandelError> {
        Ok(Mesh::build_rect(self.params.a, self.params.b, self.nx, self.ny)?)
    }

    pub fn setup(&self) -> Result<MandelSetup, MandelError> {
        self.params.validate()?;
        let mesh = self.mesh()?;
        let raw = BiotSystem::assemble(&mesh, &self.params.material)?;
        let dofmap = build_dof_map(&mesh, &self.bcs)?;
        let system = apply_constraints(raw, dofmap, self.params.force)?;
        let ic = self.params.initial_conditions();
        let initial = InitialState {
            u: interpolate_displacement(&mesh, |x, y| ic.displacement(x, y)),
            p: interpolate_pressure(&mesh, |_, _| ic.p0),
        };
        Ok(MandelSetup { mesh, system, initial })
    }
}

/// Pressure at (probe_x, 0) for every time level of `state`.
pub fn mandel_cryer_profile(mesh: &Mesh, state: &SpaceTimeState, probe_x: f64) -> Result<Vec<(f64, f64)>, MandelError> {
    state.p.iter().enumerate().map(|(n, p)| Ok((state.time(n), evaluate_pressure(mesh, p, probe_x, 0.0)?))).collect()
}
