//! Finite-element spaces, operators, loads and constraints of the Biot system.

pub mod constraints;
pub mod dofmap;
pub mod element;
pub mod material;
pub mod system;

use thiserror::Error;

pub use constraints::Constraints;
pub use dofmap::{build_dof_map, BoundaryConditions, DofKind, DofMap, FlowCondition, MechanicsCondition, RigidTie};
pub use material::MaterialParams;
pub use system::{
    apply_constraints, assemble_body_force, assemble_coupling, assemble_elasticity, assemble_flow_source,
    assemble_flux_load, assemble_pressure_mass, assemble_pressure_stiffness, evaluate_displacement, evaluate_pressure,
    interpolate_displacement, interpolate_pressure, BiotSystem, ConstrainedSystem,
};

use crate::linalg::LinalgError;
use crate::mesh::MeshError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("degenerate (zero-area) element {element}")]
    DegenerateElement { element: usize },
    #[error("conflicting constraints on {field} dof {dof}")]
    ConflictingConstraint { field: &'static str, dof: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
