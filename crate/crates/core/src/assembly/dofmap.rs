use std::collections::BTreeMap;

use super::AssemblyError;
use crate::mesh::{BoundaryTag, Mesh};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowCondition {
    /// q · n = 0 (natural)
    NoFlux,
    /// prescribed pore pressure
    Pressure(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanicsCondition {
    /// σ n = 0 (natural)
    TractionFree,
    /// u · n = 0 with zero tangential traction
    NormalFixed,
    /// zero shear; u · n equal along the whole segment (rigid plate)
    RigidPlate,
}

/// Flow and mechanics condition for each of the four rectangle sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    sides: [(FlowCondition, MechanicsCondition); 4],
}

impl Default for BoundaryConditions {
    fn default() -> Self {
        Self { sides: [(FlowCondition::NoFlux, MechanicsCondition::TractionFree); 4] }
    }
}

fn side_index(tag: BoundaryTag) -> usize {
    match tag {
        BoundaryTag::Left => 0,
        BoundaryTag::Bottom => 1,
        BoundaryTag::Right => 2,
        BoundaryTag::Top => 3,
    }
}

impl BoundaryConditions {
    pub fn with(mut self, tag: BoundaryTag, flow: FlowCondition, mech: MechanicsCondition) -> Self {
        self.sides[side_index(tag)] = (flow, mech);
        self
    }

    pub fn flow(&self, tag: BoundaryTag) -> FlowCondition {
        self.sides[side_index(tag)].0
    }

    pub fn mechanics(&self, tag: BoundaryTag) -> MechanicsCondition {
        self.sides[side_index(tag)].1
    }
}

/// Role of a degree of freedom after constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofKind {
    Free,
    Fixed(f64),
    /// value equals that of `master`, which is always `Free`
    Slave {
        master: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidTie {
    pub master: usize,
    /// every tied dof, master included, ascending
    pub members: Vec<usize>,
}

/// Numbering of the P2 displacement and P1 pressure unknowns plus their
/// constraints.
///
/// P2 nodes are the mesh vertices followed by the edge midpoints; the
/// displacement dof of component `c` at P2 node `k` is `2k + c`. The pressure
/// dof of a vertex is its vertex index.
#[derive(Debug, Clone)]
pub struct DofMap {
    n_vertices: usize,
    n_edges: usize,
    u_kinds: Vec<DofKind>,
    p_kinds: Vec<DofKind>,
    tie: Option<RigidTie>,
}

impl DofMap {
    pub fn num_u(&self) -> usize {
        2 * (self.n_vertices + self.n_edges)
    }

    pub fn num_p(&self) -> usize {
        self.n_vertices
    }

    pub fn num_p2_nodes(&self) -> usize {
        self.n_vertices + self.n_edges
    }

    pub fn u_dof(node: usize, comp: usize) -> usize {
        2 * node + comp
    }

    pub fn u_kinds(&self) -> &[DofKind] {
        &self.u_kinds
    }

    pub fn p_kinds(&self) -> &[DofKind] {
        &self.p_kinds
    }

    pub fn tie(&self) -> Option<&RigidTie> {
        self.tie.as_ref()
    }

    pub fn fixed_u(&self) -> Vec<usize> {
        fixed_of(&self.u_kinds)
    }

    pub fn fixed_p(&self) -> Vec<usize> {
        fixed_of(&self.p_kinds)
    }

    /// Local-to-global displacement dofs of triangle `t`.
    pub fn element_u_dofs(&self, mesh: &Mesh, t: usize) -> [usize; 12] {
        let nodes = p2_nodes(mesh, t);
        let mut d = [0usize; 12];
        for (k, &n) in nodes.iter().enumerate() {
            d[2 * k] = 2 * n;
            d[2 * k + 1] = 2 * n + 1;
        }
        d
    }
}

fn fixed_of(kinds: &[DofKind]) -> Vec<usize> {
    kinds.iter().enumerate().filter(|(_, k)| matches!(k, DofKind::Fixed(_))).map(|(i, _)| i).collect()
}

/// Global P2 node indices of triangle `t` in local order.
pub fn p2_nodes(mesh: &Mesh, t: usize) -> [usize; 6] {
    let v = mesh.triangles()[t];
    let e = mesh.triangle_edges()[t];
    let nv = mesh.num_nodes();
    [v[0], v[1], v[2], nv + e[0], nv + e[1], nv + e[2]]
}

/// Coordinates of every P2 node (vertices, then edge midpoints).
pub fn p2_node_coordinates(mesh: &Mesh) -> Vec<[f64; 2]> {
    let mut pts = mesh.nodes().to_vec();
    pts.extend((0..mesh.num_edges()).map(|e| mesh.edge_midpoint(e)));
    pts
}

/// P2 nodes on a boundary segment: its vertices and its edge midpoints.
pub fn boundary_p2_nodes(mesh: &Mesh, tag: BoundaryTag) -> Vec<usize> {
    let nv = mesh.num_nodes();
    let mut nodes = mesh.boundary_nodes(tag);
    nodes.extend(mesh.boundary_edges_of(tag).into_iter().map(|e| nv + e));
    nodes.sort_unstable();
    nodes
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Request {
    Fix(f64),
    Tie,
}

fn request(
    table: &mut BTreeMap<usize, Request>,
    dof: usize,
    req: Request,
    field: &'static str,
) -> Result<(), AssemblyError> {
    match table.get(&dof) {
        None => {
            table.insert(dof, req);
            Ok(())
        }
        Some(prev) if *prev == req => Ok(()),
        Some(_) => Err(AssemblyError::ConflictingConstraint { field, dof }),
    }
}

pub fn build_dof_map(mesh: &Mesh, bcs: &BoundaryConditions) -> Result<DofMap, AssemblyError> {
    let n_vertices = mesh.num_nodes();
    let n_edges = mesh.num_edges();

    let mut p_req: BTreeMap<usize, Request> = BTreeMap::new();
    let mut u_req: BTreeMap<usize, Request> = BTreeMap::new();
    let mut plate_side: Option<BoundaryTag> = None;

    for tag in BoundaryTag::ALL {
        if let FlowCondition::Pressure(v) = bcs.flow(tag) {
            for n in mesh.boundary_nodes(tag) {
                request(&mut p_req, n, Request::Fix(v), "pressure")?;
            }
        }
        let axis = tag.normal_axis();
        match bcs.mechanics(tag) {
            MechanicsCondition::TractionFree => {}
            MechanicsCondition::NormalFixed => {
                for n in boundary_p2_nodes(mesh, tag) {
                    request(&mut u_req, DofMap::u_dof(n, axis), Request::Fix(0.0), "displacement")?;
                }
            }
            MechanicsCondition::RigidPlate => {
                if let Some(prev) = plate_side {
                    return Err(AssemblyError::InvalidProblem(format!(
                        "rigid plates on both {prev:?} and {tag:?} are not supported"
                    )));
                }
                plate_side = Some(tag);
                for n in boundary_p2_nodes(mesh, tag) {
                    request(&mut u_req, DofMap::u_dof(n, axis), Request::Tie, "displacement")?;
                }
            }
        }
    }

    let mut p_kinds = vec![DofKind::Free; n_vertices];
    for (&d, r) in &p_req {
        if let Request::Fix(v) = r {
            p_kinds[d] = DofKind::Fixed(*v);
        }
    }

    let mut u_kinds = vec![DofKind::Free; 2 * (n_vertices + n_edges)];
    let mut members = Vec::new();
    for (&d, r) in &u_req {
        match r {
            Request::Fix(v) => u_kinds[d] = DofKind::Fixed(*v),
            Request::Tie => members.push(d),
        }
    }
    let tie = if members.is_empty() {
        None
    } else {
        let master = members[0];
        for &d in &members[1..] {
            u_kinds[d] = DofKind::Slave { master };
        }
        Some(RigidTie { master, members })
    };

    Ok(DofMap { n_vertices, n_edges, u_kinds, p_kinds, tie })
}
