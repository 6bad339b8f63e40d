use super::constraints::Constraints;
use super::dofmap::{p2_node_coordinates, p2_nodes, DofMap};
use super::element::{
    coupling_element, elasticity_element, p1_shape, p2_shape, pressure_mass_element, pressure_stiffness_element,
    TriangleGeometry, GAUSS6,
};
use super::{AssemblyError, MaterialParams};
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::mesh::Mesh;

fn geometry(mesh: &Mesh, t: usize) -> Result<TriangleGeometry, AssemblyError> {
    TriangleGeometry::new(t, mesh.vertices_of(t))
}

fn u_dofs(mesh: &Mesh, t: usize) -> [usize; 12] {
    let nodes = p2_nodes(mesh, t);
    let mut d = [0usize; 12];
    for (k, &n) in nodes.iter().enumerate() {
        d[2 * k] = 2 * n;
        d[2 * k + 1] = 2 * n + 1;
    }
    d
}

fn num_u(mesh: &Mesh) -> usize {
    2 * (mesh.num_nodes() + mesh.num_edges())
}

pub fn assemble_elasticity(mesh: &Mesh, params: &MaterialParams) -> Result<CsrMatrix, AssemblyError> {
    let (g, lambda) = (params.shear_modulus(), params.lame_lambda());
    let n = num_u(mesh);
    let mut t = TripletBuilder::with_capacity(n, n, 144 * mesh.num_triangles());
    for e in 0..mesh.num_triangles() {
        let ke = elasticity_element(&geometry(mesh, e)?, g, lambda);
        let d = u_dofs(mesh, e);
        for i in 0..12 {
            for j in 0..12 {
                t.push(d[i], d[j], ke[i][j]);
            }
        }
    }
    Ok(t.build())
}

/// Rows are pressure dofs, columns displacement dofs; α is not included.
pub fn assemble_coupling(mesh: &Mesh) -> Result<CsrMatrix, AssemblyError> {
    let mut t = TripletBuilder::with_capacity(mesh.num_nodes(), num_u(mesh), 36 * mesh.num_triangles());
    for e in 0..mesh.num_triangles() {
        let be = coupling_element(&geometry(mesh, e)?);
        let d = u_dofs(mesh, e);
        let v = mesh.triangles()[e];
        for i in 0..3 {
            for j in 0..12 {
                t.push(v[i], d[j], be[i][j]);
            }
        }
    }
    Ok(t.build())
}

pub fn assemble_pressure_stiffness(mesh: &Mesh, params: &MaterialParams) -> Result<CsrMatrix, AssemblyError> {
    let mobility = params.mobility();
    let n = mesh.num_nodes();
    let mut t = TripletBuilder::with_capacity(n, n, 9 * mesh.num_triangles());
    for e in 0..mesh.num_triangles() {
        let ce = pressure_stiffness_element(&geometry(mesh, e)?, mobility);
        let v = mesh.triangles()[e];
        for i in 0..3 {
            for j in 0..3 {
                t.push(v[i], v[j], ce[i][j]);
            }
        }
    }
    Ok(t.build())
}

/// Consistent P1 mass matrix; `1/β` is not included.
pub fn assemble_pressure_mass(mesh: &Mesh) -> Result<CsrMatrix, AssemblyError> {
    let n = mesh.num_nodes();
    let mut t = TripletBuilder::with_capacity(n, n, 9 * mesh.num_triangles());
    for e in 0..mesh.num_triangles() {
        let me = pressure_mass_element(&geometry(mesh, e)?);
        let v = mesh.triangles()[e];
        for i in 0..3 {
            for j in 0..3 {
                t.push(v[i], v[j], me[i][j]);
            }
        }
    }
    Ok(t.build())
}

/// `(f, v)` for a vector body force over the P2 space.
pub fn assemble_body_force<F>(mesh: &Mesh, force: F) -> Result<Vec<f64>, AssemblyError>
where
    F: Fn(f64, f64) -> [f64; 2],
{
    let mut out = vec![0.0; num_u(mesh)];
    for e in 0..mesh.num_triangles() {
        let geo = geometry(mesh, e)?;
        let d = u_dofs(mesh, e);
        for &(bary, w) in &GAUSS6 {
            let [x, y] = geo.point(bary);
            let f = force(x, y);
            let n = p2_shape(bary);
            for k in 0..6 {
                out[d[2 * k]] += w * geo.area * f[0] * n[k];
                out[d[2 * k + 1]] += w * geo.area * f[1] * n[k];
            }
        }
    }
    Ok(out)
}

/// `(s, q)` for a scalar source over the P1 space.
pub fn assemble_flow_source<F>(mesh: &Mesh, source: F) -> Result<Vec<f64>, AssemblyError>
where
    F: Fn(f64, f64) -> f64,
{
    let mut out = vec![0.0; mesh.num_nodes()];
    for e in 0..mesh.num_triangles() {
        let geo = geometry(mesh, e)?;
        let v = mesh.triangles()[e];
        for &(bary, w) in &GAUSS6 {
            let [x, y] = geo.point(bary);
            let s = source(x, y);
            let psi = p1_shape(bary);
            for k in 0..3 {
                out[v[k]] += w * geo.area * s * psi[k];
            }
        }
    }
    Ok(out)
}

/// `(w, ∇q)` for a constant vector `w` (the gravity term of Darcy's law).
pub fn assemble_flux_load(mesh: &Mesh, w: [f64; 2]) -> Result<Vec<f64>, AssemblyError> {
    let mut out = vec![0.0; mesh.num_nodes()];
    if w == [0.0, 0.0] {
        return Ok(out);
    }
    for e in 0..mesh.num_triangles() {
        let geo = geometry(mesh, e)?;
        let v = mesh.triangles()[e];
        for k in 0..3 {
            let g = geo.grad_bary[k];
            out[v[k]] += geo.area * (w[0] * g[0] + w[1] * g[1]);
        }
    }
    Ok(out)
}

/// Vector field sampled at the P2 nodes (exact for quadratics).
pub fn interpolate_displacement<F>(mesh: &Mesh, f: F) -> Vec<f64>
where
    F: Fn(f64, f64) -> [f64; 2],
{
    p2_node_coordinates(mesh).into_iter().flat_map(|[x, y]| f(x, y)).collect()
}

/// Scalar field sampled at the vertices.
pub fn interpolate_pressure<F>(mesh: &Mesh, f: F) -> Vec<f64>
where
    F: Fn(f64, f64) -> f64,
{
    mesh.nodes().iter().map(|&[x, y]| f(x, y)).collect()
}

/// P1 pressure field evaluated at an arbitrary point.
pub fn evaluate_pressure(mesh: &Mesh, p: &[f64], x: f64, y: f64) -> Result<f64, AssemblyError> {
    let (t, bary) = mesh.locate(x, y)?;
    let v = mesh.triangles()[t];
    Ok(bary[0] * p[v[0]] + bary[1] * p[v[1]] + bary[2] * p[v[2]])
}

/// P2 displacement evaluated at an arbitrary point.
pub fn evaluate_displacement(mesh: &Mesh, u: &[f64], x: f64, y: f64) -> Result<[f64; 2], AssemblyError> {
    let (t, bary) = mesh.locate(x, y)?;
    let n = p2_shape(bary);
    let nodes = p2_nodes(mesh, t);
    let mut out = [0.0; 2];
    for (k, &node) in nodes.iter().enumerate() {
        out[0] += n[k] * u[2 * node];
        out[1] += n[k] * u[2 * node + 1];
    }
    Ok(out)
}

/// The unconstrained operators and loads of the semidiscrete Biot system.
#[derive(Debug, Clone)]
pub struct BiotSystem {
    /// elasticity stiffness
    pub a: CsrMatrix,
    /// `(div φ_j, ψ_i)`, pressure rows by displacement columns
    pub coupling: CsrMatrix,
    /// `(κ/μ_f)(∇ψ_j, ∇ψ_i)`
    pub c: CsrMatrix,
    /// P1 mass
    pub mass: CsrMatrix,
    /// mechanics load `(ρ g, v)`
    pub g_load: Vec<f64>,
    /// time-independent flow load `(κ/μ_f ρ_f g, ∇q)`
    pub f_load: Vec<f64>,
}

impl BiotSystem {
    pub fn assemble(mesh: &Mesh, params: &MaterialParams) -> Result<Self, AssemblyError> {
        params.validate()?;
        let a = assemble_elasticity(mesh, params)?;
        let coupling = assemble_coupling(mesh)?;
        let c = assemble_pressure_stiffness(mesh, params)?;
        let mass = assemble_pressure_mass(mesh)?;
        let rho_g = [params.bulk_density * params.gravity[0], params.bulk_density * params.gravity[1]];
        let g_load = if rho_g == [0.0, 0.0] { vec![0.0; a.nrows()] } else { assemble_body_force(mesh, |_, _| rho_g)? };
        let m = params.mobility() * params.fluid_density;
        let f_load = assemble_flux_load(mesh, [m * params.gravity[0], m * params.gravity[1]])?;
        Ok(Self { a, coupling, c, mass, g_load, f_load })
    }

    pub fn num_u(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_p(&self) -> usize {
        self.mass.nrows()
    }
}

/// Biot system with boundary conditions, rigid-plate tie and plate load.
#[derive(Debug, Clone)]
pub struct ConstrainedSystem {
    pub raw: BiotSystem,
    pub dofmap: DofMap,
    pub u_constraints: Constraints,
    pub p_constraints: Constraints,
    /// constrained elasticity operator (SPD when the constraints remove the
    /// rigid motions)
    pub mechanics_matrix: CsrMatrix,
    /// unconstrained mechanics load including the plate force on the master
    pub mechanics_load: Vec<f64>,
    pub plate_force: f64,
}

/// Applies Dirichlet data, folds the tied plate dofs into their master and
/// puts the generalized plate force `−F` on the master.
pub fn apply_constraints(
    system: BiotSystem,
    dofmap: DofMap,
    plate_force: f64,
) -> Result<ConstrainedSystem, AssemblyError> {
    if system.num_u() != dofmap.num_u() || system.num_p() != dofmap.num_p() {
        return Err(AssemblyError::InvalidProblem("dof map does not match the assembled system".into()));
    }
    let u_constraints = Constraints::new(dofmap.u_kinds());
    let p_constraints = Constraints::new(dofmap.p_kinds());
    let mechanics_matrix = u_constraints.constrain_matrix(&system.a);
    let mut mechanics_load = system.g_load.clone();
    match dofmap.tie() {
        Some(tie) => mechanics_load[tie.master] -= plate_force,
        None if plate_force != 0.0 => {
            return Err(AssemblyError::InvalidProblem("plate force given but no rigid plate".into()));
        }
        None => {}
    }
    Ok(ConstrainedSystem {
        raw: system,
        dofmap,
        u_constraints,
        p_constraints,
        mechanics_matrix,
        mechanics_load,
        plate_force,
    })
}

impl ConstrainedSystem {
    /// Constrained right-hand side of `A u = α Bcᵀ p + g`.
    pub fn mechanics_rhs(&self, alpha: f64, p: &[f64]) -> Vec<f64> {
        let mut rhs = self.raw.coupling.spmv_transpose(p).expect("pressure dimension");
        for (r, g) in rhs.iter_mut().zip(&self.mechanics_load) {
            *r = alpha * *r + g;
        }
        self.u_constraints.constrain_rhs(&self.raw.a, &rhs)
    }

    /// Constrained `(1/β + L) M + τ C`, the operator of every flow solve
    /// (scaled by τ).
    pub fn flow_matrix(&self, params: &MaterialParams, l: f64, tau: f64) -> CsrMatrix {
        let k = self.raw.mass.linear_combination(params.storage() + l, &self.raw.c, tau);
        self.p_constraints.constrain_matrix(&k)
    }

    /// Sum over the tied dofs of `A u − α Bcᵀ p − g_body`: the resultant the
    /// plate exerts on the body.
    pub fn plate_reaction(&self, alpha: f64, u: &[f64], p: &[f64]) -> Option<f64> {
        let tie = self.dofmap.tie()?;
        let au = self.raw.a.spmv(u).ok()?;
        let bp = self.raw.coupling.spmv_transpose(p).ok()?;
        Some(tie.members.iter().map(|&d| au[d] - alpha * bp[d] - self.raw.g_load[d]).sum())
    }

    /// Vertical plate displacement (the master value), if there is a plate.
    pub fn plate_displacement(&self, u: &[f64]) -> Option<f64> {
        self.dofmap.tie().map(|t| u[t.master])
    }
}
