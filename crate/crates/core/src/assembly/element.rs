//! Element kernels for the P2 (displacement) / P1 (pressure) pair.
//!
//! Local P2 nodes: 0..3 are the vertices, 3 = mid(0,1), 4 = mid(1,2),
//! 5 = mid(2,0). Local displacement dof `2k + c` is component `c` of node `k`.

use super::AssemblyError;

/// Degree-4 Gauss rule with 6 points: (barycentric coordinates, weight / area).
pub const GAUSS6: [([f64; 3], f64); 6] = {
    const A1: f64 = 0.445_948_490_915_964_886_318_329_253_883;
    const W1: f64 = 0.223_381_589_678_011_465_944_626_330_567;
    const A2: f64 = 0.091_576_213_509_770_743_459_571_463_402;
    const W2: f64 = 0.109_951_743_655_321_867_388_706_996_099;
    [
        ([A1, A1, 1.0 - 2.0 * A1], W1),
        ([A1, 1.0 - 2.0 * A1, A1], W1),
        ([1.0 - 2.0 * A1, A1, A1], W1),
        ([A2, A2, 1.0 - 2.0 * A2], W2),
        ([A2, 1.0 - 2.0 * A2, A2], W2),
        ([1.0 - 2.0 * A2, A2, A2], W2),
    ]
};

pub type Point = [f64; 2];

/// Affine triangle data: area and the constant gradients of the
/// barycentric coordinates.
#[derive(Debug, Clone, Copy)]
pub struct TriangleGeometry {
    pub vertices: [Point; 3],
    pub area: f64,
    pub grad_bary: [Point; 3],
}

impl TriangleGeometry {
    pub fn new(element: usize, vertices: [Point; 3]) -> Result<Self, AssemblyError> {
        let [p0, p1, p2] = vertices;
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let scale = [p0, p1, p2].iter().flat_map(|p| p.iter()).fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if !(det.abs() > 1e-14 * scale * scale) {
            return Err(AssemblyError::DegenerateElement { element });
        }
        let grad_bary = [
            [(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det],
            [(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det],
            [(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det],
        ];
        Ok(Self { vertices, area: 0.5 * det.abs(), grad_bary })
    }

    pub fn point(&self, bary: [f64; 3]) -> Point {
        let v = &self.vertices;
        [
            bary[0] * v[0][0] + bary[1] * v[1][0] + bary[2] * v[2][0],
            bary[0] * v[0][1] + bary[1] * v[1][1] + bary[2] * v[2][1],
        ]
    }
}

pub fn p1_shape(bary: [f64; 3]) -> [f64; 3] {
    bary
}

pub fn p2_shape(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

pub fn p2_gradients(l: [f64; 3], geo: &TriangleGeometry) -> [Point; 6] {
    let g = &geo.grad_bary;
    let lin = |a: f64, ga: Point, b: f64, gb: Point| [a * ga[0] + b * gb[0], a * ga[1] + b * gb[1]];
    [
        lin(4.0 * l[0] - 1.0, g[0], 0.0, g[0]),
        lin(4.0 * l[1] - 1.0, g[1], 0.0, g[1]),
        lin(4.0 * l[2] - 1.0, g[2], 0.0, g[2]),
        lin(4.0 * l[0], g[1], 4.0 * l[1], g[0]),
        lin(4.0 * l[1], g[2], 4.0 * l[2], g[1]),
        lin(4.0 * l[2], g[0], 4.0 * l[0], g[2]),
    ]
}

/// `2G ε(φ_j):ε(φ_i) + λ div φ_j div φ_i` over the twelve vector P2 basis
/// functions.
pub fn elasticity_element(geo: &TriangleGeometry, shear: f64, lambda: f64) -> [[f64; 12]; 12] {
    let mut k = [[0.0; 12]; 12];
    for &(bary, w) in &GAUSS6 {
        let grads = p2_gradients(bary, geo);
        let wa = w * geo.area;
        for i in 0..6 {
            for a in 0..2 {
                for j in 0..6 {
                    for b in 0..2 {
                        let (gi, gj) = (grads[i], grads[j]);
                        let dot = if a == b { gi[0] * gj[0] + gi[1] * gj[1] } else { 0.0 };
                        let strain = shear * (dot + gi[b] * gj[a]);
                        let div = lambda * gi[a] * gj[b];
                        k[2 * i + a][2 * j + b] += wa * (strain + div);
                    }
                }
            }
        }
    }
    k
}

/// `(div φ_j, ψ_i)`: rows are the three P1 functions, columns the twelve
/// displacement functions.
pub fn coupling_element(geo: &TriangleGeometry) -> [[f64; 12]; 3] {
    let mut m = [[0.0; 12]; 3];
    for &(bary, w) in &GAUSS6 {
        let grads = p2_gradients(bary, geo);
        let psi = p1_shape(bary);
        let wa = w * geo.area;
        for (i, &pi) in psi.iter().enumerate() {
            for j in 0..6 {
                for c in 0..2 {
                    m[i][2 * j + c] += wa * pi * grads[j][c];
                }
            }
        }
    }
    m
}

/// `mobility · (∇ψ_j, ∇ψ_i)` for P1.
pub fn pressure_stiffness_element(geo: &TriangleGeometry, mobility: f64) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    let g = &geo.grad_bary;
    for &(_, w) in &GAUSS6 {
        let wa = w * geo.area * mobility;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += wa * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
    }
    m
}

/// Consistent P1 mass matrix `(ψ_j, ψ_i)`.
pub fn pressure_mass_element(geo: &TriangleGeometry) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for &(bary, w) in &GAUSS6 {
        let psi = p1_shape(bary);
        let wa = w * geo.area;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += wa * psi[i] * psi[j];
            }
        }
    }
    m
}
