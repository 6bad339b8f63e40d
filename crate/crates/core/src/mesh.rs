//! Structured triangulations of a rectangle with tagged boundary segments.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("rectangle dimensions must be positive (got a = {a}, b = {b})")]
    BadDimensions { a: f64, b: f64 },
    #[error("cell counts must be at least 1 (got nx = {nx}, ny = {ny})")]
    BadCellCount { nx: usize, ny: usize },
    #[error("point ({x}, {y}) lies outside the mesh")]
    OutsideDomain { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// x = 0
    Left,
    /// y = 0
    Bottom,
    /// x = a
    Right,
    /// y = b
    Top,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 4] = [Self::Left, Self::Bottom, Self::Right, Self::Top];

    /// Coordinate axis normal to the segment (0 = x, 1 = y).
    pub fn normal_axis(self) -> usize {
        match self {
            Self::Left | Self::Right => 0,
            Self::Bottom | Self::Top => 1,
        }
    }
}

/// Triangulation of `[0, a] × [0, b]` with `nx × ny` cells, each split along
/// the bottom-left to top-right diagonal.
///
/// Vertex `(i, j)` has index `j (nx + 1) + i` and sits at `(i a / nx, j b / ny)`.
/// Edges are numbered once at construction and shared by the P2 space.
#[derive(Debug, Clone)]
pub struct Mesh {
    a: f64,
    b: f64,
    nx: usize,
    ny: usize,
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    /// local edges (v0,v1), (v1,v2), (v2,v0) of every triangle
    triangle_edges: Vec<[usize; 3]>,
    boundary_edges: Vec<(usize, BoundaryTag)>,
}

impl Mesh {
    pub fn build_rect(a: f64, b: f64, nx: usize, ny: usize) -> Result<Self, MeshError> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(MeshError::BadDimensions { a, b });
        }
        if nx == 0 || ny == 0 {
            return Err(MeshError::BadCellCount { nx, ny });
        }
        let vid = |i: usize, j: usize| j * (nx + 1) + i;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                // exact on the far boundary
                let x = if i == nx { a } else { i as f64 * a / nx as f64 };
                let y = if j == ny { b } else { j as f64 * b / ny as f64 };
                nodes.push([x, y]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }

        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for t in &triangles {
            let mut te = [0usize; 3];
            for k in 0..3 {
                let (p, q) = (t[k], t[(k + 1) % 3]);
                let key = (p.min(q), p.max(q));
                let id = *edge_index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edges.len() - 1
                });
                te[k] = id;
            }
            triangle_edges.push(te);
        }

        let mut boundary_edges = Vec::new();
        for (e, &[p, q]) in edges.iter().enumerate() {
            let (pi, pj) = (p % (nx + 1), p / (nx + 1));
            let (qi, qj) = (q % (nx + 1), q / (nx + 1));
            let tag = if pi == 0 && qi == 0 {
                Some(BoundaryTag::Left)
            } else if pi == nx && qi == nx {
                Some(BoundaryTag::Right)
            } else if pj == 0 && qj == 0 {
                Some(BoundaryTag::Bottom)
            } else if pj == ny && qj == ny {
                Some(BoundaryTag::Top)
            } else {
                None
            };
            if let Some(tag) = tag {
                boundary_edges.push((e, tag));
            }
        }

        Ok(Self { a, b, nx, ny, nodes, triangles, edges, triangle_edges, boundary_edges })
    }

    pub fn width(&self) -> f64 {
        self.a
    }

    pub fn height(&self) -> f64 {
        self.b
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        self.a / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.b / self.ny as f64
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn boundary_edges(&self) -> &[(usize, BoundaryTag)] {
        &self.boundary_edges
    }

    pub fn edge_midpoint(&self, e: usize) -> [f64; 2] {
        let [p, q] = self.edges[e];
        let (a, b) = (self.nodes[p], self.nodes[q]);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    pub fn vertices_of(&self, t: usize) -> [[f64; 2]; 3] {
        let [i, j, k] = self.triangles[t];
        [self.nodes[i], self.nodes[j], self.nodes[k]]
    }

    /// Signed area, positive for counterclockwise orientation.
    pub fn signed_area(&self, t: usize) -> f64 {
        let [p0, p1, p2] = self.vertices_of(t);
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.signed_area(t)).sum()
    }

    /// Vertex indices on the tagged segment, corners included, sorted.
    pub fn boundary_nodes(&self, tag: BoundaryTag) -> Vec<usize> {
        let w = self.nx + 1;
        match tag {
            BoundaryTag::Left => (0..=self.ny).map(|j| j * w).collect(),
            BoundaryTag::Right => (0..=self.ny).map(|j| j * w + self.nx).collect(),
            BoundaryTag::Bottom => (0..=self.nx).collect(),
            BoundaryTag::Top => (0..=self.nx).map(|i| self.ny * w + i).collect(),
        }
    }

    /// Edge indices on the tagged segment.
    pub fn boundary_edges_of(&self, tag: BoundaryTag) -> Vec<usize> {
        self.boundary_edges.iter().filter(|(_, t)| *t == tag).map(|(e, _)| *e).collect()
    }

    /// Triangle containing `(x, y)` and the barycentric coordinates there.
    pub fn locate(&self, x: f64, y: f64) -> Result<(usize, [f64; 3]), MeshError> {
        let eps = 1e-12 * self.a.max(self.b);
        if !(x >= -eps && x <= self.a + eps && y >= -eps && y <= self.b + eps) {
            return Err(MeshError::OutsideDomain { x, y });
        }
        let i = ((x / self.hx()).floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let j = ((y / self.hy()).floor() as isize).clamp(0, self.ny as isize - 1) as usize;
        let cell = j * self.nx + i;
        for t in [2 * cell, 2 * cell + 1] {
            let bary = self.barycentric(t, x, y);
            if bary.iter().all(|&l| l >= -1e-10) {
                return Ok((t, bary));
            }
        }
        // rounding on the diagonal: take the closer of the two
        let t0 = self.barycentric(2 * cell, x, y);
        let t1 = self.barycentric(2 * cell + 1, x, y);
        let m0 = t0.iter().cloned().fold(f64::INFINITY, f64::min);
        let m1 = t1.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(if m0 >= m1 { (2 * cell, t0) } else { (2 * cell + 1, t1) })
    }

    pub fn barycentric(&self, t: usize, x: f64, y: f64) -> [f64; 3] {
        let [p0, p1, p2] = self.vertices_of(t);
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let l1 = ((x - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (y - p0[1])) / det;
        let l2 = ((p1[0] - p0[0]) * (y - p0[1]) - (x - p0[0]) * (p1[1] - p0[1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }
}
