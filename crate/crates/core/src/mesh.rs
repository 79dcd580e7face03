//! Structured interval and Cartesian quadrilateral meshes.
//!
//! Cells are numbered `cx + nx * cy`, vertices `vx + nvx * vy`, where on a periodic
//! axis the vertex count equals the cell count (the last vertex wraps onto the first).
//! Cell corners are numbered `a + 2 b` with `a, b ∈ {0, 1}` selecting the lower/upper
//! end along x and y. Faces are numbered `0: -x, 1: +x, 2: -y, 3: +y`.

use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Left,
    Right,
    Bottom,
    Top,
}

impl BoundaryTag {
    pub fn from_face(face: usize) -> Self {
        match face {
            0 => BoundaryTag::Left,
            1 => BoundaryTag::Right,
            2 => BoundaryTag::Bottom,
            _ => BoundaryTag::Top,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceNeighbor {
    Cell(usize),
    Boundary(BoundaryTag),
}

/// Outward unit normal of local face `face`.
pub fn face_normal(face: usize) -> Point {
    match face {
        0 => [-1.0, 0.0],
        1 => [1.0, 0.0],
        2 => [0.0, -1.0],
        _ => [0.0, 1.0],
    }
}

/// Axis-aligned box of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry {
    pub dim: usize,
    pub origin: Point,
    pub size: Point,
}

impl CellGeometry {
    pub fn interval(a: f64, b: f64) -> Self {
        Self {
            dim: 1,
            origin: [a, 0.0],
            size: [b - a, 1.0],
        }
    }

    pub fn rectangle(lower: Point, upper: Point) -> Self {
        Self {
            dim: 2,
            origin: lower,
            size: [upper[0] - lower[0], upper[1] - lower[1]],
        }
    }

    pub fn measure(&self) -> f64 {
        if self.dim == 1 {
            self.size[0]
        } else {
            self.size[0] * self.size[1]
        }
    }

    /// Cell width in 1D, diagonal length in 2D.
    pub fn diameter(&self) -> f64 {
        if self.dim == 1 {
            self.size[0]
        } else {
            self.size[0].hypot(self.size[1])
        }
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        let mut x = [0.0; 2];
        for d in 0..self.dim {
            x[d] = self.origin[d] + self.size[d] * xi[d];
        }
        x
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let mut xi = [0.0; 2];
        for d in 0..self.dim {
            xi[d] = (x[d] - self.origin[d]) / self.size[d];
        }
        xi
    }

    pub fn contains(&self, x: Point, tol: f64) -> bool {
        let xi = self.to_reference(x);
        (0..self.dim).all(|d| xi[d] >= -tol && xi[d] <= 1.0 + tol)
    }

    pub fn corner(&self, corner: usize) -> Point {
        let xi = [(corner & 1) as f64, ((corner >> 1) & 1) as f64];
        self.to_physical(xi)
    }

    pub fn num_corners(&self) -> usize {
        1 << self.dim
    }
}

/// A cell of a vertex patch together with the local corner at which it touches the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchEntry {
    pub cell: usize,
    pub corner: usize,
}

#[derive(Debug, Clone)]
pub struct StructuredMesh {
    dim: usize,
    cells: [usize; 2],
    bounds: [[f64; 2]; 2],
    periodic: [bool; 2],
    vertices_per_axis: [usize; 2],
    vertex_coords: Vec<Point>,
    cell_vertices: Vec<[usize; 4]>,
    patches: Vec<Vec<PatchEntry>>,
    neighbors: Vec<[FaceNeighbor; 4]>,
}

/// Builds a uniform structured mesh. For `dim == 1` only the first entry of each
/// per-axis argument is read.
pub fn build_mesh(
    dim: usize,
    bounds: [[f64; 2]; 2],
    cells: [usize; 2],
    periodic: [bool; 2],
) -> Result<StructuredMesh> {
    if dim != 1 && dim != 2 {
        return Err(Error::Config(format!("mesh dimension must be 1 or 2, got {dim}")));
    }
    let mut n = [1usize; 2];
    let mut bnd = [[0.0, 1.0]; 2];
    let mut per = [false; 2];
    for d in 0..dim {
        if cells[d] == 0 {
            return Err(Error::Config(format!("cell count along axis {d} must be >= 1")));
        }
        if !(bounds[d][1] > bounds[d][0]) {
            return Err(Error::Config(format!("empty bounds along axis {d}: {:?}", bounds[d])));
        }
        if periodic[d] && cells[d] < 2 {
            return Err(Error::Config(format!(
                "periodic axis {d} needs at least 2 cells"
            )));
        }
        n[d] = cells[d];
        bnd[d] = bounds[d];
        per[d] = periodic[d];
    }
    let mut nv = [1usize; 2];
    for d in 0..dim {
        nv[d] = if per[d] { n[d] } else { n[d] + 1 };
    }
    let h = [
        (bnd[0][1] - bnd[0][0]) / n[0] as f64,
        (bnd[1][1] - bnd[1][0]) / n[1] as f64,
    ];

    let mut vertex_coords = Vec::with_capacity(nv[0] * nv[1]);
    for vy in 0..nv[1] {
        for vx in 0..nv[0] {
            let y = if dim == 2 { bnd[1][0] + vy as f64 * h[1] } else { 0.0 };
            vertex_coords.push([bnd[0][0] + vx as f64 * h[0], y]);
        }
    }

    let ncells = n[0] * n[1];
    let ncorners = 1 << dim;
    let mut cell_vertices = Vec::with_capacity(ncells);
    let mut patches: Vec<Vec<PatchEntry>> = vec![Vec::new(); nv[0] * nv[1]];
    for cy in 0..n[1] {
        for cx in 0..n[0] {
            let e = cx + n[0] * cy;
            let mut verts = [usize::MAX; 4];
            for (corner, v) in verts.iter_mut().enumerate().take(ncorners) {
                let a = corner & 1;
                let b = (corner >> 1) & 1;
                let vx = (cx + a) % nv[0];
                let vy = if dim == 2 { (cy + b) % nv[1] } else { 0 };
                *v = vx + nv[0] * vy;
                patches[*v].push(PatchEntry { cell: e, corner });
            }
            cell_vertices.push(verts);
        }
    }
    for p in &mut patches {
        p.sort_by_key(|entry| entry.cell);
    }

    let mut neighbors = Vec::with_capacity(ncells);
    for cy in 0..n[1] {
        for cx in 0..n[0] {
            let mut nb = [FaceNeighbor::Boundary(BoundaryTag::Left); 4];
            for (face, slot) in nb.iter_mut().enumerate().take(2 * dim) {
                let axis = face / 2;
                let up = face % 2 == 1;
                let (c, len) = if axis == 0 { (cx, n[0]) } else { (cy, n[1]) };
                let other = if up {
                    if c + 1 < len {
                        Some(c + 1)
                    } else if per[axis] {
                        Some(0)
                    } else {
                        None
                    }
                } else if c > 0 {
                    Some(c - 1)
                } else if per[axis] {
                    Some(len - 1)
                } else {
                    None
                };
                *slot = match other {
                    Some(o) => {
                        let idx = if axis == 0 { o + n[0] * cy } else { cx + n[0] * o };
                        FaceNeighbor::Cell(idx)
                    }
                    None => FaceNeighbor::Boundary(BoundaryTag::from_face(face)),
                };
            }
            neighbors.push(nb);
        }
    }

    Ok(StructuredMesh {
        dim,
        cells: n,
        bounds: bnd,
        periodic: per,
        vertices_per_axis: nv,
        vertex_coords,
        cell_vertices,
        patches,
        neighbors,
    })
}

impl StructuredMesh {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> [usize; 2] {
        self.cells
    }

    pub fn bounds(&self) -> [[f64; 2]; 2] {
        self.bounds
    }

    pub fn periodic(&self) -> [bool; 2] {
        self.periodic
    }

    pub fn num_cells(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_coords.len()
    }

    pub fn vertices_per_axis(&self) -> [usize; 2] {
        self.vertices_per_axis
    }

    pub fn num_faces_per_cell(&self) -> usize {
        2 * self.dim
    }

    pub fn num_corners(&self) -> usize {
        1 << self.dim
    }

    /// Cell size along each axis (uniform mesh).
    pub fn spacing(&self) -> Point {
        [
            (self.bounds[0][1] - self.bounds[0][0]) / self.cells[0] as f64,
            (self.bounds[1][1] - self.bounds[1][0]) / self.cells[1] as f64,
        ]
    }

    pub fn cell_coords(&self, e: usize) -> [usize; 2] {
        [e % self.cells[0], e / self.cells[0]]
    }

    pub fn cell_index(&self, cx: usize, cy: usize) -> usize {
        cx + self.cells[0] * cy
    }

    pub fn cell_geometry(&self, e: usize) -> CellGeometry {
        let [cx, cy] = self.cell_coords(e);
        let h = self.spacing();
        let origin = [
            self.bounds[0][0] + cx as f64 * h[0],
            if self.dim == 2 { self.bounds[1][0] + cy as f64 * h[1] } else { 0.0 },
        ];
        CellGeometry {
            dim: self.dim,
            origin,
            size: if self.dim == 2 { h } else { [h[0], 1.0] },
        }
    }

    /// Geometry shared by every cell of the uniform mesh, positioned at the first cell.
    pub fn reference_cell(&self) -> CellGeometry {
        self.cell_geometry(0)
    }

    pub fn diameter(&self, e: usize) -> f64 {
        self.cell_geometry(e).diameter()
    }

    pub fn measure(&self, e: usize) -> f64 {
        self.cell_geometry(e).measure()
    }

    pub fn vertex_coords(&self, v: usize) -> Result<Point> {
        self.vertex_coords
            .get(v)
            .copied()
            .ok_or_else(|| Error::Lookup(format!("vertex {v} out of range")))
    }

    /// Vertex ids of cell `e` in corner order.
    pub fn cell_vertices(&self, e: usize) -> &[usize] {
        &self.cell_vertices[e][..self.num_corners()]
    }

    /// Cells sharing vertex `v`, ascending.
    pub fn vertex_patch(&self, v: usize) -> Result<Vec<usize>> {
        Ok(self.patch_entries(v)?.iter().map(|p| p.cell).collect())
    }

    pub fn patch_entries(&self, v: usize) -> Result<&[PatchEntry]> {
        self.patches
            .get(v)
            .map(|p| p.as_slice())
            .ok_or_else(|| Error::Lookup(format!("vertex {v} out of range")))
    }

    pub fn face_neighbors(&self, e: usize) -> Result<&[FaceNeighbor]> {
        self.neighbors
            .get(e)
            .map(|nb| &nb[..2 * self.dim])
            .ok_or_else(|| Error::Lookup(format!("cell {e} out of range")))
    }
}
