use crate::element::{ElementField, ReferenceElement, SpaceKind};
use crate::mesh::StructuredMesh;

/// Local-to-global numbering of nodal degrees of freedom.
///
/// Global vectors are laid out `[component][dof]` for CG and `[cell][component][node]`
/// for DG (identical to [`ElementField`]).
#[derive(Debug, Clone)]
pub struct DofMap {
    space: SpaceKind,
    ncells: usize,
    nodes_per_cell: usize,
    ndofs: usize,
    cell_dofs: Vec<usize>,
    /// For every global dof: the lowest-index cell containing it and the local node there.
    owner: Vec<(usize, usize)>,
}

impl DofMap {
    pub fn new(mesh: &StructuredMesh, elem: &ReferenceElement, space: SpaceKind) -> Self {
        let ncells = mesh.num_cells();
        let nd = elem.ndofs();
        let n = elem.nodes_per_axis();
        let p = elem.degree();
        let dim = mesh.dim();
        let cells = mesh.cells_per_axis();
        let periodic = mesh.periodic();
        let mut cell_dofs = Vec::with_capacity(ncells * nd);
        let ndofs;
        match space {
            SpaceKind::Discontinuous => {
                ndofs = ncells * nd;
                cell_dofs.extend(0..ndofs);
            }
            SpaceKind::Continuous => {
                let mut per_axis = [1usize; 2];
                for d in 0..dim {
                    per_axis[d] = if periodic[d] { cells[d] * p } else { cells[d] * p + 1 };
                }
                ndofs = per_axis[0] * per_axis[1];
                for e in 0..ncells {
                    let [cx, cy] = mesh.cell_coords(e);
                    for local in 0..nd {
                        let (a, b) = (local % n, local / n);
                        let gx = (cx * p + a) % per_axis[0];
                        let gy = if dim == 2 { (cy * p + b) % per_axis[1] } else { 0 };
                        cell_dofs.push(gx + per_axis[0] * gy);
                    }
                }
            }
        }
        let mut owner = vec![(usize::MAX, 0); ndofs];
        for e in (0..ncells).rev() {
            for local in 0..nd {
                owner[cell_dofs[e * nd + local]] = (e, local);
            }
        }
        Self {
            space,
            ncells,
            nodes_per_cell: nd,
            ndofs,
            cell_dofs,
            owner,
        }
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    /// Degrees of freedom per component.
    pub fn num_dofs(&self) -> usize {
        self.ndofs
    }

    pub fn num_cells(&self) -> usize {
        self.ncells
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.nodes_per_cell
    }

    pub fn cell_dofs(&self, e: usize) -> &[usize] {
        &self.cell_dofs[e * self.nodes_per_cell..(e + 1) * self.nodes_per_cell]
    }

    /// Lowest-index cell containing global dof `g`, with the local node index.
    pub fn owner(&self, g: usize) -> (usize, usize) {
        self.owner[g]
    }

    /// Index of component `c` of dof `g` (CG layout) or of node `local` of cell `e` (DG).
    pub fn global_index(&self, e: usize, c: usize, local: usize, ncomp: usize) -> usize {
        match self.space {
            SpaceKind::Continuous => c * self.ndofs + self.cell_dofs[e * self.nodes_per_cell + local],
            SpaceKind::Discontinuous => (e * ncomp + c) * self.nodes_per_cell + local,
        }
    }

    pub fn gather(&self, global: &[f64], ncomp: usize) -> ElementField {
        match self.space {
            SpaceKind::Discontinuous => ElementField::from_vec(self.ncells, ncomp, self.nodes_per_cell, global.to_vec()),
            SpaceKind::Continuous => {
                let mut f = ElementField::zeros(self.ncells, ncomp, self.nodes_per_cell);
                for e in 0..self.ncells {
                    let dofs = self.cell_dofs(e);
                    for c in 0..ncomp {
                        let base = c * self.ndofs;
                        for (v, &g) in f.block_mut(e, c).iter_mut().zip(dofs) {
                            *v = global[base + g];
                        }
                    }
                }
                f
            }
        }
    }

    /// Adds cell contributions into a global vector, cells in ascending order.
    pub fn scatter_add(&self, local: &ElementField, global: &mut [f64]) {
        let ncomp = local.num_components();
        match self.space {
            SpaceKind::Discontinuous => {
                for (g, v) in global.iter_mut().zip(local.as_slice()) {
                    *g += v;
                }
            }
            SpaceKind::Continuous => {
                for e in 0..self.ncells {
                    let dofs = self.cell_dofs(e);
                    for c in 0..ncomp {
                        let base = c * self.ndofs;
                        for (v, &g) in local.block(e, c).iter().zip(dofs) {
                            global[base + g] += v;
                        }
                    }
                }
            }
        }
    }

    /// Global vector from per-cell values; shared CG dofs take the owner cell's value.
    pub fn from_cells(&self, local: &ElementField) -> Vec<f64> {
        let ncomp = local.num_components();
        match self.space {
            SpaceKind::Discontinuous => local.as_slice().to_vec(),
            SpaceKind::Continuous => {
                let mut out = vec![0.0; ncomp * self.ndofs];
                for c in 0..ncomp {
                    for g in 0..self.ndofs {
                        let (e, l) = self.owner[g];
                        out[c * self.ndofs + g] = local.block(e, c)[l];
                    }
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;

    #[test]
    fn cg_counts_and_sharing() {
        let mesh = build_mesh(2, [[0.0, 1.0], [0.0, 1.0]], [3, 2], [false, false]).unwrap();
        let elem = ReferenceElement::new(2, 2).unwrap();
        let map = DofMap::new(&mesh, &elem, SpaceKind::Continuous);
        assert_eq!(map.num_dofs(), 7 * 5);
        let periodic = build_mesh(2, [[0.0, 1.0], [0.0, 1.0]], [3, 2], [true, true]).unwrap();
        let map_p = DofMap::new(&periodic, &elem, SpaceKind::Continuous);
        assert_eq!(map_p.num_dofs(), 6 * 4);
        // right face of cell 0 equals left face of cell 1
        for b in 0..3 {
            assert_eq!(map.cell_dofs(0)[2 + 3 * b], map.cell_dofs(1)[3 * b]);
        }
        let dg = DofMap::new(&mesh, &elem, SpaceKind::Discontinuous);
        assert_eq!(dg.num_dofs(), 6 * 9);
        for g in 0..map.num_dofs() {
            let (e, l) = map.owner(g);
            assert_eq!(map.cell_dofs(e)[l], g);
        }
    }

    #[test]
    fn gather_scatter_round_trip() {
        let mesh = build_mesh(1, [[0.0, 1.0], [0.0, 1.0]], [4, 1], [true, false]).unwrap();
        let elem = ReferenceElement::new(1, 3).unwrap();
        let map = DofMap::new(&mesh, &elem, SpaceKind::Continuous);
        assert_eq!(map.num_dofs(), 12);
        let global: Vec<f64> = (0..24).map(|i| i as f64).collect();
        let f = map.gather(&global, 2);
        assert_eq!(map.from_cells(&f), global);
        let mut acc = vec![0.0; 24];
        map.scatter_add(&ElementField::from_vec(4, 2, 4, vec![1.0; 32]), &mut acc);
        // vertex dofs are shared by two cells
        assert_eq!(acc[0], 2.0);
        assert_eq!(acc[1], 1.0);
        assert_eq!(acc[12 + 3], 2.0);
    }
}
