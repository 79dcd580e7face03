/// Per-cell nodal coefficient blocks, laid out `[cell][component][node]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementField {
    ncells: usize,
    ncomp: usize,
    nodes: usize,
    data: Vec<f64>,
}

impl ElementField {
    pub fn zeros(ncells: usize, ncomp: usize, nodes: usize) -> Self {
        Self {
            ncells,
            ncomp,
            nodes,
            data: vec![0.0; ncells * ncomp * nodes],
        }
    }

    pub fn from_vec(ncells: usize, ncomp: usize, nodes: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), ncells * ncomp * nodes);
        Self {
            ncells,
            ncomp,
            nodes,
            data,
        }
    }

    /// Scalar field built from one coefficient block per cell.
    pub fn from_blocks(blocks: &[Vec<f64>]) -> Self {
        let nodes = blocks.first().map_or(0, |b| b.len());
        let data = blocks.iter().flat_map(|b| b.iter().copied()).collect();
        Self::from_vec(blocks.len(), 1, nodes, data)
    }

    pub fn num_cells(&self) -> usize {
        self.ncells
    }

    pub fn num_components(&self) -> usize {
        self.ncomp
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.nodes
    }

    pub fn block(&self, cell: usize, comp: usize) -> &[f64] {
        let start = (cell * self.ncomp + comp) * self.nodes;
        &self.data[start..start + self.nodes]
    }

    pub fn block_mut(&mut self, cell: usize, comp: usize) -> &mut [f64] {
        let start = (cell * self.ncomp + comp) * self.nodes;
        &mut self.data[start..start + self.nodes]
    }

    /// All components of one cell, `[component][node]`.
    pub fn cell(&self, cell: usize) -> &[f64] {
        let len = self.ncomp * self.nodes;
        &self.data[cell * len..(cell + 1) * len]
    }

    pub fn cell_mut(&mut self, cell: usize) -> &mut [f64] {
        let len = self.ncomp * self.nodes;
        &mut self.data[cell * len..(cell + 1) * len]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Copy of a single component as a scalar field.
    pub fn component(&self, comp: usize) -> ElementField {
        let mut out = ElementField::zeros(self.ncells, 1, self.nodes);
        for e in 0..self.ncells {
            out.block_mut(e, 0).copy_from_slice(self.block(e, comp));
        }
        out
    }
}
