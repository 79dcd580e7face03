//! CSV and legacy VTK writers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::element::SpaceKind;
use crate::solver::DiscreteSystem;
use crate::{Error, Point, Result};

use super::EocRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    CsvLine,
    CsvTable,
    VtkLegacy,
}

fn num(v: f64) -> String {
    format!("{v:.9e}")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

/// Component names used as CSV headers and VTK scalar names.
pub fn component_names(ncomp: usize) -> Vec<String> {
    match ncomp {
        1 => vec!["u".into()],
        3 => vec!["rho".into(), "m".into(), "E".into()],
        4 => vec!["rho".into(), "mx".into(), "my".into(), "E".into()],
        n => (0..n).map(|c| format!("u{c}")).collect(),
    }
}

/// `(x, values)` at every node of a 1D solution, sorted by `x`. CG nodes appear once,
/// DG interface nodes once per adjacent cell.
pub fn nodal_samples(system: &DiscreteSystem, u: &[f64]) -> Vec<(f64, Vec<f64>)> {
    let field = system.cell_field(u);
    let ncomp = system.num_components();
    let mut out = Vec::new();
    for e in 0..system.mesh.num_cells() {
        let geom = system.mesh.cell_geometry(e);
        for (i, xi) in system.ops.node_points.iter().enumerate() {
            if system.space() == SpaceKind::Continuous && e > 0 && i == 0 {
                continue;
            }
            let vals = (0..ncomp).map(|c| field.block(e, c)[i]).collect();
            out.push((geom.to_physical(*xi)[0], vals));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Header row `x,<names>` followed by one row per sample.
pub fn csv_line(names: &[String], samples: &[(f64, Vec<f64>)]) -> String {
    let mut s = String::from("x");
    for n in names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for (x, vals) in samples {
        s.push_str(&num(*x));
        for v in vals {
            s.push(',');
            s.push_str(&num(*v));
        }
        s.push('\n');
    }
    s
}

pub fn write_csv_line(path: &Path, system: &DiscreteSystem, u: &[f64]) -> Result<()> {
    if system.mesh.dim() != 1 {
        return Err(Error::Usage("csv-line output needs a 1D solution".into()));
    }
    let names = component_names(system.num_components());
    write_file(path, &csv_line(&names, &nodal_samples(system, u)))
}

/// EOC table: `cells,h,error,eoc`, blank EOC on the first row and for exact levels.
pub fn csv_table(rows: &[EocRow]) -> String {
    let mut s = String::from("cells,h,error,eoc\n");
    for r in rows {
        let eoc = r.eoc.map(|v| format!("{v:.2}")).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{}", r.cells, num(r.h), num(r.error), eoc);
    }
    s
}

pub fn write_csv_table(path: &Path, rows: &[EocRow]) -> Result<()> {
    write_file(path, &csv_table(rows))
}

/// Points, sub-cell quads and point values of a 2D solution. Each element is split
/// into `p × p` quads through its nodes; CG nodes are shared.
pub struct VtkGrid {
    pub points: Vec<Point>,
    pub quads: Vec<[usize; 4]>,
    /// `[component][point]`.
    pub values: Vec<Vec<f64>>,
}

pub fn vtk_grid(system: &DiscreteSystem, u: &[f64]) -> Result<VtkGrid> {
    if system.mesh.dim() != 2 {
        return Err(Error::Usage("vtk output needs a 2D solution".into()));
    }
    let field = system.cell_field(u);
    let ncomp = system.num_components();
    let p = system.degree();
    let n1 = p + 1;
    let [ex, ey] = system.mesh.cells_per_axis();
    let cg = system.space() == SpaceKind::Continuous;
    let gx = ex * p + 1;
    let npoints = if cg { gx * (ey * p + 1) } else { ex * ey * n1 * n1 };
    let mut points = vec![[0.0; 2]; npoints];
    let mut values = vec![vec![0.0; npoints]; ncomp];
    let mut quads = Vec::with_capacity(ex * ey * p * p);
    for e in 0..system.mesh.num_cells() {
        let [cx, cy] = system.mesh.cell_coords(e);
        let geom = system.mesh.cell_geometry(e);
        let index = |a: usize, b: usize| {
            if cg {
                (cy * p + b) * gx + cx * p + a
            } else {
                e * n1 * n1 + b * n1 + a
            }
        };
        for b in 0..n1 {
            for a in 0..n1 {
                let local = a + n1 * b;
                let g = index(a, b);
                points[g] = geom.to_physical(system.ops.node_points[local]);
                for (c, vals) in values.iter_mut().enumerate() {
                    vals[g] = field.block(e, c)[local];
                }
            }
        }
        for b in 0..p {
            for a in 0..p {
                quads.push([index(a, b), index(a + 1, b), index(a + 1, b + 1), index(a, b + 1)]);
            }
        }
    }
    Ok(VtkGrid { points, quads, values })
}

/// ASCII legacy VTK 3.0 unstructured grid with one scalar field per component.
pub fn vtk_legacy(grid: &VtkGrid, names: &[String], title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", grid.points.len());
    for x in &grid.points {
        let _ = writeln!(s, "{} {} 0", num(x[0]), num(x[1]));
    }
    let _ = writeln!(s, "CELLS {} {}", grid.quads.len(), 5 * grid.quads.len());
    for q in &grid.quads {
        let _ = writeln!(s, "4 {} {} {} {}", q[0], q[1], q[2], q[3]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", grid.quads.len());
    for _ in &grid.quads {
        s.push_str("9\n");
    }
    let _ = writeln!(s, "POINT_DATA {}", grid.points.len());
    for (name, vals) in names.iter().zip(&grid.values) {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in vals {
            s.push_str(&num(*v));
            s.push('\n');
        }
    }
    s
}

pub fn write_vtk(path: &Path, system: &DiscreteSystem, u: &[f64], title: &str) -> Result<()> {
    let grid = vtk_grid(system, u)?;
    let names = component_names(system.num_components());
    write_file(path, &vtk_legacy(&grid, &names, title))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;
    use crate::physics::ConservationLaw;
    use crate::solver::{BoundaryConditions, SchemeOptions};

    fn system(dim: usize, cells: [usize; 2], p: usize, space: SpaceKind) -> DiscreteSystem {
        let mesh = build_mesh(dim, [[0.0, 1.0], [0.0, 1.0]], cells, [cells[0] > 1, dim == 2]).unwrap();
        DiscreteSystem::new(
            mesh,
            p,
            space,
            ConservationLaw::constant_advection([1.0, 0.0]),
            if cells[0] > 1 {
                BoundaryConditions::periodic()
            } else {
                BoundaryConditions::uniform(crate::solver::BoundaryCondition::Outflow)
            },
            SchemeOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(csv_line(&["u".to_string()], &[]), "x,u\n");
        assert_eq!(csv_table(&[]), "cells,h,error,eoc\n");
    }

    #[test]
    fn three_node_line_is_sorted() {
        let s = system(1, [1, 1], 2, SpaceKind::Discontinuous);
        let u = s.initialize(&|x| [x[0], 0.0, 0.0, 0.0], crate::solver::Initialization::Interpolation).unwrap();
        let samples = nodal_samples(&s, &u);
        assert_eq!(samples.len(), 3);
        let text = csv_line(&component_names(1), &samples);
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 4);
        let xs: Vec<f64> = rows[1..].iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(rows[2], "5.000000000e-1,5.000000000e-1");
    }

    #[test]
    fn cg_line_has_one_row_per_global_node() {
        let s = system(1, [4, 1], 2, SpaceKind::Continuous);
        let u = vec![0.0; s.len()];
        assert_eq!(nodal_samples(&s, &u).len(), 9);
    }

    #[test]
    fn vtk_counts_for_q1_two_by_two() {
        let s = system(2, [2, 2], 1, SpaceKind::Continuous);
        let u = s.initialize(&|x| [x[0] + x[1], 0.0, 0.0, 0.0], crate::solver::Initialization::Interpolation).unwrap();
        let grid = vtk_grid(&s, &u).unwrap();
        assert_eq!(grid.points.len(), 9);
        assert_eq!(grid.quads.len(), 4);
        let text = vtk_legacy(&grid, &component_names(1), "t");
        assert!(text.starts_with("# vtk DataFile Version 3.0"));
        assert!(text.contains("POINTS 9 double"));
        assert!(text.contains("CELLS 4 20"));
        // the periodic image at x = 1 carries the value at x = 0 for CG
        let corner = grid.points.iter().position(|x| x[0] == 1.0 && x[1] == 1.0).unwrap();
        assert_eq!(grid.values[0][corner], 0.0);
        let dg = system(2, [2, 2], 2, SpaceKind::Discontinuous);
        let grid = vtk_grid(&dg, &vec![0.0; dg.len()]).unwrap();
        assert_eq!((grid.points.len(), grid.quads.len()), (36, 16));
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("f");
        fs::write(&file, "x").unwrap();
        let err = write_csv_table(&file.join("sub/table.csv"), &[]).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }
}
