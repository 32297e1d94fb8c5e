//! Legacy ASCII VTK snapshots with nodal `u`, `w` and `p`.

use std::fmt::Write as _;

use crate::fem::assembly::interpolate;
use crate::forms::{Block, Formulation, SystemTriplet};
use crate::mesh::{Mesh, RegionKind};
use crate::timeint::NewmarkState;

const CORNERS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Nodal pressure: `p` where the system has it, `π̇` elsewhere.
fn pressure_at(mesh: &Mesh, sys: &SystemTriplet, s: &NewmarkState, cell: usize, xi: [f64; 2]) -> Option<f64> {
    let pick = |b: Block, vec: &[f64]| {
        let space = sys.space(b)?;
        let r = sys.layout.range(b)?;
        interpolate(space, mesh, cell, xi, &vec[r]).map(|e| e.value[0])
    };
    match sys.formulation {
        Formulation::FullyMixed => pick(Block::Pi, &s.v),
        Formulation::Hybrid if mesh.region_kind(cell) == RegionKind::Pml => pick(Block::Pi, &s.v),
        _ => pick(Block::P, &s.x),
    }
}

pub fn snapshot(mesh: &Mesh, sys: &SystemTriplet, s: &NewmarkState) -> String {
    let nv = mesh.vertices.len();
    let mut u = vec![[0.0; 2]; nv];
    let mut w = vec![[0.0; 2]; nv];
    let mut p = vec![0.0; nv];
    let mut from_rd = vec![false; nv];
    let (ru, rw) = (sys.layout.range(Block::U).unwrap(), sys.layout.range(Block::W).unwrap());
    let (su, sw) = (sys.space(Block::U).unwrap(), sys.space(Block::W).unwrap());
    for (cell, tri) in mesh.triangles.iter().enumerate() {
        let rd = mesh.region_kind(cell) != RegionKind::Pml;
        for (k, &v) in tri.iter().enumerate() {
            if from_rd[v] && !rd {
                continue;
            }
            let xi = CORNERS[k];
            let eu = interpolate(su, mesh, cell, xi, &s.x[ru.clone()]).unwrap_or_default();
            let ew = interpolate(sw, mesh, cell, xi, &s.x[rw.clone()]).unwrap_or_default();
            u[v] = [eu.value[0], eu.value[1]];
            w[v] = [ew.value[0], ew.value[1]];
            p[v] = pressure_at(mesh, sys, s, cell, xi).unwrap_or(0.0);
            from_rd[v] = rd;
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0\nt = {:.16e}\nASCII\nDATASET UNSTRUCTURED_GRID", s.t);
    let _ = writeln!(out, "POINTS {nv} double");
    for v in &mesh.vertices {
        let _ = writeln!(out, "{:e} {:e} 0", v[0], v[1]);
    }
    let nc = mesh.num_cells();
    let _ = writeln!(out, "CELLS {nc} {}", 4 * nc);
    for t in &mesh.triangles {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(out, "CELL_TYPES {nc}");
    for _ in 0..nc {
        out.push_str("5\n");
    }
    let _ = writeln!(out, "CELL_DATA {nc}\nSCALARS region int 1\nLOOKUP_TABLE default");
    for c in 0..nc {
        let _ = writeln!(out, "{}", mesh.cell_region[c]);
    }
    let _ = writeln!(out, "POINT_DATA {nv}");
    for (name, field) in [("u", &u), ("w", &w)] {
        let _ = writeln!(out, "VECTORS {name} double");
        for x in field.iter() {
            let _ = writeln!(out, "{:e} {:e} 0", x[0], x[1]);
        }
    }
    let _ = writeln!(out, "SCALARS p double 1\nLOOKUP_TABLE default");
    for x in &p {
        let _ = writeln!(out, "{x:e}");
    }
    out
}
