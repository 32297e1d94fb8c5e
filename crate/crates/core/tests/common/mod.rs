#![allow(dead_code)]

use std::collections::BTreeMap;

use poropml::forms::CellMaterials;
use poropml::materials::MaterialSet;
use poropml::mesh::{BoundaryLabel, Mesh, RegionInfo, RegionKind};
use poropml::presets::{Geometry, Layering, MeshVariant};

/// A preset-style geometry small enough for debug-speed tests.
pub fn tiny_geometry() -> Geometry {
    Geometry {
        half_width: 6.0,
        depth: 6.0,
        pml_width: 4.0,
        ext_half_width: 14.0,
        ext_depth: 14.0,
        strip_half: 0.5,
        h: 2.0,
        growth: 2.0,
    }
}

pub fn tiny_mesh(variant: MeshVariant, layering: &Layering) -> Mesh {
    let (raw, dict) = tiny_geometry().mesh(variant, layering);
    Mesh::from_raw(&raw, &dict).unwrap()
}

pub fn set2() -> Layering {
    Layering::Uniform("set2".into())
}

pub fn materials(mesh: &Mesh, layering: &Layering) -> CellMaterials {
    let sets: BTreeMap<String, MaterialSet> = layering
        .materials()
        .into_iter()
        .map(|m| {
            let s = MaterialSet::preset(&m).unwrap();
            (m, s)
        })
        .collect();
    CellMaterials::new(mesh, &sets).unwrap()
}

/// Two triangles on the unit square, all cells of one kind, all edges
/// carrying `label`.
pub fn two_triangles(kind: RegionKind, label: BoundaryLabel) -> Mesh {
    let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let triangles = vec![[0, 1, 2], [0, 2, 3]];
    let mut regions = BTreeMap::new();
    regions.insert(1, RegionInfo { kind, material: "set1".into() });
    let lines: Vec<([usize; 2], BoundaryLabel)> = [[0, 1], [1, 2], [2, 3], [3, 0]].into_iter().map(|e| (e, label)).collect();
    Mesh::build(vertices, triangles, vec![1, 1], regions, &lines).unwrap()
}

/// `n × n` grid on `[0, 1]²` with interior vertices jittered
/// deterministically, every boundary edge labelled `label`.
pub fn jittered_square(n: usize, label: BoundaryLabel) -> Mesh {
    let h = 1.0 / n as f64;
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let (mut x, mut y) = (i as f64 * h, j as f64 * h);
            if i > 0 && i < n && j > 0 && j < n {
                let s = (i * 7 + j * 13) as f64;
                x += 0.2 * h * (s * 0.37).sin();
                y += 0.2 * h * (s * 0.71).cos();
            }
            vertices.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut lines = Vec::new();
    for k in 0..n {
        lines.push(([id(k, 0), id(k + 1, 0)], label));
        lines.push(([id(n, k), id(n, k + 1)], label));
        lines.push(([id(k + 1, n), id(k, n)], label));
        lines.push(([id(0, k + 1), id(0, k)], label));
    }
    let mut regions = BTreeMap::new();
    regions.insert(1, RegionInfo { kind: RegionKind::Rd, material: "set1".into() });
    let nc = triangles.len();
    Mesh::build(vertices, triangles, vec![1; nc], regions, &lines).unwrap()
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &x)| r.iter().copied().chain([x]).collect()).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
        m.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..=n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (m[k][n] - s) / m[k][k];
    }
    x
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
pub fn min_eigenvalue(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        let diag: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum();
        if off <= 1e-30 * diag {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).fold(f64::INFINITY, f64::min)
}

use poropml::config::StretchingSettings;
use poropml::forms::{Block, SystemTriplet};
use poropml::stretching::{StretchingConfig, StretchingMode};
use poropml::timeint::{Newmark, NewmarkState};

pub fn stretching(mesh: &Mesh, mats: &CellMaterials, g: &Geometry, mode: StretchingMode, alpha0: f64, beta0: Option<f64>, p: f64) -> StretchingConfig {
    StretchingSettings {
        rd_box: [[-g.half_width, g.half_width], [-g.depth, 0.0]],
        mode,
        alpha0: Some(alpha0),
        beta0,
        p_yx: p,
        p_xy: p,
        ..StretchingSettings::default()
    }
    .resolve(mesh, mats)
    .unwrap()
}

/// Nodal pressure over all vertices: `p` where the system carries it,
/// `π̇` elsewhere.
pub fn nodal_pressure(mesh: &Mesh, sys: &SystemTriplet, s: &NewmarkState) -> Vec<f64> {
    let mut out = vec![0.0; mesh.vertices.len()];
    let mut set = vec![false; mesh.vertices.len()];
    for (block, vec) in [(Block::P, &s.x), (Block::Pi, &s.v)] {
        let (Some(space), Some(r)) = (sys.space(block), sys.layout.range(block)) else { continue };
        for c in 0..mesh.num_cells() {
            let Some(dofs) = space.element_dofs(c) else { continue };
            for (k, &v) in mesh.triangles[c].iter().enumerate() {
                if !set[v] {
                    out[v] = vec[r.start + dofs[k]];
                    set[v] = true;
                }
            }
        }
    }
    out
}

/// `(u, w, nodal pressure)` sampled after every step.
pub fn trajectory(mesh: &Mesh, sys: &SystemTriplet, dt: f64, steps: usize) -> Vec<[Vec<f64>; 3]> {
    let mut nm = Newmark::new(&sys.m, &sys.c, &sys.k, dt).unwrap();
    let mut s = NewmarkState::zeros(sys.ndofs());
    let mut f = vec![0.0; sys.ndofs()];
    let (ru, rw) = (sys.layout.range(Block::U).unwrap(), sys.layout.range(Block::W).unwrap());
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        sys.load_into(s.t + dt, &mut f);
        nm.step(&mut s, &f);
        out.push([s.x[ru.clone()].to_vec(), s.x[rw.clone()].to_vec(), nodal_pressure(mesh, sys, &s)]);
    }
    out
}

/// `max_t ‖a(t) − b(t)‖ / max_t ‖b(t)‖` for field `k`.
pub fn max_relative_difference(a: &[[Vec<f64>; 3]], b: &[[Vec<f64>; 3]], k: usize) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = b.iter().map(|s| norm(&s[k])).fold(0.0, f64::max);
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d: Vec<f64> = x[k].iter().zip(&y[k]).map(|(p, q)| p - q).collect();
            norm(&d)
        })
        .fold(0.0, f64::max)
        / scale
}

use poropml::fem::assembly::{assemble_matrix, interpolate};
use poropml::fem::{build_space, FunctionSpace, SpaceKind, Support};
use poropml::materials::ElasticTensor;

pub fn elastic() -> ElasticTensor {
    ElasticTensor { lambda: 2.0, mu: 1.0 }
}

/// Global node coordinates of a P2 vector space, indexed by `dof / 2`.
pub fn p2_nodes(mesh: &Mesh, space: &FunctionSpace) -> Vec<[f64; 2]> {
    let mut nodes = vec![[f64::NAN; 2]; space.ndofs / 2];
    for c in 0..mesh.num_cells() {
        let v = mesh.triangles[c].map(|i| mesh.vertices[i]);
        let mid = |a: usize, b: usize| [0.5 * (v[a][0] + v[b][0]), 0.5 * (v[a][1] + v[b][1])];
        let local = [v[0], v[1], v[2], mid(0, 1), mid(1, 2), mid(2, 0)];
        let dofs = space.element_dofs(c).unwrap();
        for (k, x) in local.iter().enumerate() {
            nodes[dofs[2 * k] / 2] = *x;
        }
    }
    nodes
}

/// Elasticity on a mesh of `[0, 1]²` with the boundary nodes set from a
/// linear displacement. Returns the largest interior nodal error and the
/// largest strain error at sample points.
pub fn p2_patch_errors(mesh: &Mesh) -> (f64, f64) {
    let space = build_space(mesh, SpaceKind::P2Vector, Support::All, &[]).unwrap();
    let c = elastic();
    let k = assemble_matrix(mesh, &space, &space, |_, a, b| {
        let s = c.apply(a.strain());
        let e = b.strain();
        s[0] * e[0] + s[1] * e[1] + 2.0 * s[2] * e[2]
    })
    .unwrap()
    .to_dense();
    let grad = [[0.3, -0.7], [1.1, 0.4]];
    let exact = |p: [f64; 2], comp: usize| 0.25 + grad[comp][0] * p[0] + grad[comp][1] * p[1];
    let nodes = p2_nodes(mesh, &space);
    let on_boundary = |p: [f64; 2]| p.iter().any(|&x| x.abs() < 1e-12 || (x - 1.0).abs() < 1e-12);
    let boundary: Vec<bool> = (0..space.ndofs).map(|d| on_boundary(nodes[d / 2])).collect();
    let values: Vec<f64> = (0..space.ndofs).map(|d| exact(nodes[d / 2], d % 2)).collect();
    let interior: Vec<usize> = (0..space.ndofs).filter(|&d| !boundary[d]).collect();
    assert!(!interior.is_empty());
    let a: Vec<Vec<f64>> = interior.iter().map(|&i| interior.iter().map(|&j| k[i][j]).collect()).collect();
    let b: Vec<f64> = interior
        .iter()
        .map(|&i| -(0..space.ndofs).filter(|&j| boundary[j]).map(|j| k[i][j] * values[j]).sum::<f64>())
        .collect();
    let x = dense_solve(&a, &b);
    let mut solution = values.clone();
    let mut nodal = 0.0f64;
    for (&d, &v) in interior.iter().zip(&x) {
        nodal = nodal.max((v - values[d]).abs());
        solution[d] = v;
    }
    let strain = [grad[0][0], grad[1][1], 0.5 * (grad[0][1] + grad[1][0])];
    let mut worst = 0.0f64;
    for cell in 0..mesh.num_cells() {
        for xi in [[1.0 / 3.0, 1.0 / 3.0], [0.1, 0.7], [0.6, 0.2]] {
            let e = interpolate(&space, mesh, cell, xi, &solution).unwrap().strain();
            for k in 0..3 {
                worst = worst.max((e[k] - strain[k]).abs());
            }
        }
    }
    (nodal, worst)
}

/// Smallest eigenvalue of the P1, P2-vector and DG tensor mass matrices.
pub fn mass_min_eigenvalues(mesh: &Mesh) -> Vec<(SpaceKind, usize, f64)> {
    [SpaceKind::P1Scalar, SpaceKind::P2Vector, SpaceKind::Dg1SymTensor]
        .into_iter()
        .map(|kind| {
            let space = build_space(mesh, kind, Support::All, &[]).unwrap();
            let m = assemble_matrix(mesh, &space, &space, |_, a, b| a.value.iter().zip(&b.value).map(|(x, y)| x * y).sum()).unwrap();
            (kind, space.ndofs, min_eigenvalue(&m.to_dense()))
        })
        .collect()
}
