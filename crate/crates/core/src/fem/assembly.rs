//! Quadrature-driven assembly of bilinear and linear forms.
//!
//! A form is given as two closures: `prepare` turns a quadrature point into
//! whatever coefficient data the integrand needs (evaluated once per
//! point), and `form` integrates one (trial, test) basis pair, returning
//! its contributions to the mass, damping and stiffness matrices.

use super::basis::{p1_ref_grads, p1_values, p2_ref_grads, p2_values, CellGeometry};
use super::quadrature::{edge_gauss2, triangle_degree4, QuadratureRule};
use super::space::{FunctionSpace, SpaceKind};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::sparse::{SparseMatrix, TripletList};

/// One basis function at a point. Scalars use component 0, vectors
/// components 0–1, tensors are stored row-major `[xx, xy, yx, yy]`.
/// `grad[c]` is the physical gradient of component `c`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BasisEval {
    pub value: [f64; 4],
    pub grad: [[f64; 2]; 4],
}

impl BasisEval {
    pub fn scalar(&self) -> f64 {
        self.value[0]
    }

    pub fn vector(&self) -> [f64; 2] {
        [self.value[0], self.value[1]]
    }

    pub fn div(&self) -> f64 {
        self.grad[0][0] + self.grad[1][1]
    }

    /// Symmetric gradient `[e_xx, e_yy, e_xy]`.
    pub fn strain(&self) -> [f64; 3] {
        [
            self.grad[0][0],
            self.grad[1][1],
            0.5 * (self.grad[0][1] + self.grad[1][0]),
        ]
    }

    /// `[s_xx, s_yy, s_xy]` of a symmetric tensor basis function.
    pub fn sym(&self) -> [f64; 3] {
        [self.value[0], self.value[3], self.value[1]]
    }
}

/// Where a form is being integrated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Qp {
    pub cell: usize,
    /// Index of the point within the quadrature rule.
    pub index: usize,
    pub x: [f64; 2],
    /// Quadrature weight times the measure Jacobian.
    pub dx: f64,
    /// Outward normal of the cell on facets, zero inside cells.
    pub normal: [f64; 2],
}

/// Mass, damping and stiffness triplets of one system.
#[derive(Clone, Debug)]
pub struct Accumulator {
    pub m: TripletList,
    pub c: TripletList,
    pub k: TripletList,
}

impl Accumulator {
    pub fn new(n: usize) -> Self {
        Accumulator {
            m: TripletList::new(n, n),
            c: TripletList::new(n, n),
            k: TripletList::new(n, n),
        }
    }

    pub fn rect(nrows: usize, ncols: usize) -> Self {
        Accumulator {
            m: TripletList::new(nrows, ncols),
            c: TripletList::new(nrows, ncols),
            k: TripletList::new(nrows, ncols),
        }
    }
}

/// Row offset of the test block and column offset of the trial block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Offsets {
    pub row: usize,
    pub col: usize,
}

/// Evaluates every local basis function of `space` at reference point `xi`
/// of a cell.
pub fn eval_cell(space: &FunctionSpace, geom: &CellGeometry, xi: [f64; 2], out: &mut Vec<BasisEval>) {
    out.clear();
    match space.kind {
        SpaceKind::P1Scalar => {
            let v = p1_values(xi);
            let g = p1_ref_grads();
            for a in 0..3 {
                let mut b = BasisEval::default();
                b.value[0] = v[a];
                b.grad[0] = geom.grad(g[a]);
                out.push(b);
            }
        }
        SpaceKind::P2Vector => {
            let v = p2_values(xi);
            let g = p2_ref_grads(xi);
            for a in 0..6 {
                let grad = geom.grad(g[a]);
                for comp in 0..2 {
                    let mut b = BasisEval::default();
                    b.value[comp] = v[a];
                    b.grad[comp] = grad;
                    out.push(b);
                }
            }
        }
        SpaceKind::Dg1SymTensor => {
            let v = p1_values(xi);
            for va in v {
                let mut xx = BasisEval::default();
                xx.value[0] = va;
                let mut yy = BasisEval::default();
                yy.value[3] = va;
                let mut xy = BasisEval::default();
                xy.value[1] = va;
                xy.value[2] = va;
                out.extend([xx, yy, xy]);
            }
        }
        SpaceKind::P1Trace => panic!("trace spaces are evaluated on facets"),
    }
}

/// Evaluates `space` at parameter `s ∈ [0,1]` along edge `e` (from its
/// first to its second vertex), seen from `cell`.
pub fn eval_facet(space: &FunctionSpace, mesh: &Mesh, e: usize, cell: usize, s: f64, out: &mut Vec<BasisEval>) {
    if space.kind == SpaceKind::P1Trace {
        out.clear();
        for v in [1.0 - s, s] {
            let mut b = BasisEval::default();
            b.value[0] = v;
            out.push(b);
        }
        return;
    }
    let geom = CellGeometry::of_cell(mesh, cell);
    let xi = geom.inverse_map(facet_point(mesh, e, s));
    eval_cell(space, &geom, xi, out);
}

fn facet_point(mesh: &Mesh, e: usize, s: f64) -> [f64; 2] {
    let [a, b] = mesh.edges[e].vertices;
    let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
    [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])]
}

fn element_of(space: &FunctionSpace, e: usize, cell: usize) -> usize {
    if space.kind == SpaceKind::P1Trace {
        e
    } else {
        cell
    }
}

/// Cells where both spaces are defined.
pub fn common_cells(mesh: &Mesh, a: &FunctionSpace, b: &FunctionSpace) -> Vec<usize> {
    (0..mesh.num_cells())
        .filter(|&c| a.in_support(c) && b.in_support(c))
        .collect()
}

struct Local {
    rows: usize,
    cols: usize,
    vals: [Vec<f64>; 3],
}

impl Local {
    fn new(rows: usize, cols: usize) -> Self {
        Local {
            rows,
            cols,
            vals: [vec![0.0; rows * cols], vec![0.0; rows * cols], vec![0.0; rows * cols]],
        }
    }

    fn clear(&mut self) {
        for v in &mut self.vals {
            v.fill(0.0);
        }
    }

    fn add<D>(&mut self, dx: f64, data: &D, trial: &[BasisEval], test: &[BasisEval], form: &impl Fn(&D, &BasisEval, &BasisEval) -> [f64; 3]) {
        for (i, te) in test.iter().enumerate() {
            for (j, tr) in trial.iter().enumerate() {
                let r = form(data, tr, te);
                let k = i * self.cols + j;
                self.vals[0][k] += dx * r[0];
                self.vals[1][k] += dx * r[1];
                self.vals[2][k] += dx * r[2];
            }
        }
    }

    fn scatter(&self, rows: &[usize], cols: &[usize], off: Offsets, acc: &mut Accumulator) {
        let targets = [&mut acc.m, &mut acc.c, &mut acc.k];
        for (vals, t) in self.vals.iter().zip(targets) {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    let v = vals[i * self.cols + j];
                    if v != 0.0 {
                        t.push(off.row + rows[i], off.col + cols[j], v);
                    }
                }
            }
        }
    }
}

fn support_error(what: &str, element: usize) -> Error {
    Error::Assembly(format!("{what} space is not defined on element {element}"))
}

/// Integrates `form` over `cells` with the degree-4 triangle rule.
#[allow(clippy::too_many_arguments)]
pub fn assemble_cells<D>(
    mesh: &Mesh,
    cells: &[usize],
    trial: &FunctionSpace,
    test: &FunctionSpace,
    off: Offsets,
    acc: &mut Accumulator,
    prepare: impl Fn(&Qp) -> D,
    form: impl Fn(&D, &BasisEval, &BasisEval) -> [f64; 3],
) -> Result<()> {
    let rule = triangle_degree4();
    let mut local = Local::new(test.local, trial.local);
    let (mut tr, mut te) = (Vec::new(), Vec::new());
    for &c in cells {
        let rows = test.element_dofs(c).ok_or_else(|| support_error("test", c))?;
        let cols = trial.element_dofs(c).ok_or_else(|| support_error("trial", c))?;
        let geom = CellGeometry::of_cell(mesh, c);
        local.clear();
        for (index, (xi, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let qp = Qp {
                cell: c,
                index,
                x: geom.map(*xi),
                dx: w * geom.det.abs(),
                normal: [0.0; 2],
            };
            let data = prepare(&qp);
            eval_cell(trial, &geom, *xi, &mut tr);
            eval_cell(test, &geom, *xi, &mut te);
            local.add(qp.dx, &data, &tr, &te, &form);
        }
        local.scatter(rows, cols, off, acc);
    }
    Ok(())
}

/// Integrates `form` over facets `(edge, cell)`, volume spaces being
/// evaluated from `cell`, with the two-point Gauss rule.
#[allow(clippy::too_many_arguments)]
pub fn assemble_facets<D>(
    mesh: &Mesh,
    facets: &[(usize, usize)],
    trial: &FunctionSpace,
    test: &FunctionSpace,
    off: Offsets,
    acc: &mut Accumulator,
    prepare: impl Fn(&Qp) -> D,
    form: impl Fn(&D, &BasisEval, &BasisEval) -> [f64; 3],
) -> Result<()> {
    let rule = edge_gauss2();
    let mut local = Local::new(test.local, trial.local);
    let (mut tr, mut te) = (Vec::new(), Vec::new());
    for &(e, c) in facets {
        let (er, ec) = (element_of(test, e, c), element_of(trial, e, c));
        let rows = test.element_dofs(er).ok_or_else(|| support_error("test", er))?;
        let cols = trial.element_dofs(ec).ok_or_else(|| support_error("trial", ec))?;
        let len = mesh.edge_length(e);
        let normal = mesh.facet_normal(e, c);
        local.clear();
        for (index, (p, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let qp = Qp {
                cell: c,
                index,
                x: facet_point(mesh, e, p[0]),
                dx: w * len,
                normal,
            };
            let data = prepare(&qp);
            eval_facet(trial, mesh, e, c, p[0], &mut tr);
            eval_facet(test, mesh, e, c, p[0], &mut te);
            local.add(qp.dx, &data, &tr, &te, &form);
        }
        local.scatter(rows, cols, off, acc);
    }
    Ok(())
}

/// Integrates a linear form over facets into `out[offset + dof]`.
pub fn assemble_facet_vector<D>(
    mesh: &Mesh,
    facets: &[(usize, usize)],
    test: &FunctionSpace,
    offset: usize,
    out: &mut [f64],
    prepare: impl Fn(&Qp) -> D,
    form: impl Fn(&D, &BasisEval) -> f64,
) -> Result<()> {
    let rule = edge_gauss2();
    let mut te = Vec::new();
    for &(e, c) in facets {
        let el = element_of(test, e, c);
        let rows = test.element_dofs(el).ok_or_else(|| support_error("test", el))?;
        let len = mesh.edge_length(e);
        let normal = mesh.facet_normal(e, c);
        for (index, (p, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let qp = Qp {
                cell: c,
                index,
                x: facet_point(mesh, e, p[0]),
                dx: w * len,
                normal,
            };
            let data = prepare(&qp);
            eval_facet(test, mesh, e, c, p[0], &mut te);
            for (i, b) in te.iter().enumerate() {
                out[offset + rows[i]] += qp.dx * form(&data, b);
            }
        }
    }
    Ok(())
}

/// Integrates a linear form over cells into `out[offset + dof]`.
pub fn assemble_cell_vector<D>(
    mesh: &Mesh,
    cells: &[usize],
    test: &FunctionSpace,
    offset: usize,
    out: &mut [f64],
    prepare: impl Fn(&Qp) -> D,
    form: impl Fn(&D, &BasisEval) -> f64,
) -> Result<()> {
    let rule: QuadratureRule = triangle_degree4();
    let mut te = Vec::new();
    for &c in cells {
        let rows = test.element_dofs(c).ok_or_else(|| support_error("test", c))?;
        let geom = CellGeometry::of_cell(mesh, c);
        for (index, (xi, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let qp = Qp {
                cell: c,
                index,
                x: geom.map(*xi),
                dx: w * geom.det.abs(),
                normal: [0.0; 2],
            };
            let data = prepare(&qp);
            eval_cell(test, &geom, *xi, &mut te);
            for (i, b) in te.iter().enumerate() {
                out[offset + rows[i]] += qp.dx * form(&data, b);
            }
        }
    }
    Ok(())
}

/// Single-matrix convenience: integrates `form` over all common cells.
pub fn assemble_matrix(
    mesh: &Mesh,
    trial: &FunctionSpace,
    test: &FunctionSpace,
    form: impl Fn(&Qp, &BasisEval, &BasisEval) -> f64,
) -> Result<SparseMatrix> {
    let cells = common_cells(mesh, trial, test);
    let mut acc = Accumulator::rect(test.ndofs, trial.ndofs);
    assemble_cells(mesh, &cells, trial, test, Offsets::default(), &mut acc, |q| *q, |q, a, b| [form(q, a, b), 0.0, 0.0])?;
    Ok(acc.m.to_csr())
}

/// Values of a discrete field at a reference point of a cell.
pub fn interpolate(space: &FunctionSpace, mesh: &Mesh, cell: usize, xi: [f64; 2], coeffs: &[f64]) -> Option<BasisEval> {
    let dofs = space.element_dofs(cell)?;
    let geom = CellGeometry::of_cell(mesh, cell);
    let mut evals = Vec::new();
    eval_cell(space, &geom, xi, &mut evals);
    let mut out = BasisEval::default();
    for (b, &d) in evals.iter().zip(dofs) {
        for k in 0..4 {
            out.value[k] += coeffs[d] * b.value[k];
            for j in 0..2 {
                out.grad[k][j] += coeffs[d] * b.grad[k][j];
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::fem::space::{build_space, Support};
    use crate::mesh::{BoundaryLabel, RegionInfo, RegionKind};

    fn single() -> Mesh {
        let mut regions = BTreeMap::new();
        regions.insert(1, RegionInfo { kind: RegionKind::Rd, material: "set1".into() });
        let lines = [
            ([0, 1], BoundaryLabel::FreeSurfaceRd),
            ([1, 2], BoundaryLabel::FreeSurfaceRd),
            ([2, 0], BoundaryLabel::FreeSurfaceRd),
        ];
        Mesh::build(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], vec![1], regions, &lines).unwrap()
    }

    #[test]
    fn p1_element_matrices() {
        let m = single();
        let p = build_space(&m, SpaceKind::P1Scalar, Support::All, &[]).unwrap();
        let mass = assemble_matrix(&m, &p, &p, |_, a, b| a.scalar() * b.scalar()).unwrap();
        let stiff = assemble_matrix(&m, &p, &p, |_, a, b| a.grad[0][0] * b.grad[0][0] + a.grad[0][1] * b.grad[0][1]).unwrap();
        let want_k = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                let want_m = 0.5 / 12.0 * if i == j { 2.0 } else { 1.0 };
                assert!((mass.get(i, j) - want_m).abs() < 1e-13);
                assert!((stiff.get(i, j) - want_k[i][j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_form_is_empty() {
        let m = single();
        let u = build_space(&m, SpaceKind::P2Vector, Support::All, &[]).unwrap();
        let z = assemble_matrix(&m, &u, &u, |_, _, _| 0.0).unwrap();
        assert_eq!((z.nrows(), z.ncols(), z.nnz()), (12, 12, 0));
    }

    #[test]
    fn facet_length_integral() {
        let m = single();
        let p = build_space(&m, SpaceKind::P1Scalar, Support::All, &[]).unwrap();
        let facets: Vec<(usize, usize)> = (0..3).map(|e| (e, 0)).collect();
        let mut out = vec![0.0; 3];
        assemble_facet_vector(&m, &facets, &p, 0, &mut out, |q| *q, |_, b| b.scalar()).unwrap();
        let perimeter = 2.0 + 2f64.sqrt();
        assert!((out.iter().sum::<f64>() - perimeter).abs() < 1e-14);
    }
}
