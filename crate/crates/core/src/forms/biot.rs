//! Plain Biot rows in `(u, w, p)` and the paraxial boundary.

use super::{dot, finish, load_shape, tagged_facets, Block, CellMaterials, Formulation, SourceSpec, SystemTriplet};
use crate::error::{Error, Result};
use crate::fem::assembly::{assemble_cells, assemble_facets, Accumulator, Offsets};
use crate::fem::{build_space, FunctionSpace, SpaceKind, Support};
use crate::mesh::{FacetTag, Mesh};

pub(crate) struct BiotBlocks<'a> {
    pub u: &'a FunctionSpace,
    pub w: &'a FunctionSpace,
    pub p: &'a FunctionSpace,
    pub ou: usize,
    pub ow: usize,
    pub op: usize,
}

fn off(row: usize, col: usize) -> Offsets {
    Offsets { row, col }
}

/// Biot cell integrals over `cells`:
///
/// * u-row: `ρ(ü,ũ) + ρ_f(ẅ,ũ) + (C e(u), e(ũ)) − α(p, ∇·ũ)`
/// * w-row: `ρ_f(ü,w̃) + ρ_w(ẅ,w̃) + (η/κ)(ẇ,w̃) − (p, ∇·w̃)`
/// * p-row: `(ṗ,p̃) + M(α∇·u̇ + ∇·ẇ, p̃)`
pub(crate) fn biot_cells(mesh: &Mesh, cells: &[usize], mats: &CellMaterials, b: &BiotBlocks, acc: &mut Accumulator) -> Result<()> {
    let mat = |q: &crate::fem::Qp| mats.of(q.cell);
    assemble_cells(mesh, cells, b.u, b.u, off(b.ou, b.ou), acc, mat, |d, tr, te| {
        let (e, et) = (tr.strain(), te.strain());
        let ce = d.elastic().apply(e);
        [d.rho * dot(tr.vector(), te.vector()), 0.0, super::ddot_sym(ce, et)]
    })?;
    assemble_cells(mesh, cells, b.w, b.u, off(b.ou, b.ow), acc, mat, |d, tr, te| {
        [d.rho_f * dot(tr.vector(), te.vector()), 0.0, 0.0]
    })?;
    assemble_cells(mesh, cells, b.p, b.u, off(b.ou, b.op), acc, mat, |d, tr, te| {
        [0.0, 0.0, -d.alpha * tr.scalar() * te.div()]
    })?;
    assemble_cells(mesh, cells, b.u, b.w, off(b.ow, b.ou), acc, mat, |d, tr, te| {
        [d.rho_f * dot(tr.vector(), te.vector()), 0.0, 0.0]
    })?;
    assemble_cells(mesh, cells, b.w, b.w, off(b.ow, b.ow), acc, mat, |d, tr, te| {
        let vv = dot(tr.vector(), te.vector());
        [d.rho_w * vv, d.drag * vv, 0.0]
    })?;
    assemble_cells(mesh, cells, b.p, b.w, off(b.ow, b.op), acc, mat, |_, tr, te| {
        [0.0, 0.0, -tr.scalar() * te.div()]
    })?;
    assemble_cells(mesh, cells, b.p, b.p, off(b.op, b.op), acc, mat, |_, tr, te| {
        [0.0, tr.scalar() * te.scalar(), 0.0]
    })?;
    assemble_cells(mesh, cells, b.u, b.p, off(b.op, b.ou), acc, mat, |d, tr, te| {
        [0.0, d.m * d.alpha * tr.div() * te.scalar(), 0.0]
    })?;
    assemble_cells(mesh, cells, b.w, b.p, off(b.op, b.ow), acc, mat, |d, tr, te| {
        [0.0, d.m * tr.div() * te.scalar(), 0.0]
    })?;
    Ok(())
}

/// `⟨p n, w̃⟩` on the load strip.
pub(crate) fn biot_load_facets(mesh: &Mesh, facets: &[(usize, usize)], b: &BiotBlocks, acc: &mut Accumulator) -> Result<()> {
    assemble_facets(mesh, facets, b.p, b.w, off(b.ow, b.op), acc, |q| q.normal, |n, tr, te| {
        [0.0, 0.0, tr.scalar() * dot(*n, te.vector())]
    })
}

fn biot_spaces(mesh: &Mesh) -> Result<(FunctionSpace, FunctionSpace, FunctionSpace)> {
    let clamped = [FacetTag::Clamped];
    let u = build_space(mesh, SpaceKind::P2Vector, Support::All, &clamped)?;
    let w = u.clone();
    let p = build_space(
        mesh,
        SpaceKind::P1Scalar,
        Support::All,
        &[FacetTag::FreeSurfaceRd, FacetTag::FreeSurfacePml, FacetTag::Clamped],
    )?;
    Ok((u, w, p))
}

fn assemble_biot(mesh: &Mesh, mats: &CellMaterials, source: Option<&SourceSpec>) -> Result<(Accumulator, Vec<(Block, FunctionSpace)>, Vec<f64>)> {
    let (u, w, p) = biot_spaces(mesh)?;
    let n = u.ndofs + w.ndofs + p.ndofs;
    let blocks = BiotBlocks {
        u: &u,
        w: &w,
        p: &p,
        ou: 0,
        ow: u.ndofs,
        op: u.ndofs + w.ndofs,
    };
    let mut acc = Accumulator::new(n);
    let cells: Vec<usize> = (0..mesh.num_cells()).collect();
    biot_cells(mesh, &cells, mats, &blocks, &mut acc)?;
    biot_load_facets(mesh, &tagged_facets(mesh, FacetTag::Load), &blocks, &mut acc)?;
    let shape = load_shape(mesh, &u, 0, n, source)?;
    Ok((acc, vec![(Block::U, u), (Block::W, w), (Block::P, p)], shape))
}

/// Plain Biot system on every cell of the mesh, whatever its region kind.
pub fn build_biot(mesh: &Mesh, mats: &CellMaterials, source: Option<&SourceSpec>) -> Result<SystemTriplet> {
    let (acc, spaces, shape) = assemble_biot(mesh, mats, source)?;
    Ok(finish(Formulation::Extended, acc, spaces, shape, source.copied()))
}

/// Plain Biot plus first-order dashpots on the absorbing boundary:
/// `ρ c_1p (u̇·n)(ũ·n) + ρ c_s (u̇·t)(ũ·t)` on the solid and
/// `ρ_w c_1p (ẇ·n)(w̃·n)` on the fluid.
pub fn build_paraxial(mesh: &Mesh, mats: &CellMaterials, source: Option<&SourceSpec>) -> Result<SystemTriplet> {
    let facets = tagged_facets(mesh, FacetTag::Absorbing);
    if facets.is_empty() {
        return Err(Error::Assembly("paraxial formulation needs absorbing facets".into()));
    }
    let (mut acc, spaces, shape) = assemble_biot(mesh, mats, source)?;
    let (u, w) = (&spaces[0].1, &spaces[1].1);
    let ow = u.ndofs;
    let data = |q: &crate::fem::Qp| (mats.of(q.cell), q.normal);
    assemble_facets(mesh, &facets, u, u, off(0, 0), &mut acc, data, |(d, n), tr, te| {
        let t = [-n[1], n[0]];
        let (a, b) = (tr.vector(), te.vector());
        let c = d.rho * (d.speeds.c_1p * dot(a, *n) * dot(b, *n) + d.speeds.c_s * dot(a, t) * dot(b, t));
        [0.0, c, 0.0]
    })?;
    assemble_facets(mesh, &facets, w, w, off(ow, ow), &mut acc, data, |(d, n), tr, te| {
        [0.0, d.rho_w * d.speeds.c_1p * dot(tr.vector(), *n) * dot(te.vector(), *n), 0.0]
    })?;
    Ok(finish(Formulation::Paraxial, acc, spaces, shape, source.copied()))
}
