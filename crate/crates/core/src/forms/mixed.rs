//! Fully-mixed PML rows in `(u, w, π, S)` and the hybrid coupling.
//!
//! With `𝒥f = a f̈ + b ḟ + c f` the rows read
//!
//! * u: `ρ𝒥u + ρ_f𝒥w` against `ũ`, plus `(σ^PML, ∇ũ)` with
//!   `σ^PML = (Ṡ − απ̇I)Λ_e + (S − απI)Λ_p`
//! * w: `(Λ̃_e∂t + Λ̃_p)(ρ_f u̇ + ρ_w ẇ + (η/κ)w)` against `w̃`, minus
//!   `(π̇, ∇·w̃)`
//! * π: `𝒥π + M(Λ_e∂t + Λ_p)·∇(αu + w)` against `π̃`
//! * S: `𝒟(𝒥S) − ½(∇u̇Λ_e + Λ_e∇u̇ᵀ) − ½(∇uΛ_p + Λ_p∇uᵀ)` against `S̃`
//!
//! and the pressure is recovered as `p = π̇`.

use super::biot::{biot_cells, biot_load_facets, BiotBlocks};
use super::{ddot_sym, dot, dot3, finish, load_shape, tagged_facets, Block, CellMaterials, CoefficientField, Formulation, SourceSpec, SystemTriplet};
use crate::error::{Error, Result};
use crate::fem::assembly::{assemble_cells, assemble_facets, Accumulator, BasisEval, Offsets};
use crate::fem::{build_space, FunctionSpace, Qp, SpaceKind, Support};
use crate::materials::DerivedMaterial;
use crate::mesh::{extract_interface, FacetTag, Mesh, RegionKind};
use crate::stretching::{PmlCoefficients, StretchingConfig};

struct MixedBlocks<'a> {
    u: &'a FunctionSpace,
    w: &'a FunctionSpace,
    pi: &'a FunctionSpace,
    s: &'a FunctionSpace,
    ou: usize,
    ow: usize,
    opi: usize,
    os: usize,
}

fn off(row: usize, col: usize) -> Offsets {
    Offsets { row, col }
}

/// `Σ_ij T_ij s_j ∂_j ũ_i` for a full tensor `T = [xx, xy, yx, yy]`.
fn stress_against_grad(t: &[f64; 4], s: [f64; 2], te: &BasisEval) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            acc += t[2 * i + j] * s[j] * te.grad[i][j];
        }
    }
    acc
}

/// `½(∇u Λ + Λ ∇uᵀ) : T̃` with `(∇u)_ij = ∂_j u_i`.
fn stretched_strain_against(tr: &BasisEval, s: [f64; 2], te: &BasisEval) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let sym = 0.5 * (tr.grad[i][j] * s[j] + s[i] * tr.grad[j][i]);
            acc += sym * te.value[2 * i + j];
        }
    }
    acc
}

/// `Σ_r s_r ∂_r v_r`.
fn stretched_div(tr: &BasisEval, s: [f64; 2]) -> f64 {
    s[0] * tr.grad[0][0] + s[1] * tr.grad[1][1]
}

fn mixed_cells(
    mesh: &Mesh,
    cells: &[usize],
    mats: &CellMaterials,
    field: &CoefficientField,
    b: &MixedBlocks,
    acc: &mut Accumulator,
) -> Result<()> {
    let data = |q: &Qp| -> (&DerivedMaterial, PmlCoefficients) { (mats.of(q.cell), field.at(q.cell, q.index)) };

    // u-row
    assemble_cells(mesh, cells, b.u, b.u, off(b.ou, b.ou), acc, data, |(d, co), tr, te| {
        let vv = d.rho * dot(tr.vector(), te.vector());
        [co.a * vv, co.b * vv, co.c * vv]
    })?;
    assemble_cells(mesh, cells, b.w, b.u, off(b.ou, b.ow), acc, data, |(d, co), tr, te| {
        let vv = d.rho_f * dot(tr.vector(), te.vector());
        [co.a * vv, co.b * vv, co.c * vv]
    })?;
    assemble_cells(mesh, cells, b.s, b.u, off(b.ou, b.os), acc, data, |(_, co), tr, te| {
        [0.0, stress_against_grad(&tr.value, co.lambda_e, te), stress_against_grad(&tr.value, co.lambda_p, te)]
    })?;
    assemble_cells(mesh, cells, b.pi, b.u, off(b.ou, b.opi), acc, data, |(d, co), tr, te| {
        let ap = d.alpha * tr.scalar();
        [0.0, -ap * stretched_div(te, co.lambda_e), -ap * stretched_div(te, co.lambda_p)]
    })?;

    // w-row
    assemble_cells(mesh, cells, b.u, b.w, off(b.ow, b.ou), acc, data, |(d, co), tr, te| {
        let (a, v) = (tr.vector(), te.vector());
        [d.rho_f * dot3(co.lambda_e_rev, a, v), d.rho_f * dot3(co.lambda_p_rev, a, v), 0.0]
    })?;
    assemble_cells(mesh, cells, b.w, b.w, off(b.ow, b.ow), acc, data, |(d, co), tr, te| {
        let (a, v) = (tr.vector(), te.vector());
        let e = dot3(co.lambda_e_rev, a, v);
        let p = dot3(co.lambda_p_rev, a, v);
        [d.rho_w * e, d.drag * e + d.rho_w * p, d.drag * p]
    })?;
    assemble_cells(mesh, cells, b.pi, b.w, off(b.ow, b.opi), acc, data, |_, tr, te| {
        [0.0, -tr.scalar() * te.div(), 0.0]
    })?;

    // π-row
    assemble_cells(mesh, cells, b.pi, b.pi, off(b.opi, b.opi), acc, data, |(_, co), tr, te| {
        let pp = tr.scalar() * te.scalar();
        [co.a * pp, co.b * pp, co.c * pp]
    })?;
    assemble_cells(mesh, cells, b.u, b.pi, off(b.opi, b.ou), acc, data, |(d, co), tr, te| {
        let s = d.m * d.alpha * te.scalar();
        [0.0, s * stretched_div(tr, co.lambda_e), s * stretched_div(tr, co.lambda_p)]
    })?;
    assemble_cells(mesh, cells, b.w, b.pi, off(b.opi, b.ow), acc, data, |(d, co), tr, te| {
        let s = d.m * te.scalar();
        [0.0, s * stretched_div(tr, co.lambda_e), s * stretched_div(tr, co.lambda_p)]
    })?;

    // S-row
    assemble_cells(mesh, cells, b.s, b.s, off(b.os, b.os), acc, data, |(d, co), tr, te| {
        let ds = ddot_sym(d.elastic().compliance(tr.sym()), te.sym());
        [co.a * ds, co.b * ds, co.c * ds]
    })?;
    assemble_cells(mesh, cells, b.u, b.s, off(b.os, b.ou), acc, data, |(_, co), tr, te| {
        [
            0.0,
            -stretched_strain_against(tr, co.lambda_e, te),
            -stretched_strain_against(tr, co.lambda_p, te),
        ]
    })?;
    Ok(())
}

/// `⟨π̇ n, w̃⟩` on load facets.
fn mixed_load_facets(mesh: &Mesh, facets: &[(usize, usize)], b: &MixedBlocks, acc: &mut Accumulator) -> Result<()> {
    assemble_facets(mesh, facets, b.pi, b.w, off(b.ow, b.opi), acc, |q| q.normal, |n, tr, te| {
        [0.0, tr.scalar() * dot(*n, te.vector()), 0.0]
    })
}

fn vector_space(mesh: &Mesh) -> Result<FunctionSpace> {
    build_space(mesh, SpaceKind::P2Vector, Support::All, &[FacetTag::Clamped])
}

/// Fully-mixed system on the whole mesh. Without `stretching` (or on
/// cells outside the layer) the coefficients are the identity.
pub fn build_fully_mixed(
    mesh: &Mesh,
    mats: &CellMaterials,
    stretching: Option<&StretchingConfig>,
    source: Option<&SourceSpec>,
) -> Result<SystemTriplet> {
    let field = CoefficientField::new(mesh, stretching)?;
    let u = vector_space(mesh)?;
    let w = u.clone();
    let pi = build_space(
        mesh,
        SpaceKind::P1Scalar,
        Support::All,
        &[FacetTag::FreeSurfaceRd, FacetTag::FreeSurfacePml, FacetTag::Clamped],
    )?;
    let s = build_space(mesh, SpaceKind::Dg1SymTensor, Support::All, &[])?;
    let blocks = MixedBlocks {
        u: &u,
        w: &w,
        pi: &pi,
        s: &s,
        ou: 0,
        ow: u.ndofs,
        opi: 2 * u.ndofs,
        os: 2 * u.ndofs + pi.ndofs,
    };
    let n = blocks.os + s.ndofs;
    let mut acc = Accumulator::new(n);
    let cells: Vec<usize> = (0..mesh.num_cells()).collect();
    mixed_cells(mesh, &cells, mats, &field, &blocks, &mut acc)?;
    mixed_load_facets(mesh, &tagged_facets(mesh, FacetTag::Load), &blocks, &mut acc)?;
    let shape = load_shape(mesh, &u, 0, n, source)?;
    let spaces = vec![(Block::U, u), (Block::W, w), (Block::Pi, pi), (Block::S, s)];
    Ok(finish(Formulation::FullyMixed, acc, spaces, shape, source.copied()))
}

/// Biot in the regular domain, fully-mixed rows in the layer, coupled by
/// shared `u`, `w` and a pressure multiplier on the interface:
/// `⟨λ̃, p − π̇⟩ + ⟨p̃ − π̃, λ⟩ = 0`.
pub fn build_hybrid(
    mesh: &Mesh,
    mats: &CellMaterials,
    stretching: Option<&StretchingConfig>,
    source: Option<&SourceSpec>,
) -> Result<SystemTriplet> {
    let interface = extract_interface(mesh);
    if interface.is_empty() {
        return Err(Error::Assembly("hybrid formulation needs an interface between the regular domain and the layer".into()));
    }
    let pml_clamped = mesh
        .facets_with(FacetTag::Clamped)
        .iter()
        .any(|&e| mesh.region_kind(mesh.edges[e].cells[0].unwrap()) == RegionKind::Pml);
    if !pml_clamped {
        return Err(Error::Assembly("the absorbing layer has no clamped outer boundary".into()));
    }
    let field = CoefficientField::new(mesh, stretching)?;
    let u = vector_space(mesh)?;
    let w = u.clone();
    let p = build_space(mesh, SpaceKind::P1Scalar, Support::Rd, &[FacetTag::FreeSurfaceRd, FacetTag::Clamped])?;
    let pi = build_space(mesh, SpaceKind::P1Scalar, Support::Pml, &[FacetTag::FreeSurfacePml, FacetTag::Clamped])?;
    let s = build_space(mesh, SpaceKind::Dg1SymTensor, Support::Pml, &[])?;
    let lam = build_space(
        mesh,
        SpaceKind::P1Trace,
        Support::Interface,
        &[FacetTag::FreeSurfaceRd, FacetTag::FreeSurfacePml, FacetTag::Clamped],
    )?;
    let ow = u.ndofs;
    let op = 2 * u.ndofs;
    let opi = op + p.ndofs;
    let os = opi + pi.ndofs;
    let ol = os + s.ndofs;
    let n = ol + lam.ndofs;
    let mut acc = Accumulator::new(n);

    let rd_cells = mesh.cells_where(|k| k != RegionKind::Pml);
    let pml_cells = mesh.cells_where(|k| k == RegionKind::Pml);
    let biot = BiotBlocks { u: &u, w: &w, p: &p, ou: 0, ow, op };
    biot_cells(mesh, &rd_cells, mats, &biot, &mut acc)?;
    let mixed = MixedBlocks { u: &u, w: &w, pi: &pi, s: &s, ou: 0, ow, opi, os };
    mixed_cells(mesh, &pml_cells, mats, &field, &mixed, &mut acc)?;

    let (load_rd, load_pml): (Vec<_>, Vec<_>) = tagged_facets(mesh, FacetTag::Load)
        .into_iter()
        .partition(|&(_, c)| mesh.region_kind(c) != RegionKind::Pml);
    biot_load_facets(mesh, &load_rd, &biot, &mut acc)?;
    mixed_load_facets(mesh, &load_pml, &mixed, &mut acc)?;

    let rd_side: Vec<(usize, usize)> = interface.iter().map(|f| (f.edge, f.rd_cell)).collect();
    let pml_side: Vec<(usize, usize)> = interface.iter().map(|f| (f.edge, f.pml_cell)).collect();
    let none = |_: &Qp| ();
    let pair = |tr: &BasisEval, te: &BasisEval| tr.scalar() * te.scalar();
    assemble_facets(mesh, &rd_side, &p, &lam, off(ol, op), &mut acc, none, |_, tr, te| [0.0, 0.0, pair(tr, te)])?;
    assemble_facets(mesh, &pml_side, &pi, &lam, off(ol, opi), &mut acc, none, |_, tr, te| [0.0, -pair(tr, te), 0.0])?;
    assemble_facets(mesh, &rd_side, &lam, &p, off(op, ol), &mut acc, none, |_, tr, te| [0.0, 0.0, pair(tr, te)])?;
    assemble_facets(mesh, &pml_side, &lam, &pi, off(opi, ol), &mut acc, none, |_, tr, te| [0.0, 0.0, -pair(tr, te)])?;

    let shape = load_shape(mesh, &u, 0, n, source)?;
    let spaces = vec![
        (Block::U, u),
        (Block::W, w),
        (Block::P, p),
        (Block::Pi, pi),
        (Block::S, s),
        (Block::Lambda, lam),
    ];
    Ok(finish(Formulation::Hybrid, acc, spaces, shape, source.copied()))
}
