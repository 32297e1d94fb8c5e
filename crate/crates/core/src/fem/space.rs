//! Degree-of-freedom maps for the four discrete spaces.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{FacetTag, Mesh, RegionKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    P1Scalar,
    P2Vector,
    /// Discontinuous P1 symmetric tensors, components `[xx, yy, xy]`.
    Dg1SymTensor,
    /// Continuous P1 on the interface polyline.
    P1Trace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    All,
    /// Every non-absorbing cell (regular domain and any extension).
    Rd,
    Pml,
    Interface,
}

impl Support {
    fn contains(self, kind: RegionKind) -> bool {
        match self {
            Support::All => true,
            Support::Rd => kind != RegionKind::Pml,
            Support::Pml => kind == RegionKind::Pml,
            Support::Interface => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionSpace {
    pub kind: SpaceKind,
    pub support: Support,
    pub ndofs: usize,
    /// Local dof count per element (cell, or interface edge for traces).
    pub local: usize,
    /// Element → offset into `dofs`; `None` outside the support.
    element: Vec<Option<usize>>,
    dofs: Vec<usize>,
    pub constrained: Vec<bool>,
}

impl FunctionSpace {
    /// Global dofs of a cell (or interface edge for trace spaces).
    pub fn element_dofs(&self, element: usize) -> Option<&[usize]> {
        self.element[element].map(|o| &self.dofs[o..o + self.local])
    }

    pub fn in_support(&self, element: usize) -> bool {
        self.element[element].is_some()
    }

    pub fn num_constrained(&self) -> usize {
        self.constrained.iter().filter(|&&c| c).count()
    }

    /// Number of scalar components per node.
    pub fn components(&self) -> usize {
        match self.kind {
            SpaceKind::P1Scalar | SpaceKind::P1Trace => 1,
            SpaceKind::P2Vector => 2,
            SpaceKind::Dg1SymTensor => 3,
        }
    }
}

fn constrained_vertices(mesh: &Mesh, tags: &[FacetTag]) -> Vec<bool> {
    let mut out = vec![false; mesh.vertices.len()];
    for (e, edge) in mesh.edges.iter().enumerate() {
        if mesh.facet_tags[e].is_some_and(|t| tags.contains(&t)) {
            out[edge.vertices[0]] = true;
            out[edge.vertices[1]] = true;
        }
    }
    out
}

/// Builds a space over `support`. Dofs on facets carrying any of
/// `dirichlet` are constrained to zero; for vertex-based spaces a vertex is
/// constrained when it touches such a facet.
pub fn build_space(mesh: &Mesh, kind: SpaceKind, support: Support, dirichlet: &[FacetTag]) -> Result<FunctionSpace> {
    if (kind == SpaceKind::P1Trace) != (support == Support::Interface) {
        return Err(Error::Space(format!("{kind:?} cannot live on {support:?}")));
    }
    let vertex_fixed = constrained_vertices(mesh, dirichlet);
    if kind == SpaceKind::P1Trace {
        let facets = mesh.facets_with(FacetTag::Interface);
        if facets.is_empty() {
            return Err(Error::Space("the mesh has no interface".into()));
        }
        let verts: BTreeSet<usize> = facets.iter().flat_map(|&e| mesh.edges[e].vertices).collect();
        let mut number = vec![usize::MAX; mesh.vertices.len()];
        let mut constrained = Vec::with_capacity(verts.len());
        for (i, &v) in verts.iter().enumerate() {
            number[v] = i;
            constrained.push(vertex_fixed[v]);
        }
        let mut element = vec![None; mesh.edges.len()];
        let mut dofs = Vec::with_capacity(2 * facets.len());
        for &e in &facets {
            element[e] = Some(dofs.len());
            dofs.extend(mesh.edges[e].vertices.map(|v| number[v]));
        }
        return Ok(FunctionSpace {
            kind,
            support,
            ndofs: verts.len(),
            local: 2,
            element,
            dofs,
            constrained,
        });
    }

    let cells: Vec<usize> = (0..mesh.num_cells())
        .filter(|&c| support.contains(mesh.region_kind(c)))
        .collect();
    if cells.is_empty() {
        return Err(Error::Space(format!("support {support:?} contains no cells")));
    }
    let mut element = vec![None; mesh.num_cells()];
    let mut dofs = Vec::new();
    let mut constrained = Vec::new();
    let local;
    match kind {
        SpaceKind::P1Scalar => {
            local = 3;
            let verts: BTreeSet<usize> = cells.iter().flat_map(|&c| mesh.triangles[c]).collect();
            let mut number = vec![usize::MAX; mesh.vertices.len()];
            for (i, &v) in verts.iter().enumerate() {
                number[v] = i;
                constrained.push(vertex_fixed[v]);
            }
            for &c in &cells {
                element[c] = Some(dofs.len());
                dofs.extend(mesh.triangles[c].map(|v| number[v]));
            }
        }
        SpaceKind::P2Vector => {
            local = 12;
            let verts: BTreeSet<usize> = cells.iter().flat_map(|&c| mesh.triangles[c]).collect();
            let edges: BTreeSet<usize> = cells.iter().flat_map(|&c| mesh.cell_edges[c]).collect();
            let mut vnum = vec![usize::MAX; mesh.vertices.len()];
            let mut enum_ = vec![usize::MAX; mesh.edges.len()];
            let mut node_fixed = Vec::with_capacity(verts.len() + edges.len());
            for (i, &v) in verts.iter().enumerate() {
                vnum[v] = i;
                node_fixed.push(vertex_fixed[v]);
            }
            for (i, &e) in edges.iter().enumerate() {
                enum_[e] = verts.len() + i;
                node_fixed.push(mesh.facet_tags[e].is_some_and(|t| dirichlet.contains(&t)));
            }
            constrained = node_fixed.iter().flat_map(|&f| [f, f]).collect();
            for &c in &cells {
                element[c] = Some(dofs.len());
                let t = mesh.triangles[c];
                let ce = mesh.cell_edges[c];
                let nodes = [vnum[t[0]], vnum[t[1]], vnum[t[2]], enum_[ce[0]], enum_[ce[1]], enum_[ce[2]]];
                for n in nodes {
                    dofs.push(2 * n);
                    dofs.push(2 * n + 1);
                }
            }
        }
        SpaceKind::Dg1SymTensor => {
            local = 9;
            for (i, &c) in cells.iter().enumerate() {
                element[c] = Some(dofs.len());
                dofs.extend(9 * i..9 * i + 9);
            }
            constrained = vec![false; 9 * cells.len()];
        }
        SpaceKind::P1Trace => unreachable!(),
    }
    Ok(FunctionSpace {
        kind,
        support,
        ndofs: constrained.len(),
        local,
        element,
        dofs,
        constrained,
    })
}
