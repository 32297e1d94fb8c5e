//! Semi-discrete systems `M Ẍ + C Ẋ + K X = F(t)` for the four
//! formulations.
//!
//! | formulation   | blocks                      |
//! |---------------|-----------------------------|
//! | extended      | u, w, p                     |
//! | paraxial      | u, w, p (+ boundary dashpots) |
//! | fully mixed   | u, w, π, S                  |
//! | hybrid        | u, w, p (RD), π, S (PML), λ |
//!
//! `u`, `w` are P2 vectors, pressures P1, the stress history `S` is a
//! discontinuous P1 symmetric tensor and `λ` a P1 multiplier on the
//! interface enforcing `p = π̇`.

mod biot;
mod mixed;
pub mod source;

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

pub use biot::{build_biot, build_paraxial};
pub use mixed::{build_fully_mixed, build_hybrid};
pub use source::{ricker, ricker_duration, SourceSpec};

use crate::error::{Error, Result};
use crate::fem::assembly::{assemble_facet_vector, Accumulator};
use crate::fem::quadrature::triangle_degree4;
use crate::fem::basis::CellGeometry;
use crate::fem::FunctionSpace;
use crate::materials::{derive, DerivedMaterial, MaterialSet};
use crate::mesh::{FacetTag, Mesh, RegionKind};
use crate::sparse::SparseMatrix;
use crate::stretching::{PmlCoefficients, StretchingConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    Extended,
    Paraxial,
    FullyMixed,
    Hybrid,
}

impl Formulation {
    pub fn as_str(self) -> &'static str {
        match self {
            Formulation::Extended => "extended",
            Formulation::Paraxial => "paraxial",
            Formulation::FullyMixed => "fully_mixed",
            Formulation::Hybrid => "hybrid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    U,
    W,
    P,
    Pi,
    S,
    Lambda,
}

impl Block {
    pub fn as_str(self) -> &'static str {
        match self {
            Block::U => "u",
            Block::W => "w",
            Block::P => "p",
            Block::Pi => "pi",
            Block::S => "S",
            Block::Lambda => "lambda",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockLayout {
    pub blocks: Vec<(Block, Range<usize>)>,
}

impl BlockLayout {
    fn new(sizes: &[(Block, usize)]) -> Self {
        let mut start = 0;
        let blocks = sizes
            .iter()
            .map(|&(b, n)| {
                let r = start..start + n;
                start += n;
                (b, r)
            })
            .collect();
        BlockLayout { blocks }
    }

    pub fn total(&self) -> usize {
        self.blocks.last().map_or(0, |(_, r)| r.end)
    }

    pub fn range(&self, block: Block) -> Option<Range<usize>> {
        self.blocks.iter().find(|(b, _)| *b == block).map(|(_, r)| r.clone())
    }

    pub fn offset(&self, block: Block) -> usize {
        self.range(block).map_or(usize::MAX, |r| r.start)
    }

    /// Block containing global dof `dof`.
    pub fn block_of(&self, dof: usize) -> Option<Block> {
        self.blocks.iter().find(|(_, r)| r.contains(&dof)).map(|(b, _)| *b)
    }
}

/// Assembled system with its dof layout and load.
#[derive(Clone, Debug)]
pub struct SystemTriplet {
    pub formulation: Formulation,
    pub m: SparseMatrix,
    pub c: SparseMatrix,
    pub k: SparseMatrix,
    pub layout: BlockLayout,
    pub spaces: BTreeMap<Block, FunctionSpace>,
    pub constrained: Vec<bool>,
    /// `∫_Γg direction · ũ`, scaled by `amplitude · S(t)` at run time.
    load_shape: Vec<f64>,
    pub source: Option<SourceSpec>,
}

impl SystemTriplet {
    pub fn ndofs(&self) -> usize {
        self.layout.total()
    }

    pub fn space(&self, block: Block) -> Option<&FunctionSpace> {
        self.spaces.get(&block)
    }

    pub fn load(&self, t: f64) -> Vec<f64> {
        let mut f = vec![0.0; self.ndofs()];
        self.load_into(t, &mut f);
        f
    }

    pub fn load_into(&self, t: f64, out: &mut [f64]) {
        let s = self.source.map_or(0.0, |src| src.amplitude * ricker(t, src.frequency));
        for (o, l) in out.iter_mut().zip(&self.load_shape) {
            *o = s * l;
        }
    }

    pub fn load_shape(&self) -> &[f64] {
        &self.load_shape
    }

    /// Names the block of a dof, for diagnostics.
    pub fn describe_dof(&self, dof: usize) -> String {
        match self.layout.block_of(dof) {
            Some(b) => format!("{} block, local dof {}", b.as_str(), dof - self.layout.offset(b)),
            None => "unknown block".into(),
        }
    }
}

/// Derived material of every cell.
#[derive(Clone, Debug)]
pub struct CellMaterials {
    table: Vec<DerivedMaterial>,
    names: Vec<String>,
    cell: Vec<usize>,
}

impl CellMaterials {
    pub fn new(mesh: &Mesh, sets: &BTreeMap<String, MaterialSet>) -> Result<Self> {
        let mut index = BTreeMap::new();
        let mut table = Vec::new();
        let mut names = Vec::new();
        for (name, set) in sets {
            index.insert(name.as_str(), table.len());
            table.push(derive(set).map_err(|e| Error::Material(format!("{name}: {e}")))?);
            names.push(name.clone());
        }
        let cell = (0..mesh.num_cells())
            .map(|c| {
                let name = mesh.material_name(c);
                index
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::Material(format!("material `{name}` is not defined")))
            })
            .collect::<Result<_>>()?;
        Ok(CellMaterials { table, names, cell })
    }

    /// Every cell shares one material.
    pub fn uniform(mesh: &Mesh, set: &MaterialSet) -> Result<Self> {
        Ok(CellMaterials {
            table: vec![derive(set)?],
            names: vec!["uniform".into()],
            cell: vec![0; mesh.num_cells()],
        })
    }

    pub fn of(&self, cell: usize) -> &DerivedMaterial {
        &self.table[self.cell[cell]]
    }

    pub fn name_of(&self, cell: usize) -> &str {
        &self.names[self.cell[cell]]
    }

    /// Fastest `c_1p` among the given cells.
    pub fn max_c1p(&self, cells: impl IntoIterator<Item = usize>) -> f64 {
        cells
            .into_iter()
            .map(|c| self.of(c).speeds.c_1p)
            .fold(0.0, f64::max)
    }
}

/// PML coefficients at the cell quadrature points; identity outside the
/// absorbing layer or when stretching is off.
pub(crate) struct CoefficientField {
    per_cell: Vec<Option<Box<[PmlCoefficients]>>>,
}

impl CoefficientField {
    pub(crate) fn new(mesh: &Mesh, stretching: Option<&StretchingConfig>) -> Result<Self> {
        let rule = triangle_degree4();
        let mut per_cell = vec![None; mesh.num_cells()];
        if let Some(cfg) = stretching {
            cfg.validate()?;
            for (c, slot) in per_cell.iter_mut().enumerate() {
                if mesh.region_kind(c) != RegionKind::Pml {
                    continue;
                }
                let geom = CellGeometry::of_cell(mesh, c);
                let coeffs = rule
                    .points
                    .iter()
                    .map(|xi| {
                        let x = geom.map(*xi);
                        cfg.coefficients(x[0], x[1])
                            .map_err(|e| Error::Stretching(format!("cell {c}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                *slot = Some(coeffs.into_boxed_slice());
            }
        }
        Ok(CoefficientField { per_cell })
    }

    pub(crate) fn at(&self, cell: usize, qp: usize) -> PmlCoefficients {
        match &self.per_cell[cell] {
            Some(c) => c[qp],
            None => PmlCoefficients::IDENTITY,
        }
    }
}

/// Boundary facets `(edge, cell)` carrying `tag`.
pub(crate) fn tagged_facets(mesh: &Mesh, tag: FacetTag) -> Vec<(usize, usize)> {
    mesh.facets_with(tag)
        .into_iter()
        .map(|e| (e, mesh.edges[e].cells[0].unwrap()))
        .collect()
}

/// `∫_Γg d · ũ` over the load strip.
pub(crate) fn load_shape(mesh: &Mesh, u: &FunctionSpace, offset: usize, n: usize, source: Option<&SourceSpec>) -> Result<Vec<f64>> {
    let mut shape = vec![0.0; n];
    let Some(src) = source else {
        return Ok(shape);
    };
    let facets = tagged_facets(mesh, FacetTag::Load);
    if facets.is_empty() {
        return Err(Error::Assembly("a source is requested but the mesh has no load facets".into()));
    }
    let d = src.direction;
    assemble_facet_vector(mesh, &facets, u, offset, &mut shape, |_| (), |_, b| d[0] * b.value[0] + d[1] * b.value[1])?;
    Ok(shape)
}

/// Applies homogeneous constraints and packages the system.
pub(crate) fn finish(
    formulation: Formulation,
    acc: Accumulator,
    spaces: Vec<(Block, FunctionSpace)>,
    mut load_shape: Vec<f64>,
    source: Option<SourceSpec>,
) -> SystemTriplet {
    let layout = BlockLayout::new(&spaces.iter().map(|(b, s)| (*b, s.ndofs)).collect::<Vec<_>>());
    let constrained: Vec<bool> = spaces.iter().flat_map(|(_, s)| s.constrained.iter().copied()).collect();
    for (l, &c) in load_shape.iter_mut().zip(&constrained) {
        if c {
            *l = 0.0;
        }
    }
    SystemTriplet {
        formulation,
        m: acc.m.to_csr().eliminate(&constrained, 0.0),
        c: acc.c.to_csr().eliminate(&constrained, 0.0),
        k: acc.k.to_csr().eliminate(&constrained, 1.0),
        layout,
        spaces: spaces.into_iter().collect(),
        constrained,
        load_shape,
        source,
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `Σ_r s_r a_r b_r`.
fn dot3(s: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    s[0] * a[0] * b[0] + s[1] * a[1] * b[1]
}

/// Contraction of two symmetric tensors given as `[xx, yy, xy]`.
fn ddot_sym(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + 2.0 * a[2] * b[2]
}
