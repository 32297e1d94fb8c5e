//! Tagged triangular meshes.
//!
//! Meshes come from Gmsh ASCII v2.2 files: 3-node triangles carry a region
//! physical tag and 2-node lines carry a boundary physical tag. A
//! [`TagDictionary`] maps physical names to solver semantics. The interface
//! between the regular domain and the absorbing layer is derived from cell
//! regions, never read from the file.
//!
//! The internal serialized form ([`Mesh::to_text`]) is line oriented:
//!
//! ```text
//! poropml-mesh 1
//! vertices <n>
//! <x> <y>                      (n lines)
//! regions <r>
//! <tag> <RD|PML|EXT> <material> (r lines)
//! triangles <t>
//! <v0> <v1> <v2> <region tag>  (t lines)
//! facets <f>
//! <v0> <v1> <label>            (f lines, boundary facets only)
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Role of a cell region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionKind {
    /// Regular domain: plain Biot equations, included in energy.
    #[serde(rename = "RD")]
    Rd,
    /// Absorbing layer.
    #[serde(rename = "PML")]
    Pml,
    /// Padding of an extended reference domain: plain Biot, excluded from
    /// energy.
    #[serde(rename = "EXT")]
    Extension,
}

impl RegionKind {
    pub fn is_regular(self) -> bool {
        matches!(self, RegionKind::Rd | RegionKind::Extension)
    }

    fn as_str(self) -> &'static str {
        match self {
            RegionKind::Rd => "RD",
            RegionKind::Pml => "PML",
            RegionKind::Extension => "EXT",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "RD" => Some(RegionKind::Rd),
            "PML" => Some(RegionKind::Pml),
            "EXT" => Some(RegionKind::Extension),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionInfo {
    pub kind: RegionKind,
    pub material: String,
}

/// Semantic label of a boundary facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FacetTag {
    /// Loaded strip of the free surface.
    Load,
    /// Traction-free, drained surface bordering the regular domain.
    FreeSurfaceRd,
    /// Traction-free surface bordering the absorbing layer.
    FreeSurfacePml,
    /// Clamped outer boundary (u = w = 0, pressure history 0).
    Clamped,
    /// Regular-domain / absorbing-layer interface (interior facets).
    Interface,
    /// Dashpot boundary used by the paraxial baseline.
    Absorbing,
}

impl FacetTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FacetTag::Load => "GammaG",
            FacetTag::FreeSurfaceRd => "GammaN_RD",
            FacetTag::FreeSurfacePml => "GammaN_PML",
            FacetTag::Clamped => "GammaD_PML",
            FacetTag::Interface => "GammaI",
            FacetTag::Absorbing => "absorbing",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "GammaG" => Some(FacetTag::Load),
            "GammaN_RD" => Some(FacetTag::FreeSurfaceRd),
            "GammaN_PML" => Some(FacetTag::FreeSurfacePml),
            "GammaD_PML" | "GammaD" => Some(FacetTag::Clamped),
            "GammaI" => Some(FacetTag::Interface),
            "absorbing" => Some(FacetTag::Absorbing),
            _ => None,
        }
    }
}

/// Boundary label as written in a tag dictionary. `GammaN` is split into
/// the RD and PML variants from the adjacent cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryLabel {
    #[serde(rename = "GammaG")]
    Load,
    #[serde(rename = "GammaN")]
    FreeSurface,
    #[serde(rename = "GammaN_RD")]
    FreeSurfaceRd,
    #[serde(rename = "GammaN_PML")]
    FreeSurfacePml,
    #[serde(rename = "GammaD", alias = "GammaD_PML")]
    Clamped,
    #[serde(rename = "absorbing")]
    Absorbing,
}

/// Physical-name (or numeric physical id) to semantic label mapping.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TagDictionary {
    #[serde(default)]
    pub regions: BTreeMap<String, RegionInfo>,
    #[serde(default)]
    pub boundaries: BTreeMap<String, BoundaryLabel>,
}

/// Mesh content as stored in a Gmsh file, before semantic tagging.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawMesh {
    pub vertices: Vec<[f64; 2]>,
    /// Triangles with their physical id.
    pub triangles: Vec<([usize; 3], i32)>,
    /// Boundary lines with their physical id.
    pub lines: Vec<([usize; 2], i32)>,
    /// Physical id to name.
    pub physical_names: BTreeMap<i32, String>,
}

fn next_line<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    what: &str,
) -> Result<(usize, &'a str)> {
    for (no, l) in lines.by_ref() {
        let t = l.trim();
        if !t.is_empty() {
            return Ok((no + 1, t));
        }
    }
    Err(Error::parse(0, format!("unexpected end of file while reading {what}")))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("malformed {what}")))
}

impl RawMesh {
    /// Parses Gmsh ASCII v2.2.
    pub fn parse_gmsh(text: &str) -> Result<Self> {
        let mut raw = RawMesh::default();
        let mut node_index: HashMap<i64, usize> = HashMap::new();
        let mut seen_format = false;
        let mut seen_nodes = false;
        let mut seen_elements = false;
        let mut pending_elems: Vec<(usize, i64, Vec<i64>, i32)> = Vec::new();
        let mut lines = text.lines().enumerate();

        while let Some((no, l)) = lines.next() {
            let header = l.trim();
            if header.is_empty() {
                continue;
            }
            let line = no + 1;
            if !header.starts_with('$') || header.starts_with("$End") {
                return Err(Error::parse(line, format!("expected section header, found `{header}`")));
            }
            let name = &header[1..];
            match name {
                "MeshFormat" => {
                    let (ln, fmt) = next_line(&mut lines, "MeshFormat")?;
                    let mut toks = fmt.split_whitespace();
                    let version = toks.next().unwrap_or("");
                    let file_type = toks.next().unwrap_or("");
                    if !version.starts_with("2.2") {
                        return Err(Error::parse(ln, format!("unsupported mesh format version `{version}`")));
                    }
                    if file_type != "0" {
                        return Err(Error::parse(ln, "binary Gmsh files are not supported"));
                    }
                    seen_format = true;
                }
                "PhysicalNames" => {
                    let (ln, n) = next_line(&mut lines, "PhysicalNames")?;
                    let n: usize = parse_num(Some(n), ln, "physical name count")?;
                    for _ in 0..n {
                        let (ln, l) = next_line(&mut lines, "PhysicalNames")?;
                        let mut toks = l.splitn(3, char::is_whitespace);
                        let _dim: i32 = parse_num(toks.next(), ln, "physical dimension")?;
                        let id: i32 = parse_num(toks.next(), ln, "physical id")?;
                        let rest = toks
                            .next()
                            .ok_or_else(|| Error::parse(ln, "missing physical name"))?
                            .trim();
                        let name = rest.trim_matches('"').to_string();
                        raw.physical_names.insert(id, name);
                    }
                }
                "Nodes" => {
                    let (ln, n) = next_line(&mut lines, "Nodes")?;
                    let n: usize = parse_num(Some(n), ln, "node count")?;
                    raw.vertices.reserve(n);
                    for _ in 0..n {
                        let (ln, l) = next_line(&mut lines, "Nodes")?;
                        let mut toks = l.split_whitespace();
                        let id: i64 = parse_num(toks.next(), ln, "node id")?;
                        let x: f64 = parse_num(toks.next(), ln, "x coordinate")?;
                        let y: f64 = parse_num(toks.next(), ln, "y coordinate")?;
                        if node_index.insert(id, raw.vertices.len()).is_some() {
                            return Err(Error::parse(ln, format!("duplicate node id {id}")));
                        }
                        raw.vertices.push([x, y]);
                    }
                    seen_nodes = true;
                }
                "Elements" => {
                    let (ln, n) = next_line(&mut lines, "Elements")?;
                    let n: usize = parse_num(Some(n), ln, "element count")?;
                    for _ in 0..n {
                        let (ln, l) = next_line(&mut lines, "Elements")?;
                        let toks: Vec<&str> = l.split_whitespace().collect();
                        let _id: i64 = parse_num(toks.first().copied(), ln, "element id")?;
                        let ty: i64 = parse_num(toks.get(1).copied(), ln, "element type")?;
                        let ntags: usize = parse_num(toks.get(2).copied(), ln, "tag count")?;
                        let physical: i32 = if ntags > 0 {
                            parse_num(toks.get(3).copied(), ln, "physical tag")?
                        } else {
                            0
                        };
                        let nodes_at = 3 + ntags;
                        let expected = match ty {
                            15 => 1,
                            1 => 2,
                            2 => 3,
                            other => {
                                return Err(Error::parse(ln, format!("unsupported element type {other}")))
                            }
                        };
                        if toks.len() != nodes_at + expected {
                            return Err(Error::parse(ln, "wrong number of element nodes"));
                        }
                        if ty == 15 {
                            continue;
                        }
                        let nodes = toks[nodes_at..]
                            .iter()
                            .map(|t| t.parse::<i64>().map_err(|_| Error::parse(ln, "malformed node reference")))
                            .collect::<Result<Vec<_>>>()?;
                        pending_elems.push((ln, ty, nodes, physical));
                    }
                    seen_elements = true;
                }
                _ => {
                    // Unknown sections are skipped wholesale.
                }
            }
            let end = format!("$End{name}");
            loop {
                let (ln, l) = next_line(&mut lines, &end)?;
                if l == end {
                    break;
                }
                if !matches!(name, "MeshFormat" | "PhysicalNames" | "Nodes" | "Elements") {
                    continue;
                }
                return Err(Error::parse(ln, format!("expected `{end}`, found `{l}`")));
            }
        }
        if !seen_format {
            return Err(Error::parse(0, "missing $MeshFormat section"));
        }
        if !seen_nodes || !seen_elements {
            return Err(Error::parse(0, "missing $Nodes or $Elements section"));
        }
        for (ln, ty, nodes, physical) in pending_elems {
            let idx = nodes
                .iter()
                .map(|id| {
                    node_index
                        .get(id)
                        .copied()
                        .ok_or_else(|| Error::parse(ln, format!("unknown node id {id}")))
                })
                .collect::<Result<Vec<_>>>()?;
            match ty {
                1 => raw.lines.push(([idx[0], idx[1]], physical)),
                _ => raw.triangles.push(([idx[0], idx[1], idx[2]], physical)),
            }
        }
        Ok(raw)
    }

    /// Writes Gmsh ASCII v2.2 with z = 0.
    pub fn to_gmsh(&self) -> String {
        let mut s = String::new();
        s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
        if !self.physical_names.is_empty() {
            let mut dims: BTreeMap<i32, i32> = BTreeMap::new();
            for (_, p) in &self.lines {
                dims.insert(*p, 1);
            }
            for (_, p) in &self.triangles {
                dims.insert(*p, 2);
            }
            let _ = writeln!(s, "$PhysicalNames\n{}", self.physical_names.len());
            for (id, name) in &self.physical_names {
                let _ = writeln!(s, "{} {} \"{}\"", dims.get(id).copied().unwrap_or(2), id, name);
            }
            s.push_str("$EndPhysicalNames\n");
        }
        let _ = writeln!(s, "$Nodes\n{}", self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "{} {:?} {:?} 0", i + 1, v[0], v[1]);
        }
        s.push_str("$EndNodes\n");
        let _ = writeln!(s, "$Elements\n{}", self.lines.len() + self.triangles.len());
        let mut id = 1;
        for (l, p) in &self.lines {
            let _ = writeln!(s, "{id} 1 2 {p} {p} {} {}", l[0] + 1, l[1] + 1);
            id += 1;
        }
        for (t, p) in &self.triangles {
            let _ = writeln!(s, "{id} 2 2 {p} {p} {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
            id += 1;
        }
        s.push_str("$EndElements\n");
        s
    }

    fn physical_key(&self, id: i32) -> String {
        self.physical_names
            .get(&id)
            .cloned()
            .unwrap_or_else(|| id.to_string())
    }
}

/// An edge of the triangulation with its one or two adjacent cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Sorted vertex pair.
    pub vertices: [usize; 2],
    pub cells: [Option<usize>; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.cells[1].is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// Local edge `k` joins local vertices `k` and `(k + 1) % 3`.
    pub cell_edges: Vec<[usize; 3]>,
    pub cell_region: Vec<i32>,
    pub regions: BTreeMap<i32, RegionInfo>,
    /// One entry per edge; boundary edges always carry a tag, interior
    /// edges only when they lie on the interface.
    pub facet_tags: Vec<Option<FacetTag>>,
}

/// An interface facet with the unit normal pointing from the regular
/// domain into the absorbing layer.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceFacet {
    pub edge: usize,
    pub normal: [f64; 2],
    pub rd_cell: usize,
    pub pml_cell: usize,
}

pub fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Parses a Gmsh v2.2 file and applies the tag dictionary.
pub fn parse_gmsh(text: &str, dict: &TagDictionary) -> Result<Mesh> {
    Mesh::from_raw(&RawMesh::parse_gmsh(text)?, dict)
}

/// Interface facets with normals pointing out of the regular domain.
pub fn extract_interface(mesh: &Mesh) -> Vec<InterfaceFacet> {
    mesh.edges
        .iter()
        .enumerate()
        .filter(|(e, _)| mesh.facet_tags[*e] == Some(FacetTag::Interface))
        .map(|(e, edge)| {
            let [c0, c1] = edge.cells;
            let (c0, c1) = (c0.unwrap(), c1.unwrap());
            let (rd, pml) = if mesh.region_kind(c0) == RegionKind::Pml {
                (c1, c0)
            } else {
                (c0, c1)
            };
            InterfaceFacet {
                edge: e,
                normal: mesh.facet_normal(e, rd),
                rd_cell: rd,
                pml_cell: pml,
            }
        })
        .collect()
}

impl Mesh {
    pub fn from_raw(raw: &RawMesh, dict: &TagDictionary) -> Result<Self> {
        let mut regions = BTreeMap::new();
        let mut triangles = Vec::with_capacity(raw.triangles.len());
        let mut cell_region = Vec::with_capacity(raw.triangles.len());
        for (i, (t, phys)) in raw.triangles.iter().enumerate() {
            let key = raw.physical_key(*phys);
            let info = dict
                .regions
                .get(&key)
                .ok_or_else(|| Error::Mesh(format!("triangle {i}: region `{key}` missing from tag dictionary")))?;
            regions.insert(*phys, info.clone());
            triangles.push(*t);
            cell_region.push(*phys);
        }
        let mut labelled = Vec::with_capacity(raw.lines.len());
        for (l, phys) in &raw.lines {
            let key = raw.physical_key(*phys);
            let label = dict
                .boundaries
                .get(&key)
                .ok_or_else(|| Error::Mesh(format!("boundary `{key}` missing from tag dictionary")))?;
            labelled.push((*l, *label));
        }
        Self::build(raw.vertices.clone(), triangles, cell_region, regions, &labelled)
    }

    /// Builds the edge structure and facet tags. `lines` label boundary
    /// edges; labels on interior edges are ignored.
    pub fn build(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        cell_region: Vec<i32>,
        regions: BTreeMap<i32, RegionInfo>,
        lines: &[([usize; 2], BoundaryLabel)],
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        for (c, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Mesh(format!("triangle {c} references a missing vertex")));
            }
            let area = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if !(area > 0.0) {
                return Err(Error::Mesh(format!("triangle {c} has non-positive area {area:e}")));
            }
            if !regions.contains_key(&cell_region[c]) {
                return Err(Error::Mesh(format!("triangle {c} has an untagged region")));
            }
        }

        let mut edge_of: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut cell_edges = Vec::with_capacity(triangles.len());
        for (c, t) in triangles.iter().enumerate() {
            let mut ce = [0; 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                let e = *edge_of.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: key,
                        cells: [None, None],
                    });
                    edges.len() - 1
                });
                let edge = &mut edges[e];
                if edge.cells[0].is_none() {
                    edge.cells[0] = Some(c);
                } else if edge.cells[1].is_none() {
                    edge.cells[1] = Some(c);
                } else {
                    return Err(Error::Mesh(format!("edge {key:?} is shared by more than two triangles")));
                }
                ce[k] = e;
            }
            cell_edges.push(ce);
        }

        let kind_of = |c: usize| regions[&cell_region[c]].kind;
        let mut facet_tags = vec![None; edges.len()];
        for (key, label) in lines {
            let key = [key[0].min(key[1]), key[0].max(key[1])];
            let Some(&e) = edge_of.get(&key) else {
                return Err(Error::Mesh(format!("boundary line {key:?} is not a triangle edge")));
            };
            if !edges[e].is_boundary() {
                continue;
            }
            let cell = edges[e].cells[0].unwrap();
            let tag = match label {
                BoundaryLabel::Load => FacetTag::Load,
                BoundaryLabel::FreeSurfaceRd => FacetTag::FreeSurfaceRd,
                BoundaryLabel::FreeSurfacePml => FacetTag::FreeSurfacePml,
                BoundaryLabel::FreeSurface => {
                    if kind_of(cell) == RegionKind::Pml {
                        FacetTag::FreeSurfacePml
                    } else {
                        FacetTag::FreeSurfaceRd
                    }
                }
                BoundaryLabel::Clamped => FacetTag::Clamped,
                BoundaryLabel::Absorbing => FacetTag::Absorbing,
            };
            facet_tags[e] = Some(tag);
        }
        for (e, edge) in edges.iter().enumerate() {
            match edge.cells {
                [Some(_), None] if facet_tags[e].is_none() => {
                    return Err(Error::Mesh(format!(
                        "boundary edge {:?} carries no tag",
                        edge.vertices
                    )));
                }
                [Some(a), Some(b)] => {
                    let (ka, kb) = (kind_of(a), kind_of(b));
                    if (ka == RegionKind::Pml) != (kb == RegionKind::Pml) {
                        facet_tags[e] = Some(FacetTag::Interface);
                    }
                }
                _ => {}
            }
        }

        Ok(Mesh {
            vertices,
            triangles,
            edges,
            cell_edges,
            cell_region,
            regions,
            facet_tags,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.triangles.len()
    }

    pub fn region_kind(&self, cell: usize) -> RegionKind {
        self.regions[&self.cell_region[cell]].kind
    }

    pub fn material_name(&self, cell: usize) -> &str {
        &self.regions[&self.cell_region[cell]].material
    }

    pub fn cell_area(&self, cell: usize) -> f64 {
        let t = self.triangles[cell];
        signed_area(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]])
    }

    pub fn centroid(&self, cell: usize) -> [f64; 2] {
        let t = self.triangles[cell];
        let mut c = [0.0; 2];
        for &v in &t {
            c[0] += self.vertices[v][0] / 3.0;
            c[1] += self.vertices[v][1] / 3.0;
        }
        c
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        (pb[0] - pa[0]).hypot(pb[1] - pa[1])
    }

    /// Unit normal of edge `e` pointing out of `cell`.
    pub fn facet_normal(&self, e: usize, cell: usize) -> [f64; 2] {
        let [a, b] = self.edges[e].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
        let len = dx.hypot(dy);
        let mut n = [dy / len, -dx / len];
        let c = self.centroid(cell);
        let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        if n[0] * (mid[0] - c[0]) + n[1] * (mid[1] - c[1]) < 0.0 {
            n = [-n[0], -n[1]];
        }
        n
    }

    /// Edges carrying `tag`.
    pub fn facets_with(&self, tag: FacetTag) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.facet_tags[e] == Some(tag))
            .collect()
    }

    pub fn has_kind(&self, kind: RegionKind) -> bool {
        (0..self.num_cells()).any(|c| self.region_kind(c) == kind)
    }

    pub fn cells_where(&self, pred: impl Fn(RegionKind) -> bool) -> Vec<usize> {
        (0..self.num_cells())
            .filter(|&c| pred(self.region_kind(c)))
            .collect()
    }

    /// Axis-aligned bounding box `[[xmin, xmax], [ymin, ymax]]`.
    pub fn bounds(&self) -> [[f64; 2]; 2] {
        let mut b = [[f64::INFINITY, f64::NEG_INFINITY]; 2];
        for v in &self.vertices {
            for d in 0..2 {
                b[d][0] = b[d][0].min(v[d]);
                b[d][1] = b[d][1].max(v[d]);
            }
        }
        b
    }

    /// Locates the cell containing `p` (first match) and its reference
    /// coordinates.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 2])> {
        let tol = 1e-10;
        (0..self.num_cells()).find_map(|c| {
            let t = self.triangles[c];
            let (a, b, d) = (self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]);
            let det = (b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]);
            let xi = ((p[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (p[1] - a[1])) / det;
            let eta = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
            (xi >= -tol && eta >= -tol && xi + eta <= 1.0 + tol).then_some((c, [xi, eta]))
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("poropml-mesh 1\n");
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:?} {:?}", v[0], v[1]);
        }
        let _ = writeln!(s, "regions {}", self.regions.len());
        for (tag, info) in &self.regions {
            let _ = writeln!(s, "{} {} {}", tag, info.kind.as_str(), info.material);
        }
        let _ = writeln!(s, "triangles {}", self.triangles.len());
        for (t, r) in self.triangles.iter().zip(&self.cell_region) {
            let _ = writeln!(s, "{} {} {} {}", t[0], t[1], t[2], r);
        }
        let boundary: Vec<usize> = (0..self.edges.len())
            .filter(|&e| self.edges[e].is_boundary())
            .collect();
        let _ = writeln!(s, "facets {}", boundary.len());
        for e in boundary {
            let [a, b] = self.edges[e].vertices;
            let _ = writeln!(s, "{} {} {}", a, b, self.facet_tags[e].unwrap().as_str());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (ln, head) = next_line(&mut lines, "header")?;
        if head != "poropml-mesh 1" {
            return Err(Error::parse(ln, "not a poropml mesh"));
        }
        fn section<'a>(
            lines: &mut impl Iterator<Item = (usize, &'a str)>,
            name: &str,
        ) -> Result<usize> {
            let (ln, l) = next_line(lines, name)?;
            let mut toks = l.split_whitespace();
            if toks.next() != Some(name) {
                return Err(Error::parse(ln, format!("expected `{name}` section")));
            }
            parse_num(toks.next(), ln, "section length")
        }
        let n = section(&mut lines, "vertices")?;
        let mut vertices = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, l) = next_line(&mut lines, "vertices")?;
            let mut toks = l.split_whitespace();
            vertices.push([
                parse_num(toks.next(), ln, "x")?,
                parse_num(toks.next(), ln, "y")?,
            ]);
        }
        let n = section(&mut lines, "regions")?;
        let mut regions = BTreeMap::new();
        for _ in 0..n {
            let (ln, l) = next_line(&mut lines, "regions")?;
            let mut toks = l.split_whitespace();
            let tag: i32 = parse_num(toks.next(), ln, "region tag")?;
            let kind = toks
                .next()
                .and_then(RegionKind::parse)
                .ok_or_else(|| Error::parse(ln, "bad region kind"))?;
            let material = toks
                .next()
                .ok_or_else(|| Error::parse(ln, "missing material"))?
                .to_string();
            regions.insert(tag, RegionInfo { kind, material });
        }
        let n = section(&mut lines, "triangles")?;
        let mut triangles = Vec::with_capacity(n);
        let mut cell_region = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, l) = next_line(&mut lines, "triangles")?;
            let mut toks = l.split_whitespace();
            triangles.push([
                parse_num(toks.next(), ln, "vertex")?,
                parse_num(toks.next(), ln, "vertex")?,
                parse_num(toks.next(), ln, "vertex")?,
            ]);
            cell_region.push(parse_num(toks.next(), ln, "region")?);
        }
        let n = section(&mut lines, "facets")?;
        let mut facets = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, l) = next_line(&mut lines, "facets")?;
            let mut toks = l.split_whitespace();
            let a: usize = parse_num(toks.next(), ln, "vertex")?;
            let b: usize = parse_num(toks.next(), ln, "vertex")?;
            let tag = toks
                .next()
                .and_then(FacetTag::parse)
                .ok_or_else(|| Error::parse(ln, "bad facet label"))?;
            let label = match tag {
                FacetTag::Load => BoundaryLabel::Load,
                FacetTag::FreeSurfaceRd => BoundaryLabel::FreeSurfaceRd,
                FacetTag::FreeSurfacePml => BoundaryLabel::FreeSurfacePml,
                FacetTag::Clamped => BoundaryLabel::Clamped,
                FacetTag::Absorbing => BoundaryLabel::Absorbing,
                FacetTag::Interface => return Err(Error::parse(ln, "interface facets are derived")),
            };
            facets.push(([a, b], label));
        }
        Mesh::build(vertices, triangles, cell_region, regions, &facets)
    }
}
