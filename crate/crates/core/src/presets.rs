//! Structured graded meshes and the shipped desk-scale experiment presets.
//!
//! A preset is a half-space with a loaded surface strip centred at `x = 0`.
//! The regular domain is the box `[-a, a] × [-d, 0]`; the absorbing collar
//! adds `L` on the left, right and bottom. Three mesh variants share the
//! regular-domain grid exactly:
//!
//! * `pml`: regular domain plus collar, outer boundary clamped;
//! * `rd`: regular domain only, with absorbing side and bottom boundaries;
//! * `ext`: regular domain padded by a larger extension, outer boundary
//!   clamped, used as the reference solution.
//!
//! Cells are graded from the strip half-width near the load up to the
//! nominal size `h`, geometrically with ratio `growth`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::config::{MaterialSpec, RunConfig, StretchingSettings, TimeSettings};
use crate::error::{Error, Result};
use crate::forms::{Formulation, SourceSpec};
use crate::materials::PRESET_NAMES;
use crate::mesh::{BoundaryLabel, RawMesh, RegionInfo, RegionKind, TagDictionary};
use crate::metrics::TracePoint;
use crate::stretching::StretchingMode;

/// Which part of the geometry a mesh covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshVariant {
    Pml,
    Rd,
    Ext,
}

impl MeshVariant {
    pub fn file_name(self) -> &'static str {
        match self {
            MeshVariant::Pml => "mesh_pml.msh",
            MeshVariant::Rd => "mesh_rd.msh",
            MeshVariant::Ext => "mesh_ext.msh",
        }
    }
}

/// Material distribution by position.
#[derive(Clone, Debug, PartialEq)]
pub enum Layering {
    Uniform(String),
    /// `(bottom, material)` from the surface down; the last layer extends
    /// to the bottom of the mesh.
    Horizontal(Vec<(f64, String)>),
    /// `upper` above the line through `(0, y0)` with slope `slope`,
    /// `lower` below it.
    Inclined {
        y0: f64,
        slope: f64,
        upper: String,
        lower: String,
    },
}

impl Layering {
    pub fn material_at(&self, p: [f64; 2]) -> &str {
        match self {
            Layering::Uniform(m) => m,
            Layering::Horizontal(layers) => layers
                .iter()
                .find(|(bottom, _)| p[1] > *bottom)
                .or(layers.last())
                .map(|(_, m)| m.as_str())
                .unwrap_or(""),
            Layering::Inclined { y0, slope, upper, lower } => {
                if p[1] > y0 + slope * p[0] {
                    upper
                } else {
                    lower
                }
            }
        }
    }

    pub fn materials(&self) -> Vec<String> {
        let mut v: Vec<String> = match self {
            Layering::Uniform(m) => vec![m.clone()],
            Layering::Horizontal(l) => l.iter().map(|(_, m)| m.clone()).collect(),
            Layering::Inclined { upper, lower, .. } => vec![upper.clone(), lower.clone()],
        };
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    /// Regular-domain half-width `a`.
    pub half_width: f64,
    /// Regular-domain depth `d`.
    pub depth: f64,
    /// Collar width `L`.
    pub pml_width: f64,
    /// Extension half-width and depth of the reference mesh.
    pub ext_half_width: f64,
    pub ext_depth: f64,
    /// Half-width of the loaded strip.
    pub strip_half: f64,
    /// Nominal cell size.
    pub h: f64,
    pub growth: f64,
}

/// Node coordinates from 0 to the last stop, starting with cells of size
/// `first`, growing by `growth` up to `h`, and passing through every stop.
pub fn graded_axis(first: f64, growth: f64, h: f64, stops: &[f64]) -> Vec<f64> {
    let mut nodes = vec![0.0];
    let mut pos = 0.0;
    let mut size = first;
    for &stop in stops {
        if stop <= pos {
            continue;
        }
        // cells of the current (growing) size, then a uniform fill
        while stop - pos > 1.5 * size && size < h {
            pos += size;
            nodes.push(pos);
            size = (size * growth).min(h);
        }
        let n = ((stop - pos) / size).round().max(1.0) as usize;
        let step = (stop - pos) / n as f64;
        for k in 1..n {
            nodes.push(pos + step * k as f64);
        }
        nodes.push(stop);
        pos = stop;
    }
    nodes
}

fn symmetric_axis(half: Vec<f64>) -> Vec<f64> {
    let mut xs: Vec<f64> = half.iter().skip(1).rev().map(|x| -x).collect();
    xs.extend(half);
    xs
}

/// Names used in generated meshes and tag dictionaries.
const LOAD: &str = "load";
const SURFACE: &str = "surface";
const CLAMPED: &str = "clamped";
const ABSORBING: &str = "absorbing";

fn region_name(material: &str, kind: RegionKind) -> String {
    let k = match kind {
        RegionKind::Rd => "rd",
        RegionKind::Pml => "pml",
        RegionKind::Extension => "ext",
    };
    format!("{material}_{k}")
}

/// Triangulates the tensor grid `xs × ys`, splitting each rectangle along
/// the diagonal pointing away from `x = 0` so that the mesh is mirror
/// symmetric. `region` names each cell from its centroid, `boundary` names
/// each outer edge from its midpoint.
pub fn tensor_mesh(
    xs: &[f64],
    ys: &[f64],
    region: impl Fn([f64; 2]) -> String,
    boundary: impl Fn([f64; 2]) -> &'static str,
) -> RawMesh {
    let nx = xs.len();
    let id = |i: usize, j: usize| j * nx + i;
    let mut raw = RawMesh::default();
    for &y in ys {
        for &x in xs {
            raw.vertices.push([x, y]);
        }
    }
    let mut names: BTreeMap<String, i32> = BTreeMap::new();
    let mut physical = |name: String, raw: &mut RawMesh| -> i32 {
        let next = names.len() as i32 + 1;
        let tag = *names.entry(name.clone()).or_insert(next);
        raw.physical_names.insert(tag, name);
        tag
    };
    for j in 0..ys.len() - 1 {
        for i in 0..nx - 1 {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let xm = 0.5 * (xs[i] + xs[i + 1]);
            let tris = if xm >= 0.0 { [[a, b, c], [a, c, d]] } else { [[a, b, d], [b, c, d]] };
            for t in tris {
                let cen = [
                    (raw.vertices[t[0]][0] + raw.vertices[t[1]][0] + raw.vertices[t[2]][0]) / 3.0,
                    (raw.vertices[t[0]][1] + raw.vertices[t[1]][1] + raw.vertices[t[2]][1]) / 3.0,
                ];
                let tag = physical(region(cen), &mut raw);
                raw.triangles.push((t, tag));
            }
        }
    }
    let ny = ys.len();
    let mut edges = Vec::new();
    for i in 0..nx - 1 {
        edges.push([id(i, 0), id(i + 1, 0)]);
        edges.push([id(i + 1, ny - 1), id(i, ny - 1)]);
    }
    for j in 0..ny - 1 {
        edges.push([id(nx - 1, j), id(nx - 1, j + 1)]);
        edges.push([id(0, j + 1), id(0, j)]);
    }
    for e in edges {
        let (p, q) = (raw.vertices[e[0]], raw.vertices[e[1]]);
        let tag = physical(boundary([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]).to_string(), &mut raw);
        raw.lines.push((e, tag));
    }
    raw
}

impl Geometry {
    fn axes(&self, variant: MeshVariant) -> (Vec<f64>, Vec<f64>) {
        let (a, d) = (self.half_width, self.depth);
        let (xstops, ystops) = match variant {
            MeshVariant::Rd => (vec![a], vec![d]),
            MeshVariant::Pml => (vec![a, a + self.pml_width], vec![d, d + self.pml_width]),
            MeshVariant::Ext => (vec![a, self.ext_half_width], vec![d, self.ext_depth]),
        };
        let f = self.strip_half;
        let xs = symmetric_axis(graded_axis(f, self.growth, self.h, &xstops));
        let mut ys: Vec<f64> = graded_axis(f, self.growth, self.h, &ystops).iter().map(|y| -y).collect();
        ys.reverse();
        (xs, ys)
    }

    /// Builds one mesh variant and its tag dictionary.
    pub fn mesh(&self, variant: MeshVariant, layering: &Layering) -> (RawMesh, TagDictionary) {
        let (a, d) = (self.half_width, self.depth);
        let tol = 1e-9 * self.h;
        let inside_rd = |p: [f64; 2]| p[0].abs() < a + tol && p[1] > -d - tol;
        let kind_at = |p: [f64; 2]| {
            if inside_rd(p) {
                RegionKind::Rd
            } else if variant == MeshVariant::Ext {
                RegionKind::Extension
            } else {
                RegionKind::Pml
            }
        };
        let (xs, ys) = self.axes(variant);
        let strip = self.strip_half;
        let raw = tensor_mesh(
            &xs,
            &ys,
            |c| region_name(layering.material_at(c), kind_at(c)),
            |m| {
                if m[1].abs() < tol {
                    if m[0].abs() < strip {
                        LOAD
                    } else {
                        SURFACE
                    }
                } else if variant == MeshVariant::Rd {
                    ABSORBING
                } else {
                    CLAMPED
                }
            },
        );
        let mut dict = TagDictionary::default();
        for name in raw.physical_names.values() {
            match name.as_str() {
                LOAD => dict.boundaries.insert(name.clone(), BoundaryLabel::Load),
                SURFACE => dict.boundaries.insert(name.clone(), BoundaryLabel::FreeSurface),
                CLAMPED => dict.boundaries.insert(name.clone(), BoundaryLabel::Clamped),
                ABSORBING => dict.boundaries.insert(name.clone(), BoundaryLabel::Absorbing),
                _ => None,
            };
        }
        for material in layering.materials() {
            for kind in [RegionKind::Rd, RegionKind::Pml, RegionKind::Extension] {
                let name = region_name(&material, kind);
                if raw.physical_names.values().any(|n| *n == name) {
                    dict.regions.insert(name, RegionInfo { kind, material: material.clone() });
                }
            }
        }
        (raw, dict)
    }
}

/// A shipped experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub geometry: Geometry,
    pub layering: Layering,
    pub traces: Vec<TracePoint>,
    pub dt: f64,
    /// End time of the absorbing-boundary runs.
    pub t_end: f64,
    /// End time of the extended reference, before any wave reflected by
    /// its outer boundary reaches a trace point.
    pub t_ref: f64,
}

pub const PRESETS: [&str; 3] = ["exp1-desk", "exp2-desk", "exp3-desk"];

fn desk_geometry() -> Geometry {
    Geometry {
        half_width: 40.0,
        depth: 40.0,
        pml_width: 20.0,
        ext_half_width: 110.0,
        ext_depth: 110.0,
        strip_half: 0.15,
        h: 2.0,
        growth: 1.5,
    }
}

fn trace(id: &str, x: f64, y: f64) -> TracePoint {
    TracePoint { id: id.into(), x, y }
}

pub fn preset(name: &str) -> Option<Preset> {
    let traces = vec![trace("A", 10.0, -2.0), trace("B", 20.0, -12.0)];
    let base = |name, description, layering| Preset {
        name,
        description,
        geometry: desk_geometry(),
        layering,
        traces: traces.clone(),
        dt: 1e-3,
        t_end: 0.8,
        t_ref: 0.45,
    };
    Some(match name {
        "exp1-desk" => base(
            "exp1-desk",
            "homogeneous air-saturated soil (set2)",
            Layering::Uniform("set2".into()),
        ),
        "exp2-desk" => base(
            "exp2-desk",
            "three horizontal layers: set2 over set5 over set4",
            Layering::Horizontal(vec![(-10.0, "set2".into()), (-20.0, "set5".into()), (f64::NEG_INFINITY, "set4".into())]),
        ),
        "exp3-desk" => base(
            "exp3-desk",
            "set2 over set4 across an inclined interface",
            Layering::Inclined {
                y0: -12.0,
                slope: 0.25,
                upper: "set2".into(),
                lower: "set4".into(),
            },
        ),
        _ => return None,
    })
}

/// The runs emitted for every preset, with their mesh variant.
pub const RUNS: [(&str, Formulation, MeshVariant); 5] = [
    ("extended", Formulation::Extended, MeshVariant::Ext),
    ("paraxial", Formulation::Paraxial, MeshVariant::Rd),
    ("fully_mixed", Formulation::FullyMixed, MeshVariant::Pml),
    ("hybrid", Formulation::Hybrid, MeshVariant::Pml),
    ("mpml", Formulation::Hybrid, MeshVariant::Pml),
];

impl Preset {
    pub fn config(&self, run: &str) -> Result<RunConfig> {
        let (_, formulation, variant) = RUNS
            .iter()
            .find(|(n, _, _)| *n == run)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown run `{run}`")))?;
        let (_, tags) = self.geometry.mesh(variant, &self.layering);
        let materials = self
            .layering
            .materials()
            .into_iter()
            .map(|m| {
                debug_assert!(PRESET_NAMES.contains(&m.as_str()));
                (m.clone(), MaterialSpec::Preset { preset: m })
            })
            .collect();
        let g = &self.geometry;
        let stretching = (variant == MeshVariant::Pml).then(|| StretchingSettings {
            rd_box: [[-g.half_width, g.half_width], [-g.depth, 0.0]],
            mode: if run == "mpml" { StretchingMode::Mpml } else { StretchingMode::Pml },
            ..StretchingSettings::default()
        });
        Ok(RunConfig {
            mesh: PathBuf::from(variant.file_name()),
            formulation,
            output_dir: PathBuf::from(format!("out/{run}")),
            tags,
            materials,
            stretching,
            source: Some(SourceSpec::default()),
            time: TimeSettings {
                dt: Some(self.dt),
                cfl: None,
                dx: None,
                t_end: if variant == MeshVariant::Ext { self.t_ref } else { self.t_end },
            },
            traces: self.traces.clone(),
            snapshot_stride: 0,
            energy_strict: false,
        })
    }

    /// Writes the three meshes and one configuration per run into `dir`.
    pub fn emit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for variant in [MeshVariant::Pml, MeshVariant::Rd, MeshVariant::Ext] {
            let (raw, _) = self.geometry.mesh(variant, &self.layering);
            let path = dir.join(variant.file_name());
            std::fs::write(&path, raw.to_gmsh())?;
            written.push(path);
        }
        for (run, _, _) in RUNS {
            let path = dir.join(format!("{run}.toml"));
            let text = format!(
                "# {}: {}, {} run\n{}",
                self.name,
                self.description,
                run,
                self.config(run)?.to_toml()?
            );
            std::fs::write(&path, text)?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{FacetTag, Mesh};

    #[test]
    fn axis_passes_through_stops() {
        let a = graded_axis(0.15, 1.5, 2.0, &[30.0, 40.0]);
        assert_eq!(a[0], 0.0);
        assert!((a[1] - 0.15).abs() < 1e-15);
        assert!(a.contains(&30.0) && *a.last().unwrap() == 40.0);
        for w in a.windows(2) {
            assert!(w[1] > w[0] && w[1] - w[0] <= 2.0 * 1.5 + 1e-12);
        }
    }

    #[test]
    fn variants_share_the_regular_grid() {
        let p = preset("exp1-desk").unwrap();
        let count_rd = |v| {
            let (raw, dict) = p.geometry.mesh(v, &p.layering);
            let m = Mesh::from_raw(&raw, &dict).unwrap();
            (m.cells_where(|k| k == RegionKind::Rd).len(), m)
        };
        let (rd_pml, pml) = count_rd(MeshVariant::Pml);
        let (rd_rd, rd) = count_rd(MeshVariant::Rd);
        let (rd_ext, _) = count_rd(MeshVariant::Ext);
        assert_eq!(rd_pml, rd_rd);
        assert_eq!(rd_pml, rd_ext);
        assert!(!pml.facets_with(FacetTag::Interface).is_empty());
        assert!(!rd.facets_with(FacetTag::Absorbing).is_empty());
        let load: f64 = pml.facets_with(FacetTag::Load).iter().map(|&e| pml.edge_length(e)).sum();
        assert!((load - 0.3).abs() < 1e-12);
    }

    #[test]
    fn layered_presets_tag_every_material() {
        for name in PRESETS {
            let p = preset(name).unwrap();
            let (raw, dict) = p.geometry.mesh(MeshVariant::Pml, &p.layering);
            let m = Mesh::from_raw(&raw, &dict).unwrap();
            let used: std::collections::BTreeSet<&str> = (0..m.num_cells()).map(|c| m.material_name(c)).collect();
            assert_eq!(used.len(), p.layering.materials().len(), "{name}");
        }
    }
}
