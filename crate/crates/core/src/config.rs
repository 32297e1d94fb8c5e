//! TOML run configuration.
//!
//! ```toml
//! mesh = "mesh_pml.msh"          # relative to this file
//! formulation = "hybrid"         # extended | paraxial | fully_mixed | hybrid
//! output_dir = "out/hybrid"      # relative to this file
//! snapshot_stride = 0            # VTK snapshot every N steps, 0 = none
//! energy_strict = false          # weight the strain energy by ρ
//!
//! [tags.regions.set2_rd]         # Gmsh physical name → role and material
//! kind = "RD"                    # RD | PML | EXT
//! material = "set2"
//! [tags.regions.set2_pml]
//! kind = "PML"
//! material = "set2"
//! [tags.boundaries]
//! load = "GammaG"                # GammaG | GammaN | GammaN_RD | GammaN_PML | GammaD | absorbing
//! surface = "GammaN"
//! clamped = "GammaD"
//!
//! [materials.set2]
//! preset = "set2"                # or the ten explicit parameters rho_s, rho_f, k_s,
//!                                # k_f, k_b, mu_b, tortuosity, permeability,
//!                                # porosity, viscosity
//!
//! [stretching]
//! rd_box = [[-30.0, 30.0], [-30.0, 0.0]]   # regular domain; the layer lies outside
//! order = 3
//! reflection = 1e-4
//! alpha0 = 5.0                   # omit and set b_char to derive it from `reflection`
//! # beta0 = 700.0                # override of the reflection-based value
//! # width = 10.0                 # defaults to the mesh extent beyond rd_box
//! mode = "pml"                   # pml | mpml
//! p_yx = 0.01
//! p_xy = 0.01
//!
//! [source]
//! amplitude = 1e4                # N/m
//! frequency = 15.0               # Hz
//! direction = [0.0, 1.0]
//!
//! [time]
//! dt = 1e-3                      # or cfl (+ optional dx) to derive it
//! t_end = 0.8
//!
//! [[traces]]
//! id = "A"
//! x = 10.0
//! y = -2.0
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{CellMaterials, Formulation, SourceSpec};
use crate::materials::MaterialSet;
use crate::mesh::{Mesh, RegionKind, TagDictionary};
use crate::metrics::TracePoint;
use crate::stretching::{alpha0_from_reflection, beta0_from_reflection, Axis, PmlFace, StretchingConfig, StretchingMode};
use crate::timeint::cfl_dt;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: PathBuf,
    pub formulation: Formulation,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    pub tags: TagDictionary,
    pub materials: BTreeMap<String, MaterialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stretching: Option<StretchingSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceSpec>,
    pub time: TimeSettings,
    #[serde(default)]
    pub traces: Vec<TracePoint>,
    #[serde(default)]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub energy_strict: bool,
}

fn default_output() -> PathBuf {
    PathBuf::from("output")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialSpec {
    Preset { preset: String },
    Explicit(MaterialSet),
}

impl MaterialSpec {
    pub fn resolve(&self) -> Result<MaterialSet> {
        match self {
            MaterialSpec::Preset { preset } => {
                MaterialSet::preset(preset).ok_or_else(|| Error::Config(format!("unknown material preset `{preset}`")))
            }
            MaterialSpec::Explicit(m) => Ok(m.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StretchingSettings {
    /// Regular-domain box `[[xmin, xmax], [ymin, ymax]]`.
    pub rd_box: [[f64; 2]; 2],
    #[serde(default = "default_order")]
    pub order: i32,
    #[serde(default = "default_reflection")]
    pub reflection: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    /// Characteristic length for the reflection-based `α₀`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_char: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default)]
    pub mode: StretchingMode,
    #[serde(default = "default_ratio")]
    pub p_yx: f64,
    #[serde(default = "default_ratio")]
    pub p_xy: f64,
}

fn default_order() -> i32 {
    3
}

fn default_reflection() -> f64 {
    1e-4
}

fn default_ratio() -> f64 {
    0.01
}

const DEFAULT_ALPHA0: f64 = 5.0;

impl Default for StretchingSettings {
    fn default() -> Self {
        StretchingSettings {
            rd_box: [[0.0; 2]; 2],
            order: default_order(),
            reflection: default_reflection(),
            alpha0: Some(DEFAULT_ALPHA0),
            b_char: None,
            beta0: None,
            width: None,
            mode: StretchingMode::Pml,
            p_yx: default_ratio(),
            p_xy: default_ratio(),
        }
    }
}

impl StretchingSettings {
    /// Resolves faces, width and amplitudes against a mesh. Each face's
    /// `β₀` uses the fastest `c_1p` among the layer cells beyond it.
    pub fn resolve(&self, mesh: &Mesh, mats: &CellMaterials) -> Result<StretchingConfig> {
        let bounds = mesh.bounds();
        let tol = 1e-9 * (1.0 + bounds[0][1] - bounds[0][0]);
        let mut faces = Vec::new();
        let mut widths = Vec::new();
        for (axis, d) in [(Axis::X, 0), (Axis::Y, 1)] {
            for (side, normal) in [(0, -1.0), (1, 1.0)] {
                let start = self.rd_box[d][side];
                let extent = (bounds[d][side] - start) * normal;
                if extent > tol {
                    faces.push((axis, d, start, normal));
                    widths.push(extent);
                }
            }
        }
        if faces.is_empty() {
            return Err(Error::Config("the mesh has no layer outside stretching.rd_box".into()));
        }
        let width = match self.width {
            Some(w) => w,
            None => {
                let w = widths[0];
                if widths.iter().any(|x| (x - w).abs() > 1e-6 * w) {
                    return Err(Error::Config(format!("layer widths differ between faces: {widths:?}")));
                }
                w
            }
        };
        let alpha0 = match (self.alpha0, self.b_char) {
            (Some(a), _) => a,
            (None, Some(b)) => alpha0_from_reflection(self.order, b, width, self.reflection)?,
            (None, None) => DEFAULT_ALPHA0,
        };
        if self.mode == StretchingMode::Mpml && alpha0 != 0.0 {
            log::info!("multiaxial mode: scaling amplitude alpha0 = {alpha0} is ignored");
        }
        let pml_cells = mesh.cells_where(|k| k == RegionKind::Pml);
        let faces = faces
            .into_iter()
            .map(|(axis, d, start, normal)| {
                let beta0 = match self.beta0 {
                    Some(b) => b,
                    None => {
                        let beyond = pml_cells
                            .iter()
                            .copied()
                            .filter(|&c| (mesh.centroid(c)[d] - start) * normal > 0.0);
                        let c_p = mats.max_c1p(beyond);
                        beta0_from_reflection(self.order, c_p, width, self.reflection)?
                    }
                };
                Ok(PmlFace { axis, start, normal, beta0 })
            })
            .collect::<Result<Vec<_>>>()?;
        let cfg = StretchingConfig {
            order: self.order,
            width,
            alpha0,
            mode: self.mode,
            p_yx: self.p_yx,
            p_xy: self.p_xy,
            faces,
            bounds,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    /// Element size for the Courant bound; defaults to the shortest
    /// regular-domain edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    pub t_end: f64,
}

impl TimeSettings {
    /// Step size and step count.
    pub fn resolve(&self, mesh: &Mesh, mats: &CellMaterials) -> Result<(f64, usize)> {
        if !(self.t_end > 0.0) {
            return Err(Error::Config("time.t_end must be positive".into()));
        }
        let bound = match self.cfl {
            Some(cfl) => {
                if !(cfl > 0.0) {
                    return Err(Error::Config("time.cfl must be positive".into()));
                }
                let dx = match self.dx {
                    Some(dx) => dx,
                    None => (0..mesh.edges.len())
                        .filter(|&e| mesh.edges[e].cells.iter().flatten().any(|&c| mesh.region_kind(c) == RegionKind::Rd))
                        .map(|e| mesh.edge_length(e))
                        .fold(f64::INFINITY, f64::min),
                };
                Some(cfl_dt(dx, mats.max_c1p(0..mesh.num_cells()), cfl))
            }
            None => None,
        };
        let dt = match (self.dt, bound) {
            (Some(dt), Some(b)) if dt >= b => {
                return Err(Error::Config(format!("time.dt = {dt} is not below the Courant bound {b}")));
            }
            (Some(dt), _) => dt,
            (None, Some(b)) => b,
            (None, None) => return Err(Error::Config("time needs dt or cfl".into())),
        };
        if !(dt > 0.0) {
            return Err(Error::Config("time.dt must be positive".into()));
        }
        Ok((dt, (self.t_end / dt).round() as usize))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn material_sets(&self) -> Result<BTreeMap<String, MaterialSet>> {
        self.materials.iter().map(|(k, v)| Ok((k.clone(), v.resolve()?))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_example_parses() {
        let doc: String = include_str!("config.rs")
            .lines()
            .skip_while(|l| !l.starts_with("//! ```toml"))
            .skip(1)
            .take_while(|l| !l.starts_with("//! ```"))
            .map(|l| l.trim_start_matches("//!").trim_start_matches(' '))
            .collect::<Vec<_>>()
            .join("\n");
        let cfg = RunConfig::from_toml(&doc).unwrap();
        assert_eq!(cfg.formulation, Formulation::Hybrid);
        assert_eq!(cfg.traces.len(), 1);
        assert_eq!(cfg.material_sets().unwrap()["set2"], MaterialSet::preset("set2").unwrap());
        let again = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "mesh = \"m.msh\"\nformulation = \"hybrid\"\nbogus = 1\n[tags]\n[materials]\n[time]\nt_end = 1.0\ndt = 0.1\n";
        assert!(RunConfig::from_toml(text).is_err());
    }
}
