//! Energy in the regular domain, point traces, normalized trace errors and
//! dof accounting.

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::assembly::{assemble_cells, interpolate, Accumulator, Offsets};
use crate::fem::FunctionSpace;
use crate::forms::{Block, CellMaterials, Formulation, SystemTriplet};
use crate::mesh::{Mesh, RegionKind};
use crate::sparse::SparseMatrix;
use crate::timeint::NewmarkState;

/// Where the physical pore pressure lives in the state vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PressureSource {
    /// Block `p` of the displacement vector.
    Displacement,
    /// Block `π` of the velocity vector (`p = π̇`).
    Velocity,
}

fn pressure_block(f: Formulation) -> (Block, PressureSource) {
    match f {
        Formulation::FullyMixed => (Block::Pi, PressureSource::Velocity),
        _ => (Block::P, PressureSource::Displacement),
    }
}

/// Quadratic forms of the regular-domain energy
/// `½(ρu̇,u̇) + ½(C e(u), e(u)) + ½(ρ_w ẇ,ẇ) + ½(p/M, p) + (ρ_f u̇, ẇ)`.
pub struct EnergyOperator {
    u: std::ops::Range<usize>,
    w: std::ops::Range<usize>,
    p: std::ops::Range<usize>,
    source: PressureSource,
    mass_u: SparseMatrix,
    stiff_u: SparseMatrix,
    mass_w: SparseMatrix,
    cross: SparseMatrix,
    mass_p: SparseMatrix,
}

impl EnergyOperator {
    /// With `strict`, the strain term is weighted by the density as well.
    pub fn new(mesh: &Mesh, sys: &SystemTriplet, mats: &CellMaterials, strict: bool) -> Result<Self> {
        let (pb, source) = pressure_block(sys.formulation);
        let get = |b: Block| -> Result<(&FunctionSpace, std::ops::Range<usize>)> {
            let s = sys.space(b).ok_or_else(|| Error::Metrics(format!("system has no {} block", b.as_str())))?;
            Ok((s, sys.layout.range(b).unwrap()))
        };
        let (us, u) = get(Block::U)?;
        let (ws, w) = get(Block::W)?;
        let (ps, p) = get(pb)?;
        let cells = mesh.cells_where(|k| k == RegionKind::Rd);
        let form = |trial: &FunctionSpace, test: &FunctionSpace, f: &dyn Fn(usize, &crate::fem::BasisEval, &crate::fem::BasisEval) -> f64| -> Result<SparseMatrix> {
            let mut acc = Accumulator::rect(test.ndofs, trial.ndofs);
            assemble_cells(mesh, &cells, trial, test, Offsets::default(), &mut acc, |q| q.cell, |c, a, b| [f(*c, a, b), 0.0, 0.0])?;
            Ok(acc.m.to_csr())
        };
        let vv = |a: &crate::fem::BasisEval, b: &crate::fem::BasisEval| a.value[0] * b.value[0] + a.value[1] * b.value[1];
        Ok(EnergyOperator {
            mass_u: form(us, us, &|c, a, b| mats.of(c).rho * vv(a, b))?,
            stiff_u: form(us, us, &|c, a, b| {
                let d = mats.of(c);
                let weight = if strict { d.rho } else { 1.0 };
                let s = d.elastic().apply(a.strain());
                let e = b.strain();
                weight * (s[0] * e[0] + s[1] * e[1] + 2.0 * s[2] * e[2])
            })?,
            mass_w: form(ws, ws, &|c, a, b| mats.of(c).rho_w * vv(a, b))?,
            cross: form(ws, us, &|c, a, b| mats.of(c).rho_f * vv(a, b))?,
            mass_p: form(ps, ps, &|c, a, b| a.scalar() * b.scalar() / mats.of(c).m)?,
            u,
            w,
            p,
            source,
        })
    }

    pub fn energy(&self, x: &[f64], v: &[f64]) -> f64 {
        let (xu, vu, vw) = (&x[self.u.clone()], &v[self.u.clone()], &v[self.w.clone()]);
        let p = match self.source {
            PressureSource::Displacement => &x[self.p.clone()],
            PressureSource::Velocity => &v[self.p.clone()],
        };
        0.5 * self.mass_u.bilinear(vu, vu)
            + 0.5 * self.stiff_u.bilinear(xu, xu)
            + 0.5 * self.mass_w.bilinear(vw, vw)
            + 0.5 * self.mass_p.bilinear(p, p)
            + self.cross.bilinear(vu, vw)
    }

    pub fn of_state(&self, s: &NewmarkState) -> f64 {
        self.energy(&s.x, &s.v)
    }
}

/// A named observation point.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct TracePoint {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

/// Samples `(u_x, u_y, w_x, w_y, p)` at a fixed point.
#[derive(Clone, Debug)]
pub struct Probe {
    pub point: TracePoint,
    cell: usize,
    xi: [f64; 2],
    pressure_cell: usize,
    pressure_xi: [f64; 2],
}

impl Probe {
    /// Locates the point in a regular-domain cell.
    pub fn new(mesh: &Mesh, point: TracePoint) -> Result<Self> {
        let p = [point.x, point.y];
        let found = (0..mesh.num_cells())
            .filter(|&c| mesh.region_kind(c) == RegionKind::Rd)
            .find_map(|c| {
                let geom = crate::fem::basis::CellGeometry::of_cell(mesh, c);
                let xi = geom.inverse_map(p);
                let tol = 1e-10;
                (xi[0] >= -tol && xi[1] >= -tol && xi[0] + xi[1] <= 1.0 + tol).then_some((c, xi))
            });
        let (cell, xi) = found.ok_or_else(|| Error::Config(format!("trace point `{}` lies outside the regular domain", point.id)))?;
        Ok(Probe {
            point,
            cell,
            xi,
            pressure_cell: cell,
            pressure_xi: xi,
        })
    }

    pub fn sample(&self, mesh: &Mesh, sys: &SystemTriplet, s: &NewmarkState) -> [f64; 5] {
        let (pb, source) = pressure_block(sys.formulation);
        let field = |b: Block, vec: &[f64], cell: usize, xi: [f64; 2]| {
            let r = sys.layout.range(b).unwrap();
            interpolate(sys.space(b).unwrap(), mesh, cell, xi, &vec[r]).unwrap_or_default()
        };
        let u = field(Block::U, &s.x, self.cell, self.xi);
        let w = field(Block::W, &s.x, self.cell, self.xi);
        let pv = match source {
            PressureSource::Displacement => &s.x,
            PressureSource::Velocity => &s.v,
        };
        let p = field(pb, pv, self.pressure_cell, self.pressure_xi);
        [u.value[0], u.value[1], w.value[0], w.value[1], p.value[0]]
    }
}

/// Time series at one point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceRecord {
    pub id: String,
    pub times: Vec<f64>,
    /// Rows of `(u_x, u_y, w_x, w_y, p)`.
    pub values: Vec<[f64; 5]>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyRecord {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
}

/// Normalized errors `(e_u, e_w, e_p)` per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceErrors {
    pub id: String,
    pub times: Vec<f64>,
    pub errors: Vec<[f64; 3]>,
}

impl TraceErrors {
    pub fn max(&self) -> [f64; 3] {
        let mut m = [0.0f64; 3];
        for e in &self.errors {
            for k in 0..3 {
                m[k] = m[k].max(e[k]);
            }
        }
        m
    }

    pub fn mean(&self) -> [f64; 3] {
        let mut m = [0.0; 3];
        for e in &self.errors {
            for k in 0..3 {
                m[k] += e[k];
            }
        }
        let n = self.errors.len().max(1) as f64;
        m.map(|v| v / n)
    }
}

/// Relative tolerance on matching sample times.
const TIME_TOL: f64 = 1e-9;

/// `e_u(t_k) = |u_ref − u|₂ / max_k |u_ref|₂`, likewise for `w` and `|p|`.
/// The run may extend beyond the reference; samples are compared over the
/// reference's time grid, which must be a prefix of the run's.
pub fn trace_errors(run: &TraceRecord, reference: &TraceRecord) -> Result<TraceErrors> {
    if run.times.len() < reference.times.len() {
        return Err(Error::Metrics(format!(
            "trace `{}`: run has {} samples, reference {}",
            run.id,
            run.times.len(),
            reference.times.len()
        )));
    }
    for (k, (a, b)) in run.times.iter().zip(&reference.times).enumerate() {
        if (a - b).abs() > TIME_TOL * (1.0 + b.abs()) {
            return Err(Error::Metrics(format!("trace `{}`: sample {k} at t={a} vs reference t={b}", run.id)));
        }
    }
    let norm = |v: &[f64; 5], k: usize| match k {
        0 => v[0].hypot(v[1]),
        1 => v[2].hypot(v[3]),
        _ => v[4].abs(),
    };
    let mut scale = [0.0f64; 3];
    for v in &reference.values {
        for (k, s) in scale.iter_mut().enumerate() {
            *s = s.max(norm(v, k));
        }
    }
    if scale.iter().any(|&s| s == 0.0) {
        return Err(Error::Metrics(format!("trace `{}`: reference is identically zero", reference.id)));
    }
    let errors = reference
        .values
        .iter()
        .zip(&run.values)
        .map(|(r, v)| {
            let d = [r[0] - v[0], r[1] - v[1], r[2] - v[2], r[3] - v[3], r[4] - v[4]];
            [norm(&d, 0) / scale[0], norm(&d, 1) / scale[1], norm(&d, 2) / scale[2]]
        })
        .collect();
    Ok(TraceErrors {
        id: run.id.clone(),
        times: reference.times.clone(),
        errors,
    })
}

/// Per-block dof counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DofCount {
    pub blocks: Vec<(String, usize)>,
    pub total: usize,
    pub constrained: usize,
}

pub fn count_dofs(sys: &SystemTriplet) -> DofCount {
    DofCount {
        blocks: sys.layout.blocks.iter().map(|(b, r)| (b.as_str().to_string(), r.len())).collect(),
        total: sys.ndofs(),
        constrained: sys.constrained.iter().filter(|&&c| c).count(),
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.into_iter().map(fmt))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_energy<W: Write>(out: W, rec: &EnergyRecord) -> Result<()> {
    write_rows(out, &["t", "E"], rec.times.iter().zip(&rec.energy).map(|(t, e)| vec![*t, *e]))
}

pub fn write_trace<W: Write>(out: W, rec: &TraceRecord) -> Result<()> {
    write_rows(
        out,
        &["t", "ux", "uy", "wx", "wy", "p"],
        rec.times.iter().zip(&rec.values).map(|(t, v)| vec![*t, v[0], v[1], v[2], v[3], v[4]]),
    )
}

pub fn write_errors<W: Write>(out: W, rec: &TraceErrors) -> Result<()> {
    write_rows(
        out,
        &["t", "e_u", "e_w", "e_p"],
        rec.times.iter().zip(&rec.errors).map(|(t, e)| vec![*t, e[0], e[1], e[2]]),
    )
}

fn read_table<R: Read>(input: R, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != columns {
            return Err(Error::Metrics(format!("row {}: expected {columns} columns, found {}", i + 1, rec.len())));
        }
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Metrics(format!("row {}: {e}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_trace<R: Read>(input: R, id: &str) -> Result<TraceRecord> {
    let rows = read_table(input, 6)?;
    Ok(TraceRecord {
        id: id.to_string(),
        times: rows.iter().map(|r| r[0]).collect(),
        values: rows.iter().map(|r| [r[1], r[2], r[3], r[4], r[5]]).collect(),
    })
}

pub fn read_energy<R: Read>(input: R) -> Result<EnergyRecord> {
    let rows = read_table(input, 2)?;
    Ok(EnergyRecord {
        times: rows.iter().map(|r| r[0]).collect(),
        energy: rows.iter().map(|r| r[1]).collect(),
    })
}
