//! Runs a configuration end to end and compares run directories.
//!
//! A run directory holds `energy.csv`, one `trace_<id>.csv` per trace
//! point, optional `snapshot_<step>.vtk` files and a `manifest.toml` with
//! the dof counts, the time grid and a SHA-256 of every file written. A
//! failed run leaves a `FAILED` file naming the stage.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{Error, Result, StageExt};
use crate::forms::{build_biot, build_fully_mixed, build_hybrid, build_paraxial, CellMaterials, Formulation, SystemTriplet};
use crate::mesh::{parse_gmsh, Mesh};
use crate::metrics::{
    count_dofs, read_trace, trace_errors, write_energy, write_errors, write_trace, DofCount, EnergyOperator, EnergyRecord, Probe,
    TraceErrors, TraceRecord,
};
use crate::stretching::StretchingConfig;
use crate::timeint::{Newmark, NewmarkState};
use crate::vtk;

/// An assembled problem ready for time stepping.
pub struct Simulation {
    pub mesh: Mesh,
    pub materials: CellMaterials,
    pub stretching: Option<StretchingConfig>,
    pub system: SystemTriplet,
    pub dt: f64,
    pub steps: usize,
    pub probes: Vec<Probe>,
    energy: EnergyOperator,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub energy: EnergyRecord,
    pub traces: Vec<TraceRecord>,
    pub final_state: NewmarkState,
}

impl Simulation {
    pub fn new(cfg: &RunConfig, mesh: Mesh) -> Result<Self> {
        let sets = cfg.material_sets().stage("materials")?;
        let materials = CellMaterials::new(&mesh, &sets).stage("materials")?;
        let stretching = match (cfg.formulation, &cfg.stretching) {
            (Formulation::FullyMixed | Formulation::Hybrid, Some(s)) => Some(s.resolve(&mesh, &materials).stage("stretching")?),
            (Formulation::FullyMixed | Formulation::Hybrid, None) => {
                log::warn!("no [stretching] section: the layer uses identity coefficients");
                None
            }
            (f, Some(_)) => {
                log::warn!("[stretching] is ignored by the {} formulation", f.as_str());
                None
            }
            (_, None) => None,
        };
        let source = cfg.source.as_ref();
        let system = match cfg.formulation {
            Formulation::Extended => build_biot(&mesh, &materials, source),
            Formulation::Paraxial => build_paraxial(&mesh, &materials, source),
            Formulation::FullyMixed => build_fully_mixed(&mesh, &materials, stretching.as_ref(), source),
            Formulation::Hybrid => build_hybrid(&mesh, &materials, stretching.as_ref(), source),
        }
        .stage("assembly")?;
        let (dt, steps) = cfg.time.resolve(&mesh, &materials).stage("time")?;
        let probes = cfg
            .traces
            .iter()
            .map(|p| Probe::new(&mesh, p.clone()))
            .collect::<Result<Vec<_>>>()
            .stage("traces")?;
        let energy = EnergyOperator::new(&mesh, &system, &materials, cfg.energy_strict).stage("energy")?;
        Ok(Simulation {
            mesh,
            materials,
            stretching,
            system,
            dt,
            steps,
            probes,
            energy,
        })
    }

    /// Steps to the end time; `observe` sees every state including the
    /// initial one.
    pub fn run(&self, mut observe: impl FnMut(&NewmarkState) -> Result<()>) -> Result<RunOutput> {
        let sys = &self.system;
        let mut nm = Newmark::new(&sys.m, &sys.c, &sys.k, self.dt).stage("factorization")?;
        let n = sys.ndofs();
        let mut state = NewmarkState::zeros(n);
        let mut f = vec![0.0; n];
        let mut energy = EnergyRecord::default();
        let mut traces: Vec<TraceRecord> = self
            .probes
            .iter()
            .map(|p| TraceRecord {
                id: p.point.id.clone(),
                ..Default::default()
            })
            .collect();
        let mut record = |s: &NewmarkState, energy: &mut EnergyRecord, traces: &mut Vec<TraceRecord>| -> Result<()> {
            let e = self.energy.of_state(s);
            if !e.is_finite() {
                return Err(Error::Metrics(format!("energy is not finite at t = {}", s.t)));
            }
            energy.times.push(s.t);
            energy.energy.push(e);
            for (rec, probe) in traces.iter_mut().zip(&self.probes) {
                rec.times.push(s.t);
                rec.values.push(probe.sample(&self.mesh, sys, s));
            }
            observe(s)
        };
        record(&state, &mut energy, &mut traces).stage("time loop")?;
        for _ in 0..self.steps {
            sys.load_into(state.t + self.dt, &mut f);
            nm.step(&mut state, &f);
            record(&state, &mut energy, &mut traces).stage("time loop")?;
        }
        Ok(RunOutput {
            energy,
            traces,
            final_state: state,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub formulation: String,
    pub output_dir: PathBuf,
    pub dt: f64,
    pub steps: usize,
    pub dofs: BTreeMap<String, usize>,
    pub total_dofs: usize,
    pub constrained_dofs: usize,
    pub peak_energy: f64,
    pub final_energy: f64,
    pub seconds: f64,
    pub files: Vec<FileEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Loads the configuration at `path` and runs it. Relative paths inside
/// the file resolve against its directory; `output` replaces
/// `output_dir`.
pub fn run_file(path: &Path, output: Option<&Path>) -> Result<RunSummary> {
    let cfg = RunConfig::load(path).stage("config")?;
    let base = path.parent().unwrap_or(Path::new("."));
    let out = output.map(Path::to_path_buf).unwrap_or_else(|| base.join(&cfg.output_dir));
    run(&cfg, base, &out)
}

pub fn run(cfg: &RunConfig, base: &Path, out: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out).stage("output")?;
    let failed = out.join("FAILED");
    if failed.exists() {
        std::fs::remove_file(&failed).stage("output")?;
    }
    let result = run_inner(cfg, base, out);
    if let Err(e) = &result {
        let _ = std::fs::write(&failed, format!("{e}\n"));
    }
    result
}

fn run_inner(cfg: &RunConfig, base: &Path, out: &Path) -> Result<RunSummary> {
    let clock = Instant::now();
    let mesh_path = base.join(&cfg.mesh);
    let text = std::fs::read_to_string(&mesh_path)
        .map_err(|e| Error::Config(format!("{}: {e}", mesh_path.display())))
        .stage("mesh")?;
    let mesh = parse_gmsh(&text, &cfg.tags).stage("mesh")?;
    let sim = Simulation::new(cfg, mesh)?;
    let dofs: DofCount = count_dofs(&sim.system);
    log::info!(
        "{}: {} dofs ({} constrained), dt = {}, {} steps",
        cfg.formulation.as_str(),
        dofs.total,
        dofs.constrained,
        sim.dt,
        sim.steps
    );

    let mut written: Vec<PathBuf> = Vec::new();
    let stride = cfg.snapshot_stride;
    let output = sim.run(|s| {
        if stride > 0 && s.step % stride == 0 {
            let path = out.join(format!("snapshot_{:06}.vtk", s.step));
            std::fs::write(&path, vtk::snapshot(&sim.mesh, &sim.system, s))?;
            written.push(path);
        }
        Ok(())
    })?;

    let path = out.join("energy.csv");
    write_energy(create(&path).stage("output")?, &output.energy).stage("output")?;
    written.push(path);
    for rec in &output.traces {
        let path = out.join(format!("trace_{}.csv", rec.id));
        write_trace(create(&path).stage("output")?, rec).stage("output")?;
        written.push(path);
    }

    let mut files = Vec::new();
    for path in &written {
        let bytes = std::fs::read(path).stage("output")?;
        files.push(FileEntry {
            name: path.file_name().unwrap().to_string_lossy().into_owned(),
            sha256: sha256_hex(&bytes),
        });
    }
    let summary = RunSummary {
        formulation: cfg.formulation.as_str().into(),
        output_dir: out.to_path_buf(),
        dt: sim.dt,
        steps: sim.steps,
        dofs: dofs.blocks.iter().cloned().collect(),
        total_dofs: dofs.total,
        constrained_dofs: dofs.constrained,
        peak_energy: output.energy.energy.iter().copied().fold(0.0, f64::max),
        final_energy: *output.energy.energy.last().unwrap(),
        seconds: clock.elapsed().as_secs_f64(),
        files,
    };
    let manifest = toml::to_string(&summary).map_err(|e| Error::Config(e.to_string())).stage("output")?;
    std::fs::write(out.join("manifest.toml"), manifest).stage("output")?;
    log::info!("{} finished in {:.1} s", cfg.formulation.as_str(), summary.seconds);
    Ok(summary)
}

fn trace_ids(dir: &Path) -> Result<Vec<String>> {
    let mut ids: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().to_string_lossy().into_owned();
            Some(name.strip_prefix("trace_")?.strip_suffix(".csv")?.to_string())
        })
        .collect();
    ids.sort();
    Ok(ids)
}

/// Writes `error_<id>.csv` into `run_dir` for every trace the two
/// directories share, and `errors_summary.csv` with the maxima and means.
pub fn compare(run_dir: &Path, reference_dir: &Path) -> Result<Vec<TraceErrors>> {
    let ids: Vec<String> = trace_ids(run_dir)
        .stage("compare")?
        .into_iter()
        .filter(|id| reference_dir.join(format!("trace_{id}.csv")).exists())
        .collect();
    if ids.is_empty() {
        return Err(Error::Config(format!(
            "{} and {} share no trace files",
            run_dir.display(),
            reference_dir.display()
        )))
        .stage("compare");
    }
    let mut all = Vec::new();
    for id in &ids {
        let open = |d: &Path| -> Result<TraceRecord> { read_trace(File::open(d.join(format!("trace_{id}.csv")))?, id) };
        let errors = trace_errors(&open(run_dir)?, &open(reference_dir)?).stage("compare")?;
        write_errors(create(&run_dir.join(format!("error_{id}.csv")))?, &errors).stage("compare")?;
        all.push(errors);
    }
    let mut w = csv::Writer::from_path(run_dir.join("errors_summary.csv"))?;
    w.write_record(["id", "max_e_u", "max_e_w", "max_e_p", "mean_e_u", "mean_e_w", "mean_e_p"])?;
    for e in &all {
        let (mx, mn) = (e.max(), e.mean());
        let mut row = vec![e.id.clone()];
        row.extend(mx.iter().chain(&mn).map(|v| format!("{v:.16e}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(all)
}
