//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test -p poropml --test acceptance` runs everything; numeric
//! arguments (`-- 3 5`) select criteria. The desk Experiment-1 runs shared
//! by criteria 2-4 take a few minutes.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use common::{jittered_square, mass_min_eigenvalues, max_relative_difference, p2_patch_errors, set2, stretching, tiny_geometry, tiny_mesh, trajectory};
use poropml::config::StretchingSettings;
use poropml::fem::assembly::assemble_matrix;
use poropml::fem::{build_space, SpaceKind, Support};
use poropml::forms::{build_biot, build_fully_mixed, build_hybrid, ricker, ricker_duration, CellMaterials, SourceSpec};
use poropml::materials::{derive, MaterialSet};
use poropml::mesh::{BoundaryLabel, Mesh, RegionInfo, RegionKind};
use poropml::metrics::{trace_errors, TraceErrors};
use poropml::presets::{self, MeshVariant, Preset};
use poropml::runner::{RunOutput, Simulation};
use poropml::sparse::SparseMatrix;
use poropml::stretching::StretchingMode;
use poropml::timeint::{cfl_dt, Newmark, NewmarkState};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct DeskRun {
    output: RunOutput,
    seconds: f64,
    dofs: usize,
}

struct Desk {
    preset: Preset,
    runs: BTreeMap<&'static str, DeskRun>,
}

impl Desk {
    fn run(&self, name: &str) -> &DeskRun {
        &self.runs[name]
    }

    fn errors(&self, name: &str) -> Vec<TraceErrors> {
        let reference = &self.run("extended").output.traces;
        self.run(name)
            .output
            .traces
            .iter()
            .zip(reference)
            .map(|(r, e)| trace_errors(r, e).unwrap())
            .collect()
    }
}

fn desk_mesh(preset: &Preset, variant: MeshVariant) -> Mesh {
    let (raw, dict) = preset.geometry.mesh(variant, &preset.layering);
    Mesh::from_raw(&raw, &dict).unwrap()
}

/// Experiment-1 desk runs, computed once.
fn desk() -> &'static Desk {
    static DESK: OnceLock<Desk> = OnceLock::new();
    DESK.get_or_init(|| {
        let preset = presets::preset("exp1-desk").unwrap();
        let mut runs = BTreeMap::new();
        for (name, _, variant) in presets::RUNS {
            let clock = Instant::now();
            let cfg = preset.config(name).unwrap();
            let sim = Simulation::new(&cfg, desk_mesh(&preset, variant)).unwrap();
            let dofs = sim.system.ndofs();
            let output = sim.run(|_| Ok(())).unwrap();
            let seconds = clock.elapsed().as_secs_f64();
            eprintln!("  exp1-desk {name}: {dofs} dofs, {} steps, {seconds:.1} s", sim.steps);
            runs.insert(name, DeskRun { output, seconds, dofs });
        }
        Desk { preset, runs }
    })
}

fn criterion_1() -> Outcome {
    let clock = Instant::now();
    let layering = set2();
    let mesh = tiny_mesh(MeshVariant::Pml, &layering);
    let mats = common::materials(&mesh, &layering);
    let src = SourceSpec::default();
    let id = stretching(&mesh, &mats, &tiny_geometry(), StretchingMode::Pml, 0.0, Some(0.0), 0.0);
    let biot = build_biot(&mesh, &mats, Some(&src)).unwrap();
    let fm = build_fully_mixed(&mesh, &mats, Some(&id), Some(&src)).unwrap();
    let hy = build_hybrid(&mesh, &mats, Some(&id), Some(&src)).unwrap();
    let steps = 500;
    let reference = trajectory(&mesh, &biot, 1e-3, steps);
    let worst = |t: &[[Vec<f64>; 3]]| (0..3).map(|k| max_relative_difference(t, &reference, k)).fold(0.0, f64::max);
    let (dfm, dhy) = (worst(&trajectory(&mesh, &fm, 1e-3, steps)), worst(&trajectory(&mesh, &hy, 1e-3, steps)));
    let secs = clock.elapsed().as_secs_f64();
    check(
        dfm <= 1e-6 && dhy <= 1e-6 && fm.ndofs() <= 5000 && secs < 60.0,
        format!(
            "{steps} steps, fully-mixed {} dofs: rel diff {dfm:.2e}, hybrid {} dofs: rel diff {dhy:.2e} (<= 1e-6), {secs:.1} s",
            fm.ndofs(),
            hy.ndofs()
        ),
    )
}

fn criterion_2() -> Outcome {
    let d = desk();
    let (hy, fm) = (d.run("hybrid"), d.run("fully_mixed"));
    let (eh, ef) = (&hy.output.energy.energy, &fm.output.energy.energy);
    let scale = ef.iter().copied().fold(0.0, f64::max);
    let diff = eh.iter().zip(ef).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
    let secs = hy.seconds + fm.seconds;
    check(
        diff <= 0.01 && secs < 600.0,
        format!("energy max-norm rel diff {diff:.2e} (<= 1e-2), {} vs {} dofs, {secs:.0} s", hy.dofs, fm.dofs),
    )
}

fn criterion_3() -> Outcome {
    let d = desk();
    let e = &d.run("hybrid").output.energy.energy;
    let decay = e.last().unwrap() / e.iter().copied().fold(0.0, f64::max);
    let hybrid = d.errors("hybrid");
    let paraxial = d.errors("paraxial");
    let mut ok = decay <= 1e-2;
    let mut parts = vec![format!("E(T)/max E = {decay:.2e} (<= 1e-2)")];
    for (h, p) in hybrid.iter().zip(&paraxial) {
        let (eh, ep) = (h.max()[0], p.max()[0]);
        ok &= eh <= 5e-2 && ep >= 10.0 * eh;
        parts.push(format!("{}: hybrid max e_u {eh:.2e} (<= 5e-2), paraxial {ep:.2e} ({:.0}x, >= 10x)", h.id, ep / eh));
    }
    let secs = ["extended", "paraxial", "hybrid"].iter().map(|n| d.run(n).seconds).sum::<f64>();
    ok &= secs < 1200.0;
    parts.push(format!("{secs:.0} s"));
    check(ok, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let d = desk();
    let mesh = desk_mesh(&d.preset, MeshVariant::Pml);
    let sets: BTreeMap<String, MaterialSet> = [("set2".to_string(), MaterialSet::preset("set2").unwrap())].into();
    let mats = CellMaterials::new(&mesh, &sets).unwrap();
    let g = &d.preset.geometry;
    let settings = |mode| StretchingSettings {
        rd_box: [[-g.half_width, g.half_width], [-g.depth, 0.0]],
        mode,
        alpha0: Some(0.0),
        p_yx: 0.0,
        p_xy: 0.0,
        ..StretchingSettings::default()
    };
    let build = |mode| {
        let s = settings(mode).resolve(&mesh, &mats).unwrap();
        build_hybrid(&mesh, &mats, Some(&s), None).unwrap()
    };
    let (a, b) = (build(StretchingMode::Pml), build(StretchingMode::Mpml));
    let same = |x: &SparseMatrix, y: &SparseMatrix| x == y;
    let bitwise = same(&a.m, &b.m) && same(&a.c, &b.c) && same(&a.k, &b.k);
    let pml = *d.run("hybrid").output.energy.energy.last().unwrap();
    let mpml = *d.run("mpml").output.energy.energy.last().unwrap();
    check(
        bitwise && mpml.is_finite() && mpml <= 2.0 * pml,
        format!("p = 0, alpha0 = 0 matrices bitwise equal: {bitwise}; p = 0.01 final energy {mpml:.3e} vs PML {pml:.3e} (<= 2x)"),
    )
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, table) in [("set2", 62.0), ("set3", 4.0), ("set4", 318.0)] {
        let fc = derive(&MaterialSet::preset(name).unwrap()).unwrap().f_c;
        let rel = (fc - table) / table;
        ok &= rel.abs() <= 0.02;
        parts.push(format!("{name} f_c {fc:.2} Hz vs {table} ({:+.2}%)", 100.0 * rel));
    }
    let d = derive(&MaterialSet::preset("set1").unwrap()).unwrap();
    let expected = [("rho", d.rho, 2125.0), ("rho_w", d.rho_w, 3600.0), ("alpha", d.alpha, 1.0 / 6.0), ("M", d.m, 7.2e9)];
    for (name, got, want) in expected {
        let rel = ((got - want) / want).abs();
        ok &= rel <= 1e-12;
        parts.push(format!("set1 {name} rel err {rel:.1e}"));
    }
    check(ok, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let f = 15.0;
    let w = 2.0 * std::f64::consts::PI * f;
    let t_min = 3.0 * 6f64.sqrt() / w;
    let end = 6.0 * 6f64.sqrt() / w;
    let zero_start = ricker(0.0, f) == 0.0;
    let min = ricker(t_min, f);
    let sampled_min = (0..=10000).map(|k| ricker(end * k as f64 / 10000.0, f)).fold(f64::INFINITY, f64::min);
    let silent = (1..1000).all(|k| ricker(end * (1.0 + k as f64 * 1e-3), f) == 0.0);
    let duration = ricker_duration(f);
    let ok_min = (min + 1.0).abs() <= 1e-12 && sampled_min >= min;
    let ok_duration = (duration - 0.15589).abs() <= 1e-5;
    check(
        zero_start && ok_min && silent && ok_duration,
        format!(
            "S(0) == 0: {zero_start}; min S = {min:.15} at 3 sqrt6/w_r; S == 0 after 6 sqrt6/w_r: {silent}; duration {duration:.7} s vs 0.15589 +- 1e-5"
        ),
    )
}

fn criterion_7() -> Outcome {
    let oscillator = |zeta: f64, omega: f64, dt: f64, steps: usize| {
        let m = SparseMatrix::from_dense(&[vec![1.0]]);
        let c = SparseMatrix::from_dense(&[vec![2.0 * zeta * omega]]);
        let k = SparseMatrix::from_dense(&[vec![omega * omega]]);
        let mut nm = Newmark::new(&m, &c, &k, dt).unwrap();
        let mut s = NewmarkState::zeros(1);
        s.x[0] = 1.0;
        s.a[0] = -omega * omega;
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            nm.step(&mut s, &[0.0]);
            out.push((s.t, s.x[0], s.v[0]));
        }
        out
    };
    let (zeta, omega): (f64, f64) = (0.05, 2.0 * std::f64::consts::PI);
    let wd = omega * (1.0 - zeta * zeta).sqrt();
    let exact = |t: f64| (-zeta * omega * t).exp() * ((wd * t).cos() + zeta * omega / wd * (wd * t).sin());
    let err = |dt: f64| {
        oscillator(zeta, omega, dt, (1.0 / dt).round() as usize)
            .iter()
            .map(|&(t, x, _)| (x - exact(t)).abs())
            .fold(0.0, f64::max)
    };
    let e = [err(4e-3), err(2e-3), err(1e-3)];
    let orders = [(e[0] / e[1]).log2(), (e[1] / e[2]).log2()];
    let drift = oscillator(0.0, omega, 0.01, 1000)
        .iter()
        .map(|&(_, x, v)| ((x * x + (v / omega).powi(2)).sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    check(
        orders.iter().all(|o| (1.8..=2.2).contains(o)) && drift < 1e-8,
        format!("observed orders {:.3}, {:.3} (in [1.8, 2.2]); undamped amplitude drift {drift:.1e} (< 1e-8)", orders[0], orders[1]),
    )
}

fn criterion_8() -> Outcome {
    let mut regions = BTreeMap::new();
    regions.insert(1, RegionInfo { kind: RegionKind::Rd, material: "set1".into() });
    let lines: Vec<([usize; 2], BoundaryLabel)> = [[0, 1], [1, 2], [2, 0]].into_iter().map(|e| (e, BoundaryLabel::FreeSurfaceRd)).collect();
    let tri = Mesh::build(vec![[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], vec![1], regions, &lines).unwrap();
    let p1 = build_space(&tri, SpaceKind::P1Scalar, Support::All, &[]).unwrap();
    let mass = assemble_matrix(&tri, &p1, &p1, |_, a, b| a.scalar() * b.scalar()).unwrap().to_dense();
    let stiff = assemble_matrix(&tri, &p1, &p1, |_, a, b| a.grad[0][0] * b.grad[0][0] + a.grad[0][1] * b.grad[0][1])
        .unwrap()
        .to_dense();
    let mass_hand = [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]].map(|r| r.map(|v| v / 12.0));
    let stiff_hand = [[1.25, -0.25, -1.0], [-0.25, 0.25, 0.0], [-1.0, 0.0, 1.0]];
    let mut hand_err = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            hand_err = hand_err.max((mass[i][j] - mass_hand[i][j]).abs()).max((stiff[i][j] - stiff_hand[i][j]).abs());
        }
    }
    let (nodal, strain) = p2_patch_errors(&jittered_square(4, BoundaryLabel::FreeSurfaceRd));
    let eig = mass_min_eigenvalues(&jittered_square(3, BoundaryLabel::FreeSurfaceRd));
    let spd = eig.iter().all(|&(_, n, l)| n <= 200 && l > 0.0);
    let eig_text: Vec<String> = eig.iter().map(|(k, n, l)| format!("{k:?} ({n} dofs) {l:.2e}")).collect();
    check(
        hand_err <= 1e-13 && nodal <= 1e-12 && strain <= 1e-12 && spd,
        format!(
            "P1 hand-value err {hand_err:.1e}; P2 patch nodal {nodal:.1e}, strain {strain:.1e}; min mass eigenvalues {}",
            eig_text.join(", ")
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in presets::PRESETS {
        let preset = presets::preset(name).unwrap();
        let mesh = desk_mesh(&preset, MeshVariant::Pml);
        let cfg = preset.config("hybrid").unwrap();
        let sets = cfg.material_sets().unwrap();
        let mats = CellMaterials::new(&mesh, &sets).unwrap();
        let s = cfg.stretching.as_ref().unwrap().resolve(&mesh, &mats).unwrap();
        let fm = build_fully_mixed(&mesh, &mats, Some(&s), None).unwrap().ndofs();
        let hy = build_hybrid(&mesh, &mats, Some(&s), None).unwrap().ndofs();
        let ratio = fm as f64 / hy as f64;
        ok &= hy < fm && (1.3..=2.2).contains(&ratio);
        parts.push(format!("{name}: {fm}/{hy} = {ratio:.3}"));
    }
    check(ok, format!("fully-mixed/hybrid dofs in [1.3, 2.2]: {}", parts.join(", ")))
}

fn criterion_10() -> Outcome {
    let bound = cfl_dt(7.8, 2366.0, 0.75);
    check(
        (bound - 2.472e-3).abs() <= 1e-6 && 1e-3 < bound,
        format!("cfl_dt(7.8, 2366, 0.75) = {bound:.6e} s; dt = 1e-3 s below the bound"),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "reduction to Biot", criterion_1),
        (2, "hybrid equals fully-mixed", criterion_2),
        (3, "absorption", criterion_3),
        (4, "multiaxial consistency", criterion_4),
        (5, "material table", criterion_5),
        (6, "Ricker identities", criterion_6),
        (7, "Newmark order", criterion_7),
        (8, "FEM oracles", criterion_8),
        (9, "dof accounting", criterion_9),
        (10, "CFL", criterion_10),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (n, title, f) in criteria {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        ran += 1;
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2} {status} {title}: {detail}");
    }
    println!("acceptance: {}/{ran} passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
