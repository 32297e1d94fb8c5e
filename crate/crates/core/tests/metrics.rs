mod common;

use common::{set2, tiny_geometry, tiny_mesh};
use poropml::forms::{build_biot, build_hybrid, Block};
use poropml::metrics::{trace_errors, EnergyOperator, Probe, TracePoint, TraceRecord};
use poropml::mesh::RegionKind;
use poropml::presets::MeshVariant;
use poropml::sparse::{SparseMatrix, TripletList};
use proptest::prelude::*;

#[test]
fn uniform_velocity_energy_is_kinetic() {
    let layering = set2();
    for variant in [MeshVariant::Rd, MeshVariant::Pml] {
        let mesh = tiny_mesh(variant, &layering);
        let mats = common::materials(&mesh, &layering);
        let sys = if variant == MeshVariant::Rd { build_biot(&mesh, &mats, None) } else { build_hybrid(&mesh, &mats, None, None) }.unwrap();
        let op = EnergyOperator::new(&mesh, &sys, &mats, false).unwrap();
        let n = sys.ndofs();
        assert_eq!(op.energy(&vec![0.0; n], &vec![0.0; n]), 0.0);
        let c = [0.3, -1.2];
        let mut v = vec![0.0; n];
        for d in sys.layout.range(Block::U).unwrap() {
            v[d] = c[d % 2];
        }
        let g = tiny_geometry();
        let area = 2.0 * g.half_width * g.depth;
        let rho = mats.of(0).rho;
        let expected = 0.5 * rho * area * (c[0] * c[0] + c[1] * c[1]);
        let e = op.energy(&vec![0.0; n], &v);
        assert!((e - expected).abs() < 1e-12 * expected, "{variant:?}: {e} vs {expected}");
    }
}

#[test]
fn probes_only_accept_regular_domain_points() {
    let mesh = tiny_mesh(MeshVariant::Pml, &set2());
    assert!(Probe::new(&mesh, TracePoint { id: "in".into(), x: 2.0, y: -2.0 }).is_ok());
    assert!(Probe::new(&mesh, TracePoint { id: "pml".into(), x: 8.0, y: -2.0 }).is_err());
    assert!(mesh.has_kind(RegionKind::Pml));
}

fn energy_setup() -> (poropml::mesh::Mesh, poropml::forms::SystemTriplet, poropml::forms::CellMaterials) {
    let layering = set2();
    let mesh = tiny_mesh(MeshVariant::Rd, &layering);
    let mats = common::materials(&mesh, &layering);
    let sys = build_biot(&mesh, &mats, None).unwrap();
    (mesh, sys, mats)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_is_quadratic(seed in 0u64..1000, lambda in -5.0f64..5.0) {
        let (mesh, sys, mats) = energy_setup();
        let op = EnergyOperator::new(&mesh, &sys, &mats, false).unwrap();
        let n = sys.ndofs();
        let gen = |k: usize, salt: f64| ((k as f64 + 1.0) * (seed as f64 + salt)).sin() * 1e-3;
        let x: Vec<f64> = (0..n).map(|k| gen(k, 0.5)).collect();
        let v: Vec<f64> = (0..n).map(|k| gen(k, 0.25)).collect();
        let e = op.energy(&x, &v);
        let xs: Vec<f64> = x.iter().map(|a| lambda * a).collect();
        let vs: Vec<f64> = v.iter().map(|a| lambda * a).collect();
        let es = op.energy(&xs, &vs);
        prop_assert!((es - lambda * lambda * e).abs() <= 1e-12 * (lambda * lambda * e).abs().max(1e-300));
    }

    #[test]
    fn trace_errors_of_identical_records_vanish(values in prop::collection::vec(prop::array::uniform5(-1.0f64..1.0), 2..40)) {
        let times: Vec<f64> = (0..values.len()).map(|k| k as f64 * 1e-3).collect();
        let mut values = values;
        values[0] = [1.0; 5];
        let rec = TraceRecord { id: "a".into(), times, values };
        let e = trace_errors(&rec, &rec).unwrap();
        prop_assert!(e.errors.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn trace_errors_follow_time_relabeling(
        values in prop::collection::vec((prop::array::uniform5(-1.0f64..1.0), prop::array::uniform5(-1.0f64..1.0)), 2..30),
        rotate in 0usize..30,
    ) {
        let n = values.len();
        let times: Vec<f64> = (0..n).map(|k| k as f64 * 1e-3).collect();
        let mut reference: Vec<[f64; 5]> = values.iter().map(|v| v.0).collect();
        reference[0] = [1.0; 5];
        let run: Vec<[f64; 5]> = values.iter().map(|v| v.1).collect();
        let base = trace_errors(
            &TraceRecord { id: "a".into(), times: times.clone(), values: run.clone() },
            &TraceRecord { id: "a".into(), times: times.clone(), values: reference.clone() },
        ).unwrap();
        let r = rotate % n;
        let rot = |v: &[[f64; 5]]| { let mut v = v.to_vec(); v.rotate_left(r); v };
        let mut t2 = times.clone();
        t2.rotate_left(r);
        let moved = trace_errors(
            &TraceRecord { id: "a".into(), times: t2.clone(), values: rot(&run) },
            &TraceRecord { id: "a".into(), times: t2, values: rot(&reference) },
        ).unwrap();
        let mut expected = base.errors.clone();
        expected.rotate_left(r);
        prop_assert_eq!(moved.errors, expected);
    }

    #[test]
    fn sparse_matvec_matches_dense(entries in prop::collection::vec((0usize..7, 0usize..5, -10.0f64..10.0), 0..40), x in prop::array::uniform5(-3.0f64..3.0)) {
        let mut t = TripletList::new(7, 5);
        let mut dense = vec![vec![0.0; 5]; 7];
        for &(r, c, v) in &entries {
            t.push(r, c, v);
            dense[r][c] += v;
        }
        let a: SparseMatrix = t.to_csr();
        let y = a.matvec(&x);
        for r in 0..7 {
            let expect: f64 = (0..5).map(|c| dense[r][c] * x[c]).sum();
            prop_assert!((y[r] - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
        prop_assert_eq!(a.transpose().transpose(), a);
    }
}
