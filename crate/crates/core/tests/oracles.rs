//! Checks against values frozen by the Python scripts in `tests/oracles/`.

use std::path::PathBuf;

use serde_json::Value;

use cvweno::element::{ElementField, ElementOperators, ReferenceElement, SpaceKind};
use cvweno::mesh::build_mesh;
use cvweno::physics::ConservationLaw;
use cvweno::solver::{BoundaryConditions, DiscreteSystem, Initialization, SchemeOptions, SensorMode};
use cvweno::stabilization::{dissipation_rate, shock_capturing_weights};
use cvweno::weno::{reconstruct_all, smoothness_sensor, WenoParams, WenoScheme};

fn oracle(name: &str) -> Value {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "oracles", name].iter().collect();
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn assert_close(got: &[f64], want: &[f64], tol: f64, what: &str) {
    assert_eq!(got.len(), want.len(), "{what}: length");
    for (i, (a, b)) in got.iter().zip(want).enumerate() {
        assert!((a - b).abs() <= tol, "{what}[{i}]: {a} vs {b}");
    }
}

#[test]
fn dg_residual_matches_dense_operator() {
    let o = oracle("dg_dense_residual.json");
    let p = o["degree"].as_u64().unwrap() as usize;
    let cases: [(&str, usize, fn(f64, f64) -> f64); 2] = [
        ("case_1d", 1, |x, _| (2.0 * std::f64::consts::PI * x).sin() + 0.5),
        ("case_2d", 2, |x, y| {
            (2.0 * std::f64::consts::PI * x).sin() * (2.0 * std::f64::consts::PI * y).cos() + 0.25
        }),
    ];
    for (key, dim, f) in cases {
        let case = &o[key];
        let cells = floats(&case["cells"]);
        let vel = floats(&case["velocity"]);
        let mesh = build_mesh(
            dim,
            [[0.0, 1.0], [0.0, 1.0]],
            [cells[0] as usize, cells[1] as usize],
            [true, dim == 2],
        )
        .unwrap();
        let system = DiscreteSystem::new(
            mesh,
            p,
            SpaceKind::Discontinuous,
            ConservationLaw::constant_advection([vel[0], vel[1]]),
            BoundaryConditions::periodic(),
            SchemeOptions {
                sensor: SensorMode::Off,
                ..SchemeOptions::default()
            },
        )
        .unwrap();
        let u = system
            .initialize(&|x| [f(x[0], x[1]), 0.0, 0.0, 0.0], Initialization::Interpolation)
            .unwrap();
        assert_close(&u, &floats(&case["u"]), 1e-14, key);
        let r = system.assemble_rhs(&u, 0.0).unwrap();
        assert_close(&r, &floats(&case["residual"]), 1e-11, key);
    }
}

#[test]
fn cell_vertex_step_reconstruction() {
    let o = oracle("cv_step_1d.json");
    let mesh = build_mesh(1, [[0.0, 1.0], [0.0, 1.0]], [6, 1], [false, false]).unwrap();
    let elem = ReferenceElement::new(1, 2).unwrap();
    let ops = ElementOperators::new(&elem, mesh.spacing(), false).unwrap();
    let params = WenoParams::with_scheme(WenoScheme::CellVertex);
    for key in ["vertex_step", "cell_step"] {
        let case = &o[key];
        let at = case["step_at"].as_f64().unwrap();
        let blocks: Vec<Vec<f64>> = (0..mesh.num_cells())
            .map(|e| elem.interpolate(&mesh.cell_geometry(e), |x| if x[0] < at { 0.0 } else { 1.0 }))
            .collect();
        let field = ElementField::from_blocks(&blocks);
        let sets = reconstruct_all(&field, &mesh, &ops, &params).unwrap();
        let gammas = floats(&case["gamma"]);
        for (e, set) in sets.iter().enumerate() {
            let rec = set.reconstruction();
            assert_close(&rec, &floats(&case["reconstruction"][e]), 1e-12, key);
            let gamma = smoothness_sensor(field.block(e, 0), &rec, &ops, &params);
            assert!((gamma - gammas[e]).abs() <= 1e-10, "{key} γ[{e}]: {gamma} vs {}", gammas[e]);
        }
    }
}

#[test]
fn shock_capturing_profile_of_centred_step() {
    let o = oracle("alpha_profile.json");
    let p = o["degree"].as_u64().unwrap() as usize;
    let h = o["h"].as_f64().unwrap();
    let elem = ReferenceElement::new(1, p).unwrap();
    let ops = ElementOperators::new(&elem, [h, h], false).unwrap();
    let xq: Vec<f64> = ops.quad.points.iter().map(|x| x[0] * h).collect();
    assert_close(&xq, &floats(&o["quad_points"]), 1e-15, "quad points");
    let u = floats(&o["nodal"]);
    let (d, f) = dissipation_rate(&u, None, &ops, 0.0, 1.0);
    let alpha = shock_capturing_weights(&u, &ops, &f, 0.0, 0.9);
    assert_close(&alpha, &floats(&o["alpha"]), 1e-12, "alpha");
    let scaled: f64 = (0..f.len()).map(|q| ops.weights[q] * alpha[q] * f[q]).sum();
    assert!((scaled - d).abs() <= 1e-12 * d.abs());
}
