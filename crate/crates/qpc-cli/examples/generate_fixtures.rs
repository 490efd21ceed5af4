//! Regenerates fixtures/workspace.json from library constructors.
//!
//! Run from the crate directory:
//!   cargo run -p qpc-cli --example generate_fixtures > fixtures/workspace.json

use num_complex::Complex64 as C64;
use serde_json::json;

use qpc::linalg::{basis_vector, outer, ComplexMatrix};
use qpc::measurement::von_neumann_model;
use qpc::spectral::PovmOutcome;
use qpc::{HermitianObservable, Povm, ToleranceProfile};

fn matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.rows())
            .map(|r| {
                serde_json::Value::Array(
                    (0..m.cols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect(),
                )
            })
            .collect(),
    )
}

fn vector_json(v: &[C64]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn main() {
    let tol = ToleranceProfile::default();
    let sigma_z = ComplexMatrix::diagonal(&[1.0, -1.0]);
    let sigma_x = ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let x4 = ComplexMatrix::from_real(&[
        &[1.0, 1.0, 0.0, 0.0],
        &[1.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ]);
    let y4 = ComplexMatrix::from_real(&[
        &[1.0, 1.0, 0.0, 0.0],
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 1.0],
        &[0.0, 0.0, 1.0, 1.0],
    ]);

    let r = 1.0 / 2f64.sqrt();
    let zero = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let plus = vec![C64::new(r, 0.0), C64::new(r, 0.0)];
    let e1_4 = basis_vector(4, 0);
    let bell = vec![C64::new(r, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(r, 0.0)];
    // √0.7 |01⟩ + √0.3 |10⟩: the crossed Schmidt pairing keeps the Hardy
    // search viable with the same observable on both legs
    let tilted = vec![
        C64::new(0.0, 0.0),
        C64::new(0.7f64.sqrt(), 0.0),
        C64::new(0.3f64.sqrt(), 0.0),
        C64::new(0.0, 0.0),
    ];
    let mixed2 = ComplexMatrix::identity(2).scale_re(0.5);

    let trine: Vec<serde_json::Value> = (0..3)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            let v = vec![C64::new((ang / 2.0).cos(), 0.0), C64::new((ang / 2.0).sin(), 0.0)];
            json!({"label": k as f64, "effect": matrix_json(&outer(&v, &v).scale_re(2.0 / 3.0))})
        })
        .collect();
    let eta = 0.6;
    let i2 = ComplexMatrix::identity(2);
    let noisy = vec![
        json!({"label": 1.0, "effect": matrix_json(&i2.add(&sigma_z.scale_re(eta)).scale_re(0.5))}),
        json!({"label": -1.0, "effect": matrix_json(&i2.sub(&sigma_z.scale_re(eta)).scale_re(0.5))}),
    ];
    let sz_obs = HermitianObservable::new(sigma_z.clone(), &tol).unwrap();
    let sz_povm = Povm::from_observable(&sz_obs);
    let sz_proj: Vec<serde_json::Value> = sz_povm
        .outcomes()
        .iter()
        .map(|o: &PovmOutcome| json!({"label": o.label, "effect": matrix_json(&o.effect)}))
        .collect();

    let vn = von_neumann_model(&sz_obs, None, &tol).unwrap();

    let doc = json!({
        "version": 1,
        "observables": {
            "sigma_z": matrix_json(&sigma_z),
            "sigma_x": matrix_json(&sigma_x),
            "x4": matrix_json(&x4),
            "y4": matrix_json(&y4),
        },
        "states": {
            "zero": {"kind": "vector", "data": vector_json(&zero)},
            "plus": {"kind": "vector", "data": vector_json(&plus)},
            "e1_4": {"kind": "vector", "data": vector_json(&e1_4)},
            "bell": {"kind": "vector", "data": vector_json(&bell)},
            "tilted": {"kind": "vector", "data": vector_json(&tilted)},
            "mixed2": {"kind": "density", "data": matrix_json(&mixed2)},
        },
        "povms": {
            "trine": trine,
            "noisy": noisy,
            "sz_proj": sz_proj,
        },
        "processes": {
            "vn_sigma_z": {
                "probe_dim": vn.probe_dim,
                "probe_state": vector_json(&vn.probe_state),
                "unitary": matrix_json(&vn.interaction),
                "meter": matrix_json(vn.meter.matrix()),
            },
        },
        "instruments": {},
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
}
