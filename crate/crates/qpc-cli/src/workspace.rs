//! Workspace file: a single JSON document holding named observables, states,
//! POVMs, measuring processes, and instruments.
//!
//! Complex scalars are `[re, im]` pairs; matrices are arrays of rows.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;

use qpc::linalg::vec_norm;
use qpc::measurement::{Instrument, InstrumentOutcome, MeasuringProcess};
use qpc::spectral::PovmOutcome;
use qpc::{ComplexMatrix, HermitianObservable, Povm, QuantumState, ToleranceProfile, C64};

pub const WORKSPACE_VERSION: u64 = 1;

pub struct Workspace {
    pub observables: BTreeMap<String, HermitianObservable>,
    pub states: BTreeMap<String, QuantumState>,
    pub povms: BTreeMap<String, Povm>,
    pub processes: BTreeMap<String, MeasuringProcess>,
    pub instruments: BTreeMap<String, Instrument>,
}

pub fn complex_from_json(v: &Value) -> Result<C64> {
    let pair = v.as_array().ok_or_else(|| anyhow!("complex scalar must be [re, im]"))?;
    if pair.len() != 2 {
        bail!("complex scalar must be [re, im]");
    }
    Ok(C64::new(
        pair[0].as_f64().ok_or_else(|| anyhow!("non-numeric real part"))?,
        pair[1].as_f64().ok_or_else(|| anyhow!("non-numeric imaginary part"))?,
    ))
}

pub fn complex_to_json(z: C64) -> Value {
    serde_json::json!([z.re, z.im])
}

pub fn vector_from_json(v: &Value) -> Result<Vec<C64>> {
    v.as_array()
        .ok_or_else(|| anyhow!("vector must be an array"))?
        .iter()
        .map(complex_from_json)
        .collect()
}

pub fn vector_to_json(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|&z| complex_to_json(z)).collect())
}

pub fn matrix_from_json(v: &Value) -> Result<ComplexMatrix> {
    let rows = v.as_array().ok_or_else(|| anyhow!("matrix must be an array of rows"))?;
    if rows.is_empty() {
        bail!("matrix has no rows");
    }
    let mut data = Vec::new();
    let mut cols = None;
    for r in rows {
        let row = vector_from_json(r)?;
        if *cols.get_or_insert(row.len()) != row.len() {
            bail!("ragged matrix rows");
        }
        data.extend(row);
    }
    ComplexMatrix::new(rows.len(), cols.unwrap(), data).map_err(|e| anyhow!("{e}"))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array((0..m.cols()).map(|c| complex_to_json(m[(r, c)])).collect()))
            .collect(),
    )
}

pub fn load(path: &Path, tol: &ToleranceProfile) -> Result<Workspace> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read workspace {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).context("workspace is not valid JSON")?;
    let version = doc["version"].as_u64().unwrap_or(0);
    if version != WORKSPACE_VERSION {
        bail!("unsupported workspace version {version} (expected {WORKSPACE_VERSION})");
    }

    let mut ws = Workspace {
        observables: BTreeMap::new(),
        states: BTreeMap::new(),
        povms: BTreeMap::new(),
        processes: BTreeMap::new(),
        instruments: BTreeMap::new(),
    };

    if let Some(obj) = doc["observables"].as_object() {
        for (name, v) in obj {
            let m = matrix_from_json(v).with_context(|| format!("observable {name}"))?;
            let obs = HermitianObservable::new(m, tol)
                .map_err(|e| anyhow!("observable {name}: {e}"))?;
            ws.observables.insert(name.clone(), obs);
        }
    }
    if let Some(obj) = doc["states"].as_object() {
        for (name, v) in obj {
            let kind = v["kind"].as_str().unwrap_or("vector");
            let state = match kind {
                "vector" => {
                    let vec = vector_from_json(&v["data"])
                        .with_context(|| format!("state {name}"))?;
                    if (vec_norm(&vec) - 1.0).abs() > tol.tol_prob * 100.0 {
                        bail!("state {name}: vector is not normalized");
                    }
                    QuantumState::Vector(vec)
                }
                "density" => {
                    let m = matrix_from_json(&v["data"])
                        .with_context(|| format!("state {name}"))?;
                    QuantumState::Density(m)
                }
                other => bail!("state {name}: unknown kind {other}"),
            };
            state.validate(tol).map_err(|e| anyhow!("state {name}: {e}"))?;
            ws.states.insert(name.clone(), state);
        }
    }
    if let Some(obj) = doc["povms"].as_object() {
        for (name, v) in obj {
            let arr = v.as_array().ok_or_else(|| anyhow!("povm {name} must be an array"))?;
            let mut outcomes = Vec::new();
            for o in arr {
                outcomes.push(PovmOutcome {
                    label: o["label"]
                        .as_f64()
                        .ok_or_else(|| anyhow!("povm {name}: missing label"))?,
                    effect: matrix_from_json(&o["effect"])
                        .with_context(|| format!("povm {name}"))?,
                });
            }
            let povm = Povm::new(outcomes, tol).map_err(|e| anyhow!("povm {name}: {e}"))?;
            ws.povms.insert(name.clone(), povm);
        }
    }
    if let Some(obj) = doc["processes"].as_object() {
        for (name, v) in obj {
            let probe_dim = v["probe_dim"]
                .as_u64()
                .ok_or_else(|| anyhow!("process {name}: missing probe_dim"))?
                as usize;
            let probe_state = vector_from_json(&v["probe_state"])
                .with_context(|| format!("process {name}"))?;
            let unitary =
                matrix_from_json(&v["unitary"]).with_context(|| format!("process {name}"))?;
            let meter_matrix =
                matrix_from_json(&v["meter"]).with_context(|| format!("process {name}"))?;
            let meter = HermitianObservable::new(meter_matrix, tol)
                .map_err(|e| anyhow!("process {name}: {e}"))?;
            let mp = MeasuringProcess::new(probe_dim, probe_state, unitary, meter, tol)
                .map_err(|e| anyhow!("process {name}: {e}"))?;
            ws.processes.insert(name.clone(), mp);
        }
    }
    if let Some(obj) = doc["instruments"].as_object() {
        for (name, v) in obj {
            let arr =
                v.as_array().ok_or_else(|| anyhow!("instrument {name} must be an array"))?;
            let mut outcomes = Vec::new();
            for o in arr {
                let kraus = o["kraus"]
                    .as_array()
                    .ok_or_else(|| anyhow!("instrument {name}: missing kraus list"))?
                    .iter()
                    .map(matrix_from_json)
                    .collect::<Result<Vec<_>>>()
                    .with_context(|| format!("instrument {name}"))?;
                outcomes.push(InstrumentOutcome {
                    label: o["label"]
                        .as_f64()
                        .ok_or_else(|| anyhow!("instrument {name}: missing label"))?,
                    kraus,
                });
            }
            ws.instruments.insert(name.clone(), Instrument { outcomes });
        }
    }
    Ok(ws)
}

impl Workspace {
    pub fn observable(&self, name: &str) -> Result<&HermitianObservable> {
        self.observables.get(name).ok_or_else(|| anyhow!("unknown observable: {name}"))
    }

    pub fn state(&self, name: &str) -> Result<&QuantumState> {
        self.states.get(name).ok_or_else(|| anyhow!("unknown state: {name}"))
    }

    pub fn povm(&self, name: &str) -> Result<&Povm> {
        self.povms.get(name).ok_or_else(|| anyhow!("unknown povm: {name}"))
    }

    pub fn process(&self, name: &str) -> Result<&MeasuringProcess> {
        self.processes.get(name).ok_or_else(|| anyhow!("unknown process: {name}"))
    }
}
