//! Batch CLI over the perfect-correlation toolkit.
//!
//! All analyses read named objects from a single JSON workspace file and
//! print a JSON report to stdout. Exit codes: 0 for an affirmative verdict
//! (or plain success), 1 for a negative verdict, 2 for errors.

mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qpc::bipartite::{entanglement, hardy_check, hardy_search, schmidt, HardyVerdict};
use qpc::correlation::{is_perfectly_correlated, perfectly_correlative_domain};
use qpc::dilation::{joint_dilate, naimark_dilate, povm_perfectly_correlated};
use qpc::joint_dist::{joint_distribution, JointVerdict};
use qpc::measurement::{measure, repeatability_trials, von_neumann_model};
use qpc::verifier::{run_suite, suite_ids, SuiteConfig};
use qpc::ToleranceProfile;
use workspace::{matrix_to_json, vector_to_json, Workspace};

#[derive(Parser)]
#[command(name = "qpc", about = "Quantum perfect-correlation analyses over a JSON workspace")]
struct Cli {
    /// Workspace JSON file with named observables, states, povms, processes.
    #[arg(long, global = true, default_value = "fixtures/workspace.json")]
    workspace: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide perfect correlation of two observables (or POVMs) in a state.
    Correlate {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        state: String,
        /// Treat --x/--y as POVM names instead of observables.
        #[arg(long)]
        povm: bool,
    },
    /// Compute the perfectly correlative domain {X=Y}.
    Domain {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Joint probability distribution of a pair in a state, when it exists.
    Jointdist {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        state: String,
    },
    /// Schmidt decomposition and entanglement entropy of a bipartite vector.
    Schmidt {
        #[arg(long)]
        state: String,
        /// Factor dimensions, e.g. 2,2.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        /// Report entropy in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Evaluate the Hardy conditions, optionally searching for observables.
    Hardy {
        #[arg(long)]
        state: String,
        /// Binary observable applied on both legs (with --d).
        #[arg(long, requires = "d")]
        u: Option<String>,
        #[arg(long, requires = "u")]
        d: Option<String>,
        /// Search for observables that put the state in the Hardy regime.
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Naimark dilation of one POVM, or the joint dilation of two.
    Dilate {
        #[arg(long)]
        povm1: String,
        #[arg(long)]
        povm2: Option<String>,
    },
    /// Apply a measuring process to a state; optionally sample outcomes.
    Measure {
        #[arg(long)]
        process: String,
        #[arg(long)]
        state: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Build the repeatable measurement model of a nondegenerate observable.
    Vnmodel {
        #[arg(long)]
        observable: String,
        /// Also measure this state with the model.
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a theorem-verification suite (or all of them).
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0x0b5eca11)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
        dims: Vec<usize>,
    },
}

fn emit(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable report"));
}

/// Affirmative (exit 0) or negative (exit 1) verdict.
fn verdict_code(affirmative: bool) -> ExitCode {
    if affirmative {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let tol = ToleranceProfile::default();
    let ws = workspace::load(&cli.workspace, &tol)?;
    match cli.command {
        Command::Correlate { x, y, state, povm } => cmd_correlate(&ws, &x, &y, &state, povm, &tol),
        Command::Domain { x, y } => cmd_domain(&ws, &x, &y, &tol),
        Command::Jointdist { x, y, state } => cmd_jointdist(&ws, &x, &y, &state, &tol),
        Command::Schmidt { state, dims, bits } => cmd_schmidt(&ws, &state, &dims, bits, &tol),
        Command::Hardy { state, u, d, search, resolution, seed } => {
            cmd_hardy(&ws, &state, u.as_deref(), d.as_deref(), search, resolution, seed, &tol)
        }
        Command::Dilate { povm1, povm2 } => cmd_dilate(&ws, &povm1, povm2.as_deref(), &tol),
        Command::Measure { process, state, samples, seed } => {
            cmd_measure(&ws, &process, &state, samples, seed, &tol)
        }
        Command::Vnmodel { observable, state, samples, seed } => {
            cmd_vnmodel(&ws, &observable, state.as_deref(), samples, seed, &tol)
        }
        Command::Verify { suite, trials, seed, dims } => cmd_verify(&suite, trials, seed, dims),
    }
}

fn cmd_correlate(
    ws: &Workspace,
    x: &str,
    y: &str,
    state: &str,
    as_povm: bool,
    tol: &ToleranceProfile,
) -> Result<ExitCode> {
    let s = ws.state(state)?;
    let verdict = if as_povm {
        povm_perfectly_correlated(ws.povm(x)?, ws.povm(y)?, s, tol)?
    } else {
        is_perfectly_correlated(ws.observable(x)?, ws.observable(y)?, s, tol)?
    };
    emit(&verdict.to_json());
    if verdict.correlated {
        eprintln!("{x} and {y} are perfectly correlated in {state}");
    } else if let Some(w) = &verdict.witness {
        eprintln!(
            "{x} and {y} are NOT perfectly correlated in {state}: \
             |Tr[E({:.6})E({:.6})rho]| = {:.3e}",
            w.lambda, w.mu, w.magnitude
        );
    }
    Ok(verdict_code(verdict.correlated))
}

fn cmd_domain(ws: &Workspace, x: &str, y: &str, tol: &ToleranceProfile) -> Result<ExitCode> {
    let domain = perfectly_correlative_domain(ws.observable(x)?, ws.observable(y)?, tol)?;
    emit(&json!({
        "ambient_dim": domain.ambient_dim(),
        "dim": domain.dim(),
        "basis": domain.basis().iter().map(|b| vector_to_json(b)).collect::<Vec<_>>(),
    }));
    Ok(verdict_code(domain.dim() > 0))
}

fn cmd_jointdist(
    ws: &Workspace,
    x: &str,
    y: &str,
    state: &str,
    tol: &ToleranceProfile,
) -> Result<ExitCode> {
    let verdict = joint_distribution(ws.observable(x)?, ws.observable(y)?, ws.state(state)?, tol)?;
    match verdict {
        JointVerdict::Distribution(d) => {
            emit(&json!({
                "exists": true,
                "cells": d.cells.iter()
                    .map(|c| json!({"x": c.x, "y": c.y, "p": c.p}))
                    .collect::<Vec<_>>(),
            }));
            Ok(ExitCode::SUCCESS)
        }
        JointVerdict::Incompatible(w) => {
            emit(&json!({
                "exists": false,
                "violation": {"lambda": w.lambda, "mu": w.mu, "magnitude": w.magnitude},
            }));
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_schmidt(
    ws: &Workspace,
    state: &str,
    dims: &[usize],
    bits: bool,
    tol: &ToleranceProfile,
) -> Result<ExitCode> {
    if dims.len() != 2 {
        return Err(anyhow!("--dims expects two factors, e.g. 2,2"));
    }
    let psi = match ws.state(state)? {
        qpc::QuantumState::Vector(v) => v.clone(),
        qpc::QuantumState::Density(_) => {
            return Err(anyhow!("schmidt needs a vector state"));
        }
    };
    let sd = schmidt(&psi, (dims[0], dims[1]), tol)?;
    let mut entropy = entanglement(&psi, (dims[0], dims[1]), tol)?;
    if bits {
        entropy /= 2f64.ln();
    }
    emit(&json!({
        "weights": sd.weights,
        "left": sd.left.iter().map(|v| vector_to_json(v)).collect::<Vec<_>>(),
        "right": sd.right.iter().map(|v| vector_to_json(v)).collect::<Vec<_>>(),
        "entanglement": entropy,
        "unit": if bits { "bits" } else { "nats" },
    }));
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_hardy(
    ws: &Workspace,
    state: &str,
    u: Option<&str>,
    d: Option<&str>,
    search: bool,
    resolution: usize,
    seed: u64,
    tol: &ToleranceProfile,
) -> Result<ExitCode> {
    let psi = match ws.state(state)? {
        qpc::QuantumState::Vector(v) => v.clone(),
        qpc::QuantumState::Density(_) => return Err(anyhow!("hardy needs a vector state")),
    };
    let report_json = |r: &qpc::bipartite::HardyReport, extra: serde_json::Value| {
        let mut out = json!({
            "p1": r.p1,
            "probabilities": {
                "u1_0_u2_1": r.condition_values[0],
                "u1_1_d2_0": r.condition_values[1],
                "d1_1_u2_0": r.condition_values[2],
                "d1_1_d2_0": r.condition_values[3],
            },
            "verdict": serde_json::to_value(r.verdict).unwrap(),
            "correlation_chain": r.correlation_chain,
        });
        if let Some(obj) = extra.as_object() {
            for (k, v) in obj {
                out[k] = v.clone();
            }
        }
        out
    };
    if search {
        match hardy_search(&psi, resolution, seed, tol)? {
            None => {
                emit(&json!({"found": false}));
                return Ok(ExitCode::from(1));
            }
            Some((u_obs, d_obs)) => {
                let r = hardy_check(&psi, &u_obs, &d_obs, tol)?;
                emit(&report_json(
                    &r,
                    json!({
                        "found": true,
                        "u": matrix_to_json(u_obs.matrix()),
                        "d": matrix_to_json(d_obs.matrix()),
                    }),
                ));
                return Ok(verdict_code(r.verdict == HardyVerdict::NonlocalityWitnessed));
            }
        }
    }
    let (u, d) = match (u, d) {
        (Some(u), Some(d)) => (u, d),
        _ => return Err(anyhow!("hardy needs either --search or both --u and --d")),
    };
    let r = hardy_check(&psi, ws.observable(u)?, ws.observable(d)?, tol)?;
    emit(&report_json(&r, json!({})));
    Ok(verdict_code(r.verdict == HardyVerdict::NonlocalityWitnessed))
}

fn cmd_dilate(
    ws: &Workspace,
    povm1: &str,
    povm2: Option<&str>,
    tol: &ToleranceProfile,
) -> Result<ExitCode> {
    let p1 = ws.povm(povm1)?;
    match povm2 {
        None => {
            let n = naimark_dilate(p1, tol)?;
            emit(&json!({
                "kind": "naimark",
                "system_dim": n.system_dim,
                "probe_dim": n.probe_dim,
                "probe_state": vector_to_json(&n.probe_state),
                "dilated": matrix_to_json(n.dilated.matrix()),
                "identity_residual": n.identity_residual(p1),
            }));
        }
        Some(povm2) => {
            let p2 = ws.povm(povm2)?;
            let jd = joint_dilate(p1, p2, tol)?;
            emit(&json!({
                "kind": "joint",
                "system_dim": jd.system_dim,
                "probe_dims": [jd.probe_dims.0, jd.probe_dims.1],
                "probe_state": vector_to_json(&jd.probe_state),
                "first": matrix_to_json(jd.first.matrix()),
                "second": matrix_to_json(jd.second.matrix()),
                "identity_residual": jd.identity_residual(p1, p2),
            }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn measurement_json(
    mp: &qpc::measurement::MeasuringProcess,
    state: &qpc::QuantumState,
    samples: Option<usize>,
    seed: u64,
    tol: &ToleranceProfile,
) -> Result<serde_json::Value> {
    let records = measure(mp, state, tol)?;
    let mut out = json!({
        "outcomes": records.iter().map(|r| json!({
            "label": r.label,
            "probability": r.probability,
            "conditional_state": r.conditional_state.as_ref().map(matrix_to_json),
        })).collect::<Vec<_>>(),
    });
    if let Some(n) = samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trials = repeatability_trials(mp, state, n, &mut rng, tol)?;
        out["samples"] = json!({
            "n": n,
            "seed": seed,
            "tallies": trials.first_counts.iter()
                .map(|(label, count)| json!({"label": label, "count": count}))
                .collect::<Vec<_>>(),
            "repeat_agreements": trials.agreements,
        });
    }
    Ok(out)
}

fn cmd_measure(
    ws: &Workspace,
    process: &str,
    state: &str,
    samples: Option<usize>,
    seed: u64,
    tol: &ToleranceProfile,
) -> Result<ExitCode> {
    let out = measurement_json(ws.process(process)?, ws.state(state)?, samples, seed, tol)?;
    emit(&out);
    Ok(ExitCode::SUCCESS)
}

fn cmd_vnmodel(
    ws: &Workspace,
    observable: &str,
    state: Option<&str>,
    samples: Option<usize>,
    seed: u64,
    tol: &ToleranceProfile,
) -> Result<ExitCode> {
    let a = ws.observable(observable)?;
    let mp = von_neumann_model(a, None, tol)?;
    let mut out = json!({
        "probe_dim": mp.probe_dim,
        "probe_state": vector_to_json(&mp.probe_state),
        "unitary": matrix_to_json(&mp.interaction),
        "meter": matrix_to_json(mp.meter.matrix()),
    });
    if let Some(state) = state {
        out["measurement"] = measurement_json(&mp, ws.state(state)?, samples, seed, tol)?;
    }
    emit(&out);
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str, trials: usize, seed: u64, dims: Vec<usize>) -> Result<ExitCode> {
    let config = SuiteConfig { trials, dims, seed };
    let ids: Vec<&str> =
        if suite == "all" { suite_ids() } else { vec![suite_ids()
            .into_iter()
            .find(|&s| s == suite)
            .ok_or_else(|| anyhow!("unknown suite: {suite} (try `--suite all`)"))?] };
    let mut reports = Vec::new();
    let mut all_passed = true;
    for id in ids {
        let r = run_suite(id, &config)?;
        all_passed &= r.passed();
        reports.push(r.to_json());
    }
    emit(&json!({"suites": reports, "passed": all_passed}));
    Ok(verdict_code(all_passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
