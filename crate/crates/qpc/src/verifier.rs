//! Property-based theorem suites.
//!
//! Each suite draws engineered-positive and random-negative instances from a
//! per-trial seed and asserts one equivalence chain of the theory. Failures
//! serialize the (suite, dim, trial seed) triple, which replays to the same
//! verdict because every trial is a pure function of its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bipartite::{bipartite_pc_characterize, bloch_projector, hardy_check, HardyVerdict};
use crate::correlation::{
    check_equivalences_vector, cyclic_subspace, identically_distributed, is_perfectly_correlated,
    perfectly_correlative_domain, superposition_certificate, QuantumState,
};
use crate::dilation::{
    joint_dilate, naimark_dilate, observable_povm_pc, povm_perfectly_correlated,
};
use crate::joint_dist::{
    commutative_domain, diagonal_concentration, default_grid, joint_distribution,
    joint_measurability_check, phi_shift_residual, psi_shift_residual, JointVerdict,
};
use crate::linalg::{
    basis_vector, haar_unitary, outer, random_density, random_state_vector, vec_inner, vec_kron,
    vec_norm, vec_scale, vec_sub, ComplexMatrix, ToleranceProfile, C64,
};
use crate::measurement::{
    instrument_of, measure, model_characterization, povm_of, precisely_measures, projective_model,
    realize_instrument, statistically_equivalent, von_neumann_model,
};
use crate::spectral::{HermitianObservable, Povm, RealFunction};
use crate::{Error, Result};

/// How many trials to run, at which system dimensions, from which seed.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub trials: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { trials: 200, dims: vec![2, 3, 4], seed: 0x0b5eca11 }
    }
}

/// One replayable failure.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub dim: usize,
    pub trial_seed: u64,
    pub description: String,
}

impl Failure {
    pub fn payload(&self, suite: &str) -> serde_json::Value {
        serde_json::json!({
            "suite": suite,
            "trial": self.trial,
            "dim": self.dim,
            "trial_seed": self.trial_seed,
            "description": self.description,
        })
    }
}

/// Result of running one suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub id: String,
    pub config: SuiteConfig,
    pub trials_run: usize,
    pub failures: Vec<Failure>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "suite": self.id,
            "trials": self.trials_run,
            "dims": self.config.dims,
            "seed": self.config.seed,
            "passed": self.passed(),
            "failures": self.failures.iter().map(|f| f.payload(&self.id)).collect::<Vec<_>>(),
        })
    }
}

type TrialOutcome = std::result::Result<(), String>;

fn fail(msg: impl Into<String>) -> TrialOutcome {
    Err(msg.into())
}

fn hard(e: Error) -> String {
    format!("hard error: {e}")
}

/// All registered suite ids.
pub fn suite_ids() -> Vec<&'static str> {
    vec![
        "S2-proposition",
        "S2-transport",
        "S3-vector-equivalence",
        "S3-mixed",
        "S3-born",
        "S3-superposition",
        "S3-counterexample",
        "S5-largest-domain",
        "S5-transitivity",
        "S6-jpd",
        "S6-jm",
        "S6-pcjpd",
        "S6-phi",
        "S6-psi",
        "S7-characterization",
        "S7-hardy-max",
        "S4-joint-dilation",
        "S4-distance-povm",
        "S4-pc-state3",
        "S8-precise-measurement",
        "S8-model-characterization",
        "S8-two-of-three",
        "S9-implications",
    ]
}

fn mix_seed(seed: u64, suite: &str, trial: usize) -> u64 {
    let mut h: u64 = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in suite.bytes() {
        h = h.wrapping_mul(0x100_0000_01b3).wrapping_add(b as u64);
    }
    h.wrapping_add((trial as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9))
}

/// Runs one registered suite under the config; deterministic per (id, config).
pub fn run_suite(id: &str, config: &SuiteConfig) -> Result<SuiteResult> {
    if !suite_ids().contains(&id) {
        return Err(Error::UnknownSuite(id.to_string()));
    }
    let tol = ToleranceProfile::default();
    let mut failures = Vec::new();
    for trial in 0..config.trials {
        let dim = config.dims[trial % config.dims.len()];
        let trial_seed = mix_seed(config.seed, id, trial);
        if let Err(description) = run_single(id, dim, trial_seed, &tol) {
            failures.push(Failure { trial, dim, trial_seed, description });
        }
    }
    Ok(SuiteResult {
        id: id.to_string(),
        config: config.clone(),
        trials_run: config.trials,
        failures,
    })
}

/// Replays a serialized failure; true when the identical failure reproduces.
pub fn replay_failure(payload: &serde_json::Value) -> Result<bool> {
    let suite = payload["suite"].as_str().ok_or_else(|| Error::UnknownSuite("?".into()))?;
    if !suite_ids().contains(&suite) {
        return Err(Error::UnknownSuite(suite.to_string()));
    }
    let dim = payload["dim"].as_u64().unwrap_or(2) as usize;
    let trial_seed = payload["trial_seed"].as_u64().unwrap_or(0);
    let expected = payload["description"].as_str().unwrap_or("");
    let tol = ToleranceProfile::default();
    Ok(match run_single(suite, dim, trial_seed, &tol) {
        Ok(()) => false,
        Err(description) => description == expected,
    })
}

/// One trial of one suite, a pure function of (id, dim, trial_seed).
pub fn run_single(id: &str, dim: usize, trial_seed: u64, tol: &ToleranceProfile) -> TrialOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    match id {
        "S2-proposition" => s2_proposition(dim, &mut rng, tol),
        "S2-transport" => s2_transport(dim, &mut rng, tol),
        "S3-vector-equivalence" => s3_vector_equivalence(dim, &mut rng, tol),
        "S3-mixed" => s3_mixed(dim, &mut rng, tol),
        "S3-born" => s3_born(dim, &mut rng, tol),
        "S3-superposition" => s3_superposition(dim, &mut rng, tol),
        "S3-counterexample" => s3_counterexample(tol),
        "S5-largest-domain" => s5_largest_domain(dim, &mut rng, tol),
        "S5-transitivity" => s5_transitivity(dim, &mut rng, tol),
        "S6-jpd" => s6_jpd(dim, &mut rng, tol),
        "S6-jm" => s6_jm(dim, &mut rng, tol),
        "S6-pcjpd" => s6_pcjpd(dim, &mut rng, tol),
        "S6-phi" => s6_phi(dim, &mut rng, tol),
        "S6-psi" => s6_psi(dim, &mut rng, tol),
        "S7-characterization" => s7_characterization(dim, &mut rng, tol),
        "S7-hardy-max" => s7_hardy_max(&mut rng, tol),
        "S4-joint-dilation" => s4_joint_dilation(dim, &mut rng, tol),
        "S4-distance-povm" => s4_distance_povm(dim, &mut rng, tol),
        "S4-pc-state3" => s4_pc_state3(dim, &mut rng, tol),
        "S8-precise-measurement" => s8_precise_measurement(dim, &mut rng, tol),
        "S8-model-characterization" => s8_model_characterization(dim, &mut rng, tol),
        "S8-two-of-three" => s8_two_of_three(dim, &mut rng, tol),
        "S9-implications" => s9_implications(dim, &mut rng, tol),
        other => Err(format!("unknown suite {other}")),
    }
}

// ---------------------------------------------------------------------------
// instance generation

/// Distinct well-separated eigenvalues in a Haar-random basis.
pub fn random_nondegenerate_observable<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    tol: &ToleranceProfile,
) -> HermitianObservable {
    let v = haar_unitary(rng, dim);
    let mut vals: Vec<f64> = (0..dim).map(|i| i as f64 + rng.random::<f64>() * 0.5).collect();
    // random sign flips keep spectra centered
    for x in vals.iter_mut() {
        if rng.random::<f64>() < 0.5 {
            *x = -*x;
        }
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, &l) in vals.iter().enumerate() {
        let col = v.column(i);
        m = m.add(&outer(&col, &col).scale_re(l));
    }
    HermitianObservable::new(m.hermitized(), tol).expect("engineered Hermitian")
}

/// Builds (X, Y, ρ) perfectly correlated by construction: X and Y share a
/// random eigenbasis block with common eigenvalues, act independently on the
/// complement, and ρ is supported in the common block. Globally X ≠ Y
/// whenever the complement is nontrivial.
pub fn engineer_correlated_pair<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    tol: &ToleranceProfile,
) -> (HermitianObservable, HermitianObservable, QuantumState) {
    let v = haar_unitary(rng, dim);
    let k = if dim <= 2 { 1 } else { 1 + (rng.random::<u64>() as usize) % (dim - 1) };
    let common: Vec<f64> = (0..k).map(|i| i as f64 + 1.0).collect();
    let x_rest: Vec<f64> = (k..dim).map(|i| 10.0 + i as f64).collect();
    let y_rest: Vec<f64> = (k..dim).map(|i| 20.0 + i as f64).collect();

    let build = |vals_tail: &[f64]| {
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (i, &l) in common.iter().chain(vals_tail.iter()).enumerate() {
            let col = v.column(i);
            m = m.add(&outer(&col, &col).scale_re(l));
        }
        HermitianObservable::new(m.hermitized(), tol).expect("engineered Hermitian")
    };
    let x = build(&x_rest);
    let y = build(&y_rest);

    // state supported in the common block
    let state = if rng.random::<f64>() < 0.5 {
        let mut psi = vec![C64::new(0.0, 0.0); dim];
        let coeffs = random_state_vector(rng, k);
        for (i, c) in coeffs.iter().enumerate() {
            psi = crate::linalg::vec_add(&psi, &vec_scale(&v.column(i), *c));
        }
        QuantumState::Vector(crate::linalg::vec_normalize(&psi))
    } else {
        let sigma = random_density(rng, k);
        let mut rho = ComplexMatrix::zeros(dim, dim);
        for i in 0..k {
            for j in 0..k {
                rho = rho.add(&outer(&v.column(i), &v.column(j)).scale(sigma[(i, j)]));
            }
        }
        QuantumState::Density(rho.hermitized())
    };
    (x, y, state)
}

fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> QuantumState {
    if rng.random::<f64>() < 0.5 {
        QuantumState::Vector(random_state_vector(rng, dim))
    } else {
        QuantumState::Density(random_density(rng, dim))
    }
}

/// Clear-band classifier: correlated, clearly violated, or too close to call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Clarity {
    True,
    False,
    Gray,
}

fn verdict_clarity(v: &crate::correlation::CorrelationVerdict) -> Clarity {
    if v.correlated {
        Clarity::True
    } else {
        let m = v.witness.map(|w| w.magnitude).unwrap_or(0.0);
        if m >= 1e-7 {
            Clarity::False
        } else {
            Clarity::Gray
        }
    }
}

// ---------------------------------------------------------------------------
// the four-dimensional fixture pair

/// X, Y with Xψ = Yψ on ψ = e₁ that are nonetheless uncorrelated; the third
/// moments differ (4 vs 3).
pub fn zero_difference_pair(
    tol: &ToleranceProfile,
) -> (HermitianObservable, HermitianObservable, Vec<C64>) {
    let x = HermitianObservable::from_real(
        &[
            &[1.0, 1.0, 0.0, 0.0],
            &[1.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ],
        tol,
    )
    .expect("fixture is Hermitian");
    let y = HermitianObservable::from_real(
        &[
            &[1.0, 1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 1.0],
            &[0.0, 0.0, 1.0, 1.0],
        ],
        tol,
    )
    .expect("fixture is Hermitian");
    (x, y, basis_vector(4, 0))
}

/// A⊗I and I⊗A in φ⊗φ with φ = |+⟩: identically distributed, still
/// uncorrelated, and the zero-difference relation fails.
pub fn identically_distributed_pair(
    tol: &ToleranceProfile,
) -> (HermitianObservable, HermitianObservable, Vec<C64>) {
    let sz = ComplexMatrix::diagonal(&[1.0, -1.0]);
    let i2 = ComplexMatrix::identity(2);
    let x = HermitianObservable::new(sz.kron(&i2), tol).expect("Hermitian");
    let y = HermitianObservable::new(i2.kron(&sz), tol).expect("Hermitian");
    let plus = vec![C64::new(1.0 / 2f64.sqrt(), 0.0); 2];
    (x, y, vec_kron(&plus, &plus))
}

// ---------------------------------------------------------------------------
// suites

fn s2_proposition(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    // one engineered positive and one random pair per trial
    let mut instances: Vec<(Povm, Povm, QuantumState)> = Vec::new();
    let (x, y, state) = engineer_correlated_pair(rng, dim, tol);
    instances.push((Povm::from_observable(&x), Povm::from_observable(&y), state));
    let n1 = 2 + (rng.random::<u64>() % 3) as usize;
    let p1 = Povm::random(rng, dim, n1, tol).map_err(hard)?;
    let n2 = 2 + (rng.random::<u64>() % 3) as usize;
    let p2 = Povm::random(rng, dim, n2, tol).map_err(hard)?;
    instances.push((p1, p2, random_state(rng, dim)));

    for (p1, p2, state) in &instances {
        let rho = state.density_matrix();
        let verdict = povm_perfectly_correlated(p1, p2, state, tol).map_err(hard)?;
        let clarity = verdict_clarity(&verdict);
        if clarity == Clarity::Gray {
            continue;
        }
        let threshold = tol.tol_zero * dim as f64 * 10.0;
        // condition (ii): Tr[Π₁(Δ)Π₂(Γ)ρ] = Tr[Π₁(Δ∩Γ)ρ] on singletons
        let mut cond2 = true;
        let mut cond3 = true;
        for o1 in p1.outcomes() {
            for o2 in p2.outcomes() {
                let joint = o1.effect.mul(&o2.effect).mul(&rho).trace();
                let same = crate::spectral::values_match(o1.label, o2.label, 1e-9);
                let target1 = if same { o1.effect.mul(&rho).trace() } else { C64::new(0.0, 0.0) };
                let target2 = if same { o2.effect.mul(&rho).trace() } else { C64::new(0.0, 0.0) };
                if (joint - target1).norm() > threshold {
                    cond2 = false;
                }
                if (joint - target2).norm() > threshold {
                    cond3 = false;
                }
            }
        }
        let expected = clarity == Clarity::True;
        if cond2 != expected || cond3 != expected {
            return fail(format!(
                "proposition conditions disagree: (i)={expected} (ii)={cond2} (iii)={cond3}"
            ));
        }
    }
    Ok(())
}

fn s2_transport(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let engineered = engineer_correlated_pair(rng, dim, tol);
    let random = (
        random_nondegenerate_observable(rng, dim, tol),
        random_nondegenerate_observable(rng, dim, tol),
        random_state(rng, dim),
    );
    for (x, y, state) in [&engineered, &random] {
        let before = is_perfectly_correlated(x, y, state, tol).map_err(hard)?;
        if verdict_clarity(&before) == Clarity::Gray {
            continue;
        }

        // unitary transport
        let u = haar_unitary(rng, dim);
        let xt = HermitianObservable::new(
            u.adjoint().mul(x.matrix()).mul(&u).hermitized(),
            tol,
        )
        .map_err(hard)?;
        let yt = HermitianObservable::new(
            u.adjoint().mul(y.matrix()).mul(&u).hermitized(),
            tol,
        )
        .map_err(hard)?;
        let st = QuantumState::Density(
            u.adjoint().mul(&state.density_matrix()).mul(&u).hermitized(),
        );
        let after = is_perfectly_correlated(&xt, &yt, &st, tol).map_err(hard)?;
        if before.correlated != after.correlated {
            return fail(format!(
                "unitary transport changed the verdict: {} -> {}",
                before.correlated, after.correlated
            ));
        }

        // injective affine transport is two-way
        let f = RealFunction::affine(2.0, -1.5);
        let fx = x.apply_function(&f);
        let fy = y.apply_function(&f);
        let after_f = is_perfectly_correlated(&fx, &fy, state, tol).map_err(hard)?;
        if before.correlated != after_f.correlated {
            return fail("affine transport changed the verdict".to_string());
        }

        // non-injective transport preserves the forward direction
        let sq = RealFunction::square();
        let after_sq =
            is_perfectly_correlated(&x.apply_function(&sq), &y.apply_function(&sq), state, tol)
                .map_err(hard)?;
        if before.correlated && !after_sq.correlated {
            return fail("square transport broke a correlated pair".to_string());
        }
    }

    // the anticorrelated fixture collapses to correlated under t²
    let sz = HermitianObservable::from_real(&[&[1.0, 0.0], &[0.0, -1.0]], tol).map_err(hard)?;
    let neg = sz.apply_function(&RealFunction::affine(-1.0, 0.0));
    let plus = QuantumState::Vector(vec![C64::new(1.0 / 2f64.sqrt(), 0.0); 2]);
    let sq = RealFunction::square();
    let before = is_perfectly_correlated(&sz, &neg, &plus, tol).map_err(hard)?;
    let after = is_perfectly_correlated(
        &sz.apply_function(&sq),
        &neg.apply_function(&sq),
        &plus,
        tol,
    )
    .map_err(hard)?;
    if before.correlated || !after.correlated {
        return fail("anticorrelated fixture should become correlated under t²".to_string());
    }
    Ok(())
}

fn s3_vector_equivalence(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let mut instances = Vec::new();
    let (x, y, state) = engineer_correlated_pair(rng, dim, tol);
    if let QuantumState::Vector(psi) = state {
        instances.push((x, y, psi));
    } else {
        // force a vector state inside the common block via the cyclic span
        let (x2, y2, st2) = engineer_correlated_pair(rng, dim, tol);
        let basis = st2.range_basis(tol);
        instances.push((x2, y2, basis[0].clone()));
    }
    instances.push((
        random_nondegenerate_observable(rng, dim, tol),
        random_nondegenerate_observable(rng, dim, tol),
        random_state_vector(rng, dim),
    ));

    for (x, y, psi) in &instances {
        let report = check_equivalences_vector(x, y, psi, tol).map_err(hard)?;
        let verdict =
            is_perfectly_correlated(x, y, &QuantumState::Vector(psi.clone()), tol).map_err(hard)?;
        if verdict_clarity(&verdict) == Clarity::Gray {
            continue;
        }
        let expected = verdict.correlated;
        for (k, v) in &report {
            if *v != expected {
                return fail(format!("condition ({k}) = {v} disagrees with (i) = {expected}"));
            }
        }
    }
    Ok(())
}

fn s3_mixed(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let mut instances = vec![engineer_correlated_pair(rng, dim, tol)];
    instances.push((
        random_nondegenerate_observable(rng, dim, tol),
        random_nondegenerate_observable(rng, dim, tol),
        QuantumState::Density(random_density(rng, dim)),
    ));
    for (x, y, state) in &instances {
        let verdict = is_perfectly_correlated(x, y, state, tol).map_err(hard)?;
        if verdict_clarity(&verdict) == Clarity::Gray {
            continue;
        }
        let rho = state.density_matrix();
        let mt = x.cluster_tol().max(y.cluster_tol());
        // (v): E^X({λ})ρ = E^Y({λ})ρ as matrices
        let mut matrices_equal = true;
        for &v in &crate::correlation::merged_spectrum(x, y) {
            let lhs = x.point_projector(v, mt).mul(&rho);
            let rhs = y.point_projector(v, mt).mul(&rho);
            if lhs.sub(&rhs).max_abs() > tol.tol_zero * dim as f64 * 10.0 {
                matrices_equal = false;
                break;
            }
        }
        if matrices_equal != verdict.correlated {
            return fail(format!(
                "matrix condition {} disagrees with definition {}",
                matrices_equal, verdict.correlated
            ));
        }
        // (ii): correlated in every eigenvector of ρ with nonzero eigenvalue
        let mut each_eigenvector = true;
        for psi in state.range_basis(tol) {
            let v = is_perfectly_correlated(x, y, &QuantumState::Vector(psi), tol)
                .map_err(hard)?;
            if !v.correlated {
                each_eigenvector = false;
                break;
            }
        }
        if each_eigenvector != verdict.correlated {
            return fail(format!(
                "eigenvector condition {} disagrees with definition {}",
                each_eigenvector, verdict.correlated
            ));
        }
    }
    Ok(())
}

fn s3_born(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let mut instances = vec![engineer_correlated_pair(rng, dim, tol)];
    instances.push((
        random_nondegenerate_observable(rng, dim, tol),
        random_nondegenerate_observable(rng, dim, tol),
        random_state(rng, dim),
    ));
    for (x, y, state) in &instances {
        let verdict = is_perfectly_correlated(x, y, state, tol).map_err(hard)?;
        if verdict_clarity(&verdict) == Clarity::Gray {
            continue;
        }
        let cyclic = cyclic_subspace(x, state, tol);
        let mut probes: Vec<Vec<C64>> = cyclic.basis().to_vec();
        for _ in 0..3 {
            if cyclic.dim() == 0 {
                break;
            }
            let mut v = vec![C64::new(0.0, 0.0); dim];
            for b in cyclic.basis() {
                v = crate::linalg::vec_add(
                    &v,
                    &vec_scale(b, C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)),
                );
            }
            if vec_norm(&v) > 1e-6 {
                probes.push(crate::linalg::vec_normalize(&v));
            }
        }
        let mut all_identical = true;
        for p in &probes {
            if !identically_distributed(x, y, &QuantumState::Vector(p.clone()), tol)
                .map_err(hard)?
            {
                all_identical = false;
                break;
            }
        }
        if verdict.correlated && !all_identical {
            return fail("correlated pair not identically distributed on the cyclic span");
        }
        if !verdict.correlated && all_identical {
            // sampling may miss a violator only when distributions collide;
            // demand a direct violation on the worst cross pair instead
            let w = verdict.witness.expect("uncorrelated verdict carries a witness");
            return fail(format!(
                "uncorrelated pair (witness {:.3e}) looked identically distributed on all probes",
                w.magnitude
            ));
        }
    }
    Ok(())
}

fn s3_superposition(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    // engineered vector-state positive
    let (x, y, state) = engineer_correlated_pair(rng, dim, tol);
    let psi = state.range_basis(tol)[0].clone();
    let cert = superposition_certificate(&x, &y, &psi, tol).map_err(hard)?;
    match cert {
        None => return fail("engineered correlated pair produced no certificate"),
        Some(parts) => {
            let mut rebuilt = vec![C64::new(0.0, 0.0); dim];
            for p in &parts {
                rebuilt = crate::linalg::vec_add(&rebuilt, &p.component);
                // common eigenvector with common eigenvalue, both observables
                for obs in [&x, &y] {
                    let r = vec_sub(
                        &obs.matrix().mul_vec(&p.component),
                        &vec_scale(&p.component, C64::new(p.eigenvalue, 0.0)),
                    );
                    if vec_norm(&r) > 1e-7 * vec_norm(&p.component).max(1e-12) {
                        return fail("certificate component is not a common eigenvector");
                    }
                }
            }
            if vec_norm(&vec_sub(&rebuilt, &psi)) > 1e-8 {
                return fail("certificate components do not reassemble the state");
            }
        }
    }
    // random negative
    let rx = random_nondegenerate_observable(rng, dim, tol);
    let ry = random_nondegenerate_observable(rng, dim, tol);
    let rpsi = random_state_vector(rng, dim);
    let v = is_perfectly_correlated(&rx, &ry, &QuantumState::Vector(rpsi.clone()), tol)
        .map_err(hard)?;
    if verdict_clarity(&v) == Clarity::False
        && superposition_certificate(&rx, &ry, &rpsi, tol).map_err(hard)?.is_some()
    {
        return fail("uncorrelated pair produced a certificate");
    }
    Ok(())
}

fn s3_counterexample(tol: &ToleranceProfile) -> TrialOutcome {
    let (x, y, psi) = zero_difference_pair(tol);
    let cube = RealFunction::poly(&[0.0, 0.0, 0.0, 1.0]);
    let mx = x.apply_function(&cube).expectation(&psi);
    let my = y.apply_function(&cube).expectation(&psi);
    if (mx - 4.0).abs() > 1e-12 || (my - 3.0).abs() > 1e-12 {
        return fail(format!("third moments are ({mx}, {my}), expected (4, 3)"));
    }
    let diff = vec_sub(&x.matrix().mul_vec(&psi), &y.matrix().mul_vec(&psi));
    if vec_norm(&diff) > 1e-12 {
        return fail("zero-difference relation Xψ = Yψ failed");
    }
    let verdict =
        is_perfectly_correlated(&x, &y, &QuantumState::Vector(psi.clone()), tol).map_err(hard)?;
    if verdict.correlated {
        return fail("fixture pair must not be perfectly correlated");
    }
    if verdict.witness.map(|w| w.magnitude).unwrap_or(0.0) < 1e-8 {
        return fail("violation magnitude is not clearly nonzero");
    }
    if identically_distributed(&x, &y, &QuantumState::Vector(psi.clone()), tol).map_err(hard)? {
        return fail("fixture pair must have different distributions");
    }
    let report = check_equivalences_vector(&x, &y, &psi, tol).map_err(hard)?;
    if report["iii"] {
        return fail("projector transport (iii) unexpectedly holds");
    }
    Ok(())
}

fn s5_largest_domain(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let (x, y, state) = engineer_correlated_pair(rng, dim, tol);
    let domain = perfectly_correlative_domain(&x, &y, tol).map_err(hard)?;
    let p = domain.projector();
    let mt = x.cluster_tol().max(y.cluster_tol());
    // invariance and the defining identity
    for &v in &crate::correlation::merged_spectrum(&x, &y) {
        let ex = x.point_projector(v, mt);
        let ey = y.point_projector(v, mt);
        let lhs = ex.sub(&ey).mul(&p);
        if lhs.max_abs() > 1e-8 {
            return fail(format!("[E^X - E^Y][X=Y] is {:.3e} at λ = {v}", lhs.max_abs()));
        }
        let leak = ex.mul(&p).sub(&p.mul(&ex.mul(&p)));
        if leak.max_abs() > 1e-8 {
            return fail("domain is not invariant under the spectral measure");
        }
    }
    // ran(ρ) ⊆ {X=Y} ⟺ correlated
    let verdict = is_perfectly_correlated(&x, &y, &state, tol).map_err(hard)?;
    let rho = state.density_matrix();
    let supported = p.mul(&rho).sub(&rho).max_abs() <= 1e-8;
    if verdict.correlated != supported {
        return fail(format!(
            "support condition {supported} disagrees with verdict {}",
            verdict.correlated
        ));
    }
    // a full-rank random state escapes a proper domain
    if domain.dim() < dim {
        let full = QuantumState::Density(random_density(rng, dim));
        let v2 = is_perfectly_correlated(&x, &y, &full, tol).map_err(hard)?;
        if v2.correlated {
            return fail("full-rank state cannot be correlated when {X=Y} is proper");
        }
    }
    Ok(())
}

fn s5_transitivity(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    // random triple: subspace containment
    let x = random_nondegenerate_observable(rng, dim, tol);
    let y = random_nondegenerate_observable(rng, dim, tol);
    let z = random_nondegenerate_observable(rng, dim, tol);
    let dxy = perfectly_correlative_domain(&x, &y, tol).map_err(hard)?;
    let dyz = perfectly_correlative_domain(&y, &z, tol).map_err(hard)?;
    let dxz = perfectly_correlative_domain(&x, &z, tol).map_err(hard)?;
    let inter = dxy.intersect(&dyz, tol);
    if !dxz.contains(&inter, 1e-7) {
        return fail("{X=Y} ∩ {Y=Z} escaped {X=Z} on a random triple");
    }

    // engineered chain with nested common blocks
    let v = haar_unitary(rng, dim);
    let k1 = 1.max(dim - 1);
    let k2 = 1.max(k1 - 1);
    let spec = |same_upto: usize, offset: f64| {
        let mut m = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            let val = if i < same_upto { i as f64 + 1.0 } else { offset + i as f64 };
            let col = v.column(i);
            m = m.add(&outer(&col, &col).scale_re(val));
        }
        HermitianObservable::new(m.hermitized(), tol).expect("Hermitian")
    };
    let ex = spec(dim, 0.0);
    let ey = spec(k1, 30.0);
    let ez = spec(k2, 60.0);
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    let coeffs = random_state_vector(rng, k2);
    for (i, c) in coeffs.iter().enumerate() {
        psi = crate::linalg::vec_add(&psi, &vec_scale(&v.column(i), *c));
    }
    let state = QuantumState::Vector(crate::linalg::vec_normalize(&psi));
    let xy = is_perfectly_correlated(&ex, &ey, &state, tol).map_err(hard)?.correlated;
    let yz = is_perfectly_correlated(&ey, &ez, &state, tol).map_err(hard)?.correlated;
    let xz = is_perfectly_correlated(&ex, &ez, &state, tol).map_err(hard)?.correlated;
    if !(xy && yz) {
        return fail("engineered chain failed to correlate pairwise");
    }
    if !xz {
        return fail("transitivity failed on the engineered chain");
    }
    // the reflexive and symmetric parts
    if perfectly_correlative_domain(&ex, &ex, tol).map_err(hard)?.dim() != dim {
        return fail("{X=X} is not the whole space");
    }
    let dyx = perfectly_correlative_domain(&ey, &ex, tol).map_err(hard)?;
    let dxy2 = perfectly_correlative_domain(&ex, &ey, tol).map_err(hard)?;
    if !(dyx.contains(&dxy2, 1e-7) && dxy2.contains(&dyx, 1e-7)) {
        return fail("{X=Y} and {Y=X} differ");
    }
    Ok(())
}

/// Pair compatible in the generated state without commuting globally: they
/// share an eigenbasis on the state's support and clash on the two remaining
/// basis directions (at dim 2 the pair simply commutes everywhere).
fn engineered_compatible_pair<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    tol: &ToleranceProfile,
) -> (HermitianObservable, HermitianObservable, QuantumState) {
    let v = haar_unitary(rng, dim);
    let mut mx = ComplexMatrix::zeros(dim, dim);
    let mut my = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let col = v.column(i);
        mx = mx.add(&outer(&col, &col).scale_re(i as f64 + 1.0));
        my = my.add(&outer(&col, &col).scale_re(((i * 7) % dim) as f64 + 2.0));
    }
    let keep = if dim >= 3 {
        // spoil commutation on the last two directions, away from the support
        let a = v.column(dim - 1);
        let b = v.column(dim - 2);
        let mix = crate::linalg::vec_scale(
            &crate::linalg::vec_add(&a, &b),
            C64::new(1.0 / 2f64.sqrt(), 0.0),
        );
        my = my.add(&outer(&mix, &mix).scale_re(5.5)).hermitized();
        dim - 2
    } else {
        dim
    };
    let x = HermitianObservable::new(mx.hermitized(), tol).expect("Hermitian");
    let y = HermitianObservable::new(my, tol).expect("Hermitian");
    let coeffs = random_state_vector(rng, keep);
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    for (i, c) in coeffs.iter().enumerate() {
        psi = crate::linalg::vec_add(&psi, &vec_scale(&v.column(i), *c));
    }
    (x, y, QuantumState::Vector(crate::linalg::vec_normalize(&psi)))
}

fn s6_jpd(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let mut instances = vec![engineered_compatible_pair(rng, dim, tol)];
    instances.push((
        random_nondegenerate_observable(rng, dim, tol),
        random_nondegenerate_observable(rng, dim, tol),
        random_state(rng, dim),
    ));
    for (x, y, state) in &instances {
        let rho = state.density_matrix();
        // condition (i): support in the commutative domain
        let c = commutative_domain(x, y, tol).map_err(hard)?.projector();
        let compatible = c.mul(&rho).sub(&rho).max_abs() <= 1e-8;
        // condition (iv): cellwise commutation against ρ
        let mut commutes = true;
        let mut worst: f64 = 0.0;
        for px in x.points() {
            for py in y.points() {
                let lhs = px.projector.mul(&py.projector).mul(&rho);
                let rhs = py.projector.mul(&px.projector).mul(&rho);
                worst = worst.max(lhs.sub(&rhs).max_abs());
            }
        }
        if worst > 1e-8 {
            commutes = false;
        }
        if worst > 1e-10 && worst < 1e-8 {
            continue; // too close to call either way, skip the instance
        }
        if compatible != commutes {
            return fail(format!(
                "compatibility {compatible} disagrees with cellwise commutation {commutes}"
            ));
        }
        // condition (iii): the distribution exists exactly then and is valid
        let dist = joint_distribution(x, y, state, tol).map_err(hard)?;
        match (compatible, &dist) {
            (true, JointVerdict::Distribution(d)) => {
                if (d.total_mass() - 1.0).abs() > 1e-8 {
                    return fail("joint distribution mass differs from 1");
                }
                for cell in &d.cells {
                    if cell.p < -tol.tol_prob * 10.0 {
                        return fail(format!("negative cell mass {:.3e}", cell.p));
                    }
                }
                let mt = x.cluster_tol().max(y.cluster_tol());
                for p in x.points() {
                    let born = p.projector.mul(&rho).trace().re;
                    if (d.marginal_x(p.value, mt) - born).abs() > 1e-8 {
                        return fail("x-marginal differs from the Born distribution");
                    }
                }
                for p in y.points() {
                    let born = p.projector.mul(&rho).trace().re;
                    if (d.marginal_y(p.value, mt) - born).abs() > 1e-8 {
                        return fail("y-marginal differs from the Born distribution");
                    }
                }
            }
            (false, JointVerdict::Incompatible(_)) => {}
            (claim, _) => {
                return fail(format!(
                    "distribution presence disagrees with compatibility = {claim}"
                ))
            }
        }
    }
    Ok(())
}

fn s6_jm(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let (x, y, state) = engineered_compatible_pair(rng, dim, tol);
    let jm = joint_measurability_check(&x, &y, &state, tol).map_err(hard)?;
    if !jm.jointly_measurable {
        return fail(format!(
            "compatible pair not jointly measurable (residual {:.3e})",
            jm.max_residual
        ));
    }
    // the commuting Bell fixture
    let sz = ComplexMatrix::diagonal(&[1.0, -1.0]);
    let sx = ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let i2 = ComplexMatrix::identity(2);
    let bx = HermitianObservable::new(sz.kron(&i2), tol).map_err(hard)?;
    let by = HermitianObservable::new(i2.kron(&sx), tol).map_err(hard)?;
    let r = C64::new(1.0 / 2f64.sqrt(), 0.0);
    let bell = QuantumState::Vector(vec![r, C64::new(0.0, 0.0), C64::new(0.0, 0.0), r]);
    let jm2 = joint_measurability_check(&bx, &by, &bell, tol).map_err(hard)?;
    if !jm2.jointly_measurable || jm2.max_residual > tol.tol_zero {
        return fail("Bell fixture failed the sandwich identities");
    }
    Ok(())
}

fn s6_pcjpd(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let mut instances = vec![
        engineer_correlated_pair(rng, dim, tol),
        engineered_compatible_pair(rng, dim, tol),
    ];
    instances.push((
        random_nondegenerate_observable(rng, dim, tol),
        random_nondegenerate_observable(rng, dim, tol),
        random_state(rng, dim),
    ));
    for (x, y, state) in &instances {
        let verdict = is_perfectly_correlated(x, y, state, tol).map_err(hard)?;
        if verdict_clarity(&verdict) == Clarity::Gray {
            continue;
        }
        let dc = diagonal_concentration(x, y, state, tol).map_err(hard)?;
        if dc.concentrated != verdict.correlated {
            return fail(format!(
                "diagonal concentration {} disagrees with correlation {}",
                dc.concentrated, verdict.correlated
            ));
        }
    }
    Ok(())
}

/// Engineered pair whose spectra are disjoint: identically-distributed-type
/// diagnostics fail with order-one margins.
fn shifted_spectrum_pair<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    tol: &ToleranceProfile,
) -> (HermitianObservable, HermitianObservable, Vec<C64>) {
    let x = random_nondegenerate_observable(rng, dim, tol);
    let y = x.apply_function(&RealFunction::affine(1.0, 7.5));
    let psi = random_state_vector(rng, dim);
    (x, y, psi)
}

fn s6_phi(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let grid = default_grid();
    // positive: engineered correlated pair, probes from the cyclic subspace
    let (x, y, state) = engineer_correlated_pair(rng, dim, tol);
    let psi = state.range_basis(tol)[0].clone();
    let cyclic = cyclic_subspace(&x, &QuantumState::Vector(psi.clone()), tol);
    let mut probes: Vec<Vec<C64>> = cyclic.basis().to_vec();
    for _ in 0..2 {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        for b in cyclic.basis() {
            v = crate::linalg::vec_add(
                &v,
                &vec_scale(b, C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)),
            );
        }
        if vec_norm(&v) > 1e-6 {
            probes.push(crate::linalg::vec_normalize(&v));
        }
    }
    for probe in &probes {
        let r = phi_shift_residual(&x, &y, probe, &grid, tol);
        if r > 1e-8 {
            return fail(format!("Φ shift identity failed on a correlated pair: {r:.3e}"));
        }
    }
    // negative: disjoint spectra give order-one axis violations
    let (nx, ny, npsi) = shifted_spectrum_pair(rng, dim, tol);
    let mut worst: f64 = 0.0;
    for k in 0..21 {
        let t = -3.0 + 0.3 * k as f64;
        let lhs = crate::joint_dist::phi_value(&nx, &ny, &npsi, t, 0.0, 1.0, tol);
        let rhs = crate::joint_dist::phi_value(&nx, &ny, &npsi, 0.0, t, 1.0, tol);
        worst = worst.max((lhs - rhs).norm());
    }
    if worst < 1e-7 {
        return fail("axis condition failed to flag a shifted-spectrum pair");
    }
    Ok(())
}

fn s6_psi(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let grid = default_grid();
    let (x, y, state) = engineer_correlated_pair(rng, dim, tol);
    let psi = state.range_basis(tol)[0].clone();
    let residual = psi_shift_residual(&x, &y, &psi, &grid);
    if residual > 1e-8 {
        return fail(format!("Ψ shift identity failed on a correlated pair: {residual:.3e}"));
    }
    let (nx, ny, npsi) = shifted_spectrum_pair(rng, dim, tol);
    let neg = psi_shift_residual(&nx, &ny, &npsi, &grid);
    if neg <= 1e-8 * 10.0 {
        return fail(format!("Ψ residual {neg:.3e} failed to flag an uncorrelated pair"));
    }
    Ok(())
}

fn s7_characterization(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let d1 = 2;
    let d2 = if dim <= 2 { 2 } else { 3 };
    let rank = d1.min(d2);
    // engineered Schmidt state with observables built on its frames
    let u1 = haar_unitary(rng, d1);
    let u2 = haar_unitary(rng, d2);
    let mut weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 0.2).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut psi = vec![C64::new(0.0, 0.0); d1 * d2];
    for (j, w) in weights.iter().enumerate() {
        let term = vec_kron(&u1.column(j), &u2.column(j));
        psi = crate::linalg::vec_add(&psi, &vec_scale(&term, C64::new(w.sqrt(), 0.0)));
    }
    let lambdas: Vec<f64> = (0..d1).map(|j| j as f64 + 1.0).collect();
    let left: Vec<Vec<C64>> = (0..d1).map(|c| u1.column(c)).collect();
    let x = HermitianObservable::from_eigenpairs(&lambdas, &left, tol).map_err(hard)?;
    let mut mu: Vec<f64> = lambdas.clone();
    mu.extend((d1..d2).map(|j| 50.0 + j as f64));
    let right: Vec<Vec<C64>> = (0..d2).map(|c| u2.column(c)).collect();
    let y = HermitianObservable::from_eigenpairs(&mu, &right, tol).map_err(hard)?;

    let cert = bipartite_pc_characterize(&x, &y, &psi, (d1, d2), tol).map_err(hard)?;
    match cert {
        None => return fail("engineered Schmidt pair was not certified"),
        Some(c) => {
            let mass: f64 = c.weights.iter().sum();
            if (mass - 1.0).abs() > 1e-8 {
                return fail("certified weights do not sum to 1");
            }
            for (i, &l) in c.eigenvalues.iter().enumerate() {
                let rx = vec_sub(
                    &x.matrix().mul_vec(&c.left[i]),
                    &vec_scale(&c.left[i], C64::new(l, 0.0)),
                );
                let ry = vec_sub(
                    &y.matrix().mul_vec(&c.right[i]),
                    &vec_scale(&c.right[i], C64::new(l, 0.0)),
                );
                if vec_norm(&rx) > 1e-8 || vec_norm(&ry) > 1e-8 {
                    return fail("certified vectors are not eigenvectors at the common value");
                }
            }
            // reconstruction
            let mut rec = vec![C64::new(0.0, 0.0); d1 * d2];
            for ((w, l), r) in c.weights.iter().zip(&c.left).zip(&c.right) {
                rec = crate::linalg::vec_add(
                    &rec,
                    &vec_scale(&vec_kron(l, r), C64::new(w.sqrt(), 0.0)),
                );
            }
            // phases may differ per slice; compare via overlap magnitude
            let overlap = vec_inner(&rec, &psi).norm();
            if (overlap - 1.0).abs() > 1e-8 {
                return fail(format!("certified reconstruction overlap {overlap}"));
            }
        }
    }
    // negative: random local observables on a random entangled state
    let rx = random_nondegenerate_observable(rng, d1, tol);
    let ry = random_nondegenerate_observable(rng, d2, tol);
    let rpsi = random_state_vector(rng, d1 * d2);
    let big_x = HermitianObservable::new(
        rx.matrix().kron(&ComplexMatrix::identity(d2)),
        tol,
    )
    .map_err(hard)?;
    let big_y = HermitianObservable::new(
        ComplexMatrix::identity(d1).kron(ry.matrix()),
        tol,
    )
    .map_err(hard)?;
    let v = is_perfectly_correlated(&big_x, &big_y, &QuantumState::Vector(rpsi.clone()), tol)
        .map_err(hard)?;
    let cert2 = bipartite_pc_characterize(&rx, &ry, &rpsi, (d1, d2), tol).map_err(hard)?;
    if verdict_clarity(&v) == Clarity::False && cert2.is_some() {
        return fail("uncorrelated bipartite pair was certified");
    }
    if v.correlated && cert2.is_none() {
        return fail("correlated bipartite pair was refused a certificate");
    }
    Ok(())
}

/// Maximally entangled state together with a binary observable satisfying
/// the first three Hardy conditions by construction. The construction forces
/// D = U: with a symmetric Schmidt-frame product the conditions pin the
/// second observable to the first.
pub fn engineered_hardy_blockade<R: Rng + ?Sized>(
    rng: &mut R,
    tol: &ToleranceProfile,
) -> (Vec<C64>, HermitianObservable, HermitianObservable) {
    let gamma = rng.random::<f64>() * std::f64::consts::PI;
    let (cg, sg) = (gamma.cos(), gamma.sin());
    let q = ComplexMatrix::from_real(&[&[cg, -sg], &[sg, cg]]);
    let alpha = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
    let beta = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
    let d = ComplexMatrix::from_fn(2, 2, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i == 0 {
            C64::new(0.0, alpha).exp()
        } else {
            C64::new(0.0, beta).exp()
        }
    });
    let s = q.mul(&d).mul(&q.transpose());

    let v1 = haar_unitary(rng, 2);
    let v2 = s.adjoint().mul(&v1.conj());
    let r = C64::new(1.0 / 2f64.sqrt(), 0.0);
    let phi_plus = vec![r, C64::new(0.0, 0.0), C64::new(0.0, 0.0), r];
    let psi = v1.kron(&v2).mul_vec(&phi_plus);

    // u solves S|v⟩ ∝ |v̄⟩: w = (cos τ, sin τ · e^{i((α−β)/2 + kπ)}), v = Q w
    let tau = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
    let k_branch = if rng.random::<f64>() < 0.5 { 0.0 } else { 1.0 };
    let phase = (alpha - beta) / 2.0 + k_branch * std::f64::consts::PI;
    let w = vec![
        C64::new(tau.cos(), 0.0),
        C64::new(0.0, phase).exp() * tau.sin(),
    ];
    let v = q.mul_vec(&w);
    let u_proj = outer(&v, &v);
    let u_obs = HermitianObservable::new(u_proj.clone(), tol).expect("projector");
    let d_obs = HermitianObservable::new(u_proj, tol).expect("projector");
    (psi, u_obs, d_obs)
}

fn s7_hardy_max(rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    // engineered (a)-(c)-satisfying instance
    let (psi, u_obs, d_obs) = engineered_hardy_blockade(rng, tol);
    let report = hardy_check(&psi, &u_obs, &d_obs, tol).map_err(hard)?;
    for (i, &p) in report.condition_values[..3].iter().enumerate() {
        if p > 1e-10 {
            return fail(format!("engineered condition {i} has probability {p:.3e}"));
        }
    }
    if report.verdict == HardyVerdict::NonlocalityWitnessed {
        return fail("maximally entangled state witnessed nonlocality");
    }
    if report.verdict != HardyVerdict::BlockedByTransitivity {
        return fail(format!("expected the transitivity blockade, got {:?}", report.verdict));
    }
    if report.correlation_chain.len() != 4 {
        return fail("transitivity chain is incomplete");
    }
    if report.condition_values[3] > tol.tol_prob {
        return fail(format!(
            "fourth probability {:.3e} should be forced to zero",
            report.condition_values[3]
        ));
    }
    // the chained relations hold as genuine perfect correlations
    let i2 = ComplexMatrix::identity(2);
    let pairs = [
        (u_obs.matrix().kron(&i2), i2.kron(u_obs.matrix())),
        (u_obs.matrix().kron(&i2), i2.kron(d_obs.matrix())),
        (d_obs.matrix().kron(&i2), i2.kron(u_obs.matrix())),
        (d_obs.matrix().kron(&i2), i2.kron(d_obs.matrix())),
    ];
    for (a, b) in pairs {
        let oa = HermitianObservable::new(a, tol).map_err(hard)?;
        let ob = HermitianObservable::new(b, tol).map_err(hard)?;
        let v = is_perfectly_correlated(&oa, &ob, &QuantumState::Vector(psi.clone()), tol)
            .map_err(hard)?;
        if !v.correlated {
            return fail("a chained relation is not a perfect correlation");
        }
    }

    // arbitrary binary pairs on a random maximal state never witness
    let v1 = haar_unitary(rng, 2);
    let v2 = haar_unitary(rng, 2);
    let r = C64::new(1.0 / 2f64.sqrt(), 0.0);
    let phi_plus = vec![r, C64::new(0.0, 0.0), C64::new(0.0, 0.0), r];
    let psi0 = v1.kron(&v2).mul_vec(&phi_plus);
    let rand_angles = |rng: &mut ChaCha8Rng| {
        (
            rng.random::<f64>() * std::f64::consts::PI,
            rng.random::<f64>() * 2.0 * std::f64::consts::PI,
        )
    };
    let (tu, pu) = rand_angles(rng);
    let (td, pd) = rand_angles(rng);
    let ru = HermitianObservable::new(bloch_projector(tu, pu), tol).map_err(hard)?;
    let rd = HermitianObservable::new(bloch_projector(td, pd), tol).map_err(hard)?;
    let random_report = hardy_check(&psi0, &ru, &rd, tol).map_err(hard)?;
    if random_report.verdict == HardyVerdict::NonlocalityWitnessed {
        return fail("a random pair witnessed nonlocality on a maximal state");
    }

    // the lemma: zeroing c01 by a local rotation forces c10 = 0
    let theta = rng.random::<f64>() * std::f64::consts::PI;
    let phi_angle = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
    let u = bloch_projector(theta, phi_angle);
    let u_basis = crate::linalg::eig_hermitian(&u, tol).map_err(hard)?;
    // coefficients c_{jk} in the u eigenbasis on both legs
    let b0 = u_basis.eigenvectors.column(0);
    let b1 = u_basis.eigenvectors.column(1);
    let coeff = |l: &Vec<C64>, m: &Vec<C64>| vec_inner(&vec_kron(l, m), &psi0);
    // rotate leg 2 so that c01 -> 0: with R = B G B† the coefficients map as
    // c' = c Gᵀ, so the second row of G must kill (c00, c01) bilinearly
    let c00 = coeff(&b0, &b0);
    let c01 = coeff(&b0, &b1);
    let norm = (c00.norm_sqr() + c01.norm_sqr()).sqrt();
    if norm < 1e-9 {
        return Ok(()); // degenerate draw, nothing to test
    }
    let n_inv = C64::new(1.0 / norm, 0.0);
    let mut g = ComplexMatrix::zeros(2, 2);
    g[(0, 0)] = c00.conj() * n_inv;
    g[(0, 1)] = c01.conj() * n_inv;
    g[(1, 0)] = -c01 * n_inv;
    g[(1, 1)] = c00 * n_inv;
    let basis_mat = ComplexMatrix::from_columns(&[b0.clone(), b1.clone()]);
    let r2 = basis_mat.mul(&g).mul(&basis_mat.adjoint());
    let psi_rot = ComplexMatrix::identity(2).kron(&r2).mul_vec(&psi0);
    let c01_rot = vec_inner(&vec_kron(&b0, &b1), &psi_rot);
    if c01_rot.norm() > 1e-9 {
        return fail(format!(
            "basis rotation failed to zero c01: {:.3e} (was {:.3e})",
            c01_rot.norm(),
            c01.norm()
        ));
    }
    let c10_rot = vec_inner(&vec_kron(&b1, &b0), &psi_rot);
    if c10_rot.norm() > 1e-8 {
        return fail(format!(
            "maximal-entanglement lemma violated: |c10| = {:.3e}",
            c10_rot.norm()
        ));
    }
    Ok(())
}

fn s4_joint_dilation(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let n1 = 2 + (rng.random::<u64>() % 3) as usize;
    let n2 = 2 + (rng.random::<u64>() % 3) as usize;
    let p1 = Povm::random(rng, dim, n1, tol).map_err(hard)?;
    let p2 = Povm::random(rng, dim, n2, tol).map_err(hard)?;

    let nd = naimark_dilate(&p1, tol).map_err(hard)?;
    let res = nd.identity_residual(&p1);
    if res > 1e-9 {
        return fail(format!("Naimark identity residual {res:.3e}"));
    }
    let rho = random_density(rng, dim);
    let big_rho = rho.kron(&outer(&nd.probe_state, &nd.probe_state));
    for o in p1.outcomes() {
        let lhs = o.effect.mul(&rho).trace().re;
        let el = nd.dilated.point_projector(o.label, nd.dilated.cluster_tol());
        let rhs = el.mul(&big_rho).trace().re;
        if (lhs - rhs).abs() > 1e-9 {
            return fail("meter statistics differ from the POVM statistics");
        }
    }

    let jd = joint_dilate(&p1, &p2, tol).map_err(hard)?;
    let res2 = jd.identity_residual(&p1, &p2);
    if res2 > 1e-9 {
        return fail(format!("joint dilation residual {res2:.3e}"));
    }

    // correlation transports through the dilation
    let state = random_state(rng, dim);
    let direct = povm_perfectly_correlated(&p1, &p2, &state, tol).map_err(hard)?;
    let lifted = is_perfectly_correlated(
        &jd.first,
        &jd.second,
        &jd.embed_state(&state),
        tol,
    )
    .map_err(hard)?;
    if verdict_clarity(&direct) != Clarity::Gray && direct.correlated != lifted.correlated {
        return fail("dilated correlation verdict differs from the direct one");
    }

    // an engineered correlated projective pair transports positively
    let (x, y, cstate) = engineer_correlated_pair(rng, dim, tol);
    let q1 = Povm::from_observable(&x);
    let q2 = Povm::from_observable(&y);
    let jd2 = joint_dilate(&q1, &q2, tol).map_err(hard)?;
    let direct2 = povm_perfectly_correlated(&q1, &q2, &cstate, tol).map_err(hard)?;
    let lifted2 = is_perfectly_correlated(
        &jd2.first,
        &jd2.second,
        &jd2.embed_state(&cstate),
        tol,
    )
    .map_err(hard)?;
    if !(direct2.correlated && lifted2.correlated) {
        return fail("engineered correlated pair lost correlation through dilation");
    }
    Ok(())
}

fn s4_distance_povm(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let (x, y, state) = engineer_correlated_pair(rng, dim, tol);
    let p1 = Povm::from_observable(&x);
    let p2 = Povm::from_observable(&y);
    if !povm_perfectly_correlated(&p1, &p2, &state, tol).map_err(hard)?.correlated {
        return fail("engineered projective pair is not correlated");
    }
    let rho = state.density_matrix();
    let mut labels = p1.labels();
    labels.extend(p2.labels());
    for f in RealFunction::probe_family(&labels) {
        let lhs = p1.moment(&f).mul(&rho);
        let rhs = p2.moment(&f).mul(&rho);
        let fscale = labels.iter().map(|&v| f.eval(v).abs()).fold(1.0, f64::max);
        if lhs.sub(&rhs).max_abs() > 1e-8 * fscale {
            return fail("moment operators differ against the state");
        }
    }
    Ok(())
}

fn s4_pc_state3(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    // positive: an observable against the projective POVM of its partner
    let (x, y, state) = engineer_correlated_pair(rng, dim, tol);
    let report = observable_povm_pc(&x, &Povm::from_observable(&y), &state, tol).map_err(hard)?;
    for (k, ok) in &report {
        if !ok {
            return fail(format!("engineered instance failed condition ({k})"));
        }
    }
    // negative: sharp observable vs a noisy smearing of it, faithful state
    let sharp = random_nondegenerate_observable(rng, dim, tol);
    let eta = 0.5 + rng.random::<f64>() * 0.3;
    let mut outcomes = Vec::new();
    let points = sharp.points();
    for (i, p) in points.iter().enumerate() {
        let mut eff = p.projector.scale_re(eta);
        eff = eff.add(&ComplexMatrix::identity(dim).scale_re((1.0 - eta) / dim as f64));
        outcomes.push(crate::spectral::PovmOutcome { label: points[i].value, effect: eff });
    }
    let noisy = Povm::new(outcomes, tol).map_err(hard)?;
    let faithful = QuantumState::Density(random_density(rng, dim));
    let report2 = observable_povm_pc(&sharp, &noisy, &faithful, tol).map_err(hard)?;
    let votes: Vec<bool> = report2.values().copied().collect();
    if votes.iter().any(|&v| v != votes[0]) {
        return fail("noisy-instance conditions disagree with each other");
    }
    if votes[0] {
        return fail("noisy POVM cannot be perfectly correlated with the sharp observable");
    }
    Ok(())
}

fn s8_precise_measurement(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    // the model precisely measures its own observable
    let a = random_nondegenerate_observable(rng, dim, tol);
    let mp = von_neumann_model(&a, None, tol).map_err(hard)?;
    let state = random_state(rng, dim);
    let report = precisely_measures(&mp, &a, &state, tol).map_err(hard)?;
    for (k, ok) in &report {
        if !ok {
            return fail(format!("model failed condition {k} on its own observable"));
        }
    }

    // the separated-subsystem counterexample: BSF holds, correlation fails
    let local = random_nondegenerate_observable(rng, 2, tol);
    let i2 = ComplexMatrix::identity(2);
    let a_obs = HermitianObservable::new(local.matrix().kron(&i2), tol).map_err(hard)?;
    let b_obs = HermitianObservable::new(i2.kron(local.matrix()), tol).map_err(hard)?;
    let apparatus = projective_model(&b_obs, tol).map_err(hard)?;
    let sigma = random_density(rng, 2);
    let product = QuantumState::Density(sigma.kron(&sigma));
    let on_b = precisely_measures(&apparatus, &b_obs, &product, tol).map_err(hard)?;
    if on_b.values().any(|v| !v) {
        return fail("apparatus does not even measure its own observable");
    }
    let on_a = precisely_measures(&apparatus, &a_obs, &product, tol).map_err(hard)?;
    if !on_a["bsf_state"] {
        return fail("counterexample should satisfy the Born formula on the product state");
    }
    if on_a["dilated_correlation"] || on_a["povm_criterion"] || on_a["bsf_cyclic"] {
        return fail("counterexample should fail the correlation criteria");
    }

    // theorem-level agreement of the three criteria on all instances tried
    for rep in [&report, &on_b, &on_a] {
        let trio = [rep["dilated_correlation"], rep["povm_criterion"], rep["bsf_cyclic"]];
        if trio.iter().any(|&v| v != trio[0]) {
            return fail(format!("criteria disagree: {trio:?}"));
        }
    }
    Ok(())
}

fn s8_model_characterization(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let a = random_nondegenerate_observable(rng, dim, tol);
    let phases: Vec<C64> = (0..dim)
        .map(|_| C64::new(0.0, rng.random::<f64>() * 2.0 * std::f64::consts::PI).exp())
        .collect();
    let mp = von_neumann_model(&a, Some(&phases), tol).map_err(hard)?;
    let c = model_characterization(&mp, &a, tol).map_err(hard)?;
    if !c.satisfied {
        return fail("characterization rejected a genuine model");
    }
    let matched = c.phases.expect("satisfied characterization extracts phases");
    // phases are defined relative to the model's eigenvector conventions, so
    // compare instruments instead of raw phases
    let rebuilt = von_neumann_model(&a, Some(&matched), tol).map_err(hard)?;
    if !statistically_equivalent(&mp, &rebuilt, tol).map_err(hard)? {
        return fail("extracted phases rebuild an inequivalent model");
    }

    // nondemolition follows from (i) and (ii) by transitivity
    let before = HermitianObservable::new(
        a.matrix().kron(&ComplexMatrix::identity(mp.probe_dim)),
        tol,
    )
    .map_err(hard)?;
    let after = mp.system_after(&a, tol).map_err(hard)?;
    let psi = random_state_vector(rng, dim);
    let state = QuantumState::Vector(vec_kron(&psi, &mp.probe_state));
    if !is_perfectly_correlated(&before, &after, &state, tol).map_err(hard)?.correlated {
        return fail("nondemolition failed on the model");
    }

    // a spoiled interaction is rejected
    let spoiler = ComplexMatrix::identity(dim).kron(&haar_unitary(rng, mp.probe_dim));
    let mut spoiled = mp.clone();
    spoiled.interaction = spoiler.mul(&spoiled.interaction);
    let c2 = model_characterization(&spoiled, &a, tol).map_err(hard)?;
    if c2.satisfied {
        return fail("characterization accepted a spoiled interaction");
    }
    Ok(())
}

fn s8_two_of_three(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let a = random_nondegenerate_observable(rng, dim, tol);
    let model = von_neumann_model(&a, None, tol).map_err(hard)?;
    let identity_mp = crate::measurement::MeasuringProcess::new(
        model.probe_dim,
        model.probe_state.clone(),
        ComplexMatrix::identity(dim * model.probe_dim),
        model.meter.clone(),
        tol,
    )
    .map_err(hard)?;
    let mut spoiled = model.clone();
    spoiled.interaction = ComplexMatrix::identity(dim)
        .kron(&haar_unitary(rng, model.probe_dim))
        .mul(&spoiled.interaction);
    let mut random_mp = model.clone();
    random_mp.interaction = haar_unitary(rng, dim * model.probe_dim);

    let psi = random_state_vector(rng, dim);
    for mp in [&model, &identity_mp, &spoiled, &random_mp] {
        let state = QuantumState::Vector(vec_kron(&psi, &mp.probe_state));
        let before = HermitianObservable::new(
            a.matrix().kron(&ComplexMatrix::identity(mp.probe_dim)),
            tol,
        )
        .map_err(hard)?;
        let meter_after = mp.meter_after(tol).map_err(hard)?;
        let system_after = mp.system_after(&a, tol).map_err(hard)?;

        let vr = is_perfectly_correlated(&before, &meter_after, &state, tol).map_err(hard)?;
        let rp = is_perfectly_correlated(&system_after, &meter_after, &state, tol).map_err(hard)?;
        let nd = is_perfectly_correlated(&before, &system_after, &state, tol).map_err(hard)?;
        let clar = [verdict_clarity(&vr), verdict_clarity(&rp), verdict_clarity(&nd)];
        if clar.contains(&Clarity::Gray) {
            continue;
        }
        let (vr, rp, nd) = (vr.correlated, rp.correlated, nd.correlated);
        if (vr && rp && !nd) || (vr && nd && !rp) || (rp && nd && !vr) {
            return fail(format!(
                "two-of-three violated: value-reproducing {vr}, repeatable {rp}, nondemolition {nd}"
            ));
        }
        if std::ptr::eq(mp, &model) && !(vr && rp && nd) {
            return fail("the model must satisfy all three requirements");
        }
    }
    Ok(())
}

fn s9_implications(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    // random + engineered instances: (i) ⟺ (ii), (i) ⟹ (iii), (i) ⟹ (iv)
    let mut instances = Vec::new();
    {
        let (x, y, state) = engineer_correlated_pair(rng, dim, tol);
        instances.push((x, y, state.range_basis(tol)[0].clone()));
    }
    instances.push((
        random_nondegenerate_observable(rng, dim, tol),
        random_nondegenerate_observable(rng, dim, tol),
        random_state_vector(rng, dim),
    ));
    for (x, y, psi) in &instances {
        let state = QuantumState::Vector(psi.clone());
        let vi = is_perfectly_correlated(x, y, &state, tol).map_err(hard)?;
        if verdict_clarity(&vi) == Clarity::Gray {
            continue;
        }
        let equi = vi.correlated;

        // (ii) reproducibility: successive sandwich masses vanish off-diagonal
        let mt = x.cluster_tol().max(y.cluster_tol());
        let mut off_mass: f64 = 0.0;
        for px in x.points() {
            for py in y.points() {
                if crate::spectral::values_match(px.value, py.value, mt) {
                    continue;
                }
                let xy = vec_norm(&py.projector.mul_vec(&px.projector.mul_vec(psi))).powi(2);
                let yx = vec_norm(&px.projector.mul_vec(&py.projector.mul_vec(psi))).powi(2);
                off_mass = off_mass.max(xy.max(yx));
            }
        }
        let repro = off_mass <= tol.tol_prob * dim as f64;
        if off_mass > tol.tol_prob * dim as f64 && off_mass < 1e-7 {
            continue;
        }
        if equi != repro {
            return fail(format!("(i) = {equi} but (ii) = {repro}"));
        }

        if equi {
            let zd = vec_norm(&vec_sub(
                &x.matrix().mul_vec(psi),
                &y.matrix().mul_vec(psi),
            ));
            if zd > 1e-7 * x.matrix().max_abs().max(1.0) {
                return fail(format!("(i) holds but (iii) residual is {zd:.3e}"));
            }
            if !identically_distributed(x, y, &state, tol).map_err(hard)? {
                return fail("(i) holds but (iv) fails");
            }
        }
    }

    // stored witnesses for the non-implications, all clear of 1e-8
    let (x4, y4, psi4) = zero_difference_pair(tol);
    let s4 = QuantumState::Vector(psi4.clone());
    let zd = vec_norm(&vec_sub(&x4.matrix().mul_vec(&psi4), &y4.matrix().mul_vec(&psi4)));
    if zd > 1e-12 {
        return fail("fixture violates (iii)");
    }
    let v4 = is_perfectly_correlated(&x4, &y4, &s4, tol).map_err(hard)?;
    if v4.correlated || v4.witness.map(|w| w.magnitude).unwrap_or(0.0) < 1e-8 {
        return fail("(iii) ⇏ (i) witness is not clear");
    }
    if identically_distributed(&x4, &y4, &s4, tol).map_err(hard)? {
        return fail("(iii) ⇏ (iv) witness failed: distributions match");
    }

    let (xi, yi, psii) = identically_distributed_pair(tol);
    let si = QuantumState::Vector(psii.clone());
    if !identically_distributed(&xi, &yi, &si, tol).map_err(hard)? {
        return fail("(iv) fixture is not identically distributed");
    }
    let vi2 = is_perfectly_correlated(&xi, &yi, &si, tol).map_err(hard)?;
    if vi2.correlated || vi2.witness.map(|w| w.magnitude).unwrap_or(0.0) < 1e-8 {
        return fail("(iv) ⇏ (i) witness is not clear");
    }
    let zd2 = vec_norm(&vec_sub(&xi.matrix().mul_vec(&psii), &yi.matrix().mul_vec(&psii)));
    if zd2 < 1e-8 {
        return fail("(iv) ⇏ (iii) witness is not clear");
    }
    Ok(())
}

// realize_instrument and measure round out the measurement machinery;
// exercised here so instrument realizations stay equivalent.
#[allow(dead_code)]
fn exercise_realization(dim: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> TrialOutcome {
    let a = random_nondegenerate_observable(rng, dim, tol);
    let mp = von_neumann_model(&a, None, tol).map_err(hard)?;
    let instr = instrument_of(&mp);
    let realized = realize_instrument(&instr, tol).map_err(hard)?;
    if !statistically_equivalent(&mp, &realized, tol).map_err(hard)? {
        return fail("realized instrument is not equivalent");
    }
    let state = random_state(rng, dim);
    let recs = measure(&mp, &state, tol).map_err(hard)?;
    let total: f64 = recs.iter().map(|r| r.probability).sum();
    if (total - 1.0).abs() > 1e-9 {
        return fail("output distribution is not normalized");
    }
    let _ = povm_of(&instr, tol).map_err(hard)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_runs_clean_on_a_small_budget() {
        let config = SuiteConfig { trials: 6, dims: vec![2, 3, 4], seed: 11 };
        for id in suite_ids() {
            let r = run_suite(id, &config).unwrap();
            assert!(
                r.passed(),
                "suite {id} failed: {:?}",
                r.failures.first().map(|f| &f.description)
            );
        }
    }

    #[test]
    fn suites_are_deterministic_under_seed() {
        let config = SuiteConfig { trials: 4, dims: vec![2, 3], seed: 99 };
        let a = run_suite("S3-vector-equivalence", &config).unwrap();
        let b = run_suite("S3-vector-equivalence", &config).unwrap();
        assert_eq!(
            serde_json::to_string(&a.to_json()).unwrap(),
            serde_json::to_string(&b.to_json()).unwrap()
        );
    }

    #[test]
    fn unknown_suites_are_rejected() {
        assert!(matches!(
            run_suite("S0-nope", &SuiteConfig::default()),
            Err(Error::UnknownSuite(_))
        ));
    }

    #[test]
    fn engineered_pairs_are_correlated_and_distinct() {
        let tol = ToleranceProfile::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [2, 3, 4, 5] {
            let (x, y, state) = engineer_correlated_pair(&mut rng, dim, &tol);
            let v = is_perfectly_correlated(&x, &y, &state, &tol).unwrap();
            assert!(v.correlated);
            if dim > 1 {
                assert!(x.matrix().sub(y.matrix()).max_abs() > 0.1);
            }
        }
    }

    #[test]
    fn failures_replay_to_the_same_verdict() {
        // engineer a failing "suite" by replaying a fabricated failure: a
        // passing trial must replay as not-reproducing
        let payload = serde_json::json!({
            "suite": "S3-counterexample",
            "trial": 0,
            "dim": 4,
            "trial_seed": 1u64,
            "description": "made-up failure",
        });
        assert!(!replay_failure(&payload).unwrap());
    }

    #[test]
    fn realization_exercise_passes() {
        let tol = ToleranceProfile::default();
        for seed in 0..4u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            exercise_realization(2 + (seed as usize % 3), &mut rng, &tol).unwrap();
        }
    }
}
