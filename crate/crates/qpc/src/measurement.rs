//! Measuring processes, instruments, and precise-measurement decisions.
//!
//! A measuring process is the quadruple (probe space, probe state ξ,
//! interaction U, meter M). Its instrument maps a state to unnormalized
//! conditional outputs per meter outcome; the POVM of the instrument carries
//! the output statistics. An apparatus precisely measures A in ρ exactly
//! when A before the interaction and the meter after it are perfectly
//! correlated in ρ⊗|ξ⟩⟨ξ|.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlation::{
    cyclic_subspace, is_perfectly_correlated, ConditionReport, QuantumState,
};
use crate::linalg::{
    basis_vector, outer, unitary_from_partial_isometry, vec_inner, vec_kron, vec_norm, vec_scale,
    ComplexMatrix, ToleranceProfile, C64,
};
use crate::spectral::{values_match, HermitianObservable, Povm, PovmOutcome};
use crate::{Error, Result};

/// Quadruple (K, ξ, U, M): probe dimension, probe state, measuring
/// interaction on H⊗K, meter observable on K.
#[derive(Debug, Clone)]
pub struct MeasuringProcess {
    pub probe_dim: usize,
    pub probe_state: Vec<C64>,
    pub interaction: ComplexMatrix,
    pub meter: HermitianObservable,
}

impl MeasuringProcess {
    pub fn new(
        probe_dim: usize,
        probe_state: Vec<C64>,
        interaction: ComplexMatrix,
        meter: HermitianObservable,
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        if probe_state.len() != probe_dim || meter.dim() != probe_dim {
            return Err(Error::InvalidProcess("probe pieces disagree on dimension".into()));
        }
        if !interaction.rows().is_multiple_of(probe_dim) {
            return Err(Error::InvalidProcess("interaction is not on H⊗K".into()));
        }
        if (vec_norm(&probe_state) - 1.0).abs() > tol.tol_prob * 10.0 {
            return Err(Error::InvalidProcess("probe state is not a unit vector".into()));
        }
        let gram = interaction.adjoint().mul(&interaction);
        let dev = gram.sub(&ComplexMatrix::identity(gram.dim())).max_abs();
        if dev > tol.tol_ortho * 100.0 {
            return Err(Error::InvalidProcess(format!(
                "interaction is not unitary (deviation {dev:.3e})"
            )));
        }
        Ok(MeasuringProcess { probe_dim, probe_state, interaction, meter })
    }

    pub fn system_dim(&self) -> usize {
        self.interaction.rows() / self.probe_dim
    }

    /// ρ ⊗ |ξ⟩⟨ξ| on the composite space.
    pub fn embed_state(&self, state: &QuantumState) -> QuantumState {
        match state {
            QuantumState::Vector(v) => QuantumState::Vector(vec_kron(v, &self.probe_state)),
            QuantumState::Density(m) => {
                QuantumState::Density(m.kron(&outer(&self.probe_state, &self.probe_state)))
            }
        }
    }

    /// Heisenberg-picture meter after the interaction: U†(I⊗M)U.
    pub fn meter_after(&self, tol: &ToleranceProfile) -> Result<HermitianObservable> {
        let d = self.system_dim();
        let big = ComplexMatrix::identity(d).kron(self.meter.matrix());
        let m = self.interaction.adjoint().mul(&big).mul(&self.interaction).hermitized();
        HermitianObservable::new(m, tol)
    }

    /// System observable after the interaction: U†(A⊗I)U.
    pub fn system_after(
        &self,
        a: &HermitianObservable,
        tol: &ToleranceProfile,
    ) -> Result<HermitianObservable> {
        let big = a.matrix().kron(&ComplexMatrix::identity(self.probe_dim));
        let m = self.interaction.adjoint().mul(&big).mul(&self.interaction).hermitized();
        HermitianObservable::new(m, tol)
    }
}

/// Outcome-indexed Kraus families; Σ over everything is trace-preserving.
#[derive(Debug, Clone)]
pub struct Instrument {
    pub outcomes: Vec<InstrumentOutcome>,
}

#[derive(Debug, Clone)]
pub struct InstrumentOutcome {
    pub label: f64,
    pub kraus: Vec<ComplexMatrix>,
}

impl Instrument {
    /// I({a})ρ = Σᵢ K ρ K† for the matching outcome.
    pub fn apply(&self, label: f64, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = rho.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for o in &self.outcomes {
            if !values_match(o.label, label, 1e-9) {
                continue;
            }
            for k in &o.kraus {
                out = out.add(&k.mul(rho).mul(&k.adjoint()));
            }
        }
        out
    }

    pub fn labels(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.label).collect()
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].kraus[0].dim()
    }

    /// Max deviation of Σ K†K from the identity.
    pub fn normalization_residual(&self) -> f64 {
        let d = self.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for o in &self.outcomes {
            for k in &o.kraus {
                sum = sum.add(&k.adjoint().mul(k));
            }
        }
        sum.sub(&ComplexMatrix::identity(d)).max_abs()
    }
}

/// Kraus decomposition of the instrument of a measuring process:
/// K_{a,i}ψ = (I⊗⟨eᵢ|)(I⊗E^M({a}))U(ψ⊗ξ) over a probe basis.
pub fn instrument_of(mp: &MeasuringProcess) -> Instrument {
    let d = mp.system_dim();
    let k = mp.probe_dim;
    // B = U (I⊗ξ): composite column per system basis vector
    let mut b = ComplexMatrix::zeros(d * k, d);
    for c in 0..d {
        let col = mp.interaction.mul_vec(&vec_kron(&basis_vector(d, c), &mp.probe_state));
        b.set_column(c, &col);
    }
    let mut outcomes = Vec::new();
    for p in mp.meter.points() {
        let big_proj = ComplexMatrix::identity(d).kron(&p.projector);
        let pb = big_proj.mul(&b);
        let mut kraus = Vec::new();
        for i in 0..k {
            let op = ComplexMatrix::from_fn(d, d, |r, c| pb[(r * k + i, c)]);
            if op.max_abs() > 1e-14 {
                kraus.push(op);
            }
        }
        if kraus.is_empty() {
            kraus.push(ComplexMatrix::zeros(d, d));
        }
        outcomes.push(InstrumentOutcome { label: p.value, kraus });
    }
    Instrument { outcomes }
}

/// POVM of an instrument: Π({a}) = Σᵢ K†K.
pub fn povm_of(instr: &Instrument, tol: &ToleranceProfile) -> Result<Povm> {
    let d = instr.dim();
    let outcomes = instr
        .outcomes
        .iter()
        .map(|o| {
            let mut eff = ComplexMatrix::zeros(d, d);
            for k in &o.kraus {
                eff = eff.add(&k.adjoint().mul(k));
            }
            PovmOutcome { label: o.label, effect: eff.hermitized() }
        })
        .collect();
    Povm::new(outcomes, tol)
}

/// One meter outcome with its probability and conditional output state.
#[derive(Debug, Clone)]
pub struct MeasurementOutcomeRecord {
    pub label: f64,
    pub probability: f64,
    /// Absent when the probability is negligible.
    pub conditional_state: Option<ComplexMatrix>,
}

/// Output distribution and conditional states via the partial-trace formulas.
pub fn measure(
    mp: &MeasuringProcess,
    state: &QuantumState,
    tol: &ToleranceProfile,
) -> Result<Vec<MeasurementOutcomeRecord>> {
    let d = mp.system_dim();
    if state.dim() != d {
        return Err(Error::DimensionMismatch { left: state.dim(), right: d });
    }
    let big = mp
        .interaction
        .mul(&mp.embed_state(state).density_matrix())
        .mul(&mp.interaction.adjoint());
    let mut records = Vec::new();
    for p in mp.meter.points() {
        let proj = ComplexMatrix::identity(d).kron(&p.projector);
        let selected = proj.mul(&big).mul(&proj);
        let reduced = selected.partial_trace(d, mp.probe_dim, false)?;
        let probability = reduced.trace().re;
        let conditional_state = if probability > tol.tol_prob {
            let cond = reduced.scale_re(1.0 / probability).hermitized();
            debug_assert!({
                let eig = crate::linalg::eig_hermitian(&cond, tol)?;
                eig.eigenvalues[0] >= -tol.tol_input * 100.0
            });
            Some(cond)
        } else {
            None
        };
        records.push(MeasurementOutcomeRecord { label: p.value, probability, conditional_state });
    }
    Ok(records)
}

/// Statistical equivalence = identical instruments, tested as map equality
/// over the d² symmetrized matrix-unit states.
pub fn statistically_equivalent(
    mp1: &MeasuringProcess,
    mp2: &MeasuringProcess,
    tol: &ToleranceProfile,
) -> Result<bool> {
    let d = mp1.system_dim();
    if mp2.system_dim() != d {
        return Err(Error::DimensionMismatch { left: d, right: mp2.system_dim() });
    }
    let l1 = mp1.meter.eigenvalues();
    let l2 = mp2.meter.eigenvalues();
    let mt = mp1.meter.cluster_tol().max(mp2.meter.cluster_tol());
    if l1.len() != l2.len()
        || l1.iter().any(|&a| !l2.iter().any(|&b| values_match(a, b, mt)))
    {
        return Err(Error::LabelMismatch);
    }
    let i1 = instrument_of(mp1);
    let i2 = instrument_of(mp2);
    let mut spanning: Vec<ComplexMatrix> = Vec::new();
    for r in 0..d {
        for c in 0..d {
            let er = basis_vector(d, r);
            let ec = basis_vector(d, c);
            let v = if r == c {
                er
            } else if r < c {
                vec_scale(&crate::linalg::vec_add(&er, &ec), C64::new(1.0 / 2f64.sqrt(), 0.0))
            } else {
                let ic = vec_scale(&ec, C64::new(0.0, 1.0));
                vec_scale(&crate::linalg::vec_add(&er, &ic), C64::new(1.0 / 2f64.sqrt(), 0.0))
            };
            spanning.push(outer(&v, &v));
        }
    }
    for &label in &l1 {
        for rho in &spanning {
            let a = i1.apply(label, rho);
            let b = i2.apply(label, rho);
            if a.sub(&b).max_abs() > tol.tol_ortho * d as f64 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Evaluates whether the process precisely measures `a` in `state`:
/// - `dilated_correlation`: A⊗I vs U†(I⊗M)U perfectly correlated in ρ⊗|ξ⟩⟨ξ|;
/// - `povm_criterion`: the POVM of the process perfectly correlated with A in ρ;
/// - `bsf_state`: output distribution matches the Born distribution on ρ;
/// - `bsf_cyclic`: the same over states supported in C(A, ρ).
///
/// The first two and the cyclic Born check agree; the plain Born check on ρ
/// is strictly weaker.
pub fn precisely_measures(
    mp: &MeasuringProcess,
    a: &HermitianObservable,
    state: &QuantumState,
    tol: &ToleranceProfile,
) -> Result<ConditionReport> {
    let d = mp.system_dim();
    if a.dim() != d || state.dim() != d {
        return Err(Error::DimensionMismatch { left: a.dim(), right: d });
    }
    let mut report = ConditionReport::new();

    let before = HermitianObservable::new(
        a.matrix().kron(&ComplexMatrix::identity(mp.probe_dim)),
        tol,
    )?;
    let meter_after = mp.meter_after(tol)?;
    let big_state = mp.embed_state(state);
    let dilated = is_perfectly_correlated(&before, &meter_after, &big_state, tol)?;
    report.insert("dilated_correlation".to_string(), dilated.correlated);

    let povm = povm_of(&instrument_of(mp), tol)?;
    let povm_report = crate::dilation::observable_povm_pc(a, &povm, state, tol)?;
    report.insert("povm_criterion".to_string(), povm_report["i"]);

    let born_matches = |s: &QuantumState| -> Result<bool> {
        let rho = s.density_matrix();
        let mt = a.cluster_tol().max(mp.meter.cluster_tol()).max(1e-9);
        let mut values = a.eigenvalues();
        for l in mp.meter.eigenvalues() {
            if !values.iter().any(|&v| values_match(v, l, mt)) {
                values.push(l);
            }
        }
        for &v in &values {
            let born = a.point_projector(v, mt).mul(&rho).trace().re;
            let out = povm.effect_for(v, mt).mul(&rho).trace().re;
            if (born - out).abs() > tol.tol_prob * d as f64 * 10.0 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    report.insert("bsf_state".to_string(), born_matches(state)?);

    let cyclic = cyclic_subspace(a, state, tol);
    let mut bsf_cyclic = true;
    let mut probes: Vec<Vec<C64>> = cyclic.basis().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5bd1e995);
    for _ in 0..4 {
        if cyclic.dim() == 0 {
            break;
        }
        let mut v = vec![C64::new(0.0, 0.0); d];
        for b in cyclic.basis() {
            let re: f64 = rng.random::<f64>() - 0.5;
            let im: f64 = rng.random::<f64>() - 0.5;
            v = crate::linalg::vec_add(&v, &vec_scale(b, C64::new(re, im)));
        }
        if vec_norm(&v) > 1e-6 {
            probes.push(crate::linalg::vec_normalize(&v));
        }
    }
    for p in &probes {
        if !born_matches(&QuantumState::Vector(p.clone()))? {
            bsf_cyclic = false;
            break;
        }
    }
    report.insert("bsf_cyclic".to_string(), bsf_cyclic);
    Ok(report)
}

/// Measurement model for an observable with possibly degenerate spectrum:
/// probe dimension = number of spectral points, U maps ψ⊗ξ to
/// Σ_n (Pₙψ)⊗ξₙ, meter = Σ aₙ|ξₙ⟩⟨ξₙ|.
pub fn projective_model(
    a: &HermitianObservable,
    tol: &ToleranceProfile,
) -> Result<MeasuringProcess> {
    build_model(a, None, tol)
}

/// The repeatable-measurement model for a nondegenerate observable, with an
/// optional unit phase per eigenvalue: U(φₙ⊗ξ) = αₙ·φₙ⊗ξₙ.
pub fn von_neumann_model(
    a: &HermitianObservable,
    phases: Option<&[C64]>,
    tol: &ToleranceProfile,
) -> Result<MeasuringProcess> {
    if a.points().len() != a.dim() {
        return Err(Error::DegenerateSpectrum);
    }
    build_model(a, phases, tol)
}

fn build_model(
    a: &HermitianObservable,
    phases: Option<&[C64]>,
    tol: &ToleranceProfile,
) -> Result<MeasuringProcess> {
    let d = a.dim();
    let k = a.points().len();
    if let Some(ph) = phases {
        if ph.len() != k {
            return Err(Error::DimensionMismatch { left: ph.len(), right: k });
        }
        for z in ph {
            if (z.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidProcess("phases must be unit modulus".into()));
            }
        }
    }
    let xi = basis_vector(k, 0);
    // domain slice: orthonormal basis of H ⊗ ξ, grouped by spectral point;
    // image: the same system vectors tagged by their outcome's probe vector
    let mut domain = Vec::with_capacity(d);
    let mut image = Vec::with_capacity(d);
    for (n, p) in a.points().iter().enumerate() {
        let rank = p.projector.trace().re.round() as usize;
        // orthonormal eigenvectors spanning this spectral point
        let eig_basis = crate::linalg::orthonormalize(
            &(0..d).map(|c| p.projector.column(c)).collect::<Vec<_>>(),
            1e-10,
        );
        debug_assert_eq!(eig_basis.len(), rank);
        let alpha = phases.map_or(C64::new(1.0, 0.0), |ph| ph[n]);
        for v in eig_basis {
            domain.push(vec_kron(&v, &xi));
            image.push(vec_scale(&vec_kron(&v, &basis_vector(k, n)), alpha));
        }
    }
    let u = unitary_from_partial_isometry(&domain, &image, d * k);
    let meter = HermitianObservable::new(ComplexMatrix::diagonal(&a.eigenvalues()), tol)?;
    MeasuringProcess::new(k, xi, u, meter, tol)
}

/// Outcome of the model-characterization test.
#[derive(Debug, Clone)]
pub struct ModelCharacterization {
    /// Both defining correlations hold for every probed input vector.
    pub satisfied: bool,
    /// Unit phases αₙ extracted from U(φₙ⊗ξ) when satisfied.
    pub phases: Option<Vec<C64>>,
}

/// Decides whether (U, ξ) realize the repeatable model of `a`: condition (i)
/// A⊗I ≡ U†(I⊗M)U and condition (ii) U†(A⊗I)U ≡ U†(I⊗M)U in ψ⊗ξ for a
/// spanning family of ψ (eigenbasis plus random superpositions).
pub fn model_characterization(
    mp: &MeasuringProcess,
    a: &HermitianObservable,
    tol: &ToleranceProfile,
) -> Result<ModelCharacterization> {
    let d = mp.system_dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch { left: a.dim(), right: d });
    }
    if a.points().len() != d || mp.meter.points().len() != mp.probe_dim {
        return Err(Error::DegenerateSpectrum);
    }
    let mt = a.cluster_tol().max(mp.meter.cluster_tol());
    let avals = a.eigenvalues();
    let mvals = mp.meter.eigenvalues();
    if avals.len() != mvals.len()
        || avals.iter().any(|&v| !mvals.iter().any(|&w| values_match(v, w, mt)))
    {
        return Err(Error::LabelMismatch);
    }

    let before = HermitianObservable::new(
        a.matrix().kron(&ComplexMatrix::identity(mp.probe_dim)),
        tol,
    )?;
    let meter_after = mp.meter_after(tol)?;
    let system_after = mp.system_after(a, tol)?;

    let mut probes: Vec<Vec<C64>> = (0..d)
        .map(|n| {
            // eigenvector of the n-th spectral point
            crate::linalg::orthonormalize(
                &(0..d).map(|c| a.points()[n].projector.column(c)).collect::<Vec<_>>(),
                1e-10,
            )
            .remove(0)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b9);
    for _ in 0..3 {
        probes.push(crate::linalg::random_state_vector(&mut rng, d));
    }

    let mut satisfied = true;
    for psi in &probes {
        let state = QuantumState::Vector(vec_kron(psi, &mp.probe_state));
        let value_reproducing =
            is_perfectly_correlated(&before, &meter_after, &state, tol)?.correlated;
        let repeatable =
            is_perfectly_correlated(&system_after, &meter_after, &state, tol)?.correlated;
        if !(value_reproducing && repeatable) {
            satisfied = false;
            break;
        }
    }
    if !satisfied {
        return Ok(ModelCharacterization { satisfied: false, phases: None });
    }

    // U(φₙ⊗ξ) = αₙ·φₙ⊗ξₙ with the meter basis vector of the matching value
    let mut phases = Vec::with_capacity(d);
    for (n, &av) in avals.iter().enumerate() {
        let phi_n = &probes[n];
        let evolved = mp.interaction.mul_vec(&vec_kron(phi_n, &mp.probe_state));
        let meter_idx = mp
            .meter
            .eigenvalues()
            .iter()
            .position(|&w| values_match(w, av, mt))
            .expect("label sets already matched");
        let xi_n = crate::linalg::orthonormalize(
            &(0..mp.probe_dim)
                .map(|c| mp.meter.points()[meter_idx].projector.column(c))
                .collect::<Vec<_>>(),
            1e-10,
        )
        .remove(0);
        let target = vec_kron(phi_n, &xi_n);
        let alpha = vec_inner(&target, &evolved);
        let residual = crate::linalg::vec_sub(&evolved, &vec_scale(&target, alpha));
        if (alpha.norm() - 1.0).abs() > 1e-8 || vec_norm(&residual) > 1e-8 {
            return Ok(ModelCharacterization { satisfied: false, phases: None });
        }
        phases.push(alpha);
    }
    Ok(ModelCharacterization { satisfied: true, phases: Some(phases) })
}

/// Builds a measuring process realizing the instrument: probe dimension =
/// total Kraus count, U completed from ψ⊗ξ ↦ Σ (K_{a,i}ψ)⊗e_{a,i}, meter
/// labels repeat the outcome labels across the Kraus slots.
pub fn realize_instrument(
    instr: &Instrument,
    tol: &ToleranceProfile,
) -> Result<MeasuringProcess> {
    let d = instr.dim();
    let norm_res = instr.normalization_residual();
    if norm_res > tol.tol_input * 100.0 {
        return Err(Error::InvalidProcess(format!(
            "instrument is not trace preserving (residual {norm_res:.3e})"
        )));
    }
    let total: usize = instr.outcomes.iter().map(|o| o.kraus.len()).sum();
    let k = total.max(2);
    let xi = basis_vector(k, 0);

    let mut domain = Vec::with_capacity(d);
    let mut image = Vec::with_capacity(d);
    for c in 0..d {
        let ec = basis_vector(d, c);
        domain.push(vec_kron(&ec, &xi));
        let mut img = vec![C64::new(0.0, 0.0); d * k];
        let mut slot = 0;
        for o in &instr.outcomes {
            for kr in &o.kraus {
                let col = kr.mul_vec(&ec);
                for (r, z) in col.iter().enumerate() {
                    img[r * k + slot] = *z;
                }
                slot += 1;
            }
        }
        image.push(img);
    }
    let u = unitary_from_partial_isometry(&domain, &image, d * k);

    let mut meter_diag = vec![0.0; k];
    let mut slot = 0;
    for o in &instr.outcomes {
        for _ in &o.kraus {
            meter_diag[slot] = o.label;
            slot += 1;
        }
    }
    // padding slots reuse the first label so the meter spectrum stays inside
    // the instrument's label set
    for v in meter_diag.iter_mut().skip(slot.max(1)) {
        *v = instr.outcomes[0].label;
    }
    if slot == 1 {
        meter_diag[1] = instr.outcomes[0].label;
    }
    let meter = HermitianObservable::new(ComplexMatrix::diagonal(&meter_diag), tol)?;
    MeasuringProcess::new(k, xi, u, meter, tol)
}

/// Tally of a repeated successive-measurement simulation.
#[derive(Debug, Clone)]
pub struct RepeatabilityTrials {
    pub trials: usize,
    pub agreements: usize,
    /// Counts of the first outcome per meter spectral point.
    pub first_counts: Vec<(f64, usize)>,
}

/// Samples the process twice in a row (collapse in between) and counts how
/// often the two outcomes agree.
pub fn repeatability_trials<R: Rng + ?Sized>(
    mp: &MeasuringProcess,
    state: &QuantumState,
    trials: usize,
    rng: &mut R,
    tol: &ToleranceProfile,
) -> Result<RepeatabilityTrials> {
    let first = measure(mp, state, tol)?;
    let n_out = first.len();
    // second-measurement distribution conditioned on each first outcome
    let mut cond = vec![vec![0.0; n_out]; n_out];
    for (i, rec) in first.iter().enumerate() {
        if let Some(cs) = &rec.conditional_state {
            let second = measure(mp, &QuantumState::Density(cs.clone()), tol)?;
            for (j, r2) in second.iter().enumerate() {
                cond[i][j] = r2.probability;
            }
        }
    }
    let sample = |table: &[f64], r: f64| -> usize {
        let mut acc = 0.0;
        for (k, &p) in table.iter().enumerate() {
            acc += p.max(0.0);
            if r < acc {
                return k;
            }
        }
        table.len() - 1
    };
    let firsts: Vec<f64> = first.iter().map(|r| r.probability).collect();
    let mut agreements = 0;
    let mut first_counts = vec![0usize; n_out];
    for _ in 0..trials {
        let i = sample(&firsts, rng.random());
        first_counts[i] += 1;
        let j = sample(&cond[i], rng.random());
        if i == j {
            agreements += 1;
        }
    }
    Ok(RepeatabilityTrials {
        trials,
        agreements,
        first_counts: first
            .iter()
            .zip(first_counts)
            .map(|(r, c)| (r.label, c))
            .collect(),
    })
}
