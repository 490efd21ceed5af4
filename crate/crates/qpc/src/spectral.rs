//! Spectral measures, functional calculus, and POVMs.
//!
//! A [`HermitianObservable`] caches a tolerance-clustered spectral
//! decomposition, so set evaluation `E^X(Δ)`, functions `f(X)`, and unitary
//! evolution all reduce to sums over finitely many spectral points.

use serde::{Deserialize, Serialize};

use crate::linalg::{
    eig_hermitian, outer, ComplexMatrix, ToleranceProfile, C64,
};
use crate::{Error, Result};

/// One clustered spectral point: eigenvalue and its orthogonal projector.
#[derive(Debug, Clone)]
pub struct SpectralPoint {
    pub value: f64,
    pub projector: ComplexMatrix,
}

/// Hermitian matrix with its clustered spectral decomposition.
#[derive(Debug, Clone)]
pub struct HermitianObservable {
    matrix: ComplexMatrix,
    points: Vec<SpectralPoint>,
    cluster_tol: f64,
}

/// Two spectral values count as the same outcome when they agree within the
/// larger of the two observables' clustering tolerances.
pub fn values_match(a: f64, b: f64, cluster_tol: f64) -> bool {
    (a - b).abs() <= cluster_tol
}

impl HermitianObservable {
    pub fn new(matrix: ComplexMatrix, tol: &ToleranceProfile) -> Result<Self> {
        let eig = eig_hermitian(&matrix, tol)?;
        let d = matrix.dim();
        let cluster_tol = tol.cluster_for(matrix.max_abs());

        let mut points: Vec<SpectralPoint> = Vec::new();
        let mut start = 0;
        while start < d {
            let mut end = start + 1;
            while end < d && eig.eigenvalues[end] - eig.eigenvalues[end - 1] <= cluster_tol {
                end += 1;
            }
            let value = eig.eigenvalues[start..end].iter().sum::<f64>() / (end - start) as f64;
            let mut projector = ComplexMatrix::zeros(d, d);
            for k in start..end {
                let col = eig.eigenvectors.column(k);
                projector = projector.add(&outer(&col, &col));
            }
            points.push(SpectralPoint { value, projector: projector.hermitized() });
            start = end;
        }
        Ok(HermitianObservable { matrix, points, cluster_tol })
    }

    pub fn from_real(rows: &[&[f64]], tol: &ToleranceProfile) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(rows), tol)
    }

    /// Observable Σ λᵢ|bᵢ⟩⟨bᵢ| from an explicit eigenbasis.
    pub fn from_eigenpairs(
        values: &[f64],
        vectors: &[Vec<C64>],
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        assert_eq!(values.len(), vectors.len());
        let d = vectors[0].len();
        let mut m = ComplexMatrix::zeros(d, d);
        for (v, b) in values.iter().zip(vectors) {
            m = m.add(&outer(b, b).scale_re(*v));
        }
        Self::new(m.hermitized(), tol)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn points(&self) -> &[SpectralPoint] {
        &self.points
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    /// `E^X({λ})`: projector of the spectral point matching `value`, or zero.
    pub fn point_projector(&self, value: f64, match_tol: f64) -> ComplexMatrix {
        for p in &self.points {
            if values_match(p.value, value, match_tol) {
                return p.projector.clone();
            }
        }
        ComplexMatrix::zeros(self.dim(), self.dim())
    }

    /// `E^X(s)` = Σ{Pᵢ : λᵢ ∈ s}.
    pub fn spectral_projector(&self, s: &RealSet) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for p in &self.points {
            if s.contains(p.value, self.cluster_tol) {
                out = out.add(&p.projector);
            }
        }
        out
    }

    /// `f(X)` = Σ f(λᵢ)·Pᵢ.
    pub fn apply_function(&self, f: &RealFunction) -> HermitianObservable {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for p in &self.points {
            m = m.add(&p.projector.scale_re(f.eval_at_spectral(p.value, self.cluster_tol)));
        }
        let tol = ToleranceProfile { tol_input: 1e-8, ..ToleranceProfile::default() };
        HermitianObservable::new(m.hermitized(), &tol)
            .expect("function of a Hermitian observable is Hermitian")
    }

    /// Σ f(λᵢ)·Pᵢ as a raw matrix (no re-decomposition).
    pub fn function_matrix(&self, f: &RealFunction) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for p in &self.points {
            m = m.add(&p.projector.scale_re(f.eval_at_spectral(p.value, self.cluster_tol)));
        }
        m
    }

    /// `e^{itX}` via the spectral decomposition.
    pub fn evolution(&self, t: f64) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for p in &self.points {
            let phase = C64::new(0.0, t * p.value).exp();
            m = m.add(&p.projector.scale(phase));
        }
        m
    }

    /// ⟨ψ|X|ψ⟩.
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        crate::linalg::vec_inner(psi, &self.matrix.mul_vec(psi)).re
    }
}

// ---------------------------------------------------------------------------
// real sets

/// Finite union of half-open intervals `[a, b)` and isolated points, the
/// implementable stand-in for Borel sets on finite spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSet {
    pub intervals: Vec<(f64, f64)>,
    pub points: Vec<f64>,
}

impl RealSet {
    /// Normalizes: drops empty intervals, merges overlaps, removes points
    /// interior to an interval.
    pub fn new(intervals: Vec<(f64, f64)>, points: Vec<f64>) -> Self {
        let mut iv: Vec<(f64, f64)> = intervals.into_iter().filter(|(a, b)| a < b).collect();
        iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in iv {
            if let Some(last) = merged.last_mut() {
                if a <= last.1 {
                    last.1 = last.1.max(b);
                    continue;
                }
            }
            merged.push((a, b));
        }
        let mut pts: Vec<f64> = points
            .into_iter()
            .filter(|p| !merged.iter().any(|(a, b)| *p >= *a && *p < *b))
            .collect();
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        RealSet { intervals: merged, points: pts }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Self::new(vec![(a, b)], vec![])
    }

    pub fn point(x: f64) -> Self {
        Self::new(vec![], vec![x])
    }

    pub fn points_set(xs: &[f64]) -> Self {
        Self::new(vec![], xs.to_vec())
    }

    /// The whole real line.
    pub fn everything() -> Self {
        Self::new(vec![(f64::NEG_INFINITY, f64::INFINITY)], vec![])
    }

    pub fn empty() -> Self {
        Self::new(vec![], vec![])
    }

    /// Membership; isolated points match within `point_tol` (the clustering
    /// tolerance of the spectrum being tested), interval bounds are exact.
    pub fn contains(&self, x: f64, point_tol: f64) -> bool {
        self.intervals.iter().any(|(a, b)| x >= *a && x < *b)
            || self.points.iter().any(|p| (x - p).abs() <= point_tol)
    }
}

// ---------------------------------------------------------------------------
// real functions

/// Total real→real map with a symbolic tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RealFunction {
    /// c₀ + c₁ t + c₂ t² + …
    Poly { coeffs: Vec<f64> },
    /// 1 on the set, 0 elsewhere.
    Indicator { set: RealSet },
    Named { name: NamedFunction },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedFunction {
    Arctan,
    Abs,
    Id,
}

impl RealFunction {
    pub fn identity() -> Self {
        RealFunction::Named { name: NamedFunction::Id }
    }

    pub fn arctan() -> Self {
        RealFunction::Named { name: NamedFunction::Arctan }
    }

    pub fn abs() -> Self {
        RealFunction::Named { name: NamedFunction::Abs }
    }

    pub fn poly(coeffs: &[f64]) -> Self {
        RealFunction::Poly { coeffs: coeffs.to_vec() }
    }

    pub fn square() -> Self {
        Self::poly(&[0.0, 0.0, 1.0])
    }

    pub fn constant(c: f64) -> Self {
        Self::poly(&[c])
    }

    pub fn affine(a: f64, b: f64) -> Self {
        Self::poly(&[b, a])
    }

    pub fn indicator(set: RealSet) -> Self {
        RealFunction::Indicator { set }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_at_spectral(x, 1e-9)
    }

    /// Evaluation against a spectral value: isolated points of an indicator
    /// set match within `point_tol` (an observable's clustering tolerance).
    pub fn eval_at_spectral(&self, x: f64, point_tol: f64) -> f64 {
        match self {
            RealFunction::Poly { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            RealFunction::Indicator { set } => {
                if set.contains(x, point_tol) {
                    1.0
                } else {
                    0.0
                }
            }
            RealFunction::Named { name } => match name {
                NamedFunction::Arctan => x.atan(),
                NamedFunction::Abs => x.abs(),
                NamedFunction::Id => x,
            },
        }
    }

    /// Spectrum membership of the preimage: `λ ∈ f⁻¹(s)` ⟺ `f(λ) ∈ s`.
    /// Pointwise evaluation is exact on finite spectra.
    pub fn preimage_contains(&self, s: &RealSet, lambda: f64, point_tol: f64) -> bool {
        s.contains(self.eval(lambda), point_tol)
    }

    /// The standard probe family for condition checks over a finite spectrum:
    /// indicators of each spectral point, id, t², arctan.
    pub fn probe_family(spectrum: &[f64]) -> Vec<RealFunction> {
        let mut fam: Vec<RealFunction> = spectrum
            .iter()
            .map(|&l| RealFunction::indicator(RealSet::point(l)))
            .collect();
        fam.push(RealFunction::identity());
        fam.push(RealFunction::square());
        fam.push(RealFunction::arctan());
        fam
    }
}

// ---------------------------------------------------------------------------
// POVMs

/// One labeled effect.
#[derive(Debug, Clone)]
pub struct PovmOutcome {
    pub label: f64,
    pub effect: ComplexMatrix,
}

/// Finite POVM: positive effects summing to the identity, distinct labels.
#[derive(Debug, Clone)]
pub struct Povm {
    outcomes: Vec<PovmOutcome>,
}

/// Result of conjugating a POVM by an operator that may not be an isometry.
#[derive(Debug, Clone)]
pub struct ConjugatedFamily {
    pub outcomes: Vec<PovmOutcome>,
    /// True when the conjugating operator was an isometry, so the family is
    /// again a POVM.
    pub normalized: bool,
}

impl Povm {
    pub fn new(outcomes: Vec<PovmOutcome>, tol: &ToleranceProfile) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidPovm("no outcomes".into()));
        }
        let d = outcomes[0].effect.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (i, o) in outcomes.iter().enumerate() {
            if o.effect.dim() != d {
                return Err(Error::DimensionMismatch { left: o.effect.dim(), right: d });
            }
            if !o.effect.is_hermitian(tol.tol_input) {
                return Err(Error::InvalidPovm(format!("effect {i} is not Hermitian")));
            }
            let eig = eig_hermitian(&o.effect, tol)?;
            let lo = eig.eigenvalues[0];
            let hi = eig.eigenvalues[d - 1];
            if lo < -tol.tol_input || hi > 1.0 + tol.tol_input {
                return Err(Error::InvalidPovm(format!(
                    "effect {i} has eigenvalues outside [0,1]: [{lo:.3e}, {hi:.3e}]"
                )));
            }
            for other in outcomes.iter().take(i) {
                if values_match(o.label, other.label, 1e-12) {
                    return Err(Error::InvalidPovm(format!("duplicate label {}", o.label)));
                }
            }
            sum = sum.add(&o.effect);
        }
        let dev = sum.sub(&ComplexMatrix::identity(d)).max_abs();
        if dev > tol.tol_input * 10.0 {
            return Err(Error::InvalidPovm(format!("effects sum to I only within {dev:.3e}")));
        }
        Ok(Povm { outcomes })
    }

    /// The projective POVM of an observable.
    pub fn from_observable(x: &HermitianObservable) -> Self {
        let outcomes = x
            .points()
            .iter()
            .map(|p| PovmOutcome { label: p.value, effect: p.projector.clone() })
            .collect();
        Povm { outcomes }
    }

    /// Random POVM with labels 0..n, via normalized random positive operators.
    pub fn random<R: rand::Rng + ?Sized>(
        rng: &mut R,
        dim: usize,
        n_outcomes: usize,
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        let effects = crate::linalg::random_effects(rng, dim, n_outcomes, tol)?;
        let outcomes = effects
            .into_iter()
            .enumerate()
            .map(|(i, effect)| PovmOutcome { label: i as f64, effect })
            .collect();
        Ok(Povm { outcomes })
    }

    pub fn outcomes(&self) -> &[PovmOutcome] {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].effect.dim()
    }

    pub fn labels(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.label).collect()
    }

    /// `Π({label})`, zero when no outcome matches.
    pub fn effect_for(&self, label: f64, match_tol: f64) -> ComplexMatrix {
        for o in &self.outcomes {
            if values_match(o.label, label, match_tol) {
                return o.effect.clone();
            }
        }
        ComplexMatrix::zeros(self.dim(), self.dim())
    }

    /// `Π(s)` = Σ{effects with label in s}.
    pub fn set_effect(&self, s: &RealSet) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for o in &self.outcomes {
            if s.contains(o.label, 1e-12) {
                out = out.add(&o.effect);
            }
        }
        out
    }

    /// `Π^f`: outcomes with equal `f(label)` merge by summing effects.
    pub fn transform(&self, f: &RealFunction) -> Povm {
        let mut merged: Vec<PovmOutcome> = Vec::new();
        for o in &self.outcomes {
            let new_label = f.eval(o.label);
            if let Some(existing) = merged
                .iter_mut()
                .find(|m| values_match(m.label, new_label, 1e-12))
            {
                existing.effect = existing.effect.add(&o.effect);
            } else {
                merged.push(PovmOutcome { label: new_label, effect: o.effect.clone() });
            }
        }
        merged.sort_by(|a, b| a.label.partial_cmp(&b.label).unwrap());
        Povm { outcomes: merged }
    }

    /// `Π^A`: effects `A†ΠᵢA`. A POVM again iff `a` is an isometry, which is
    /// checked and reported on the result.
    pub fn conjugate(&self, a: &ComplexMatrix, tol: &ToleranceProfile) -> ConjugatedFamily {
        let adj = a.adjoint();
        let outcomes: Vec<PovmOutcome> = self
            .outcomes
            .iter()
            .map(|o| PovmOutcome { label: o.label, effect: adj.mul(&o.effect).mul(a) })
            .collect();
        let gram = adj.mul(a);
        let normalized =
            gram.sub(&ComplexMatrix::identity(gram.dim())).max_abs() <= tol.tol_ortho * 10.0;
        ConjugatedFamily { outcomes, normalized }
    }

    /// Moment operator `Π(f)` = Σ f(labelᵢ)·effectᵢ.
    pub fn moment(&self, f: &RealFunction) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for o in &self.outcomes {
            out = out.add(&o.effect.scale_re(f.eval(o.label)));
        }
        out
    }
}
