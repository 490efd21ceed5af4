//! Perfect-correlation decision procedures.
//!
//! Two observables are perfectly correlated in a state when every joint
//! outcome over disjoint value sets carries zero probability. On finite
//! spectra that quantification collapses to spectral-point pairs, so the
//! decision is an exhaustive scan of `Tr[E^X({λ})E^Y({μ})ρ]` with λ ≠ μ.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::linalg::{
    eig_hermitian, orthonormalize, outer, vec_norm, vec_sub, ComplexMatrix, Subspace,
    ToleranceProfile, C64,
};
use crate::spectral::{values_match, HermitianObservable, RealFunction};
use crate::{Error, Result};

/// Pure vector state or density operator.
#[derive(Debug, Clone)]
pub enum QuantumState {
    Vector(Vec<C64>),
    Density(ComplexMatrix),
}

impl QuantumState {
    pub fn vector(v: Vec<C64>) -> Self {
        QuantumState::Vector(v)
    }

    pub fn density(m: ComplexMatrix) -> Self {
        QuantumState::Density(m)
    }

    pub fn from_unnormalized(v: &[C64]) -> Self {
        QuantumState::Vector(crate::linalg::vec_normalize(v))
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Vector(v) => v.len(),
            QuantumState::Density(m) => m.dim(),
        }
    }

    /// The density operator (|ψ⟩⟨ψ| for vector states).
    pub fn density_matrix(&self) -> ComplexMatrix {
        match self {
            QuantumState::Vector(v) => outer(v, v),
            QuantumState::Density(m) => m.clone(),
        }
    }

    pub fn validate(&self, tol: &ToleranceProfile) -> Result<()> {
        match self {
            QuantumState::Vector(v) => {
                let n = vec_norm(v);
                if (n - 1.0).abs() > tol.tol_prob * 10.0 {
                    return Err(Error::InvalidState(format!("vector norm {n} is not 1")));
                }
            }
            QuantumState::Density(m) => {
                if !m.is_hermitian(tol.tol_input) {
                    return Err(Error::InvalidState("density operator not Hermitian".into()));
                }
                let tr = m.trace().re;
                if (tr - 1.0).abs() > tol.tol_prob * 10.0 {
                    return Err(Error::InvalidState(format!("trace {tr} is not 1")));
                }
                let eig = eig_hermitian(m, tol)?;
                if eig.eigenvalues[0] < -tol.tol_input {
                    return Err(Error::InvalidState(format!(
                        "negative eigenvalue {:.3e}",
                        eig.eigenvalues[0]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Orthonormal basis of ran(ρ): eigenvectors with non-negligible weight.
    pub fn range_basis(&self, tol: &ToleranceProfile) -> Vec<Vec<C64>> {
        match self {
            QuantumState::Vector(v) => vec![crate::linalg::vec_normalize(v)],
            QuantumState::Density(m) => {
                let eig = eig_hermitian(m, tol).expect("valid density operator");
                let top = eig.eigenvalues.last().copied().unwrap_or(0.0);
                let mut basis = Vec::new();
                for (i, &l) in eig.eigenvalues.iter().enumerate() {
                    if l > tol.tol_zero * top.max(1.0) {
                        basis.push(eig.eigenvectors.column(i));
                    }
                }
                basis
            }
        }
    }
}

/// Maximal violating spectral pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Witness {
    pub lambda: f64,
    pub mu: f64,
    pub magnitude: f64,
}

/// Outcome of a perfect-correlation decision.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationVerdict {
    pub correlated: bool,
    pub witness: Option<Witness>,
    pub conditions: BTreeMap<String, bool>,
}

impl CorrelationVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "correlated": self.correlated,
            "witness": self.witness.as_ref().map(|w| serde_json::json!({
                "lambda": w.lambda, "mu": w.mu, "magnitude": w.magnitude,
            })),
            "conditions": self.conditions,
        })
    }
}

/// Per-condition pass/fail map keyed by theorem condition labels.
pub type ConditionReport = BTreeMap<String, bool>;

fn match_tol(x: &HermitianObservable, y: &HermitianObservable) -> f64 {
    x.cluster_tol().max(y.cluster_tol())
}

/// Merged list of spectral values appearing in either observable.
pub fn merged_spectrum(x: &HermitianObservable, y: &HermitianObservable) -> Vec<f64> {
    let mt = match_tol(x, y);
    let mut values = x.eigenvalues();
    for v in y.eigenvalues() {
        if !values.iter().any(|&u| values_match(u, v, mt)) {
            values.push(v);
        }
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values
}

/// Decides Tr[E^X({λ})E^Y({μ})ρ] = 0 for all spectral pairs λ ≠ μ.
///
/// Finite spectra make the scan exhaustive over disjoint Borel sets by
/// additivity. The verdict carries the maximal violator as a witness.
pub fn is_perfectly_correlated(
    x: &HermitianObservable,
    y: &HermitianObservable,
    state: &QuantumState,
    tol: &ToleranceProfile,
) -> Result<CorrelationVerdict> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: y.dim() });
    }
    if x.dim() != state.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: state.dim() });
    }
    let rho = state.density_matrix();
    let mt = match_tol(x, y);
    let threshold = tol.tol_zero * x.dim() as f64;
    let mut worst: Option<Witness> = None;
    for px in x.points() {
        for py in y.points() {
            if values_match(px.value, py.value, mt) {
                continue;
            }
            let t = px.projector.mul(&py.projector).mul(&rho).trace();
            let magnitude = t.norm();
            if worst.as_ref().is_none_or(|w| magnitude > w.magnitude) {
                worst = Some(Witness { lambda: px.value, mu: py.value, magnitude });
            }
        }
    }
    let correlated = worst.as_ref().is_none_or(|w| w.magnitude <= threshold);
    let mut conditions = BTreeMap::new();
    conditions.insert("definition".to_string(), correlated);
    Ok(CorrelationVerdict {
        correlated,
        witness: if correlated { None } else { worst },
        conditions,
    })
}

/// Cyclic subspace C(X, state): the span reachable from the state under the
/// functional calculus of X. For finite spectra that span is generated by
/// the spectral projections applied to the range of the state.
pub fn cyclic_subspace(
    x: &HermitianObservable,
    state: &QuantumState,
    tol: &ToleranceProfile,
) -> Subspace {
    let d = x.dim();
    let mut generators: Vec<Vec<C64>> = Vec::new();
    for psi in state.range_basis(tol) {
        for p in x.points() {
            let v = p.projector.mul_vec(&psi);
            if vec_norm(&v) > tol.tol_zero {
                generators.push(v);
            }
        }
    }
    let basis = orthonormalize(&generators, tol.tol_zero);
    Subspace::new(d, basis, tol).expect("orthonormalized basis is valid")
}

/// Independently evaluates the vector-state equivalence conditions:
/// (i) the defining cross terms, (iii) per-point projector transport,
/// (iv) f(X)ψ = f(Y)ψ over a probe family, (v) f(X)P = f(Y)P on the cyclic
/// projection, (vi) equality of cyclic projections and compressed operators.
pub fn check_equivalences_vector(
    x: &HermitianObservable,
    y: &HermitianObservable,
    psi: &[C64],
    tol: &ToleranceProfile,
) -> Result<ConditionReport> {
    let state = QuantumState::Vector(psi.to_vec());
    let mut report = ConditionReport::new();

    let verdict = is_perfectly_correlated(x, y, &state, tol)?;
    report.insert("i".to_string(), verdict.correlated);

    let values = merged_spectrum(x, y);
    let mt = match_tol(x, y);
    let scale = x.matrix().max_abs().max(y.matrix().max_abs()).max(1.0);
    let vec_tol = tol.tol_zero * x.dim() as f64;

    let mut iii = true;
    for &v in &values {
        let ex = x.point_projector(v, mt).mul_vec(psi);
        let ey = y.point_projector(v, mt).mul_vec(psi);
        if vec_norm(&vec_sub(&ex, &ey)) > vec_tol {
            iii = false;
            break;
        }
    }
    report.insert("iii".to_string(), iii);

    let mut iv = true;
    for f in RealFunction::probe_family(&values) {
        let fx = x.function_matrix(&f).mul_vec(psi);
        let fy = y.function_matrix(&f).mul_vec(psi);
        let fscale = values.iter().map(|&v| f.eval(v).abs()).fold(1.0, f64::max);
        if vec_norm(&vec_sub(&fx, &fy)) > vec_tol * fscale {
            iv = false;
            break;
        }
    }
    report.insert("iv".to_string(), iv);

    let px = cyclic_subspace(x, &state, tol).projector();
    let py = cyclic_subspace(y, &state, tol).projector();
    let mut v_cond = true;
    for f in RealFunction::probe_family(&values) {
        let lhs = x.function_matrix(&f).mul(&px);
        let rhs = y.function_matrix(&f).mul(&px);
        let fscale = values.iter().map(|&v| f.eval(v).abs()).fold(1.0, f64::max);
        if lhs.sub(&rhs).max_abs() > vec_tol * fscale {
            v_cond = false;
            break;
        }
    }
    report.insert("v".to_string(), v_cond);

    let projections_equal = px.sub(&py).max_abs() <= vec_tol;
    let compressed_equal =
        x.matrix().mul(&px).sub(&y.matrix().mul(&py)).max_abs() <= vec_tol * scale;
    report.insert("vi".to_string(), projections_equal && compressed_equal);

    Ok(report)
}

/// {X=Y}: the largest closed subspace on which the spectral measures agree,
/// computed as the intersection of the kernels of `E^X({λ}) − E^Y({λ})`.
pub fn perfectly_correlative_domain(
    x: &HermitianObservable,
    y: &HermitianObservable,
    tol: &ToleranceProfile,
) -> Result<Subspace> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: y.dim() });
    }
    let mt = match_tol(x, y);
    let ops: Vec<ComplexMatrix> = merged_spectrum(x, y)
        .iter()
        .map(|&v| x.point_projector(v, mt).sub(&y.point_projector(v, mt)))
        .collect();
    Ok(crate::linalg::largest_common_kernel(&ops, tol))
}

/// True iff Tr[E^X({λ})ρ] = Tr[E^Y({λ})ρ] at every spectral point of either
/// observable.
pub fn identically_distributed(
    x: &HermitianObservable,
    y: &HermitianObservable,
    state: &QuantumState,
    tol: &ToleranceProfile,
) -> Result<bool> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: y.dim() });
    }
    let rho = state.density_matrix();
    let mt = match_tol(x, y);
    for &v in &merged_spectrum(x, y) {
        let px = x.point_projector(v, mt).mul(&rho).trace().re;
        let py = y.point_projector(v, mt).mul(&rho).trace().re;
        if (px - py).abs() > tol.tol_prob * x.dim() as f64 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One component of a superposition of common eigenstates.
#[derive(Debug, Clone)]
pub struct CommonEigenComponent {
    pub eigenvalue: f64,
    /// Unnormalized slice E^X({λ})ψ of the state.
    pub component: Vec<C64>,
}

/// When X and Y are perfectly correlated in ψ, decomposes ψ into common
/// eigenvector components with common eigenvalues; absent otherwise.
pub fn superposition_certificate(
    x: &HermitianObservable,
    y: &HermitianObservable,
    psi: &[C64],
    tol: &ToleranceProfile,
) -> Result<Option<Vec<CommonEigenComponent>>> {
    let state = QuantumState::Vector(psi.to_vec());
    if !is_perfectly_correlated(x, y, &state, tol)?.correlated {
        return Ok(None);
    }
    let mt = match_tol(x, y);
    let scale = x.matrix().max_abs().max(y.matrix().max_abs()).max(1.0);
    let mut parts = Vec::new();
    for p in x.points() {
        let c = p.projector.mul_vec(psi);
        let n = vec_norm(&c);
        if n <= tol.tol_zero {
            continue;
        }
        // must be a common eigenvector with the common eigenvalue
        let rx = vec_sub(&x.matrix().mul_vec(&c), &crate::linalg::vec_scale(&c, C64::new(p.value, 0.0)));
        let ry = vec_sub(&y.matrix().mul_vec(&c), &crate::linalg::vec_scale(&c, C64::new(p.value, 0.0)));
        let bound = tol.tol_zero * scale * x.dim() as f64 * 100.0;
        if vec_norm(&rx) > bound * n || vec_norm(&ry) > bound * n {
            return Ok(None);
        }
        let _ = mt;
        parts.push(CommonEigenComponent { eigenvalue: p.value, component: c });
    }
    Ok(Some(parts))
}
