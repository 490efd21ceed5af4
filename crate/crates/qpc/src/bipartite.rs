//! Bipartite structure: Schmidt decompositions, entanglement entropy, the
//! characterization of perfectly correlated local observables, and the
//! Hardy nonlocality analysis for two qubits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correlation::{is_perfectly_correlated, QuantumState};
use crate::linalg::{
    outer, svd, vec_inner, vec_kron, vec_norm, vec_scale, ComplexMatrix, ToleranceProfile, C64,
};
use crate::spectral::{values_match, HermitianObservable};
use crate::{Error, Result};

/// Biorthogonal expansion ψ = Σ √p_j · φ_j ⊗ ξ_j with descending weights.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub weights: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> Vec<C64> {
        let d = self.left[0].len() * self.right[0].len();
        let mut psi = vec![C64::new(0.0, 0.0); d];
        for ((w, l), r) in self.weights.iter().zip(&self.left).zip(&self.right) {
            let term = vec_scale(&vec_kron(l, r), C64::new(w.sqrt(), 0.0));
            psi = crate::linalg::vec_add(&psi, &term);
        }
        psi
    }
}

/// Schmidt decomposition via SVD of the d1×d2 coefficient matrix; weights are
/// squared singular values, zero weights dropped.
pub fn schmidt(
    psi: &[C64],
    dims: (usize, usize),
    tol: &ToleranceProfile,
) -> Result<SchmidtDecomposition> {
    let (d1, d2) = dims;
    if psi.len() != d1 * d2 {
        return Err(Error::DimensionMismatch { left: psi.len(), right: d1 * d2 });
    }
    let coeff = ComplexMatrix::from_fn(d1, d2, |i, j| psi[i * d2 + j]);
    let s = svd(&coeff)?;
    let mut weights = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (k, &sigma) in s.singular_values.iter().enumerate() {
        if sigma * sigma <= tol.tol_zero * tol.tol_zero {
            continue;
        }
        weights.push(sigma * sigma);
        left.push(s.left.column(k));
        // ψ = Σ σ_k u_k ⊗ conj(v_k)
        right.push(s.right.column(k).iter().map(|z| z.conj()).collect());
    }
    Ok(SchmidtDecomposition { weights, left, right })
}

/// Entanglement entropy −Σ p_j ln p_j of the Schmidt weights (nats). Equals
/// the von Neumann entropy of either reduced state.
pub fn entanglement(psi: &[C64], dims: (usize, usize), tol: &ToleranceProfile) -> Result<f64> {
    let s = schmidt(psi, dims, tol)?;
    Ok(entropy_nats(&s.weights))
}

pub fn entropy_nats(weights: &[f64]) -> f64 {
    weights.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// Von Neumann entropy of a density operator (nats).
pub fn von_neumann_entropy(rho: &ComplexMatrix, tol: &ToleranceProfile) -> Result<f64> {
    let eig = crate::linalg::eig_hermitian(rho, tol)?;
    Ok(entropy_nats(
        &eig.eigenvalues.iter().copied().filter(|&l| l > 0.0).collect::<Vec<_>>(),
    ))
}

/// A Schmidt decomposition certified against a pair of local observables:
/// each left vector is an eigenvector of the first, each right vector of the
/// second, with the common eigenvalue attached.
#[derive(Debug, Clone)]
pub struct CertifiedSchmidt {
    pub eigenvalues: Vec<f64>,
    pub weights: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
}

/// If X⊗I and I⊗Y are perfectly correlated in ψ, constructs a Schmidt
/// decomposition whose vectors are eigenvectors of the local observables
/// with common eigenvalues: slice ψ by common-eigenvalue projector pairs,
/// Schmidt-decompose each slice, concatenate. Absent when not correlated.
pub fn bipartite_pc_characterize(
    x_local: &HermitianObservable,
    y_local: &HermitianObservable,
    psi: &[C64],
    dims: (usize, usize),
    tol: &ToleranceProfile,
) -> Result<Option<CertifiedSchmidt>> {
    let (d1, d2) = dims;
    if x_local.dim() != d1 || y_local.dim() != d2 || psi.len() != d1 * d2 {
        return Err(Error::DimensionMismatch { left: psi.len(), right: d1 * d2 });
    }
    let i1 = ComplexMatrix::identity(d1);
    let i2 = ComplexMatrix::identity(d2);
    let big_x = HermitianObservable::new(x_local.matrix().kron(&i2), tol)?;
    let big_y = HermitianObservable::new(i1.kron(y_local.matrix()), tol)?;
    let state = QuantumState::Vector(psi.to_vec());
    if !is_perfectly_correlated(&big_x, &big_y, &state, tol)?.correlated {
        return Ok(None);
    }

    let mt = x_local.cluster_tol().max(y_local.cluster_tol());
    let mut out = CertifiedSchmidt {
        eigenvalues: Vec::new(),
        weights: Vec::new(),
        left: Vec::new(),
        right: Vec::new(),
    };
    for px in x_local.points() {
        let qy = y_local.point_projector(px.value, mt);
        let slicer = px.projector.kron(&qy);
        let slice = slicer.mul_vec(psi);
        let q = vec_norm(&slice);
        if q <= tol.tol_zero {
            continue;
        }
        let unit = vec_scale(&slice, C64::new(1.0 / q, 0.0));
        let sd = schmidt(&unit, dims, tol)?;
        for ((w, l), r) in sd.weights.iter().zip(&sd.left).zip(&sd.right) {
            out.eigenvalues.push(px.value);
            out.weights.push(w * q * q);
            out.left.push(l.clone());
            out.right.push(r.clone());
        }
    }
    // descending weights, pairing preserved
    let mut order: Vec<usize> = (0..out.weights.len()).collect();
    order.sort_by(|&i, &j| out.weights[j].partial_cmp(&out.weights[i]).unwrap());
    Ok(Some(CertifiedSchmidt {
        eigenvalues: order.iter().map(|&i| out.eigenvalues[i]).collect(),
        weights: order.iter().map(|&i| out.weights[i]).collect(),
        left: order.iter().map(|&i| out.left[i].clone()).collect(),
        right: order.iter().map(|&i| out.right[i].clone()).collect(),
    }))
}

// ---------------------------------------------------------------------------
// Hardy analysis

/// Verdict of a Hardy-condition evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyVerdict {
    NonlocalityWitnessed,
    BlockedByTransitivity,
    ProductState,
    ConditionsNotMet,
}

/// Evaluation of the four Hardy probabilities on a two-qubit state.
#[derive(Debug, Clone, Serialize)]
pub struct HardyReport {
    /// Larger Schmidt weight.
    pub p1: f64,
    /// P(U₁=0,U₂=1), P(U₁=1,D₂=0), P(D₁=1,U₂=0), P(D₁=1,D₂=0).
    pub condition_values: [f64; 4],
    pub verdict: HardyVerdict,
    /// Established perfect-correlation relations, in derivation order.
    pub correlation_chain: Vec<(String, String)>,
}

const MAXIMALITY_TOL: f64 = 1e-9;

fn binary_projectors(
    obs: &HermitianObservable,
    tol: &ToleranceProfile,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let vals = obs.eigenvalues();
    if vals.len() != 2 {
        return Err(Error::SpectrumNotBinary);
    }
    let ct = obs.cluster_tol().max(tol.tol_input);
    let (mut zero, mut one) = (None, None);
    for p in obs.points() {
        if values_match(p.value, 0.0, ct) {
            zero = Some(p.projector.clone());
        } else if values_match(p.value, 1.0, ct) {
            one = Some(p.projector.clone());
        }
    }
    match (zero, one) {
        (Some(z), Some(o)) => Ok((z, o)),
        _ => Err(Error::SpectrumNotBinary),
    }
}

fn joint_prob(psi: &[C64], e1: &ComplexMatrix, e2: &ComplexMatrix) -> f64 {
    let op = e1.kron(e2);
    vec_inner(psi, &op.mul_vec(psi)).re
}

/// Evaluates the four Hardy probabilities for binary observables U, D applied
/// on both legs. On a maximally entangled state that satisfies the first
/// three conditions, reports the transitive chain that forces the fourth
/// probability to vanish.
pub fn hardy_check(
    psi: &[C64],
    u_obs: &HermitianObservable,
    d_obs: &HermitianObservable,
    tol: &ToleranceProfile,
) -> Result<HardyReport> {
    if psi.len() != 4 {
        return Err(Error::DimensionMismatch { left: psi.len(), right: 4 });
    }
    let (u0, u1) = binary_projectors(u_obs, tol)?;
    let (d0, d1) = binary_projectors(d_obs, tol)?;

    let sd = schmidt(psi, (2, 2), tol)?;
    let p1 = sd.weights.first().copied().unwrap_or(1.0);

    let values = [
        joint_prob(psi, &u0, &u1), // P(U1=0, U2=1)
        joint_prob(psi, &u1, &d0), // P(U1=1, D2=0)
        joint_prob(psi, &d1, &u0), // P(D1=1, U2=0)
        joint_prob(psi, &d1, &d0), // P(D1=1, D2=0)
    ];
    let first_three_vanish = values[..3].iter().all(|&p| p <= tol.tol_prob);

    if p1 >= 1.0 - MAXIMALITY_TOL {
        return Ok(HardyReport {
            p1,
            condition_values: values,
            verdict: HardyVerdict::ProductState,
            correlation_chain: Vec::new(),
        });
    }
    if (p1 - 0.5).abs() <= MAXIMALITY_TOL {
        if first_three_vanish {
            let chain = vec![
                ("U1".to_string(), "U2".to_string()),
                ("U1".to_string(), "D2".to_string()),
                ("D1".to_string(), "U2".to_string()),
                ("D1".to_string(), "D2".to_string()),
            ];
            return Ok(HardyReport {
                p1,
                condition_values: values,
                verdict: HardyVerdict::BlockedByTransitivity,
                correlation_chain: chain,
            });
        }
        return Ok(HardyReport {
            p1,
            condition_values: values,
            verdict: HardyVerdict::ConditionsNotMet,
            correlation_chain: Vec::new(),
        });
    }
    if first_three_vanish && values[3] > tol.tol_prob {
        return Ok(HardyReport {
            p1,
            condition_values: values,
            verdict: HardyVerdict::NonlocalityWitnessed,
            correlation_chain: Vec::new(),
        });
    }
    Ok(HardyReport {
        p1,
        condition_values: values,
        verdict: HardyVerdict::ConditionsNotMet,
        correlation_chain: Vec::new(),
    })
}

/// Rank-1 projector at Bloch angles (θ, φ).
pub fn bloch_projector(theta: f64, phi: f64) -> ComplexMatrix {
    let v = vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::new(0.0, phi).exp() * (theta / 2.0).sin(),
    ];
    outer(&v, &v)
}

struct HardyObjective<'a> {
    psi: &'a [C64],
}

impl HardyObjective<'_> {
    /// (sum of the first three probabilities, fourth probability)
    fn probs(&self, angles: &[f64; 4]) -> (f64, f64) {
        let u1 = bloch_projector(angles[0], angles[1]);
        let d1 = bloch_projector(angles[2], angles[3]);
        let i2 = ComplexMatrix::identity(2);
        let u0 = i2.sub(&u1);
        let d0 = i2.sub(&d1);
        let g = joint_prob(self.psi, &u0, &u1)
            + joint_prob(self.psi, &u1, &d0)
            + joint_prob(self.psi, &d1, &u0);
        let p4 = joint_prob(self.psi, &d1, &d0);
        (g, p4)
    }

    fn score(&self, angles: &[f64; 4]) -> f64 {
        let (g, p4) = self.probs(angles);
        g + 30.0 * (1e-3 - p4).max(0.0).powi(2)
    }
}

/// Nelder-Mead on 4 angles; plenty for a smooth trigonometric objective.
fn nelder_mead(obj: &HardyObjective, start: [f64; 4], step: f64, iters: usize) -> [f64; 4] {
    let n = 4;
    let mut simplex: Vec<[f64; 4]> = vec![start];
    for i in 0..n {
        let mut v = start;
        v[i] += step;
        simplex.push(v);
    }
    let mut scores: Vec<f64> = simplex.iter().map(|v| obj.score(v)).collect();
    for _ in 0..iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        if scores[worst] - scores[best] < 1e-18 {
            break;
        }
        let mut centroid = [0.0; 4];
        for &i in &order[..n] {
            for (k, c) in centroid.iter_mut().enumerate() {
                *c += simplex[i][k] / n as f64;
            }
        }
        let at = |t: f64| {
            let mut v = [0.0; 4];
            for k in 0..n {
                v[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
            }
            v
        };
        let reflected = at(-1.0);
        let fr = obj.score(&reflected);
        if fr < scores[best] {
            let expanded = at(-2.0);
            let fe = obj.score(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                scores[worst] = fe;
            } else {
                simplex[worst] = reflected;
                scores[worst] = fr;
            }
        } else if fr < scores[second_worst] {
            simplex[worst] = reflected;
            scores[worst] = fr;
        } else {
            let contracted = at(0.5);
            let fc = obj.score(&contracted);
            if fc < scores[worst] {
                simplex[worst] = contracted;
                scores[worst] = fc;
            } else {
                for &i in &order[1..] {
                    let anchor = simplex[best];
                    for (k, x) in simplex[i].iter_mut().enumerate() {
                        *x = anchor[k] + 0.5 * (*x - anchor[k]);
                    }
                    scores[i] = obj.score(&simplex[i]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..simplex.len() {
        if scores[i] < scores[best] {
            best = i;
        }
    }
    simplex[best]
}

/// Searches for binary observables (U, D) putting the state in the Hardy
/// regime: coarse scan over Bloch angles, per-observable grid refinement at
/// the given resolution, then a local polish. Accepts when the first three
/// probabilities sum below 1e-9 and the fourth stays above 1e-4. Absent when
/// the state is product or maximally entangled, or when the search fails.
pub fn hardy_search(
    psi: &[C64],
    resolution: usize,
    seed: u64,
    tol: &ToleranceProfile,
) -> Result<Option<(HermitianObservable, HermitianObservable)>> {
    if psi.len() != 4 {
        return Err(Error::DimensionMismatch { left: psi.len(), right: 4 });
    }
    let sd = schmidt(psi, (2, 2), tol)?;
    let p1 = sd.weights.first().copied().unwrap_or(1.0);
    if (p1 - 0.5).abs() <= MAXIMALITY_TOL || p1 >= 1.0 - MAXIMALITY_TOL {
        return Ok(None);
    }

    let obj = HardyObjective { psi };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter: f64 = rng.random::<f64>() * 1e-3;

    // coarse joint scan
    let coarse = 14;
    let mut seeds: Vec<([f64; 4], f64)> = Vec::new();
    for a in 0..coarse {
        for b in 0..coarse {
            for c in 0..coarse {
                for d in 0..coarse {
                    let angles = [
                        std::f64::consts::PI * (a as f64 + 0.5) / coarse as f64 + jitter,
                        2.0 * std::f64::consts::PI * b as f64 / coarse as f64 + jitter,
                        std::f64::consts::PI * (c as f64 + 0.5) / coarse as f64 + jitter,
                        2.0 * std::f64::consts::PI * d as f64 / coarse as f64 + jitter,
                    ];
                    let s = obj.score(&angles);
                    seeds.push((angles, s));
                }
            }
        }
    }
    seeds.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
    seeds.truncate(12);

    let n_grid = resolution.max(8);
    for (start, _) in seeds {
        let mut current = start;
        // alternating per-observable grid refinement
        let mut window = std::f64::consts::PI / coarse as f64 * 2.0;
        for _round in 0..3 {
            for obs_idx in 0..2 {
                let (ti, pi) = (2 * obs_idx, 2 * obs_idx + 1);
                let mut best = current;
                let mut best_score = obj.score(&current);
                for gt in 0..n_grid {
                    for gp in 0..n_grid {
                        let mut cand = current;
                        cand[ti] = current[ti] + window * (gt as f64 / (n_grid - 1) as f64 - 0.5);
                        cand[pi] = current[pi] + window * (gp as f64 / (n_grid - 1) as f64 - 0.5);
                        let s = obj.score(&cand);
                        if s < best_score {
                            best_score = s;
                            best = cand;
                        }
                    }
                }
                current = best;
            }
            window *= 0.25;
        }
        let polished = nelder_mead(&obj, current, window.max(1e-3), 4000);
        let (g, p4) = obj.probs(&polished);
        if g <= 1e-9 && p4 >= 1e-4 {
            let u = bloch_projector(polished[0], polished[1]);
            let d = bloch_projector(polished[2], polished[3]);
            let u_obs = HermitianObservable::new(u, tol)?;
            let d_obs = HermitianObservable::new(d, tol)?;
            return Ok(Some((u_obs, d_obs)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, haar_unitary, random_state_vector, vec_sub};

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn bell() -> Vec<C64> {
        let r = C64::new(1.0 / 2f64.sqrt(), 0.0);
        vec![r, C64::new(0.0, 0.0), C64::new(0.0, 0.0), r]
    }

    /// √0.7 |01⟩ + √0.3 |10⟩: the crossed Schmidt pairing admits Hardy
    /// observables shared across both legs.
    fn tilted() -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); 4];
        v[1] = C64::new(0.7f64.sqrt(), 0.0);
        v[2] = C64::new(0.3f64.sqrt(), 0.0);
        v
    }

    #[test]
    fn schmidt_of_product_state_is_rank_one() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_state_vector(&mut rng, 3);
        let b = random_state_vector(&mut rng, 2);
        let psi = vec_kron(&a, &b);
        let s = schmidt(&psi, (3, 2), &t).unwrap();
        assert_eq!(s.weights.len(), 1);
        assert!((s.weights[0] - 1.0).abs() < 1e-12);
        assert!(entanglement(&psi, (3, 2), &t).unwrap().abs() < 1e-12);
    }

    #[test]
    fn schmidt_of_bell_state() {
        let t = tol();
        let s = schmidt(&bell(), (2, 2), &t).unwrap();
        assert_eq!(s.weights.len(), 2);
        assert!((s.weights[0] - 0.5).abs() < 1e-12);
        assert!((s.weights[1] - 0.5).abs() < 1e-12);
        assert!((entanglement(&bell(), (2, 2), &t).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn schmidt_weights_sort_descending() {
        let t = tol();
        let mut psi = vec![C64::new(0.0, 0.0); 4];
        psi[0] = C64::new((1.0f64 / 3.0).sqrt(), 0.0);
        psi[3] = C64::new((2.0f64 / 3.0).sqrt(), 0.0);
        let s = schmidt(&psi, (2, 2), &t).unwrap();
        assert!((s.weights[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.weights[1] - 1.0 / 3.0).abs() < 1e-12);
        let e = entanglement(&psi, (2, 2), &t).unwrap();
        let expect = -(2.0 / 3.0f64) * (2.0 / 3.0f64).ln() - (1.0 / 3.0f64) * (1.0 / 3.0f64).ln();
        assert!((e - expect).abs() < 1e-12);
    }

    #[test]
    fn schmidt_reconstructs_random_states() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (d1, d2) in [(2, 2), (2, 3), (3, 4), (4, 4)] {
            let psi = random_state_vector(&mut rng, d1 * d2);
            let s = schmidt(&psi, (d1, d2), &t).unwrap();
            let rec = s.reconstruct();
            assert!(vec_norm(&vec_sub(&rec, &psi)) < 1e-9);
            // orthonormal families
            for i in 0..s.left.len() {
                for j in 0..s.left.len() {
                    let g = vec_inner(&s.left[i], &s.left[j]);
                    let h = vec_inner(&s.right[i], &s.right[j]);
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((g.norm() - target).abs() < 1e-10);
                    assert!((h.norm() - target).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn entanglement_equals_reduced_entropy() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let psi = random_state_vector(&mut rng, 12);
            let e = entanglement(&psi, (3, 4), &t).unwrap();
            let rho = outer(&psi, &psi);
            let r1 = rho.partial_trace(3, 4, false).unwrap();
            let r2 = rho.partial_trace(3, 4, true).unwrap();
            assert!((e - von_neumann_entropy(&r1, &t).unwrap()).abs() < 1e-9);
            assert!((e - von_neumann_entropy(&r2, &t).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn characterization_of_bell_with_matched_observables() {
        let t = tol();
        let sz = HermitianObservable::from_real(&[&[1.0, 0.0], &[0.0, -1.0]], &t).unwrap();
        let cert = bipartite_pc_characterize(&sz, &sz, &bell(), (2, 2), &t).unwrap().unwrap();
        assert_eq!(cert.weights.len(), 2);
        for (i, &l) in cert.eigenvalues.iter().enumerate() {
            // left and right vectors are eigenvectors with the common eigenvalue
            let xv = sz.matrix().mul_vec(&cert.left[i]);
            let target = vec_scale(&cert.left[i], C64::new(l, 0.0));
            assert!(vec_norm(&vec_sub(&xv, &target)) < 1e-10);
            let yv = sz.matrix().mul_vec(&cert.right[i]);
            let target = vec_scale(&cert.right[i], C64::new(l, 0.0));
            assert!(vec_norm(&vec_sub(&yv, &target)) < 1e-10);
        }
    }

    #[test]
    fn characterization_absent_for_crossed_observables() {
        let t = tol();
        let sz = HermitianObservable::from_real(&[&[1.0, 0.0], &[0.0, -1.0]], &t).unwrap();
        let sx = HermitianObservable::from_real(&[&[0.0, 1.0], &[1.0, 0.0]], &t).unwrap();
        assert!(bipartite_pc_characterize(&sz, &sx, &bell(), (2, 2), &t).unwrap().is_none());
    }

    #[test]
    fn characterization_of_a_product_of_eigenvectors() {
        let t = tol();
        let sx = HermitianObservable::from_real(&[&[0.0, 1.0], &[1.0, 0.0]], &t).unwrap();
        let psi = vec![C64::new(0.5, 0.0); 4]; // |+⟩⊗|+⟩
        let cert = bipartite_pc_characterize(&sx, &sx, &psi, (2, 2), &t).unwrap().unwrap();
        assert_eq!(cert.weights.len(), 1);
        assert!((cert.weights[0] - 1.0).abs() < 1e-10);
        assert!((cert.eigenvalues[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn schmidt_built_observables_are_perfectly_correlated() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..4 {
            let psi = random_state_vector(&mut rng, 9);
            let s = schmidt(&psi, (3, 3), &t).unwrap();
            let lambdas: Vec<f64> = (0..s.weights.len()).map(|j| (j + 1) as f64).collect();
            let x = HermitianObservable::from_eigenpairs(&lambdas, &s.left, &t).unwrap();
            let y = HermitianObservable::from_eigenpairs(&lambdas, &s.right, &t).unwrap();
            let i3 = ComplexMatrix::identity(3);
            let big_x = HermitianObservable::new(x.matrix().kron(&i3), &t).unwrap();
            let big_y = HermitianObservable::new(i3.kron(y.matrix()), &t).unwrap();
            let v = is_perfectly_correlated(
                &big_x,
                &big_y,
                &QuantumState::Vector(psi.clone()),
                &t,
            )
            .unwrap();
            assert!(v.correlated);
        }
    }

    #[test]
    fn hardy_check_rejects_non_binary_observables() {
        let t = tol();
        let sz = HermitianObservable::from_real(&[&[1.0, 0.0], &[0.0, -1.0]], &t).unwrap();
        assert!(matches!(
            hardy_check(&bell(), &sz, &sz, &t),
            Err(Error::SpectrumNotBinary)
        ));
    }

    #[test]
    fn hardy_product_state_verdict() {
        let t = tol();
        let u = HermitianObservable::new(bloch_projector(0.7, 0.3), &t).unwrap();
        let d = HermitianObservable::new(bloch_projector(1.9, 2.1), &t).unwrap();
        let psi = vec_kron(&basis_vector(2, 0), &basis_vector(2, 1));
        let r = hardy_check(&psi, &u, &d, &t).unwrap();
        assert_eq!(r.verdict, HardyVerdict::ProductState);
    }

    #[test]
    fn analytic_hardy_pair_on_the_tilted_state() {
        // oracle: on √p1|01⟩+√p2|10⟩ real projectors with
        // tan(θu/2) = (p2/p1)^{1/4}, tan(θd/2) = (p1/p2)^{3/4} satisfy the
        // first three conditions exactly; the fourth is (√p1·c² − √p2·s²)².
        let t = tol();
        let (p1, p2) = (0.7f64, 0.3f64);
        let theta_u = 2.0 * ((p2 / p1) as f64).powf(0.25).atan();
        let theta_d = 2.0 * ((p1 / p2) as f64).powf(0.75).atan();
        let u = HermitianObservable::new(bloch_projector(theta_u, 0.0), &t).unwrap();
        let d = HermitianObservable::new(bloch_projector(theta_d, 0.0), &t).unwrap();
        let r = hardy_check(&tilted(), &u, &d, &t).unwrap();
        assert_eq!(r.verdict, HardyVerdict::NonlocalityWitnessed);
        for &v in &r.condition_values[..3] {
            assert!(v.abs() < 1e-12);
        }
        let c2 = (theta_d / 2.0).cos().powi(2);
        let s2 = (theta_d / 2.0).sin().powi(2);
        let expect = (p1.sqrt() * c2 - p2.sqrt() * s2).powi(2);
        assert!((r.condition_values[3] - expect).abs() < 1e-12);
        assert!(r.condition_values[3] > 0.05);
    }

    #[test]
    fn search_finds_the_hardy_regime_on_the_tilted_state() {
        let t = tol();
        let found = hardy_search(&tilted(), 64, 7, &t).unwrap();
        let (u, d) = found.expect("search should succeed on the tilted state");
        let r = hardy_check(&tilted(), &u, &d, &t).unwrap();
        assert_eq!(r.verdict, HardyVerdict::NonlocalityWitnessed);
        let g: f64 = r.condition_values[..3].iter().sum();
        assert!(g <= 1e-9, "residual {g:.3e}");
        assert!(r.condition_values[3] >= 1e-4);
    }

    #[test]
    fn search_declines_maximal_and_product_states() {
        let t = tol();
        assert!(hardy_search(&bell(), 16, 3, &t).unwrap().is_none());
        let prod = vec_kron(&basis_vector(2, 0), &basis_vector(2, 0));
        assert!(hardy_search(&prod, 16, 3, &t).unwrap().is_none());
    }

    #[test]
    fn maximal_states_never_witness_nonlocality() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(1212);
        for _ in 0..20 {
            let v1 = haar_unitary(&mut rng, 2);
            let v2 = haar_unitary(&mut rng, 2);
            let psi = v1.kron(&v2).mul_vec(&bell());
            let u = HermitianObservable::new(
                bloch_projector(
                    rng.random::<f64>() * std::f64::consts::PI,
                    rng.random::<f64>() * 2.0 * std::f64::consts::PI,
                ),
                &t,
            )
            .unwrap();
            let d = HermitianObservable::new(
                bloch_projector(
                    rng.random::<f64>() * std::f64::consts::PI,
                    rng.random::<f64>() * 2.0 * std::f64::consts::PI,
                ),
                &t,
            )
            .unwrap();
            let r = hardy_check(&psi, &u, &d, &t).unwrap();
            assert_ne!(r.verdict, HardyVerdict::NonlocalityWitnessed);
        }
    }
}
