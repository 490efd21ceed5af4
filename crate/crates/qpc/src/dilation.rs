//! Naimark dilations of POVMs, joint dilations of pairs, and perfect
//! correlation between POVMs and between observables and POVMs.
//!
//! A POVM becomes a projective observable on an enlarged space: the isometry
//! Vψ = Σ_a (√Π_a ψ)⊗e_a is completed to a unitary W on H⊗C^m and the
//! dilated observable is W†(I⊗diag(labels))W read against the probe slice.

use std::collections::BTreeMap;

use crate::correlation::{
    cyclic_subspace, ConditionReport, CorrelationVerdict, QuantumState, Witness,
};
use crate::linalg::{
    basis_vector, eig_hermitian, outer, unitary_from_partial_isometry, vec_inner, vec_kron,
    ComplexMatrix, ToleranceProfile, C64,
};
use crate::spectral::{values_match, HermitianObservable, Povm, RealFunction};
use crate::{Error, Result};

/// Positive square root of an effect; tiny negative eigenvalues (numerical
/// slack) are clipped to zero.
pub fn effect_sqrt(effect: &ComplexMatrix, tol: &ToleranceProfile) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(effect, tol)?;
    let d = effect.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l < -tol.tol_input {
            return Err(Error::InvalidPovm(format!("effect has eigenvalue {l:.3e} < 0")));
        }
        let v = eig.eigenvectors.column(i);
        out = out.add(&outer(&v, &v).scale_re(l.max(0.0).sqrt()));
    }
    Ok(out.hermitized())
}

/// Naimark dilation (K, ξ, L) of a POVM.
#[derive(Debug, Clone)]
pub struct NaimarkDilation {
    pub system_dim: usize,
    pub probe_dim: usize,
    /// Probe state ξ (first probe basis vector).
    pub probe_state: Vec<C64>,
    /// Dilated observable L on H⊗K.
    pub dilated: HermitianObservable,
}

impl NaimarkDilation {
    /// |ψ⊗ξ⟩ embedding.
    pub fn embed(&self, psi: &[C64]) -> Vec<C64> {
        vec_kron(psi, &self.probe_state)
    }

    /// Max deviation of ⟨ψ'⊗ξ, E^L({a})(ψ⊗ξ)⟩ from ⟨ψ', Π_a ψ⟩ over the
    /// standard basis and all outcomes.
    pub fn identity_residual(&self, povm: &Povm) -> f64 {
        let d = self.system_dim;
        let mut worst: f64 = 0.0;
        for o in povm.outcomes() {
            let el = self.dilated.point_projector(o.label, self.dilated.cluster_tol());
            for i in 0..d {
                let ei = self.embed(&basis_vector(d, i));
                let lhs_col = el.mul_vec(&ei);
                for j in 0..d {
                    let ej = self.embed(&basis_vector(d, j));
                    let lhs = vec_inner(&ej, &lhs_col);
                    let rhs = o.effect[(j, i)];
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        worst
    }
}

/// Builds a Naimark dilation with probe dimension = number of outcomes.
pub fn naimark_dilate(povm: &Povm, tol: &ToleranceProfile) -> Result<NaimarkDilation> {
    let d = povm.dim();
    let m = povm.outcomes().len();
    let total = d * m;

    let roots: Vec<ComplexMatrix> = povm
        .outcomes()
        .iter()
        .map(|o| effect_sqrt(&o.effect, tol))
        .collect::<Result<_>>()?;

    // V e_i = Σ_a (√Π_a e_i) ⊗ e_a has orthonormal columns since Σ Π_a = I
    let mut domain = Vec::with_capacity(d);
    let mut image = Vec::with_capacity(d);
    for i in 0..d {
        let ei = basis_vector(d, i);
        domain.push(vec_kron(&ei, &basis_vector(m, 0)));
        let mut img = vec![C64::new(0.0, 0.0); total];
        for (a, root) in roots.iter().enumerate() {
            let col = root.mul_vec(&ei);
            for (r, z) in col.iter().enumerate() {
                img[r * m + a] = *z;
            }
        }
        image.push(img);
    }
    let w = unitary_from_partial_isometry(&domain, &image, total);

    let labels: Vec<f64> = povm.labels();
    let meter = ComplexMatrix::diagonal(&labels);
    let big = ComplexMatrix::identity(d).kron(&meter);
    let l_matrix = w.adjoint().mul(&big).mul(&w).hermitized();
    let dilated = HermitianObservable::new(l_matrix, tol)?;
    Ok(NaimarkDilation {
        system_dim: d,
        probe_dim: m,
        probe_state: basis_vector(m, 0),
        dilated,
    })
}

/// Joint dilation (K₁⊗K₂, ξ₁⊗ξ₂, L₁⊗I₂, L₂⊗I₁) with legs ordered H⊗K₁⊗K₂.
#[derive(Debug, Clone)]
pub struct JointDilation {
    pub system_dim: usize,
    pub probe_dims: (usize, usize),
    /// ξ₁⊗ξ₂ on K₁⊗K₂.
    pub probe_state: Vec<C64>,
    /// First dilated observable on H⊗K₁⊗K₂.
    pub first: HermitianObservable,
    /// Second dilated observable on H⊗K₁⊗K₂.
    pub second: HermitianObservable,
}

impl JointDilation {
    pub fn embed(&self, psi: &[C64]) -> Vec<C64> {
        vec_kron(psi, &self.probe_state)
    }

    /// ρ ⊗ |ξ⟩⟨ξ| on the dilated space.
    pub fn embed_state(&self, state: &QuantumState) -> QuantumState {
        match state {
            QuantumState::Vector(v) => QuantumState::Vector(self.embed(v)),
            QuantumState::Density(m) => {
                QuantumState::Density(m.kron(&outer(&self.probe_state, &self.probe_state)))
            }
        }
    }

    /// Max cellwise deviation of ⟨Π₁(Δ)ψ', Π₂(Γ)ψ⟩ from the dilated form over
    /// outcome pairs and the standard system basis.
    pub fn identity_residual(&self, p1: &Povm, p2: &Povm) -> f64 {
        let d = self.system_dim;
        let mut worst: f64 = 0.0;
        for o1 in p1.outcomes() {
            let ex = self.first.point_projector(o1.label, self.first.cluster_tol());
            for o2 in p2.outcomes() {
                let ey = self.second.point_projector(o2.label, self.second.cluster_tol());
                for i in 0..d {
                    let psi = basis_vector(d, i);
                    let rhs_vec = ey.mul_vec(&self.embed(&psi));
                    let p2psi = o2.effect.mul_vec(&psi);
                    for j in 0..d {
                        let psi_p = basis_vector(d, j);
                        let lhs = vec_inner(&o1.effect.mul_vec(&psi_p), &p2psi);
                        let rhs = vec_inner(&ex.mul_vec(&self.embed(&psi_p)), &rhs_vec);
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Dilates both POVMs and embeds them on the common space H⊗K₁⊗K₂.
pub fn joint_dilate(p1: &Povm, p2: &Povm, tol: &ToleranceProfile) -> Result<JointDilation> {
    if p1.dim() != p2.dim() {
        return Err(Error::DimensionMismatch { left: p1.dim(), right: p2.dim() });
    }
    let d = p1.dim();
    let n1 = naimark_dilate(p1, tol)?;
    let n2 = naimark_dilate(p2, tol)?;
    let (m1, m2) = (n1.probe_dim, n2.probe_dim);

    // L₁ lives on H⊗K₁: extend with an identity K₂ leg.
    let first = n1.dilated.matrix().kron(&ComplexMatrix::identity(m2));
    // L₂ lives on H⊗K₂: extend, then swap the probe legs into H⊗K₁⊗K₂ order.
    let second_hk2k1 = n2.dilated.matrix().kron(&ComplexMatrix::identity(m1));
    let second = second_hk2k1.swap_last_two_legs(d, m2, m1);

    Ok(JointDilation {
        system_dim: d,
        probe_dims: (m1, m2),
        probe_state: vec_kron(&n1.probe_state, &n2.probe_state),
        first: HermitianObservable::new(first, tol)?,
        second: HermitianObservable::new(second, tol)?,
    })
}

/// Decides Tr[Π₁({a})Π₂({b})ρ] = 0 for all distinct label pairs, and
/// cross-checks the equal-label trace identities
/// Tr[Π₁({a})Π₂({a})ρ] = Tr[Π₁({a})ρ] = Tr[Π₂({a})ρ].
pub fn povm_perfectly_correlated(
    p1: &Povm,
    p2: &Povm,
    state: &QuantumState,
    tol: &ToleranceProfile,
) -> Result<CorrelationVerdict> {
    if p1.dim() != p2.dim() || p1.dim() != state.dim() {
        return Err(Error::DimensionMismatch { left: p1.dim(), right: state.dim() });
    }
    let rho = state.density_matrix();
    let d = p1.dim() as f64;
    let threshold = tol.tol_zero * d;
    let label_tol = 1e-9;

    let mut worst: Option<Witness> = None;
    for o1 in p1.outcomes() {
        for o2 in p2.outcomes() {
            if values_match(o1.label, o2.label, label_tol) {
                continue;
            }
            let t = o1.effect.mul(&o2.effect).mul(&rho).trace();
            let magnitude = t.norm();
            if worst.as_ref().is_none_or(|w| magnitude > w.magnitude) {
                worst = Some(Witness { lambda: o1.label, mu: o2.label, magnitude });
            }
        }
    }
    let definition = worst.as_ref().is_none_or(|w| w.magnitude <= threshold);

    // Proposition conditions (ii) and (iii) restricted to matching labels
    let mut intersect_first = true;
    let mut intersect_second = true;
    for o1 in p1.outcomes() {
        for o2 in p2.outcomes() {
            if !values_match(o1.label, o2.label, label_tol) {
                continue;
            }
            let joint = o1.effect.mul(&o2.effect).mul(&rho).trace();
            let t1 = o1.effect.mul(&rho).trace();
            let t2 = o2.effect.mul(&rho).trace();
            if (joint - t1).norm() > threshold {
                intersect_first = false;
            }
            if (joint - t2).norm() > threshold {
                intersect_second = false;
            }
        }
    }

    let mut conditions = BTreeMap::new();
    conditions.insert("definition".to_string(), definition);
    conditions.insert("intersection_first".to_string(), definition && intersect_first);
    conditions.insert("intersection_second".to_string(), definition && intersect_second);
    Ok(CorrelationVerdict {
        correlated: definition,
        witness: if definition { None } else { worst },
        conditions,
    })
}

/// Evaluates the observable-vs-POVM equivalence conditions:
/// (i) the defining cross terms, (iii) E^X({λ})ρ = Π({λ})ρ as matrices,
/// (iv) f(X)ρ = Π(f)ρ over the probe family, (v) the same against the cyclic
/// projection of X and ρ.
pub fn observable_povm_pc(
    x: &HermitianObservable,
    p: &Povm,
    state: &QuantumState,
    tol: &ToleranceProfile,
) -> Result<ConditionReport> {
    if x.dim() != p.dim() || x.dim() != state.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: p.dim() });
    }
    let rho = state.density_matrix();
    let d = x.dim() as f64;
    let threshold = tol.tol_zero * d * 10.0;
    let mut report = ConditionReport::new();

    let as_povm = Povm::from_observable(x);
    let verdict = povm_perfectly_correlated(&as_povm, p, state, tol)?;
    report.insert("i".to_string(), verdict.correlated);

    // union of spectral values and labels
    let mt = x.cluster_tol().max(1e-9);
    let mut values = x.eigenvalues();
    for l in p.labels() {
        if !values.iter().any(|&v| values_match(v, l, mt)) {
            values.push(l);
        }
    }

    let mut iii = true;
    for &v in &values {
        let lhs = x.point_projector(v, mt).mul(&rho);
        let rhs = p.effect_for(v, mt).mul(&rho);
        if lhs.sub(&rhs).max_abs() > threshold {
            iii = false;
            break;
        }
    }
    report.insert("iii".to_string(), iii);

    let mut iv = true;
    for f in RealFunction::probe_family(&values) {
        let lhs = x.function_matrix(&f).mul(&rho);
        let rhs = p.moment(&f).mul(&rho);
        let fscale = values.iter().map(|&v| f.eval(v).abs()).fold(1.0, f64::max);
        if lhs.sub(&rhs).max_abs() > threshold * fscale {
            iv = false;
            break;
        }
    }
    report.insert("iv".to_string(), iv);

    let proj = cyclic_subspace(x, state, tol).projector();
    let mut v_cond = true;
    for f in RealFunction::probe_family(&values) {
        let lhs = x.function_matrix(&f).mul(&proj);
        let rhs = p.moment(&f).mul(&proj);
        let fscale = values.iter().map(|&v| f.eval(v).abs()).fold(1.0, f64::max);
        if lhs.sub(&rhs).max_abs() > threshold * fscale {
            v_cond = false;
            break;
        }
    }
    report.insert("v".to_string(), v_cond);

    Ok(report)
}

/// Checks the transport law: perfect correlation of (p1, p2) implies perfect
/// correlation of (p1^f, p2^f); for label-injective f the implication is
/// two-way. Returns whether the law held on this instance.
pub fn transport_check(
    p1: &Povm,
    p2: &Povm,
    state: &QuantumState,
    f: &RealFunction,
    tol: &ToleranceProfile,
) -> Result<bool> {
    let before = povm_perfectly_correlated(p1, p2, state, tol)?.correlated;
    let after =
        povm_perfectly_correlated(&p1.transform(f), &p2.transform(f), state, tol)?.correlated;
    let mut labels: Vec<f64> = p1.labels();
    labels.extend(p2.labels());
    let mut injective = true;
    for (i, &a) in labels.iter().enumerate() {
        for &b in labels.iter().skip(i + 1) {
            if !values_match(a, b, 1e-9) && values_match(f.eval(a), f.eval(b), 1e-9) {
                injective = false;
            }
        }
    }
    Ok(if injective { before == after } else { !before || after })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::is_perfectly_correlated;
    use crate::linalg::{random_density, random_state_vector};
    use crate::spectral::PovmOutcome;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn sigma_z_obs() -> HermitianObservable {
        HermitianObservable::from_real(&[&[1.0, 0.0], &[0.0, -1.0]], &tol()).unwrap()
    }

    /// Three effects ⅔|v_k⟩⟨v_k| at 120°, the canonical non-projective POVM.
    fn trine() -> Povm {
        let t = tol();
        let mut outcomes = Vec::new();
        for k in 0..3 {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            let v = vec![C64::new((ang / 2.0).cos(), 0.0), C64::new((ang / 2.0).sin(), 0.0)];
            outcomes.push(PovmOutcome {
                label: k as f64,
                effect: outer(&v, &v).scale_re(2.0 / 3.0),
            });
        }
        Povm::new(outcomes, &t).unwrap()
    }

    fn noisy(eta: f64) -> Povm {
        let t = tol();
        let i2 = ComplexMatrix::identity(2);
        let sz = ComplexMatrix::diagonal(&[1.0, -1.0]);
        Povm::new(
            vec![
                PovmOutcome { label: 1.0, effect: i2.add(&sz.scale_re(eta)).scale_re(0.5) },
                PovmOutcome { label: -1.0, effect: i2.sub(&sz.scale_re(eta)).scale_re(0.5) },
            ],
            &t,
        )
        .unwrap()
    }

    #[test]
    fn dilation_of_a_projective_povm_reproduces_it() {
        let t = tol();
        let p = Povm::from_observable(&sigma_z_obs());
        let n = naimark_dilate(&p, &t).unwrap();
        assert_eq!(n.probe_dim, 2);
        assert!(n.identity_residual(&p) < 1e-10);
    }

    #[test]
    fn dilation_of_the_trine_povm() {
        let t = tol();
        let p = trine();
        let n = naimark_dilate(&p, &t).unwrap();
        assert_eq!(n.probe_dim, 3);
        assert!(n.identity_residual(&p) < 1e-10);
    }

    #[test]
    fn dilated_statistics_match_for_random_states() {
        let t = tol();
        let i2 = ComplexMatrix::identity(2);
        let p = Povm::new(
            vec![
                PovmOutcome { label: 0.0, effect: i2.scale_re(2.0 / 3.0) },
                PovmOutcome { label: 1.0, effect: i2.scale_re(1.0 / 3.0) },
            ],
            &t,
        )
        .unwrap();
        let n = naimark_dilate(&p, &t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let rho = random_density(&mut rng, 2);
            let big_rho = rho.kron(&outer(&n.probe_state, &n.probe_state));
            for o in p.outcomes() {
                let lhs = o.effect.mul(&rho).trace().re;
                let el = n.dilated.point_projector(o.label, n.dilated.cluster_tol());
                let rhs = el.mul(&big_rho).trace().re;
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn joint_dilation_identity_on_mixed_kinds() {
        let t = tol();
        let p1 = trine();
        let p2 = Povm::from_observable(&sigma_z_obs());
        let jd = joint_dilate(&p1, &p2, &t).unwrap();
        assert!(jd.identity_residual(&p1, &p2) < 1e-9);
    }

    #[test]
    fn joint_dilation_trace_identity_for_random_states() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p1 = Povm::random(&mut rng, 2, 3, &t).unwrap();
        let p2 = Povm::random(&mut rng, 2, 2, &t).unwrap();
        let jd = joint_dilate(&p1, &p2, &t).unwrap();
        let rho = random_density(&mut rng, 2);
        let big = jd.embed_state(&QuantumState::Density(rho.clone())).density_matrix();
        for o1 in p1.outcomes() {
            for o2 in p2.outcomes() {
                let lhs = o1.effect.mul(&o2.effect).mul(&rho).trace();
                let ex = jd.first.point_projector(o1.label, jd.first.cluster_tol());
                let ey = jd.second.point_projector(o2.label, jd.second.cluster_tol());
                let rhs = ex.mul(&ey).mul(&big).trace();
                assert!((lhs - rhs).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn povm_correlation_reduces_to_dilated_observable_correlation() {
        let t = tol();
        let p = Povm::from_observable(&sigma_z_obs());
        let jd = joint_dilate(&p, &p, &t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rho = QuantumState::Density(random_density(&mut rng, 2));
        let direct = povm_perfectly_correlated(&p, &p, &rho, &t).unwrap();
        let dilated = is_perfectly_correlated(
            &jd.first,
            &jd.second,
            &jd.embed_state(&rho),
            &t,
        )
        .unwrap();
        assert_eq!(direct.correlated, dilated.correlated);
        assert!(direct.correlated);

        // a non-correlated pair transports the same way
        let q = noisy(0.6);
        let jd2 = joint_dilate(&q, &q, &t).unwrap();
        let direct2 = povm_perfectly_correlated(&q, &q, &rho, &t).unwrap();
        let dilated2 = is_perfectly_correlated(
            &jd2.first,
            &jd2.second,
            &jd2.embed_state(&rho),
            &t,
        )
        .unwrap();
        assert_eq!(direct2.correlated, dilated2.correlated);
        assert!(!direct2.correlated);
    }

    #[test]
    fn noisy_pair_cross_terms_have_the_predicted_size() {
        let t = tol();
        let eta = 0.6;
        let q = noisy(eta);
        let rho = QuantumState::Density(ComplexMatrix::identity(2).scale_re(0.5));
        let v = povm_perfectly_correlated(&q, &q, &rho, &t).unwrap();
        assert!(!v.correlated);
        let w = v.witness.unwrap();
        assert!((w.magnitude - (1.0 - eta * eta) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn distance_identity_when_correlated() {
        let t = tol();
        let p = Povm::from_observable(&sigma_z_obs());
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let rho = random_density(&mut rng, 2);
        let state = QuantumState::Density(rho.clone());
        assert!(povm_perfectly_correlated(&p, &p, &state, &t).unwrap().correlated);
        for f in RealFunction::probe_family(&p.labels()) {
            let lhs = p.moment(&f).mul(&rho);
            let rhs = p.moment(&f).mul(&rho);
            assert!(lhs.sub(&rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn observable_povm_conditions_pass_for_its_own_projective_povm() {
        let t = tol();
        let x = sigma_z_obs();
        let p = Povm::from_observable(&x);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let state = QuantumState::Density(random_density(&mut rng, 2));
        let report = observable_povm_pc(&x, &p, &state, &t).unwrap();
        for (k, ok) in &report {
            assert!(ok, "condition {k} failed");
        }
    }

    #[test]
    fn noisy_povm_fails_against_sharp_observable() {
        let t = tol();
        let x = sigma_z_obs();
        let eta = 0.6;
        let q = noisy(eta);
        let maximally_mixed = QuantumState::Density(ComplexMatrix::identity(2).scale_re(0.5));
        let r1 = observable_povm_pc(&x, &q, &maximally_mixed, &t).unwrap();
        assert!(!r1["i"]);
        // the defining cross term is exactly (1−η)/4
        let as_povm = Povm::from_observable(&x);
        let v = povm_perfectly_correlated(&as_povm, &q, &maximally_mixed, &t).unwrap();
        let w = v.witness.unwrap();
        assert!((w.magnitude - (1.0 - eta) / 4.0).abs() < 1e-12);

        // in |0⟩⟨0| condition (iii) needs Π({−1})ρ = 0 but it is (1−η)/2·|0⟩⟨0|
        let e0 = basis_vector(2, 0);
        let pure0 = QuantumState::Vector(e0.clone());
        let r2 = observable_povm_pc(&x, &q, &pure0, &t).unwrap();
        assert!(!r2["iii"]);
        let residual = q.effect_for(-1.0, 1e-9).mul(&outer(&e0, &e0));
        assert!((residual.max_abs() - (1.0 - eta) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn transport_is_one_way_for_non_injective_functions() {
        let t = tol();
        let p = Povm::from_observable(&sigma_z_obs());
        // relabel to anticorrelate: same projectors, negated labels
        let flipped = p.transform(&RealFunction::affine(-1.0, 0.0));
        let plus = QuantumState::Vector(vec![C64::new(1.0 / 2f64.sqrt(), 0.0); 2]);
        let before = povm_perfectly_correlated(&p, &flipped, &plus, &t).unwrap();
        assert!(!before.correlated);
        let sq = RealFunction::square();
        let after = povm_perfectly_correlated(
            &p.transform(&sq),
            &flipped.transform(&sq),
            &plus,
            &t,
        )
        .unwrap();
        assert!(after.correlated);
        // the implication "before ⟹ after" is vacuous here, hence consistent
        assert!(transport_check(&p, &flipped, &plus, &sq, &t).unwrap());
        // identity keeps everything as is
        assert!(transport_check(&p, &flipped, &plus, &RealFunction::identity(), &t).unwrap());
        // correlated pairs stay correlated under label-collapsing functions
        assert!(transport_check(&p, &p, &plus, &sq, &t).unwrap());
    }

    #[test]
    fn effect_sqrt_squares_back() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let effects = crate::linalg::random_effects(&mut rng, 3, 2, &t).unwrap();
        for e in &effects {
            let r = effect_sqrt(e, &t).unwrap();
            assert!(r.mul(&r).sub(e).max_abs() < 1e-10);
        }
    }

    #[test]
    fn trivial_povm_correlates_only_on_the_matching_eigenspace() {
        let t = tol();
        // p1 = projective σz, p2 = {(1, I)}: shared label 1 only
        let p1 = Povm::from_observable(&sigma_z_obs());
        let p2 = Povm::new(
            vec![PovmOutcome { label: 1.0, effect: ComplexMatrix::identity(2) }],
            &t,
        )
        .unwrap();
        let up = QuantumState::Vector(basis_vector(2, 0));
        assert!(povm_perfectly_correlated(&p1, &p2, &up, &t).unwrap().correlated);
        let down = QuantumState::Vector(basis_vector(2, 1));
        assert!(!povm_perfectly_correlated(&p1, &p2, &down, &t).unwrap().correlated);
        let _ = random_state_vector(&mut ChaCha8Rng::seed_from_u64(1), 2);
    }
}
