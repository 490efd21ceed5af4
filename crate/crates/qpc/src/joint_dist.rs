//! Joint probability distributions and quasi-joint diagnostics.
//!
//! Compatibility of a pair in a state (support inside the commutative
//! domain) is exactly what makes the cellwise traces `Tr[E^X E^Y ρ]` a
//! genuine probability distribution; perfect correlation is then diagonal
//! concentration of that distribution.

use rand::Rng;
use serde::Serialize;

use crate::correlation::QuantumState;
use crate::linalg::{largest_common_kernel, Subspace, ToleranceProfile, C64};
use crate::spectral::HermitianObservable;
use crate::{Error, Result};

/// com(X,Y): the largest subspace on which all spectral projectors commute.
pub fn commutative_domain(
    x: &HermitianObservable,
    y: &HermitianObservable,
    tol: &ToleranceProfile,
) -> Result<Subspace> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: y.dim() });
    }
    let mut commutators = Vec::new();
    for px in x.points() {
        for py in y.points() {
            let c = px.projector.mul(&py.projector).sub(&py.projector.mul(&px.projector));
            commutators.push(c);
        }
    }
    let dom = largest_common_kernel(&commutators, tol);
    // invariance under both spectral measures holds by construction; assert it
    let p = dom.projector();
    for sp in x.points().iter().chain(y.points()) {
        let leak = sp.projector.mul(&p).sub(&p.mul(&sp.projector.mul(&p))).max_abs();
        debug_assert!(leak < 1e-7, "commutative domain not invariant: leak {leak:.3e}");
    }
    Ok(dom)
}

/// One cell of a joint distribution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct JointCell {
    pub x: f64,
    pub y: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JointDistribution {
    pub cells: Vec<JointCell>,
}

impl JointDistribution {
    pub fn total_mass(&self) -> f64 {
        self.cells.iter().map(|c| c.p).sum()
    }

    pub fn off_diagonal_mass(&self, match_tol: f64) -> f64 {
        self.cells
            .iter()
            .filter(|c| !crate::spectral::values_match(c.x, c.y, match_tol))
            .map(|c| c.p.max(0.0))
            .sum()
    }

    pub fn marginal_x(&self, value: f64, match_tol: f64) -> f64 {
        self.cells
            .iter()
            .filter(|c| crate::spectral::values_match(c.x, value, match_tol))
            .map(|c| c.p)
            .sum()
    }

    pub fn marginal_y(&self, value: f64, match_tol: f64) -> f64 {
        self.cells
            .iter()
            .filter(|c| crate::spectral::values_match(c.y, value, match_tol))
            .map(|c| c.p)
            .sum()
    }
}

/// Why a pair admits no joint distribution in the state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IncompatibilityWitness {
    pub lambda: f64,
    pub mu: f64,
    /// Magnitude of the compatibility violation at that cell.
    pub magnitude: f64,
}

/// Outcome of a joint-distribution request.
#[derive(Debug, Clone, Serialize)]
pub enum JointVerdict {
    Distribution(JointDistribution),
    Incompatible(IncompatibilityWitness),
}

impl JointVerdict {
    pub fn distribution(&self) -> Option<&JointDistribution> {
        match self {
            JointVerdict::Distribution(d) => Some(d),
            JointVerdict::Incompatible(_) => None,
        }
    }
}

/// Joint probability distribution of the pair in the state, present exactly
/// when the state is supported in the commutative domain.
pub fn joint_distribution(
    x: &HermitianObservable,
    y: &HermitianObservable,
    state: &QuantumState,
    tol: &ToleranceProfile,
) -> Result<JointVerdict> {
    if x.dim() != y.dim() || x.dim() != state.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: state.dim() });
    }
    let rho = state.density_matrix();
    let c = commutative_domain(x, y, tol)?.projector();
    let compat_residual = c.mul(&rho).sub(&rho).max_abs();
    if compat_residual > tol.tol_zero * x.dim() as f64 * 10.0 {
        // locate the worst commutation violation for the report
        let mut worst = IncompatibilityWitness { lambda: 0.0, mu: 0.0, magnitude: 0.0 };
        for px in x.points() {
            for py in y.points() {
                let lhs = px.projector.mul(&py.projector).mul(&rho);
                let rhs = py.projector.mul(&px.projector).mul(&rho);
                let m = lhs.sub(&rhs).max_abs();
                if m > worst.magnitude {
                    worst = IncompatibilityWitness { lambda: px.value, mu: py.value, magnitude: m };
                }
            }
        }
        return Ok(JointVerdict::Incompatible(worst));
    }
    let mut cells = Vec::new();
    for px in x.points() {
        for py in y.points() {
            let t = px.projector.mul(&py.projector).mul(&rho).trace();
            debug_assert!(t.im.abs() <= tol.tol_prob * 10.0, "imaginary mass {:.3e}", t.im);
            cells.push(JointCell { x: px.value, y: py.value, p: t.re });
        }
    }
    Ok(JointVerdict::Distribution(JointDistribution { cells }))
}

/// Residuals of the two sandwich forms Eq. JO1/JO2 against the cell values.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct JointMeasurability {
    pub max_residual: f64,
    pub jointly_measurable: bool,
}

/// Verifies that the joint distribution equals both successive-measurement
/// sandwich forms `Tr[E^X E^Y E^X ρ]` and `Tr[E^Y E^X E^Y ρ]` cellwise.
pub fn joint_measurability_check(
    x: &HermitianObservable,
    y: &HermitianObservable,
    state: &QuantumState,
    tol: &ToleranceProfile,
) -> Result<JointMeasurability> {
    let dist = match joint_distribution(x, y, state, tol)? {
        JointVerdict::Distribution(d) => d,
        JointVerdict::Incompatible(_) => return Err(Error::IncompatiblePair),
    };
    let rho = state.density_matrix();
    let mut max_residual: f64 = 0.0;
    let mut idx = 0;
    for px in x.points() {
        for py in y.points() {
            let p = dist.cells[idx].p;
            idx += 1;
            let xy =
                px.projector.mul(&py.projector).mul(&px.projector).mul(&rho).trace().re;
            let yx =
                py.projector.mul(&px.projector).mul(&py.projector).mul(&rho).trace().re;
            max_residual = max_residual.max((p - xy).abs()).max((p - yx).abs());
        }
    }
    Ok(JointMeasurability {
        max_residual,
        jointly_measurable: max_residual <= tol.tol_zero * x.dim() as f64 * 10.0,
    })
}

/// Diagonal-concentration verdict.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiagonalConcentration {
    pub concentrated: bool,
    pub off_diagonal_mass: f64,
}

/// True iff the joint distribution exists and all off-diagonal mass is
/// negligible, which is equivalent to perfect correlation.
pub fn diagonal_concentration(
    x: &HermitianObservable,
    y: &HermitianObservable,
    state: &QuantumState,
    tol: &ToleranceProfile,
) -> Result<DiagonalConcentration> {
    match joint_distribution(x, y, state, tol)? {
        JointVerdict::Incompatible(w) => Ok(DiagonalConcentration {
            concentrated: false,
            off_diagonal_mass: w.magnitude,
        }),
        JointVerdict::Distribution(d) => {
            let mt = x.cluster_tol().max(y.cluster_tol());
            let mass = d.off_diagonal_mass(mt);
            Ok(DiagonalConcentration {
                concentrated: mass <= tol.tol_prob * x.dim() as f64,
                off_diagonal_mass: mass,
            })
        }
    }
}

/// Which observable is measured first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeasurementOrder {
    XThenY,
    YThenX,
}

/// Empirical result of repeated successive projective measurements.
#[derive(Debug, Clone, Serialize)]
pub struct SuccessiveSample {
    pub order: MeasurementOrder,
    pub n: usize,
    pub cells: Vec<SampledCell>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SampledCell {
    pub first: f64,
    pub second: f64,
    pub count: usize,
    pub frequency: f64,
    /// Analytic sandwich probability for this cell.
    pub probability: f64,
    /// Binomial standard error at the analytic probability.
    pub std_error: f64,
}

/// Simulates successive projective measurements: Born sampling of the first
/// observable, state collapse, then the second. Frequencies converge to the
/// sandwich probabilities.
pub fn successive_measurement<R: Rng + ?Sized>(
    x: &HermitianObservable,
    y: &HermitianObservable,
    state: &QuantumState,
    order: MeasurementOrder,
    n: usize,
    rng: &mut R,
    tol: &ToleranceProfile,
) -> Result<SuccessiveSample> {
    if x.dim() != y.dim() || x.dim() != state.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: state.dim() });
    }
    let (first, second) = match order {
        MeasurementOrder::XThenY => (x, y),
        MeasurementOrder::YThenX => (y, x),
    };
    let rho = state.density_matrix();

    // analytic: P(a, b) = Tr[E_b E_a ρ E_a]
    let na = first.points().len();
    let nb = second.points().len();
    let mut probs = vec![0.0f64; na * nb];
    let mut first_probs = vec![0.0f64; na];
    for (i, pa) in first.points().iter().enumerate() {
        let collapsed = pa.projector.mul(&rho).mul(&pa.projector);
        first_probs[i] = collapsed.trace().re.max(0.0);
        for (j, pb) in second.points().iter().enumerate() {
            probs[i * nb + j] = pb.projector.mul(&collapsed).trace().re.max(0.0);
        }
    }

    // conditional second-outcome tables
    let mut cond = vec![0.0f64; na * nb];
    for i in 0..na {
        if first_probs[i] > tol.tol_prob {
            for j in 0..nb {
                cond[i * nb + j] = probs[i * nb + j] / first_probs[i];
            }
        }
    }

    let sample_index = |table: &[f64], r: f64| -> usize {
        let mut acc = 0.0;
        for (k, &p) in table.iter().enumerate() {
            acc += p;
            if r < acc {
                return k;
            }
        }
        table.len() - 1
    };

    let mut counts = vec![0usize; na * nb];
    for _ in 0..n {
        let r1: f64 = rng.random();
        let i = sample_index(&first_probs, r1);
        let r2: f64 = rng.random();
        let j = sample_index(&cond[i * nb..(i + 1) * nb], r2);
        counts[i * nb + j] += 1;
    }

    let mut cells = Vec::new();
    for (i, pa) in first.points().iter().enumerate() {
        for (j, pb) in second.points().iter().enumerate() {
            let p = probs[i * nb + j];
            cells.push(SampledCell {
                first: pa.value,
                second: pb.value,
                count: counts[i * nb + j],
                frequency: counts[i * nb + j] as f64 / n as f64,
                probability: p,
                std_error: (p * (1.0 - p) / n as f64).sqrt(),
            });
        }
    }
    Ok(SuccessiveSample { order, n, cells })
}

/// Characteristic-function samples over a grid of (a, b, t) triples.
#[derive(Debug, Clone, Serialize)]
pub struct CharacteristicSample {
    pub grid: Vec<(f64, f64, f64)>,
    pub phi: Vec<C64>,
    pub psi: Vec<C64>,
}

/// Default evaluation grid: a 21×21 lattice of (a, b) over [−3, 3] at t = 1.
pub fn default_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::new();
    for i in 0..21 {
        for j in 0..21 {
            let a = -3.0 + 0.3 * i as f64;
            let b = -3.0 + 0.3 * j as f64;
            grid.push((a, b, 1.0));
        }
    }
    grid
}

/// Φ_{a,b}(t) = ⟨ψ, e^{it(aX+bY)}ψ⟩, the characteristic function of the
/// would-be distribution of aX+bY.
pub fn phi_value(
    x: &HermitianObservable,
    y: &HermitianObservable,
    psi: &[C64],
    a: f64,
    b: f64,
    t: f64,
    tol: &ToleranceProfile,
) -> C64 {
    let combo = x.matrix().scale_re(a).add(&y.matrix().scale_re(b));
    let obs = HermitianObservable::new(combo.hermitized(), tol)
        .expect("real combination of Hermitian matrices");
    let evolved = obs.evolution(t).mul_vec(psi);
    crate::linalg::vec_inner(psi, &evolved)
}

/// Ψ_{a,b}(t) = ⟨e^{−itaX}ψ, e^{itbY}ψ⟩.
pub fn psi_value(
    x: &HermitianObservable,
    y: &HermitianObservable,
    psi: &[C64],
    a: f64,
    b: f64,
    t: f64,
) -> C64 {
    let left = x.evolution(-t * a).mul_vec(psi);
    let right = y.evolution(t * b).mul_vec(psi);
    crate::linalg::vec_inner(&left, &right)
}

/// Evaluates both characteristic functions at every grid point.
pub fn characteristic_functions(
    x: &HermitianObservable,
    y: &HermitianObservable,
    psi: &[C64],
    grid: &[(f64, f64, f64)],
    tol: &ToleranceProfile,
) -> Result<CharacteristicSample> {
    if x.dim() != y.dim() || x.dim() != psi.len() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: psi.len() });
    }
    let mut phi = Vec::with_capacity(grid.len());
    let mut psi_vals = Vec::with_capacity(grid.len());
    for &(a, b, t) in grid {
        phi.push(phi_value(x, y, psi, a, b, t, tol));
        psi_vals.push(psi_value(x, y, psi, a, b, t));
        // axis agreement Φ_{a,0} = Ψ_{a,0} holds by construction
        if b == 0.0 {
            let last_phi = *phi.last().unwrap();
            let last_psi = *psi_vals.last().unwrap();
            debug_assert!((last_phi - last_psi).norm() < 1e-9);
        }
    }
    Ok(CharacteristicSample { grid: grid.to_vec(), phi, psi: psi_vals })
}

/// Max residual of the shift identity Ψ_{t,s}(1) = Ψ_{t+s,0}(1) over the
/// grid; zero exactly when the pair is perfectly correlated in ψ.
pub fn psi_shift_residual(
    x: &HermitianObservable,
    y: &HermitianObservable,
    psi: &[C64],
    grid: &[(f64, f64, f64)],
) -> f64 {
    let mut worst: f64 = 0.0;
    for &(a, b, t) in grid {
        let lhs = psi_value(x, y, psi, a, b, t);
        let rhs = psi_value(x, y, psi, a + b, 0.0, t);
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

/// Max residual of Φ_{t,s}(1) = Φ_{t+s,0}(1) for a single probe vector.
pub fn phi_shift_residual(
    x: &HermitianObservable,
    y: &HermitianObservable,
    probe: &[C64],
    grid: &[(f64, f64, f64)],
    tol: &ToleranceProfile,
) -> f64 {
    let mut worst: f64 = 0.0;
    for &(a, b, t) in grid {
        let lhs = phi_value(x, y, probe, a, b, t, tol);
        let rhs = phi_value(x, y, probe, a + b, 0.0, t, tol);
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, vec_kron, ComplexMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn obs(rows: &[&[f64]]) -> HermitianObservable {
        HermitianObservable::from_real(rows, &tol()).unwrap()
    }

    fn sigma_z() -> HermitianObservable {
        obs(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    fn sigma_x() -> HermitianObservable {
        obs(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn bell() -> Vec<C64> {
        let r = C64::new(1.0 / 2f64.sqrt(), 0.0);
        vec![r, C64::new(0.0, 0.0), C64::new(0.0, 0.0), r]
    }

    fn plus() -> Vec<C64> {
        vec![C64::new(1.0 / 2f64.sqrt(), 0.0); 2]
    }

    #[test]
    fn commuting_pair_has_full_commutative_domain() {
        let t = tol();
        let x = sigma_z();
        let d = commutative_domain(&x, &x, &t).unwrap();
        assert_eq!(d.dim(), 2);
    }

    #[test]
    fn sigma_z_sigma_x_have_trivial_commutative_domain() {
        let t = tol();
        assert_eq!(commutative_domain(&sigma_z(), &sigma_x(), &t).unwrap().dim(), 0);
    }

    #[test]
    fn block_diagonal_pair_commutes_on_the_common_block() {
        let t = tol();
        // σz⊕σz vs σz⊕σx on C⁴
        let x = obs(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
        ]);
        let y = obs(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        let dom = commutative_domain(&x, &y, &t).unwrap();
        assert_eq!(dom.dim(), 2);
        assert!(dom.contains_vector(&basis_vector(4, 0), 1e-9));
        assert!(dom.contains_vector(&basis_vector(4, 1), 1e-9));
    }

    #[test]
    fn same_observable_gives_diagonal_distribution() {
        let t = tol();
        let x = sigma_z();
        let state = QuantumState::Vector(plus());
        let d = joint_distribution(&x, &x, &state, &t).unwrap();
        let dist = d.distribution().unwrap();
        for c in &dist.cells {
            if (c.x - c.y).abs() < 1e-9 {
                assert!((c.p - 0.5).abs() < 1e-12);
            } else {
                assert!(c.p.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn incompatible_pair_has_no_distribution() {
        let t = tol();
        let state = QuantumState::Vector(basis_vector(2, 0));
        let d = joint_distribution(&sigma_z(), &sigma_x(), &state, &t).unwrap();
        assert!(d.distribution().is_none());
    }

    #[test]
    fn bell_with_crossed_observables_is_uniform() {
        let t = tol();
        let x = HermitianObservable::new(
            ComplexMatrix::diagonal(&[1.0, -1.0]).kron(&ComplexMatrix::identity(2)),
            &t,
        )
        .unwrap();
        let y = HermitianObservable::new(
            ComplexMatrix::identity(2).kron(&sigma_x().matrix().clone()),
            &t,
        )
        .unwrap();
        let state = QuantumState::Vector(bell());
        let d = joint_distribution(&x, &y, &state, &t).unwrap();
        let dist = d.distribution().unwrap();
        assert_eq!(dist.cells.len(), 4);
        for c in &dist.cells {
            assert!((c.p - 0.25).abs() < 1e-12);
        }
        assert!((dist.total_mass() - 1.0).abs() < 1e-12);

        // commuting pair: sandwich forms agree exactly
        let jm = joint_measurability_check(&x, &y, &state, &t).unwrap();
        assert!(jm.jointly_measurable);
        assert!(jm.max_residual < 1e-12);

        // and off-diagonal mass is 1/2 (cells (1,-1) and (-1,1))
        let dc = diagonal_concentration(&x, &y, &state, &t).unwrap();
        assert!(!dc.concentrated);
        assert!((dc.off_diagonal_mass - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bell_with_matched_observables_is_diagonal() {
        let t = tol();
        let x = HermitianObservable::new(
            ComplexMatrix::diagonal(&[1.0, -1.0]).kron(&ComplexMatrix::identity(2)),
            &t,
        )
        .unwrap();
        let y = HermitianObservable::new(
            ComplexMatrix::identity(2).kron(&ComplexMatrix::diagonal(&[1.0, -1.0])),
            &t,
        )
        .unwrap();
        let state = QuantumState::Vector(bell());
        let dc = diagonal_concentration(&x, &y, &state, &t).unwrap();
        assert!(dc.concentrated);
        assert!(dc.off_diagonal_mass.abs() < 1e-12);
    }

    #[test]
    fn joint_measurability_errors_on_incompatible_pairs() {
        let t = tol();
        let state = QuantumState::Vector(basis_vector(2, 0));
        assert!(matches!(
            joint_measurability_check(&sigma_z(), &sigma_x(), &state, &t),
            Err(Error::IncompatiblePair)
        ));
    }

    #[test]
    fn repeated_measurement_always_agrees() {
        let t = tol();
        let x = sigma_z();
        let state = QuantumState::Vector(plus());
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let sample =
            successive_measurement(&x, &x, &state, MeasurementOrder::XThenY, 1000, &mut rng, &t)
                .unwrap();
        let mut plus_count = 0;
        for c in &sample.cells {
            if (c.first - c.second).abs() > 1e-9 {
                assert_eq!(c.count, 0, "mismatched outcomes appeared");
            } else if c.first > 0.0 {
                plus_count = c.count;
            }
        }
        // 5σ band around 1/2
        let sigma = (0.25f64 / 1000.0).sqrt();
        assert!((plus_count as f64 / 1000.0 - 0.5).abs() < 5.0 * sigma);
    }

    #[test]
    fn incompatible_order_matters_in_the_first_slot() {
        let t = tol();
        let state = QuantumState::Vector(basis_vector(2, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = successive_measurement(
            &sigma_z(),
            &sigma_x(),
            &state,
            MeasurementOrder::XThenY,
            500,
            &mut rng,
            &t,
        )
        .unwrap();
        // first outcome is always +1; second is uniform
        for c in &s.cells {
            if c.first < 0.0 {
                assert_eq!(c.count, 0);
            }
        }
        let up: usize =
            s.cells.iter().filter(|c| c.first > 0.0 && c.second > 0.0).map(|c| c.count).sum();
        let sigma = (0.25f64 / 500.0).sqrt();
        assert!((up as f64 / 500.0 - 0.5).abs() < 5.0 * sigma);
    }

    #[test]
    fn bell_successive_measurements_agree_in_both_orders() {
        let t = tol();
        let x = HermitianObservable::new(
            ComplexMatrix::diagonal(&[1.0, -1.0]).kron(&ComplexMatrix::identity(2)),
            &t,
        )
        .unwrap();
        let y = HermitianObservable::new(
            ComplexMatrix::identity(2).kron(&ComplexMatrix::diagonal(&[1.0, -1.0])),
            &t,
        )
        .unwrap();
        let state = QuantumState::Vector(bell());
        for order in [MeasurementOrder::XThenY, MeasurementOrder::YThenX] {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let s = successive_measurement(&x, &y, &state, order, 400, &mut rng, &t).unwrap();
            for c in &s.cells {
                if (c.first - c.second).abs() > 1e-9 {
                    assert_eq!(c.count, 0);
                }
            }
        }
    }

    #[test]
    fn empirical_frequencies_match_sandwich_probabilities() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(314);
        let x = HermitianObservable::new(crate::linalg::random_hermitian(&mut rng, 3), &t).unwrap();
        let y = HermitianObservable::new(crate::linalg::random_hermitian(&mut rng, 3), &t).unwrap();
        let state = QuantumState::Vector(crate::linalg::random_state_vector(&mut rng, 3));
        let s = successive_measurement(&x, &y, &state, MeasurementOrder::XThenY, 10_000, &mut rng, &t)
            .unwrap();
        let total: f64 = s.cells.iter().map(|c| c.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for c in &s.cells {
            let band = 5.0 * c.std_error.max(1e-6);
            assert!(
                (c.frequency - c.probability).abs() <= band,
                "cell ({}, {}): freq {} vs p {} (band {band})",
                c.first,
                c.second,
                c.frequency,
                c.probability
            );
        }
    }

    #[test]
    fn characteristic_functions_are_one_at_t_zero() {
        let t = tol();
        let grid = vec![(0.7, -1.3, 0.0), (2.0, 0.5, 0.0)];
        let s = characteristic_functions(&sigma_z(), &sigma_x(), &plus(), &grid, &t).unwrap();
        for v in s.phi.iter().chain(s.psi.iter()) {
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn psi_of_identical_observables_is_a_shifted_cosine() {
        // X = Y = σz in |+⟩: Ψ_{t,s}(1) = cos(t+s)
        let t = tol();
        let x = sigma_z();
        for (a, b) in [(0.3, 0.9), (-1.2, 0.4), (2.0, -0.7)] {
            let v = psi_value(&x, &x, &plus(), a, b, 1.0);
            assert!((v - C64::new((a + b).cos(), 0.0)).norm() < 1e-12);
            let shifted = psi_value(&x, &x, &plus(), a + b, 0.0, 1.0);
            assert!((v - shifted).norm() < 1e-12);
        }
        let _ = t;
    }

    #[test]
    fn psi_shift_residual_separates_correlated_from_not() {
        let t = tol();
        let grid = default_grid();
        let x = HermitianObservable::new(
            ComplexMatrix::diagonal(&[1.0, -1.0]).kron(&ComplexMatrix::identity(2)),
            &t,
        )
        .unwrap();
        let y = HermitianObservable::new(
            ComplexMatrix::identity(2).kron(&ComplexMatrix::diagonal(&[1.0, -1.0])),
            &t,
        )
        .unwrap();
        assert!(psi_shift_residual(&x, &y, &bell(), &grid) < 1e-12);
        assert!(psi_shift_residual(&sigma_z(), &sigma_x(), &basis_vector(2, 0), &grid) > 0.1);
    }

    #[test]
    fn phi_axis_identity_for_correlated_pairs() {
        let t = tol();
        let x = HermitianObservable::new(
            ComplexMatrix::diagonal(&[1.0, -1.0]).kron(&ComplexMatrix::identity(2)),
            &t,
        )
        .unwrap();
        let y = HermitianObservable::new(
            ComplexMatrix::identity(2).kron(&ComplexMatrix::diagonal(&[1.0, -1.0])),
            &t,
        )
        .unwrap();
        for k in 0..10 {
            let tt = -3.0 + 0.6 * k as f64;
            let lhs = phi_value(&x, &y, &bell(), tt, 0.0, 1.0, &t);
            let rhs = phi_value(&x, &y, &bell(), 0.0, tt, 1.0, &t);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn product_state_marginals_match_born_distributions() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = crate::linalg::random_hermitian(&mut rng, 2);
        let x = HermitianObservable::new(a.kron(&ComplexMatrix::identity(2)), &t).unwrap();
        let b = crate::linalg::random_hermitian(&mut rng, 2);
        let y = HermitianObservable::new(ComplexMatrix::identity(2).kron(&b), &t).unwrap();
        let phi1 = crate::linalg::random_state_vector(&mut rng, 2);
        let phi2 = crate::linalg::random_state_vector(&mut rng, 2);
        let psi = vec_kron(&phi1, &phi2);
        let state = QuantumState::Vector(psi.clone());
        let dist = joint_distribution(&x, &y, &state, &t).unwrap();
        let dist = dist.distribution().unwrap();
        assert!((dist.total_mass() - 1.0).abs() < 1e-10);
        let rho = state.density_matrix();
        for p in x.points() {
            let born = p.projector.mul(&rho).trace().re;
            assert!((dist.marginal_x(p.value, 1e-8) - born).abs() < 1e-10);
        }
        for p in y.points() {
            let born = p.projector.mul(&rho).trace().re;
            assert!((dist.marginal_y(p.value, 1e-8) - born).abs() < 1e-10);
        }
    }
}
