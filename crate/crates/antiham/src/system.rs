//! Quantum systems, density matrices, measurement, and time evolution.
//!
//! A system bundles a Hamiltonian, an energy observable, and a list of
//! further observables, all self-adjoint matrices on the same space. For the
//! original and doubled presentations the energy observable and the
//! Hamiltonian coincide; in the transformed presentation they differ, which
//! is why the two are kept as separate fields.

use std::fmt;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{default_cluster_tol, exp_hermitian, ComplexMatrix, Vector};

/// Default numerical tolerance for validation and equality checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Measurement branches with probability below this floor cannot be
/// collapsed onto.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Which of the three physically equivalent presentations a system is in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SystemLabel {
    A,
    B,
    C,
}

impl fmt::Display for SystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemLabel::A => write!(f, "A"),
            SystemLabel::B => write!(f, "B"),
            SystemLabel::C => write!(f, "C"),
        }
    }
}

/// A finite-dimensional quantum system.
#[derive(Clone, Debug)]
pub struct QuantumSystem {
    pub label: SystemLabel,
    pub dim: usize,
    pub hamiltonian: ComplexMatrix,
    pub energy_observable: ComplexMatrix,
    pub observables: Vec<ComplexMatrix>,
}

impl QuantumSystem {
    pub fn new(
        label: SystemLabel,
        hamiltonian: ComplexMatrix,
        energy_observable: ComplexMatrix,
        observables: Vec<ComplexMatrix>,
        tol: f64,
    ) -> Result<Self> {
        let dim = hamiltonian.rows();
        for (name, m) in std::iter::once(("hamiltonian", &hamiltonian))
            .chain(std::iter::once(("energy observable", &energy_observable)))
            .chain(observables.iter().map(|o| ("observable", o)))
        {
            if !m.is_square() || m.rows() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "{name} must be {dim}x{dim}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            let herr = m.hermiticity_error();
            if herr > tol {
                return Err(Error::Contract(format!(
                    "{name} is not self-adjoint: deviation {herr:.3e} exceeds {tol:.3e}"
                )));
            }
        }
        Ok(Self {
            label,
            dim,
            hamiltonian,
            energy_observable,
            observables,
        })
    }

    /// System whose energy observable is the Hamiltonian itself.
    pub fn closed(
        label: SystemLabel,
        hamiltonian: ComplexMatrix,
        observables: Vec<ComplexMatrix>,
        tol: f64,
    ) -> Result<Self> {
        let energy = hamiltonian.clone();
        Self::new(label, hamiltonian, energy, observables, tol)
    }

    /// exp(-iHt) for this system's Hamiltonian.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        exp_hermitian(&self.hamiltonian, Complex64::new(0.0, -t))
    }

    pub fn evolve_state(&self, psi: &Vector, t: f64) -> Result<Vector> {
        self.propagator(t)?.apply(psi)
    }

    pub fn evolve_density(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        let u = self.propagator(t)?;
        let evolved = &(&u * rho.matrix()) * &u.dagger();
        DensityMatrix::new(evolved, DEFAULT_TOL)
    }

    /// Canonical lowest-energy eigenstate of the energy observable. With a
    /// degenerate ground level this picks the cluster member with the
    /// smallest pivot index.
    pub fn ground_state(&self) -> Result<Vector> {
        let (_, vecs) = self.energy_observable.eigh()?;
        vecs.into_iter()
            .next()
            .ok_or_else(|| Error::Contract("empty system has no ground state".into()))
    }
}

#[derive(Serialize, Deserialize)]
struct SystemWire {
    label: SystemLabel,
    dim: usize,
    hamiltonian: ComplexMatrix,
    energy_observable: ComplexMatrix,
    observables: Vec<ComplexMatrix>,
}

impl Serialize for QuantumSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SystemWire {
            label: self.label,
            dim: self.dim,
            hamiltonian: self.hamiltonian.clone(),
            energy_observable: self.energy_observable.clone(),
            observables: self.observables.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuantumSystem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = SystemWire::deserialize(deserializer)?;
        let sys = QuantumSystem::new(
            w.label,
            w.hamiltonian,
            w.energy_observable,
            w.observables,
            DEFAULT_TOL,
        )
        .map_err(D::Error::custom)?;
        if sys.dim != w.dim {
            return Err(D::Error::custom(format!(
                "declared dim {} does not match matrix size {}",
                w.dim, sys.dim
            )));
        }
        Ok(sys)
    }
}

/// Mixed state with a cached canonical eigendecomposition.
///
/// The eigendecomposition (probabilities ascending, eigenvectors in the
/// canonical phase and pivot order) is computed once at construction; the
/// transformed presentation is built from exactly these eigenvectors, so
/// keeping them attached to the state avoids recomputing an arbitrary basis
/// later.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    probs: Vec<f64>,
    eigvecs: Vec<Vector>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herr = matrix.hermiticity_error();
        if herr > tol {
            return Err(Error::Contract(format!(
                "density matrix is not self-adjoint: deviation {herr:.3e}"
            )));
        }
        let tr = matrix.trace();
        if (tr - Complex64::ONE).norm() > tol * (matrix.rows() as f64).max(1.0) {
            return Err(Error::Contract(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let (probs, eigvecs) = matrix.eigh()?;
        if let Some(&p) = probs.first() {
            if p < -tol {
                return Err(Error::Contract(format!(
                    "density matrix has negative eigenvalue {p:.3e}"
                )));
            }
        }
        Ok(Self {
            matrix,
            probs,
            eigvecs,
        })
    }

    pub fn from_pure(psi: &Vector) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::Contract("zero vector is not a state".into()));
        }
        let unit = psi.normalized();
        Self::new(unit.outer(&unit), DEFAULT_TOL)
    }

    /// Σ pₖ ψₖψₖ† for a given ensemble; the vectors are normalized first.
    pub fn from_ensemble(probs: &[f64], states: &[Vector]) -> Result<Self> {
        if probs.len() != states.len() || probs.is_empty() {
            return Err(Error::ShapeMismatch(
                "ensemble needs matching, nonempty probability and state lists".into(),
            ));
        }
        let dim = states[0].dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (&p, psi) in probs.iter().zip(states) {
            if p < 0.0 {
                return Err(Error::Contract(format!("negative ensemble weight {p}")));
            }
            if p == 0.0 {
                continue;
            }
            let unit = psi.normalized();
            m = &m + &unit.outer(&unit).scale(Complex64::new(p, 0.0));
        }
        Self::new(m, DEFAULT_TOL)
    }

    /// Maximally mixed state 1/n.
    pub fn maximally_mixed(n: usize) -> Self {
        let m = ComplexMatrix::scalar(n, Complex64::new(1.0 / n as f64, 0.0));
        Self::new(m, DEFAULT_TOL).expect("1/n is a valid density matrix")
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Canonical spectral ensemble: probabilities ascending with matching
    /// eigenvectors. Probabilities may include zeros.
    pub fn eigensystem(&self) -> (&[f64], &[Vector]) {
        (&self.probs, &self.eigvecs)
    }

    /// Re Tr(Oρ), the expectation value of a self-adjoint observable.
    pub fn expectation(&self, obs: &ComplexMatrix) -> Result<f64> {
        Ok((&obs.checked_mul(&self.matrix)?).trace().re)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Spectral decomposition of an observable into near-degenerate clusters.
///
/// Eigenvalues closer than the cluster tolerance are merged into one
/// measurement outcome whose projector spans the whole cluster; this keeps
/// outcome lists comparable between a system and its doubled counterpart,
/// where every eigenvalue appears twice.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    values: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
    multiplicities: Vec<usize>,
}

impl SpectralDecomposition {
    /// Raw (unclustered) eigenvalues are grouped with a gap threshold scaled
    /// by the observable's magnitude.
    pub fn of(obs: &ComplexMatrix) -> Result<Self> {
        let (vals, vecs) = obs.eigh()?;
        let ctol = default_cluster_tol(obs.max_abs());
        let n = vals.len();
        let mut values = Vec::new();
        let mut projectors = Vec::new();
        let mut multiplicities = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && vals[end] - vals[end - 1] <= ctol {
                end += 1;
            }
            let mut proj = ComplexMatrix::zeros(obs.rows(), obs.rows());
            for v in &vecs[start..end] {
                proj = &proj + &v.outer(v);
            }
            let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
            values.push(mean);
            projectors.push(proj);
            multiplicities.push(end - start);
            start = end;
        }
        Ok(Self {
            values,
            projectors,
            multiplicities,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Born probabilities Re Tr(Pₖ ρ) for every outcome, in outcome order.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.projectors
            .iter()
            .map(|p| Ok(p.checked_mul(rho.matrix())?.trace().re))
            .collect()
    }

    /// ⟨ψ|Pₖ|ψ⟩ for a normalized pure state.
    pub fn probabilities_pure(&self, psi: &Vector) -> Result<Vec<f64>> {
        self.projectors
            .iter()
            .map(|p| Ok(psi.inner(&p.apply(psi)?).re))
            .collect()
    }

    /// Post-measurement state Pₖ ρ Pₖ / Tr(Pₖ ρ) for outcome k.
    pub fn collapse(&self, rho: &DensityMatrix, k: usize) -> Result<DensityMatrix> {
        let p = &self.projectors[k];
        let prob = p.checked_mul(rho.matrix())?.trace().re;
        if prob < PROBABILITY_FLOOR {
            return Err(Error::ZeroProbabilityBranch {
                probability: prob,
                floor: PROBABILITY_FLOOR,
            });
        }
        let collapsed = (&(p * rho.matrix()) * p).scale(Complex64::new(1.0 / prob, 0.0));
        DensityMatrix::new(collapsed, DEFAULT_TOL)
    }

    /// Post-measurement pure state Pₖψ / ‖Pₖψ‖ for outcome k.
    pub fn collapse_pure(&self, psi: &Vector, k: usize) -> Result<Vector> {
        let projected = self.projectors[k].apply(psi)?;
        let prob = projected.norm().powi(2);
        if prob < PROBABILITY_FLOOR {
            return Err(Error::ZeroProbabilityBranch {
                probability: prob,
                floor: PROBABILITY_FLOOR,
            });
        }
        Ok(projected.normalized())
    }
}

/// One branch of a full measurement: outcome value, its probability, and the
/// collapsed state when the branch is reachable.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub value: f64,
    pub probability: f64,
    pub post_state: Option<DensityMatrix>,
}

/// Measures an observable on a state, returning every outcome branch.
pub fn measure(obs: &ComplexMatrix, rho: &DensityMatrix) -> Result<Vec<MeasurementOutcome>> {
    let dec = SpectralDecomposition::of(obs)?;
    let probs = dec.probabilities(rho)?;
    let mut out = Vec::with_capacity(dec.len());
    for (k, (&value, &probability)) in dec.values().iter().zip(&probs).enumerate() {
        let post_state = if probability >= PROBABILITY_FLOOR {
            Some(dec.collapse(rho, k)?)
        } else {
            None
        };
        out.push(MeasurementOutcome {
            value,
            probability,
            post_state,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_hermitian, random_unit_vector, rng};

    #[test]
    fn density_validation_rejects_bad_trace() {
        let m = ComplexMatrix::scalar(2, Complex64::new(0.7, 0.0));
        assert!(DensityMatrix::new(m, 1e-9).is_err());
    }

    #[test]
    fn density_validation_rejects_negative_eigenvalue() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.5, 0.0], vec![0.0, -0.5]]).unwrap();
        assert!(DensityMatrix::new(m, 1e-9).is_err());
    }

    #[test]
    fn pure_state_density_has_unit_purity() {
        let mut r = rng(31);
        let psi = random_unit_vector(&mut r, 4);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!((rho.matrix().trace() - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn spectral_decomposition_resolves_identity() {
        let mut r = rng(32);
        let obs = random_hermitian(&mut r, 5);
        let dec = SpectralDecomposition::of(&obs).unwrap();
        let mut sum = ComplexMatrix::zeros(5, 5);
        let mut weighted = ComplexMatrix::zeros(5, 5);
        for (v, p) in dec.values().iter().zip(dec.projectors()) {
            sum = &sum + p;
            weighted = &weighted + &p.scale(Complex64::new(*v, 0.0));
            // Projector idempotence and self-adjointness.
            assert!((p * p).max_abs_diff(p) < 1e-12);
            assert!(p.hermiticity_error() < 1e-12);
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-12);
        assert!(weighted.max_abs_diff(&obs) < 1e-11);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut r = rng(33);
        let obs = random_hermitian(&mut r, 4);
        let rho = DensityMatrix::maximally_mixed(4);
        let dec = SpectralDecomposition::of(&obs).unwrap();
        let probs = dec.probabilities(&rho).unwrap();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_eigenvalues_merge_into_one_outcome() {
        let obs = ComplexMatrix::from_real_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 5.0],
        ])
        .unwrap();
        let dec = SpectralDecomposition::of(&obs).unwrap();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec.multiplicities(), &[2, 1]);
        assert!((dec.values()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn collapse_renormalizes_and_respects_floor() {
        let obs = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let psi = Vector::basis(2, 1);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let dec = SpectralDecomposition::of(&obs).unwrap();
        // Outcome order is ascending: -1 first. The +1 branch has zero
        // probability for this state.
        let collapsed = dec.collapse(&rho, 0).unwrap();
        assert!(collapsed.max_abs_diff(&rho) < 1e-12);
        assert!(matches!(
            dec.collapse(&rho, 1),
            Err(Error::ZeroProbabilityBranch { .. })
        ));
    }

    #[test]
    fn evolution_preserves_norm_and_expectation_of_energy() {
        let mut r = rng(34);
        let h = random_hermitian(&mut r, 4);
        let sys = QuantumSystem::closed(SystemLabel::A, h.clone(), vec![], 1e-9).unwrap();
        let psi = random_unit_vector(&mut r, 4);
        let evolved = sys.evolve_state(&psi, 1.7).unwrap();
        assert!((evolved.norm() - 1.0).abs() < 1e-12);
        let e0 = psi.inner(&h.apply(&psi).unwrap()).re;
        let e1 = evolved.inner(&h.apply(&evolved).unwrap()).re;
        assert!((e0 - e1).abs() < 1e-11);
    }

    #[test]
    fn density_evolution_matches_pure_state_evolution() {
        let mut r = rng(35);
        let h = random_hermitian(&mut r, 3);
        let sys = QuantumSystem::closed(SystemLabel::A, h, vec![], 1e-9).unwrap();
        let psi = random_unit_vector(&mut r, 3);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let via_density = sys.evolve_density(&rho, 0.9).unwrap();
        let via_state = DensityMatrix::from_pure(&sys.evolve_state(&psi, 0.9).unwrap()).unwrap();
        assert!(via_density.max_abs_diff(&via_state) < 1e-12);
    }

    #[test]
    fn measure_returns_full_branch_list() {
        let obs = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let psi = Vector::from_vec(vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.8, 0.0),
        ]);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let outcomes = measure(&obs, &rho).unwrap();
        assert_eq!(outcomes.len(), 2);
        assert!((outcomes[0].probability - 0.36).abs() < 1e-12);
        assert!((outcomes[1].probability - 0.64).abs() < 1e-12);
        assert!(outcomes.iter().all(|o| o.post_state.is_some()));
    }

    #[test]
    fn system_wire_roundtrip() {
        let mut r = rng(36);
        let h = random_hermitian(&mut r, 3);
        let o = random_hermitian(&mut r, 3);
        let sys = QuantumSystem::closed(SystemLabel::A, h, vec![o], 1e-9).unwrap();
        let json = serde_json::to_string(&sys).unwrap();
        assert!(json.contains("\"label\":\"A\""));
        let back: QuantumSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back.dim, 3);
        assert!(back.hamiltonian.max_abs_diff(&sys.hamiltonian) < 1e-15);
        assert!(back.observables[0].max_abs_diff(&sys.observables[0]) < 1e-15);
    }

    #[test]
    fn from_ensemble_matches_weighted_projectors() {
        let mut r = rng(37);
        let a = random_unit_vector(&mut r, 3);
        let b = random_unit_vector(&mut r, 3);
        let rho = DensityMatrix::from_ensemble(&[0.3, 0.7], &[a.clone(), b.clone()]).unwrap();
        let expected = &a.outer(&a).scale(Complex64::new(0.3, 0.0))
            + &b.outer(&b).scale(Complex64::new(0.7, 0.0));
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-12);
    }
}
