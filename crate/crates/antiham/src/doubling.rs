//! Hilbert-space doubling with a hidden two-fold degeneracy.
//!
//! The doubled space is a direct sum of two copies of the base space, with
//! basis ordering: components 0..n of a doubled vector live in the first
//! summand, components n..2n in the second. Operators and states of the base
//! system lift block-diagonally, so every energy level, including the
//! vacuum, becomes exactly two-fold degenerate. The partial isometry V moves
//! the second summand onto the first; it generates the structural operators
//!
//!   j = V† - V   (unitary, j² = -1, commutes with every lifted operator),
//!   L = VV† - V†V   (the summand parity, L² = 1).
//!
//! An operator on the doubled space is a lift of a base operator exactly
//! when it commutes with both V and V†.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Vector};
use crate::reallinear::RealLinearOp;
use crate::system::{DensityMatrix, QuantumSystem, SystemLabel, DEFAULT_TOL};

/// Geometry of a doubled Hilbert space built over an n-dimensional base.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DoubledSpace {
    base_dim: usize,
}

impl DoubledSpace {
    pub fn new(base_dim: usize) -> Result<Self> {
        if base_dim == 0 {
            return Err(Error::Contract("base dimension must be positive".into()));
        }
        Ok(Self { base_dim })
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// Dimension of the doubled space.
    pub fn dim(&self) -> usize {
        2 * self.base_dim
    }

    /// V, the partial isometry mapping (Ψ, Φ) to (Φ, 0).
    pub fn v(&self) -> ComplexMatrix {
        let n = self.base_dim;
        let zero = ComplexMatrix::zeros(n, n);
        let id = ComplexMatrix::identity(n);
        ComplexMatrix::from_blocks(&zero, &id, &zero, &zero)
    }

    pub fn v_dag(&self) -> ComplexMatrix {
        self.v().dagger()
    }

    /// j = V† - V, the imaginary-unit-like operator toggling the summands.
    pub fn j(&self) -> ComplexMatrix {
        &self.v_dag() - &self.v()
    }

    /// L = VV† - V†V, the summand parity.
    pub fn l(&self) -> ComplexMatrix {
        let v = self.v();
        let vd = self.v_dag();
        &(&v * &vd) - &(&vd * &v)
    }

    fn expect_base(&self, rows: usize, what: &str) -> Result<()> {
        if rows != self.base_dim {
            return Err(Error::ShapeMismatch(format!(
                "{what} has dimension {rows}, base space has {}",
                self.base_dim
            )));
        }
        Ok(())
    }

    fn expect_doubled(&self, rows: usize, what: &str) -> Result<()> {
        if rows != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{what} has dimension {rows}, doubled space has {}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Block-diagonal lift diag(M, M) of a base-space matrix.
    pub fn lift_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.expect_base(m.rows(), "matrix")?;
        if !m.is_square() {
            return Err(Error::ShapeMismatch("lift of a non-square matrix".into()));
        }
        let zero = ComplexMatrix::zeros(self.base_dim, self.base_dim);
        Ok(ComplexMatrix::from_blocks(m, &zero, &zero, m))
    }

    /// Lifts a real-linear operator by lifting both parts.
    pub fn lift_operator(&self, op: &RealLinearOp) -> Result<RealLinearOp> {
        RealLinearOp::from_parts(
            self.lift_matrix(op.linear())?,
            self.lift_matrix(op.antilinear())?,
        )
    }

    /// Lifts a base state into the first summand: Ψ ↦ (Ψ, 0).
    pub fn lift_state(&self, psi: &Vector) -> Result<Vector> {
        self.expect_base(psi.dim(), "state")?;
        let mut data = psi.entries().to_vec();
        data.extend(std::iter::repeat(Complex64::ZERO).take(self.base_dim));
        Ok(Vector::from_vec(data))
    }

    /// The hidden degenerate partner V†Ψ of a doubled state; for a state in
    /// the first summand this is the same state in the second summand.
    pub fn degenerate_partner(&self, psi_b: &Vector) -> Result<Vector> {
        self.expect_doubled(psi_b.dim(), "state")?;
        self.v_dag().apply(psi_b)
    }

    /// Lifts a base density operator to diag(ρ, ρ)/2, the symmetric mixture
    /// over both summands.
    pub fn lift_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let half = self.lift_matrix(rho.matrix())?.scale(Complex64::new(0.5, 0.0));
        DensityMatrix::new(half, DEFAULT_TOL)
    }

    /// Largest commutator norm among [V, M] and [V†, M]; an operator is a
    /// lift exactly when this vanishes.
    pub fn lift_violation(&self, op: &RealLinearOp) -> Result<f64> {
        self.expect_doubled(op.dim(), "operator")?;
        let v = RealLinearOp::from_linear(self.v())?;
        let vd = RealLinearOp::from_linear(self.v_dag())?;
        let mut worst: f64 = 0.0;
        for s in [&v, &vd] {
            let comm = s.compose(op)?.sub(&op.compose(s)?)?;
            worst = worst.max(comm.max_abs());
        }
        Ok(worst)
    }

    /// Decides by direct evaluation whether an operator commutes with both V
    /// and V†, returning the verdict together with the worst violation.
    pub fn check_lift_constraint(&self, op: &RealLinearOp, tol: f64) -> Result<(bool, f64)> {
        let violation = self.lift_violation(op)?;
        Ok((violation <= tol, violation))
    }

    /// Matrix form of the lift constraint check.
    pub fn check_lift_constraint_matrix(
        &self,
        m: &ComplexMatrix,
        tol: f64,
    ) -> Result<(bool, f64)> {
        self.check_lift_constraint(&RealLinearOp::from_linear(m.clone())?, tol)
    }

    /// Inverts the lift: recovers the base matrix from a doubled one. The
    /// base action is read off from V V† M applied to first-summand states,
    /// which for a constrained M is its top-left block. Fails when the lift
    /// constraint is violated beyond tol.
    pub fn unlift_matrix(&self, m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
        let (ok, violation) = self.check_lift_constraint_matrix(m, tol)?;
        if !ok {
            return Err(Error::NotLiftable(violation));
        }
        Ok(m.block(0, 0, self.base_dim, self.base_dim))
    }

    /// Real-linear version of the lift inversion.
    pub fn unlift_operator(&self, op: &RealLinearOp, tol: f64) -> Result<RealLinearOp> {
        let (ok, violation) = self.check_lift_constraint(op, tol)?;
        if !ok {
            return Err(Error::NotLiftable(violation));
        }
        let n = self.base_dim;
        RealLinearOp::from_parts(
            op.linear().block(0, 0, n, n),
            op.antilinear().block(0, 0, n, n),
        )
    }

    /// Averages a doubled density operator over the hidden symmetry group,
    ///
    ///   ρ₂ = (1/4) Σ_{a,b∈{0,1}} W^a j^b ρ j^{-b} W^{-a},  W = V† + V,
    ///
    /// where W⁻¹ = W and j⁻¹ = -j. The result satisfies the lift constraint
    /// and is physically indistinguishable from the input: all lifted
    /// observables give the same probabilities, evolution and collapse
    /// commute with the averaging.
    pub fn symmetrize_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.expect_doubled(rho.dim(), "density")?;
        let w = &self.v_dag() + &self.v();
        let j = self.j();
        let j_inv = -&j;
        let quarter = Complex64::new(0.25, 0.0);
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for a in 0..2usize {
            for b in 0..2usize {
                let mut term = rho.matrix().clone();
                if b == 1 {
                    term = &(&j * &term) * &j_inv;
                }
                if a == 1 {
                    term = &(&w * &term) * &w;
                }
                acc = &acc + &term;
            }
        }
        DensityMatrix::new(acc.scale(quarter), DEFAULT_TOL)
    }

    /// Lifts a whole system: Hamiltonian, energy observable, and observables
    /// all become block-diagonal on the doubled space.
    pub fn build_system_b(&self, sys: &QuantumSystem) -> Result<QuantumSystem> {
        self.expect_base(sys.dim, "system")?;
        let hamiltonian = self.lift_matrix(&sys.hamiltonian)?;
        let energy = self.lift_matrix(&sys.energy_observable)?;
        let observables = sys
            .observables
            .iter()
            .map(|o| self.lift_matrix(o))
            .collect::<Result<Vec<_>>>()?;
        QuantumSystem::new(SystemLabel::B, hamiltonian, energy, observables, DEFAULT_TOL)
    }
}
