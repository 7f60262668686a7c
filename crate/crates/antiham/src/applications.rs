//! Injecting antilinear Hamiltonian terms and linear time reversal.
//!
//! An antilinear term H₂ cannot be added to an ordinary Hamiltonian: the
//! resulting generator is only real-linear and the evolution, while still
//! norm-preserving when (iH₂)† = -iH₂ holds, is not a Schrödinger equation.
//! In the transformed presentation the same term becomes an ordinary linear,
//! self-adjoint summand -ij·U H₂ U⁻¹ of the Hamiltonian. The admissibility
//! condition (iH₂)† = -iH₂ reduces, for a purely antilinear term, to plain
//! antisymmetry of its matrix.
//!
//! The untransformed dynamics is integrated through realification: a
//! real-linear operator on ℂⁿ is an ordinary matrix on ℝ²ⁿ (real components
//! first, imaginary second), where the real-linear adjoint becomes the plain
//! transpose. This gives an independent route to every trajectory and to the
//! adjoint convention itself.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ctransform::UTransform;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Vector};
use crate::reallinear::RealLinearOp;

/// Square real matrix, row-major; the realified picture of ℂⁿ as ℝ²ⁿ.
#[derive(Clone, PartialEq, Debug)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn apply(&self, xs: &[f64]) -> Vec<f64> {
        assert_eq!(xs.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * xs[j]).sum())
            .collect()
    }

    /// Matrix exponential, delegated to a Padé scaling-and-squaring routine.
    pub fn exp(&self) -> Self {
        let n = self.dim;
        let m = DMatrix::from_fn(n, n, |i, j| self.get(i, j));
        let e = m.exp();
        Self::from_fn(n, |i, j| e[(i, j)])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// ℂⁿ → ℝ²ⁿ: real components first, imaginary components second.
pub fn encode_vector(psi: &Vector) -> Vec<f64> {
    let n = psi.dim();
    let mut out = Vec::with_capacity(2 * n);
    out.extend(psi.entries().iter().map(|z| z.re));
    out.extend(psi.entries().iter().map(|z| z.im));
    out
}

/// ℝ²ⁿ → ℂⁿ, inverse of `encode_vector`.
pub fn decode_vector(xs: &[f64]) -> Vector {
    let n = xs.len() / 2;
    Vector::from_vec(
        (0..n)
            .map(|k| Complex64::new(xs[k], xs[n + k]))
            .collect(),
    )
}

/// The real 2n×2n matrix acting on encoded vectors exactly as the
/// real-linear operator acts on ℂⁿ. With parts M = B + A·conj and
/// B = Br + i·Bi, A = Ar + i·Ai, the blocks are
///
///   [ Br+Ar  Ai-Bi ]
///   [ Bi+Ai  Br-Ar ].
///
/// Under this map composition becomes matrix product and the real-linear
/// adjoint becomes the transpose, because the real inner product on ℂⁿ is
/// the dot product on ℝ²ⁿ.
pub fn realify(op: &RealLinearOp) -> RealMatrix {
    let n = op.dim();
    let b = op.linear();
    let a = op.antilinear();
    RealMatrix::from_fn(2 * n, |i, j| {
        let (bi, bj) = (i % n, j % n);
        let bz = b.get(bi, bj);
        let az = a.get(bi, bj);
        match (i < n, j < n) {
            (true, true) => bz.re + az.re,
            (true, false) => az.im - bz.im,
            (false, true) => bz.im + az.im,
            (false, false) => bz.re - az.re,
        }
    })
}

/// Integrates dΨ/dt = G Ψ for a real-linear generator G by exponentiating
/// its realification.
pub fn evolve_real_linear(generator: &RealLinearOp, psi: &Vector, t: f64) -> Result<Vector> {
    if generator.dim() != psi.dim() {
        return Err(Error::ShapeMismatch(format!(
            "generator of dim {} applied to state of dim {}",
            generator.dim(),
            psi.dim()
        )));
    }
    let propagator = realify(generator).scale(t).exp();
    Ok(decode_vector(&propagator.apply(&encode_vector(psi))))
}

/// Violation of the unitarity condition (iM)† = -iM for a real-linear M.
/// Zero exactly when the linear part is self-adjoint and the antilinear
/// part's matrix is antisymmetric.
pub fn injection_condition_violation(m: &RealLinearOp) -> f64 {
    let i_m = m.scale_left(Complex64::I);
    i_m.adjoint().max_abs_diff(&i_m.scale_real(-1.0))
}

/// Checks the injection condition, returning the verdict and the violation.
pub fn check_injection_condition(m: &RealLinearOp, tol: f64) -> (bool, f64) {
    let violation = injection_condition_violation(m);
    (violation <= tol, violation)
}

/// A purely antilinear Hamiltonian term on the base space, Ψ ↦ A·conj(Ψ).
#[derive(Clone, Debug)]
pub struct AntilinearTerm {
    matrix: ComplexMatrix,
}

impl AntilinearTerm {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "antilinear term must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn as_operator(&self) -> RealLinearOp {
        RealLinearOp::from_antilinear(self.matrix.clone())
            .expect("square by construction")
    }

    /// ‖A + Aᵀ‖, zero exactly for admissible terms.
    pub fn antisymmetry_violation(&self) -> f64 {
        self.matrix
            .max_abs_diff(&self.matrix.transpose().scale(-Complex64::ONE))
    }

    pub fn is_admissible(&self, tol: f64) -> bool {
        self.antisymmetry_violation() <= tol
    }
}

/// Result of injecting an antilinear term into the transformed system.
#[derive(Clone, Debug)]
pub struct InjectedSystem {
    /// The transformed term -ij·U H₂ U⁻¹, an ordinary self-adjoint matrix.
    pub term: ComplexMatrix,
    /// Hamiltonian of the transformed system with the term added.
    pub total_hamiltonian: ComplexMatrix,
}

/// Injects an admissible antilinear base-space term into the transformed
/// system with Hamiltonian `hamiltonian_c`. Rejects inadmissible terms,
/// whose transform would not be self-adjoint.
pub fn inject_term(
    ut: &UTransform,
    hamiltonian_c: &ComplexMatrix,
    term: &AntilinearTerm,
    tol: f64,
) -> Result<InjectedSystem> {
    let (ok, violation) = check_injection_condition(&term.as_operator(), tol);
    if !ok {
        return Err(Error::InadmissibleTerm(violation));
    }
    let lifted = ut.space().lift_operator(&term.as_operator())?;
    let term_c = ut.transformed_hamiltonian(&lifted, tol)?;
    let herr = term_c.hermiticity_error();
    if herr > tol {
        return Err(Error::Contract(format!(
            "transformed term is not self-adjoint: deviation {herr:.3e}"
        )));
    }
    let total = hamiltonian_c.checked_add(&term_c)?;
    Ok(InjectedSystem {
        term: term_c,
        total_hamiltonian: total,
    })
}

/// Time reversal in all three presentations: antilinear on the base space,
/// its lift, and the linear unitary it becomes after the transform.
#[derive(Clone, Debug)]
pub struct TimeReversal {
    pub base: RealLinearOp,
    pub lifted: RealLinearOp,
    pub transformed: ComplexMatrix,
}

/// Builds the transformed time-reversal operator from an antilinear,
/// antiunitary base operator. Commutation with a concrete Hamiltonian is the
/// caller's affair; antiunitarity is checked here.
pub fn build_time_reversal(
    ut: &UTransform,
    base: &RealLinearOp,
    tol: f64,
) -> Result<TimeReversal> {
    let lin_residue = base.linear().max_abs();
    if lin_residue > tol {
        return Err(Error::Contract(format!(
            "time reversal must be antilinear, linear residue {lin_residue:.3e}"
        )));
    }
    let id = RealLinearOp::identity(base.dim());
    let unit_err = base
        .adjoint()
        .compose(base)?
        .max_abs_diff(&id);
    if unit_err > tol {
        return Err(Error::Contract(format!(
            "time reversal must be antiunitary, T†T deviates by {unit_err:.3e}"
        )));
    }
    let lifted = ut.space().lift_operator(base)?;
    let transformed = ut.transform_op(&lifted)?.try_into_matrix(tol)?;
    Ok(TimeReversal {
        base: base.clone(),
        lifted,
        transformed,
    })
}

/// Continuous-symmetry generator diagnostic: the condition (iG)† = -iG and
/// the unitarity defect of 1 + iεG, which is O(ε²) exactly when the
/// condition holds.
#[derive(Clone, Copy, Debug)]
pub struct GeneratorCheck {
    pub satisfied: bool,
    pub condition_violation: f64,
    pub unitarity_residual: f64,
}

pub fn check_generator(g: &RealLinearOp, eps: f64, tol: f64) -> Result<GeneratorCheck> {
    let (satisfied, condition_violation) = check_injection_condition(g, tol);
    let step = RealLinearOp::identity(g.dim()).add(&g.scale_left(Complex64::I).scale_real(eps))?;
    let unitarity_residual = step
        .adjoint()
        .compose(&step)?
        .max_abs_diff(&RealLinearOp::identity(g.dim()));
    Ok(GeneratorCheck {
        satisfied,
        condition_violation,
        unitarity_residual,
    })
}
