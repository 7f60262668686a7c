//! Real-linear operators on a finite-dimensional complex Hilbert space.
//!
//! A real-linear operator M satisfies M(aΨ + bΦ) = aMΨ + bMΦ for real a, b
//! only. Every such M splits uniquely into a complex-linear part B and an
//! antilinear part A, with action MΨ = BΨ + A·conj(Ψ). Both parts are stored
//! as plain matrices; the antilinear factor conjugates its argument before
//! the matrix acts.
//!
//! The adjoint is defined through the real part of the inner product,
//! Re⟨M†Ψ, Φ⟩ = Re⟨Ψ, MΦ⟩ for all Ψ, Φ. For the linear part this gives the
//! usual conjugate transpose; for the antilinear part it gives the plain
//! transpose of its matrix.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Vector};

/// Operator with a complex-linear and an antilinear part, acting as
/// Ψ ↦ linear·Ψ + antilinear·conj(Ψ).
#[derive(Clone, PartialEq, Debug)]
pub struct RealLinearOp {
    dim: usize,
    linear: ComplexMatrix,
    antilinear: ComplexMatrix,
}

impl RealLinearOp {
    pub fn from_parts(linear: ComplexMatrix, antilinear: ComplexMatrix) -> Result<Self> {
        if !linear.is_square() || !antilinear.is_square() || linear.rows() != antilinear.rows() {
            return Err(Error::ShapeMismatch(format!(
                "operator parts must be square and equal-sized, got {}x{} and {}x{}",
                linear.rows(),
                linear.cols(),
                antilinear.rows(),
                antilinear.cols()
            )));
        }
        Ok(Self {
            dim: linear.rows(),
            linear,
            antilinear,
        })
    }

    /// Embeds an ordinary complex-linear matrix.
    pub fn from_linear(m: ComplexMatrix) -> Result<Self> {
        let n = m.rows();
        Self::from_parts(m, ComplexMatrix::zeros(n, n))
    }

    /// Purely antilinear operator Ψ ↦ m·conj(Ψ).
    pub fn from_antilinear(m: ComplexMatrix) -> Result<Self> {
        let n = m.rows();
        Self::from_parts(ComplexMatrix::zeros(n, n), m)
    }

    pub fn zero(n: usize) -> Self {
        Self {
            dim: n,
            linear: ComplexMatrix::zeros(n, n),
            antilinear: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Complex64::ONE)
    }

    /// Multiplication by the fixed complex number z.
    pub fn scalar(n: usize, z: Complex64) -> Self {
        Self {
            dim: n,
            linear: ComplexMatrix::scalar(n, z),
            antilinear: ComplexMatrix::zeros(n, n),
        }
    }

    /// Componentwise complex conjugation, the canonical antilinear unitary.
    pub fn conjugation(n: usize) -> Self {
        Self {
            dim: n,
            linear: ComplexMatrix::zeros(n, n),
            antilinear: ComplexMatrix::identity(n),
        }
    }

    /// Recovers the (linear, antilinear) split from a black-box real-linear
    /// action by probing basis vectors: the action on e_k and on i·e_k
    /// determines column k of both parts, since
    /// B·e_k = (M(e_k) - i·M(i·e_k)) / 2 and A·e_k = (M(e_k) + i·M(i·e_k)) / 2.
    pub fn from_action(dim: usize, mut action: impl FnMut(&Vector) -> Vector) -> Self {
        let i = Complex64::I;
        let half = Complex64::new(0.5, 0.0);
        let mut lin_cols: Vec<Vector> = Vec::with_capacity(dim);
        let mut anti_cols: Vec<Vector> = Vec::with_capacity(dim);
        for k in 0..dim {
            let e = Vector::basis(dim, k);
            let me = action(&e);
            let mie = action(&e.scale(i));
            lin_cols.push((&me - &mie.scale(i)).scale(half));
            anti_cols.push((&me + &mie.scale(i)).scale(half));
        }
        Self {
            dim,
            linear: ComplexMatrix::from_fn(dim, dim, |r, c| lin_cols[c].get(r)),
            antilinear: ComplexMatrix::from_fn(dim, dim, |r, c| anti_cols[c].get(r)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn linear(&self) -> &ComplexMatrix {
        &self.linear
    }

    pub fn antilinear(&self) -> &ComplexMatrix {
        &self.antilinear
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        let lv = self.linear.apply(v)?;
        let av = self.antilinear.apply(&v.conj())?;
        Ok(&lv + &av)
    }

    /// self ∘ other, with other acting first. Conjugation flowing through
    /// the antilinear factors mixes the parts:
    /// linear  = B_s·B_o + A_s·conj(A_o),
    /// antilinear = B_s·A_o + A_s·conj(B_o).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "compose operators of dim {} and {}",
                self.dim, other.dim
            )));
        }
        let linear = &(&self.linear * &other.linear) + &(&self.antilinear * &other.antilinear.conj());
        let antilinear =
            &(&self.linear * &other.antilinear) + &(&self.antilinear * &other.linear.conj());
        Ok(Self {
            dim: self.dim,
            linear,
            antilinear,
        })
    }

    /// Adjoint with respect to Re⟨·,·⟩: conjugate transpose of the linear
    /// part, plain transpose of the antilinear part.
    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            linear: self.linear.dagger(),
            antilinear: self.antilinear.transpose(),
        }
    }

    /// Trace functional that is cyclic for real-linear operators: the real
    /// part of the trace of the linear part. The antilinear part has no
    /// basis-independent trace and does not contribute.
    pub fn real_trace(&self) -> f64 {
        self.linear.trace().re
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "add operators of dim {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            linear: &self.linear + &other.linear,
            antilinear: &self.antilinear + &other.antilinear,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_real(-1.0))
    }

    pub fn scale_real(&self, r: f64) -> Self {
        let z = Complex64::new(r, 0.0);
        Self {
            dim: self.dim,
            linear: self.linear.scale(z),
            antilinear: self.antilinear.scale(z),
        }
    }

    /// z·M, multiplying the output by z: Ψ ↦ z·(MΨ).
    pub fn scale_left(&self, z: Complex64) -> Self {
        Self {
            dim: self.dim,
            linear: self.linear.scale(z),
            antilinear: self.antilinear.scale(z),
        }
    }

    /// M·z, multiplying the input by z: Ψ ↦ M(zΨ). The antilinear part sees
    /// the conjugate.
    pub fn scale_right(&self, z: Complex64) -> Self {
        Self {
            dim: self.dim,
            linear: self.linear.scale(z),
            antilinear: self.antilinear.scale(z.conj()),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.linear.max_abs().max(self.antilinear.max_abs())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.linear
            .max_abs_diff(&other.linear)
            .max(self.antilinear.max_abs_diff(&other.antilinear))
    }

    /// Size of the antilinear part; zero for complex-linear operators.
    pub fn antilinear_residue(&self) -> f64 {
        self.antilinear.max_abs()
    }

    pub fn is_complex_linear(&self, tol: f64) -> bool {
        self.antilinear_residue() <= tol
    }

    /// Extracts the plain matrix of an operator known to be complex-linear,
    /// failing loudly when an antilinear remnant above tol is present.
    pub fn try_into_matrix(self, tol: f64) -> Result<ComplexMatrix> {
        let residue = self.antilinear_residue();
        if residue > tol {
            return Err(Error::Contract(format!(
                "operator is not complex-linear: antilinear residue {residue:.3e} exceeds {tol:.3e}"
            )));
        }
        Ok(self.linear)
    }
}

/// Re⟨u, v⟩, the real inner product underlying adjoints and probabilities.
pub fn real_inner(u: &Vector, v: &Vector) -> f64 {
    u.inner(v).re
}

/// Rebuilds the full complex inner product from real parts alone:
/// ⟨u, v⟩ = Re⟨u, v⟩ - i·Re⟨u, i·v⟩.
pub fn inner_from_real_parts(u: &Vector, v: &Vector) -> Complex64 {
    let re = real_inner(u, v);
    let im = real_inner(u, &v.scale(Complex64::I));
    Complex64::new(re, -im)
}

/// ⟨NΨ, Φ⟩ computed through the adjoint without ever conjugating N:
/// Re⟨Ψ, N†Φ⟩ - i·Re⟨Ψ, N†(iΦ)⟩.
pub fn adjoint_pairing(n: &RealLinearOp, psi: &Vector, phi: &Vector) -> Result<Complex64> {
    let nd = n.adjoint();
    let re = real_inner(psi, &nd.apply(phi)?);
    let im = real_inner(psi, &nd.apply(&phi.scale(Complex64::I))?);
    Ok(Complex64::new(re, -im))
}

#[derive(Serialize, Deserialize)]
struct OpWire {
    dim: usize,
    linear: ComplexMatrix,
    antilinear: ComplexMatrix,
}

impl Serialize for RealLinearOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        OpWire {
            dim: self.dim,
            linear: self.linear.clone(),
            antilinear: self.antilinear.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RealLinearOp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = OpWire::deserialize(deserializer)?;
        let op = RealLinearOp::from_parts(wire.linear, wire.antilinear).map_err(D::Error::custom)?;
        if op.dim != wire.dim {
            return Err(D::Error::custom(format!(
                "declared dim {} does not match matrix size {}",
                wire.dim, op.dim
            )));
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_matrix, random_vector, rng};
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_op(r: &mut impl Rng, n: usize) -> RealLinearOp {
        RealLinearOp::from_parts(random_matrix(r, n), random_matrix(r, n)).unwrap()
    }

    #[test]
    fn apply_matches_parts() {
        let mut r = rng(11);
        let m = random_op(&mut r, 4);
        let v = random_vector(&mut r, 4);
        let direct = m.apply(&v).unwrap();
        let by_parts = &m.linear().apply(&v).unwrap() + &m.antilinear().apply(&v.conj()).unwrap();
        assert!(direct.max_abs_diff(&by_parts) < 1e-14);
    }

    #[test]
    fn action_is_real_linear() {
        let mut r = rng(12);
        let m = random_op(&mut r, 3);
        let u = random_vector(&mut r, 3);
        let v = random_vector(&mut r, 3);
        let (a, b) = (r.random::<f64>() - 0.5, r.random::<f64>() - 0.5);
        let lhs = m
            .apply(&(&u.scale(c(a, 0.0)) + &v.scale(c(b, 0.0))))
            .unwrap();
        let rhs = &m.apply(&u).unwrap().scale(c(a, 0.0)) + &m.apply(&v).unwrap().scale(c(b, 0.0));
        assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn split_recovered_from_black_box_action() {
        let mut r = rng(13);
        let m = random_op(&mut r, 5);
        let probed = RealLinearOp::from_action(5, |v| m.apply(v).unwrap());
        assert!(probed.max_abs_diff(&m) < 1e-13);
    }

    #[test]
    fn compose_matches_pointwise_application() {
        let mut r = rng(14);
        let m = random_op(&mut r, 4);
        let n = random_op(&mut r, 4);
        let mn = m.compose(&n).unwrap();
        for _ in 0..20 {
            let v = random_vector(&mut r, 4);
            let lhs = mn.apply(&v).unwrap();
            let rhs = m.apply(&n.apply(&v).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn adjoint_satisfies_real_pairing() {
        let mut r = rng(15);
        for _ in 0..50 {
            let m = random_op(&mut r, 4);
            let u = random_vector(&mut r, 4);
            let v = random_vector(&mut r, 4);
            let lhs = real_inner(&m.adjoint().apply(&u).unwrap(), &v);
            let rhs = real_inner(&u, &m.apply(&v).unwrap());
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_is_involutive() {
        let mut r = rng(16);
        let m = random_op(&mut r, 6);
        assert!(m.adjoint().adjoint().max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn adjoint_reverses_products() {
        let mut r = rng(17);
        let m = random_op(&mut r, 3);
        let n = random_op(&mut r, 3);
        let lhs = m.compose(&n).unwrap().adjoint();
        let rhs = n.adjoint().compose(&m.adjoint()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn adjoint_scalar_rule() {
        let mut r = rng(18);
        let m = random_op(&mut r, 3);
        let z = c(0.7, -1.3);
        let scalar = RealLinearOp::scalar(3, z);
        let lhs = m.compose(&scalar).unwrap().adjoint();
        let rhs = RealLinearOp::scalar(3, z.conj())
            .compose(&m.adjoint())
            .unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-13);
        assert!(m.scale_right(z).max_abs_diff(&m.compose(&scalar).unwrap()) < 1e-13);
    }

    #[test]
    fn real_trace_is_cyclic() {
        let mut r = rng(19);
        for _ in 0..30 {
            let m = random_op(&mut r, 4);
            let n = random_op(&mut r, 4);
            let lhs = m.compose(&n).unwrap().real_trace();
            let rhs = n.compose(&m).unwrap().real_trace();
            assert!((lhs - rhs).abs() < 1e-11);
        }
    }

    #[test]
    fn conjugation_squares_to_identity_and_is_self_adjoint() {
        let k = RealLinearOp::conjugation(4);
        let id = RealLinearOp::identity(4);
        assert!(k.compose(&k).unwrap().max_abs_diff(&id) < 1e-15);
        assert!(k.adjoint().max_abs_diff(&k) < 1e-15);
    }

    #[test]
    fn conjugation_anticommutes_with_i() {
        let k = RealLinearOp::conjugation(3);
        let i_op = RealLinearOp::scalar(3, Complex64::I);
        let ki = k.compose(&i_op).unwrap();
        let ik = i_op.compose(&k).unwrap();
        assert!(ki.max_abs_diff(&ik.scale_real(-1.0)) < 1e-15);
    }

    #[test]
    fn inner_reconstruction_from_real_parts() {
        let mut r = rng(20);
        for _ in 0..30 {
            let u = random_vector(&mut r, 5);
            let v = random_vector(&mut r, 5);
            assert!((inner_from_real_parts(&u, &v) - u.inner(&v)).norm() < 1e-13);
        }
    }

    #[test]
    fn adjoint_pairing_reconstructs_inner_product() {
        let mut r = rng(21);
        for _ in 0..30 {
            let n = random_op(&mut r, 4);
            let psi = random_vector(&mut r, 4);
            let phi = random_vector(&mut r, 4);
            let lhs = adjoint_pairing(&n, &psi, &phi).unwrap();
            let rhs = n.apply(&psi).unwrap().inner(&phi);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn try_into_matrix_rejects_antilinear_remnants() {
        let k = RealLinearOp::conjugation(2);
        assert!(k.clone().try_into_matrix(1e-9).is_err());
        let m = RealLinearOp::from_linear(ComplexMatrix::identity(2)).unwrap();
        assert!(m.try_into_matrix(1e-9).is_ok());
    }

    #[test]
    fn wire_roundtrip() {
        let mut r = rng(22);
        let m = random_op(&mut r, 3);
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"dim\":3"));
        let back: RealLinearOp = serde_json::from_str(&json).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-15);
    }
}
