//! Dense complex matrices and vectors.
//!
//! Row-major storage, `f64` precision, dimensions small enough (≤ 64) that
//! clarity wins over clever blocking. All values are immutable once built, so
//! they can be shared freely across threads.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative gap below which adjacent eigenvalues are treated as degenerate
/// when ordering eigenvectors canonically.
pub fn default_cluster_tol(scale: f64) -> f64 {
    1e-8 * (1.0 + scale)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: k / cols,
                    col: k % cols,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Complex64::ONE)
    }

    /// z·I on an n-dimensional space.
    pub fn scalar(n: usize, z: Complex64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = z;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows of (re, im) pairs.
    pub fn from_rows(rows: &[Vec<(f64, f64)>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flatten()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect();
        Self::new(r, c, data)
    }

    /// Real matrix from nested `f64` rows; imaginary parts zero.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let pairs: Vec<Vec<(f64, f64)>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| (x, 0.0)).collect())
            .collect();
        Self::from_rows(&pairs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&w| w * z).collect(),
        }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry modulus; the norm used for all entrywise comparisons.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |A - A†|, zero for self-adjoint matrices.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_error() <= tol
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "mul {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self * other)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        if self.cols != v.dim() {
            return Err(Error::ShapeMismatch(format!(
                "apply {}x{} to vector of dim {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let mut out = vec![Complex64::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self.get(i, j) * v.get(j);
            }
            out[i] = acc;
        }
        Ok(Vector::from_vec(out))
    }

    /// Commutator [A, B] = AB - BA.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.checked_mul(other)? - &other.checked_mul(self)?)
    }

    /// Anticommutator {A, B} = AB + BA.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.checked_mul(other)? + &other.checked_mul(self)?)
    }

    /// 2x2 block matrix [[a, b], [c, d]]; all blocks n×n.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let n = a.rows;
        assert!([a, b, c, d]
            .iter()
            .all(|m| m.rows == n && m.cols == n && m.is_square()));
        Self::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => a.get(i, j),
            (true, false) => b.get(i, j - n),
            (false, true) => c.get(i - n, j),
            (false, false) => d.get(i - n, j - n),
        })
    }

    /// Extracts the block of shape `nr`×`nc` whose top-left corner is (r0, c0).
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols);
        Self::from_fn(nr, nc, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Eigendecomposition of a self-adjoint matrix with a deterministic
    /// convention: eigenvalues ascending; each eigenvector's first component
    /// of largest modulus made real positive; within near-degenerate
    /// clusters, eigenvectors ordered by the index of that component.
    ///
    /// The input is symmetrized as (A + A†)/2 before solving, so callers are
    /// responsible for any hermiticity precondition of their own.
    pub fn eigh(&self) -> Result<(Vec<f64>, Vec<Vector>)> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "eigh of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok((Vec::new(), Vec::new()));
        }
        let herm = DMatrix::from_fn(n, n, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        let eig = SymmetricEigen::new(herm);

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let mut pairs: Vec<(f64, Vector)> = order
            .into_iter()
            .map(|k| {
                let col: Vec<Complex64> = (0..n).map(|i| eig.eigenvectors[(i, k)]).collect();
                (eig.eigenvalues[k], canonical_phase(Vector::from_vec(col)))
            })
            .collect();

        // Reorder within degenerate clusters by pivot index so the output is
        // stable under solver-dependent orderings.
        let ctol = default_cluster_tol(self.max_abs());
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && pairs[end].0 - pairs[end - 1].0 <= ctol {
                end += 1;
            }
            pairs[start..end].sort_by_key(|(_, v)| pivot_index(v));
            start = end;
        }

        Ok(pairs.into_iter().unzip())
    }
}

/// Index of the first component of largest modulus.
fn pivot_index(v: &Vector) -> usize {
    let mut best = 0;
    let mut best_norm = 0.0;
    for (k, z) in v.entries().iter().enumerate() {
        let nz = z.norm();
        if nz > best_norm {
            best_norm = nz;
            best = k;
        }
    }
    best
}

/// Rotates a vector's global phase so its pivot component is real positive.
fn canonical_phase(v: Vector) -> Vector {
    let p = pivot_index(&v);
    let z = v.get(p);
    let r = z.norm();
    if r == 0.0 {
        return v;
    }
    v.scale(z.conj() / r)
}

/// exp(factor · H) for self-adjoint H, via the eigenbasis.
pub fn exp_hermitian(h: &ComplexMatrix, factor: Complex64) -> Result<ComplexMatrix> {
    let (vals, vecs) = h.eigh()?;
    let n = h.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (lambda, v) in vals.iter().zip(&vecs) {
        let phase = (factor * lambda).exp();
        out = &out + &v.outer(v).scale(phase);
    }
    Ok(out)
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-Complex64::ONE)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

/// Complex column vector.
#[derive(Clone, PartialEq)]
pub struct Vector {
    data: Vec<Complex64>,
}

impl Vector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: k, col: 0 });
            }
        }
        Ok(Self { data })
    }

    pub fn from_vec(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![Complex64::ZERO; dim],
        }
    }

    /// Computational basis vector e_k.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = Complex64::ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.data[k]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|&w| w * z).collect(),
        }
    }

    /// ⟨self, other⟩ = Σ conj(self_k)·other_k, linear in the second argument.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    /// Outer product self·other† (a rows(self) × rows(other) matrix).
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.get(i) * other.get(j).conj()
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vector [")?;
        for z in &self.data {
            write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
        }
        write!(f, "]")
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: Self) -> Vector {
        assert_eq!(self.dim(), rhs.dim());
        Vector {
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: Self) -> Vector {
        assert_eq!(self.dim(), rhs.dim());
        Vector {
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

// Wire format: {"rows": n, "cols": m, "data": [[re, im], ...]} row-major.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        let data = wire
            .data
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(wire.rows, wire.cols, data).map_err(D::Error::custom)
    }
}
