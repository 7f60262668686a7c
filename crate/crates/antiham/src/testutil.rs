//! Deterministic random inputs for unit tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{ComplexMatrix, Vector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(r: &mut impl Rng) -> Complex64 {
    Complex64::new(r.random::<f64>() * 2.0 - 1.0, r.random::<f64>() * 2.0 - 1.0)
}

pub fn random_matrix(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let data = (0..n * n).map(|_| random_complex(r)).collect();
    ComplexMatrix::new(n, n, data).unwrap()
}

pub fn random_hermitian(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(r, n);
    (&g + &g.dagger()).scale(Complex64::new(0.5, 0.0))
}

pub fn random_vector(r: &mut impl Rng, n: usize) -> Vector {
    Vector::from_vec((0..n).map(|_| random_complex(r)).collect())
}

pub fn random_unit_vector(r: &mut impl Rng, n: usize) -> Vector {
    random_vector(r, n).normalized()
}
