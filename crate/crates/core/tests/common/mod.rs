#![allow(dead_code)]

use avme_core::instances::GaveInstance;
use avme_core::matcore::invert;
use avme_core::{Matrix, Vector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn matrix(rows: usize, cols: usize, lo: f64, hi: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(lo..hi, rows * cols).prop_map(move |d| Matrix::from_vec(rows, cols, d).unwrap())
}

pub fn square(n: usize) -> impl Strategy<Value = Matrix> {
    matrix(n, n, -1.0, 1.0)
}

/// Square matrix of random order in `1..=max_n`.
pub fn any_square(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(square)
}

pub fn pair(max_n: usize) -> impl Strategy<Value = (Matrix, Matrix)> {
    (1..=max_n).prop_flat_map(|n| (square(n), square(n)))
}

pub fn vector(n: usize, scale: f64) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-scale..scale, n).prop_map(|v| Vector::new(v).unwrap())
}

pub fn well_conditioned(m: &Matrix) -> bool {
    invert(m).is_ok_and(|inv| inv.rcond > 1e-6)
}

pub fn gave(a: &Matrix, b: &Matrix, f: Vector) -> GaveInstance {
    GaveInstance::new(a.clone(), b.clone(), Some(f)).unwrap()
}

/// Seeded draws for loops outside proptest.
pub struct Draws(pub ChaCha8Rng);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Draws(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0.random_range(-1.0..1.0)
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| self.next_f64())
    }

    pub fn vector(&mut self, n: usize, scale: f64) -> Vector {
        Vector::new((0..n).map(|_| scale * self.next_f64()).collect()).unwrap()
    }
}
