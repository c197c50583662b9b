//! Seeded draws shared by every instance generator.
//!
//! The stream is ChaCha20 keyed through `rand_core`'s `seed_from_u64`
//! (a PCG32 expansion of the 64-bit seed into the 256-bit key). Uniforms take
//! the top 53 bits of `next_u64`; normals use the cosine branch of Box–Muller
//! with `u₁ = 1 − uniform` so the logarithm never sees zero. Each normal
//! consumes exactly two words, which keeps reimplementations in lockstep.

use std::f64::consts::PI;

use hessdamp_core::{Matrix, Vector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub struct Rng(ChaCha20Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha20Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn normal_vector(&mut self, n: usize) -> Vector {
        Vector::from_fn(n, |_, _| self.normal())
    }

    /// Standard normal entries, filled row by row.
    pub fn normal_matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.normal();
            }
        }
        m
    }

    /// `k` distinct indices from `0..n` (partial Fisher–Yates), in draw order.
    pub fn choose(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + (self.next_u64() % (n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }

    /// `±1` with equal probability.
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}
