//! Seeded random sampling.
//!
//! All randomness flows from a `u64` seed through [`ChaCha20Rng`], which is
//! portable across platforms. Independent streams (e.g. one per search
//! restart) are derived with [`child_seed`]: the master seed and the stream
//! index are mixed with the SplitMix64 finalizer, so stream `i` never depends
//! on how many other streams exist.

use alloc::vec::Vec;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, c, CMatrix, CVector};

pub type Rng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `master`.
pub fn child_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian(rng: &mut Rng) -> linalg::C64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    c(x, y) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
    // fill row by row so the draw order is independent of storage layout
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        entries.push(complex_gaussian(rng));
    }
    CMatrix::from_row_slice(rows, cols, &entries)
}

pub fn gaussian_vector(rng: &mut Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn uniform(rng: &mut Rng) -> f64 {
    rng.random::<f64>()
}

/// Haar-random `d × d` unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary_with(rng: &mut Rng, d: usize) -> CMatrix {
    let g = gaussian_matrix(rng, d, d);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let diag = r[(j, j)];
        let norm = diag.norm();
        let phase = if norm > 0.0 { diag / norm } else { c(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn random_unitary(d: usize, seed: u64) -> CMatrix {
    random_unitary_with(&mut rng_from_seed(seed), d)
}

/// `n × k` matrix with orthonormal columns, Haar distributed.
pub fn random_isometry(rng: &mut Rng, n: usize, k: usize) -> CMatrix {
    let u = random_unitary_with(rng, n);
    u.columns(0, k.min(n)).into_owned()
}

/// Uniformly random unit vector.
pub fn random_unit_vector(rng: &mut Rng, n: usize) -> CVector {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}
