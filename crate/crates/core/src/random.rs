//! Seeded random matrices for scrambling and corpus generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{dot, vec_norm, CMatrix};
use crate::C64;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent seed for sub-task `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // SplitMix64 finaliser.
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian (unit variance in each of the real and imaginary parts).
pub fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Uniformly distributed unit vector.
pub fn unit_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v = gaussian_vector(n, rng);
        let nv = vec_norm(&v);
        if nv > 1e-8 {
            return v.into_iter().map(|z| z / nv).collect();
        }
    }
}

/// Haar-like random unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vector(n, rng);
        for _ in 0..2 {
            for c in &cols {
                let h = dot(c, &v);
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= h * ci;
                }
            }
        }
        let nv = vec_norm(&v);
        if nv > 1e-6 {
            cols.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    CMatrix::from_columns(n, &cols)
}

/// Random `U diag(s) V^H` with singular values log-uniform in
/// `[1/sqrt(cond), sqrt(cond)]`, returned together with its exact inverse.
pub fn well_conditioned<R: Rng>(n: usize, cond: f64, rng: &mut R) -> (CMatrix, CMatrix) {
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let half = cond.ln() / 2.0;
    let s: Vec<f64> = (0..n).map(|_| rng.random_range(-half..=half).exp()).collect();
    let d = CMatrix::diag(&s.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
    let dinv = CMatrix::diag(&s.iter().map(|&x| C64::new(1.0 / x, 0.0)).collect::<Vec<_>>());
    let m = u.matmul(&d).matmul(&v.adjoint());
    let minv = v.matmul(&dinv).matmul(&u.adjoint());
    (m, minv)
}
