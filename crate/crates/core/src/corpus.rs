//! Seeded random instances for the cross-oracle campaigns.
//!
//! Generators keep the instances inside the regime where floating-point
//! rank decisions are trustworthy: transforms have condition number at most
//! 100, distinct eigenvalues are well separated, and defective blocks are
//! either scrambled at moderate size or left in triangular form.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::kronecker::{assemble, scramble, JordanBlock, KroneckerStructure, MinimalIndex};
use crate::linalg::CMatrix;
use crate::pencil::Pencil;
use crate::random::{gaussian, random_unitary, rng, well_conditioned, SeededRng};
use crate::C64;

/// Jordan eigenvalue palette, pairwise at distance at least 1.
const PALETTE: [(f64, f64); 8] = [
    (0.5, 0.0),
    (-1.0, 0.0),
    (0.0, 2.0),
    (1.5, 1.0),
    (-1.5, -0.5),
    (0.0, 0.0),
    (3.0, 0.0),
    (1.0, -2.0),
];

fn push_index(list: &mut Vec<MinimalIndex>, index: usize) {
    match list.iter_mut().find(|m| m.index == index) {
        Some(m) => m.multiplicity += 1,
        None => list.push(MinimalIndex { index, multiplicity: 1 }),
    }
}

/// Random Kronecker structure with at most `max_dim` rows and columns.
pub fn random_structure(r: &mut SeededRng, max_dim: usize) -> KroneckerStructure {
    loop {
        let mut s = KroneckerStructure::default();
        for _ in 0..r.random_range(0..=2) {
            push_index(&mut s.col_minimal, r.random_range(0..=3));
        }
        for _ in 0..r.random_range(0..=2) {
            push_index(&mut s.row_minimal, r.random_range(0..=3));
        }
        let mut last: Option<C64> = None;
        for _ in 0..r.random_range(0..=3) {
            let eigenvalue = match last {
                Some(z) if r.random_bool(0.3) => z,
                _ => {
                    let &(re, im) = PALETTE.choose(r).expect("palette is non-empty");
                    C64::new(re, im)
                }
            };
            last = Some(eigenvalue);
            s.jordan.push(JordanBlock {
                size: r.random_range(1..=3),
                eigenvalue,
            });
        }
        for _ in 0..r.random_range(0..=2) {
            s.nilpotent.push(r.random_range(1..=3));
        }
        let (rows, cols) = (s.rows(), s.cols());
        if rows >= 1 && cols >= 1 && rows <= max_dim && cols <= max_dim {
            return s.canonical();
        }
    }
}

/// Random square structure made only of minimal-index blocks, hence singular.
pub fn random_singular_structure(r: &mut SeededRng, max_dim: usize) -> KroneckerStructure {
    loop {
        let mut s = random_structure(r, max_dim);
        // Balance the block counts so the pencil is square, then top up the
        // regular part if needed.
        let lc = s.col_block_count();
        let rc = s.row_block_count();
        if lc == 0 && rc == 0 {
            continue;
        }
        let rows = s.rows();
        let cols = s.cols();
        if rows != cols {
            continue;
        }
        if r.random_bool(0.5) {
            s.jordan.clear();
            s.nilpotent.clear();
            if s.rows() != s.cols() || s.rows() == 0 {
                continue;
            }
        }
        return s.canonical();
    }
}

/// A scrambled singular pencil with its generating structure.
pub fn singular_pencil(seed: u64, max_dim: usize) -> (Pencil, KroneckerStructure) {
    let mut r = rng(seed);
    let s = random_singular_structure(&mut r, max_dim);
    let (p, _) = scramble(&assemble(&s), r.random());
    (p, s)
}

fn random_poly(r: &mut SeededRng) -> Vec<C64> {
    let deg = r.random_range(1..=3);
    let mut c: Vec<C64> = (0..=deg).map(|_| gaussian(r) * 0.5).collect();
    if c[deg].norm() < 0.2 {
        c[deg] = C64::new(0.5, 0.0);
    }
    c
}

fn poly_eval(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &k| acc * z + k)
}

/// Separated random points in the disc of radius 2.
fn separated_points(r: &mut SeededRng, n: usize, gap: f64) -> Vec<C64> {
    let mut pts: Vec<C64> = Vec::with_capacity(n);
    while pts.len() < n {
        let z = C64::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        if pts.iter().all(|p| (p - z).norm() >= gap) {
            pts.push(z);
        }
    }
    pts
}

/// Minimum distance between distinct values, ignoring exact repeats.
fn min_gap(values: &[C64]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let d = (values[i] - values[j]).norm();
            if d > 1e-12 {
                g = g.min(d);
            }
        }
    }
    g
}

/// Diagonalisable `M = X D X^-1` with `cond(X) <= 10` and random
/// polynomials `p`, `q`; the pair is `(p(M), q(M)) = (X p(D) X^-1, X q(D) X^-1)`.
struct PolyPair {
    x: CMatrix,
    xinv: CMatrix,
    pa: Vec<C64>,
    qb: Vec<C64>,
}

impl PolyPair {
    fn sample(r: &mut SeededRng, n: usize) -> PolyPair {
        loop {
            let mut d = separated_points(r, n, 0.3);
            if n >= 2 && r.random_bool(0.3) {
                d[n - 1] = d[0];
            }
            let p = random_poly(r);
            let q = random_poly(r);
            let pa: Vec<C64> = d.iter().map(|&z| poly_eval(&p, z)).collect();
            let qb: Vec<C64> = d.iter().map(|&z| poly_eval(&q, z)).collect();
            if min_gap(&pa) < 1e-2 || min_gap(&qb) < 1e-2 {
                continue;
            }
            let (x, xinv) = well_conditioned(n, 10.0, r);
            return PolyPair { x, xinv, pa, qb };
        }
    }

    /// The pair shifted by `(z1, z2)`, built from the diagonal so that a
    /// repeated eigenvalue shifts to an exact zero.
    fn build(&self, z1: C64, z2: C64) -> (CMatrix, CMatrix, Vec<(C64, C64)>) {
        let da: Vec<C64> = self.pa.iter().map(|&v| v - z1).collect();
        let db: Vec<C64> = self.qb.iter().map(|&v| v - z2).collect();
        let conj = |d: &[C64]| {
            if d.iter().all(|v| *v == C64::new(0.0, 0.0)) {
                CMatrix::zeros(d.len(), d.len())
            } else {
                self.x.matmul(&CMatrix::diag(d)).matmul(&self.xinv)
            }
        };
        let joint = da.iter().copied().zip(db.iter().copied()).collect();
        (conj(&da), conj(&db), joint)
    }
}

fn poly_pair(r: &mut SeededRng, n: usize) -> (CMatrix, CMatrix, Vec<(C64, C64)>) {
    PolyPair::sample(r, n).build(C64::new(0.0, 0.0), C64::new(0.0, 0.0))
}

/// Shapes of commuting pairs produced by [`commuting_pair`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Polynomial,
    ShiftedPolynomial,
    BlockDiagonal,
}

/// A seeded commuting pair.
#[derive(Clone, Debug)]
pub struct CommutingPair {
    pub a: CMatrix,
    pub b: CMatrix,
    pub kind: PairKind,
    /// Joint eigenvalues by construction, with repeats.
    pub joint: Vec<(C64, C64)>,
}

fn nilpotent_shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Small commuting block: scalar, triangular nilpotent pair, or polynomial pair.
fn small_block(r: &mut SeededRng, n: usize) -> (CMatrix, CMatrix, Vec<(C64, C64)>) {
    match r.random_range(0..4) {
        0 => {
            let &(ar, ai) = PALETTE.choose(r).expect("palette");
            let &(br, bi) = PALETTE.choose(r).expect("palette");
            let (a, b) = (C64::new(ar, ai), C64::new(br, bi));
            (
                CMatrix::identity(n).scale(a),
                CMatrix::identity(n).scale(b),
                vec![(a, b); n],
            )
        }
        1 => {
            let nn = nilpotent_shift(n);
            let b = match r.random_range(0..3) {
                0 => nn.matmul(&nn),
                1 => nn.scale_re(2.0),
                _ => CMatrix::zeros(n, n),
            };
            let zero = C64::new(0.0, 0.0);
            (nn, b, vec![(zero, zero); n])
        }
        2 => {
            let nn = nilpotent_shift(n);
            let s = C64::new(1.0, 1.0);
            (
                CMatrix::identity(n).scale(s),
                nn.clone(),
                vec![(s, C64::new(0.0, 0.0)); n],
            )
        }
        _ => poly_pair(r, n),
    }
}

/// A seeded commuting pair of size at most `max_n`.
pub fn commuting_pair(seed: u64, max_n: usize) -> CommutingPair {
    let mut r = rng(seed);
    let kind = match r.random_range(0..10) {
        0..=4 => PairKind::Polynomial,
        5..=6 => PairKind::ShiftedPolynomial,
        _ => PairKind::BlockDiagonal,
    };
    match kind {
        PairKind::Polynomial | PairKind::ShiftedPolynomial => {
            let n = r.random_range(2..=max_n);
            let pp = PolyPair::sample(&mut r, n);
            let (a, b, joint) = if kind == PairKind::ShiftedPolynomial {
                pp.build(pp.pa[0], pp.qb[0])
            } else {
                pp.build(C64::new(0.0, 0.0), C64::new(0.0, 0.0))
            };
            CommutingPair { a, b, kind, joint }
        }
        PairKind::BlockDiagonal => {
            let mut a = CMatrix::zeros(0, 0);
            let mut b = CMatrix::zeros(0, 0);
            let mut joint = Vec::new();
            let blocks = r.random_range(2..=3);
            for _ in 0..blocks {
                let room = max_n.saturating_sub(a.rows());
                if room == 0 {
                    break;
                }
                let k = r.random_range(1..=room.min(4));
                let (ba, bb, bj) = small_block(&mut r, k);
                a = a.direct_sum(&ba);
                b = b.direct_sum(&bb);
                joint.extend(bj);
            }
            CommutingPair { a, b, kind, joint }
        }
    }
}

/// Simultaneously unitarily diagonalisable pair `(U D1 U^H, U D2 U^H)`.
pub fn doubly_commuting_pair(seed: u64, n: usize) -> (CMatrix, CMatrix, Vec<(C64, C64)>) {
    let mut r = rng(seed);
    let u = random_unitary(n, &mut r);
    let d1: Vec<C64> = (0..n).map(|_| gaussian(&mut r)).collect();
    let d2: Vec<C64> = (0..n).map(|_| gaussian(&mut r)).collect();
    let a = u.matmul(&CMatrix::diag(&d1)).matmul(&u.adjoint());
    let b = u.matmul(&CMatrix::diag(&d2)).matmul(&u.adjoint());
    (a, b, d1.into_iter().zip(d2).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structures_fit() {
        let mut r = rng(1);
        for _ in 0..200 {
            let s = random_structure(&mut r, 12);
            assert!(s.rows() <= 12 && s.cols() <= 12 && s.rows() >= 1 && s.cols() >= 1);
        }
    }

    #[test]
    fn pairs_commute() {
        for seed in 0..50 {
            let p = commuting_pair(seed, 8);
            let c = p.a.commutator(&p.b).norm_fro();
            let scale = p.a.norm_fro() * p.b.norm_fro();
            assert!(c <= 1e-12 * scale.max(1.0), "seed {seed}: {c}");
            assert_eq!(p.joint.len(), p.a.rows());
        }
    }

    #[test]
    fn singular_structures_are_square() {
        let mut r = rng(2);
        for _ in 0..100 {
            let s = random_singular_structure(&mut r, 12);
            assert_eq!(s.rows(), s.cols());
            assert!(s.has_minimal_blocks());
        }
    }
}
