use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::spectrum::cmp_c64;
use crate::linalg::CMatrix;
use crate::pencil::Pencil;
use crate::C64;

/// A minimal index together with the number of blocks carrying it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalIndex {
    pub index: usize,
    pub multiplicity: usize,
}

/// Jordan block `J_size(eigenvalue) + lambda I`; its pencil eigenvalue is `-eigenvalue`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanBlock {
    pub size: usize,
    pub eigenvalue: C64,
}

/// Multiset description of a Kronecker canonical form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KroneckerStructure {
    /// `L_eps` blocks (`eps x (eps + 1)`).
    pub col_minimal: Vec<MinimalIndex>,
    /// `L_delta^T` blocks (`(delta + 1) x delta`).
    pub row_minimal: Vec<MinimalIndex>,
    pub jordan: Vec<JordanBlock>,
    pub nilpotent: Vec<usize>,
}

/// The block families of the canonical form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BlockKind {
    L,
    LTranspose,
    Jordan(C64),
    Nilpotent,
}

/// Left and right transforms with `S (A' + lambda B') T = (A + lambda B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalencePair {
    pub s: CMatrix,
    pub t: CMatrix,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// The exact `(A, B)` pair of one canonical block.
pub fn build_block(kind: BlockKind, size: usize) -> Pencil {
    let (a, b) = match kind {
        BlockKind::L => {
            let mut a = CMatrix::zeros(size, size + 1);
            let mut b = CMatrix::zeros(size, size + 1);
            for i in 0..size {
                a[(i, i + 1)] = one();
                b[(i, i)] = one();
            }
            (a, b)
        }
        BlockKind::LTranspose => {
            let l = build_block(BlockKind::L, size);
            (l.a.transpose(), l.b.transpose())
        }
        BlockKind::Jordan(lambda) => {
            assert!(size >= 1, "Jordan blocks have size at least 1");
            let mut a = CMatrix::zeros(size, size);
            for i in 0..size {
                a[(i, i)] = lambda;
                if i + 1 < size {
                    a[(i, i + 1)] = one();
                }
            }
            (a, CMatrix::identity(size))
        }
        BlockKind::Nilpotent => {
            assert!(size >= 1, "nilpotent blocks have size at least 1");
            let mut b = CMatrix::zeros(size, size);
            for i in 0..size.saturating_sub(1) {
                b[(i, i + 1)] = one();
            }
            (CMatrix::identity(size), b)
        }
    };
    Pencil { a, b }
}

fn merge(list: &[MinimalIndex]) -> Vec<MinimalIndex> {
    let mut out: Vec<MinimalIndex> = Vec::new();
    let mut sorted = list.to_vec();
    sorted.sort_by_key(|m| m.index);
    for m in sorted {
        if m.multiplicity == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.index == m.index => last.multiplicity += m.multiplicity,
            _ => out.push(m),
        }
    }
    out
}

impl KroneckerStructure {
    pub fn rows(&self) -> usize {
        self.col_minimal.iter().map(|m| m.index * m.multiplicity).sum::<usize>()
            + self
                .row_minimal
                .iter()
                .map(|m| (m.index + 1) * m.multiplicity)
                .sum::<usize>()
            + self.regular_size()
    }

    pub fn cols(&self) -> usize {
        self.col_minimal
            .iter()
            .map(|m| (m.index + 1) * m.multiplicity)
            .sum::<usize>()
            + self.row_minimal.iter().map(|m| m.index * m.multiplicity).sum::<usize>()
            + self.regular_size()
    }

    pub fn regular_size(&self) -> usize {
        self.jordan.iter().map(|j| j.size).sum::<usize>() + self.nilpotent.iter().sum::<usize>()
    }

    pub fn col_block_count(&self) -> usize {
        self.col_minimal.iter().map(|m| m.multiplicity).sum()
    }

    pub fn row_block_count(&self) -> usize {
        self.row_minimal.iter().map(|m| m.multiplicity).sum()
    }

    pub fn has_minimal_blocks(&self) -> bool {
        self.col_block_count() + self.row_block_count() > 0
    }

    /// Sorted form with merged duplicate indices: minimal indices and
    /// nilpotent sizes ascend, Jordan blocks are ordered by eigenvalue then size.
    pub fn canonical(&self) -> KroneckerStructure {
        let mut jordan = self.jordan.clone();
        jordan.sort_by(|a, b| cmp_c64(&a.eigenvalue, &b.eigenvalue).then(a.size.cmp(&b.size)));
        let mut nilpotent = self.nilpotent.clone();
        nilpotent.sort_unstable();
        KroneckerStructure {
            col_minimal: merge(&self.col_minimal),
            row_minimal: merge(&self.row_minimal),
            jordan,
            nilpotent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.jordan.iter().any(|j| j.size == 0) || self.nilpotent.contains(&0) {
            return Err(Error::InvalidStructure(
                "Jordan and nilpotent sizes must be positive".into(),
            ));
        }
        if self
            .col_minimal
            .iter()
            .chain(&self.row_minimal)
            .any(|m| m.multiplicity == 0)
        {
            return Err(Error::InvalidStructure("multiplicities must be positive".into()));
        }
        if self
            .jordan
            .iter()
            .any(|j| !(j.eigenvalue.re.is_finite() && j.eigenvalue.im.is_finite()))
        {
            return Err(Error::InvalidStructure("Jordan eigenvalues must be finite".into()));
        }
        Ok(())
    }

    /// Equality up to `eig_tol` on Jordan eigenvalues; everything else exact.
    pub fn approx_eq(&self, other: &KroneckerStructure, eig_tol: f64) -> bool {
        let a = self.canonical();
        let b = other.canonical();
        if a.col_minimal != b.col_minimal
            || a.row_minimal != b.row_minimal
            || a.nilpotent != b.nilpotent
            || a.jordan.len() != b.jordan.len()
        {
            return false;
        }
        let mut used = vec![false; b.jordan.len()];
        for ja in &a.jordan {
            let hit = b.jordan.iter().enumerate().position(|(k, jb)| {
                !used[k] && jb.size == ja.size && (jb.eigenvalue - ja.eigenvalue).norm() <= eig_tol
            });
            match hit {
                Some(k) => used[k] = true,
                None => return false,
            }
        }
        true
    }
}

/// Block-diagonal pencil in the order `L^T` (ascending), `L` (ascending),
/// Jordan, nilpotent.
pub fn assemble(s: &KroneckerStructure) -> Pencil {
    let s = s.canonical();
    let (rows, cols) = (s.rows(), s.cols());
    let mut a = CMatrix::zeros(rows, cols);
    let mut b = CMatrix::zeros(rows, cols);
    let mut r = 0;
    let mut c = 0;
    let mut place = |blk: Pencil| {
        a.set_block(r, c, &blk.a);
        b.set_block(r, c, &blk.b);
        r += blk.a.rows();
        c += blk.a.cols();
    };
    for m in &s.row_minimal {
        for _ in 0..m.multiplicity {
            place(build_block(BlockKind::LTranspose, m.index));
        }
    }
    for m in &s.col_minimal {
        for _ in 0..m.multiplicity {
            place(build_block(BlockKind::L, m.index));
        }
    }
    for j in &s.jordan {
        place(build_block(BlockKind::Jordan(j.eigenvalue), j.size));
    }
    for &n in &s.nilpotent {
        place(build_block(BlockKind::Nilpotent, n));
    }
    Pencil { a, b }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(index: usize, multiplicity: usize) -> MinimalIndex {
        MinimalIndex { index, multiplicity }
    }

    #[test]
    fn block_shapes() {
        let l1 = build_block(BlockKind::L, 1);
        assert_eq!(l1.a, CMatrix::from_real(1, 2, &[0.0, 1.0]));
        assert_eq!(l1.b, CMatrix::from_real(1, 2, &[1.0, 0.0]));
        assert_eq!(build_block(BlockKind::L, 0).a.shape(), (0, 1));
        assert_eq!(build_block(BlockKind::LTranspose, 0).a.shape(), (1, 0));
        let j = build_block(BlockKind::Jordan(C64::new(5.0, 0.0)), 1);
        assert_eq!(j.a, CMatrix::from_real(1, 1, &[5.0]));
        assert_eq!(j.b, CMatrix::identity(1));
        let n = build_block(BlockKind::Nilpotent, 2);
        assert_eq!(n.a, CMatrix::identity(2));
        assert_eq!(n.b, CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn zero_pencil_from_degenerate_blocks() {
        let s = KroneckerStructure {
            row_minimal: vec![mi(0, 1)],
            col_minimal: vec![mi(0, 1)],
            ..Default::default()
        };
        let p = assemble(&s);
        assert_eq!(p.a, CMatrix::zeros(1, 1));
        assert_eq!(p.b, CMatrix::zeros(1, 1));
    }

    #[test]
    fn four_by_four_layout() {
        let s = KroneckerStructure {
            row_minimal: vec![mi(0, 1), mi(1, 1)],
            col_minimal: vec![mi(0, 1), mi(1, 1)],
            ..Default::default()
        };
        let p = assemble(&s);
        assert_eq!(p.a.shape(), (4, 4));
        // L_0^T is row 0, L_1^T rows 1..3 and column 0, L_0 column 1,
        // L_1 row 3 and columns 2..4.
        assert_eq!(p.b[(1, 0)], one());
        assert_eq!(p.a[(2, 0)], one());
        assert_eq!(p.a[(3, 3)], one());
        assert_eq!(p.b[(3, 2)], one());
        assert!((p.a.norm_fro().powi(2) + p.b.norm_fro().powi(2) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn approx_eq_ignores_order() {
        let a = KroneckerStructure {
            jordan: vec![
                JordanBlock {
                    size: 2,
                    eigenvalue: C64::new(1.0, 0.0),
                },
                JordanBlock {
                    size: 1,
                    eigenvalue: C64::new(-1.0, 0.0),
                },
            ],
            nilpotent: vec![2, 1],
            ..Default::default()
        };
        let mut b = a.clone();
        b.jordan.reverse();
        b.nilpotent.reverse();
        b.jordan[0].eigenvalue += C64::new(1e-9, 0.0);
        assert!(a.approx_eq(&b, 1e-6));
        assert!(!a.approx_eq(&b, 1e-12));
    }
}
