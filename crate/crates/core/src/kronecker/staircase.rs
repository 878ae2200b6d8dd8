//! Kronecker structure from Wong sequences.
//!
//! For a pencil `A0 + t B0`, the sequence `W_0 = 0`,
//! `W_{j+1} = { x : A0 x in B0 W_j }` grows by one dimension per block and
//! step until the chains are exhausted:
//!
//! * at a point off the spectrum only `L_eps` blocks contribute, each adding
//!   `min(j, eps + 1)` to `dim W_j`;
//! * at a finite eigenvalue the Jordan blocks for it (and the `L` blocks) do
//!   the same with their sizes;
//! * with the roles of `A` and `B` swapped, at zero, the nilpotent blocks do.
//!
//! The column minimal indices come from the sequence at a random point of a
//! unitarily mixed pencil. Their deflating subspace is split off, the row
//! minimal indices follow from the transpose, and the regular remainder is
//! split into its infinite and finite parts the same way.

use crate::error::{Error, Result};
use crate::kronecker::structure::{JordanBlock, KroneckerStructure, MinimalIndex};
use crate::linalg::{
    cluster_multiplicity_aware, eigenvalues_raw, null_space_against, orth_complement, range_basis_against,
    rank_decision_against, solve, CMatrix, RankDecision, ToleranceConfig,
};
use crate::pencil::Pencil;
use crate::random::{derive_seed, rng};
use crate::C64;

use rand::Rng;

const MIXING_ATTEMPTS: u64 = 4;
const VALIDATION_SLACK: f64 = 1e3;

/// Closest call among the rank decisions of one run.
#[derive(Default, Clone, Copy)]
struct Tracker {
    worst: Option<(f64, f64, f64)>,
}

impl Tracker {
    fn note(&mut self, d: &RankDecision) {
        if let Some(s) = d.nearest {
            let m = d.margin_decades();
            if self.worst.is_none_or(|w| m < w.0) {
                self.worst = Some((m, s, d.threshold));
            }
        }
    }

    fn absorb(&mut self, other: Tracker) {
        if let Some(w) = other.worst {
            if self.worst.is_none_or(|v| w.0 < v.0) {
                self.worst = Some(w);
            }
        }
    }

    fn ambiguous(&self) -> bool {
        self.worst.is_some_and(|w| w.0 < 1.0)
    }

    fn error(&self) -> Error {
        let (_, singular_value, threshold) = self.worst.unwrap_or((0.0, 0.0, 0.0));
        Error::RankDecisionUnstable {
            singular_value,
            threshold,
        }
    }
}

/// Dimensions `dim W_1, dim W_2, ...` up to the first repeat, and an
/// orthonormal basis of the limit.
fn wong(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig, tr: &mut Tracker) -> Result<(Vec<usize>, CMatrix)> {
    let (m, n) = a.shape();
    let mut q = CMatrix::zeros(n, 0);
    let mut dims = Vec::new();
    let reference = a.norm_fro().max(b.norm_fro());
    while q.cols() < n {
        let img = if q.cols() == 0 {
            CMatrix::zeros(m, 0)
        } else {
            let (r, d) = range_basis_against(&b.matmul(&q), tol, reference)?;
            tr.note(&d);
            r
        };
        let stacked = a.hstack(&(-&img));
        let (ns, d) = null_space_against(&stacked, tol, reference.max(img.norm_fro()))?;
        tr.note(&d);
        let x = ns.submatrix(0, n, 0, ns.cols());
        let (next, _) = range_basis_against(&x, tol, 1.0)?;
        if next.cols() <= q.cols() {
            break;
        }
        dims.push(next.cols());
        q = next;
    }
    Ok((dims, q))
}

/// Chain lengths from Wong dimensions: `(length, count)` with count > 0.
fn chain_lengths(dims: &[usize]) -> Result<Vec<(usize, usize)>> {
    let mut inc: Vec<usize> = Vec::with_capacity(dims.len() + 1);
    let mut prev = 0;
    for &d in dims {
        inc.push(d - prev);
        prev = d;
    }
    inc.push(0);
    let mut out = Vec::new();
    for j in 0..dims.len() {
        if inc[j] < inc[j + 1] {
            return Err(Error::StructureMismatch(format!(
                "Wong dimensions {dims:?} do not describe a chain structure"
            )));
        }
        let count = inc[j] - inc[j + 1];
        if count > 0 {
            out.push((j + 1, count));
        }
    }
    Ok(out)
}

/// Compress away the deflating subspace `w` (columns) together with its image
/// `A w + B w` (rows), which must have dimension `expected`.
fn deflate(
    a: &CMatrix,
    b: &CMatrix,
    w: &CMatrix,
    expected: usize,
    tol: &ToleranceConfig,
    tr: &mut Tracker,
) -> Result<(CMatrix, CMatrix)> {
    let img = a.matmul(w).hstack(&b.matmul(w));
    let (z, d) = range_basis_against(&img, tol, a.norm_fro().max(b.norm_fro()))?;
    tr.note(&d);
    if z.cols() != expected {
        return Err(Error::StructureMismatch(format!(
            "deflating subspace of dimension {} maps onto {} rows, expected {expected}",
            w.cols(),
            z.cols()
        )));
    }
    let y = orth_complement(&z)?.adjoint();
    let v = orth_complement(w)?;
    Ok((y.matmul(a).matmul(&v), y.matmul(b).matmul(&v)))
}

struct Mixing {
    c: f64,
    s: C64,
}

impl Mixing {
    fn apply(&self, a: &CMatrix, b: &CMatrix) -> (CMatrix, CMatrix) {
        let a0 = &a.scale_re(self.c) + &b.scale(self.s);
        let b0 = &b.scale_re(self.c) - &a.scale(self.s.conj());
        (a0, b0)
    }
}

/// Column minimal indices of `(a, b)` and the pencil with them removed.
fn split_right_singular(
    a: &CMatrix,
    b: &CMatrix,
    mix: &Mixing,
    tol: &ToleranceConfig,
    tr: &mut Tracker,
) -> Result<(Vec<MinimalIndex>, CMatrix, CMatrix)> {
    let (a0, b0) = mix.apply(a, b);
    let (dims, w) = wong(&a0, &b0, tol, tr)?;
    let indices: Vec<MinimalIndex> = chain_lengths(&dims)?
        .into_iter()
        .map(|(len, count)| MinimalIndex {
            index: len - 1,
            multiplicity: count,
        })
        .collect();
    if w.cols() == 0 {
        return Ok((indices, a.clone(), b.clone()));
    }
    let blocks: usize = indices.iter().map(|m| m.multiplicity).sum();
    let (a2, b2) = deflate(a, b, &w, w.cols() - blocks, tol, tr)?;
    Ok((indices, a2, b2))
}

/// Nilpotent block sizes and `(size, eigenvalue)` Jordan blocks.
type Regular = (Vec<usize>, Vec<(usize, C64)>);

struct Parts {
    col_minimal: Vec<MinimalIndex>,
    row_minimal: Vec<MinimalIndex>,
    regular: Option<Regular>,
}

fn attempt(
    a: &CMatrix,
    b: &CMatrix,
    mix: &Mixing,
    tol: &ToleranceConfig,
    with_regular: bool,
    tr: &mut Tracker,
) -> Result<Parts> {
    let (col_minimal, a1, b1) = split_right_singular(a, b, mix, tol, tr)?;
    let (row_minimal, at, bt) = split_right_singular(&a1.transpose(), &b1.transpose(), mix, tol, tr)?;
    if !with_regular {
        return Ok(Parts {
            col_minimal,
            row_minimal,
            regular: None,
        });
    }
    let (ar, br) = (at.transpose(), bt.transpose());
    if !ar.is_square() {
        return Err(Error::StructureMismatch(format!(
            "regular part has shape {}x{}",
            ar.rows(),
            ar.cols()
        )));
    }
    // Infinite eigenvalues: chains of B with A playing the shift role.
    let (dims, w) = wong(&br, &ar, tol, tr)?;
    let mut nilpotent = Vec::new();
    for (len, count) in chain_lengths(&dims)? {
        nilpotent.extend(std::iter::repeat_n(len, count));
    }
    let (af, bf) = if w.cols() > 0 {
        deflate(&ar, &br, &w, w.cols(), tol, tr)?
    } else {
        (ar, br)
    };
    let jordan = finite_part(&af, &bf, tol, tr)?;
    Ok(Parts {
        col_minimal,
        row_minimal,
        regular: Some((nilpotent, jordan)),
    })
}

/// Jordan chains `(size, pencil eigenvalue)` of a square pencil with invertible `b`.
fn finite_part(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig, tr: &mut Tracker) -> Result<Vec<(usize, C64)>> {
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let reference = a.norm_fro().max(b.norm_fro());
    let d = rank_decision_against(b, tol, reference)?;
    tr.note(&d);
    if d.rank < n {
        return Err(Error::StructureMismatch(
            "finite part still has eigenvalues at infinity".into(),
        ));
    }
    let c = -&solve(b, a)?;
    let raw = eigenvalues_raw(&c)?;
    let scale = raw.iter().map(|z| z.norm()).fold(1.0, f64::max);
    // The cluster mean of a defective eigenvalue is only accurate to about
    // eps * cond, so chains are validated against a looser threshold.
    let at_eigenvalue = ToleranceConfig {
        rank_rel_tol: tol.rank_rel_tol * VALIDATION_SLACK,
        ..*tol
    };
    let mut last = String::new();
    for widen in [1e4, 1e8, 1e12] {
        let clusters = cluster_multiplicity_aware(&raw, tol.eig_cluster_tol, widen * n as f64, scale);
        let mut local = Tracker::default();
        let mut blocks = Vec::new();
        let mut consistent = true;
        for cl in &clusters {
            let a0 = a + &b.scale(cl.value);
            let (dims, _) = wong(&a0, b, &at_eigenvalue, &mut local)?;
            let total = dims.last().copied().unwrap_or(0);
            if total != cl.multiplicity {
                last = format!(
                    "eigenvalue {:.6e}{:+.6e}i: cluster of {} but {} Jordan chain vectors",
                    cl.value.re, cl.value.im, cl.multiplicity, total
                );
                consistent = false;
                break;
            }
            for (len, count) in chain_lengths(&dims)? {
                blocks.extend(std::iter::repeat_n((len, cl.value), count));
            }
        }
        if consistent {
            tr.absorb(local);
            return Ok(blocks);
        }
    }
    Err(Error::StructureMismatch(last))
}

fn coefficient_scale(m: &CMatrix) -> f64 {
    let f = m.norm_fro();
    if f > 0.0 {
        f
    } else {
        1.0
    }
}

fn run(p: &Pencil, tol: &ToleranceConfig, with_regular: bool) -> Result<KroneckerStructure> {
    if !p.a.is_finite() || !p.b.is_finite() {
        return Err(Error::Parse("pencil has non-finite entries".into()));
    }
    let alpha = coefficient_scale(&p.a);
    let beta = coefficient_scale(&p.b);
    let a = p.a.scale_re(1.0 / alpha);
    let b = p.b.scale_re(1.0 / beta);
    let mut last_err = None;
    for k in 0..MIXING_ATTEMPTS {
        let mut r = rng(derive_seed(tol.seed, k));
        let c: f64 = r.random_range(0.35..0.9);
        let phase: f64 = r.random_range(0.0..std::f64::consts::TAU);
        let mix = Mixing {
            c,
            s: C64::from_polar((1.0 - c * c).sqrt(), phase),
        };
        let mut tr = Tracker::default();
        match attempt(&a, &b, &mix, tol, with_regular, &mut tr) {
            Ok(parts) if !tr.ambiguous() => {
                let (nilpotent, jordan) = parts.regular.unwrap_or_default();
                let s = KroneckerStructure {
                    col_minimal: parts.col_minimal,
                    row_minimal: parts.row_minimal,
                    // Undo the coefficient scaling: lambda = lambda' alpha / beta,
                    // and the block parameter is minus the pencil eigenvalue.
                    jordan: jordan
                        .into_iter()
                        .map(|(size, mu)| JordanBlock {
                            size,
                            eigenvalue: -mu * (alpha / beta),
                        })
                        .collect(),
                    nilpotent,
                };
                return Ok(s.canonical());
            }
            Ok(_) => last_err = Some(tr.error()),
            Err(e @ Error::StructureMismatch(_)) => last_err = Some(if tr.ambiguous() { tr.error() } else { e }),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt ran"))
}

/// Kronecker structure (minimal indices, Jordan and nilpotent blocks).
pub fn staircase_structure(p: &Pencil, tol: &ToleranceConfig) -> Result<KroneckerStructure> {
    run(p, tol, true)
}

/// Only the minimal indices; the regular part is left empty.
pub fn minimal_indices(p: &Pencil, tol: &ToleranceConfig) -> Result<KroneckerStructure> {
    run(p, tol, false)
}
