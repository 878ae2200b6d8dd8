//! One-sided (Hestenes) Jacobi SVD.
//!
//! Columns are rotated pairwise until mutually orthogonal; the accumulated
//! rotations form `V` and the column norms are the singular values. The
//! method is slow compared to bidiagonalisation but delivers small singular
//! values to high relative accuracy, which is what the rank decisions need.

use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, vec_norm, CMatrix};
use crate::linalg::tolerance::ToleranceConfig;
use crate::C64;

const MAX_SWEEPS: usize = 60;

/// Thin singular value decomposition `M = U diag(sigma) V^H`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

/// Outcome of a numerical rank decision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankDecision {
    pub rank: usize,
    pub threshold: f64,
    /// Singular value closest to the threshold on a log scale, if any.
    pub nearest: Option<f64>,
}

impl RankDecision {
    /// True when some singular value lies within a factor 10 of the threshold.
    pub fn ambiguous(&self) -> bool {
        match self.nearest {
            Some(s) => s > self.threshold / 10.0 && s < self.threshold * 10.0,
            None => false,
        }
    }

    /// Distance of the nearest singular value from the threshold, in decades.
    pub fn margin_decades(&self) -> f64 {
        match self.nearest {
            Some(s) if s > 0.0 && self.threshold > 0.0 => (s / self.threshold).log10().abs(),
            _ => f64::INFINITY,
        }
    }
}

struct Jacobi {
    /// Rotated columns of the input, unsorted.
    w: Vec<Vec<C64>>,
    /// Accumulated right rotations, stored by column.
    v: Vec<Vec<C64>>,
}

fn jacobi(m: &CMatrix) -> Result<Jacobi> {
    let (rows, cols) = m.shape();
    let mut w: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..cols)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); cols];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let tol = f64::EPSILON * (rows.max(1) as f64);
    let mut norms: Vec<f64> = w.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();
    // Columns below this squared norm are zero to working precision; rotating
    // them only chases rounding noise.
    let negligible = norms.iter().sum::<f64>() * f64::EPSILON * f64::EPSILON;

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let g = dot(&w[p], &w[q]);
                let gabs = g.norm();
                if gabs <= tol * (alpha * beta).sqrt() || gabs < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phase = (g / gabs).conj();
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = w.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s, phase);
                let (lo, hi) = v.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s, phase);
                norms[p] = w[p].iter().map(|z| z.norm_sqr()).sum();
                norms[q] = w[q].iter().map(|z| z.norm_sqr()).sum();
            }
        }
        if !rotated {
            return Ok(Jacobi { w, v });
        }
    }
    Err(Error::NoConvergence {
        op: "jacobi svd",
        iterations: MAX_SWEEPS,
    })
}

#[inline]
fn rotate(xp: &mut [C64], xq: &mut [C64], c: f64, s: f64, phase: C64) {
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let bq = *b * phase;
        let ap = *a;
        *a = ap * c - bq * s;
        *b = ap * s + bq * c;
    }
}

/// Indices of the columns sorted by decreasing norm.
fn order(norms: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..norms.len()).collect();
    idx.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    idx
}

/// Thin SVD: `u` is `m x p`, `v` is `n x p` with `p = min(m, n)`.
pub fn svd(m: &CMatrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let jac = jacobi(m)?;
    let norms: Vec<f64> = jac.w.iter().map(|c| vec_norm(c)).collect();
    let idx = order(&norms);
    let p = cols;
    let sigma: Vec<f64> = idx.iter().map(|&j| norms[j]).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let tiny = smax * f64::EPSILON * (rows.max(cols) as f64);

    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(p);
    for (k, &j) in idx.iter().enumerate() {
        if sigma[k] > tiny && sigma[k] > 0.0 {
            let inv = 1.0 / sigma[k];
            ucols.push(jac.w[j].iter().map(|z| z * inv).collect());
        } else {
            ucols.push(complete_basis(&ucols, rows));
        }
    }
    let u = CMatrix::from_columns(rows, &ucols);
    let vcols: Vec<Vec<C64>> = idx.iter().map(|&j| jac.v[j].clone()).collect();
    let v = CMatrix::from_columns(cols, &vcols);
    Ok(Svd { u, sigma, v })
}

/// A unit vector orthogonal to every vector in `basis` (assumed orthonormal).
fn complete_basis(basis: &[Vec<C64>], n: usize) -> Vec<C64> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for e in 0..n {
        let mut x = vec![C64::new(0.0, 0.0); n];
        x[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in basis {
                let h = dot(b, &x);
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= h * bi;
                }
            }
        }
        let nx = vec_norm(&x);
        if nx > 0.5 {
            return x.iter().map(|z| z / nx).collect();
        }
        if best.as_ref().is_none_or(|(bn, _)| nx > *bn) {
            best = Some((nx, x));
        }
    }
    let (nx, x) = best.expect("complete_basis called with n = 0");
    x.iter().map(|z| z / nx).collect()
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let m = if m.rows() < m.cols() { m.adjoint() } else { m.clone() };
    let jac = jacobi(&m)?;
    let mut s: Vec<f64> = jac.w.iter().map(|c| vec_norm(c)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Spectral norm.
pub fn norm2(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

fn decide(sigma: &[f64], rows: usize, cols: usize, tol: &ToleranceConfig) -> RankDecision {
    let smax = sigma.first().copied().unwrap_or(0.0);
    decide_against(sigma, rows, cols, tol, smax)
}

/// Rank decision with the threshold measured against `reference` instead of
/// the largest singular value.
fn decide_against(sigma: &[f64], rows: usize, cols: usize, tol: &ToleranceConfig, reference: f64) -> RankDecision {
    if reference == 0.0 {
        return RankDecision {
            rank: 0,
            threshold: 0.0,
            nearest: None,
        };
    }
    let threshold = tol.rank_rel_tol * reference * rows.max(cols) as f64;
    let rank = sigma.iter().filter(|&&s| s > threshold).count();
    let nearest = sigma
        .iter()
        .copied()
        .filter(|&s| s > 0.0)
        .min_by(|a, b| (a / threshold).ln().abs().total_cmp(&(b / threshold).ln().abs()));
    RankDecision {
        rank,
        threshold,
        nearest,
    }
}

/// Rank decision with its margin information.
pub fn rank_decision(m: &CMatrix, tol: &ToleranceConfig) -> Result<RankDecision> {
    let s = singular_values(m)?;
    Ok(decide(&s, m.rows(), m.cols(), tol))
}

/// Rank decision with the threshold measured against `reference`.
pub fn rank_decision_against(m: &CMatrix, tol: &ToleranceConfig, reference: f64) -> Result<RankDecision> {
    let s = singular_values(m)?;
    Ok(decide_against(&s, m.rows(), m.cols(), tol, reference))
}

/// Rank decision against `max(sigma_1, floor)`: relative to the matrix
/// itself unless it is small compared with `floor`.
pub fn rank_decision_floor(m: &CMatrix, tol: &ToleranceConfig, floor: f64) -> Result<RankDecision> {
    let s = singular_values(m)?;
    let reference = s.first().copied().unwrap_or(0.0).max(floor);
    Ok(decide_against(&s, m.rows(), m.cols(), tol, reference))
}

/// Number of singular values above `rank_rel_tol * sigma_1 * max(m, n)`.
pub fn numerical_rank(m: &CMatrix, tol: &ToleranceConfig) -> Result<usize> {
    Ok(rank_decision(m, tol)?.rank)
}

/// Orthonormal basis of the numerical null space together with the rank decision.
pub fn null_space_with_decision(m: &CMatrix, tol: &ToleranceConfig) -> Result<(CMatrix, RankDecision)> {
    kernel(m, tol, None)
}

/// Null space with the rank threshold measured against `reference`.
pub fn null_space_against(m: &CMatrix, tol: &ToleranceConfig, reference: f64) -> Result<(CMatrix, RankDecision)> {
    kernel(m, tol, Some(reference))
}

fn kernel(m: &CMatrix, tol: &ToleranceConfig, reference: Option<f64>) -> Result<(CMatrix, RankDecision)> {
    let (rows, cols) = m.shape();
    let jac = jacobi(m)?;
    let norms: Vec<f64> = jac.w.iter().map(|c| vec_norm(c)).collect();
    let idx = order(&norms);
    let sigma: Vec<f64> = idx.iter().map(|&j| norms[j]).collect();
    // Only the first min(m, n) norms are singular values; the rest are zero
    // up to rounding and always belong to the kernel.
    let p = rows.min(cols);
    let decision = match reference {
        Some(r) => decide_against(&sigma[..p], rows, cols, tol, r),
        None => decide(&sigma[..p], rows, cols, tol),
    };
    let kernel: Vec<Vec<C64>> = idx[decision.rank..].iter().map(|&j| jac.v[j].clone()).collect();
    Ok((CMatrix::from_columns(cols, &kernel), decision))
}

/// Orthonormal basis of the numerical null space (`n x (n - rank)`).
pub fn null_space(m: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    Ok(null_space_with_decision(m, tol)?.0)
}

/// Orthonormal basis of the numerical range together with the rank decision.
pub fn range_basis(m: &CMatrix, tol: &ToleranceConfig) -> Result<(CMatrix, RankDecision)> {
    let s = svd(m)?;
    let decision = decide(&s.sigma, m.rows(), m.cols(), tol);
    Ok((s.u.submatrix(0, m.rows(), 0, decision.rank), decision))
}

/// Like [`range_basis`], but singular values are compared with
/// `rank_rel_tol * reference * max(m, n)`. Use this when `m` is a product
/// whose size may itself be rounding noise.
pub fn range_basis_against(m: &CMatrix, tol: &ToleranceConfig, reference: f64) -> Result<(CMatrix, RankDecision)> {
    let s = svd(m)?;
    let decision = decide_against(&s.sigma, m.rows(), m.cols(), tol, reference);
    Ok((s.u.submatrix(0, m.rows(), 0, decision.rank), decision))
}

/// Orthonormal basis of the orthogonal complement of the columns of `q`,
/// which must have orthonormal columns.
pub fn orth_complement(q: &CMatrix) -> Result<CMatrix> {
    let n = q.rows();
    let k = q.cols();
    if k == 0 {
        return Ok(CMatrix::identity(n));
    }
    let jac = jacobi(&q.adjoint())?;
    let norms: Vec<f64> = jac.w.iter().map(|c| vec_norm(c)).collect();
    let idx = order(&norms);
    let cols: Vec<Vec<C64>> = idx[k..].iter().map(|&j| jac.v[j].clone()).collect();
    Ok(CMatrix::from_columns(n, &cols))
}
