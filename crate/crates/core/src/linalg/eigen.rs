//! Eigenvalues of general and Hermitian matrices.

use crate::error::{Error, Result};
use crate::linalg::matrix::CMatrix;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Symmetric row/column permutation that isolates eigenvalues sitting on
/// rows or columns with no off-diagonal coupling. Returns the permuted matrix
/// and the active range `lo..=hi`; entries outside it are exact eigenvalues.
#[allow(clippy::mut_range_bound)]
fn permute_balance(m: &CMatrix) -> (CMatrix, usize, usize) {
    let n = m.rows();
    let mut a = m.clone();
    let swap = |a: &mut CMatrix, i: usize, j: usize| {
        if i == j {
            return;
        }
        for k in 0..n {
            let t = a[(i, k)];
            a[(i, k)] = a[(j, k)];
            a[(j, k)] = t;
        }
        for k in 0..n {
            let t = a[(k, i)];
            a[(k, i)] = a[(k, j)];
            a[(k, j)] = t;
        }
    };
    let mut lo = 0usize;
    let mut hi = n - 1;
    'rows: loop {
        if hi == lo {
            return (a, lo, hi);
        }
        for i in (lo..=hi).rev() {
            if (lo..=hi).all(|j| j == i || a[(i, j)] == ZERO) {
                swap(&mut a, i, hi);
                hi -= 1;
                continue 'rows;
            }
        }
        break;
    }
    'cols: loop {
        for j in lo..=hi {
            if (lo..=hi).all(|i| i == j || a[(i, j)] == ZERO) {
                swap(&mut a, j, lo);
                lo += 1;
                if lo == hi {
                    return (a, lo, hi);
                }
                continue 'cols;
            }
        }
        break;
    }
    (a, lo, hi)
}

/// Householder reduction to upper Hessenberg form (similarity, in place).
fn hessenberg(a: &mut CMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut v = x.clone();
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // Left: rows k+1.., all columns from k.
        for j in k..n {
            let s: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * a[(k + 1 + t, j)]).sum();
            for (t, vt) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= vt * s * 2.0;
            }
        }
        // Right: columns k+1.., all rows.
        for i in 0..n {
            let s: C64 = v.iter().enumerate().map(|(t, vt)| a[(i, k + 1 + t)] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                a[(i, k + 1 + t)] -= s * vt.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Complex Givens rotation `(c, s)` with `[c s; -conj(s) c] [a; b] = [r; 0]`.
#[inline]
pub(crate) fn givens(a: C64, b: C64) -> (f64, C64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    if a == ZERO {
        return (0.0, b.conj() / b.norm());
    }
    let an = a.norm();
    let r = an.hypot(b.norm());
    (an / r, (a / an) * b.conj() / r)
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR.
fn hessenberg_qr(h: &mut CMatrix) -> Result<Vec<C64>> {
    let n = h.rows();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let hnorm = h.norm_fro();
    let eps = f64::EPSILON;
    let max_iter = 40 * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    let mut rot: Vec<(f64, C64)> = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            out.push(h[(0, 0)]);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if scale == 0.0 {
                scale = hnorm;
            }
            if sub <= eps * scale || sub < f64::MIN_POSITIVE {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            out.push(h[(hi, hi)]);
            hi -= 1;
            its = 0;
            continue;
        }
        total += 1;
        its += 1;
        if total > max_iter {
            return Err(Error::NoConvergence {
                op: "hessenberg qr",
                iterations: total,
            });
        }
        let shift = if its % 11 == 10 {
            let extra = if hi >= l + 2 { h[(hi - 1, hi - 2)].norm() } else { 0.0 };
            h[(hi, hi)] + C64::new(0.75 * (h[(hi, hi - 1)].norm() + extra), 0.0)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for j in l..=hi {
            h[(j, j)] -= shift;
        }
        rot.clear();
        for j in l..hi {
            let (c, s) = givens(h[(j, j)], h[(j + 1, j)]);
            for k in j..=hi {
                let x = h[(j, k)];
                let y = h[(j + 1, k)];
                h[(j, k)] = x * c + s * y;
                h[(j + 1, k)] = -s.conj() * x + y * c;
            }
            rot.push((c, s));
        }
        for (t, &(c, s)) in rot.iter().enumerate() {
            let j = l + t;
            let top = (j + 2).min(hi);
            for i in l..=top {
                let x = h[(i, j)];
                let y = h[(i, j + 1)];
                h[(i, j)] = x * c + s.conj() * y;
                h[(i, j + 1)] = -s * x + y * c;
            }
        }
        for j in l..=hi {
            h[(j, j)] += shift;
        }
    }
    Ok(out)
}

fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let m1 = mean + disc;
    let m2 = mean - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// All eigenvalues of a square matrix, repeated by algebraic multiplicity,
/// in no particular order.
pub fn eigenvalues_raw(m: &CMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !m.is_finite() {
        return Err(Error::Parse("matrix has non-finite entries".into()));
    }
    let (a, lo, hi) = permute_balance(m);
    let mut out: Vec<C64> = (0..lo).chain(hi + 1..n).map(|i| a[(i, i)]).collect();
    let mut core = a.submatrix(lo, hi + 1, lo, hi + 1);
    hessenberg(&mut core);
    out.extend(hessenberg_qr(&mut core)?);
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi.
/// Eigenvalues ascend; eigenvectors are the columns of the returned matrix.
pub fn hermitian_eigen(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = h.rows();
    let mut a = h.clone();
    let mut x = CMatrix::identity(n);
    let scale = h.norm_fro().max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _ in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let ph = apq / g;
                let zeta = (aqq - app) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let emi = ph.conj();
                for i in 0..n {
                    let xp = a[(i, p)];
                    let xq = a[(i, q)];
                    a[(i, p)] = xp * c - emi * xq * s;
                    a[(i, q)] = xp * s + emi * xq * c;
                }
                for j in 0..n {
                    let xp = a[(p, j)];
                    let xq = a[(q, j)];
                    a[(p, j)] = xp * c - ph * xq * s;
                    a[(q, j)] = xp * s + ph * xq * c;
                }
                for i in 0..n {
                    let xp = x[(i, p)];
                    let xq = x[(i, q)];
                    x[(i, p)] = xp * c - emi * xq * s;
                    x[(i, q)] = xp * s + emi * xq * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            op: "hermitian jacobi",
            iterations: 60,
        });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let vals = idx.iter().map(|&i| a[(i, i)].re).collect();
    Ok((vals, x.select_columns(&idx)))
}

/// Smallest eigenvalue of a Hermitian matrix: Householder tridiagonalisation
/// followed by Sturm-sequence bisection.
pub fn hermitian_min_eigenvalue(h: &CMatrix) -> f64 {
    let (d, e2) = tridiagonalize(h);
    let n = d.len();
    if n == 0 {
        return 0.0;
    }
    let e: Vec<f64> = e2.iter().map(|x| x.sqrt()).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1] } else { 0.0 } + if i + 1 < n { e[i] } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let count_below = |x: f64| -> usize {
        let mut cnt = 0;
        let mut q = d[0] - x;
        if q < 0.0 {
            cnt += 1;
        }
        for i in 1..n {
            let qq = if q == 0.0 {
                f64::EPSILON * (hi - lo).abs().max(1e-300)
            } else {
                q
            };
            q = d[i] - x - e2[i - 1] / qq;
            if q < 0.0 {
                cnt += 1;
            }
        }
        cnt
    };
    let tol = f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300);
    let mut a = lo;
    let mut b = hi;
    for _ in 0..200 {
        if b - a <= 2.0 * tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if count_below(mid) >= 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// Diagonal and squared off-diagonal of a unitarily similar tridiagonal matrix.
fn tridiagonalize(h: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = h.rows();
    let mut a = h.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut v = x;
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        let m = v.len();
        // p = A22 v, w = p - (v^H p) v; A22 -= 2 (v w^H + w v^H)
        let p: Vec<C64> = (0..m)
            .map(|i| (0..m).map(|j| a[(k + 1 + i, k + 1 + j)] * v[j]).sum())
            .collect();
        let kk: C64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();
        for i in 0..m {
            for j in 0..m {
                a[(k + 1 + i, k + 1 + j)] -= (v[i] * w[j].conj() + w[i] * v[j].conj()) * 2.0;
            }
        }
        let sub = -phase * xnorm;
        a[(k + 1, k)] = sub;
        a[(k, k + 1)] = sub.conj();
        for i in k + 2..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }
    }
    let d = (0..n).map(|i| a[(i, i)].re).collect();
    let e2 = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)].norm_sqr()).collect();
    (d, e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn triangular_is_exact() {
        let m = CMatrix::from_real(3, 3, &[2.0, 1.0, 5.0, 0.0, 2.0, 1.0, 0.0, 0.0, -1.0]);
        let ev = sorted(eigenvalues_raw(&m).unwrap());
        assert_eq!(ev, vec![C64::new(-1.0, 0.0), C64::new(2.0, 0.0), C64::new(2.0, 0.0)]);
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let m = CMatrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let ev = sorted(eigenvalues_raw(&m).unwrap());
        assert!((ev[0] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn dense_matrix_trace_and_det() {
        let m = CMatrix::from_fn(6, 6, |i, j| {
            C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0)
        });
        let ev = eigenvalues_raw(&m).unwrap();
        let tr: C64 = ev.iter().sum();
        assert!((tr - m.trace()).norm() < 1e-11);
        let prod = ev.iter().fold(C64::new(1.0, 0.0), |a, b| a * b);
        let det = crate::linalg::lu::determinant(&m).unwrap();
        assert!((prod - det).norm() < 1e-9 * det.norm().max(1.0));
    }

    #[test]
    fn hermitian_solvers_agree() {
        let g = CMatrix::from_fn(5, 5, |i, j| C64::new((i as f64 - j as f64).sin(), (i * j) as f64 * 0.1));
        let h = &g + &g.adjoint();
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        let lam = CMatrix::diag(&vals.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        assert!((&h.matmul(&vecs) - &vecs.matmul(&lam)).norm_fro() < 1e-12);
        let lmin = hermitian_min_eigenvalue(&h);
        assert!((lmin - vals[0]).abs() < 1e-12, "{lmin} vs {}", vals[0]);
    }
}
