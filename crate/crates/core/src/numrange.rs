//! Joint numerical range `W(A, B) = {(x*Ax, x*Bx) : |x| = 1}` and the
//! numerical range of the pencil `A + lambda B`.
//!
//! Writing `A = H_A + i K_A` and `B = H_B + i K_B` with Hermitian parts, a
//! point of `W(A, B)` is the real 4-vector `(x*H_A x, x*K_A x, x*H_B x, x*K_B x)`.
//! The origin lies in the convex hull exactly when no direction `u` makes
//! `u1 H_A + u2 K_A + u3 H_B + u4 K_B` positive definite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kronecker::is_singular;
use crate::linalg::{
    dot, hermitian_eigen, hermitian_min_eigenvalue, null_space, numerical_rank, solve, svd, vec_norm, CMatrix,
    ToleranceConfig,
};
use crate::pencil::Pencil;
use crate::random::{derive_seed, rng, unit_vector};
use crate::C64;

/// A certificate is valid when both residuals are below this multiple of
/// the Frobenius norm of the matrix.
pub const CERTIFICATE_TOL: f64 = 1e-8;

/// Relative threshold below which combinations of the Hermitian parts are
/// treated as exactly dependent.
const SPAN_TOL: f64 = 1e-12;

/// Resolution of the direction sweeps and the isotropic search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Lattice size on the 3-sphere.
    pub directions: usize,
    /// Relative band around zero reported as `Boundary`.
    pub boundary_tol: f64,
    /// Angular grid for the single-matrix numerical range test.
    pub theta_points: usize,
    /// Random restarts of the isotropic-vector search.
    pub restarts: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            directions: 2000,
            boundary_tol: 1e-7,
            theta_points: 360,
            restarts: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    Kernel,
    KroneckerConstructive,
    RandomSearch,
}

/// Unit vector `x` with `x*Ax ~ 0` and `x*Bx ~ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropicCertificate {
    pub vector: Vec<C64>,
    pub residual_a: f64,
    pub residual_b: f64,
    pub method: CertificateMethod,
}

impl IsotropicCertificate {
    fn new(mut x: Vec<C64>, a: &CMatrix, b: &CMatrix, method: CertificateMethod) -> Option<Self> {
        let nx = vec_norm(&x);
        if nx.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !nx.is_finite() {
            return None;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        Some(IsotropicCertificate {
            residual_a: a.quadratic_form(&x).norm(),
            residual_b: b.quadratic_form(&x).norm(),
            vector: x,
            method,
        })
    }

    /// Recompute everything from the vector; never trusts the stored residuals.
    pub fn verify(&self, a: &CMatrix, b: &CMatrix) -> bool {
        let x = &self.vector;
        x.len() == a.cols()
            && (vec_norm(x) - 1.0).abs() <= 1e-12
            && a.quadratic_form(x).norm() <= CERTIFICATE_TOL * a.norm_fro()
            && b.quadratic_form(x).norm() <= CERTIFICATE_TOL * b.norm_fro()
    }
}

/// Direction `u` in R^4 with `lambda_min(u . (H_A, K_A, H_B, K_B)) >= margin > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub direction: [f64; 4],
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum HullMembership {
    Inside,
    Outside(SeparationCertificate),
    Boundary,
}

/// Hermitian and skew parts: `(M + M*) / 2` and `(M - M*) / 2i`.
pub fn hermitian_parts(m: &CMatrix) -> (CMatrix, CMatrix) {
    let mh = m.adjoint();
    let h = (m + &mh).scale_re(0.5);
    let k = (m - &mh).scale(C64::new(0.0, -0.5));
    (h, k)
}

fn combine(hs: &[CMatrix], u: &[f64]) -> CMatrix {
    let n = hs[0].rows();
    let mut out = CMatrix::zeros(n, n);
    for (h, &c) in hs.iter().zip(u) {
        if c != 0.0 {
            out = &out + &h.scale_re(c);
        }
    }
    out
}

/// `count` points of `W(A, B)` from normalised complex Gaussian vectors.
pub fn jnr_sample(a: &CMatrix, b: &CMatrix, count: usize, seed: u64) -> Vec<(C64, C64)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let x = unit_vector(a.cols(), &mut r);
            (a.quadratic_form(&x), b.quadratic_form(&x))
        })
        .collect()
}

/// Both Hermitian parts pairwise commute: `AB = BA` and `A*B = BA*`.
pub fn is_doubly_commuting(a: &CMatrix, b: &CMatrix) -> bool {
    let bound = 1e-10 * a.norm_fro() * b.norm_fro();
    a.commutator(b).norm_fro() <= bound && a.adjoint().commutator(b).norm_fro() <= bound
}

/// Gauss-Newton (with a small Levenberg term) on the four real quadratic
/// forms and the normalisation `|x|^2 = 1`.
fn isotropic_newton(hs: &[CMatrix; 4], mut x: Vec<C64>) -> Vec<C64> {
    let n = x.len();
    let residual = |x: &[C64]| -> [f64; 5] {
        let mut f = [0.0; 5];
        for (k, h) in hs.iter().enumerate() {
            f[k] = h.quadratic_form(x).re;
        }
        f[4] = x.iter().map(|v| v.norm_sqr()).sum::<f64>() - 1.0;
        f
    };
    let size = |f: &[f64; 5]| f.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut f = residual(&x);
    for _ in 0..60 {
        if size(&f) < 1e-15 {
            break;
        }
        let mut jac = vec![vec![0.0; 2 * n]; 5];
        for (k, h) in hs.iter().enumerate() {
            let hx = h.mat_vec(&x);
            for i in 0..n {
                jac[k][i] = 2.0 * hx[i].re;
                jac[k][n + i] = 2.0 * hx[i].im;
            }
        }
        for i in 0..n {
            jac[4][i] = 2.0 * x[i].re;
            jac[4][n + i] = 2.0 * x[i].im;
        }
        let mut gram = CMatrix::zeros(5, 5);
        for r in 0..5 {
            for c in 0..5 {
                let v: f64 = (0..2 * n).map(|i| jac[r][i] * jac[c][i]).sum();
                gram[(r, c)] = C64::new(v, 0.0);
            }
        }
        let trace: f64 = (0..5).map(|i| gram[(i, i)].re).sum();
        for i in 0..5 {
            gram[(i, i)] += C64::new(1e-14 * trace.max(1e-300), 0.0);
        }
        let rhs = CMatrix::from_fn(5, 1, |i, _| C64::new(f[i], 0.0));
        let Ok(y) = solve(&gram, &rhs) else { break };
        let step: Vec<f64> = (0..2 * n)
            .map(|i| -(0..5).map(|r| jac[r][i] * y[(r, 0)].re).sum::<f64>())
            .collect();
        let current = size(&f);
        let mut t = 1.0;
        let mut improved = false;
        while t > 1.0 / 64.0 {
            let trial: Vec<C64> = (0..n).map(|i| x[i] + C64::new(t * step[i], t * step[n + i])).collect();
            let ft = residual(&trial);
            if size(&ft) < current {
                x = trial;
                f = ft;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    x
}

/// Randomised search for a common isotropic vector. `None` means "not
/// found", which is not a proof of non-membership.
pub fn isotropic_search(a: &CMatrix, b: &CMatrix, sweep: &SweepConfig, seed: u64) -> Option<IsotropicCertificate> {
    search_from(a, b, sweep, seed, None)
}

fn search_from(
    a: &CMatrix,
    b: &CMatrix,
    sweep: &SweepConfig,
    seed: u64,
    start: Option<Vec<C64>>,
) -> Option<IsotropicCertificate> {
    let n = a.cols();
    if n == 0 {
        return None;
    }
    let scale = a.norm_fro().max(b.norm_fro());
    if scale == 0.0 {
        let mut x = vec![C64::new(0.0, 0.0); n];
        x[0] = C64::new(1.0, 0.0);
        return IsotropicCertificate::new(x, a, b, CertificateMethod::RandomSearch);
    }
    let (ha, ka) = hermitian_parts(&a.scale_re(1.0 / scale));
    let (hb, kb) = hermitian_parts(&b.scale_re(1.0 / scale));
    let hs = [ha, ka, hb, kb];
    let mut starts = start.into_iter();
    for k in 0..sweep.restarts {
        let x0 = match starts.next() {
            Some(x) => x,
            None => unit_vector(n, &mut rng(derive_seed(seed, k as u64))),
        };
        let x = isotropic_newton(&hs, x0);
        if let Some(c) = IsotropicCertificate::new(x, a, b, CertificateMethod::RandomSearch) {
            if c.verify(a, b) {
                return Some(c);
            }
        }
    }
    None
}

/// Block-Toeplitz system whose null vectors are the coefficient chains
/// `A t_0 = 0`, `A t_k + B t_{k-1} = 0`, `B t_d = 0` of a polynomial right
/// null vector of degree `d`.
fn chain_matrix(a: &CMatrix, b: &CMatrix, d: usize) -> CMatrix {
    let (m, n) = a.shape();
    let mut t = CMatrix::zeros((d + 2) * m, (d + 1) * n);
    for c in 0..=d {
        t.set_block(c * m, c * n, a);
        t.set_block((c + 1) * m, c * n, b);
    }
    t
}

/// Isotropic vector from a minimal-degree right null chain `t_0..t_d`.
/// `A` and `B` map `K = span(t_j)` into `R = span(B t_0, .., B t_{d-1})`,
/// which is one dimension smaller, so some `x` in `K` is orthogonal to `R`
/// and then `x*Ax = x*Bx = 0`.
fn chain_isotropic(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<Option<(usize, Vec<C64>)>> {
    let n = a.cols();
    for d in 0..n {
        let ns = null_space(&chain_matrix(a, b, d), tol)?;
        if ns.cols() == 0 {
            continue;
        }
        let v = ns.column(0);
        let chain: Vec<Vec<C64>> = (0..=d).map(|i| v[i * n..(i + 1) * n].to_vec()).collect();
        let w = if d == 0 {
            vec![C64::new(1.0, 0.0)]
        } else {
            let images: Vec<Vec<C64>> = chain[..d].iter().map(|t| b.mat_vec(t)).collect();
            let g = CMatrix::from_fn(d, d + 1, |k, j| dot(&images[k], &chain[j]));
            // A d x (d + 1) system always has a kernel.
            let k = null_space(&g, tol)?;
            if k.cols() == 0 {
                return Ok(None);
            }
            k.column(0)
        };
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (wi, ti) in w.iter().zip(&chain) {
            for (xk, tk) in x.iter_mut().zip(ti) {
                *xk += wi * tk;
            }
        }
        return Ok(Some((d, x)));
    }
    Ok(None)
}

/// Common isotropic vector of a singular square pencil: a common kernel
/// vector if there is one, otherwise one built from the coefficient chain of
/// a minimal polynomial null vector, otherwise randomised search.
pub fn isotropic_from_singular(p: &Pencil, tol: &ToleranceConfig, sweep: &SweepConfig) -> Result<IsotropicCertificate> {
    if !is_singular(p, tol)?.singular {
        return Err(Error::NotSingular);
    }
    isotropic_for_singular(p, tol, sweep)
}

fn isotropic_for_singular(p: &Pencil, tol: &ToleranceConfig, sweep: &SweepConfig) -> Result<IsotropicCertificate> {
    let (a, b) = (&p.a, &p.b);
    let ker = null_space(&a.vstack(b), tol)?;
    if ker.cols() > 0 {
        if let Some(c) = IsotropicCertificate::new(ker.column(0), a, b, CertificateMethod::Kernel) {
            if c.verify(a, b) {
                return Ok(c);
            }
        }
    }
    // Right chains of (A, B), and of (A*, B*) for the row minimal indices;
    // x*A*x is the conjugate of x*Ax, so both give isotropic vectors.
    let right = chain_isotropic(a, b, tol)?;
    let left = chain_isotropic(&a.adjoint(), &b.adjoint(), tol)?;
    let mut tries: Vec<(usize, Vec<C64>)> = right.into_iter().chain(left).collect();
    tries.sort_by_key(|t| t.0);
    let mut last = None;
    for (_, x) in tries {
        if let Some(c) = IsotropicCertificate::new(x, a, b, CertificateMethod::KroneckerConstructive) {
            if c.verify(a, b) {
                return Ok(c);
            }
            last = Some(c.vector);
        }
    }
    search_from(a, b, sweep, tol.seed, last).ok_or_else(|| {
        Error::TransformUnavailable("no isotropic vector from the null chains or the randomised search".into())
    })
}

/// Super-Fibonacci points on the unit 3-sphere.
fn s3_lattice(count: usize) -> Vec<Vec<f64>> {
    const PHI: f64 = std::f64::consts::SQRT_2;
    const PSI: f64 = 1.533_751_168_755_204_3;
    let nf = count as f64;
    (0..count)
        .map(|i| {
            let s = i as f64 + 0.5;
            let r = (s / nf).sqrt();
            let rr = (1.0 - s / nf).sqrt();
            let alpha = std::f64::consts::TAU * s / PHI;
            let beta = std::f64::consts::TAU * s / PSI;
            vec![r * alpha.sin(), r * alpha.cos(), rr * beta.sin(), rr * beta.cos()]
        })
        .collect()
}

/// Fibonacci points on the unit 2-sphere.
fn s2_lattice(count: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            vec![r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

fn lattice(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        4 => s3_lattice(count),
        3 => s2_lattice(count),
        2 => (0..count)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => vec![vec![1.0], vec![-1.0]],
    }
}

fn normalise(u: &mut [f64]) {
    let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    u.iter_mut().for_each(|v| *v /= n);
}

/// Projected supergradient ascent of `lambda_min` on the sphere.
fn polish(gs: &[CMatrix], mut u: Vec<f64>, mut best: f64) -> Result<(Vec<f64>, f64)> {
    let mut step = 0.1;
    for _ in 0..200 {
        if step < 1e-12 {
            break;
        }
        let (vals, vecs) = hermitian_eigen(&combine(gs, &u))?;
        debug_assert!(!vals.is_empty());
        let v = vecs.column(0);
        let mut g: Vec<f64> = gs.iter().map(|h| h.quadratic_form(&v).re).collect();
        let along: f64 = g.iter().zip(&u).map(|(x, y)| x * y).sum();
        g.iter_mut().zip(&u).for_each(|(gi, ui)| *gi -= along * ui);
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn < 1e-15 {
            break;
        }
        let mut trial: Vec<f64> = u.iter().zip(&g).map(|(x, y)| x + step * y / gn).collect();
        normalise(&mut trial);
        let f = hermitian_min_eigenvalue(&combine(gs, &trial));
        if f > best {
            u = trial;
            best = f;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    Ok((u, best))
}

/// Whether the origin lies in the closed convex hull of `W(A, B)`.
///
/// The Hermitian parts are first reduced to a linearly independent family
/// (an exactly flat hull lives in a lower-dimensional subspace). A
/// minimum-norm-point iteration either separates the origin or reaches it;
/// in the latter case a lattice sweep of `max_u lambda_min(u . H)` with
/// local ascent decides whether the origin is interior.
pub fn conv_hull_membership(a: &CMatrix, b: &CMatrix, sweep: &SweepConfig) -> Result<HullMembership> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::Shape(
            "joint numerical range needs two square matrices of equal size".into(),
        ));
    }
    let scale = a.norm_fro().max(b.norm_fro());
    if scale == 0.0 {
        return Ok(HullMembership::Inside);
    }
    let (ha, ka) = hermitian_parts(a);
    let (hb, kb) = hermitian_parts(b);
    let hs = [ha, ka, hb, kb];
    let n = a.rows();
    // Rows are the four Hermitian parts flattened; the right singular
    // vectors of the transpose give an orthonormal basis of directions.
    let flat = CMatrix::from_fn(4, n * n, |k, idx| hs[k].data()[idx]);
    let s = svd(&flat.adjoint())?;
    let smax = s.sigma.first().copied().unwrap_or(0.0);
    let rank = s.sigma.iter().filter(|&&x| x > SPAN_TOL * smax.max(scale)).count();
    if rank == 0 {
        return Ok(HullMembership::Inside);
    }
    // Basis directions b_j in R^4 (the Hermitian parts are real combinations,
    // so the singular vectors can be taken real up to a phase).
    let mut basis: Vec<[f64; 4]> = Vec::with_capacity(rank);
    for j in 0..rank {
        let col = s.v.column(j);
        let pivot = col
            .iter()
            .copied()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .unwrap_or(C64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        let mut v = [0.0; 4];
        for k in 0..4 {
            v[k] = (col[k] * phase).re;
        }
        basis.push(v);
    }
    orthonormalise(&mut basis);
    let gs: Vec<CMatrix> = basis.iter().map(|v| combine(&hs, v)).collect();
    let tol = sweep.boundary_tol * scale;
    let to_full = |u: &[f64]| {
        let mut direction = [0.0; 4];
        for (c, v) in u.iter().zip(&basis) {
            for k in 0..4 {
                direction[k] += c * v[k];
            }
        }
        direction
    };
    let outside = |u: &[f64]| {
        let direction = to_full(u);
        let margin = hermitian_min_eigenvalue(&combine(&hs, &direction));
        HullMembership::Outside(SeparationCertificate { direction, margin })
    };
    let mut first = vec![0.0; rank];
    first[0] = 1.0;
    let near = match min_norm_point(&gs, &first, tol)? {
        MinNorm::Separated(u) => return Ok(outside(&u)),
        MinNorm::Near => true,
        MinNorm::Stalled => false,
    };
    let count = if rank == 1 { 2 } else { sweep.directions.max(8) };
    let mut scored: Vec<(f64, Vec<f64>)> = lattice(rank, count)
        .into_iter()
        .map(|u| (hermitian_min_eigenvalue(&combine(&gs, &u)), u))
        .collect();
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (mut best, mut best_u) = (scored[0].0, scored[0].1.clone());
    if rank > 1 {
        for (f, u) in scored.into_iter().take(4) {
            let (u2, f2) = polish(&gs, u, f)?;
            if f2 > best {
                best = f2;
                best_u = u2;
            }
        }
    }
    if best > tol {
        return Ok(outside(&best_u));
    }
    if near && best < -tol {
        Ok(HullMembership::Inside)
    } else {
        Ok(HullMembership::Boundary)
    }
}

enum MinNorm {
    /// Unit direction whose minimum over the hull exceeds the tolerance.
    Separated(Vec<f64>),
    /// A hull point within the tolerance of the origin.
    Near,
    Stalled,
}

/// Point of `conv W` in the reduced coordinates minimising `<u, y>`: the
/// quadratic form of a bottom eigenvector of `u . G`.
fn support_point(gs: &[CMatrix], u: &[f64]) -> Result<Vec<f64>> {
    let (_, vecs) = hermitian_eigen(&combine(gs, u))?;
    let v = vecs.column(0);
    Ok(gs.iter().map(|g| g.quadratic_form(&v).re).collect())
}

fn inner(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Weights summing to one that minimise the norm of the affine combination.
fn affine_min_norm(atoms: &[Vec<f64>]) -> Option<Vec<f64>> {
    let m = atoms.len();
    if m == 1 {
        return Some(vec![1.0]);
    }
    let d: Vec<Vec<f64>> = atoms[1..]
        .iter()
        .map(|p| p.iter().zip(&atoms[0]).map(|(x, y)| x - y).collect())
        .collect();
    let gram = CMatrix::from_fn(m - 1, m - 1, |i, j| C64::new(inner(&d[i], &d[j]), 0.0));
    let rhs = CMatrix::from_fn(m - 1, 1, |i, _| C64::new(-inner(&d[i], &atoms[0]), 0.0));
    let c = solve(&gram, &rhs).ok()?;
    let mut w = vec![1.0 - (0..m - 1).map(|i| c[(i, 0)].re).sum::<f64>()];
    w.extend((0..m - 1).map(|i| c[(i, 0)].re));
    w.iter().all(|x| x.is_finite()).then_some(w)
}

/// Wolfe's minimum-norm-point iteration over the hull, driven by the
/// support oracle. Stops as soon as either outcome is certain.
fn min_norm_point(gs: &[CMatrix], start: &[f64], tol: f64) -> Result<MinNorm> {
    let mut atoms = vec![support_point(gs, start)?];
    let mut w = vec![1.0];
    for _ in 0..500 {
        let mut x = vec![0.0; start.len()];
        for (p, &wi) in atoms.iter().zip(&w) {
            x.iter_mut().zip(p).for_each(|(xi, pi)| *xi += wi * pi);
        }
        let nx = inner(&x, &x).sqrt();
        if nx <= tol {
            return Ok(MinNorm::Near);
        }
        let q = support_point(gs, &x)?;
        let xq = inner(&x, &q);
        if xq / nx > tol {
            return Ok(MinNorm::Separated(x.iter().map(|v| v / nx).collect()));
        }
        if nx * nx - xq <= 1e-14 * nx * nx {
            return Ok(MinNorm::Stalled);
        }
        atoms.push(q);
        w.push(0.0);
        loop {
            let Some(alpha) = affine_min_norm(&atoms) else {
                return Ok(MinNorm::Stalled);
            };
            if alpha.iter().all(|&a| a > 1e-12) {
                w = alpha;
                break;
            }
            let theta = w
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= 1e-12)
                .map(|(&wi, &a)| wi / (wi - a))
                .fold(1.0, f64::min);
            for (wi, a) in w.iter_mut().zip(&alpha) {
                *wi = (1.0 - theta) * *wi + theta * a;
            }
            let keep: Vec<bool> = w.iter().map(|&wi| wi > 1e-14).collect();
            if keep.iter().all(|&k| k) {
                return Ok(MinNorm::Stalled);
            }
            atoms = atoms
                .into_iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(p, _)| p)
                .collect();
            w = w.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(x, _)| x).collect();
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
        }
    }
    Ok(MinNorm::Stalled)
}

fn orthonormalise(vs: &mut [[f64; 4]]) {
    for i in 0..vs.len() {
        for j in 0..i {
            let vj = vs[j];
            let d: f64 = vs[i].iter().zip(&vj).map(|(x, y)| x * y).sum();
            vs[i].iter_mut().zip(&vj).for_each(|(x, y)| *x -= d * y);
        }
        let n = vs[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        vs[i].iter_mut().for_each(|v| *v /= n);
    }
}

/// `W(A + lambda B)` is the whole plane, i.e. the hull contains the origin.
pub fn pencil_nr_is_plane(a: &CMatrix, b: &CMatrix, sweep: &SweepConfig) -> Result<bool> {
    Ok(!matches!(
        conv_hull_membership(a, b, sweep)?,
        HullMembership::Outside(_)
    ))
}

fn rotated_min(m: &CMatrix, theta: f64) -> f64 {
    let (h, k) = hermitian_parts(m);
    hermitian_min_eigenvalue(&(&h.scale_re(theta.cos()) - &k.scale_re(theta.sin())))
}

/// `0` lies in the numerical range of `A + lambda0 B`: no rotation of the
/// matrix has a positive definite Hermitian part.
pub fn nr_contains(p: &Pencil, lambda0: C64, sweep: &SweepConfig) -> Result<bool> {
    if !p.is_square() {
        return Err(Error::Shape("numerical range needs a square pencil".into()));
    }
    let m = p.at(lambda0);
    let scale = m.norm_fro();
    if scale == 0.0 {
        return Ok(true);
    }
    let count = sweep.theta_points.max(8);
    let h = std::f64::consts::TAU / count as f64;
    let (mut best, mut at) = (f64::NEG_INFINITY, 0.0);
    for i in 0..count {
        let t = i as f64 * h;
        let f = rotated_min(&m, t);
        if f > best {
            best = f;
            at = t;
        }
    }
    // Golden-section refinement on the bracket around the best grid angle.
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (at - h, at + h);
    for _ in 0..60 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if rotated_min(&m, x1) > rotated_min(&m, x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    best = best.max(rotated_min(&m, 0.5 * (lo + hi)));
    Ok(best <= sweep.boundary_tol * scale)
}

/// Rank-based check used by tests: `x` is in the common kernel.
pub fn in_common_kernel(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<bool> {
    Ok(numerical_rank(&a.vstack(b), tol)? < a.cols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kronecker::{assemble, scramble, KroneckerStructure, MinimalIndex};

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::diag(&v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    fn mi(index: usize, multiplicity: usize) -> MinimalIndex {
        MinimalIndex { index, multiplicity }
    }

    #[test]
    fn sample_points() {
        let id = CMatrix::identity(3);
        for (x, y) in jnr_sample(&id, &id, 10, 1) {
            assert!((x - 1.0).norm() < 1e-12 && (y - 1.0).norm() < 1e-12);
        }
        for (x, y) in jnr_sample(&diag(&[1.0, -1.0]), &diag(&[2.0, -2.0]), 20, 2) {
            assert!((y - x * 2.0).norm() < 1e-12);
        }
        assert!(jnr_sample(&id, &id, 0, 3).is_empty());
    }

    #[test]
    fn hull_examples() {
        let sw = SweepConfig::default();
        let id = CMatrix::identity(2);
        match conv_hull_membership(&id, &id, &sw).unwrap() {
            HullMembership::Outside(c) => {
                assert!((c.margin - 2f64.sqrt()).abs() < 1e-9);
                assert!(c.direction[0] > 0.7 && c.direction[2] > 0.7);
            }
            other => panic!("{other:?}"),
        }
        let r = conv_hull_membership(&diag(&[1.0, -1.0]), &diag(&[2.0, -2.0]), &sw).unwrap();
        assert_eq!(r, HullMembership::Inside);
        let n = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(pencil_nr_is_plane(&n, &CMatrix::zeros(2, 2), &sw).unwrap());
        let z = CMatrix::zeros(2, 2);
        assert_eq!(conv_hull_membership(&z, &z, &sw).unwrap(), HullMembership::Inside);
    }

    #[test]
    fn separation_bounds_samples() {
        let sw = SweepConfig::default();
        let a = CMatrix::from_real(2, 2, &[2.0, 1.0, 0.0, 3.0]);
        let b = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.5, 1.0]);
        let HullMembership::Outside(c) = conv_hull_membership(&a, &b, &sw).unwrap() else {
            panic!("expected separation");
        };
        for (x, y) in jnr_sample(&a, &b, 200, 4) {
            let d = c.direction;
            let ip = d[0] * x.re + d[1] * x.im + d[2] * y.re + d[3] * y.im;
            assert!(ip >= c.margin - 1e-8);
        }
    }

    #[test]
    fn search_finds_isotropic_vector() {
        let c = isotropic_search(&diag(&[1.0, -1.0]), &diag(&[2.0, -2.0]), &SweepConfig::default(), 0).unwrap();
        assert!(c.residual_a < 1e-10 && c.residual_b < 1e-10);
        assert_eq!(c.method, CertificateMethod::RandomSearch);
        let id = CMatrix::identity(2);
        let sw = SweepConfig {
            restarts: 5,
            ..Default::default()
        };
        assert!(isotropic_search(&id, &id, &sw, 0).is_none());
    }

    #[test]
    fn singular_certificates() {
        let tol = ToleranceConfig::default();
        let sw = SweepConfig::default();
        let z = Pencil::new(CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)).unwrap();
        let c = isotropic_from_singular(&z, &tol, &sw).unwrap();
        assert_eq!((c.residual_a, c.residual_b), (0.0, 0.0));
        let st = KroneckerStructure {
            col_minimal: vec![mi(1, 1)],
            row_minimal: vec![mi(1, 1)],
            ..Default::default()
        };
        let (p, _) = scramble(&assemble(&st), 11);
        let c = isotropic_from_singular(&p, &tol, &sw).unwrap();
        assert_eq!(c.method, CertificateMethod::KroneckerConstructive);
        assert!(c.verify(&p.a, &p.b));
        let regular = Pencil::new(CMatrix::identity(2), CMatrix::zeros(2, 2)).unwrap();
        assert!(matches!(
            isotropic_from_singular(&regular, &tol, &sw),
            Err(Error::NotSingular)
        ));
    }

    #[test]
    fn numerical_range_of_points() {
        let sw = SweepConfig::default();
        let p = Pencil::new(CMatrix::identity(2), CMatrix::zeros(2, 2)).unwrap();
        assert!(!nr_contains(&p, C64::new(3.0, 1.0), &sw).unwrap());
        let z = Pencil::new(CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)).unwrap();
        assert!(nr_contains(&z, C64::new(0.3, 0.0), &sw).unwrap());
        let e = Pencil::new(diag(&[1.0, -1.0]), diag(&[2.0, -2.0])).unwrap();
        assert!(nr_contains(&e, C64::new(-0.5, 0.0), &sw).unwrap());
        assert!(nr_contains(&e, C64::new(2.0, 1.0), &sw).unwrap());
    }
}
