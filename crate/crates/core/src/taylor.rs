//! Taylor spectrum of commuting pairs through the Koszul complex
//! `0 -> C^n -> C^n + C^n -> C^n -> 0`, with `d1 h = (A h, B h)` and
//! `d2 (h1, h2) = -B h1 + A h2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kronecker::is_singular;
use crate::linalg::{
    determinant_coefficients, eigenvalues, norm2, numerical_rank, rank_decision_floor, spectrum::cmp_c64, svd,
    vec_norm, CMatrix, ToleranceConfig,
};
use crate::numrange::{
    conv_hull_membership, in_common_kernel, isotropic_from_singular, isotropic_search, HullMembership,
    IsotropicCertificate, SweepConfig,
};
use crate::pencil::Pencil;
use crate::C64;

/// Relative commutator bound used by [`check_commuting`].
pub const COMMUTING_TOL: f64 = 1e-10;

/// Exactness measurements of the Koszul complex at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KoszulAssessment {
    pub point: (C64, C64),
    pub rank_d1: usize,
    pub rank_d2: usize,
    pub dim: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub z1: C64,
    pub z2: C64,
    pub witness_residual_a: f64,
    pub witness_residual_b: f64,
    /// Unit vector with `A x ~ z1 x` and `B x ~ z2 x`.
    pub witness: Vec<C64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TaylorSpectrum {
    pub points: Vec<SpectrumPoint>,
}

impl TaylorSpectrum {
    pub fn pairs(&self) -> Vec<(C64, C64)> {
        self.points.iter().map(|p| (p.z1, p.z2)).collect()
    }

    pub fn contains(&self, z1: C64, z2: C64, eps: f64) -> bool {
        self.points
            .iter()
            .any(|p| (p.z1 - z1).norm() <= eps && (p.z2 - z2).norm() <= eps)
    }

    /// Equality as point sets, matching within `eps` in each coordinate.
    pub fn same_points(&self, other: &TaylorSpectrum, eps: f64) -> bool {
        self.points.len() == other.points.len()
            && self.points.iter().all(|p| other.contains(p.z1, p.z2, eps))
            && other.points.iter().all(|p| self.contains(p.z1, p.z2, eps))
    }
}

fn require_square_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "expected two square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// `||AB - BA|| <= 1e-10 ||A|| ||B||` in the Frobenius norm.
pub fn check_commuting(a: &CMatrix, b: &CMatrix) -> Result<bool> {
    require_square_pair(a, b)?;
    Ok(a.commutator(b).norm_fro() <= COMMUTING_TOL * a.norm_fro() * b.norm_fro())
}

pub(crate) fn require_commuting(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if !check_commuting(a, b)? {
        return Err(Error::NotCommuting {
            commutator: a.commutator(b).norm_fro(),
            bound: COMMUTING_TOL * a.norm_fro() * b.norm_fro(),
        });
    }
    Ok(())
}

/// Rank measured against the size of the unshifted pair, so that a shift
/// which cancels a scalar matrix leaves rank 0 rather than rank of noise.
fn rank_against(m: &CMatrix, tol: &ToleranceConfig, scale: f64) -> Result<usize> {
    Ok(rank_decision_floor(m, tol, scale)?.rank)
}

/// `M - z I`, replaced by an exact zero when the whole difference is below
/// the rank threshold of the unshifted pair. A numerically scalar matrix
/// would otherwise leave a pencil of pure rounding noise, which the
/// scale-free singularity test cannot tell apart from a generic one.
fn snap_shift(m: &CMatrix, z: C64, tol: &ToleranceConfig, scale: f64) -> CMatrix {
    let d = m.shift(z);
    if d.norm_fro() <= tol.rank_rel_tol * scale * m.rows() as f64 {
        CMatrix::zeros(m.rows(), m.cols())
    } else {
        d
    }
}

fn pair_scale(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(norm2(a)?.max(norm2(b)?))
}

fn koszul_unchecked(
    a: &CMatrix,
    b: &CMatrix,
    z1: C64,
    z2: C64,
    tol: &ToleranceConfig,
    scale: f64,
) -> Result<KoszulAssessment> {
    let n = a.rows();
    let a1 = a.shift(z1);
    let b1 = b.shift(z2);
    let rank_d1 = rank_against(&a1.vstack(&b1), tol, scale)?;
    let rank_d2 = rank_against(&(-&b1).hstack(&a1), tol, scale)?;
    Ok(KoszulAssessment {
        point: (z1, z2),
        rank_d1,
        rank_d2,
        dim: n,
        exact: rank_d1 == n && rank_d2 == n,
    })
}

/// Koszul ranks of the shifted pair `(A - z1, B - z2)`.
pub fn koszul_at(a: &CMatrix, b: &CMatrix, z1: C64, z2: C64, tol: &ToleranceConfig) -> Result<KoszulAssessment> {
    require_commuting(a, b)?;
    koszul_unchecked(a, b, z1, z2, tol, pair_scale(a, b)?)
}

/// `sigma(A) x sigma(B)` in lexicographic order.
pub fn candidates(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<Vec<(C64, C64)>> {
    let sa = eigenvalues(a, tol)?;
    let sb = eigenvalues(b, tol)?;
    let mut out = Vec::with_capacity(sa.values.len() * sb.values.len());
    for x in &sa.values {
        for y in &sb.values {
            out.push((x.value, y.value));
        }
    }
    out.sort_by(|p, q| cmp_c64(&p.0, &q.0).then(cmp_c64(&p.1, &q.1)));
    Ok(out)
}

/// Common approximate eigenvector of the shifted pair, if the stacked
/// matrix `[A - z1; B - z2]` is numerically rank deficient.
fn common_eigenvector(
    a: &CMatrix,
    b: &CMatrix,
    z1: C64,
    z2: C64,
    tol: &ToleranceConfig,
    scale: f64,
) -> Result<Option<SpectrumPoint>> {
    let n = a.rows();
    let a1 = a.shift(z1);
    let b1 = b.shift(z2);
    let stacked = a1.vstack(&b1);
    if rank_against(&stacked, tol, scale)? == n {
        return Ok(None);
    }
    Ok(Some(point_with_witness(&a1, &b1, z1, z2, &stacked)?))
}

fn point_with_witness(a1: &CMatrix, b1: &CMatrix, z1: C64, z2: C64, stacked: &CMatrix) -> Result<SpectrumPoint> {
    let s = svd(stacked)?;
    let x = s.v.column(s.v.cols() - 1);
    Ok(SpectrumPoint {
        z1,
        z2,
        witness_residual_a: vec_norm(&a1.mat_vec(&x)),
        witness_residual_b: vec_norm(&b1.mat_vec(&x)),
        witness: x,
    })
}

/// Joint spectrum by the common-eigenvector test over `sigma(A) x sigma(B)`.
pub fn taylor_spectrum(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<TaylorSpectrum> {
    require_commuting(a, b)?;
    let scale = pair_scale(a, b)?;
    let mut points = Vec::new();
    for (z1, z2) in candidates(a, b, tol)? {
        if let Some(p) = common_eigenvector(a, b, z1, z2, tol, scale)? {
            points.push(p);
        }
    }
    Ok(TaylorSpectrum { points })
}

/// Joint spectrum as the set of candidates where the shifted pencil
/// `(A - z1) + lambda (B - z2)` is singular. Each verdict is compared with
/// the Koszul exactness test at the same point.
pub fn spectrum_via_singularity(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<TaylorSpectrum> {
    require_commuting(a, b)?;
    let mut points = Vec::new();
    let scale = pair_scale(a, b)?;
    for (z1, z2) in candidates(a, b, tol)? {
        let a1 = snap_shift(a, z1, tol, scale);
        let b1 = snap_shift(b, z2, tol, scale);
        let singular = is_singular(&Pencil::new(a1.clone(), b1.clone())?, tol)?.singular;
        let koszul = koszul_unchecked(a, b, z1, z2, tol, scale)?;
        if singular == koszul.exact {
            return Err(Error::OracleDisagreement {
                point: (z1, z2),
                koszul: koszul.exact,
                singular,
            });
        }
        if singular {
            points.push(point_with_witness(&a1, &b1, z1, z2, &a1.vstack(&b1))?);
        }
    }
    Ok(TaylorSpectrum { points })
}

/// Candidates `(z1, z2)` whose ratio `z1 / z2` is an eigenvalue of `A - lambda B`.
///
/// Membership of the ratio is decided by a rank test on `A - rho B`. For
/// commuting invertible pairs whose joint eigenvalues have distinct ratios
/// this reproduces the Taylor spectrum, but coincident ratios can admit
/// extra points: with `A = diag(1, 2, 4)` and `B = diag(1, 4, 2)` the
/// candidate `(2, 1)` has ratio 2, which `(4, 2)` contributes.
pub fn spectrum_invertible_characterization(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<TaylorSpectrum> {
    require_commuting(a, b)?;
    let n = a.rows();
    if numerical_rank(a, tol)? < n {
        return Err(Error::NotInvertible("A"));
    }
    if numerical_rank(b, tol)? < n {
        return Err(Error::NotInvertible("B"));
    }
    let (na, nb) = (norm2(a)?, norm2(b)?);
    let mut points = Vec::new();
    for (z1, z2) in candidates(a, b, tol)? {
        assert!(z2.norm() > 0.0, "invertible B has no zero eigenvalue");
        let rho = z1 / z2;
        let m = a - &b.scale(rho);
        if rank_against(&m, tol, na.max(rho.norm() * nb))? < n {
            let a1 = a.shift(z1);
            let b1 = b.shift(z2);
            points.push(point_with_witness(&a1, &b1, z1, z2, &a1.vstack(&b1))?);
        }
    }
    Ok(TaylorSpectrum { points })
}

/// The four conditions at the origin and the evidence behind them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    /// (0): `(0, 0)` in the Taylor spectrum. For a non-commuting pair only
    /// a common kernel vector decides it (the first map of the Koszul
    /// sequence is then not injective); otherwise it is undefined.
    pub zero_in_taylor: Option<bool>,
    /// (i): the pencil is singular.
    pub singular: bool,
    /// (ii): `(0, 0)` in the joint numerical range. `None` when no
    /// certificate was found and the convex hull does not exclude it.
    pub zero_in_joint_range: Option<bool>,
    /// (iii): the numerical range of `A + lambda B` is the whole plane.
    pub pencil_range_is_plane: bool,
    pub certificate: Option<IsotropicCertificate>,
    pub hull: HullMembership,
}

/// Conditions (0), (i), (ii), (iii) with the implication diagram checked.
pub fn condition_matrix(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<ConditionReport> {
    require_commuting(a, b)?;
    conditions(a, b, tol, &SweepConfig::default())
}

/// Like [`condition_matrix`] but also accepts non-commuting pairs, for
/// which (0) is true when `A` and `B` share a kernel vector and undefined
/// otherwise.
pub fn conditions(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig, sweep: &SweepConfig) -> Result<ConditionReport> {
    require_square_pair(a, b)?;
    let p = Pencil::new(a.clone(), b.clone())?;
    let zero_in_taylor = if check_commuting(a, b)? {
        let zero = C64::new(0.0, 0.0);
        Some(!koszul_unchecked(a, b, zero, zero, tol, pair_scale(a, b)?)?.exact)
    } else if in_common_kernel(a, b, tol)? {
        Some(true)
    } else {
        None
    };
    let singular = is_singular(&p, tol)?.singular;
    let certificate = if singular {
        Some(isotropic_from_singular(&p, tol, sweep)?)
    } else {
        isotropic_search(a, b, sweep, tol.seed)
    };
    let hull = conv_hull_membership(a, b, sweep)?;
    let pencil_range_is_plane = !matches!(hull, HullMembership::Outside(_));
    let zero_in_joint_range = match (&certificate, &hull) {
        (Some(_), _) => Some(true),
        (None, HullMembership::Outside(_)) => Some(false),
        (None, _) => None,
    };
    let report = ConditionReport {
        zero_in_taylor,
        singular,
        zero_in_joint_range,
        pencil_range_is_plane,
        certificate,
        hull,
    };
    check_implications(&report)?;
    Ok(report)
}

fn check_implications(r: &ConditionReport) -> Result<()> {
    let violated = |implication: &'static str, detail: String| Err(Error::ImplicationViolated { implication, detail });
    let c0 = r.zero_in_taylor == Some(true);
    let c2 = r.zero_in_joint_range;
    if c0 && !r.singular {
        return violated(
            "(0) => (i)",
            "origin in the Taylor spectrum but the pencil is regular".into(),
        );
    }
    if c0 && c2 != Some(true) {
        return violated(
            "(0) => (ii)",
            format!("origin in the Taylor spectrum but (ii) = {c2:?}"),
        );
    }
    if c0 && !r.pencil_range_is_plane {
        return violated(
            "(0) => (iii)",
            "origin in the Taylor spectrum but the hull is separated".into(),
        );
    }
    if r.singular && c2 != Some(true) {
        return violated("(i) => (ii)", format!("singular pencil but (ii) = {c2:?}"));
    }
    if c2 == Some(true) && !r.pencil_range_is_plane {
        return violated(
            "(ii) => (iii)",
            "isotropic vector found but the hull is separated".into(),
        );
    }
    Ok(())
}

/// Nilpotent shift truncation: ones on the first subdiagonal.
pub fn shift_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `T1 = I (+) M_n`, `T2 = M_n (+) I`, of size `2n`.
pub fn shift_truncation_pair(n: usize) -> (CMatrix, CMatrix) {
    let m = shift_matrix(n);
    let id = CMatrix::identity(n);
    (id.direct_sum(&m), m.direct_sum(&id))
}

/// The invertible variant `T1 = 3I (+) (M_n + 2I)`, `T2 = (M_n + 2I) (+) 3I`.
pub fn shifted_truncation_pair(n: usize) -> (CMatrix, CMatrix) {
    let m2 = shift_matrix(n).shift(C64::new(-2.0, 0.0));
    let id3 = CMatrix::identity(n).scale_re(3.0);
    (id3.direct_sum(&m2), m2.direct_sum(&id3))
}

/// One row of the shift-truncation experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftRow {
    pub n: usize,
    /// Coefficients of `det(T1 + lambda T2)`, constant term first.
    pub det_coeffs: Vec<C64>,
    pub det_degree: usize,
    pub det_leading: C64,
    pub det_max_other_abs: f64,
    pub singular: bool,
    pub zero_in_taylor: bool,
    pub rank_d1: usize,
    pub rank_d2: usize,
    pub taylor_points: Vec<(C64, C64)>,
    /// Ratio characterization applied to the invertible variant.
    pub shifted_hypo_points: Vec<(C64, C64)>,
    pub shifted_taylor_points: Vec<(C64, C64)>,
}

pub fn shift_row(n: usize, tol: &ToleranceConfig) -> Result<ShiftRow> {
    let (t1, t2) = shift_truncation_pair(n);
    let p = Pencil::new(t1.clone(), t2.clone())?;
    let det_coeffs = determinant_coefficients(&p)?;
    let cmax = det_coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let det_degree = (0..det_coeffs.len())
        .rev()
        .find(|&k| det_coeffs[k].norm() > 1e-8 * cmax.max(1.0))
        .unwrap_or(0);
    let det_leading = det_coeffs[det_degree];
    let det_max_other_abs = det_coeffs
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != det_degree)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    let singular = is_singular(&p, tol)?.singular;
    let k = koszul_at(&t1, &t2, C64::new(0.0, 0.0), C64::new(0.0, 0.0), tol)?;
    let taylor_points = taylor_spectrum(&t1, &t2, tol)?.pairs();
    let (s1, s2) = shifted_truncation_pair(n);
    Ok(ShiftRow {
        n,
        det_coeffs,
        det_degree,
        det_leading,
        det_max_other_abs,
        singular,
        zero_in_taylor: !k.exact,
        rank_d1: k.rank_d1,
        rank_d2: k.rank_d2,
        taylor_points,
        shifted_hypo_points: spectrum_invertible_characterization(&s1, &s2, tol)?.pairs(),
        shifted_taylor_points: taylor_spectrum(&s1, &s2, tol)?.pairs(),
    })
}
