//! Dense complex linear algebra: SVD, rank, null spaces, eigenvalues,
//! determinants and finite pencil eigenvalues.

pub mod eigen;
pub mod lu;
pub mod matrix;
pub mod poly;
pub mod spectrum;
pub mod svd;
pub mod tolerance;

pub use eigen::{eigenvalues_raw, hermitian_eigen, hermitian_min_eigenvalue};
pub use lu::{determinant, inverse, solve, Lu};
pub use matrix::{dot, vec_norm, CMatrix};
pub use spectrum::{cluster_multiplicity_aware, cluster_single_linkage, Eigenvalue, SpectrumList};
pub use svd::{
    norm2, null_space, null_space_against, null_space_with_decision, numerical_rank, orth_complement, range_basis,
    range_basis_against, rank_decision, rank_decision_against, rank_decision_floor, singular_values, svd, RankDecision,
    Svd,
};
pub use tolerance::ToleranceConfig;

use crate::error::{Error, Result};
use crate::pencil::Pencil;
use crate::C64;

/// Fixed angular offset for determinant sample circles, chosen so that the
/// nodes avoid the real and imaginary axes where structured test pencils
/// tend to put their eigenvalues.
pub const NODE_PHASE: f64 = 0.577_215_664_901_532_9;

/// Eigenvalues clustered within `eig_cluster_tol * max(1, ||m||)`.
pub fn eigenvalues(m: &CMatrix, tol: &ToleranceConfig) -> Result<SpectrumList> {
    let raw = eigenvalues_raw(m)?;
    let radius = tol.eig_cluster_tol * m.norm_fro().max(1.0);
    Ok(SpectrumList {
        values: cluster_single_linkage(&raw, radius),
        infinite: 0,
    })
}

/// Rows shorter than this fraction of `||M||_F` are treated as noise in
/// [`hadamard_ratio`].
pub const ROW_FLOOR: f64 = 1e-6;

/// `|det M| / prod max(||row_i||, ROW_FLOOR ||M||_F)`, which lies in
/// `[0, 1]` by Hadamard's inequality. The floor keeps a row of rounding
/// noise from looking like a full-rank row.
pub fn hadamard_ratio(m: &CMatrix) -> Result<f64> {
    let floor = ROW_FLOOR * m.norm_fro();
    if floor == 0.0 {
        return Ok(0.0);
    }
    let mut ratio = determinant(m)?.norm();
    for i in 0..m.rows() {
        ratio /= vec_norm(m.row(i)).max(floor);
    }
    Ok(ratio)
}

/// Natural circle radius for sampling `det(A + lambda B)`.
pub fn sample_radius(p: &Pencil) -> f64 {
    let na = p.a.norm_fro();
    let nb = p.b.norm_fro();
    if na > 0.0 && nb > 0.0 {
        na / nb
    } else {
        1.0
    }
}

/// Hadamard ratios of `A + lambda B` at `count` nodes on the sample circle.
pub fn determinant_ratios(p: &Pencil, count: usize) -> Result<Vec<f64>> {
    let nodes = poly::circle_nodes(count, sample_radius(p), NODE_PHASE);
    nodes.iter().map(|&l| hadamard_ratio(&p.at(l))).collect()
}

/// Coefficients of `det(A + lambda B)`, constant term first, from `n + 1`
/// samples on a circle of radius `||A|| / ||B||`.
pub fn determinant_coefficients(p: &Pencil) -> Result<Vec<C64>> {
    if !p.is_square() {
        return Err(Error::Shape("determinant of a non-square pencil".into()));
    }
    let n = p.rows();
    let r = sample_radius(p);
    let nodes = poly::circle_nodes(n + 1, r, NODE_PHASE);
    let samples = nodes
        .iter()
        .map(|&l| determinant(&p.at(l)))
        .collect::<Result<Vec<_>>>()?;
    Ok(poly::interpolate_on_circle(&samples, r, NODE_PHASE))
}

/// Finite eigenvalues of a square regular pencil, i.e. the roots of
/// `det(A + lambda B)`, with the count of infinite eigenvalues.
pub fn pencil_eigenvalues(p: &Pencil, tol: &ToleranceConfig) -> Result<SpectrumList> {
    if !p.is_square() {
        return Err(Error::Shape(format!(
            "pencil eigenvalues need a square pencil, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let n = p.rows();
    let ratios = determinant_ratios(p, tol.det_nodes(n))?;
    if ratios.iter().all(|&r| r < tol.det_zero_tol) {
        return Err(Error::SingularPencil);
    }
    let r = sample_radius(p);
    let rot = C64::from_polar(r, NODE_PHASE);
    let nodes = poly::circle_nodes(n + 1, r, NODE_PHASE);
    let samples = nodes
        .iter()
        .map(|&l| determinant(&p.at(l)))
        .collect::<Result<Vec<_>>>()?;
    // Coefficients in the scaled variable mu = lambda / rot are O(1) relative
    // to each other, which makes the degree decision meaningful.
    let scaled = poly::interpolate_on_circle(&samples, 1.0, 0.0);
    let cmax = scaled.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let cut = 1e3 * (n.max(1) as f64) * f64::EPSILON * cmax;
    let degree = (0..scaled.len()).rev().find(|&k| scaled[k].norm() > cut).unwrap_or(0);
    let mu = poly::polynomial_roots(&scaled[..=degree])?;
    let scale = mu.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let kappa = 1e3 * (n.max(1) as f64);
    let clusters = cluster_multiplicity_aware(&mu, tol.eig_cluster_tol, kappa, scale);
    let mut values: Vec<Eigenvalue> = clusters
        .into_iter()
        .map(|e| Eigenvalue {
            value: e.value * rot,
            multiplicity: e.multiplicity,
        })
        .collect();
    values.sort_by(|a, b| spectrum::cmp_c64(&a.value, &b.value));
    Ok(SpectrumList {
        values,
        infinite: n - degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_root_of_scaled_pencil() {
        let a = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let b = a.scale_re(2.0);
        let p = Pencil::new(a, b).unwrap();
        let s = pencil_eigenvalues(&p, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.values.len(), 1);
        assert_eq!(s.values[0].multiplicity, 2);
        assert!((s.values[0].value - C64::new(-0.5, 0.0)).norm() < 1e-10);
        assert_eq!(s.infinite, 0);
    }

    #[test]
    fn infinite_eigenvalues_counted() {
        let p = Pencil::new(CMatrix::identity(2), CMatrix::zeros(2, 2)).unwrap();
        let s = pencil_eigenvalues(&p, &ToleranceConfig::default()).unwrap();
        assert!(s.values.is_empty());
        assert_eq!(s.infinite, 2);
    }

    #[test]
    fn singular_pencil_is_reported() {
        let p = Pencil::new(CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)).unwrap();
        assert!(matches!(
            pencil_eigenvalues(&p, &ToleranceConfig::default()),
            Err(Error::SingularPencil)
        ));
    }

    #[test]
    fn eigenvalues_of_identity_cluster() {
        let s = eigenvalues(&CMatrix::identity(3), &ToleranceConfig::default()).unwrap();
        assert_eq!(s.values.len(), 1);
        assert_eq!(s.values[0].multiplicity, 3);
    }
}
