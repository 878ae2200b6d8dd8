use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kronecker::staircase::minimal_indices;
use crate::kronecker::structure::MinimalIndex;
use crate::linalg::{determinant_ratios, numerical_rank, poly, sample_radius, ToleranceConfig, NODE_PHASE};
use crate::pencil::Pencil;

/// Both pieces of evidence behind a singularity verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityEvidence {
    pub col_minimal: Vec<MinimalIndex>,
    pub row_minimal: Vec<MinimalIndex>,
    /// Largest Hadamard-normalised `|det(A + lambda_k B)|` over the nodes.
    pub max_det_ratio: f64,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityVerdict {
    pub singular: bool,
    pub evidence: SingularityEvidence,
}

/// Decide whether `det(A + lambda B)` vanishes identically, once from the
/// minimal indices and once from sampled determinants; the two must agree.
pub fn is_singular(p: &Pencil, tol: &ToleranceConfig) -> Result<SingularityVerdict> {
    if !p.is_square() {
        return Err(Error::Shape(format!(
            "singularity is defined for square pencils, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let s = minimal_indices(p, tol)?;
    let nodes = tol.det_nodes(p.rows());
    let max_det_ratio = determinant_ratios(p, nodes)?.into_iter().fold(0.0, f64::max);
    let by_staircase = s.has_minimal_blocks();
    let by_determinant = max_det_ratio < tol.det_zero_tol;
    if by_staircase != by_determinant {
        return Err(Error::InconsistentSingularityEvidence {
            staircase: by_staircase,
            determinant: by_determinant,
        });
    }
    Ok(SingularityVerdict {
        singular: by_staircase,
        evidence: SingularityEvidence {
            col_minimal: s.col_minimal,
            row_minimal: s.row_minimal,
            max_det_ratio,
            nodes,
        },
    })
}

/// Largest numerical rank of `A + lambda_k B` over the sample nodes.
pub fn normal_rank(p: &Pencil, tol: &ToleranceConfig) -> Result<usize> {
    let nodes = poly::circle_nodes(tol.det_nodes(p.rows().max(p.cols())), sample_radius(p), NODE_PHASE);
    let mut best = 0;
    for &l in &nodes {
        best = best.max(numerical_rank(&p.at(l), tol)?);
        if best == p.rows().min(p.cols()) {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kronecker::structure::{assemble, KroneckerStructure};
    use crate::linalg::CMatrix;

    fn mi(index: usize, multiplicity: usize) -> MinimalIndex {
        MinimalIndex { index, multiplicity }
    }

    #[test]
    fn scaled_pair_is_regular() {
        let a = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let p = Pencil::new(a.clone(), a.scale_re(2.0)).unwrap();
        assert!(!is_singular(&p, &ToleranceConfig::default()).unwrap().singular);
    }

    #[test]
    fn zero_and_block_pencils_are_singular() {
        let tol = ToleranceConfig::default();
        let z = Pencil::new(CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)).unwrap();
        assert!(is_singular(&z, &tol).unwrap().singular);
        let p = assemble(&KroneckerStructure {
            row_minimal: vec![mi(1, 1)],
            col_minimal: vec![mi(1, 1)],
            ..Default::default()
        });
        let v = is_singular(&p, &tol).unwrap();
        assert!(v.singular);
        assert_eq!(normal_rank(&p, &tol).unwrap(), 2);
    }

    #[test]
    fn normal_rank_extremes() {
        let tol = ToleranceConfig::default();
        let id = Pencil::new(CMatrix::identity(3), CMatrix::identity(3)).unwrap();
        assert_eq!(normal_rank(&id, &tol).unwrap(), 3);
        let z = Pencil::new(CMatrix::zeros(3, 3), CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(normal_rank(&z, &tol).unwrap(), 0);
    }
}
