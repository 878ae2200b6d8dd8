use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances shared by every rank and zero decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Singular values at or below `rank_rel_tol * sigma_1 * max(m, n)` count as zero.
    pub rank_rel_tol: f64,
    /// Hadamard-normalised determinant ratio below which a sample counts as zero.
    pub det_zero_tol: f64,
    /// Relative radius for merging eigenvalues into one cluster.
    pub eig_cluster_tol: f64,
    /// Minimum number of sample points for determinant sampling.
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rank_rel_tol: 1e-10,
            det_zero_tol: 1e-9,
            eig_cluster_tol: 1e-8,
            sample_count: 64,
            seed: 0,
        }
    }
}

impl ToleranceConfig {
    pub fn with_seed(seed: u64) -> Self {
        ToleranceConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel_tol", self.rank_rel_tol),
            ("det_zero_tol", self.det_zero_tol),
            ("eig_cluster_tol", self.eig_cluster_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Parse(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if self.sample_count == 0 {
            return Err(Error::Parse("sample_count must be positive".into()));
        }
        Ok(())
    }

    /// Number of determinant sample points for an `n x n` pencil.
    pub fn det_nodes(&self, n: usize) -> usize {
        self.sample_count.max(2 * n + 2)
    }
}
