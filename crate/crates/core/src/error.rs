use thiserror::Error;

use crate::C64;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op} did not converge after {iterations} iterations")]
    NoConvergence { op: &'static str, iterations: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    Parse(String),

    #[error("pencil is singular")]
    SingularPencil,

    #[error("pencil is regular")]
    NotSingular,

    #[error(
        "rank decision unstable: singular value {singular_value:.3e} within a factor 10 of threshold {threshold:.3e}"
    )]
    RankDecisionUnstable { singular_value: f64, threshold: f64 },

    #[error("singularity evidence disagrees: staircase says {staircase}, determinant sampling says {determinant}")]
    InconsistentSingularityEvidence { staircase: bool, determinant: bool },

    #[error("matrices do not commute: ||AB - BA|| = {commutator:.3e} exceeds {bound:.3e}")]
    NotCommuting { commutator: f64, bound: f64 },

    #[error("{0} is not invertible")]
    NotInvertible(&'static str),

    #[error("oracles disagree at ({}, {}): koszul says {koszul}, pencil singularity says {singular}", fmt_c(.point.0), fmt_c(.point.1))]
    OracleDisagreement {
        point: (C64, C64),
        koszul: bool,
        singular: bool,
    },

    #[error("implication {implication} violated: {detail}")]
    ImplicationViolated { implication: &'static str, detail: String },

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("equality conditions fail: {0}")]
    EqualityConditionFails(String),

    #[error("canonical transforms unavailable: {0}")]
    TransformUnavailable(String),

    #[error("dimension {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },

    #[error("structure recovery inconsistent: {0}")]
    StructureMismatch(String),
}

fn fmt_c(z: C64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

pub type Result<T> = std::result::Result<T, Error>;
