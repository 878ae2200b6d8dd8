use serde::Serialize;

use pencillab::kronecker::{is_singular, staircase_structure, KroneckerStructure, SingularityVerdict};
use pencillab::numrange::{HullMembership, IsotropicCertificate, SweepConfig};
use pencillab::taylor::{check_commuting, conditions, spectrum_via_singularity, taylor_spectrum, TaylorSpectrum};
use pencillab::{Error, Pencil, Result, ToleranceConfig};

use crate::is_violation;

/// A report section: its value, or the error that stopped it.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Section<T> {
    Computed(T),
    Failed(String),
}

impl<T> Section<T> {
    /// Keeps ordinary numerical failures in the report; violations abort.
    fn from_result(r: Result<T>) -> Result<Self> {
        match r {
            Ok(v) => Ok(Section::Computed(v)),
            Err(e) if is_violation(&e) => Err(e),
            Err(e) => Ok(Section::Failed(e.to_string())),
        }
    }

    pub fn computed(&self) -> Option<&T> {
        match self {
            Section::Computed(v) => Some(v),
            Section::Failed(_) => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub rows: usize,
    pub cols: usize,
    pub norm_a: f64,
    pub norm_b: f64,
    /// `||AB - BA||_F`, for square input.
    pub commutator: Option<f64>,
}

/// The four conditions `(0)` origin in the Taylor spectrum, `(i)` singular
/// pencil, `(ii)` origin in `W(A, B)`, `(iii)` the pencil's numerical range is
/// the whole plane. `None` means not applicable or undecided.
#[derive(Clone, Debug, Serialize)]
pub struct Conditions {
    pub zero_in_taylor: Option<bool>,
    pub singular: bool,
    pub zero_in_joint_range: Option<bool>,
    pub pencil_range_is_plane: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificates {
    pub isotropic: Option<IsotropicCertificate>,
    pub hull: HullMembership,
}

#[derive(Clone, Debug, Serialize)]
pub struct JointSpectrum {
    pub spectrum: TaylorSpectrum,
    /// Same points from the shifted-pencil singularity test.
    pub singularity_oracle_agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub input: InputDigest,
    pub structure: Section<KroneckerStructure>,
    pub singularity: Option<Section<SingularityVerdict>>,
    pub conditions: Option<Section<Conditions>>,
    pub certificates: Option<Certificates>,
    pub taylor: Option<Section<JointSpectrum>>,
    pub tolerances: ToleranceConfig,
    pub sweep: SweepConfig,
    pub seed: u64,
}

fn joint_spectrum(p: &Pencil, tol: &ToleranceConfig) -> Result<JointSpectrum> {
    let spectrum = taylor_spectrum(&p.a, &p.b, tol)?;
    let other = spectrum_via_singularity(&p.a, &p.b, tol)?;
    let singularity_oracle_agrees = other.same_points(&spectrum, 1e-8);
    if !singularity_oracle_agrees {
        let point = spectrum
            .pairs()
            .into_iter()
            .find(|&(z1, z2)| !other.contains(z1, z2, 1e-8))
            .or_else(|| {
                other
                    .pairs()
                    .into_iter()
                    .find(|&(z1, z2)| !spectrum.contains(z1, z2, 1e-8))
            });
        if let Some(point) = point {
            return Err(Error::OracleDisagreement {
                point,
                koszul: !spectrum.contains(point.0, point.1, 1e-8),
                singular: other.contains(point.0, point.1, 1e-8),
            });
        }
    }
    Ok(JointSpectrum {
        spectrum,
        singularity_oracle_agrees,
    })
}

/// Everything the library can say about one pencil. Theorem violations and
/// oracle disagreements are returned as errors; other numerical failures are
/// recorded in the affected section.
pub fn analyze(p: &Pencil, tol: &ToleranceConfig, sweep: &SweepConfig) -> Result<AnalysisReport> {
    tol.validate()?;
    let square = p.is_square();
    let input = InputDigest {
        rows: p.rows(),
        cols: p.cols(),
        norm_a: p.a.norm_fro(),
        norm_b: p.b.norm_fro(),
        commutator: square.then(|| p.a.commutator(&p.b).norm_fro()),
    };
    let structure = Section::from_result(staircase_structure(p, tol))?;
    let mut report = AnalysisReport {
        input,
        structure,
        singularity: None,
        conditions: None,
        certificates: None,
        taylor: None,
        tolerances: *tol,
        sweep: *sweep,
        seed: tol.seed,
    };
    if !square {
        return Ok(report);
    }
    report.singularity = Some(Section::from_result(is_singular(p, tol))?);
    match Section::from_result(conditions(&p.a, &p.b, tol, sweep))? {
        Section::Computed(c) => {
            report.conditions = Some(Section::Computed(Conditions {
                zero_in_taylor: c.zero_in_taylor,
                singular: c.singular,
                zero_in_joint_range: c.zero_in_joint_range,
                pencil_range_is_plane: c.pencil_range_is_plane,
            }));
            report.certificates = Some(Certificates {
                isotropic: c.certificate,
                hull: c.hull,
            });
        }
        Section::Failed(msg) => report.conditions = Some(Section::Failed(msg)),
    }
    if check_commuting(&p.a, &p.b)? {
        report.taylor = Some(Section::from_result(joint_spectrum(p, tol))?);
    }
    Ok(report)
}
