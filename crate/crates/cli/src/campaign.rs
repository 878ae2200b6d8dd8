use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use pencillab::commuting::verify_necessity;
use pencillab::corpus::{commuting_pair, random_structure, singular_pencil};
use pencillab::kronecker::{assemble, scramble, staircase_structure, KroneckerStructure};
use pencillab::linalg::numerical_rank;
use pencillab::numrange::{isotropic_from_singular, pencil_nr_is_plane, SweepConfig};
use pencillab::random::{derive_seed, rng};
use pencillab::taylor::{spectrum_invertible_characterization, spectrum_via_singularity, taylor_spectrum};
use pencillab::{CMatrix, Error, Pencil, Result, ToleranceConfig};

use crate::CliError;

pub const STRUCTURE_MAX_DIM: usize = 12;
pub const PAIR_MAX_N: usize = 10;
pub const SINGULAR_MAX_DIM: usize = 10;
/// Point-set tolerance when comparing two spectra.
pub const SPECTRUM_EPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Staircase recovers the structure of a scrambled canonical pencil.
    KroneckerRoundtrip,
    /// Koszul exactness against shifted-pencil regularity at every candidate.
    CrossOracle,
    /// Eigenvalue-ratio characterization against the joint spectrum.
    RatioCharacterization,
    /// Block-count inequalities for commuting pairs.
    Necessity,
    /// Isotropic certificate and plane-filling range for singular pencils.
    SingularChain,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::KroneckerRoundtrip,
        Suite::CrossOracle,
        Suite::RatioCharacterization,
        Suite::Necessity,
        Suite::SingularChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::KroneckerRoundtrip => "kronecker-roundtrip",
            Suite::CrossOracle => "cross-oracle",
            Suite::RatioCharacterization => "ratio-characterization",
            Suite::Necessity => "necessity",
            Suite::SingularChain => "singular-chain",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Structures,
    Commuting,
    Singular,
    All,
}

impl Generator {
    pub fn suites(self) -> &'static [Suite] {
        match self {
            Generator::Structures => &[Suite::KroneckerRoundtrip],
            Generator::Commuting => &[Suite::CrossOracle, Suite::RatioCharacterization, Suite::Necessity],
            Generator::Singular => &[Suite::SingularChain],
            Generator::All => &Suite::ALL,
        }
    }
}

/// The data a suite checks, stored verbatim in failure artifacts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Instance {
    Scrambled {
        pencil: Pencil,
        expected: KroneckerStructure,
    },
    Pair {
        a: CMatrix,
        b: CMatrix,
    },
    Singular {
        pencil: Pencil,
        expected: KroneckerStructure,
    },
}

/// The instance a suite checks for one seed.
pub fn generate(suite: Suite, seed: u64) -> Instance {
    match suite {
        Suite::KroneckerRoundtrip => {
            let expected = random_structure(&mut rng(seed), STRUCTURE_MAX_DIM);
            let (pencil, _) = scramble(&assemble(&expected), derive_seed(seed, 1));
            Instance::Scrambled { pencil, expected }
        }
        Suite::CrossOracle | Suite::RatioCharacterization | Suite::Necessity => {
            let c = commuting_pair(seed, PAIR_MAX_N);
            Instance::Pair { a: c.a, b: c.b }
        }
        Suite::SingularChain => {
            let (pencil, expected) = singular_pencil(seed, SINGULAR_MAX_DIM);
            Instance::Singular { pencil, expected }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    /// The property does not apply to this instance.
    Skip {
        reason: String,
    },
    /// A rank decision or iteration could not be made reliably.
    Unstable {
        detail: String,
    },
    Fail {
        kind: String,
        detail: String,
    },
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NoConvergence { .. } => "no-convergence",
        Error::Shape(_) => "shape",
        Error::Parse(_) => "parse",
        Error::SingularPencil => "singular-pencil",
        Error::NotSingular => "not-singular",
        Error::RankDecisionUnstable { .. } => "rank-decision-unstable",
        Error::InconsistentSingularityEvidence { .. } => "inconsistent-singularity-evidence",
        Error::NotCommuting { .. } => "not-commuting",
        Error::NotInvertible(_) => "not-invertible",
        Error::OracleDisagreement { .. } => "oracle-disagreement",
        Error::ImplicationViolated { .. } => "implication-violated",
        Error::InvalidStructure(_) => "invalid-structure",
        Error::EqualityConditionFails(_) => "equality-condition-fails",
        Error::TransformUnavailable(_) => "transform-unavailable",
        Error::TooLarge { .. } => "too-large",
        Error::StructureMismatch(_) => "structure-mismatch",
    }
}

fn from_error(e: Error) -> Verdict {
    match e {
        Error::RankDecisionUnstable { .. } | Error::NoConvergence { .. } => Verdict::Unstable { detail: e.to_string() },
        _ => Verdict::Fail {
            kind: error_kind(&e).into(),
            detail: e.to_string(),
        },
    }
}

fn fail(kind: &str, detail: String) -> Verdict {
    Verdict::Fail {
        kind: kind.into(),
        detail,
    }
}

fn check_pair(suite: Suite, a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<Verdict> {
    match suite {
        Suite::CrossOracle => {
            let via = spectrum_via_singularity(a, b, tol)?;
            let ts = taylor_spectrum(a, b, tol)?;
            if ts.points.is_empty() {
                return Ok(fail("empty-spectrum", "no joint spectrum points".into()));
            }
            Ok(if via.same_points(&ts, SPECTRUM_EPS) {
                Verdict::Pass
            } else {
                fail(
                    "spectrum-mismatch",
                    format!("koszul {:?} vs singularity {:?}", ts.pairs(), via.pairs()),
                )
            })
        }
        Suite::RatioCharacterization => {
            let n = a.rows();
            if numerical_rank(a, tol)? < n || numerical_rank(b, tol)? < n {
                return Ok(Verdict::Skip {
                    reason: "pair is not invertible".into(),
                });
            }
            let ratio = spectrum_invertible_characterization(a, b, tol)?;
            let ts = taylor_spectrum(a, b, tol)?;
            Ok(if ratio.same_points(&ts, SPECTRUM_EPS) {
                Verdict::Pass
            } else {
                fail(
                    "spectrum-mismatch",
                    format!("ratio {:?} vs koszul {:?}", ratio.pairs(), ts.pairs()),
                )
            })
        }
        Suite::Necessity => {
            let r = verify_necessity(a, b, tol)?;
            Ok(if r.holds {
                Verdict::Pass
            } else {
                fail(
                    "inequality-violated",
                    format!("{:?} violates {:?}", r.structure, r.feasibility.violations),
                )
            })
        }
        _ => unreachable!("pair suites only"),
    }
}

fn check_inner(suite: Suite, instance: &Instance, tol: &ToleranceConfig, sweep: &SweepConfig) -> Result<Verdict> {
    match (suite, instance) {
        (Suite::KroneckerRoundtrip, Instance::Scrambled { pencil, expected }) => {
            let got = staircase_structure(pencil, tol)?;
            Ok(if got.approx_eq(expected, 1e-6) {
                Verdict::Pass
            } else {
                fail(
                    "structure-mismatch",
                    format!("expected {expected:?}, recovered {got:?}"),
                )
            })
        }
        (Suite::CrossOracle | Suite::RatioCharacterization | Suite::Necessity, Instance::Pair { a, b }) => {
            check_pair(suite, a, b, tol)
        }
        (Suite::SingularChain, Instance::Singular { pencil, .. }) => {
            let c = isotropic_from_singular(pencil, tol, sweep)?;
            if !c.verify(&pencil.a, &pencil.b) {
                return Ok(fail(
                    "invalid-certificate",
                    format!("residuals {:e}, {:e}", c.residual_a, c.residual_b),
                ));
            }
            Ok(if pencil_nr_is_plane(&pencil.a, &pencil.b, sweep)? {
                Verdict::Pass
            } else {
                fail(
                    "range-not-plane",
                    "origin separated from the joint numerical range".into(),
                )
            })
        }
        _ => Err(Error::Parse(format!("suite {suite} cannot check this instance kind"))),
    }
}

/// Runs one property on one instance.
pub fn check(suite: Suite, instance: &Instance, tol: &ToleranceConfig, sweep: &SweepConfig) -> Verdict {
    check_inner(suite, instance, tol, sweep).unwrap_or_else(from_error)
}

/// A failing or unstable instance, replayable on its own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub suite: Suite,
    pub index: u64,
    pub seed: u64,
    pub tolerances: ToleranceConfig,
    pub sweep: SweepConfig,
    pub instance: Instance,
    pub verdict: Verdict,
}

impl Artifact {
    pub fn file_name(&self) -> String {
        format!("{}-{:04}.json", self.suite, self.index)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub index: u64,
    pub seed: u64,
    pub verdict: Verdict,
    pub artifact: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub instances: u64,
    pub passed: u64,
    pub skipped: u64,
    pub unstable: u64,
    pub failed: u64,
    pub findings: Vec<Finding>,
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub generator: Generator,
    pub count: u64,
    pub seed: u64,
    pub tol: ToleranceConfig,
    pub sweep: SweepConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignSummary {
    pub generator: Generator,
    pub count: u64,
    pub seed: u64,
    pub tolerances: ToleranceConfig,
    pub suites: Vec<SuiteSummary>,
    pub failed: u64,
}

pub struct CampaignOutcome {
    pub summary: CampaignSummary,
    pub artifacts: Vec<Artifact>,
}

/// Seed of instance `index`; every suite of a family sees the same instance.
pub fn instance_seed(campaign_seed: u64, index: u64) -> u64 {
    derive_seed(campaign_seed, index)
}

pub fn run_suite(suite: Suite, config: &CampaignConfig) -> (SuiteSummary, Vec<Artifact>) {
    let mut s = SuiteSummary {
        suite,
        instances: config.count,
        passed: 0,
        skipped: 0,
        unstable: 0,
        failed: 0,
        findings: Vec::new(),
    };
    let mut artifacts = Vec::new();
    for index in 0..config.count {
        let seed = instance_seed(config.seed, index);
        let instance = generate(suite, seed);
        let verdict = check(suite, &instance, &config.tol, &config.sweep);
        match &verdict {
            Verdict::Pass => s.passed += 1,
            Verdict::Skip { .. } => s.skipped += 1,
            Verdict::Unstable { .. } => s.unstable += 1,
            Verdict::Fail { .. } => s.failed += 1,
        }
        if matches!(verdict, Verdict::Unstable { .. } | Verdict::Fail { .. }) {
            let a = Artifact {
                suite,
                index,
                seed,
                tolerances: config.tol,
                sweep: config.sweep,
                instance,
                verdict: verdict.clone(),
            };
            s.findings.push(Finding {
                index,
                seed,
                verdict,
                artifact: a.file_name(),
            });
            artifacts.push(a);
        }
    }
    (s, artifacts)
}

/// Runs the generator's suites in order. Instances are checked sequentially,
/// so the summary does not depend on scheduling.
pub fn run_campaign(config: &CampaignConfig) -> std::result::Result<CampaignOutcome, CliError> {
    config.tol.validate()?;
    let mut suites = Vec::new();
    let mut artifacts = Vec::new();
    for &suite in config.generator.suites() {
        let (s, a) = run_suite(suite, config);
        suites.push(s);
        artifacts.extend(a);
    }
    let failed = suites.iter().map(|s| s.failed).sum();
    Ok(CampaignOutcome {
        summary: CampaignSummary {
            generator: config.generator,
            count: config.count,
            seed: config.seed,
            tolerances: config.tol,
            suites,
            failed,
        },
        artifacts,
    })
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> std::result::Result<Vec<PathBuf>, CliError> {
    if artifacts.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(a.file_name());
            std::fs::write(&path, crate::to_json(a))
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub suite: Suite,
    pub index: u64,
    pub seed: u64,
    pub recorded: Verdict,
    pub replayed: Verdict,
    pub reproduced: bool,
}

pub fn replay(artifact: &Artifact) -> ReplayReport {
    let replayed = check(
        artifact.suite,
        &artifact.instance,
        &artifact.tolerances,
        &artifact.sweep,
    );
    ReplayReport {
        suite: artifact.suite,
        index: artifact.index,
        seed: artifact.seed,
        reproduced: replayed == artifact.verdict,
        recorded: artifact.verdict.clone(),
        replayed,
    }
}

pub fn load_artifact(text: &str) -> std::result::Result<Artifact, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid artifact: {e}")))
}
