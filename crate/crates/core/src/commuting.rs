//! The intertwiner equation `AMB = BMA` on singular canonical forms, the
//! block-count inequalities satisfied by commuting pencils, and multipliers
//! `E` for which `EA` and `EB` commute.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kronecker::{assemble, staircase_structure, EquivalencePair, KroneckerStructure, MinimalIndex};
use crate::linalg::{null_space_against, numerical_rank, CMatrix, ToleranceConfig};
use crate::pencil::Pencil;
use crate::random::{derive_seed, gaussian, rng};
use crate::taylor::require_commuting;
use crate::C64;

/// Largest dimension accepted by the `n^2 x n^2` brute-force solve.
pub const MAX_INTERTWINER_DIM: usize = 12;

/// Entries of pattern checks and commutators are compared against this
/// fraction of the relevant norm.
pub const PATTERN_TOL: f64 = 1e-8;

/// A canonical form built only from `L_delta^T` and `L_eps` blocks. The
/// index-0 groups are kept even when empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularStructure {
    pub row_minimal: Vec<MinimalIndex>,
    pub col_minimal: Vec<MinimalIndex>,
}

fn normalise(list: &[MinimalIndex]) -> Vec<MinimalIndex> {
    let mut out = vec![MinimalIndex {
        index: 0,
        multiplicity: 0,
    }];
    for m in list {
        match out.iter_mut().find(|g| g.index == m.index) {
            Some(g) => g.multiplicity += m.multiplicity,
            None => out.push(*m),
        }
    }
    out.retain(|g| g.index == 0 || g.multiplicity > 0);
    out.sort_by_key(|g| g.index);
    out
}

impl SingularStructure {
    pub fn new(row_minimal: &[MinimalIndex], col_minimal: &[MinimalIndex]) -> Self {
        SingularStructure {
            row_minimal: normalise(row_minimal),
            col_minimal: normalise(col_minimal),
        }
    }

    /// `(delta, n)` and `(eps, m)` pairs, for compact construction in tests.
    pub fn from_pairs(rows: &[(usize, usize)], cols: &[(usize, usize)]) -> Self {
        let mk = |v: &[(usize, usize)]| {
            v.iter()
                .map(|&(index, multiplicity)| MinimalIndex { index, multiplicity })
                .collect::<Vec<_>>()
        };
        Self::new(&mk(rows), &mk(cols))
    }

    /// The singular part of a Kronecker structure; fails when regular blocks are present.
    pub fn from_kronecker(s: &KroneckerStructure) -> Result<Self> {
        if !s.jordan.is_empty() || !s.nilpotent.is_empty() {
            return Err(Error::InvalidStructure(format!(
                "{} Jordan and {} nilpotent blocks present; only singular blocks are allowed",
                s.jordan.len(),
                s.nilpotent.len()
            )));
        }
        Ok(Self::new(&s.row_minimal, &s.col_minimal))
    }

    pub fn to_kronecker(&self) -> KroneckerStructure {
        KroneckerStructure {
            row_minimal: self.row_minimal.clone(),
            col_minimal: self.col_minimal.clone(),
            ..Default::default()
        }
        .canonical()
    }

    pub fn size(&self) -> usize {
        self.to_kronecker().rows()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.to_kronecker();
        if k.rows() != k.cols() {
            return Err(Error::InvalidStructure(format!(
                "{} L^T blocks and {} L blocks give a {}x{} pencil",
                k.row_block_count(),
                k.col_block_count(),
                k.rows(),
                k.cols()
            )));
        }
        Ok(())
    }

    pub fn assemble(&self) -> Pencil {
        assemble(&self.to_kronecker())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockForm {
    Zero,
    Free,
    /// `X[r][c] = t[r - c]`, nonzero only for `0 <= r - c < width`.
    LowerToeplitz {
        width: usize,
    },
    /// `X[r][c] = t[c - r]`, nonzero only for `0 <= c - r < width`.
    UpperToeplitz {
        width: usize,
    },
    /// `X[r][c] = h[r + c]`.
    Hankel,
}

/// One block of `M` between a canonical block row and block column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternBlock {
    pub block_row: usize,
    pub block_col: usize,
    pub row_offset: usize,
    pub col_offset: usize,
    pub rows: usize,
    pub cols: usize,
    pub form: BlockForm,
    pub parameters: usize,
}

impl PatternBlock {
    /// Position of each entry in the block's parameter vector, if it is not forced to zero.
    fn slot(&self, r: usize, c: usize) -> Option<usize> {
        match self.form {
            BlockForm::Zero => None,
            BlockForm::Free => Some(r * self.cols + c),
            BlockForm::LowerToeplitz { width } => (r >= c && r - c < width).then(|| r - c),
            BlockForm::UpperToeplitz { width } => (c >= r && c - r < width).then(|| c - r),
            BlockForm::Hankel => Some(r + c),
        }
    }
}

/// Shape of the solution set of `AMB = BMA` for an assembled singular structure.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntertwinerPattern {
    pub size: usize,
    pub zero_blocks: Vec<PatternBlock>,
    pub toeplitz_blocks: Vec<PatternBlock>,
    pub hankel_blocks: Vec<PatternBlock>,
    pub free_blocks: Vec<PatternBlock>,
}

impl IntertwinerPattern {
    pub fn blocks(&self) -> impl Iterator<Item = &PatternBlock> {
        self.zero_blocks
            .iter()
            .chain(&self.toeplitz_blocks)
            .chain(&self.hankel_blocks)
            .chain(&self.free_blocks)
    }

    pub fn parameter_count(&self) -> usize {
        self.blocks().map(|b| b.parameters).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Side {
    RowMinimal,
    ColMinimal,
}

/// Individual canonical blocks in assembly order.
fn block_list(s: &SingularStructure) -> Vec<(Side, usize)> {
    let k = s.to_kronecker();
    let mut out = Vec::new();
    for m in &k.row_minimal {
        out.extend(std::iter::repeat_n((Side::RowMinimal, m.index), m.multiplicity));
    }
    for m in &k.col_minimal {
        out.extend(std::iter::repeat_n((Side::ColMinimal, m.index), m.multiplicity));
    }
    out
}

/// Rows of `M` facing a block: the number of columns of that block.
fn m_rows(b: (Side, usize)) -> usize {
    match b {
        (Side::RowMinimal, d) => d,
        (Side::ColMinimal, e) => e + 1,
    }
}

/// Columns of `M` facing a block: the number of rows of that block.
fn m_cols(b: (Side, usize)) -> usize {
    match b {
        (Side::RowMinimal, d) => d + 1,
        (Side::ColMinimal, e) => e,
    }
}

fn block_form(row: (Side, usize), col: (Side, usize)) -> (BlockForm, usize) {
    let (rows, cols) = (m_rows(row), m_cols(col));
    let (form, parameters) = match (row, col) {
        ((Side::RowMinimal, di), (Side::RowMinimal, dj)) => {
            let w = di.saturating_sub(dj);
            (BlockForm::LowerToeplitz { width: w }, w)
        }
        ((Side::RowMinimal, _), (Side::ColMinimal, _)) => (BlockForm::Zero, 0),
        ((Side::ColMinimal, e), (Side::RowMinimal, d)) => (BlockForm::Hankel, e + d + 1),
        ((Side::ColMinimal, ei), (Side::ColMinimal, ej)) => {
            let w = ej.saturating_sub(ei);
            (BlockForm::UpperToeplitz { width: w }, w)
        }
    };
    if parameters == 0 {
        (BlockForm::Zero, 0)
    } else if parameters == rows * cols {
        (BlockForm::Free, parameters)
    } else {
        (form, parameters)
    }
}

/// Block-by-block pattern of `{M : AMB = BMA}` for the assembled structure.
pub fn intertwiner_pattern(s: &SingularStructure) -> Result<IntertwinerPattern> {
    s.validate()?;
    let blocks = block_list(s);
    let mut out = IntertwinerPattern {
        size: s.size(),
        ..Default::default()
    };
    let mut row_offset = 0;
    for (i, &rb) in blocks.iter().enumerate() {
        let mut col_offset = 0;
        for (j, &cb) in blocks.iter().enumerate() {
            let (rows, cols) = (m_rows(rb), m_cols(cb));
            if rows > 0 && cols > 0 {
                let (form, parameters) = block_form(rb, cb);
                let blk = PatternBlock {
                    block_row: i,
                    block_col: j,
                    row_offset,
                    col_offset,
                    rows,
                    cols,
                    form,
                    parameters,
                };
                match form {
                    BlockForm::Zero => out.zero_blocks.push(blk),
                    BlockForm::Free => out.free_blocks.push(blk),
                    BlockForm::Hankel => out.hankel_blocks.push(blk),
                    _ => out.toeplitz_blocks.push(blk),
                }
            }
            col_offset += cols;
        }
        row_offset += m_rows(rb);
    }
    Ok(out)
}

/// Number of free parameters in the intertwiner pattern.
pub fn pattern_parameter_count(s: &SingularStructure) -> Result<usize> {
    Ok(intertwiner_pattern(s)?.parameter_count())
}

/// Whether `m` has the intertwiner pattern of `s`: forced zeros vanish and
/// Toeplitz and Hankel blocks are constant along their diagonals.
pub fn matches_pattern(m: &CMatrix, s: &SingularStructure, tol: f64) -> bool {
    let Ok(pattern) = intertwiner_pattern(s) else {
        return false;
    };
    if m.shape() != (pattern.size, pattern.size) {
        return false;
    }
    let bound = tol * m.norm_fro();
    for blk in pattern.blocks() {
        let mut first: Vec<Option<C64>> = vec![None; blk.rows * blk.cols + blk.rows + blk.cols];
        for r in 0..blk.rows {
            for c in 0..blk.cols {
                let x = m[(blk.row_offset + r, blk.col_offset + c)];
                match blk.slot(r, c) {
                    None if x.norm() > bound => return false,
                    None => {}
                    Some(k) => match first[k] {
                        Some(y) if (x - y).norm() > bound => return false,
                        Some(_) => {}
                        None => first[k] = Some(x),
                    },
                }
            }
        }
    }
    true
}

/// A random matrix with the pattern of `s`, every free parameter Gaussian.
pub fn sample_pattern(s: &SingularStructure, seed: u64) -> Result<CMatrix> {
    let pattern = intertwiner_pattern(s)?;
    let mut r = rng(seed);
    let mut m = CMatrix::zeros(pattern.size, pattern.size);
    for blk in pattern.blocks() {
        let params: Vec<C64> = (0..blk.rows * blk.cols + blk.rows + blk.cols)
            .map(|_| gaussian(&mut r))
            .collect();
        for rr in 0..blk.rows {
            for cc in 0..blk.cols {
                if let Some(k) = blk.slot(rr, cc) {
                    m[(blk.row_offset + rr, blk.col_offset + cc)] = params[k];
                }
            }
        }
    }
    Ok(m)
}

/// Orthonormal basis (Frobenius inner product) of `{M : AMB = BMA}`.
#[derive(Clone, Debug)]
pub struct IntertwinerSpace {
    pub dimension: usize,
    pub basis: Vec<CMatrix>,
}

/// `AMB - BMA`.
pub fn intertwiner_residual(a: &CMatrix, b: &CMatrix, m: &CMatrix) -> CMatrix {
    &a.matmul(m).matmul(b) - &b.matmul(m).matmul(a)
}

/// Null space of `M -> AMB - BMA` on row-major `vec(M)`, where the map is
/// `A kron B^T - B kron A^T`.
pub fn intertwiner_space(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<IntertwinerSpace> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "intertwiner space needs square matrices of equal size, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let n = a.rows();
    if n > MAX_INTERTWINER_DIM {
        return Err(Error::TooLarge {
            n,
            max: MAX_INTERTWINER_DIM,
        });
    }
    if n == 0 {
        return Ok(IntertwinerSpace {
            dimension: 0,
            basis: Vec::new(),
        });
    }
    let op = &a.kron(&b.transpose()) - &b.kron(&a.transpose());
    let (ns, _) = null_space_against(&op, tol, 2.0 * a.norm_fro() * b.norm_fro())?;
    let basis = (0..ns.cols())
        .map(|k| CMatrix::from_vec(n, n, ns.column(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntertwinerSpace {
        dimension: basis.len(),
        basis,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimalFamily {
    Row,
    Column,
}

/// A failed inequality `index * multiplicity <= sum of earlier multiplicities`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub family: MinimalFamily,
    /// Position of the group among the nonzero indices, starting at 1.
    pub group: usize,
    pub index: usize,
    pub lhs: usize,
    pub rhs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    /// Every inequality holds with equality (both families).
    pub equality: bool,
    pub violations: Vec<Violation>,
}

fn check_family(list: &[MinimalIndex], family: MinimalFamily, violations: &mut Vec<Violation>) -> bool {
    let groups = normalise(list);
    let mut earlier = groups[0].multiplicity;
    let mut equality = true;
    for (i, g) in groups.iter().enumerate().skip(1) {
        let lhs = g.index * g.multiplicity;
        if lhs > earlier {
            violations.push(Violation {
                family,
                group: i,
                index: g.index,
                lhs,
                rhs: earlier,
            });
        }
        equality &= lhs == earlier;
        earlier += g.multiplicity;
    }
    equality
}

/// The block-count inequalities that every pencil with commuting
/// coefficients satisfies. Regular blocks do not enter.
pub fn commuting_feasible(s: &KroneckerStructure) -> Feasibility {
    let mut violations = Vec::new();
    let eq_rows = check_family(&s.row_minimal, MinimalFamily::Row, &mut violations);
    let eq_cols = check_family(&s.col_minimal, MinimalFamily::Column, &mut violations);
    Feasibility {
        feasible: violations.is_empty(),
        equality: violations.is_empty() && eq_rows && eq_cols,
        violations,
    }
}

/// Evidence for the necessity check on one commuting pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub holds: bool,
    pub structure: KroneckerStructure,
    pub feasibility: Feasibility,
}

/// Staircase structure of a commuting pair together with the inequality check.
pub fn verify_necessity(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<NecessityReport> {
    require_commuting(a, b)?;
    let structure = staircase_structure(&Pencil::new(a.clone(), b.clone())?, tol)?;
    let feasibility = commuting_feasible(&structure);
    Ok(NecessityReport {
        holds: feasibility.feasible,
        structure,
        feasibility,
    })
}

fn identity_into(p: &mut CMatrix, r0: usize, c0: usize, size: usize) {
    for k in 0..size {
        p[(r0 + k, c0 + k)] = C64::new(1.0, 0.0);
    }
}

/// The permutation-like `P` for a structure whose inequalities hold with
/// equality. Group `i` of `L^T` rows feeds column group `i - 1`; group `j`
/// of `L` rows feeds `L` column group `j + 1`, and the last `L` row group
/// is an anti-identity onto the last `L^T` column group.
pub fn multiplier_pattern(s: &SingularStructure) -> Result<CMatrix> {
    s.validate()?;
    let f = commuting_feasible(&s.to_kronecker());
    if !f.equality {
        return Err(Error::EqualityConditionFails(if f.violations.is_empty() {
            "inequalities hold but not all with equality".into()
        } else {
            format!("{} inequalities violated", f.violations.len())
        }));
    }
    let rows = &s.row_minimal;
    let cols = &s.col_minimal;
    let n = s.size();
    // Offsets of the groups inside M.
    let ltr_row_height: Vec<usize> = rows.iter().map(|g| g.index * g.multiplicity).collect();
    let ltr_col_width: Vec<usize> = rows.iter().map(|g| (g.index + 1) * g.multiplicity).collect();
    let l_row_height: Vec<usize> = cols.iter().map(|g| (g.index + 1) * g.multiplicity).collect();
    let l_col_width: Vec<usize> = cols.iter().map(|g| g.index * g.multiplicity).collect();
    let prefix = |v: &[usize], base: usize| {
        let mut acc = base;
        v.iter()
            .map(|&x| {
                let o = acc;
                acc += x;
                o
            })
            .collect::<Vec<_>>()
    };
    let ltr_rows_total: usize = ltr_row_height.iter().sum();
    let ltr_cols_total: usize = ltr_col_width.iter().sum();
    let ltr_row_off = prefix(&ltr_row_height, 0);
    let ltr_col_off = prefix(&ltr_col_width, 0);
    let l_row_off = prefix(&l_row_height, ltr_rows_total);
    let l_col_off = prefix(&l_col_width, ltr_cols_total);

    let mut p = CMatrix::zeros(n, n);
    for i in 1..rows.len() {
        identity_into(&mut p, ltr_row_off[i], ltr_col_off[i - 1], ltr_row_height[i]);
    }
    for j in 0..cols.len() - 1 {
        identity_into(&mut p, l_row_off[j], l_col_off[j + 1], l_row_height[j]);
    }
    let (last_l, last_t) = (cols.len() - 1, rows.len() - 1);
    let size = l_row_height[last_l];
    debug_assert_eq!(size, ltr_col_width[last_t]);
    for k in 0..size {
        p[(l_row_off[last_l] + k, ltr_col_off[last_t] + size - 1 - k)] = C64::new(1.0, 0.0);
    }
    Ok(p)
}

/// `||(EA)(EB) - (EB)(EA)|| / (||EA|| ||EB||)`, or the raw norm when either factor vanishes.
pub fn relative_commutator(e: &CMatrix, a: &CMatrix, b: &CMatrix) -> f64 {
    let ea = e.matmul(a);
    let eb = e.matmul(b);
    let c = ea.commutator(&eb).norm_fro();
    let scale = ea.norm_fro() * eb.norm_fro();
    if scale > 0.0 {
        c / scale
    } else {
        c
    }
}

fn checked_multiplier(e: CMatrix, p: &Pencil, tol: &ToleranceConfig) -> Result<CMatrix> {
    if numerical_rank(&e, tol)? < p.rows() {
        return Err(Error::TransformUnavailable("multiplier is numerically singular".into()));
    }
    let rel = relative_commutator(&e, &p.a, &p.b);
    if rel > PATTERN_TOL {
        return Err(Error::TransformUnavailable(format!(
            "multiplier leaves a relative commutator of {rel:.3e}"
        )));
    }
    Ok(e)
}

/// `E = T P S` for a pencil with `S (A + lambda B) T` equal to the canonical
/// form of `s`.
pub fn construct_multiplier_with(
    p: &Pencil,
    s: &SingularStructure,
    transforms: &EquivalencePair,
    tol: &ToleranceConfig,
) -> Result<CMatrix> {
    let pm = multiplier_pattern(s)?;
    if p.rows() != s.size() || !p.is_square() {
        return Err(Error::Shape(format!(
            "pencil is {}x{}, structure has size {}",
            p.rows(),
            p.cols(),
            s.size()
        )));
    }
    checked_multiplier(transforms.t.matmul(&pm).matmul(&transforms.s), p, tol)
}

/// Invertible `E` with `EA EB = EB EA` for a pencil made only of singular
/// blocks whose inequalities hold with equality. The staircase recovers the
/// structure but not the transforms, so the pencil must already be in
/// canonical form; otherwise use [`construct_multiplier_with`].
pub fn construct_multiplier(p: &Pencil, tol: &ToleranceConfig) -> Result<CMatrix> {
    if !p.is_square() {
        return Err(Error::Shape(format!("pencil is {}x{}", p.rows(), p.cols())));
    }
    let k = staircase_structure(p, tol)?;
    let s = SingularStructure::from_kronecker(&k).map_err(|e| Error::EqualityConditionFails(e.to_string()))?;
    multiplier_pattern(&s)?;
    let canonical = s.assemble();
    let scale = p.a.norm_fro().max(p.b.norm_fro()).max(1.0);
    let off = (&canonical.a - &p.a).norm_fro().max((&canonical.b - &p.b).norm_fro());
    if off > PATTERN_TOL * scale {
        return Err(Error::TransformUnavailable(
            "pencil is not in canonical form and the staircase does not return transforms".into(),
        ));
    }
    let n = p.rows();
    let id = EquivalencePair {
        s: CMatrix::identity(n),
        t: CMatrix::identity(n),
    };
    construct_multiplier_with(p, &s, &id, tol)
}

/// Outcome of the randomized multiplier search.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplierSearch {
    pub found: bool,
    pub attempts: usize,
    pub intertwiner_dimension: usize,
    pub relative_commutator: Option<f64>,
    pub multiplier: Option<CMatrix>,
    pub evidence: &'static str,
}

/// Label carried by every [`MultiplierSearch`].
pub const SEARCH_EVIDENCE: &str = "conjecture-level evidence";

/// Experimental search for an invertible `E` making `EA`, `EB` commute.
/// For invertible `E` the condition is `AEB = BEA`, so random elements of
/// the intertwiner space are tried. Failure after `attempts` draws is not a
/// proof that no multiplier exists.
pub fn search_multiplier(p: &Pencil, tol: &ToleranceConfig, seed: u64, attempts: usize) -> Result<MultiplierSearch> {
    let space = intertwiner_space(&p.a, &p.b, tol)?;
    let mut out = MultiplierSearch {
        found: false,
        attempts: 0,
        intertwiner_dimension: space.dimension,
        relative_commutator: None,
        multiplier: None,
        evidence: SEARCH_EVIDENCE,
    };
    let n = p.rows();
    for k in 0..attempts {
        out.attempts = k + 1;
        let mut r = rng(derive_seed(seed, k as u64));
        let mut e = CMatrix::zeros(n, n);
        for m in &space.basis {
            e = &e + &m.scale(gaussian(&mut r));
        }
        if let Ok(e) = checked_multiplier(e, p, tol) {
            out.relative_commutator = Some(relative_commutator(&e, &p.a, &p.b));
            out.multiplier = Some(e);
            out.found = true;
            break;
        }
    }
    Ok(out)
}
