use pencillab::taylor::{shift_row, ShiftRow};
use pencillab::{Result, ToleranceConfig, C64};

use crate::CliError;

pub const MAX_N: usize = 50;

/// Rows `n = 1..=n_max` of the truncated-shift experiment.
pub fn shift_table(n_max: usize, tol: &ToleranceConfig) -> std::result::Result<Vec<ShiftRow>, CliError> {
    if !(1..=MAX_N).contains(&n_max) {
        return Err(CliError::Input(format!("--nmax must lie in 1..={MAX_N}, got {n_max}")));
    }
    tol.validate()?;
    Ok((1..=n_max).map(|n| shift_row(n, tol)).collect::<Result<Vec<_>>>()?)
}

fn complex(z: C64) -> String {
    format!("{:e}:{:e}", z.re, z.im)
}

fn points(ps: &[(C64, C64)]) -> String {
    ps.iter()
        .map(|&(a, b)| format!("{}/{}", complex(a), complex(b)))
        .collect::<Vec<_>>()
        .join(";")
}

pub const CSV_HEADER: [&str; 12] = [
    "n",
    "det_coeffs",
    "det_degree",
    "det_leading",
    "det_max_other_abs",
    "singular",
    "zero_in_taylor",
    "rank_d1",
    "rank_d2",
    "taylor_points",
    "shifted_hypo_points",
    "shifted_taylor_points",
];

/// One line per row. Complex numbers are written `re:im`, coefficient lists
/// are `;`-separated from degree 0 upwards, and points are `z1/z2`.
pub fn to_csv(rows: &[ShiftRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        let coeffs = r.det_coeffs.iter().map(|&z| complex(z)).collect::<Vec<_>>().join(";");
        w.write_record([
            r.n.to_string(),
            coeffs,
            r.det_degree.to_string(),
            complex(r.det_leading),
            format!("{:e}", r.det_max_other_abs),
            r.singular.to_string(),
            r.zero_in_taylor.to_string(),
            r.rank_d1.to_string(),
            r.rank_d2.to_string(),
            points(&r.taylor_points),
            points(&r.shifted_hypo_points),
            points(&r.shifted_taylor_points),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Parses a `re:im` field written by [`to_csv`].
pub fn parse_complex(s: &str) -> Option<C64> {
    let (re, im) = s.split_once(':')?;
    Some(C64::new(re.parse().ok()?, im.parse().ok()?))
}
