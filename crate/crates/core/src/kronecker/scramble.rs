use crate::kronecker::structure::EquivalencePair;
use crate::pencil::Pencil;
use crate::random::{rng, well_conditioned};

/// Condition number bound for the random transforms.
pub const SCRAMBLE_COND: f64 = 100.0;

/// Random strict equivalence: returns `p' = S^-1 p T^-1` and `(S, T)`, so that
/// `S p' T` reproduces `p`. Both transforms have condition number at most 100.
pub fn scramble(p: &Pencil, seed: u64) -> (Pencil, EquivalencePair) {
    let mut r = rng(seed);
    let (s, s_inv) = well_conditioned(p.rows(), SCRAMBLE_COND, &mut r);
    let (t, t_inv) = well_conditioned(p.cols(), SCRAMBLE_COND, &mut r);
    (p.transform(&s_inv, &t_inv), EquivalencePair { s, t })
}
