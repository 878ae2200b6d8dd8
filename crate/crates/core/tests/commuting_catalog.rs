use pencillab::commuting::{
    commuting_feasible, construct_multiplier, construct_multiplier_with, intertwiner_residual, intertwiner_space,
    matches_pattern, pattern_parameter_count, relative_commutator, sample_pattern, search_multiplier, verify_necessity,
    SingularStructure, PATTERN_TOL, SEARCH_EVIDENCE,
};
use pencillab::corpus::commuting_pair;
use pencillab::kronecker::{scramble, KroneckerStructure, MinimalIndex};
use pencillab::linalg::numerical_rank;
use pencillab::random::derive_seed;
use pencillab::{Error, ToleranceConfig};

fn catalog() -> Vec<SingularStructure> {
    let text = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/structure_catalog.json"
    ));
    let raw: Vec<SingularStructure> = serde_json::from_str(text).unwrap();
    raw.iter()
        .map(|s| SingularStructure::new(&s.row_minimal, &s.col_minimal))
        .collect()
}

#[test]
fn catalog_is_well_formed() {
    let cat = catalog();
    assert!(cat.len() >= 30);
    let mut counts = (0, 0, 0);
    for s in &cat {
        s.validate().unwrap();
        assert!(s.size() <= 10);
        let f = commuting_feasible(&s.to_kronecker());
        match (f.feasible, f.equality) {
            (true, true) => counts.0 += 1,
            (true, false) => counts.1 += 1,
            _ => counts.2 += 1,
        }
    }
    assert_eq!(counts, (20, 4, 8));
}

#[test]
fn dimension_equals_parameter_count() {
    let tol = ToleranceConfig::default();
    for (k, s) in catalog().iter().enumerate() {
        let p = s.assemble();
        let space = intertwiner_space(&p.a, &p.b, &tol).unwrap();
        assert_eq!(
            space.dimension,
            pattern_parameter_count(s).unwrap(),
            "structure {k}: {s:?}"
        );
        for m in &space.basis {
            assert!(matches_pattern(m, s, PATTERN_TOL), "structure {k}");
        }
    }
}

#[test]
fn pattern_samples_are_intertwiners() {
    for (k, s) in catalog().iter().enumerate() {
        let p = s.assemble();
        for seed in 0..5 {
            let m = sample_pattern(s, derive_seed(k as u64, seed)).unwrap();
            assert!(matches_pattern(&m, s, 1e-12));
            let r = intertwiner_residual(&p.a, &p.b, &m).norm_fro();
            assert!(r <= 1e-9 * m.norm_fro(), "structure {k}: residual {r:e}");
        }
    }
}

#[test]
fn equality_cases_have_multipliers() {
    let tol = ToleranceConfig::default();
    let mut seen = 0;
    for (k, s) in catalog().iter().enumerate() {
        if !commuting_feasible(&s.to_kronecker()).equality {
            continue;
        }
        seen += 1;
        let n = s.size();
        let p = s.assemble();
        let e = construct_multiplier(&p, &tol).unwrap_or_else(|err| panic!("structure {k}: {err}"));
        assert_eq!(numerical_rank(&e, &tol).unwrap(), n);
        assert!(relative_commutator(&e, &p.a, &p.b) <= 1e-8);

        let (q, pair) = scramble(&p, derive_seed(71, k as u64));
        let e = construct_multiplier_with(&q, s, &pair, &tol).unwrap_or_else(|err| panic!("structure {k}: {err}"));
        assert_eq!(numerical_rank(&e, &tol).unwrap(), n);
        assert!(relative_commutator(&e, &q.a, &q.b) <= 1e-8);
        if p.a.norm_fro() + p.b.norm_fro() > 0.0 {
            assert!(matches!(
                construct_multiplier(&q, &tol),
                Err(Error::TransformUnavailable(_))
            ));
        }
    }
    assert_eq!(seen, 20);
}

#[test]
fn four_by_four_multiplier() {
    let tol = ToleranceConfig::default();
    let s = SingularStructure::from_pairs(&[(0, 1), (1, 1)], &[(0, 1), (1, 1)]);
    let p = s.assemble();
    let text = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/singular_4x4.json"));
    let fixture = pencillab::Pencil::from_json(text).unwrap();
    assert_eq!(fixture.a, p.a);
    assert_eq!(fixture.b, p.b);
    let e = construct_multiplier(&fixture, &tol).unwrap();
    assert_eq!(numerical_rank(&e, &tol).unwrap(), 4);
    assert!(relative_commutator(&e, &p.a, &p.b) <= 1e-8);
}

#[test]
fn strict_and_infeasible_cases_are_rejected() {
    let tol = ToleranceConfig::default();
    for s in catalog() {
        if commuting_feasible(&s.to_kronecker()).equality {
            continue;
        }
        assert!(matches!(
            construct_multiplier(&s.assemble(), &tol),
            Err(Error::EqualityConditionFails(_))
        ));
    }
}

#[test]
fn commuting_pairs_satisfy_the_inequalities() {
    let tol = ToleranceConfig::default();
    for k in 0..100 {
        let c = commuting_pair(derive_seed(81, k), 10);
        let r = verify_necessity(&c.a, &c.b, &tol).unwrap();
        assert!(r.holds, "pair {k}: {:?}", r.feasibility.violations);
    }
}

fn drop_top(list: &[MinimalIndex]) -> Vec<MinimalIndex> {
    let top = list.iter().filter(|g| g.multiplicity > 0).map(|g| g.index).max();
    list.iter()
        .filter(|g| Some(g.index) != top || g.index == 0)
        .copied()
        .collect()
}

#[test]
fn dropping_the_largest_group_keeps_feasibility() {
    for s in catalog() {
        let k = s.to_kronecker();
        if !commuting_feasible(&k).feasible {
            continue;
        }
        let rows = KroneckerStructure {
            row_minimal: drop_top(&k.row_minimal),
            ..k.clone()
        };
        let cols = KroneckerStructure {
            col_minimal: drop_top(&k.col_minimal),
            ..k.clone()
        };
        assert!(commuting_feasible(&rows).feasible);
        assert!(commuting_feasible(&cols).feasible);
    }
}

#[test]
fn dropping_a_middle_group_can_break_feasibility() {
    let before = SingularStructure::from_pairs(&[(0, 1), (1, 1), (2, 1)], &[(0, 1), (1, 1), (2, 1)]);
    assert!(commuting_feasible(&before.to_kronecker()).feasible);
    let after = SingularStructure::from_pairs(&[(0, 1), (2, 1)], &[(0, 1), (1, 1), (2, 1)]);
    let f = commuting_feasible(&after.to_kronecker());
    assert!(!f.feasible);
    assert_eq!((f.violations[0].lhs, f.violations[0].rhs), (2, 1));
}

#[test]
fn search_recovers_a_multiplier_after_scrambling() {
    let tol = ToleranceConfig::default();
    let s = SingularStructure::from_pairs(&[(0, 1), (1, 1)], &[(0, 1), (1, 1)]);
    let (q, _) = scramble(&s.assemble(), 5);
    let out = search_multiplier(&q, &tol, 9, 20).unwrap();
    assert_eq!(out.evidence, SEARCH_EVIDENCE);
    assert_eq!(out.intertwiner_dimension, 10);
    assert!(out.found);
    let e = out.multiplier.unwrap();
    assert_eq!(numerical_rank(&e, &tol).unwrap(), 4);
    assert!(out.relative_commutator.unwrap() <= 1e-8);
}
