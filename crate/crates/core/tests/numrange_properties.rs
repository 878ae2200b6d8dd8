use pencillab::corpus::{doubly_commuting_pair, singular_pencil};
use pencillab::linalg::CMatrix;
use pencillab::numrange::{
    conv_hull_membership, is_doubly_commuting, isotropic_from_singular, isotropic_search, jnr_sample, nr_contains,
    pencil_nr_is_plane, HullMembership, SweepConfig,
};
use pencillab::random::derive_seed;
use pencillab::{Pencil, ToleranceConfig, C64};

#[test]
fn singular_pencils_have_isotropic_vectors() {
    let tol = ToleranceConfig::default();
    let sw = SweepConfig::default();
    for k in 0..100 {
        let (p, s) = singular_pencil(derive_seed(21, k), 10);
        let c = isotropic_from_singular(&p, &tol, &sw).unwrap_or_else(|e| panic!("pencil {k} ({s:?}): {e}"));
        assert!(c.verify(&p.a, &p.b), "pencil {k}: {c:?}");
        assert!(pencil_nr_is_plane(&p.a, &p.b, &sw).unwrap(), "pencil {k}");
    }
}

#[test]
fn doubly_commuting_hull_matches_search() {
    let sw = SweepConfig::default();
    let deep = SweepConfig {
        restarts: 10_000,
        ..SweepConfig::default()
    };
    let (mut inside, mut outside) = (0, 0);
    for k in 0..40u64 {
        let n = 2 + (k as usize % 6);
        let (mut a, b, _) = doubly_commuting_pair(derive_seed(31, k), n);
        if k % 3 == 0 {
            a = &a + &CMatrix::identity(n).scale(C64::new(1.5, 0.5));
        }
        assert!(is_doubly_commuting(&a, &b));
        let plane = pencil_nr_is_plane(&a, &b, &sw).unwrap();
        let found = isotropic_search(&a, &b, &deep, derive_seed(32, k));
        if let Some(c) = &found {
            assert!(c.verify(&a, &b));
        }
        assert_eq!(plane, found.is_some(), "pair {k} (n = {n})");
        if plane {
            inside += 1;
        } else {
            outside += 1;
        }
    }
    assert!(inside > 0 && outside > 0, "{inside} inside, {outside} outside");
}

#[test]
fn separating_directions_bound_every_sample() {
    let sw = SweepConfig::default();
    let mut checked = 0;
    for k in 0..30u64 {
        let (a, b, _) = doubly_commuting_pair(derive_seed(41, k), 3);
        let a = &a + &CMatrix::identity(3).scale(C64::new(2.0, 0.0));
        let HullMembership::Outside(c) = conv_hull_membership(&a, &b, &sw).unwrap() else {
            continue;
        };
        checked += 1;
        assert!(c.margin > 0.0);
        let d = c.direction;
        for (x, y) in jnr_sample(&a, &b, 300, derive_seed(42, k)) {
            let ip = d[0] * x.re + d[1] * x.im + d[2] * y.re + d[3] * y.im;
            assert!(ip >= c.margin - 1e-8, "pair {k}: {ip} < {}", c.margin);
        }
    }
    assert!(checked > 10);
}

#[test]
fn plane_range_contains_every_point() {
    let sw = SweepConfig::default();
    let grid: Vec<C64> = (0..20)
        .flat_map(|i| (0..20).map(move |j| C64::new(-3.0 + 0.3 * i as f64, -3.0 + 0.3 * j as f64)))
        .collect();
    for k in 0..3 {
        let (p, _) = singular_pencil(derive_seed(51, k), 6);
        for &l in &grid {
            assert!(nr_contains(&p, l, &sw).unwrap(), "pencil {k} at {l}");
        }
    }
    let e = Pencil::new(
        CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        CMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, -2.0]),
    )
    .unwrap();
    for &l in &grid {
        assert!(nr_contains(&e, l, &sw).unwrap(), "at {l}");
    }
}

#[test]
fn identity_pair_is_separated() {
    let sw = SweepConfig::default();
    let id = CMatrix::identity(3);
    assert!(!pencil_nr_is_plane(&id, &id, &sw).unwrap());
    let p = Pencil::new(id.clone(), id).unwrap();
    assert!(!nr_contains(&p, C64::new(0.0, 0.0), &sw).unwrap());
    assert!(nr_contains(&p, C64::new(-1.0, 0.0), &sw).unwrap());
}

/// Distance from the origin to the convex hull of a few points, by
/// enumerating every affinely spanned face.
fn polytope_distance(pts: &[[f64; 4]]) -> f64 {
    let n = pts.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if idx.len() > 5 {
            continue;
        }
        let p0 = pts[idx[0]];
        let d: Vec<[f64; 4]> = idx[1..]
            .iter()
            .map(|&i| std::array::from_fn(|k| pts[i][k] - p0[k]))
            .collect();
        let m = d.len();
        // Normal equations for min |p0 + sum c_i d_i|.
        let mut g = vec![vec![0.0; m + 1]; m];
        for i in 0..m {
            for j in 0..m {
                g[i][j] = (0..4).map(|k| d[i][k] * d[j][k]).sum();
            }
            g[i][m] = -(0..4).map(|k| d[i][k] * p0[k]).sum::<f64>();
        }
        let mut ok = true;
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&a, &b| g[a][col].abs().total_cmp(&g[b][col].abs()))
                .unwrap();
            if g[piv][col].abs() < 1e-12 {
                ok = false;
                break;
            }
            g.swap(col, piv);
            for r in 0..m {
                if r != col {
                    let f = g[r][col] / g[col][col];
                    let pivot_row = g[col].clone();
                    g[r][col..=m]
                        .iter_mut()
                        .zip(&pivot_row[col..=m])
                        .for_each(|(x, y)| *x -= f * y);
                }
            }
        }
        if !ok {
            continue;
        }
        let c: Vec<f64> = (0..m).map(|i| g[i][m] / g[i][i]).collect();
        let w0 = 1.0 - c.iter().sum::<f64>();
        if w0 < -1e-12 || c.iter().any(|&x| x < -1e-12) {
            continue;
        }
        let x: Vec<f64> = (0..4)
            .map(|k| p0[k] + (0..m).map(|i| c[i] * d[i][k]).sum::<f64>())
            .collect();
        best = best.min(x.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    best
}

#[test]
fn hull_distance_matches_polytope_oracle() {
    let sw = SweepConfig::default();
    for k in 0..60u64 {
        let n = 2 + (k as usize % 5);
        let (mut a, b, mut joint) = doubly_commuting_pair(derive_seed(61, k), n);
        let shift = C64::new(0.4 * (k % 4) as f64, 0.0);
        a = &a + &CMatrix::identity(n).scale(shift);
        joint.iter_mut().for_each(|(x, _)| *x += shift);
        let pts: Vec<[f64; 4]> = joint.iter().map(|(x, y)| [x.re, x.im, y.re, y.im]).collect();
        let dist = polytope_distance(&pts);
        match conv_hull_membership(&a, &b, &sw).unwrap() {
            HullMembership::Outside(c) => {
                assert!(dist > 1e-7, "pair {k}: separated but distance {dist}");
                assert!(
                    c.margin > 0.0 && c.margin <= dist + 1e-9,
                    "pair {k}: margin {} vs {dist}",
                    c.margin
                );
            }
            other => assert!(dist < 1e-6, "pair {k}: {other:?} but distance {dist}"),
        }
    }
}
