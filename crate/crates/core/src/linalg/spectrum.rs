use serde::{Deserialize, Serialize};

use crate::C64;

/// An eigenvalue with its algebraic multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub value: C64,
    pub multiplicity: usize,
}

/// Clustered spectrum; `infinite` counts eigenvalues at infinity of a pencil.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumList {
    pub values: Vec<Eigenvalue>,
    pub infinite: usize,
}

impl SpectrumList {
    pub fn finite_count(&self) -> usize {
        self.values.iter().map(|e| e.multiplicity).sum()
    }

    /// Distinct finite eigenvalue values.
    pub fn distinct(&self) -> Vec<C64> {
        self.values.iter().map(|e| e.value).collect()
    }

    /// True when some eigenvalue lies within `tol` of `z`.
    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.values.iter().any(|e| (e.value - z).norm() <= tol)
    }
}

pub(crate) fn cmp_c64(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn mean(values: &[C64], members: &[usize]) -> C64 {
    members.iter().map(|&i| values[i]).sum::<C64>() / members.len() as f64
}

fn finish(values: &[C64], groups: Vec<Vec<usize>>) -> Vec<Eigenvalue> {
    let mut out: Vec<Eigenvalue> = groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|g| Eigenvalue {
            value: mean(values, &g),
            multiplicity: g.len(),
        })
        .collect();
    out.sort_by(|a, b| cmp_c64(&a.value, &b.value));
    out
}

/// Single-linkage clustering: values closer than `radius` share a cluster,
/// and each cluster is replaced by its mean.
pub fn cluster_single_linkage(values: &[C64], radius: f64) -> Vec<Eigenvalue> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let next = p[k];
            p[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let a = find(&mut parent, i);
                let b = find(&mut parent, j);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    finish(values, groups)
}

/// Agglomerative clustering that tolerates the spread of a perturbed
/// multiple root: a cluster of `m` values may spread up to
/// `max(base, (kappa * eps)^(1/m)) * scale` around its mean.
pub fn cluster_multiplicity_aware(values: &[C64], base: f64, kappa: f64, scale: f64) -> Vec<Eigenvalue> {
    let allowed = |m: usize| base.max((kappa * f64::EPSILON).powf(1.0 / m as f64)) * scale;
    let mut groups: Vec<Vec<usize>> = (0..values.len()).map(|i| vec![i]).collect();
    loop {
        let means: Vec<C64> = groups.iter().map(|g| mean(values, g)).collect();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                pairs.push(((means[i] - means[j]).norm(), i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut merged = None;
        for &(_, i, j) in &pairs {
            let members: Vec<usize> = groups[i].iter().chain(&groups[j]).copied().collect();
            let c = mean(values, &members);
            let spread = members.iter().map(|&k| (values[k] - c).norm()).fold(0.0, f64::max);
            if spread <= allowed(members.len()) {
                merged = Some((i, j, members));
                break;
            }
        }
        match merged {
            Some((i, j, members)) => {
                groups[i] = members;
                groups.remove(j);
            }
            None => break,
        }
    }
    finish(values, groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_linkage_merges_chains() {
        let v = [
            C64::new(0.0, 0.0),
            C64::new(1e-9, 0.0),
            C64::new(2e-9, 0.0),
            C64::new(1.0, 0.0),
        ];
        let c = cluster_single_linkage(&v, 1.5e-9);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].multiplicity, 3);
    }

    #[test]
    fn perturbed_double_root_merges() {
        let v = [
            C64::new(-0.5 + 2e-8, 0.0),
            C64::new(-0.5 - 2e-8, 0.0),
            C64::new(3.0, 0.0),
        ];
        let c = cluster_multiplicity_aware(&v, 1e-8, 1e3, 1.0);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].multiplicity, 2);
        assert!((c[0].value - C64::new(-0.5, 0.0)).norm() < 1e-15);
    }
}
