use std::f64::consts::PI;

use crate::error::Result;
use crate::linalg::eigen::eigenvalues_raw;
use crate::linalg::matrix::CMatrix;
use crate::C64;

/// Points `center_phase * radius * exp(2 pi i j / n)` for `j = 0..n`.
pub fn circle_nodes(n: usize, radius: f64, phase: f64) -> Vec<C64> {
    (0..n)
        .map(|j| C64::from_polar(radius, phase + 2.0 * PI * j as f64 / n as f64))
        .collect()
}

/// Coefficients (constant term first) of the polynomial of degree `< n`
/// that takes `samples[j]` at `circle_nodes(n, radius, phase)[j]`.
pub fn interpolate_on_circle(samples: &[C64], radius: f64, phase: f64) -> Vec<C64> {
    let n = samples.len();
    let rot = C64::from_polar(radius, phase);
    let mut scale = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let s: C64 = samples
            .iter()
            .enumerate()
            .map(|(j, d)| d * C64::from_polar(1.0, -2.0 * PI * ((j * k) % n) as f64 / n as f64))
            .sum();
        out.push(s / (n as f64) / scale);
        scale *= rot;
    }
    out
}

/// Roots of `sum c_k x^k` (constant term first) via the companion matrix.
/// The caller is responsible for trimming negligible leading coefficients.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[d];
    let mut c = CMatrix::zeros(d, d);
    for i in 1..d {
        c[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        c[(i, d - 1)] = -coeffs[i] / lead;
    }
    eigenvalues_raw(&c)
}
