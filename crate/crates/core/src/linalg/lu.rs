use crate::error::{Error, Result};
use crate::linalg::matrix::CMatrix;
use crate::C64;

/// LU factorisation with partial pivoting, `P M = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(m: &CMatrix) -> Result<Lu> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "LU needs a square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let inv = C64::new(1.0, 0.0) / lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] * inv;
                lu[(i, k)] = f;
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Lu {
            lu,
            perm,
            sign,
            singular,
        })
    }

    pub fn determinant(&self) -> C64 {
        let n = self.lu.rows();
        (0..n).fold(C64::new(self.sign, 0.0), |d, i| d * self.lu[(i, i)])
    }

    /// Solve `M X = B`.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix> {
        if self.singular {
            return Err(Error::NotInvertible("matrix"));
        }
        let n = self.lu.rows();
        assert_eq!(b.rows(), n, "solve: right-hand side has wrong row count");
        let mut x = CMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

pub fn determinant(m: &CMatrix) -> Result<C64> {
    if m.rows() == 0 && m.cols() == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(Lu::new(m)?.determinant())
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    Lu::new(m)?.solve(&CMatrix::identity(m.rows()))
}

/// Solve `M X = B`.
pub fn solve(m: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    Lu::new(m)?.solve(b)
}
