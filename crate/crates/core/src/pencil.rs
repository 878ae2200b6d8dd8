use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::C64;

/// The linear matrix pencil `A + lambda B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPencil")]
pub struct Pencil {
    pub a: CMatrix,
    pub b: CMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPencil {
    a: CMatrix,
    b: CMatrix,
}

impl TryFrom<RawPencil> for Pencil {
    type Error = Error;

    fn try_from(raw: RawPencil) -> Result<Self> {
        Pencil::new(raw.a, raw.b)
    }
}

impl Pencil {
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Pencil> {
        if a.shape() != b.shape() {
            return Err(Error::Shape(format!(
                "pencil coefficients differ in shape: A is {}x{}, B is {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        Ok(Pencil { a, b })
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn is_square(&self) -> bool {
        self.a.is_square()
    }

    /// `A + lambda B`.
    pub fn at(&self, lambda: C64) -> CMatrix {
        &self.a + &self.b.scale(lambda)
    }

    /// `(A - z1 I) + lambda (B - z2 I)`.
    pub fn shifted(&self, z1: C64, z2: C64) -> Pencil {
        Pencil {
            a: self.a.shift(z1),
            b: self.b.shift(z2),
        }
    }

    pub fn transpose(&self) -> Pencil {
        Pencil {
            a: self.a.transpose(),
            b: self.b.transpose(),
        }
    }

    /// `S (A + lambda B) T`.
    pub fn transform(&self, s: &CMatrix, t: &CMatrix) -> Pencil {
        Pencil {
            a: s.matmul(&self.a).matmul(t),
            b: s.matmul(&self.b).matmul(t),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pencil serialisation cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Pencil> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
