//! Integer vectors and square integer matrices acting on the two lattices.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A character, i.e. a vector of X*(T) in the fixed basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharVec(pub Vec<i64>);

/// A cocharacter, i.e. a vector of X_*(T) in the dual basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CocharVec(pub Vec<i64>);

macro_rules! vec_impls {
    ($t:ident) => {
        impl Deref for $t {
            type Target = [i64];
            fn deref(&self) -> &[i64] {
                &self.0
            }
        }

        impl From<Vec<i64>> for $t {
            fn from(v: Vec<i64>) -> Self {
                $t(v)
            }
        }

        impl $t {
            pub fn zero(rank: usize) -> Self {
                $t(vec![0; rank])
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&x| x == 0)
            }

            pub fn add(&self, other: &Self) -> Self {
                $t(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
            }

            pub fn scale(&self, k: i64) -> Self {
                $t(self.0.iter().map(|a| a * k).collect())
            }

            pub fn neg(&self) -> Self {
                self.scale(-1)
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "(")?;
                for (k, x) in self.0.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    };
}

vec_impls!(CharVec);
vec_impls!(CocharVec);

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pairing between a character and a cocharacter.
pub fn pairing(chi: &CharVec, cochar: &CocharVec) -> Result<i64> {
    if chi.len() != cochar.len() {
        return Err(Error::RankMismatch {
            expected: chi.len(),
            got: cochar.len(),
        });
    }
    Ok(dot(chi, cochar))
}

/// Dense square integer matrix, row major.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct IntMat {
    n: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMat { n, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::RankMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(IntMat { n, data })
    }

    /// Matrix of `v ↦ v − ⟨v, b⟩ a`.
    pub fn reflection(a: &[i64], b: &[i64]) -> Self {
        let n = a.len();
        let mut m = IntMat::identity(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] -= a[i] * b[j];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|c| c.to_vec())
            .collect()
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        IntMat { n, data }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        let n = self.n;
        (0..n)
            .map(|i| dot(&self.data[i * n..(i + 1) * n], v))
            .collect()
    }

    pub fn transpose(&self) -> IntMat {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        IntMat { n, data }
    }

    pub fn pow(&self, k: u32) -> IntMat {
        let mut out = IntMat::identity(self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMat::identity(self.n)
    }
}
