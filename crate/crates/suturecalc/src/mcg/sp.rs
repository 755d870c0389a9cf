use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{pairing, CurveClass, Int};
use crate::error::{Error, Result};

/// A `2g × 2g` integer matrix, intended to be symplectic. Arithmetic is overflow
/// checked; overflowing inputs panic with a message instead of wrapping.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpMatrix {
    dim: usize,
    data: Vec<Int>,
}

fn checked(x: Option<Int>) -> Int {
    x.expect("integer overflow in symplectic arithmetic")
}

impl SpMatrix {
    pub fn identity(genus: usize) -> Self {
        let dim = 2 * genus;
        let mut data = vec![0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1;
        }
        SpMatrix { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || !dim.is_multiple_of(2) || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("symplectic matrices are square of even size".into()));
        }
        Ok(SpMatrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| x as Int).collect())
                .collect(),
        )
    }

    /// Columns are the images of the basis vectors.
    pub fn from_columns(cols: &[CurveClass]) -> Result<Self> {
        let dim = cols.len();
        if cols.iter().any(|c| c.0.len() != dim) {
            return Err(Error::Dimension("columns must have length 2g".into()));
        }
        let rows = (0..dim).map(|i| cols.iter().map(|c| c.0[i]).collect()).collect();
        Self::from_rows(rows)
    }

    pub fn genus(&self) -> usize {
        self.dim / 2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Int {
        self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<Int>> {
        self.data.chunks(self.dim).map(<[Int]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> CurveClass {
        CurveClass((0..self.dim).map(|i| self.get(i, j)).collect())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.genus())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::Dimension("symplectic matrices of different genus".into()));
        }
        let n = self.dim;
        let mut data: Vec<Int> = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let term = checked(a.checked_mul(rhs.get(k, j)));
                    data[i * n + j] = checked(data[i * n + j].checked_add(term));
                }
            }
        }
        Ok(SpMatrix { dim: n, data })
    }

    pub fn apply(&self, x: &CurveClass) -> Result<CurveClass> {
        if x.0.len() != self.dim {
            return Err(Error::Dimension("vector and matrix genus differ".into()));
        }
        let n = self.dim;
        Ok(CurveClass(
            (0..n)
                .map(|i| {
                    (0..n).fold(0 as Int, |acc, j| {
                        checked(acc.checked_add(checked(self.get(i, j).checked_mul(x.0[j]))))
                    })
                })
                .collect(),
        ))
    }

    /// `⟨Mx, My⟩ = ⟨x, y⟩` on all basis pairs.
    pub fn is_symplectic(&self) -> bool {
        let cols: Vec<CurveClass> = (0..self.dim).map(|j| self.column(j)).collect();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let expected = match (i % 2, j % 2) {
                    (0, 1) if j == i + 1 => 1,
                    (1, 0) if i == j + 1 => -1,
                    _ => 0,
                };
                if pairing(&cols[i].0, &cols[j].0) != expected {
                    return false;
                }
            }
        }
        true
    }

    pub fn require_symplectic(&self) -> Result<()> {
        if self.is_symplectic() {
            Ok(())
        } else {
            Err(Error::NotSymplectic)
        }
    }

    /// Inverse of a symplectic matrix, `J⁻¹ Mᵀ J`: entry `(i, j)` is `±M(j', i')` where
    /// `'` swaps the two coordinates of a handle.
    pub fn symplectic_inverse(&self) -> Self {
        let n = self.dim;
        let partner = |k: usize| k ^ 1;
        let sign = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = sign(i) * sign(j) * self.get(partner(j), partner(i));
            }
        }
        SpMatrix { dim: n, data }
    }

    /// Matrix of the Dehn twist about `c` to the power `power`: `x ↦ x + power·⟨x,c⟩·c`.
    pub fn transvection(c: &CurveClass, power: Int) -> Self {
        let mut m = Self::identity(c.genus());
        m.twist_left(c, power);
        m
    }

    /// In place `self ← T_c^power · self`, one column at a time.
    pub fn twist_left(&mut self, c: &CurveClass, power: Int) {
        let n = self.dim;
        debug_assert_eq!(c.0.len(), n);
        for j in 0..n {
            let mut pairing = 0 as Int;
            for h in 0..n / 2 {
                let (xa, xb) = (self.data[2 * h * n + j], self.data[(2 * h + 1) * n + j]);
                let term = checked(
                    checked(xa.checked_mul(c.0[2 * h + 1])).checked_sub(checked(xb.checked_mul(c.0[2 * h]))),
                );
                pairing = checked(pairing.checked_add(term));
            }
            if pairing == 0 {
                continue;
            }
            let k = checked(pairing.checked_mul(power));
            for i in 0..n {
                let delta = checked(k.checked_mul(c.0[i]));
                self.data[i * n + j] = checked(self.data[i * n + j].checked_add(delta));
            }
        }
    }

    /// Largest absolute entry.
    pub fn height(&self) -> Int {
        self.data.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for SpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

impl Serialize for SpMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Int>>::deserialize(d)?;
        SpMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_one_twist() {
        let a1 = CurveClass::from_i64(&[1, 0]);
        let t = SpMatrix::transvection(&a1, 1);
        assert_eq!(t, SpMatrix::from_i64_rows(&[vec![1, -1], vec![0, 1]]).unwrap());
        let inv = SpMatrix::transvection(&a1, -1);
        assert!(t.mul(&inv).unwrap().is_identity());
    }

    #[test]
    fn disjoint_twist_fixes_first_handle() {
        let c = CurveClass::from_i64(&[0, 0, 1, 0]);
        let t = SpMatrix::transvection(&c, 1);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(t.get(i, j), if i == j { 1 } else { 0 });
            }
        }
        assert!(t.is_symplectic());
    }

    #[test]
    fn inverse_formula() {
        let c = CurveClass::from_i64(&[1, 2, -1, 3]);
        let d = CurveClass::from_i64(&[0, 1, 1, 1]);
        let m = SpMatrix::transvection(&c, 2).mul(&SpMatrix::transvection(&d, -3)).unwrap();
        assert!(m.is_symplectic());
        assert!(m.mul(&m.symplectic_inverse()).unwrap().is_identity());
        let not_sp = SpMatrix::from_i64_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert!(!not_sp.is_symplectic());
    }
}
