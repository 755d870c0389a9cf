//! Free modules, homomorphisms as matrices, and homomorphisms up to a unit subgroup.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingKind, UnitGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeModule {
    pub ring: RingKind,
    pub rank: usize,
}

/// A homomorphism `R^cols → R^rows`, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Homomorphism<R: Ring> {
    rows: usize,
    cols: usize,
    entries: Vec<R>,
}

impl<R: Ring> Homomorphism<R> {
    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Homomorphism {
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Homomorphism {
            rows,
            cols,
            entries,
        }
    }

    pub fn identity(rank: usize) -> Self {
        Self::from_fn(rank, rank, |i, j| if i == j { R::one() } else { R::zero() })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| R::zero())
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| R::from_i64(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn source(&self) -> FreeModule {
        FreeModule {
            ring: R::KIND,
            rank: self.cols,
        }
    }

    pub fn target(&self) -> FreeModule {
        FreeModule {
            ring: R::KIND,
            rank: self.rows,
        }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    pub fn row_vecs(&self) -> Vec<Vec<R>> {
        self.entries.chunks(self.cols.max(1)).take(self.rows).map(<[R]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(R::is_zero)
    }

    pub fn map_entries<S: Ring>(&self, f: impl Fn(&R) -> S) -> Homomorphism<S> {
        Homomorphism {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, u: &R) -> Self {
        self.map_entries(|x| u.clone() * x.clone())
    }

    /// Row-major position and value of the first nonzero entry.
    pub fn pivot(&self) -> Option<(usize, &R)> {
        self.entries.iter().enumerate().find(|(_, x)| !x.is_zero())
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot compose {}x{} after {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = R::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = acc + a.clone() * rhs.get(k, j).clone();
            }
            acc
        }))
    }

    /// Division-free determinant by dynamic programming over column subsets.
    pub fn determinant(&self) -> Result<R> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(R::one());
        }
        if n > 20 {
            return Err(Error::Dimension("determinant limited to rank 20".into()));
        }
        // partial[mask]: signed sum over assignments of the first |mask| rows to `mask`.
        let mut partial: Vec<Option<R>> = vec![None; 1 << n];
        partial[0] = Some(R::one());
        for mask in 0usize..(1 << n) {
            let Some(acc) = partial[mask].clone() else {
                continue;
            };
            let row = mask.count_ones() as usize;
            if row == n {
                continue;
            }
            for col in 0..n {
                if mask & (1 << col) != 0 {
                    continue;
                }
                let entry = self.get(row, col);
                if entry.is_zero() {
                    continue;
                }
                // Sign of the new transposition count: columns above `col` already used.
                let inversions = (mask >> col).count_ones();
                let mut term = acc.clone() * entry.clone();
                if inversions % 2 == 1 {
                    term = -term;
                }
                let slot = &mut partial[mask | (1 << col)];
                *slot = Some(match slot.take() {
                    Some(prev) => prev + term,
                    None => term,
                });
            }
        }
        Ok(partial[(1 << n) - 1].clone().unwrap_or_else(R::zero))
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let rows = (0..self.rows)
            .filter(|&i| i != skip_row)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| j != skip_col)
                    .map(|j| self.get(i, j).clone())
                    .collect()
            })
            .collect();
        Self::from_rows(rows).expect("minor of a rectangular matrix")
    }

    /// Classical adjugate, so that `A · adj(A) = det(A) · I`.
    pub fn adjugate(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("adjugate of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 1 {
            return Ok(Self::identity(1));
        }
        let mut cofactors = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let d = self.minor(i, j).determinant()?;
                cofactors.push(if (i + j) % 2 == 1 { -d } else { d });
            }
        }
        let cof = Homomorphism {
            rows: n,
            cols: n,
            entries: cofactors,
        };
        Ok(cof.transpose())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Square with unit determinant.
    pub fn is_isomorphism(&self) -> bool {
        self.is_square() && self.determinant().is_ok_and(|d| d.is_unit())
    }

    /// Inverse when it has finitely representable entries (determinant with an exact inverse).
    pub fn exact_inverse(&self) -> Option<Self> {
        let det = self.determinant().ok()?;
        let inv_det = det.exact_inverse()?;
        Some(self.adjugate().ok()?.scale(&inv_det))
    }

    /// Whether `self = u·other` for some `u` in `group`.
    pub fn g_equivalent(&self, other: &Self, group: UnitGroup) -> Result<bool> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("g_equivalent on different shapes".into()));
        }
        if group == UnitGroup::Trivial {
            return Ok(self == other);
        }
        let Some((k, den)) = other.pivot() else {
            return Ok(self.is_zero());
        };
        let num = &self.entries[k];
        if num.is_zero() {
            return Ok(false);
        }
        let cross_equal = self
            .entries
            .iter()
            .zip(&other.entries)
            .all(|(f, g)| f.clone() * den.clone() == g.clone() * num.clone());
        Ok(cross_equal && R::ratio_in_group(num, den, group))
    }

    /// Canonical representative: the pivot is normalised by a unit of `group`.
    pub fn normalize_class(&self, group: UnitGroup) -> Self {
        match self.pivot() {
            Some((_, p)) => self.scale(&R::normalizing_unit(p, group)),
            None => self.clone(),
        }
    }
}

impl Homomorphism<BigInt> {
    /// The image under the canonical map Z → R.
    pub fn tensor<S: Ring>(&self) -> Homomorphism<S> {
        self.map_entries(S::from_integer)
    }
}

impl<R: Ring> fmt::Debug for Homomorphism<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<R: Ring> fmt::Display for Homomorphism<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.row_vecs().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// A homomorphism standing for its class modulo a unit subgroup.
#[derive(Clone, Debug)]
pub struct GClassHom<R: Ring> {
    pub rep: Homomorphism<R>,
    pub unit_group: UnitGroup,
}

impl<R: Ring> GClassHom<R> {
    pub fn new(rep: Homomorphism<R>, unit_group: UnitGroup) -> Self {
        GClassHom { rep, unit_group }
    }

    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        Ok(GClassHom {
            rep: self.rep.compose(&rhs.rep)?,
            unit_group: self.unit_group.max(rhs.unit_group),
        })
    }

    /// Class equality, using the larger of the two groups.
    pub fn same_class(&self, other: &Self) -> Result<bool> {
        self.rep
            .g_equivalent(&other.rep, self.unit_group.max(other.unit_group))
    }
}

impl<R: Ring> PartialEq for GClassHom<R> {
    fn eq(&self, other: &Self) -> bool {
        self.same_class(other).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novikov::NovikovElement;
    use crate::ring::t_pow;
    use num_rational::BigRational;

    fn z(rows: &[Vec<i64>]) -> Homomorphism<BigInt> {
        Homomorphism::from_integers(rows).unwrap()
    }

    #[test]
    fn composition_examples() {
        let f = z(&[vec![1, 1], vec![0, 1]]);
        let g = z(&[vec![1, 0], vec![1, 1]]);
        assert_eq!(f.compose(&g).unwrap(), z(&[vec![2, 1], vec![1, 1]]));
        let h = z(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]);
        assert_eq!(Homomorphism::identity(3).compose(&h).unwrap(), h);
        let d = Homomorphism::from_rows(vec![vec![t_pow(1), NovikovElement::zero()], vec![NovikovElement::zero(), t_pow(1)]]).unwrap();
        let e = Homomorphism::from_rows(vec![vec![t_pow(-1), NovikovElement::zero()], vec![NovikovElement::zero(), t_pow(-1)]]).unwrap();
        assert_eq!(d.compose(&e).unwrap(), Homomorphism::identity(2));
        assert!(f.compose(&z(&[vec![1, 2, 3]])).is_err());
    }

    #[test]
    fn isomorphism_examples() {
        assert!(Homomorphism::<BigInt>::identity(4).is_isomorphism());
        assert!(!z(&[vec![2, 0], vec![0, 1]]).is_isomorphism());
        let d = Homomorphism::from_rows(vec![
            vec![t_pow(2), NovikovElement::zero()],
            vec![NovikovElement::zero(), -t_pow(-1)],
        ])
        .unwrap();
        assert!(d.is_isomorphism());
        assert_eq!(d.determinant().unwrap(), -t_pow(1));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = z(&[vec![2, -1, 0, 3], vec![1, 4, -2, 0], vec![0, 1, 1, 5], vec![7, 0, -3, 1]]);
        // Expansion along the first row, computed independently.
        let det3 = |a: [[i64; 3]; 3]| {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        };
        let rows = [[2, -1, 0, 3], [1, 4, -2, 0], [0, 1, 1, 5], [7, 0, -3, 1]];
        let mut expected = 0;
        for (j, &coeff) in rows[0].iter().enumerate() {
            let mut minor = [[0; 3]; 3];
            for i in 1..4 {
                let mut c = 0;
                for k in 0..4 {
                    if k != j {
                        minor[i - 1][c] = rows[i][k];
                        c += 1;
                    }
                }
            }
            let sign = if j % 2 == 0 { 1 } else { -1 };
            expected += sign * coeff * det3(minor);
        }
        assert_eq!(m.determinant().unwrap(), BigInt::from(expected));
        let adj = m.adjugate().unwrap();
        assert_eq!(m.compose(&adj).unwrap(), Homomorphism::identity(4).scale(&BigInt::from(expected)));
    }

    #[test]
    fn equivalence_examples() {
        let g = z(&[vec![1, -2], vec![3, 0]]);
        let minus = g.scale(&BigInt::from(-1));
        let twice = g.scale(&BigInt::from(2));
        assert!(minus.g_equivalent(&g, UnitGroup::Signs).unwrap());
        assert!(!minus.g_equivalent(&g, UnitGroup::Trivial).unwrap());
        assert!(!twice.g_equivalent(&g, UnitGroup::Signs).unwrap());

        let gn = g.tensor::<NovikovElement>();
        let shifted = gn.scale(&t_pow(3));
        assert!(shifted.g_equivalent(&gn, UnitGroup::FullUnits).unwrap());
        assert!(!shifted.g_equivalent(&gn, UnitGroup::Signs).unwrap());
    }

    #[test]
    fn normalization_examples() {
        let f = z(&[vec![-1, 2], vec![0, 3]]);
        assert_eq!(f.normalize_class(UnitGroup::Signs), z(&[vec![1, -2], vec![0, -3]]));

        let q = Homomorphism::<BigRational>::from_integers(&[vec![2, 4]]).unwrap();
        assert_eq!(q.normalize_class(UnitGroup::FullUnits), Homomorphism::from_integers(&[vec![1, 2]]).unwrap());

        let n = Homomorphism::from_rows(vec![vec![t_pow(3), t_pow(5)]]).unwrap();
        let normal = n.normalize_class(UnitGroup::FullUnits);
        assert_eq!(normal, Homomorphism::from_rows(vec![vec![t_pow(0), t_pow(2)]]).unwrap());
        assert!(normal.g_equivalent(&n, UnitGroup::FullUnits).unwrap());
    }

    #[test]
    fn zero_class_is_unchanged() {
        let zero = Homomorphism::<BigInt>::zero(2, 3);
        assert_eq!(zero.normalize_class(UnitGroup::Signs), zero);
        assert!(zero.g_equivalent(&zero, UnitGroup::Signs).unwrap());
    }
}
