//! Surfaces modelled by H₁ with its intersection form.
//!
//! Coordinates are ordered `(a₁, b₁, …, a_g, b_g)` and `⟨a_i, b_i⟩ = 1`. A positive Dehn
//! twist about `c` acts by the transvection `x ↦ x + ⟨x, c⟩·c`. Statements proved here
//! hold on homology only, which is coarser than isotopy.

mod factor;
mod sp;
mod word;

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use factor::{
    factor_symplectic, standard_generators, transitive_map, FactorMode, GeneratorSet,
    MAX_WORD_LENGTH,
};
pub use sp::SpMatrix;
pub use word::{transport_curve, twist_matrix, TwistLetter, TwistWord};

/// Integer type for homology coordinates and symplectic matrices.
pub type Int = i128;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceModel {
    pub genus: usize,
    /// Basepoint label carried by odd closures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked_point: Option<String>,
}

impl SurfaceModel {
    pub fn new(genus: usize) -> Self {
        SurfaceModel {
            genus,
            marked_point: None,
        }
    }

    pub fn basis_labels(&self) -> Vec<String> {
        (1..=self.genus)
            .flat_map(|i| [format!("a{i}"), format!("b{i}")])
            .collect()
    }
}

/// A homology class, usually of an embedded curve.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveClass(pub Vec<Int>);

impl CurveClass {
    pub fn new(coords: Vec<Int>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "curve vector of length {} is not 2g",
                coords.len()
            )));
        }
        Ok(CurveClass(coords))
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        CurveClass(coords.iter().map(|&x| x as Int).collect())
    }

    pub fn zero(genus: usize) -> Self {
        CurveClass(vec![0; 2 * genus])
    }

    /// The class `a_i` (1-based handle index).
    pub fn a(genus: usize, i: usize) -> Self {
        let mut v = vec![0; 2 * genus];
        v[2 * (i - 1)] = 1;
        CurveClass(v)
    }

    /// The class `b_i` (1-based handle index).
    pub fn b(genus: usize, i: usize) -> Self {
        let mut v = vec![0; 2 * genus];
        v[2 * (i - 1) + 1] = 1;
        CurveClass(v)
    }

    pub fn genus(&self) -> usize {
        self.0.len() / 2
    }

    pub fn coords(&self) -> &[Int] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn gcd(&self) -> Int {
        self.0.iter().fold(0, |g, &x| g.gcd(&x))
    }

    /// Nonzero with coprime coordinates, as for an essential simple closed curve.
    pub fn is_primitive(&self) -> bool {
        self.gcd() == 1
    }

    pub fn require_primitive(&self) -> Result<()> {
        if self.is_primitive() {
            Ok(())
        } else {
            Err(Error::NotPrimitive(self.to_string()))
        }
    }

    /// The standard symplectic pairing `Σ (x_{a_i} y_{b_i} − x_{b_i} y_{a_i})`.
    pub fn intersection(&self, other: &Self) -> Result<Int> {
        if self.0.len() != other.0.len() {
            return Err(Error::Dimension(format!(
                "curves on surfaces of genus {} and {}",
                self.genus(),
                other.genus()
            )));
        }
        Ok(pairing(&self.0, &other.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        CurveClass(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect())
    }

    pub fn neg(&self) -> Self {
        CurveClass(self.0.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, k: Int) -> Self {
        CurveClass(self.0.iter().map(|x| x * k).collect())
    }

    /// Zero-pads or restricts to another genus, keeping the first handles.
    pub fn resize(&self, genus: usize) -> Self {
        let mut v = self.0.clone();
        v.resize(2 * genus, 0);
        CurveClass(v)
    }
}

pub(crate) fn pairing(x: &[Int], y: &[Int]) -> Int {
    x.chunks(2)
        .zip(y.chunks(2))
        .map(|(p, q)| p[0] * q[1] - p[1] * q[0])
        .sum()
}

impl fmt::Debug for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_pairings() {
        let a1 = CurveClass::a(2, 1);
        let b1 = CurveClass::b(2, 1);
        let a2 = CurveClass::a(2, 2);
        assert_eq!(a1.intersection(&b1).unwrap(), 1);
        assert_eq!(b1.intersection(&a1).unwrap(), -1);
        assert_eq!(a1.intersection(&a2).unwrap(), 0);
        let x = CurveClass::from_i64(&[3, -1, 4, 1]);
        assert_eq!(x.intersection(&x).unwrap(), 0);
        assert!(a1.intersection(&CurveClass::a(3, 1)).is_err());
    }

    #[test]
    fn primitivity() {
        assert!(CurveClass::from_i64(&[2, 3, 0, 0]).is_primitive());
        assert!(!CurveClass::from_i64(&[2, 4, 0, 6]).is_primitive());
        assert!(!CurveClass::zero(2).is_primitive());
    }

    #[test]
    fn surface_labels() {
        assert_eq!(SurfaceModel::new(2).basis_labels(), vec!["a1", "b1", "a2", "b2"]);
    }
}
