use std::fmt;

use super::{Exponent, NovikovElement};
use crate::error::{Error, Result};

/// A series known exactly through exponent `cutoff`; higher terms are unknown.
///
/// `cutoff == None` marks an exact (finitely supported) value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    terms: NovikovElement,
    cutoff: Option<Exponent>,
}

impl TruncatedSeries {
    pub fn new(terms: NovikovElement, cutoff: Option<Exponent>) -> Self {
        let terms = match cutoff {
            Some(c) => terms.truncate(c),
            None => terms,
        };
        TruncatedSeries { terms, cutoff }
    }

    pub fn exact(terms: NovikovElement) -> Self {
        TruncatedSeries {
            terms,
            cutoff: None,
        }
    }

    pub fn known_terms(&self) -> &NovikovElement {
        &self.terms
    }

    pub fn cutoff(&self) -> Option<Exponent> {
        self.cutoff
    }

    pub fn is_exact(&self) -> bool {
        self.cutoff.is_none()
    }

    /// Drops everything above `cutoff` (never raises the precision).
    pub fn truncate(&self, cutoff: Exponent) -> Self {
        let c = match self.cutoff {
            Some(own) if own < cutoff => own,
            _ => cutoff,
        };
        Self::new(self.terms.clone(), Some(c))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(&self.terms + &rhs.terms, min_cutoff(self.cutoff, rhs.cutoff))
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            terms: -&self.terms,
            cutoff: self.cutoff,
        }
    }

    /// Product. The cutoff is the minimum of the input cutoffs, lowered further by
    /// any negative valuation of the other factor, since such a factor pulls unknown
    /// terms below the nominal cutoff.
    pub fn mul(&self, rhs: &Self) -> Self {
        let lowered = |cutoff: Option<Exponent>, other: &Self| {
            cutoff.map(|c| match other.lower_bound() {
                Some(v) if v < Exponent::from_integer(0) => c + v,
                _ => c,
            })
        };
        let cutoff = min_cutoff(lowered(self.cutoff, rhs), lowered(rhs.cutoff, self));
        Self::new(&self.terms * &rhs.terms, cutoff)
    }

    /// Inverse, valid through `target` or the available precision, whichever is lower.
    pub fn invert(&self, target: Exponent) -> Result<Self> {
        let lead = self
            .terms
            .valuation()
            .ok_or_else(|| Error::NotAUnit("series with no known terms".into()))?;
        let inv = self.terms.invert(target)?;
        match self.cutoff {
            None => Ok(inv),
            Some(c) => {
                // x = known + O(t^(>c)), so 1/x is determined through c - 2·lead.
                let precision = c - lead - lead;
                let combined = match inv.cutoff {
                    Some(ic) if ic < precision => ic,
                    _ => precision,
                };
                Ok(Self::new(inv.terms, Some(combined)))
            }
        }
    }

    /// Smallest exponent the full series could have.
    fn lower_bound(&self) -> Option<Exponent> {
        match (self.terms.valuation(), self.cutoff) {
            (Some(v), _) => Some(v),
            (None, Some(c)) => Some(c),
            (None, None) => None,
        }
    }
}

fn min_cutoff(a: Option<Exponent>, b: Option<Exponent>) -> Option<Exponent> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cutoff {
            None => write!(f, "{}", self.terms),
            Some(c) => write!(f, "{} + O(t^({}))", self.terms, c),
        }
    }
}
