use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::expr::parse_exact;
use super::{Exponent, NovikovElement};
use crate::error::Error;

fn write_power(f: &mut fmt::Formatter<'_>, e: &Exponent) -> fmt::Result {
    if e.is_one() {
        write!(f, "t")
    } else if e.is_integer() && *e.numer() > 0 {
        write!(f, "t^{}", e.numer())
    } else {
        write!(f, "t^({e})")
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, e: &Exponent, magnitude: &BigInt) -> fmt::Result {
    if e.is_zero() {
        write!(f, "{magnitude}")
    } else if magnitude.is_one() {
        write_power(f, e)
    } else {
        write!(f, "{magnitude}*")?;
        write_power(f, e)
    }
}

impl fmt::Display for NovikovElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms().iter().enumerate() {
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write_term(f, e, &c.abs())?;
        }
        Ok(())
    }
}

impl FromStr for NovikovElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        parse_exact(s)
    }
}
