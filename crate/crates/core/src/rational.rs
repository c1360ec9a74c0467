//! Exact fractions for invariant values.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Reduced fraction with a positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        Self(Ratio::new(num, den))
    }

    pub fn int(v: i128) -> Self {
        Self(Ratio::from_integer(v))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    /// `num/den` even for integers; the CSV spelling.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    /// Parses `n` or `n/d`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let d: i128 = d.trim().parse().ok()?;
                if d == 0 {
                    return None;
                }
                Some(Self::new(n.trim().parse().ok()?, d))
            }
            None => Some(Self::int(s.parse().ok()?)),
        }
    }
}

impl From<i128> for Rational {
    fn from(v: i128) -> Self {
        Self::int(v)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Self::int(v as i128)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    num: i128,
    den: i128,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire { num: self.numer(), den: self.denom() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        if w.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(w.num, w.den))
    }
}
