//! One-variable integer polynomials in `z`, the value type of the Conway engine.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::InvariantError;

/// Polynomial with exact integer coefficients, indexed by degree.
///
/// Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients and equality is structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPolynomial {
    coeffs: Vec<i128>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    /// `c * z^degree`.
    pub fn monomial(c: i128, degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the leading term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, degree: usize) -> i128 {
        self.coeffs.get(degree).copied().unwrap_or(0)
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    pub fn scale(&self, c: i128) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Drops every term of degree above `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Self {
        let keep = self.coeffs.len().min(max_degree + 1);
        Self::from_coeffs(self.coeffs[..keep].to_vec())
    }

    /// `f(-z)`.
    pub fn negate_variable(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(d, &c)| if d % 2 == 1 { -c } else { c })
                .collect(),
        )
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::from_coeffs((0..n).map(|d| self.coeff(d) + rhs.coeff(d)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::from_coeffs((0..n).map(|d| self.coeff(d) - rhs.coeff(d)).collect())
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        self.scale(-1)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (d, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "z")?,
                (1, _) => write!(f, "{a}z")?,
                (_, 1) => write!(f, "z^{d}")?,
                _ => write!(f, "{a}z^{d}")?,
            }
        }
        Ok(())
    }
}

/// Reads `c_k` from a Conway polynomial of an `m`-component link, where
/// `∇(z) = z^(m-1) (c_0 + c_1 z^2 + ...)`.
///
/// Any nonzero coefficient below degree `m - 1` or of the wrong parity is
/// reported as a [`InvariantError::ParityViolation`]: a Conway polynomial
/// cannot have one, so it means the input or the engine is broken.
pub fn extract_coeff(p: &IntPolynomial, components: usize, k: usize) -> Result<i128, InvariantError> {
    check_parity(p, components)?;
    Ok(p.coeff(components - 1 + 2 * k))
}

pub(crate) fn check_parity(p: &IntPolynomial, components: usize) -> Result<(), InvariantError> {
    if components == 0 {
        return Err(InvariantError::ParityViolation { components, degree: 0 });
    }
    let low = components - 1;
    for (d, &c) in p.coeffs().iter().enumerate() {
        if c != 0 && (d < low || (d - low) % 2 == 1) {
            return Err(InvariantError::ParityViolation { components, degree: d });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_compares() {
        assert_eq!(IntPolynomial::from_coeffs(vec![0, 1, 0, 0]), IntPolynomial::monomial(1, 1));
        assert!(IntPolynomial::from_coeffs(vec![0, 0]).is_zero());
        assert_eq!(IntPolynomial::zero().degree(), None);
    }

    #[test]
    fn arithmetic() {
        let a = IntPolynomial::from_coeffs(vec![1, 0, 1]);
        let b = IntPolynomial::from_coeffs(vec![1, 0, -1]);
        assert_eq!(&a + &b, IntPolynomial::from_coeffs(vec![2]));
        assert_eq!(&a - &b, IntPolynomial::monomial(2, 2));
        assert_eq!(a.shift(1), IntPolynomial::from_coeffs(vec![0, 1, 0, 1]));
        assert_eq!(a.truncate(1), IntPolynomial::one());
    }

    #[test]
    fn display() {
        assert_eq!(IntPolynomial::from_coeffs(vec![1, 0, 1]).to_string(), "1 + z^2");
        assert_eq!(IntPolynomial::from_coeffs(vec![0, 2, 0, -1]).to_string(), "2z - z^3");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn extract_examples() {
        assert_eq!(extract_coeff(&IntPolynomial::monomial(1, 1), 2, 0).unwrap(), 1);
        let trefoil = IntPolynomial::from_coeffs(vec![1, 0, 1]);
        assert_eq!(extract_coeff(&trefoil, 1, 1).unwrap(), 1);
        let hopf2 = IntPolynomial::from_coeffs(vec![0, 2, 0, 1]);
        assert_eq!(extract_coeff(&hopf2, 2, 0).unwrap(), 2);
        assert_eq!(extract_coeff(&hopf2, 2, 1).unwrap(), 1);
    }

    #[test]
    fn parity_violations() {
        let bad = IntPolynomial::from_coeffs(vec![1, 1]);
        assert!(matches!(
            extract_coeff(&bad, 1, 0),
            Err(InvariantError::ParityViolation { degree: 1, .. })
        ));
        // Constant term on a two-component link sits below z^(m-1).
        assert!(extract_coeff(&IntPolynomial::one(), 2, 0).is_err());
    }
}
