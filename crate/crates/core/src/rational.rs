//! Exact rational numbers.
//!
//! Every dual value, event time and reduced cost in the solvers is a
//! [`Rational`]. Values are kept in lowest terms with a positive denominator,
//! and serialize as `"numerator/denominator"` strings.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));
    pub const HALF: Rational = Rational(Ratio::new_raw(1, 2));

    /// Builds `numer/denom` reduced to lowest terms.
    ///
    /// Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.denom() == 1
    }

    /// True when the value is an integer multiple of 1/2.
    pub fn is_half_integral(&self) -> bool {
        self.denom() <= 2
    }

    pub fn floor(&self) -> Rational {
        Rational::from_integer(num_integer::Integer::div_floor(&self.numer(), &self.denom()))
    }

    /// Fractional part `x - floor(x)`, always in `[0, 1)`.
    pub fn fract(&self) -> Rational {
        *self - self.floor()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + *x)
    }
}

impl fmt::Display for Rational {
    /// Always `numer/denom`, including for integers (`3/1`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}, expected \"numerator/denominator\"")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `"n/d"` with `d > 0`, or a bare integer `"n"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| err())?;
                let d: i64 = d.trim().parse().map_err(|_| err())?;
                if d <= 0 {
                    return Err(err());
                }
                Ok(Rational::new(n, d))
            }
            None => s.parse::<i64>().map(Rational::from_integer).map_err(|_| err()),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowest_terms() {
        let r = Rational::new(6, -4);
        assert_eq!(r.numer(), -3);
        assert_eq!(r.denom(), 2);
        assert_eq!(r.to_string(), "-3/2");
    }

    #[test]
    fn fractional_part_of_negative() {
        assert_eq!(Rational::new(-1, 4).fract(), Rational::new(3, 4));
        assert_eq!(Rational::new(7, 2).fract(), Rational::HALF);
        assert_eq!(Rational::from_integer(3).fract(), Rational::ZERO);
    }

    #[test]
    fn half_integrality() {
        assert!(Rational::new(5, 2).is_half_integral());
        assert!(Rational::from_integer(4).is_half_integral());
        assert!(!Rational::new(3, 4).is_half_integral());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert_eq!("4/6".parse::<Rational>().unwrap(), Rational::new(2, 3));
        assert_eq!("7".parse::<Rational>().unwrap(), Rational::from_integer(7));
    }

    proptest! {
        #[test]
        fn add_sub_round_trip(a in -1000i64..1000, b in 1i64..50, c in -1000i64..1000, d in 1i64..50) {
            let x = Rational::new(a, b);
            let y = Rational::new(c, d);
            prop_assert_eq!((x + y) - y, x);
        }

        #[test]
        fn display_parse_round_trip(a in -1000i64..1000, b in 1i64..50) {
            let x = Rational::new(a, b);
            prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
        }

        #[test]
        fn fract_in_unit_interval(a in -1000i64..1000, b in 1i64..50) {
            let f = Rational::new(a, b).fract();
            prop_assert!(!f.is_negative() && f < Rational::ONE);
        }
    }
}
