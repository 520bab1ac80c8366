//! Value types for norm tables.
//!
//! Norm values live in a closed convex subset of `[0, inf)`. Everything the
//! crate constructs is exact ([`Rational`] or integers); `f64` is accepted for
//! callers that bring their own tables, with the usual caveat that the
//! triangle-inequality check then compares rounded values.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Exact rational values used throughout the crate's outputs.
pub type Rational = Ratio<i64>;

/// Scalar type that a [`crate::norms::NormTable`] can hold.
pub trait NormValue:
    Num + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// Largest integer not exceeding `self`.
    fn floor(&self) -> Self;

    fn is_integral(&self) -> bool;

    /// Exact `p/q` rendering (integers render as `p/1`).
    fn to_ratio_string(&self) -> String;

    fn from_rational(r: &Rational) -> Option<Self>;

    fn to_rational(&self) -> Option<Rational>;

    /// A non-negative integer count as a norm value.
    fn from_count(n: usize) -> Self;

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }
}

impl<I> NormValue for Ratio<I>
where
    I: Integer + Clone + FromPrimitive + ToPrimitive + Debug + Display + Hash + Send + Sync + 'static,
{
    fn floor(&self) -> Self {
        Ratio::floor(self)
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn to_ratio_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn from_rational(r: &Rational) -> Option<Self> {
        Some(Ratio::new(I::from_i64(*r.numer())?, I::from_i64(*r.denom())?))
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(Ratio::new(self.numer().to_i64()?, self.denom().to_i64()?))
    }

    fn from_count(n: usize) -> Self {
        Ratio::from_integer(I::from_usize(n).expect("count fits the norm scalar"))
    }
}

macro_rules! int_norm_value {
    ($($t:ty),*) => {$(
        impl NormValue for $t {
            fn floor(&self) -> Self {
                *self
            }

            fn is_integral(&self) -> bool {
                true
            }

            fn to_ratio_string(&self) -> String {
                format!("{}/1", self)
            }

            fn from_rational(r: &Rational) -> Option<Self> {
                if r.is_integer() {
                    <$t>::try_from(*r.numer()).ok()
                } else {
                    None
                }
            }

            fn to_rational(&self) -> Option<Rational> {
                i64::try_from(*self).ok().map(Rational::from_integer)
            }

            fn from_count(n: usize) -> Self {
                <$t>::try_from(n).expect("count fits the norm scalar")
            }
        }
    )*};
}

int_norm_value!(i64, u64, u32);

impl NormValue for f64 {
    fn floor(&self) -> Self {
        f64::floor(*self)
    }

    fn is_integral(&self) -> bool {
        self.fract() == 0.0
    }

    fn to_ratio_string(&self) -> String {
        match Ratio::<i64>::approximate_float(*self) {
            Some(r) => format!("{}/{}", r.numer(), r.denom()),
            None => format!("{self}"),
        }
    }

    fn from_rational(r: &Rational) -> Option<Self> {
        r.to_f64()
    }

    fn to_rational(&self) -> Option<Rational> {
        Ratio::<i64>::approximate_float(*self)
    }

    fn from_count(n: usize) -> Self {
        n as f64
    }
}

/// Parses `p/q` or a plain integer into a [`Rational`].
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => text.parse::<i64>().ok().map(Rational::from_integer),
    }
}

pub fn format_rational(r: &Rational) -> String {
    r.to_ratio_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_floor_and_integrality() {
        let r = Rational::new(7, 4);
        assert_eq!(NormValue::floor(&r), Rational::from_integer(1));
        assert!(!r.is_integral());
        assert!(Rational::from_integer(3).is_integral());
        assert_eq!(r.to_ratio_string(), "7/4");
        assert_eq!(Rational::from_integer(2).to_ratio_string(), "2/1");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6"), Some(Rational::new(1, 2)));
        assert_eq!(parse_rational(" 5 "), Some(Rational::from_integer(5)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn integer_scalars_round_trip() {
        assert_eq!(i64::from_rational(&Rational::from_integer(4)), Some(4));
        assert_eq!(u64::from_rational(&Rational::new(1, 2)), None);
        assert_eq!(3u32.to_ratio_string(), "3/1");
    }
}
