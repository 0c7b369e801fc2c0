//! Numeric type used for substructure scores.
//!
//! Scores are ratios of small integers (description lengths) or plain counts,
//! so any type that can be built from integers and divided works: `f32`,
//! `f64`, or an exact rational such as [`num_rational::Rational64`].

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Scalar:
    Num + FromPrimitive + ToPrimitive + PartialOrd + Clone + Debug + Display + Send + Sync + 'static
{
    /// `num / den` in this scalar type. `den` must be non-zero.
    fn ratio(num: u64, den: u64) -> Self {
        let n = Self::from_u64(num).expect("numerator representable");
        let d = Self::from_u64(den).expect("denominator representable");
        n / d
    }

    fn count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable")
    }

    /// Total order used for ranking; incomparable values (NaN) compare equal.
    fn rank_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl<T> Scalar for T where
    T: Num
        + FromPrimitive
        + ToPrimitive
        + PartialOrd
        + Clone
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn ratio_in_each_scalar() {
        assert_eq!(f64::ratio(3, 4), 0.75);
        assert_eq!(f32::ratio(1, 2), 0.5);
        assert_eq!(Rational64::ratio(6, 8), Rational64::new(3, 4));
        assert_eq!(Rational64::count(5), Rational64::from_integer(5));
    }

    #[test]
    fn rank_cmp_tolerates_nan() {
        assert_eq!(f64::NAN.rank_cmp(&1.0), Ordering::Equal);
        assert_eq!(2.0f64.rank_cmp(&1.0), Ordering::Greater);
    }
}
