//! Floating-point scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// f32 or f64.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("finite scalar")
    }

    fn count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    /// Correctly rounded (for f64) conversion of an exact rate.
    fn from_ratio(r: Ratio<i128>) -> Self {
        Self::lit(ratio_to_f64(r))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Exact rational to nearest f64.
pub fn ratio_to_f64(r: Ratio<i128>) -> f64 {
    let (n, d) = (*r.numer(), *r.denom());
    const EXACT: i128 = 1 << 53;
    if n.abs() < EXACT && d.abs() < EXACT {
        n as f64 / d as f64
    } else {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

/// Mean of a non-empty slice, accumulated in f64.
pub fn mean_f64<T: Scalar>(xs: &[T]) -> f64 {
    xs.iter().map(|x| x.as_f64()).sum::<f64>() / xs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirds_round_once() {
        let r = Ratio::new(-3i128, 9);
        assert_eq!(ratio_to_f64(r), -1.0 / 3.0);
        assert_eq!(f32::from_ratio(Ratio::new(2, 3)), 2.0f32 / 3.0);
    }

    #[test]
    fn huge_ratio_converts() {
        let big = 1i128 << 80;
        let r = Ratio::new(big + 1, big * 3);
        assert!((ratio_to_f64(r) - 1.0 / 3.0).abs() < 1e-15);
    }
}
