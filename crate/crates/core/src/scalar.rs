use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the search and the simulation are generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every literal used by the crate is representable.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn clamp_to(self, lo: Self, hi: Self) -> Self {
        self.max(lo).min(hi)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Rounds to 9 significant digits, the precision used by the text formats.
///
/// Values produced by this function survive a format/parse cycle unchanged.
pub fn quantize<T: Scalar>(v: T) -> T {
    let s = format!("{:.8e}", v);
    s.parse().unwrap_or(v)
}

/// Formats with 9 significant digits.
pub fn fmt_sig9<T: Scalar>(v: T) -> String {
    format!("{:.8e}", v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_is_idempotent() {
        for v in [0.1f64, -0.419999999987, 1.0 / 3.0, 0.87654321987654] {
            let q = quantize(v);
            assert_eq!(quantize(q), q);
            assert_eq!(fmt_sig9(q).parse::<f64>().unwrap(), q);
        }
        let q = quantize(1.0f32 / 3.0);
        assert_eq!(quantize(q), q);
    }
}
