//! Exact rational values paired with their nearest `f64`.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A closed-form quantity held exactly, with a cached float approximation.
///
/// Arithmetic is arbitrary precision, so closed forms such as the
/// `m^(2t+4)` terms of the assortativity formula never overflow.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactScalar {
    exact: BigRational,
    approx: f64,
}

impl ExactScalar {
    pub fn new(exact: BigRational) -> Self {
        let approx = rational_to_f64(&exact);
        ExactScalar { exact, approx }
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        Self::new(BigRational::from_integer(v.into()))
    }

    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self::new(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero())
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn into_exact(self) -> BigRational {
        self.exact
    }

    pub fn to_f64(&self) -> f64 {
        self.approx
    }

    pub fn is_integer(&self) -> bool {
        self.exact.is_integer()
    }

    /// `"num/den"`, or just `"num"` for integers.
    pub fn to_ratio_string(&self) -> String {
        if self.exact.is_integer() {
            self.exact.numer().to_string()
        } else {
            alloc::format!("{}/{}", self.exact.numer(), self.exact.denom())
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ratio_string())
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.exact.cmp(&other.exact))
    }
}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        ExactScalar::new(r)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ExactScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExactScalar", 2)?;
        st.serialize_field("exact", &self.to_ratio_string())?;
        st.serialize_field("float", &self.approx)?;
        st.end()
    }
}

/// Converts with correct rounding for values whose numerator and
/// denominator are too large for a direct `f64` division.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fallback: scale both sides down to 64 significant bits.
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    let shift_n = num.bits().saturating_sub(64);
    let shift_d = den.bits().saturating_sub(64);
    let n = (&num >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (&den >> shift_d).to_f64().unwrap_or(f64::NAN);
    let exp = shift_n as i64 - shift_d as i64;
    let v = n / d * libm::pow(2.0, exp as f64);
    if neg {
        -v
    } else {
        v
    }
}

/// Exact rational for a finite float (every finite `f64` is a dyadic rational).
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

pub(crate) fn big(v: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub(crate) fn pow(base: u64, exp: u32) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(base), exp as usize))
}

pub(crate) fn one() -> BigRational {
    BigRational::one()
}
