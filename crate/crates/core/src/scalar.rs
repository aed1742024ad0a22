//! The integer type the algebraic layer is generic over.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact signed integers usable as element coordinates.
///
/// Implemented for `i64`, `i128` and `BigInt`. Machine types panic on
/// overflow in builds with overflow checks (the default for this workspace).
pub trait Scalar:
    Integer
    + Signed
    + Clone
    + Debug
    + Display
    + Hash
    + Send
    + Sync
    + FromPrimitive
    + ToPrimitive
    + 'static
{
    fn to_bigint(&self) -> BigInt;
    fn from_bigint(b: &BigInt) -> Option<Self>;

    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("i64 always fits")
    }

    fn from_u64_checked(v: u64) -> Option<Self> {
        Self::from_u64(v)
    }

    /// Least non-negative residue modulo a positive modulus.
    fn rem_floor(&self, m: &Self) -> Self {
        self.mod_floor(m)
    }
}

impl Scalar for i64 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_bigint(b: &BigInt) -> Option<Self> {
        b.to_i64()
    }
}

impl Scalar for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_bigint(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
}

impl Scalar for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn from_bigint(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
}

/// Convert between scalar types, failing on overflow.
pub fn convert<S: Scalar, T: Scalar>(v: &S) -> Option<T> {
    T::from_bigint(&v.to_bigint())
}
