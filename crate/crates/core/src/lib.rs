//! Sieves over rings of integers of ℚ and quadratic fields, the k-free
//! local-global principle, ℤ-linear maps preserving sieve sets, admissible
//! shift spaces and their entropy.
//!
//! Elements, lattices and sieves are generic over an integer [`Scalar`]
//! (`i64`, `i128`, `BigInt`); the aliases below fix `i64`.

pub mod arith;
pub mod entropy;
pub mod error;
pub mod interval;
pub mod linmaps;
pub mod localglobal;
pub mod rings;
pub mod scalar;
pub mod shiftspace;
pub mod sieve;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Element = rings::AlgebraicInt<i64>;
pub type Sieve = sieve::SieveSpec<i64>;
pub type Local = sieve::LocalSet<i64>;
pub type Constraint = localglobal::CongruenceConstraint<i64>;
pub type Tail = sieve::TailRule<i64>;
pub type Pattern = shiftspace::Pattern<i64>;
pub type BigElement = rings::AlgebraicInt<num_bigint::BigInt>;
pub type BigSieve = sieve::SieveSpec<num_bigint::BigInt>;
