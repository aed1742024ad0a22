//! Orders of integers in products of ℚ and quadratic fields.

pub mod algebra;
pub mod field;
pub mod homs;
pub mod lattice;
pub mod prime;
pub mod units;

pub use algebra::{make_algebra, AlgebraicInt, EtaleAlgebra};
pub use field::FieldSpec;
pub use homs::{algebra_homs, AlgebraHom, Embedding};
pub use lattice::Lattice;
pub use prime::{
    ideal_power, primes_of, primes_up_to_norm, reduce_mod, split_prime, Modulus, PrimeIdeal,
    Splitting,
};
pub use units::{fundamental_unit, units_up_to, UnitList};
