use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::algebra::{AlgebraicInt, EtaleAlgebra};
use super::field::FieldSpec;
use super::lattice::Lattice;
use crate::arith::{self, inv_mod, is_prime, legendre, rem_i64, sqrt_mod};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Splitting {
    /// The prime of ℚ itself.
    Rational,
    /// Degree one, unramified; ω ≡ root.
    Split {
        root: u64,
    },
    Inert,
    /// 𝔭² = (p); ω ≡ root.
    Ramified {
        root: u64,
    },
}

/// A prime of one component, 𝔭 = (p, ω − r) or (p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeIdeal {
    pub component: usize,
    pub p: u64,
    /// Position among the primes above p in this component.
    pub index: usize,
    pub splitting: Splitting,
    pub field: FieldSpec,
}

impl PrimeIdeal {
    pub fn residue_degree(&self) -> u32 {
        match self.splitting {
            Splitting::Inert => 2,
            _ => 1,
        }
    }

    pub fn ramification(&self) -> u32 {
        match self.splitting {
            Splitting::Ramified { .. } => 2,
            _ => 1,
        }
    }

    /// Nm(𝔭) = p^f.
    pub fn norm(&self) -> u64 {
        self.p.pow(self.residue_degree())
    }

    /// Nm(𝔭)^k, saturating.
    pub fn norm_pow(&self, k: u32) -> u128 {
        (self.norm() as u128).saturating_pow(k)
    }

    /// Smallest e with p^e O ⊆ 𝔭^k.
    pub fn p_exponent_for(&self, k: u32) -> u32 {
        k.div_ceil(self.ramification())
    }

    pub fn key(&self) -> (u64, usize, usize) {
        (self.p, self.component, self.index)
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.splitting {
            Splitting::Rational => write!(f, "({})", self.p),
            Splitting::Inert => write!(f, "({})[c{}]", self.p, self.component),
            Splitting::Split { root } | Splitting::Ramified { root } => {
                write!(f, "({}, w-{})[c{}]", self.p, root, self.component)
            }
        }
    }
}

/// Roots of x² − t x − n modulo p, ascending.
fn omega_roots(t: i64, n: i64, p: u64) -> Vec<u64> {
    if p == 2 {
        return (0..2u64)
            .filter(|&x| rem_i64(x as i64 * x as i64 - t * x as i64 - n, 2) == 0)
            .collect();
    }
    let disc = rem_i64(t * t + 4 * n, p);
    let Some(s) = sqrt_mod(disc, p) else {
        return Vec::new();
    };
    let inv2 = inv_mod(2, p as i128).unwrap() as u64;
    let tm = rem_i64(t, p);
    let r1 = arith::mul_mod((tm + s) % p, inv2, p);
    let r2 = arith::mul_mod((tm + p - s) % p, inv2, p);
    let mut v = vec![r1, r2];
    v.sort();
    v.dedup();
    v
}

fn primes_in_component(f: FieldSpec, component: usize, p: u64) -> Vec<PrimeIdeal> {
    let mk = |index, splitting| PrimeIdeal {
        component,
        p,
        index,
        splitting,
        field: f,
    };
    match f {
        FieldSpec::Rational => vec![mk(0, Splitting::Rational)],
        FieldSpec::Quadratic(d) => {
            let (t, n) = f.omega_relation();
            let disc = f.discriminant();
            if rem_i64(disc, p) == 0 {
                let r = omega_roots(t, n, p);
                return vec![mk(0, Splitting::Ramified { root: r[0] })];
            }
            let split = if p == 2 {
                d.rem_euclid(8) == 1
            } else {
                legendre(d, p) == 1
            };
            if split {
                omega_roots(t, n, p)
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| mk(i, Splitting::Split { root: r }))
                    .collect()
            } else {
                vec![mk(0, Splitting::Inert)]
            }
        }
    }
}

/// All primes of the algebra above the rational prime p, component by component.
pub fn split_prime(alg: &EtaleAlgebra, p: u64) -> Result<Vec<PrimeIdeal>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(alg
        .components()
        .iter()
        .enumerate()
        .flat_map(|(i, f)| primes_in_component(*f, i, p))
        .collect())
}

/// Primes of the algebra in (p, component, index) order, unbounded.
pub fn primes_of(alg: &EtaleAlgebra) -> impl Iterator<Item = PrimeIdeal> + '_ {
    arith::primes().flat_map(move |p| split_prime(alg, p).unwrap())
}

/// Primes of the algebra with Nm(𝔭) ≤ bound.
pub fn primes_up_to_norm(alg: &EtaleAlgebra, bound: u64) -> Vec<PrimeIdeal> {
    arith::primes_up_to(bound)
        .into_iter()
        .flat_map(|p| split_prime(alg, p).unwrap())
        .filter(|q| q.norm() <= bound)
        .collect()
}

/// Power 𝔭^k as an HNF sublattice of the component's coordinate lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Modulus<T> {
    pub prime: PrimeIdeal,
    pub exponent: u32,
    pub lattice: Lattice<T>,
    pub norm: T,
}

fn big_pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

fn to_t<T: Scalar>(b: &BigInt) -> Result<T> {
    T::from_bigint(b).ok_or_else(|| Error::Overflow(b.to_string()))
}

/// Lift a simple root of x² − t x − n from mod p to mod p^k.
fn hensel(t: i64, n: i64, p: u64, r: u64, k: u32) -> BigInt {
    let (t, n) = (BigInt::from(t), BigInt::from(n));
    let pb = BigInt::from(p);
    let mut r = BigInt::from(r);
    let mut m = pb.clone();
    for _ in 1..k {
        m *= &pb;
        let f = &r * &r - &t * &r - &n;
        let df: BigInt = BigInt::from(2) * &r - &t;
        let dfi = inv_mod(df.mod_floor(&pb).to_i128().unwrap(), p as i128).expect("simple root");
        r = (&r - f * BigInt::from(dfi)).mod_floor(&m);
    }
    r
}

pub fn ideal_power<T: Scalar>(prime: &PrimeIdeal, k: u32) -> Result<Modulus<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "ideal exponent must be at least 1".into(),
        ));
    }
    let p = prime.p;
    let rows: Vec<Vec<BigInt>> = match prime.splitting {
        Splitting::Rational => vec![vec![big_pow(p, k)]],
        Splitting::Inert => {
            let q = big_pow(p, k);
            vec![vec![q.clone(), BigInt::zero()], vec![BigInt::zero(), q]]
        }
        Splitting::Split { root } => {
            let q = big_pow(p, k);
            let (t, n) = prime.field.omega_relation();
            let rk = hensel(t, n, p, root, k);
            vec![
                vec![q.clone(), BigInt::zero()],
                vec![(-rk).mod_floor(&q), BigInt::one()],
            ]
        }
        Splitting::Ramified { root } => {
            let m = k / 2;
            let pm = big_pow(p, m);
            if k.is_multiple_of(2) {
                vec![vec![pm.clone(), BigInt::zero()], vec![BigInt::zero(), pm]]
            } else {
                let c = (p - root) % p;
                vec![
                    vec![&pm * BigInt::from(p), BigInt::zero()],
                    vec![&pm * BigInt::from(c), pm],
                ]
            }
        }
    };
    let rows: Vec<Vec<T>> = rows
        .iter()
        .map(|r| r.iter().map(to_t).collect::<Result<Vec<T>>>())
        .collect::<Result<_>>()?;
    let lattice = Lattice::from_hnf_unchecked(rows);
    let norm = lattice.index();
    Ok(Modulus {
        prime: *prime,
        exponent: k,
        lattice,
        norm,
    })
}

impl<T: Scalar> Modulus<T> {
    pub fn component(&self) -> usize {
        self.prime.component
    }

    /// Canonical representative of a component-level coordinate vector.
    pub fn reduce(&self, coords: &[T]) -> Result<Vec<T>> {
        if coords.len() != self.lattice.dim() {
            return Err(Error::ComponentMismatch(format!(
                "{} coordinates against a modulus of rank {}",
                coords.len(),
                self.lattice.dim()
            )));
        }
        Ok(self.lattice.reduce(coords))
    }

    /// Canonical residue of an element of the whole algebra.
    pub fn residue(&self, alg: &EtaleAlgebra, x: &AlgebraicInt<T>) -> Vec<T> {
        self.lattice
            .reduce(alg.component_coords(x, self.prime.component))
    }

    pub fn contains(&self, coords: &[T]) -> bool {
        self.lattice.contains(coords)
    }

    /// All canonical residues, lexicographic order.
    pub fn residues(&self) -> Vec<Vec<T>> {
        self.lattice.representatives()
    }

    pub fn norm_u128(&self) -> Option<u128> {
        self.norm.to_u128()
    }
}

/// Canonical representative of x (an element of the modulus' component)
/// in the fundamental HNF box.
pub fn reduce_mod<T: Scalar>(x: &AlgebraicInt<T>, m: &Modulus<T>) -> Result<AlgebraicInt<T>> {
    Ok(AlgebraicInt::new(m.reduce(&x.coords)?))
}

/// Representatives of 𝔭^a modulo 𝔭^b for a ≤ b.
pub fn sub_residues<T: Scalar>(prime: &PrimeIdeal, a: u32, b: u32) -> Result<Vec<Vec<T>>> {
    let big: Modulus<T> = ideal_power(prime, b)?;
    if a == 0 {
        return Ok(big.residues());
    }
    let small: Modulus<T> = ideal_power(prime, a)?;
    Ok(big
        .residues()
        .into_iter()
        .filter(|r| small.contains(r))
        .collect())
}
