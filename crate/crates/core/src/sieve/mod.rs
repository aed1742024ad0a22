//! Finitely specified sieves, membership, enumeration and density.

mod boxmask;
mod density;
mod parse;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

pub use boxmask::{sieve_box, BoxMask};
pub(crate) use density::density_enclosure;
pub use density::{density_interval, tail_count, valuation};
pub use parse::{format_sieve, parse_sieve};

use crate::arith;
use crate::error::{Error, Result};
use crate::rings::prime::sub_residues;
use crate::rings::{ideal_power, split_prime, AlgebraicInt, EtaleAlgebra, Modulus, PrimeIdeal};
use crate::scalar::Scalar;

/// Rule for every prime that is not listed as an exception.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailRule<T> {
    /// R_𝔭 = ∅.
    Empty,
    /// R_𝔭 = 𝔭^k.
    KFree(u32),
    /// R_𝔭 = ∪_t (t + 𝔭^k) for a fixed finite offset set.
    Translates {
        offsets: Vec<AlgebraicInt<T>>,
        exponent: u32,
    },
}

impl<T: Scalar> TailRule<T> {
    /// The rule "two classes {0, 1} mod 𝔭".
    pub fn two_class(alg: &EtaleAlgebra) -> Self {
        TailRule::Translates {
            offsets: vec![alg.zero(), alg.one()],
            exponent: 1,
        }
    }

    pub fn exponent(&self) -> Option<u32> {
        match self {
            TailRule::Empty => None,
            TailRule::KFree(k) => Some(*k),
            TailRule::Translates { exponent, .. } => Some(*exponent),
        }
    }

    /// Offsets t with R_𝔭 = ∪ (t + 𝔭^k); empty for the empty rule.
    pub fn offsets(&self, alg: &EtaleAlgebra) -> Vec<AlgebraicInt<T>> {
        match self {
            TailRule::Empty => vec![],
            TailRule::KFree(_) => vec![alg.zero()],
            TailRule::Translates { offsets, .. } => offsets.clone(),
        }
    }
}

/// R_𝔭 as a finite set of canonical classes modulo 𝔭^k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSet<T> {
    pub modulus: Modulus<T>,
    pub classes: BTreeSet<Vec<T>>,
}

impl<T: Scalar> LocalSet<T> {
    /// Build from canonical representatives; rejects out-of-box classes.
    pub fn new(prime: &PrimeIdeal, k: u32, classes: Vec<Vec<T>>) -> Result<Self> {
        let modulus = ideal_power(prime, k)?;
        let mut set = BTreeSet::new();
        for c in classes {
            if !modulus.lattice.is_canonical(&c) {
                return Err(Error::ClassOutOfRange(format!(
                    "{:?} is not a canonical residue modulo {}^{}",
                    c.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    prime,
                    k
                )));
            }
            set.insert(c);
        }
        Ok(LocalSet {
            modulus,
            classes: set,
        })
    }

    /// Build from arbitrary representatives, reducing them.
    pub fn from_elements(prime: &PrimeIdeal, k: u32, reps: &[Vec<T>]) -> Result<Self> {
        let modulus: Modulus<T> = ideal_power(prime, k)?;
        let classes = reps
            .iter()
            .map(|r| modulus.reduce(r))
            .collect::<Result<_>>()?;
        Ok(LocalSet { modulus, classes })
    }

    pub fn prime(&self) -> &PrimeIdeal {
        &self.modulus.prime
    }

    pub fn exponent(&self) -> u32 {
        self.modulus.exponent
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.modulus
            .norm
            .to_u128()
            .is_some_and(|n| self.classes.len() as u128 >= n)
    }

    pub fn measure(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.classes.len()),
            self.modulus.norm.to_bigint(),
        )
    }

    /// Membership of component-level coordinates.
    pub fn contains(&self, coords: &[T]) -> bool {
        self.classes.contains(&self.modulus.lattice.reduce(coords))
    }

    /// The same set described modulo 𝔭^b, b ≥ current exponent.
    pub fn lift(&self, b: u32) -> Result<LocalSet<T>> {
        let a = self.exponent();
        if b <= a {
            return Ok(self.clone());
        }
        let steps: Vec<Vec<T>> = sub_residues(self.prime(), a, b)?;
        let modulus: Modulus<T> = ideal_power(self.prime(), b)?;
        let mut classes = BTreeSet::new();
        for c in &self.classes {
            for s in &steps {
                let v: Vec<T> = c
                    .iter()
                    .zip(s)
                    .map(|(x, y)| x.clone() + y.clone())
                    .collect();
                classes.insert(modulus.lattice.reduce(&v));
            }
        }
        Ok(LocalSet { modulus, classes })
    }

    /// δ + R.
    pub fn translate(&self, delta: &[T]) -> LocalSet<T> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                let v: Vec<T> = c
                    .iter()
                    .zip(delta)
                    .map(|(x, y)| x.clone() + y.clone())
                    .collect();
                self.modulus.lattice.reduce(&v)
            })
            .collect();
        LocalSet {
            modulus: self.modulus.clone(),
            classes,
        }
    }

    pub fn class_strings(&self) -> Vec<String> {
        self.classes
            .iter()
            .map(|c| {
                c.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }
}

/// Derived properties, computed at construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SieveFlags {
    pub non_large: bool,
    pub cofinite: bool,
    /// A prime where R_𝔭 is everything, if any.
    pub large_at: Option<PrimeIdeal>,
    /// Exception primes with R_𝔭 = ∅ (for cofinite sieves, the complete list).
    pub empty_primes: Vec<PrimeIdeal>,
}

#[derive(Debug, Clone)]
pub struct SieveSpec<T> {
    pub algebra: EtaleAlgebra,
    pub tail: TailRule<T>,
    pub exceptions: BTreeMap<PrimeIdeal, LocalSet<T>>,
    pub flags: SieveFlags,
}

/// Validate and normalize a sieve.
pub fn build_sieve<T: Scalar>(
    algebra: EtaleAlgebra,
    tail: TailRule<T>,
    exceptions: Vec<LocalSet<T>>,
) -> Result<SieveSpec<T>> {
    let mut map = BTreeMap::new();
    for ls in exceptions {
        let q = *ls.prime();
        let ok = q.component < algebra.num_components()
            && algebra.component(q.component) == q.field
            && split_prime(&algebra, q.p)?.contains(&q);
        if !ok {
            return Err(Error::ComponentMismatch(format!(
                "{q} is not a prime of {algebra}"
            )));
        }
        if map.insert(q, ls).is_some() {
            return Err(Error::InvalidArgument(format!("prime {q} listed twice")));
        }
    }
    match &tail {
        TailRule::KFree(0) => {
            return Err(Error::InvalidArgument(
                "tail exponent must be at least 1".into(),
            ))
        }
        TailRule::Translates { offsets, exponent } => {
            if *exponent == 0 {
                return Err(Error::InvalidArgument(
                    "tail exponent must be at least 1".into(),
                ));
            }
            if offsets.is_empty() {
                return Err(Error::InvalidArgument(
                    "translate tail needs an offset".into(),
                ));
            }
            for o in offsets {
                algebra.check(o)?;
            }
        }
        _ => {}
    }
    let mut s = SieveSpec {
        algebra,
        tail,
        exceptions: map,
        flags: SieveFlags {
            non_large: true,
            cofinite: true,
            large_at: None,
            empty_primes: vec![],
        },
    };
    s.flags = s.compute_flags()?;
    Ok(s)
}

/// The k-free sieve R_𝔭 = 𝔭^k.
pub fn kfree_sieve<T: Scalar>(algebra: &EtaleAlgebra, k: u32) -> Result<SieveSpec<T>> {
    build_sieve(algebra.clone(), TailRule::KFree(k), vec![])
}

/// Outcome of a membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict<T> {
    pub member: bool,
    pub certificate: Certificate<T>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate<T> {
    /// x lies in R_𝔭 via the cited class modulo 𝔭^exponent.
    Violation {
        prime: PrimeIdeal,
        exponent: u32,
        class: Vec<T>,
    },
    /// Every prime where x could lie in R_𝔭; none did.
    Checked { primes: Vec<PrimeIdeal> },
}

impl<T: Scalar> SieveSpec<T> {
    fn compute_flags(&self) -> Result<SieveFlags> {
        let mut large_at = None;
        for (q, ls) in &self.exceptions {
            if ls.is_full() {
                large_at = Some(*q);
                break;
            }
        }
        if large_at.is_none() {
            if let TailRule::Translates { offsets, exponent } = &self.tail {
                // only primes with Nm^k ≤ #offsets can be covered
                let c = offsets.len() as u128;
                for p in arith::primes() {
                    if (p as u128).saturating_pow(*exponent) > c {
                        break;
                    }
                    for q in split_prime(&self.algebra, p)? {
                        if self.exceptions.contains_key(&q) || q.norm_pow(*exponent) > c {
                            continue;
                        }
                        if self.tail_local_set(&q)?.is_full() {
                            large_at = Some(q);
                            break;
                        }
                    }
                    if large_at.is_some() {
                        break;
                    }
                }
            }
        }
        let cofinite = !matches!(self.tail, TailRule::Empty);
        Ok(SieveFlags {
            non_large: large_at.is_none(),
            cofinite,
            large_at,
            empty_primes: self
                .exceptions
                .iter()
                .filter(|(_, ls)| ls.is_empty())
                .map(|(q, _)| *q)
                .collect(),
        })
    }

    pub fn is_exception(&self, q: &PrimeIdeal) -> bool {
        self.exceptions.contains_key(q)
    }

    /// R_𝔭 as dictated by the tail rule, ignoring exceptions.
    pub fn tail_local_set(&self, q: &PrimeIdeal) -> Result<LocalSet<T>> {
        match &self.tail {
            TailRule::Empty => LocalSet::new(q, 1, vec![]),
            TailRule::KFree(k) => {
                let m: Modulus<T> = ideal_power(q, *k)?;
                let zero = vec![T::zero(); m.lattice.dim()];
                LocalSet::new(q, *k, vec![zero])
            }
            TailRule::Translates { offsets, exponent } => {
                let reps: Vec<Vec<T>> = offsets
                    .iter()
                    .map(|o| self.algebra.component_coords(o, q.component).to_vec())
                    .collect();
                LocalSet::from_elements(q, *exponent, &reps)
            }
        }
    }

    /// R_𝔭 for any prime of the algebra.
    pub fn local_set(&self, q: &PrimeIdeal) -> Result<LocalSet<T>> {
        match self.exceptions.get(q) {
            Some(ls) => Ok(ls.clone()),
            None => self.tail_local_set(q),
        }
    }

    /// Exponent of the tail rule when it can feed a density or solver bound.
    pub fn boundable_exponent(&self) -> Result<Option<u32>> {
        match self.tail.exponent() {
            Some(1) => Err(Error::TailNotBoundable),
            e => Ok(e),
        }
    }

    /// Smallest prime of component `c` that follows the tail rule.
    fn first_tail_prime(&self, c: usize) -> PrimeIdeal {
        crate::rings::primes_of(&self.algebra)
            .find(|q| q.component == c && !self.is_exception(q))
            .expect("infinitely many primes")
    }

    /// Decide x ∈ V(K,R) with a certificate.
    pub fn membership(&self, x: &AlgebraicInt<T>) -> Result<Verdict<T>> {
        self.algebra.check(x)?;
        let mut best: Option<(PrimeIdeal, u32, Vec<T>)> = None;
        let mut checked: Vec<PrimeIdeal> = Vec::new();
        let consider = |best: &mut Option<(PrimeIdeal, u32, Vec<T>)>, q: PrimeIdeal, k, class| {
            if best.as_ref().is_none_or(|(b, _, _)| q < *b) {
                *best = Some((q, k, class));
            }
        };
        for (q, ls) in &self.exceptions {
            checked.push(*q);
            let cc = self.algebra.component_coords(x, q.component);
            let r = ls.modulus.lattice.reduce(cc);
            if ls.classes.contains(&r) {
                consider(&mut best, *q, ls.exponent(), r);
                break;
            }
        }
        if let Some(k) = self.tail.exponent() {
            let offsets = self.tail.offsets(&self.algebra);
            for c in 0..self.algebra.num_components() {
                let xc = self.algebra.component_coords(x, c);
                for t in &offsets {
                    let tc = self.algebra.component_coords(t, c);
                    let z: Vec<T> = xc
                        .iter()
                        .zip(tc)
                        .map(|(a, b)| a.clone() - b.clone())
                        .collect();
                    if z.iter().all(|v| v.is_zero()) {
                        let q = self.first_tail_prime(c);
                        let m: Modulus<T> = ideal_power(&q, k)?;
                        consider(&mut best, q, k, m.lattice.reduce(xc));
                        continue;
                    }
                    let cap = best.as_ref().map(|b| b.0.p + 1);
                    if let Some((q, class)) = self.tail_hit(c, &z, xc, k, cap, &mut checked)? {
                        consider(&mut best, q, k, class);
                    }
                }
            }
        }
        Ok(match best {
            Some((prime, exponent, class)) => Verdict {
                member: false,
                certificate: Certificate::Violation {
                    prime,
                    exponent,
                    class,
                },
            },
            None => {
                checked.sort();
                checked.dedup();
                Verdict {
                    member: true,
                    certificate: Certificate::Checked { primes: checked },
                }
            }
        })
    }

    /// Smallest tail prime 𝔭 of component c with z ∈ 𝔭^k, scanning only
    /// rational primes q with q^k dividing Nm(z).
    fn tail_hit(
        &self,
        c: usize,
        z: &[T],
        xc: &[T],
        k: u32,
        cap: Option<u64>,
        checked: &mut Vec<PrimeIdeal>,
    ) -> Result<Option<(PrimeIdeal, Vec<T>)>> {
        let f = self.algebra.component(c);
        let nm = crate::rings::algebra::norm_component(f, z).abs();
        let n: u128 = nm
            .to_u128()
            .ok_or_else(|| Error::Overflow(format!("norm {nm} exceeds 128 bits")))?;
        for (q, _) in arith::heavy_primes(n, k, cap) {
            for pr in split_prime(&self.algebra, q)? {
                if pr.component != c || self.is_exception(&pr) {
                    continue;
                }
                checked.push(pr);
                let m: Modulus<T> = ideal_power(&pr, k)?;
                if m.lattice.contains(z) {
                    return Ok(Some((pr, m.lattice.reduce(xc))));
                }
            }
        }
        Ok(None)
    }

    /// All members with max |coordinate| ≤ B, lexicographic order.
    pub fn enumerate_v(&self, bound: u64) -> Result<Vec<AlgebraicInt<T>>> {
        let b = bound as i64;
        let n = self.algebra.degree();
        let mask = sieve_box(self, &vec![-b; n], &vec![b; n])?;
        Ok(mask
            .free_points()
            .map(|p| AlgebraicInt::new(p.iter().map(|&v| T::from_i64_exact(v)).collect()))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> EtaleAlgebra {
        EtaleAlgebra::rational()
    }

    fn int(v: i64) -> AlgebraicInt<i64> {
        AlgebraicInt::from_i64s(&[v])
    }

    #[test]
    fn squarefree_membership() {
        let s = kfree_sieve::<i64>(&q(), 2).unwrap();
        assert!(s.flags.non_large && s.flags.cofinite);
        let v = s.membership(&int(12)).unwrap();
        assert!(!v.member);
        match v.certificate {
            Certificate::Violation { prime, .. } => assert_eq!(prime.p, 2),
            _ => panic!(),
        }
        assert!(s.membership(&int(10)).unwrap().member);
        assert!(!s.membership(&int(0)).unwrap().member);
        assert!(!s.membership(&int(-18)).unwrap().member);
    }

    #[test]
    fn three_in_q_sqrt3() {
        let k = EtaleAlgebra::quadratic(3).unwrap();
        let s = kfree_sieve::<i64>(&k, 2).unwrap();
        let v = s.membership(&AlgebraicInt::from_i64s(&[3, 0])).unwrap();
        match v.certificate {
            Certificate::Violation { prime, .. } => {
                assert_eq!(prime.p, 3);
                assert!(matches!(
                    prime.splitting,
                    crate::rings::Splitting::Ramified { .. }
                ));
            }
            _ => panic!("3 should not be squarefree"),
        }
    }

    #[test]
    fn class_range() {
        let p3 = split_prime(&q(), 3).unwrap()[0];
        assert!(matches!(
            LocalSet::<i64>::new(&p3, 2, vec![vec![9]]),
            Err(Error::ClassOutOfRange(_))
        ));
    }

    #[test]
    fn enumerate_small() {
        let s = kfree_sieve::<i64>(&q(), 2).unwrap();
        let v: Vec<i64> = s
            .enumerate_v(10)
            .unwrap()
            .iter()
            .map(|x| x.coords[0])
            .collect();
        assert_eq!(v, vec![-10, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10]);
        let e = build_sieve::<i64>(q(), TailRule::Empty, vec![]).unwrap();
        assert_eq!(e.enumerate_v(2).unwrap().len(), 5);
        assert!(!e.flags.cofinite);
        let one = kfree_sieve::<i64>(&q(), 1).unwrap();
        let v: Vec<i64> = one
            .enumerate_v(10)
            .unwrap()
            .iter()
            .map(|x| x.coords[0])
            .collect();
        assert_eq!(v, vec![-1, 1]);
    }

    #[test]
    fn symmetry_sieve_local_sets() {
        let alg = q();
        let ex = [2u64, 3]
            .iter()
            .map(|&p| LocalSet::new(&split_prime(&alg, p).unwrap()[0], 1, vec![]).unwrap())
            .collect();
        let s = build_sieve::<i64>(alg.clone(), TailRule::two_class(&alg), ex).unwrap();
        assert!(s.flags.non_large && s.flags.cofinite);
        assert_eq!(s.flags.empty_primes.len(), 2);
        let p7 = split_prime(&alg, 7).unwrap()[0];
        let ls = s.local_set(&p7).unwrap();
        assert_eq!(ls.class_strings(), vec!["0", "1"]);
        assert_eq!(ls.measure(), BigRational::new(2.into(), 7.into()));
        // without the exceptions, 2 and 3 would be covered
        let bad = build_sieve::<i64>(alg.clone(), TailRule::two_class(&alg), vec![]).unwrap();
        assert_eq!(bad.flags.large_at.map(|q| q.p), Some(2));
    }
}
