//! Admissible finite configurations, block codes between admissible shift
//! spaces, derived local sets, conjugacy and symmetry searches, orbit
//! approximation.

mod code;
mod derived;
mod orbit;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::rings::{split_prime, AlgebraicInt, EtaleAlgebra, Lattice, PrimeIdeal};
use crate::scalar::Scalar;
use crate::sieve::{LocalSet, SieveSpec, TailRule};

pub use code::{
    apply_block_code, format_code, parse_code, random_admissible, verify_intertwiner, BoxRegion,
    IntertwinerFailure, IntertwinerReport, VerifyConfig, WindowCode,
};
pub use derived::{
    conjugacy_search, derived_local_set, minimal_exponent, minus_pattern_plus, symmetry_scan,
    translate_equal, translate_subset, Conjugacy, SymmetryCode, SymmetryScan,
};
pub use orbit::{orbit_approximation, OrbitApprox};

/// A finite subset of O_K, kept sorted by coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern<T = i64> {
    pub algebra: EtaleAlgebra,
    pub points: BTreeSet<AlgebraicInt<T>>,
}

impl<T: Scalar> Pattern<T> {
    pub fn new(
        algebra: &EtaleAlgebra,
        points: impl IntoIterator<Item = AlgebraicInt<T>>,
    ) -> Result<Self> {
        let points: BTreeSet<_> = points.into_iter().collect();
        for p in &points {
            algebra.check(p)?;
        }
        Ok(Pattern {
            algebra: algebra.clone(),
            points,
        })
    }

    pub fn empty(algebra: &EtaleAlgebra) -> Self {
        Pattern {
            algebra: algebra.clone(),
            points: BTreeSet::new(),
        }
    }

    /// Rational integers as points of a degree-one algebra.
    pub fn from_ints(algebra: &EtaleAlgebra, v: &[i64]) -> Result<Self> {
        Self::new(algebra, v.iter().map(|&x| AlgebraicInt::from_i64s(&[x])))
    }

    /// Comma separated element literals, e.g. `1+w, -2, 3w`.
    pub fn parse(algebra: &EtaleAlgebra, s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        let pts = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| algebra.parse_element::<T>(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(algebra, pts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &AlgebraicInt<T>) -> bool {
        self.points.contains(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AlgebraicInt<T>> {
        self.points.iter()
    }

    /// g + X.
    pub fn translate(&self, g: &AlgebraicInt<T>) -> Self {
        Pattern {
            algebra: self.algebra.clone(),
            points: self.points.iter().map(|x| x.add(g)).collect(),
        }
    }

    pub fn union(&self, o: &Self) -> Self {
        Pattern {
            algebra: self.algebra.clone(),
            points: self.points.union(&o.points).cloned().collect(),
        }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.points
            .iter()
            .map(|x| self.algebra.format_element(x))
            .collect()
    }
}

impl<T: Scalar> std::fmt::Display for Pattern<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}}}", self.to_strings().join(", "))
    }
}

/// δ with (δ + R_𝔭) ∩ X = ∅.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslateWitness {
    pub prime: PrimeIdeal,
    pub exponent: u32,
    pub delta: Vec<String>,
}

/// Per-prime translate witnesses, or the first prime where every translate
/// of R_𝔭 meets X. Tail primes with Nm(𝔭)^k > tail_norm_bound need no
/// witness: there |X|·meas(R_𝔭) < 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub witnesses: Vec<TranslateWitness>,
    pub violation: Option<PrimeIdeal>,
    pub tail_norm_bound: u128,
}

/// The set {x − r : x ∈ X, r ∈ R_𝔭} of canonical residues; δ + R_𝔭 meets
/// X exactly when δ lies in it.
fn hit_classes<T: Scalar>(
    alg: &EtaleAlgebra,
    ls: &LocalSet<T>,
    x: &Pattern<T>,
) -> BTreeSet<Vec<T>> {
    let c = ls.prime().component;
    let lat = &ls.modulus.lattice;
    let mut out = BTreeSet::new();
    for p in &x.points {
        let pc = alg.component_coords(p, c);
        for r in &ls.classes {
            let v: Vec<T> = pc
                .iter()
                .zip(r)
                .map(|(a, b)| a.clone() - b.clone())
                .collect();
            out.insert(lat.reduce(&v));
        }
    }
    out
}

/// Lexicographically first canonical residue outside `taken`.
fn first_missing<T: Scalar>(lat: &Lattice<T>, taken: &BTreeSet<Vec<T>>) -> Option<Vec<T>> {
    let d = lat.diagonal();
    let mut cur = vec![T::zero(); d.len()];
    loop {
        if !taken.contains(&cur) {
            return Some(cur);
        }
        // odometer, last coordinate fastest
        let mut i = d.len();
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            cur[i] = cur[i].clone() + T::one();
            if cur[i] < d[i] {
                break;
            }
            cur[i] = T::zero();
        }
    }
}

/// Smallest δ (canonical, lexicographic) with (δ + R_𝔭) ∩ X = ∅.
pub fn translate_witness<T: Scalar>(
    s: &SieveSpec<T>,
    x: &Pattern<T>,
    q: &PrimeIdeal,
) -> Result<Option<Vec<T>>> {
    let ls = s.local_set(q)?;
    if ls.is_empty() || x.is_empty() {
        return Ok(Some(vec![T::zero(); ls.modulus.lattice.dim()]));
    }
    Ok(first_missing(
        &ls.modulus.lattice,
        &hit_classes(&s.algebra, &ls, x),
    ))
}

/// Tail weight c with meas(R_𝔭) = c / Nm(𝔭)^k on tail primes.
pub(crate) fn tail_weight<T: Scalar>(s: &SieveSpec<T>) -> usize {
    match &s.tail {
        TailRule::Empty => 0,
        TailRule::KFree(_) => 1,
        TailRule::Translates { offsets, .. } => offsets.len(),
    }
}

/// Exception primes plus tail primes with Nm^k ≤ size·c: the only primes
/// where `size` points can meet every translate of R_𝔭.
pub(crate) fn relevant_primes<T: Scalar>(
    s: &SieveSpec<T>,
    size: usize,
) -> Result<(Vec<PrimeIdeal>, u128)> {
    let mut out: BTreeSet<PrimeIdeal> = s.exceptions.keys().copied().collect();
    let bound = (size as u128) * tail_weight(s) as u128;
    if let Some(k) = s.tail.exponent() {
        for p in arith::primes() {
            if (p as u128).saturating_pow(k) > bound {
                break;
            }
            for q in split_prime(&s.algebra, p)? {
                if !s.is_exception(&q) && q.norm_pow(k) <= bound {
                    out.insert(q);
                }
            }
        }
    }
    Ok((out.into_iter().collect(), bound))
}

/// Decide whether X is admissible for R, with witnesses.
pub fn is_admissible<T: Scalar>(s: &SieveSpec<T>, x: &Pattern<T>) -> Result<Admissibility> {
    if x.algebra != s.algebra {
        return Err(Error::ComponentMismatch(
            "pattern and sieve use different algebras".into(),
        ));
    }
    let (primes, bound) = relevant_primes(s, x.len())?;
    let mut witnesses = Vec::new();
    for q in primes {
        let ls = s.local_set(&q)?;
        match translate_witness(s, x, &q)? {
            Some(d) => witnesses.push(TranslateWitness {
                prime: q,
                exponent: ls.exponent(),
                delta: d.iter().map(|v| v.to_string()).collect(),
            }),
            None => {
                return Ok(Admissibility {
                    admissible: false,
                    witnesses,
                    violation: Some(q),
                    tail_norm_bound: bound,
                })
            }
        }
    }
    Ok(Admissibility {
        admissible: true,
        witnesses,
        violation: None,
        tail_norm_bound: bound,
    })
}

/// Residue bitmaps for the exhaustive counter.
struct HitTable {
    words: usize,
    /// (word offset, residue count) per prime
    spans: Vec<(usize, usize)>,
    /// per point, `words` words
    hits: Vec<u64>,
}

impl HitTable {
    fn build<T: Scalar>(s: &SieveSpec<T>, pts: &[AlgebraicInt<T>]) -> Result<Self> {
        let (primes, _) = relevant_primes(s, pts.len())?;
        let mut spans = Vec::new();
        let mut words = 0;
        let mut per_prime = Vec::new();
        for q in primes {
            let ls = s.local_set(&q)?;
            if ls.is_empty() {
                continue;
            }
            let m = ls
                .modulus
                .norm_u128()
                .filter(|&m| m <= 1 << 16)
                .ok_or_else(|| {
                    Error::BudgetExceeded(format!("too many residues modulo {q}^{}", ls.exponent()))
                })? as usize;
            let reps = ls.modulus.residues();
            spans.push((words, m));
            words += m.div_ceil(64);
            per_prime.push((ls, reps));
        }
        let mut hits = vec![0u64; words * pts.len()];
        for (i, p) in pts.iter().enumerate() {
            for ((ls, reps), &(off, _)) in per_prime.iter().zip(&spans) {
                let single = Pattern {
                    algebra: s.algebra.clone(),
                    points: [p.clone()].into_iter().collect(),
                };
                for h in hit_classes(&s.algebra, ls, &single) {
                    let j = reps.binary_search(&h).expect("canonical residue");
                    hits[i * words + off + j / 64] |= 1 << (j % 64);
                }
            }
        }
        Ok(HitTable { words, spans, hits })
    }

    fn covered(&self, state: &[u64]) -> bool {
        self.spans.iter().any(|&(off, m)| {
            let n: usize = state[off..off + m.div_ceil(64)]
                .iter()
                .map(|w| w.count_ones() as usize)
                .sum();
            n == m
        })
    }
}

fn count_rec(
    t: &HitTable,
    i: usize,
    n: usize,
    state: &mut Vec<u64>,
    nodes: &mut u64,
) -> Result<u128> {
    *nodes += 1;
    if *nodes > 1 << 34 {
        return Err(Error::BudgetExceeded("admissible count search".into()));
    }
    if i == n {
        return Ok(1);
    }
    let mut total = count_rec(t, i + 1, n, state, nodes)?;
    let saved = state.clone();
    for (s, h) in state
        .iter_mut()
        .zip(&t.hits[i * t.words..(i + 1) * t.words])
    {
        *s |= h;
    }
    if !t.covered(state) {
        total += count_rec(t, i + 1, n, state, nodes)?;
    }
    *state = saved;
    Ok(total)
}

/// The coordinate box [0, N)^degree as a list of points.
pub fn box_points<T: Scalar>(alg: &EtaleAlgebra, n: u64) -> Vec<AlgebraicInt<T>> {
    let d = alg.degree();
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n as i64).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out.iter().map(|p| AlgebraicInt::from_i64s(p)).collect()
}

/// Number of admissible subsets of the box [0, N)^degree.
pub fn count_admissible<T: Scalar>(s: &SieveSpec<T>, n: u64) -> Result<u128> {
    let volume = (n as u128)
        .checked_pow(s.algebra.degree() as u32)
        .unwrap_or(u128::MAX);
    if volume > 64 {
        return Err(Error::BudgetExceeded(format!(
            "box of {volume} points; at most 64 allowed"
        )));
    }
    let pts = box_points::<T>(&s.algebra, n);
    let t = HitTable::build(s, &pts)?;
    let mut state = vec![0u64; t.words];
    let mut nodes = 0;
    count_rec(&t, 0, pts.len(), &mut state, &mut nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{build_sieve, kfree_sieve};

    fn q() -> EtaleAlgebra {
        EtaleAlgebra::rational()
    }

    /// Sieve with R_p = ∅ for p = 2, 3 and {0, 1} mod p otherwise.
    pub(crate) fn symmetry_sieve() -> SieveSpec<i64> {
        let alg = q();
        let ex = [2u64, 3]
            .iter()
            .map(|&p| LocalSet::new(&split_prime(&alg, p).unwrap()[0], 1, vec![]).unwrap())
            .collect();
        build_sieve(alg.clone(), TailRule::two_class(&alg), ex).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        let s = kfree_sieve::<i64>(&q(), 2).unwrap();
        let x = Pattern::from_ints(&q(), &[0, 4]).unwrap();
        assert!(is_admissible(&s, &x).unwrap().admissible);
        let two = split_prime(&q(), 2).unwrap()[0];
        assert_eq!(translate_witness(&s, &x, &two).unwrap(), Some(vec![1]));
        let y = Pattern::from_ints(&q(), &[0, 1, 2, 3]).unwrap();
        let a = is_admissible(&s, &y).unwrap();
        assert!(!a.admissible);
        assert_eq!(a.violation.unwrap().p, 2);
        let fig4 = Pattern::from_ints(&q(), &[-3, -2, -1, 2, 3, 4, 9, 17, 19]).unwrap();
        assert!(is_admissible(&symmetry_sieve(), &fig4).unwrap().admissible);
    }

    /// Subsets of [0, N) that miss a class mod 4 and a class mod 9, and so
    /// on: a direct 2^N loop.
    fn brute_count(n: i64) -> u64 {
        let ps: Vec<i64> = vec![4, 9, 25, 49];
        (0u64..1 << n)
            .filter(|mask| {
                ps.iter().all(|&m| {
                    let hit: BTreeSet<i64> = (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| i % m)
                        .collect();
                    (hit.len() as i64) < m
                })
            })
            .count() as u64
    }

    #[test]
    fn counts() {
        let s = kfree_sieve::<i64>(&q(), 2).unwrap();
        assert_eq!(count_admissible(&s, 8).unwrap(), 175);
        assert_eq!(count_admissible(&s, 1).unwrap(), 2);
        for n in [4, 9, 12] {
            assert_eq!(
                count_admissible(&s, n as u64).unwrap(),
                brute_count(n) as u128
            );
        }
        let e = build_sieve::<i64>(q(), TailRule::Empty, vec![]).unwrap();
        assert_eq!(count_admissible(&e, 3).unwrap(), 8);
        assert!(matches!(
            count_admissible(&s, 65),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
