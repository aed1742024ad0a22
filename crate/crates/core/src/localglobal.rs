//! Elements of V(K,R) with prescribed residues, and surjectivity of the
//! reductions V_{K,k} → V_{K,k,p}.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rings::lattice::crt_pair;
use crate::rings::prime::sub_residues;
use crate::rings::{
    ideal_power, split_prime, AlgebraicInt, EtaleAlgebra, Lattice, Modulus, PrimeIdeal,
};
use crate::scalar::Scalar;
use crate::sieve::{kfree_sieve, sieve_box, BoxMask, SieveSpec};

/// y ≡ residue mod 𝔭^exponent, residue given in component coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceConstraint<T> {
    pub prime: PrimeIdeal,
    pub exponent: u32,
    pub residue: Vec<T>,
}

impl<T: Scalar> CongruenceConstraint<T> {
    /// Reduces the residue to its canonical representative.
    pub fn new(prime: PrimeIdeal, exponent: u32, residue: &[T]) -> Result<Self> {
        let m: Modulus<T> = ideal_power(&prime, exponent)?;
        Ok(CongruenceConstraint {
            prime,
            exponent,
            residue: m.reduce(residue)?,
        })
    }

    pub fn modulus(&self) -> Result<Modulus<T>> {
        ideal_power(&self.prime, self.exponent)
    }
}

/// Parse `p^k=r` or `p[i]^k=r`, with r a literal of the prime's component
/// and i the position of the prime in `split_prime(K, p)`.
pub fn parse_constraint<T: Scalar>(alg: &EtaleAlgebra, s: &str) -> Result<CongruenceConstraint<T>> {
    let bad = || Error::Parse(format!("constraint `{s}` is not of the form p[i]^k=r"));
    let (lhs, rhs) = s.split_once('=').ok_or_else(bad)?;
    let (pp, k) = lhs.trim().split_once('^').ok_or_else(bad)?;
    let k: u32 = k.trim().parse().map_err(|_| bad())?;
    let (p, idx) = match pp.split_once('[') {
        Some((p, i)) => (
            p,
            Some(
                i.trim_end_matches(']')
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| bad())?,
            ),
        ),
        None => (pp, None),
    };
    let p: u64 = p.trim().parse().map_err(|_| bad())?;
    let above = split_prime(alg, p)?;
    let q = match idx {
        Some(i) => *above.get(i).ok_or_else(bad)?,
        None if above.len() == 1 => above[0],
        None => {
            return Err(Error::Parse(format!(
                "{} primes lie above {p}; write {p}[i]^{k}=r",
                above.len()
            )))
        }
    };
    let field = EtaleAlgebra::new(vec![q.field])?;
    let r = field.parse_element::<T>(rhs.trim())?;
    CongruenceConstraint::new(q, k, &r.coords)
}

/// Shell-ordered enumeration of ℤ^n: shells of growing max-norm, each in
/// lexicographic order over the coordinate sequence 0, 1, −1, 2, −2, ...
#[derive(Debug, Default)]
pub struct Scanner {
    n: usize,
    shells: Vec<Vec<Vec<i64>>>,
}

fn zigzag(r: i64) -> Vec<i64> {
    let mut v = vec![0];
    for i in 1..=r {
        v.push(i);
        v.push(-i);
    }
    v
}

impl Scanner {
    pub fn new(n: usize) -> Self {
        Scanner {
            n,
            shells: Vec::new(),
        }
    }

    pub fn shell(&mut self, r: usize) -> &[Vec<i64>] {
        while self.shells.len() <= r {
            let radius = self.shells.len() as i64;
            let vals = zigzag(radius);
            let mut out = Vec::new();
            let mut prefix = Vec::with_capacity(self.n);
            shell_rec(self.n, radius, &vals, &mut prefix, false, &mut out);
            self.shells.push(out);
        }
        &self.shells[r]
    }
}

fn shell_rec(
    n: usize,
    r: i64,
    vals: &[i64],
    prefix: &mut Vec<i64>,
    hit: bool,
    out: &mut Vec<Vec<i64>>,
) {
    if prefix.len() == n {
        if hit || n == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let edge = [r, -r];
    let last_chance = !hit && prefix.len() + 1 == n;
    let choices: &[i64] = if last_chance {
        if r == 0 {
            &edge[..1]
        } else {
            &edge
        }
    } else {
        vals
    };
    for &v in choices {
        prefix.push(v);
        shell_rec(n, r, vals, prefix, hit || v.abs() == r, out);
        prefix.pop();
    }
}

/// CRT base point and block-diagonal step lattice of a constraint system.
#[derive(Debug, Clone)]
pub struct CompiledSystem<T> {
    pub base: AlgebraicInt<T>,
    pub steps: Vec<Vec<T>>,
}

fn compile<T: Scalar>(
    alg: &EtaleAlgebra,
    cs: &[CongruenceConstraint<T>],
) -> Result<CompiledSystem<T>> {
    // CRT in BigInt: the combined modulus can leave T even when every
    // single constraint fits
    let big = |v: &[T]| v.iter().map(|x| x.to_bigint()).collect::<Vec<BigInt>>();
    let back = |v: &BigInt| {
        T::from_bigint(v)
            .ok_or_else(|| Error::Overflow(format!("combined modulus has entries near {v}")))
    };
    let n = alg.degree();
    let mut base = vec![T::zero(); n];
    let mut steps = vec![vec![T::zero(); n]; n];
    for c in 0..alg.num_components() {
        let r = alg.range(c);
        let mut x = vec![BigInt::zero(); r.len()];
        let mut l = Lattice::<BigInt>::identity(r.len());
        for con in cs.iter().filter(|con| con.prime.component == c) {
            let m = con.modulus()?;
            let rows: Vec<Vec<BigInt>> = m.lattice.rows().iter().map(|row| big(row)).collect();
            let (y, inter) = crt_pair(
                &x,
                &l,
                &big(&con.residue),
                &Lattice::from_generators(&rows)?,
            )?;
            x = y;
            l = inter;
        }
        for (j, i) in r.clone().enumerate() {
            base[i] = back(&x[j])?;
            for (jj, ii) in r.clone().enumerate() {
                steps[i][ii] = back(&l.rows()[j][jj])?;
            }
        }
    }
    Ok(CompiledSystem {
        base: AlgebraicInt::new(base),
        steps,
    })
}

impl<T: Scalar> CompiledSystem<T> {
    pub fn point(&self, t: &[i64]) -> AlgebraicInt<T> {
        let mut y = self.base.coords.clone();
        for (ti, row) in t.iter().zip(&self.steps) {
            if *ti == 0 {
                continue;
            }
            let ti = T::from_i64_exact(*ti);
            for (a, b) in y.iter_mut().zip(row) {
                *a = a.clone() + ti.clone() * b.clone();
            }
        }
        AlgebraicInt::new(y)
    }
}

/// Reject constraints whose whole class lies inside R_𝔭.
fn validate<T: Scalar>(s: &SieveSpec<T>, cs: &[CongruenceConstraint<T>]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for c in cs {
        if !split_prime(&s.algebra, c.prime.p)?.contains(&c.prime) {
            return Err(Error::ComponentMismatch(format!(
                "{} is not a prime of {}",
                c.prime, s.algebra
            )));
        }
        if !seen.insert(c.prime) {
            return Err(Error::InvalidConstraint(format!(
                "prime {} constrained twice",
                c.prime
            )));
        }
        let ls = s.local_set(&c.prime)?;
        let kr = ls.exponent();
        let inside = if c.exponent >= kr {
            ls.contains(&c.residue)
        } else {
            sub_residues::<T>(&c.prime, c.exponent, kr)?
                .iter()
                .all(|d| {
                    let v: Vec<T> = c
                        .residue
                        .iter()
                        .zip(d)
                        .map(|(a, b)| a.clone() + b.clone())
                        .collect();
                    ls.contains(&v)
                })
        };
        if inside {
            return Err(Error::InvalidConstraint(format!(
                "the class of {:?} modulo {}^{} lies in R at that prime",
                c.residue.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                c.prime,
                c.exponent
            )));
        }
    }
    Ok(())
}

/// Smallest y (in scan order) with y ∈ V(K,R), the constraints, and `accept`.
pub fn solve_filtered<T: Scalar>(
    s: &SieveSpec<T>,
    cs: &[CongruenceConstraint<T>],
    bound: u64,
    accept: impl Fn(&AlgebraicInt<T>) -> bool,
) -> Result<AlgebraicInt<T>> {
    s.boundable_exponent()?;
    if let Some(q) = s.flags.large_at {
        return Err(Error::LargeSieve(q.to_string()));
    }
    validate(s, cs)?;
    let sys = compile(&s.algebra, cs)?;
    let mut scan = Scanner::new(s.algebra.degree());
    for r in 0..=bound as usize {
        for t in scan.shell(r) {
            let y = sys.point(t);
            if accept(&y) && s.membership(&y)?.member {
                return Ok(y);
            }
        }
    }
    Err(Error::NotFoundWithinBound(bound))
}

/// An element of V(K,R) meeting every congruence, searching shells of
/// radius ≤ bound around the CRT base point.
pub fn solve<T: Scalar>(
    s: &SieveSpec<T>,
    cs: &[CongruenceConstraint<T>],
    bound: u64,
) -> Result<AlgebraicInt<T>> {
    solve_filtered(s, cs, bound, |_| true)
}

#[derive(Debug, Clone, Serialize)]
pub struct SurjectivityReport {
    pub algebra: String,
    pub k: u32,
    pub p: u64,
    /// Classes of O_K / p^k.
    pub classes: u64,
    /// Classes of V_{K,k,p}.
    pub local_classes: u64,
    pub witnesses: u64,
    pub max_witness_height: u64,
    /// Class → witness pairs, kept only for small reports.
    pub pairs: Vec<(Vec<i64>, Vec<i64>)>,
}

const PAIR_LIMIT: usize = 64;

/// For every class of V_{K,k,p} find y ∈ V_{K,k} reducing to it, calling
/// `visit(class, y)` in lexicographic class order.
pub fn for_each_local_witness(
    alg: &EtaleAlgebra,
    k: u32,
    p: u64,
    bound: u64,
    mut visit: impl FnMut(&[i64], &[i64]),
) -> Result<SurjectivityReport> {
    if k < 2 {
        return Err(Error::PreconditionFailed(format!(
            "exponent k = {k}; need k ≥ 2"
        )));
    }
    let above = split_prime(alg, p)?;
    let n = alg.degree();
    let pk = (p as i64)
        .checked_pow(k)
        .filter(|v| (*v as u128).pow(n as u32) < 1 << 40)
        .ok_or_else(|| Error::BudgetExceeded(format!("{p}^{k} classes in degree {n}")))?;
    let sieve = kfree_sieve::<i64>(alg, k)?;
    // classes killed by some 𝔭^k above p
    let mut killed = BoxMask::new(&vec![0; n], &vec![pk - 1; n])?;
    for q in &above {
        let m: Modulus<i64> = ideal_power(q, k)?;
        killed.mark_class(
            alg.range(q.component),
            m.lattice.rows(),
            &vec![0; m.lattice.dim()],
        );
    }
    let span = 3u128 * pk as u128;
    let mask = if span.pow(n as u32) <= 1 << 32 {
        Some(sieve_box(&sieve, &vec![-pk; n], &vec![2 * pk - 1; n])?)
    } else {
        None
    };
    let mut scan = Scanner::new(n);
    let mut near: Vec<Vec<i64>> = scan.shell(0).to_vec();
    near.extend(scan.shell(1).iter().cloned());
    let deltas: Vec<isize> = match &mask {
        Some(m) => near
            .iter()
            .map(|t| {
                t.iter()
                    .zip(m.strides())
                    .map(|(ti, s)| *ti as isize * pk as isize * *s as isize)
                    .sum()
            })
            .collect(),
        None => vec![],
    };
    let mut report = SurjectivityReport {
        algebra: alg.to_string(),
        k,
        p,
        classes: killed.len() as u64,
        local_classes: 0,
        witnesses: 0,
        max_witness_height: 0,
        pairs: Vec::new(),
    };
    let steps: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { pk } else { 0 }).collect())
        .collect();
    for ci in 0..killed.len() {
        if killed.is_excluded_index(ci) {
            continue;
        }
        report.local_classes += 1;
        let class = killed.point(ci);
        let mut found: Option<Vec<i64>> = None;
        if let Some(m) = &mask {
            let base = m.index(&class).unwrap() as isize;
            for (t, d) in near.iter().zip(&deltas) {
                if !m.is_excluded_index((base + d) as usize) {
                    found = Some(class.iter().zip(t).map(|(c, ti)| c + ti * pk).collect());
                    break;
                }
            }
        }
        if found.is_none() {
            let sys = CompiledSystem {
                base: AlgebraicInt::new(class.clone()),
                steps: steps.clone(),
            };
            'outer: for r in 0..=bound as usize {
                for t in scan.shell(r) {
                    let y = sys.point(t);
                    if sieve.membership(&y)?.member {
                        found = Some(y.coords);
                        break 'outer;
                    }
                }
            }
        }
        let Some(y) = found else {
            return Err(Error::NotFoundWithinBound(bound));
        };
        report.witnesses += 1;
        let h = y.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        report.max_witness_height = report.max_witness_height.max(h);
        visit(&class, &y);
        if report.pairs.len() < PAIR_LIMIT {
            report.pairs.push((class, y));
        }
    }
    if report.local_classes as usize > PAIR_LIMIT {
        report.pairs.clear();
    }
    Ok(report)
}

/// Surjectivity of V_{K,k} → V_{K,k,p}, with witnesses in the report.
pub fn check_local_surjectivity(
    alg: &EtaleAlgebra,
    k: u32,
    p: u64,
    bound: u64,
) -> Result<SurjectivityReport> {
    for_each_local_witness(alg, k, p, bound, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{build_sieve, TailRule};

    fn q() -> EtaleAlgebra {
        EtaleAlgebra::rational()
    }

    #[test]
    fn squarefree_solutions() {
        let s = kfree_sieve::<i64>(&q(), 2).unwrap();
        let c = parse_constraint::<i64>(&q(), "2^2=3").unwrap();
        assert_eq!(solve(&s, &[c], 10).unwrap().coords, vec![3]);
        let c = parse_constraint::<i64>(&q(), "2^2=0").unwrap();
        assert!(matches!(
            solve(&s, &[c], 10),
            Err(Error::InvalidConstraint(_))
        ));
        // 2 mod 4 and 0 mod 9 is not a valid class; 2 mod 4 and 3 mod 9 gives 30
        let cs = vec![
            parse_constraint::<i64>(&q(), "2^2=2").unwrap(),
            parse_constraint::<i64>(&q(), "3^2=3").unwrap(),
        ];
        let y = solve(&s, &cs, 10).unwrap().coords[0];
        assert_eq!(y.rem_euclid(4), 2);
        assert_eq!(y.rem_euclid(9), 3);
        // linear scan oracle over the progression
        let oracle = [0i64, 36, -36, 72, -72].iter().map(|t| 30 + t).find(|y| {
            s.membership(&AlgebraicInt::from_i64s(&[*y]))
                .unwrap()
                .member
        });
        assert_eq!(Some(y), oracle);
    }

    #[test]
    fn one_free_is_not_boundable() {
        let s = kfree_sieve::<i64>(&q(), 1).unwrap();
        let c = parse_constraint::<i64>(&q(), "5^1=2").unwrap();
        assert!(matches!(solve(&s, &[c], 50), Err(Error::TailNotBoundable)));
    }

    #[test]
    fn coarse_constraint_against_fine_local_set() {
        // y ≡ 0 mod 2 is still solvable in the squarefree sieve
        let s = kfree_sieve::<i64>(&q(), 2).unwrap();
        let c = parse_constraint::<i64>(&q(), "2^1=0").unwrap();
        assert_eq!(solve(&s, &[c], 10).unwrap().coords, vec![2]);
        let e = build_sieve::<i64>(q(), TailRule::Empty, vec![]).unwrap();
        let c = parse_constraint::<i64>(&q(), "7^1=3").unwrap();
        assert_eq!(solve(&e, &[c], 10).unwrap().coords, vec![3]);
    }

    #[test]
    fn split_primes_share_an_index() {
        let k = EtaleAlgebra::quadratic(13).unwrap();
        let s = kfree_sieve::<i64>(&k, 2).unwrap();
        let cs = vec![
            parse_constraint::<i64>(&k, "3[0]^2=1").unwrap(),
            parse_constraint::<i64>(&k, "3[1]^1=2").unwrap(),
        ];
        let y = solve(&s, &cs, 10).unwrap();
        for c in &cs {
            let m = c.modulus().unwrap();
            assert_eq!(m.reduce(&y.coords).unwrap(), c.residue);
        }
        assert!(s.membership(&y).unwrap().member);
    }

    #[test]
    fn surjectivity_small() {
        let r = check_local_surjectivity(&q(), 2, 2, 10).unwrap();
        assert_eq!(r.local_classes, 3);
        assert_eq!(
            r.pairs,
            vec![(vec![1], vec![1]), (vec![2], vec![2]), (vec![3], vec![3])]
        );
        assert!(matches!(
            check_local_surjectivity(&q(), 1, 5, 10),
            Err(Error::PreconditionFailed(_))
        ));
        let k = EtaleAlgebra::quadratic(13).unwrap();
        let r = check_local_surjectivity(&k, 2, 3, 10).unwrap();
        // each 𝔭² above 3 holds 9 of the 81 classes; they share only (9)
        assert_eq!(r.classes, 81);
        assert_eq!(r.local_classes, 81 - 9 - 9 + 1);
    }

    #[test]
    fn shells() {
        let mut s = Scanner::new(2);
        assert_eq!(s.shell(0), &[vec![0, 0]]);
        assert_eq!(s.shell(1).len(), 8);
        assert_eq!(s.shell(1)[0], vec![0, 1]);
        assert_eq!(s.shell(2).len(), 16);
    }
}
