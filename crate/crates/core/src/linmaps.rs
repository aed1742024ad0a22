//! ℤ-linear maps between rings of integers: local sieve conditions,
//! monomial decompositions, preservers over finite fields, units.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::rings::lattice::{echelon, solve_triangular};
use crate::rings::{
    algebra_homs, split_prime, units_up_to, AlgebraHom, AlgebraicInt, EtaleAlgebra, Lattice,
    PrimeIdeal,
};
use crate::scalar::Scalar;
use crate::sieve::{LocalSet, SieveSpec};

/// Integer matrix acting on coordinate vectors: row i gives target coordinate i.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ZLinearMap {
    pub source: EtaleAlgebra,
    pub target: EtaleAlgebra,
    pub matrix: Vec<Vec<i64>>,
}

impl ZLinearMap {
    pub fn new(source: EtaleAlgebra, target: EtaleAlgebra, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let (m, n) = (target.degree(), source.degree());
        if matrix.len() != m || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "matrix must be {m}×{n} for a map {source} → {target}"
            )));
        }
        Ok(ZLinearMap {
            source,
            target,
            matrix,
        })
    }

    /// Row-major entries.
    pub fn from_row_major(
        source: EtaleAlgebra,
        target: EtaleAlgebra,
        entries: &[i64],
    ) -> Result<Self> {
        let n = source.degree();
        if entries.len() != n * target.degree() {
            return Err(Error::InvalidArgument(format!(
                "{} entries for a {}×{} matrix",
                entries.len(),
                target.degree(),
                n
            )));
        }
        let rows = entries.chunks(n).map(|c| c.to_vec()).collect();
        Self::new(source, target, rows)
    }

    pub fn identity(k: &EtaleAlgebra) -> Self {
        let n = k.degree();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        ZLinearMap {
            source: k.clone(),
            target: k.clone(),
            matrix: rows,
        }
    }

    /// Matrix whose columns are the images of the basis elements.
    pub fn from_columns(
        source: EtaleAlgebra,
        target: EtaleAlgebra,
        cols: &[AlgebraicInt<i64>],
    ) -> Self {
        let m = target.degree();
        let matrix = (0..m)
            .map(|i| cols.iter().map(|c| c.coords[i]).collect())
            .collect();
        ZLinearMap {
            source,
            target,
            matrix,
        }
    }

    /// x ↦ ε·τ(x).
    pub fn monomial(tau: &AlgebraHom, eps: &AlgebraicInt<i64>) -> Self {
        let cols: Vec<AlgebraicInt<i64>> = (0..tau.source.degree())
            .map(|i| {
                tau.target
                    .mul(eps, &tau.apply(&tau.source.basis_element::<i64>(i)))
            })
            .collect();
        Self::from_columns(tau.source.clone(), tau.target.clone(), &cols)
    }

    /// Multiplication by ε on K.
    pub fn multiplication(k: &EtaleAlgebra, eps: &AlgebraicInt<i64>) -> Self {
        Self::monomial(&AlgebraHom::identity(k), eps)
    }

    pub fn apply<T: Scalar>(&self, x: &AlgebraicInt<T>) -> AlgebraicInt<T> {
        AlgebraicInt::new(
            self.matrix
                .iter()
                .map(|row| {
                    row.iter().zip(&x.coords).fold(T::zero(), |acc, (a, b)| {
                        acc + T::from_i64_exact(*a) * b.clone()
                    })
                })
                .collect(),
        )
    }

    pub fn is_square(&self) -> bool {
        self.source.degree() == self.target.degree()
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> Option<BigInt> {
        self.is_square().then(|| det_big(&self.matrix))
    }
}

/// Fraction-free elimination.
fn det_big(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

/// The reduction of A modulo p^k.
#[derive(Debug, Clone, Serialize)]
pub struct InducedMap {
    pub modulus: u64,
    pub matrix: Vec<Vec<u64>>,
    pub bijective: bool,
    /// Full table, only when the source has at most 4096 classes.
    pub table: Option<Vec<(Vec<u64>, Vec<u64>)>>,
}

pub fn induced_mod(a: &ZLinearMap, p: u64, k: u32) -> Result<InducedMap> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let q = p
        .checked_pow(k)
        .filter(|q| *q < 1 << 31)
        .ok_or_else(|| Error::Overflow(format!("{p}^{k}")))?;
    let matrix: Vec<Vec<u64>> = a
        .matrix
        .iter()
        .map(|r| r.iter().map(|&x| arith::rem_i64(x, q)).collect())
        .collect();
    let bijective = match a.det() {
        Some(d) => !(d % BigInt::from(p)).is_zero(),
        None => false,
    };
    let n = a.source.degree();
    let size = (q as u128).pow(n as u32);
    let table = (size <= 4096).then(|| {
        let mut out = Vec::new();
        let mut x = vec![0u64; n];
        loop {
            let y: Vec<u64> = matrix
                .iter()
                .map(|r| r.iter().zip(&x).map(|(m, v)| m * v % q).sum::<u64>() % q)
                .collect();
            out.push((x.clone(), y));
            // odometer, last coordinate fastest
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                x[i] += 1;
                if x[i] < q {
                    break;
                }
                x[i] = 0;
            }
        }
    });
    Ok(InducedMap {
        modulus: q,
        matrix,
        bijective,
        table,
    })
}

/// Outcome of the local condition A(V_p(K,R)) ⊆ V_p(L,S).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalCheck {
    pub p: u64,
    pub holds: bool,
    /// x ∈ V_p(K,R) (mod p^e) with A(x) ∉ V_p(L,S).
    pub violation: Option<Vec<String>>,
    /// The prime of L where A(x) lands in S.
    pub violated_at: Option<PrimeIdeal>,
    pub candidates: u64,
}

/// All points of a lattice g ⊇ m·ℤ^n inside [0, m)^n.
fn lattice_points_mod<T: Scalar>(g: &Lattice<T>, m: &T) -> Vec<Vec<T>> {
    let n = g.dim();
    let rows = g.rows();
    let mut out = Vec::new();
    fn rec<T: Scalar>(j: usize, cur: Vec<T>, rows: &[Vec<T>], m: &T, out: &mut Vec<Vec<T>>) {
        let d = &rows[j][j];
        // smallest c with cur_j + c·d ≥ 0
        let mut c = (-cur[j].clone()).div_ceil(d);
        loop {
            let v = cur[j].clone() + c.clone() * d.clone();
            if &v >= m {
                break;
            }
            let next: Vec<T> = cur
                .iter()
                .zip(&rows[j])
                .map(|(a, b)| a.clone() + c.clone() * b.clone())
                .collect();
            if j == 0 {
                out.push(next);
            } else {
                rec(j - 1, next, rows, m, out);
            }
            c = c + T::one();
        }
    }
    if n > 0 {
        rec(n - 1, vec![T::zero(); n], rows, m, &mut out);
    }
    out
}

fn in_local_v<T: Scalar>(
    alg: &EtaleAlgebra,
    locals: &[(PrimeIdeal, LocalSet<T>)],
    x: &AlgebraicInt<T>,
) -> bool {
    locals
        .iter()
        .all(|(q, ls)| !ls.contains(alg.component_coords(x, q.component)))
}

/// Decide A(V_p(K,R)) ⊆ V_p(L,S) by solving, for each prime 𝔮 | p of L and
/// each class s of S_𝔮, for the x with A(x) ≡ s, and testing them against R.
pub fn check_local_condition<T: Scalar>(
    a: &ZLinearMap,
    r: &SieveSpec<T>,
    s: &SieveSpec<T>,
    p: u64,
    budget: u64,
) -> Result<LocalCheck> {
    if r.algebra != a.source || s.algebra != a.target {
        return Err(Error::ComponentMismatch(
            "sieves do not match the map".into(),
        ));
    }
    let kp = split_prime(&a.source, p)?;
    let lp = split_prime(&a.target, p)?;
    let kloc: Vec<(PrimeIdeal, LocalSet<T>)> = kp
        .iter()
        .map(|q| Ok((*q, r.local_set(q)?)))
        .collect::<Result<_>>()?;
    let lloc: Vec<(PrimeIdeal, LocalSet<T>)> = lp
        .iter()
        .map(|q| Ok((*q, s.local_set(q)?)))
        .collect::<Result<_>>()?;
    let e = kloc
        .iter()
        .chain(&lloc)
        .map(|(q, ls)| q.p_exponent_for(ls.exponent()))
        .max()
        .unwrap_or(1);
    let n = a.source.degree();
    let pe = T::from_bigint(&num_traits::pow(BigInt::from(p), e as usize))
        .ok_or_else(|| Error::Overflow(format!("{p}^{e}")))?;
    let mut candidates = 0u64;
    for (q, ls) in &lloc {
        if ls.is_empty() {
            continue;
        }
        let range = a.target.range(q.component);
        let h = ls.modulus.lattice.rows();
        // rows: columns of A restricted to the component, then the ideal basis
        let mut stacked: Vec<Vec<T>> = (0..n)
            .map(|i| {
                range
                    .clone()
                    .map(|t| T::from_i64_exact(a.matrix[t][i]))
                    .collect()
            })
            .collect();
        stacked.extend(h.iter().cloned());
        let ech = echelon(&stacked)?;
        let mut gens: Vec<Vec<T>> = ech.kernel.iter().map(|k| k[..n].to_vec()).collect();
        for i in 0..n {
            gens.push(
                (0..n)
                    .map(|j| if i == j { pe.clone() } else { T::zero() })
                    .collect(),
            );
        }
        let g = Lattice::from_generators(&gens)?;
        let per_class = (pe.to_bigint().pow(n as u32) / g.index().to_bigint())
            .to_u64()
            .unwrap_or(u64::MAX);
        let need = per_class.saturating_mul(ls.len() as u64);
        if candidates.saturating_add(need) > budget {
            return Err(Error::BudgetExceeded(format!(
                "{} candidate classes at p = {p}",
                candidates.saturating_add(need)
            )));
        }
        candidates += need;
        let points = lattice_points_mod(&g, &pe);
        for cls in &ls.classes {
            let Some(y) = solve_triangular(&ech.hnf, cls) else {
                continue;
            };
            let coef: Vec<T> = (0..n)
                .map(|i| {
                    y.iter()
                        .zip(&ech.transform)
                        .fold(T::zero(), |acc, (yy, u)| acc + yy.clone() * u[i].clone())
                })
                .collect();
            let mut best: Option<Vec<T>> = None;
            for v in &points {
                let x: Vec<T> = coef
                    .iter()
                    .zip(v)
                    .map(|(c, w)| (c.clone() + w.clone()).mod_floor(&pe))
                    .collect();
                let xe = AlgebraicInt::new(x);
                if in_local_v(&a.source, &kloc, &xe) && best.as_ref().is_none_or(|b| xe.coords < *b)
                {
                    best = Some(xe.coords);
                }
            }
            if let Some(x) = best {
                return Ok(LocalCheck {
                    p,
                    holds: false,
                    violation: Some(x.iter().map(|v| v.to_string()).collect()),
                    violated_at: Some(*q),
                    candidates,
                });
            }
        }
    }
    Ok(LocalCheck {
        p,
        holds: true,
        violation: None,
        violated_at: None,
        candidates,
    })
}

/// First prime p ≤ cutoff where the local condition fails.
pub fn scan_primes<T: Scalar>(
    a: &ZLinearMap,
    r: &SieveSpec<T>,
    s: &SieveSpec<T>,
    cutoff: u64,
    budget: u64,
) -> Result<Option<LocalCheck>> {
    for p in arith::primes() {
        if p > cutoff {
            break;
        }
        let c = check_local_condition(a, r, s, p, budget)?;
        if !c.holds {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialDecomposition {
    pub tau: AlgebraHom,
    pub epsilon: AlgebraicInt<i64>,
    pub epsilon_is_unit: bool,
}

/// Write A = M_ε ∘ τ with ε = A(1), if possible.
pub fn decompose_monomial(a: &ZLinearMap) -> Option<MonomialDecomposition> {
    let one = a.source.one::<i64>();
    let eps = a.apply(&one);
    let n = a.source.degree();
    algebra_homs(&a.source, &a.target)
        .into_iter()
        .find(|tau| {
            (0..n).all(|i| {
                let b = a.source.basis_element::<i64>(i);
                a.apply(&b) == a.target.mul(&eps, &tau.apply(&b))
            })
        })
        .map(|tau| MonomialDecomposition {
            epsilon_is_unit: a.target.is_unit(&eps),
            tau,
            epsilon: eps,
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Preserver {
    pub matrix: Vec<Vec<u64>>,
    pub monomial: bool,
}

fn rank_mod(rows: &[Vec<u64>], q: u64) -> usize {
    let mut a: Vec<Vec<u64>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..a.len()).find(|&i| !a[i][c].is_multiple_of(q)) else {
            continue;
        };
        a.swap(rank, pr);
        let inv = arith::inv_mod(a[rank][c] as i128, q as i128).unwrap() as u64;
        for j in 0..cols {
            a[rank][j] = a[rank][j] * inv % q;
        }
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] = (a[i][j] + q * q - f * a[rank][j] % q) % q;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// m×n matrices over F_q sending (F^×)^n into (F^×)^m; invertible ones when
/// n = m, full-rank ones otherwise.
pub fn preserver_scan(q: u64, n: usize, m: usize, budget: u64) -> Result<Vec<Preserver>> {
    if !arith::is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("dimensions must be positive".into()));
    }
    let rows_total = (q as u128).pow(n as u32);
    if rows_total > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "{rows_total} candidate rows"
        )));
    }
    let vectors = |len: usize, vals: &[u64]| -> Vec<Vec<u64>> {
        let mut out: Vec<Vec<u64>> = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |v| {
                        let mut p = p.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect();
        }
        out
    };
    let all: Vec<u64> = (0..q).collect();
    let units: Vec<u64> = (1..q).collect();
    let unit_vectors = vectors(n, &units);
    // a row works alone iff it never vanishes on (F^×)^n
    let good: Vec<Vec<u64>> = vectors(n, &all)
        .into_iter()
        .filter(|r| {
            unit_vectors
                .iter()
                .all(|v| r.iter().zip(v).map(|(a, b)| a * b).sum::<u64>() % q != 0)
        })
        .collect();
    let total = (good.len() as u128).pow(m as u32);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded(format!("{total} candidate matrices")));
    }
    let want = n.min(m);
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    'outer: loop {
        let mat: Vec<Vec<u64>> = idx.iter().map(|&i| good[i].clone()).collect();
        if rank_mod(&mat, q) == want {
            let monomial = mat
                .iter()
                .all(|r| r.iter().filter(|&&x| x != 0).count() == 1);
            out.push(Preserver {
                matrix: mat,
                monomial,
            });
        }
        let mut i = m;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < good.len() {
                break;
            }
            idx[i] = 0;
        }
        if good.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// t ∈ ℤ/p^k with a_i + t·x_i ∉ R_i for every i, R_i given as residues mod p^k.
pub fn cover_witness(p: u64, k: u32, x: &[i64], a: &[i64], r_list: &[Vec<i64>]) -> Result<u64> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if x.len() != a.len() || x.len() != r_list.len() {
        return Err(Error::InvalidArgument(
            "x, a and the class lists differ in length".into(),
        ));
    }
    let q = p
        .checked_pow(k)
        .filter(|q| *q <= 1 << 32)
        .ok_or_else(|| Error::Overflow(format!("{p}^{k}")))?;
    let sets: Vec<std::collections::BTreeSet<u64>> = r_list
        .iter()
        .map(|r| r.iter().map(|&c| arith::rem_i64(c, q)).collect())
        .collect();
    let total: u64 = sets.iter().map(|s| s.len() as u64).sum();
    if total >= q {
        return Err(Error::PreconditionFailed(format!(
            "measures sum to {total}/{q}, not below 1"
        )));
    }
    if let Some(xi) = x.iter().find(|&&xi| arith::rem_i64(xi, p) == 0) {
        return Err(Error::PreconditionFailed(format!(
            "coordinate {xi} is not a unit mod {p}"
        )));
    }
    let xs: Vec<u64> = x.iter().map(|&v| arith::rem_i64(v, q)).collect();
    let as_: Vec<u64> = a.iter().map(|&v| arith::rem_i64(v, q)).collect();
    (0..q)
        .find(|&t| {
            (0..xs.len()).all(|i| {
                let v = ((as_[i] as u128 + t as u128 * xs[i] as u128) % q as u128) as u64;
                !sets[i].contains(&v)
            })
        })
        .ok_or_else(|| Error::NoWitness(format!("no t modulo {q}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitCheck {
    pub holds: bool,
    pub units_tested: usize,
    /// (unit, image) for the first unit whose image is not a unit.
    pub witness: Option<(String, String)>,
}

/// Whether A maps every unit of height ≤ H to a unit.
pub fn check_unit_preservation(a: &ZLinearMap, h: u64) -> Result<UnitCheck> {
    if !a.source.is_totally_real() {
        return Err(Error::PreconditionFailed(format!(
            "{} is not totally real",
            a.source
        )));
    }
    let units = units_up_to::<i64>(&a.source, h).units;
    for u in &units {
        let img = a.apply(u);
        if !a.target.is_unit(&img) {
            return Ok(UnitCheck {
                holds: false,
                units_tested: units.len(),
                witness: Some((a.source.format_element(u), a.target.format_element(&img))),
            });
        }
    }
    Ok(UnitCheck {
        holds: true,
        units_tested: units.len(),
        witness: None,
    })
}

/// |det A| = 1.
pub fn is_unimodular(a: &ZLinearMap) -> bool {
    a.det().is_some_and(|d| d.abs().is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::kfree_sieve;

    fn k(d: i64) -> EtaleAlgebra {
        EtaleAlgebra::quadratic(d).unwrap()
    }

    #[test]
    fn induced() {
        let a = ZLinearMap::from_row_major(k(2), k(2), &[1, 1, 0, 1]).unwrap();
        assert!(induced_mod(&a, 7, 1).unwrap().bijective);
        let b = ZLinearMap::from_row_major(k(2), k(2), &[2, 0, 0, 1]).unwrap();
        assert!(!induced_mod(&b, 2, 1).unwrap().bijective);
        let id = ZLinearMap::identity(&EtaleAlgebra::rational());
        let t = induced_mod(&id, 3, 2).unwrap().table.unwrap();
        assert_eq!(t.len(), 9);
        assert!(t.iter().all(|(x, y)| x == y));
    }

    #[test]
    fn inclusion_into_sqrt3_fails_at_3() {
        let q = EtaleAlgebra::rational();
        let a = ZLinearMap::from_row_major(q.clone(), k(3), &[1, 0]).unwrap();
        let r = kfree_sieve::<i64>(&q, 2).unwrap();
        let s = kfree_sieve::<i64>(&k(3), 2).unwrap();
        let c = check_local_condition(&a, &r, &s, 3, 1 << 20).unwrap();
        assert!(!c.holds);
        assert_eq!(c.violation, Some(vec!["3".to_string()]));
        // 2 ramifies as well: 2 = (1+w)²·(2−w), so the scan stops before 3
        let first = scan_primes(&a, &r, &s, 10, 1 << 20).unwrap().unwrap();
        assert_eq!((first.p, first.violation), (2, Some(vec!["2".to_string()])));
        let id = ZLinearMap::identity(&q);
        assert!(scan_primes(&id, &r, &r, 50, 1 << 20).unwrap().is_none());
    }

    /// Residue enumeration oracle for the local condition.
    fn brute(a: &ZLinearMap, r: &SieveSpec<i64>, s: &SieveSpec<i64>, p: u64, e: u32) -> bool {
        let q = p.pow(e) as i64;
        let n = a.source.degree();
        let kp = split_prime(&a.source, p).unwrap();
        let lp = split_prime(&a.target, p).unwrap();
        let inside =
            |sv: &SieveSpec<i64>, ps: &[PrimeIdeal], alg: &EtaleAlgebra, x: &AlgebraicInt<i64>| {
                ps.iter().any(|pr| {
                    sv.local_set(pr)
                        .unwrap()
                        .contains(alg.component_coords(x, pr.component))
                })
            };
        let total = q.pow(n as u32);
        (0..total).all(|mut i| {
            let mut c = vec![0; n];
            for j in (0..n).rev() {
                c[j] = i % q;
                i /= q;
            }
            let x = AlgebraicInt::new(c);
            inside(r, &kp, &a.source, &x) || !inside(s, &lp, &a.target, &a.apply(&x))
        })
    }

    #[test]
    fn local_condition_matches_brute_force() {
        let mats: [[i64; 4]; 5] = [
            [0, 1, 1, 0],
            [1, 1, 0, 1],
            [1, 0, 0, 1],
            [2, 1, 1, 1],
            [1, 2, 0, 1],
        ];
        for d in [-1i64, 2, 13] {
            let r = kfree_sieve::<i64>(&k(d), 2).unwrap();
            for m in &mats {
                let a = ZLinearMap::from_row_major(k(d), k(d), m).unwrap();
                for p in [2u64, 3, 5, 7] {
                    let c = check_local_condition(&a, &r, &r, p, 1 << 24).unwrap();
                    assert_eq!(c.holds, brute(&a, &r, &r, p, 2), "d={d} {m:?} p={p}");
                }
            }
        }
    }

    #[test]
    fn swap_on_gaussian_integers() {
        let a = ZLinearMap::from_row_major(k(-1), k(-1), &[0, 1, 1, 0]).unwrap();
        let r = kfree_sieve::<i64>(&k(-1), 2).unwrap();
        for p in [2, 5] {
            assert!(check_local_condition(&a, &r, &r, p, 1 << 20).unwrap().holds);
        }
        let d = decompose_monomial(&a).unwrap();
        assert_eq!(d.epsilon.coords, vec![0, 1]);
        assert_eq!(d.tau.parts[0].1, crate::rings::Embedding::Conjugation);
        assert!(d.epsilon_is_unit);
    }

    #[test]
    fn decompositions() {
        let id = ZLinearMap::identity(&k(5));
        let d = decompose_monomial(&id).unwrap();
        assert_eq!(d.epsilon, k(5).one());
        let q2 = EtaleAlgebra::parse("Q x Q").unwrap();
        let a = ZLinearMap::from_row_major(q2.clone(), q2, &[1, 0, 1, 1]).unwrap();
        assert!(decompose_monomial(&a).is_none());
        // round trip through every hom and a few ε
        for d in [2i64, -1, 13] {
            let alg = k(d);
            for tau in algebra_homs(&alg, &alg) {
                for e in [[1i64, 1], [2, 0], [0, 3], [-1, 2]] {
                    let eps = AlgebraicInt::from_i64s(&e);
                    let m = ZLinearMap::monomial(&tau, &eps);
                    let got = decompose_monomial(&m).unwrap();
                    assert_eq!((got.tau, got.epsilon), (tau.clone(), eps));
                }
            }
        }
    }

    #[test]
    fn preservers() {
        let p = preserver_scan(3, 2, 2, 10_000_000).unwrap();
        assert_eq!(p.len(), 8);
        assert!(p.iter().all(|m| m.monomial));
        let p = preserver_scan(2, 3, 3, 10_000_000).unwrap();
        assert!(p
            .iter()
            .any(|m| m.matrix == vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]] && !m.monomial));
        assert_eq!(preserver_scan(3, 1, 1, 100).unwrap().len(), 2);
    }

    #[test]
    fn covers() {
        assert_eq!(
            cover_witness(5, 1, &[1, 1], &[0, 0], &[vec![0], vec![0]]).unwrap(),
            1
        );
        // 5-element scan oracle
        let t = cover_witness(5, 1, &[1, 2], &[3, 4], &[vec![0], vec![0, 1]]).unwrap();
        let oracle = (0..5)
            .find(|t| (3 + t) % 5 != 0 && ![0, 1].contains(&((4 + 2 * t) % 5)))
            .unwrap();
        assert_eq!(t, oracle);
        assert!(matches!(
            cover_witness(3, 1, &[1, 1], &[0, 0], &[vec![0, 1], vec![0, 2]]),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn units() {
        let alg = k(2);
        let eps = AlgebraicInt::from_i64s(&[1, 1]);
        let m = ZLinearMap::multiplication(&alg, &eps);
        assert!(check_unit_preservation(&m, 20).unwrap().holds);
        let shear = ZLinearMap::from_row_major(alg.clone(), alg, &[1, 1, 0, 1]).unwrap();
        let c = check_unit_preservation(&shear, 5).unwrap();
        assert!(!c.holds);
        assert_eq!(c.witness, Some(("-1+w".to_string(), "w".to_string())));
        assert!(
            check_unit_preservation(&ZLinearMap::identity(&EtaleAlgebra::rational()), 9)
                .unwrap()
                .holds
        );
    }
}
