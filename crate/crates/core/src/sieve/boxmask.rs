//! Bitmap of excluded points in a coordinate box.

use super::SieveSpec;
use crate::arith;
use crate::error::{Error, Result};
use crate::rings::{ideal_power, split_prime, FieldSpec, Modulus, PrimeIdeal};
use crate::scalar::Scalar;

/// Excluded points of the box ∏ [lo_i, hi_i]; index is lexicographic with
/// the first coordinate most significant.
#[derive(Debug, Clone)]
pub struct BoxMask {
    lo: Vec<i64>,
    hi: Vec<i64>,
    strides: Vec<usize>,
    bits: Vec<u64>,
    len: usize,
}

fn box_len(lo: &[i64], hi: &[i64]) -> Result<(usize, Vec<usize>)> {
    let mut strides = vec![0usize; lo.len()];
    let mut len: usize = 1;
    for i in (0..lo.len()).rev() {
        strides[i] = len;
        let w = (hi[i] - lo[i] + 1).max(0) as usize;
        len = len
            .checked_mul(w)
            .filter(|&l| l <= 1 << 36)
            .ok_or_else(|| Error::BudgetExceeded("coordinate box too large".into()))?;
    }
    Ok((len, strides))
}

impl BoxMask {
    pub fn new(lo: &[i64], hi: &[i64]) -> Result<Self> {
        let (len, strides) = box_len(lo, hi)?;
        Ok(BoxMask {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            strides,
            bits: vec![0; len.div_ceil(64)],
            len,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn index(&self, x: &[i64]) -> Option<usize> {
        let mut idx = 0;
        for i in 0..x.len() {
            if x[i] < self.lo[i] || x[i] > self.hi[i] {
                return None;
            }
            idx += (x[i] - self.lo[i]) as usize * self.strides[i];
        }
        Some(idx)
    }

    pub fn point(&self, mut idx: usize) -> Vec<i64> {
        let mut out = vec![0; self.lo.len()];
        for i in 0..self.lo.len() {
            out[i] = self.lo[i] + (idx / self.strides[i]) as i64;
            idx %= self.strides[i];
        }
        out
    }

    #[inline]
    pub fn mark(&mut self, idx: usize) {
        self.bits[idx >> 6] |= 1 << (idx & 63);
    }

    #[inline]
    pub fn is_excluded_index(&self, idx: usize) -> bool {
        self.bits[idx >> 6] >> (idx & 63) & 1 == 1
    }

    pub fn is_free(&self, x: &[i64]) -> Option<bool> {
        self.index(x).map(|i| !self.is_excluded_index(i))
    }

    pub fn excluded_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn free_count(&self) -> usize {
        self.len - self.excluded_count()
    }

    pub fn free_points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len)
            .filter(|&i| !self.is_excluded_index(i))
            .map(|i| self.point(i))
    }

    /// Mark every point whose coordinates in `dims` lie in the class
    /// `class` + L, with L given by a lower-triangular HNF (1×1 or 2×2).
    pub fn mark_class(&mut self, dims: std::ops::Range<usize>, hnf: &[Vec<i64>], class: &[i64]) {
        let d0 = dims.start;
        let n = self.lo.len();
        // enumerate the component sub-box hits, then spread over other coordinates
        let mut hits: Vec<usize> = Vec::new();
        let first = |lo: i64, r: i64, m: i64| lo + (r - lo).rem_euclid(m);
        if dims.len() == 1 {
            let m = hnf[0][0];
            let mut a = first(self.lo[d0], class[0], m);
            while a <= self.hi[d0] {
                hits.push((a - self.lo[d0]) as usize * self.strides[d0]);
                a += m;
            }
        } else {
            let (h00, h10, h11) = (hnf[0][0], hnf[1][0], hnf[1][1]);
            let mut b = first(self.lo[d0 + 1], class[1], h11);
            while b <= self.hi[d0 + 1] {
                let j = (b - class[1]) / h11;
                let r0 =
                    (class[0] as i128 + j as i128 * h10 as i128).rem_euclid(h00 as i128) as i64;
                let mut a = first(self.lo[d0], r0, h00);
                let bi = (b - self.lo[d0 + 1]) as usize * self.strides[d0 + 1];
                while a <= self.hi[d0] {
                    hits.push((a - self.lo[d0]) as usize * self.strides[d0] + bi);
                    a += h00;
                }
                b += h11;
            }
        }
        if hits.is_empty() {
            return;
        }
        // offsets over the coordinates outside `dims`
        let mut others = vec![0usize];
        for i in 0..n {
            if dims.contains(&i) {
                continue;
            }
            let w = (self.hi[i] - self.lo[i] + 1) as usize;
            let mut next = Vec::with_capacity(others.len() * w);
            for o in &others {
                for v in 0..w {
                    next.push(o + v * self.strides[i]);
                }
            }
            others = next;
        }
        for h in &hits {
            for o in &others {
                self.mark(h + o);
            }
        }
    }
}

fn modulus_i64(q: &PrimeIdeal, k: u32) -> Result<Modulus<i64>> {
    ideal_power::<i64>(q, k)
}

fn to_i64<T: Scalar>(v: &[T]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::Overflow(x.to_string())))
        .collect()
}

/// Upper bound for |Nm(z)| over z in a coordinate box of one component.
fn norm_bound(f: FieldSpec, a: i64, b: i64) -> u128 {
    let (a, b) = (a.unsigned_abs() as u128, b.unsigned_abs() as u128);
    match f {
        FieldSpec::Rational => a,
        FieldSpec::Quadratic(_) => {
            let (t, n) = f.omega_relation();
            a * a + t.unsigned_abs() as u128 * a * b + n.unsigned_abs() as u128 * b * b
        }
    }
}

/// Exclusion bitmap of the sieve over a coordinate box.
pub fn sieve_box<T: Scalar>(s: &SieveSpec<T>, lo: &[i64], hi: &[i64]) -> Result<BoxMask> {
    let alg = &s.algebra;
    if lo.len() != alg.degree() || hi.len() != alg.degree() {
        return Err(Error::ComponentMismatch(
            "box dimension differs from the degree".into(),
        ));
    }
    let mut mask = BoxMask::new(lo, hi)?;
    if mask.is_empty() {
        return Ok(mask);
    }
    for (q, ls) in &s.exceptions {
        let m = modulus_i64(q, ls.exponent())?;
        let hnf = m.lattice.rows().to_vec();
        for c in &ls.classes {
            mask.mark_class(alg.range(q.component), &hnf, &to_i64(c)?);
        }
    }
    let Some(k) = s.tail.exponent() else {
        return Ok(mask);
    };
    let offsets = s.tail.offsets(alg);
    for c in 0..alg.num_components() {
        let f = alg.component(c);
        let r = alg.range(c);
        for t in &offsets {
            let tc = to_i64(alg.component_coords(t, c))?;
            // z = x − t ranges over a shifted box
            let far: Vec<i64> = r
                .clone()
                .enumerate()
                .map(|(j, i)| (lo[i] - tc[j]).abs().max((hi[i] - tc[j]).abs()))
                .collect();
            let nmax = norm_bound(f, far[0], far.get(1).copied().unwrap_or(0));
            // z = 0 lies in every ideal
            if r.clone()
                .enumerate()
                .all(|(j, i)| lo[i] <= tc[j] && tc[j] <= hi[i])
            {
                mark_exact(&mut mask, r.clone(), &tc);
            }
            let pmax = arith::iroot(nmax, k);
            for p in arith::primes() {
                if p as u128 > pmax {
                    break;
                }
                for q in split_prime(alg, p)? {
                    if q.component != c || s.is_exception(&q) || q.norm_pow(k) > nmax {
                        continue;
                    }
                    let m = modulus_i64(&q, k)?;
                    let class = m.lattice.reduce(&tc);
                    mask.mark_class(r.clone(), m.lattice.rows(), &class);
                }
            }
        }
    }
    Ok(mask)
}

/// Mark the points whose coordinates in `dims` equal `v` exactly.
fn mark_exact(mask: &mut BoxMask, dims: std::ops::Range<usize>, v: &[i64]) {
    let d = dims.len();
    let hnf: Vec<Vec<i64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        mask.hi[dims.start + i] - mask.lo[dims.start + i] + 1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    mask.mark_class(dims, &hnf, v);
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::rings::EtaleAlgebra;

    #[test]
    fn squarefree_box_matches_trial_division() {
        let s = kfree_sieve::<i64>(&EtaleAlgebra::rational(), 2).unwrap();
        let m = sieve_box(&s, &[-500], &[500]).unwrap();
        for x in -500i64..=500 {
            let sf = x != 0 && (2..=22i64).all(|d| x % (d * d) != 0);
            assert_eq!(m.is_free(&[x]), Some(sf), "{x}");
        }
    }

    #[test]
    fn quadratic_box_matches_membership() {
        for d in [2i64, -1, 13, -3, 5] {
            let k = EtaleAlgebra::quadratic(d).unwrap();
            for e in [1u32, 2] {
                let s = kfree_sieve::<i64>(&k, e).unwrap();
                let m = sieve_box(&s, &[-12, -9], &[12, 9]).unwrap();
                for a in -12..=12 {
                    for b in -9..=9 {
                        let v = s.membership(&AlgebraicInt::from_i64s(&[a, b])).unwrap();
                        assert_eq!(m.is_free(&[a, b]), Some(v.member), "d={d} k={e} {a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn product_box() {
        let alg = EtaleAlgebra::parse("Q x Q(sqrt 2)").unwrap();
        let s = kfree_sieve::<i64>(&alg, 2).unwrap();
        let m = sieve_box(&s, &[-6, -4, -4], &[6, 4, 4]).unwrap();
        for i in 0..m.len() {
            let p = m.point(i);
            let v = s.membership(&AlgebraicInt::from_i64s(&p)).unwrap();
            assert_eq!(!m.is_excluded_index(i), v.member, "{p:?}");
        }
    }
}
