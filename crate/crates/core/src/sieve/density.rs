//! Density of V(K,R) and the tail count N′(X, M).

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use super::{SieveSpec, TailRule};
use crate::arith;
use crate::error::{Error, Result};
use crate::interval::{fixed_ceil, Enclosure, RationalInterval};
use crate::rings::algebra::norm_component;
use crate::rings::{primes_up_to_norm, split_prime, EtaleAlgebra, PrimeIdeal, Splitting};
use crate::scalar::Scalar;

/// Enclosure of ∏_𝔭 (1 − meas R_𝔭).
pub(crate) fn density_enclosure<T: Scalar>(s: &SieveSpec<T>, cutoff: u64) -> Result<Enclosure> {
    let k = s.boundable_exponent()?;
    let mut enc = Enclosure::one();
    let mut factor = |n: u128, m: u128| {
        let (n, m) = (BigInt::from(n), BigInt::from(m));
        enc.mul_ratio(&(&m - &n), &m);
    };
    for ls in s.exceptions.values() {
        let norm = ls
            .modulus
            .norm_u128()
            .ok_or_else(|| Error::Overflow("modulus norm".into()))?;
        factor(ls.len() as u128, norm);
    }
    let Some(k) = k else {
        return Ok(enc);
    };
    for q in primes_up_to_norm(&s.algebra, cutoff) {
        if s.is_exception(&q) {
            continue;
        }
        let ls = s.tail_local_set(&q)?;
        factor(ls.len() as u128, q.norm_pow(k));
    }
    // Σ_{Nm 𝔭 > P} meas ≤ c·n·Σ_{m>P} m^-k ≤ c·n·P^(1−k)/(k−1)
    let c = match &s.tail {
        TailRule::Translates { offsets, .. } => offsets.len(),
        _ => 1,
    };
    let p = BigInt::from(cutoff.max(1));
    let num = BigInt::from(c * s.algebra.degree());
    let den = num_traits::pow(p, (k - 1) as usize) * BigInt::from(k - 1);
    let sigma = fixed_ceil(&num, &den);
    let one = BigInt::one() << crate::interval::PREC;
    let mut tail = Enclosure::from_bounds(&one - &sigma, one);
    tail.clamp_lo_nonneg();
    Ok(enc.mul(&tail))
}

/// Interval containing the density ∏_𝔭 (1 − meas R_𝔭) of V(K,R) in O_K.
pub fn density_interval<T: Scalar>(s: &SieveSpec<T>, cutoff: u64) -> Result<RationalInterval> {
    Ok(density_enclosure(s, cutoff)?.to_interval())
}

/// v_𝔭(z) for a nonzero component element z.
pub fn valuation<T: Scalar>(q: &PrimeIdeal, z: &[T]) -> u32 {
    let p = T::from_u64_checked(q.p).expect("prime fits the scalar type");
    let vp = |mut v: T| {
        let mut e = 0;
        while !v.is_zero() && (v.clone() % p.clone()).is_zero() {
            v = v / p.clone();
            e += 1;
        }
        e
    };
    match q.splitting {
        Splitting::Rational => vp(z[0].clone()),
        Splitting::Inert => vp(z[0].gcd(&z[1])),
        Splitting::Ramified { .. } => vp(norm_component(q.field, z)),
        Splitting::Split { root } => {
            let g = vp(z[0].gcd(&z[1]));
            let pg = num_traits::pow(p.clone(), g as usize);
            let z2 = [z[0].clone() / pg.clone(), z[1].clone() / pg];
            let r = T::from_u64_checked(root).expect("root fits");
            let at_root = z2[0].clone() + z2[1].clone() * r;
            if (at_root % p.clone()).is_zero() {
                g + vp(norm_component(q.field, &z2))
            } else {
                g
            }
        }
    }
}

/// Nm of the largest ideal 𝔞 with 𝔞^k | z in one component, z ≠ 0.
fn kth_root_norm(field: &EtaleAlgebra, z: &[i64], k: u32) -> u128 {
    let nm = norm_component(field.component(0), z).unsigned_abs() as u128;
    let mut out: u128 = 1;
    for (p, _) in arith::heavy_primes(nm, k, None) {
        for q in split_prime(field, p).expect("prime") {
            let v = valuation(&q, z);
            out = out.saturating_mul((q.norm() as u128).saturating_pow(v / k));
        }
    }
    out
}

/// N′(X, M): nonzero x with max|coord| ≤ X lying in 𝔞^k for an ideal 𝔞
/// with Nm 𝔞 > M. A zero component lies in every power of every prime of
/// that component, so such x always count.
pub fn tail_count(alg: &EtaleAlgebra, k: u32, x_bound: u64, m: u64) -> Result<u64> {
    if k < 2 {
        return Err(Error::PreconditionFailed("tail count needs k ≥ 2".into()));
    }
    let x = i64::try_from(x_bound).map_err(|_| Error::Overflow(x_bound.to_string()))?;
    let n = alg.degree();
    let width = (2 * x + 1) as u128;
    let total = width
        .checked_pow(n as u32)
        .filter(|&t| t <= 1 << 34)
        .ok_or_else(|| Error::BudgetExceeded("tail count box too large".into()))?;
    let comps: Vec<(EtaleAlgebra, std::ops::Range<usize>)> = (0..alg.num_components())
        .map(|c| {
            (
                EtaleAlgebra::new(vec![alg.component(c)]).expect("valid field"),
                alg.range(c),
            )
        })
        .collect();
    let stride = total / width;
    let count = (-x..=x)
        .into_par_iter()
        .map(|first| {
            let mut pt = vec![0i64; n];
            pt[0] = first;
            let mut c = 0u64;
            for rest in 0..stride {
                let mut r = rest;
                for i in (1..n).rev() {
                    pt[i] = (r % width) as i64 - x;
                    r /= width;
                }
                if pt.iter().all(|v| *v == 0) {
                    continue;
                }
                let mut nm: u128 = 1;
                for (f, range) in &comps {
                    let z = &pt[range.clone()];
                    if z.iter().all(|v| *v == 0) {
                        nm = u128::MAX;
                        break;
                    }
                    nm = nm.saturating_mul(kth_root_norm(f, z, k));
                }
                if nm > m as u128 {
                    c += 1;
                }
            }
            c
        })
        .sum();
    Ok(count)
}
