//! Dedekind zeta values, the entropy product formula and empirical
//! entropy from exact admissible counts.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{exp_upper, fixed_ceil, log2_enclosure, Enclosure, RationalInterval};
use crate::rings::{primes_up_to_norm, EtaleAlgebra};
use crate::scalar::Scalar;
use crate::shiftspace::count_admissible;
use crate::sieve::{density_enclosure, SieveSpec};

fn zeta_enclosure(alg: &EtaleAlgebra, s: u32, cutoff: u64) -> Result<Enclosure> {
    if s < 2 {
        return Err(Error::PreconditionFailed("zeta needs s ≥ 2".into()));
    }
    let mut enc = Enclosure::one();
    for q in primes_up_to_norm(alg, cutoff) {
        let m = BigInt::from(q.norm()).pow(s);
        enc.mul_ratio(&m, &(&m - 1));
    }
    // log of the tail ≤ Σ_{Nm 𝔭 > P} x/(1−x) with x = Nm^-s ≤ 2^-s,
    // and at most n primes share a norm
    let p = BigInt::from(cutoff.max(1));
    let two_s = BigInt::from(1) << s;
    let num = BigInt::from(alg.degree()) * &two_s;
    let den = (&two_s - 1) * BigInt::from(s - 1) * p.pow(s - 1);
    let y = fixed_ceil(&num, &den);
    let grow = Enclosure::from_bounds(Enclosure::one().lo().clone(), exp_upper(&y));
    Ok(enc.mul(&grow))
}

/// Enclosure of ζ_K(s) from the Euler product over Nm 𝔭 ≤ P.
pub fn zeta_k(alg: &EtaleAlgebra, s: u32, cutoff: u64) -> Result<RationalInterval> {
    Ok(zeta_enclosure(alg, s, cutoff)?.to_interval())
}

/// log 2 · ∏_𝔭 (1 − meas R_𝔭).
pub fn entropy_product<T: Scalar>(sieve: &SieveSpec<T>, cutoff: u64) -> Result<RationalInterval> {
    if let Some(q) = sieve.flags.large_at {
        return Err(Error::LargeSieve(q.to_string()));
    }
    Ok(log2_enclosure()
        .mul(&density_enclosure(sieve, cutoff)?)
        .to_interval())
}

/// log 2 / ζ_K(k), the entropy of the k-free shift by a second route.
pub fn log2_over_zeta(alg: &EtaleAlgebra, k: u32, cutoff: u64) -> Result<RationalInterval> {
    Ok(log2_enclosure()
        .div(&zeta_enclosure(alg, k, cutoff)?)
        .to_interval())
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalEntropy {
    pub n: u64,
    pub volume: u64,
    pub count: u128,
    pub value: f64,
}

/// log(#admissible subsets of [0, N)^n) / N^n.
pub fn empirical_entropy<T: Scalar>(sieve: &SieveSpec<T>, n: u64) -> Result<EmpiricalEntropy> {
    let count = count_admissible(sieve, n)?;
    let volume = n.pow(sieve.algebra.degree() as u32);
    if volume == 0 {
        return Err(Error::InvalidArgument("empty box".into()));
    }
    Ok(EmpiricalEntropy {
        n,
        volume,
        count,
        value: (count as f64).ln() / volume as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{build_sieve, kfree_sieve, TailRule};
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn zeta_values() {
        let q = EtaleAlgebra::rational();
        let z = zeta_k(&q, 2, 100_000).unwrap();
        assert!(z.contains_f64(PI * PI / 6.0));
        assert!(z.width() < 1e-4);
        // ζ(2)·L(2, χ₋₄) with Catalan's constant
        let g = EtaleAlgebra::quadratic(-1).unwrap();
        let z = zeta_k(&g, 2, 10_000).unwrap();
        assert!(z.contains_f64(PI * PI / 6.0 * 0.915_965_594_177_219));
        let pure = zeta_k(&g, 2, 1).unwrap();
        assert!(pure.lo_f64() == 1.0 && pure.hi_f64() > 1.5);
        let mut last = f64::INFINITY;
        for p in [10, 100, 1000, 10_000] {
            let w = zeta_k(&q, 2, p).unwrap().width();
            assert!(w < last);
            last = w;
        }
    }

    #[test]
    fn entropy_values() {
        let q = EtaleAlgebra::rational();
        let s = kfree_sieve::<i64>(&q, 2).unwrap();
        let e = entropy_product(&s, 10_000).unwrap();
        assert!(e.contains_f64(LN_2 * 6.0 / (PI * PI)));
        let empty = build_sieve::<i64>(q.clone(), TailRule::Empty, vec![]).unwrap();
        let e = entropy_product(&empty, 10).unwrap();
        assert!(e.lo_f64() <= LN_2 && LN_2 <= e.hi_f64() && e.width() < 1e-60);
        let k13 = EtaleAlgebra::quadratic(13).unwrap();
        let s13 = kfree_sieve::<i64>(&k13, 2).unwrap();
        assert!(entropy_product(&s13, 5000)
            .unwrap()
            .overlaps(&log2_over_zeta(&k13, 2, 5000).unwrap()));
    }

    #[test]
    fn empirical() {
        let q = EtaleAlgebra::rational();
        let s = kfree_sieve::<i64>(&q, 2).unwrap();
        let e8 = empirical_entropy(&s, 8).unwrap();
        assert_eq!(e8.count, 175);
        assert!((e8.value - 175f64.ln() / 8.0).abs() < 1e-15);
        let e16 = empirical_entropy(&s, 16).unwrap();
        assert!(e16.value < e8.value);
        let empty = build_sieve::<i64>(q, TailRule::Empty, vec![]).unwrap();
        assert!((empirical_entropy(&empty, 4).unwrap().value - LN_2).abs() < 1e-15);
    }
}
