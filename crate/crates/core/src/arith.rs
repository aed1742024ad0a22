//! Rational-integer helpers: primes, modular arithmetic, square roots mod p.

use std::sync::OnceLock;

const TABLE_LIMIT: u64 = 1 << 22;

static TABLE: OnceLock<Vec<u64>> = OnceLock::new();

/// All primes up to `n` (sieve of Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n <= TABLE_LIMIT {
        let t = prime_table();
        let end = t.partition_point(|&p| p <= n);
        return t[..end].to_vec();
    }
    eratosthenes(n)
}

fn eratosthenes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Cached primes below 2^22.
pub fn prime_table() -> &'static [u64] {
    TABLE.get_or_init(|| eratosthenes(TABLE_LIMIT))
}

/// Ascending sequence of trial divisors: every prime from the table, then
/// every odd number beyond it. Dividing out factors in order means only
/// primes ever divide the remaining cofactor.
pub fn trial_divisors() -> impl Iterator<Item = u64> {
    let t = prime_table();
    let last = *t.last().unwrap();
    t.iter().copied().chain((last + 2..).step_by(2))
}

/// Primes in increasing order, unbounded.
pub fn primes() -> impl Iterator<Item = u64> {
    let t = prime_table();
    let last = *t.last().unwrap();
    t.iter()
        .copied()
        .chain((last + 2..).step_by(2).filter(|&n| is_prime(n)))
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Reduce a signed integer into [0, m).
pub fn rem_i64(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

/// Legendre symbol (a/p) for an odd prime p: 0, 1 or -1.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = rem_i64(a, p);
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// A square root of `a` modulo an odd prime (Tonelli-Shanks), if one exists.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Inverse of `a` modulo `m` when gcd(a, m) = 1.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m))
}

pub fn is_squarefree(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    let n = d.unsigned_abs();
    let mut m = n;
    for q in trial_divisors() {
        if q * q > m {
            break;
        }
        if m.is_multiple_of(q) {
            m /= q;
            if m.is_multiple_of(q) {
                return false;
            }
        }
    }
    true
}

/// Floor of the real k-th root of n.
pub fn iroot(n: u128, k: u32) -> u128 {
    if n < 2 || k == 1 {
        return n;
    }
    let mut x = (n as f64).powf(1.0 / k as f64) as u128;
    let pow = |b: u128| -> Option<u128> {
        let mut r: u128 = 1;
        for _ in 0..k {
            r = r.checked_mul(b)?;
        }
        Some(r)
    };
    while pow(x).is_none_or(|v| v > n) {
        x -= 1;
    }
    while pow(x + 1).is_some_and(|v| v <= n) {
        x += 1;
    }
    x
}

/// Factor a positive integer by trial division.
pub fn factor_u128(mut n: u128) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for q in trial_divisors() {
        let q128 = q as u128;
        if q128 * q128 > n {
            break;
        }
        if n.is_multiple_of(q128) {
            let mut e = 0;
            while n.is_multiple_of(q128) {
                n /= q128;
                e += 1;
            }
            out.push((q, e));
        }
    }
    if n > 1 {
        out.push((n as u64, 1));
    }
    out
}

/// Primes q below `cap` with q^k | n, paired with v_q(n).
pub fn heavy_primes(mut n: u128, k: u32, cap: Option<u64>) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for q in trial_divisors() {
        if cap.is_some_and(|b| q >= b) {
            break;
        }
        let q128 = q as u128;
        if q128.checked_pow(k).is_none_or(|v| v > n) {
            break;
        }
        if n.is_multiple_of(q128) {
            let mut v = 0;
            while n.is_multiple_of(q128) {
                n /= q128;
                v += 1;
            }
            if v >= k {
                out.push((q, v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heavy() {
        assert_eq!(heavy_primes(72, 2, None), vec![(2, 3), (3, 2)]);
        assert_eq!(heavy_primes(2 * 49 * 121, 2, None), vec![(7, 2), (11, 2)]);
        assert_eq!(heavy_primes(2 * 49 * 121, 2, Some(10)), vec![(7, 2)]);
        assert!(heavy_primes(30, 2, None).is_empty());
    }

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        let brute: Vec<u64> = (0..2000u64)
            .filter(|&n| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        let mr: Vec<u64> = (0..2000u64).filter(|&n| is_prime(n)).collect();
        assert_eq!(brute, mr);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007u64 * 3));
    }

    #[test]
    fn tonelli() {
        for &p in &[3u64, 5, 7, 13, 17, 41, 97, 113, 257, 65537] {
            for a in 0..p.min(300) {
                match sqrt_mod(a, p) {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a),
                    None => assert_eq!(legendre(a as i64, p), -1),
                }
            }
        }
    }

    #[test]
    fn roots_and_factors() {
        assert_eq!(iroot(1_000_000, 2), 1000);
        assert_eq!(iroot(999_999, 2), 999);
        assert_eq!(iroot(27, 3), 3);
        assert_eq!(iroot(26, 3), 2);
        assert_eq!(factor_u128(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert!(is_squarefree(-30));
        assert!(!is_squarefree(12));
        assert_eq!(inv_mod(3, 7), Some(5));
    }
}
