use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::algebra::{mul_component, AlgebraicInt, EtaleAlgebra};
use super::field::FieldSpec;
use crate::scalar::Scalar;

/// Fundamental unit of a real quadratic order of integers, as (a, b) with
/// ε = a + bω > 1, from the continued fraction of ω.
pub fn fundamental_unit(f: FieldSpec) -> Option<(BigInt, BigInt)> {
    let FieldSpec::Quadratic(d) = f else {
        return None;
    };
    if d < 0 {
        return None;
    }
    let (t, _) = f.omega_relation();
    let dd = BigInt::from(d);
    let sq = dd.sqrt();
    let (p0, q0) = if t == 1 {
        (BigInt::one(), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    let (mut pp, mut qq) = (p0, q0.clone());
    // convergents
    let (mut h2, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k2, mut k1) = (BigInt::one(), BigInt::zero());
    loop {
        let a = if qq.is_positive() {
            (&pp + &sq).div_floor(&qq)
        } else {
            {
                let nq: BigInt = -&qq;
                -((&pp + &sq).div_floor(&nq) + BigInt::one())
            }
        };
        let h = &a * &h1 + &h2;
        let k = &a * &k1 + &k2;
        (h2, h1) = (h1, h.clone());
        (k2, k1) = (k1, k.clone());
        let pn = &a * &qq - &pp;
        let qn = (&dd - &pn * &pn) / &qq;
        pp = pn;
        qq = qn;
        if qq == q0 {
            // ε = h − k·ω̄ with ω̄ = t − ω
            return Some((h - BigInt::from(t) * &k, k));
        }
    }
}

/// Units with height ≤ H plus the fundamental unit per real quadratic component.
#[derive(Debug, Clone, Serialize)]
pub struct UnitList<T> {
    #[serde(skip)]
    pub units: Vec<AlgebraicInt<T>>,
    pub fundamental: Vec<Option<Vec<String>>>,
}

fn height_big(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

/// Units of one component with height ≤ h, in the fixed order
/// ±ε^0, ±ε^-1, ±ε^1, ±ε^-2, ... (plus sign first).
fn component_units(f: FieldSpec, h: &BigInt) -> Vec<Vec<BigInt>> {
    let one = BigInt::one();
    let mut out = Vec::new();
    let push_pm = |v: Vec<BigInt>, out: &mut Vec<Vec<BigInt>>| {
        if height_big(&v) <= *h {
            let neg = v.iter().map(|x| -x).collect();
            out.push(v);
            out.push(neg);
        }
    };
    match f {
        FieldSpec::Rational => push_pm(vec![one], &mut out),
        FieldSpec::Quadratic(d) if d < 0 => {
            push_pm(vec![one.clone(), BigInt::zero()], &mut out);
            if d == -1 {
                push_pm(vec![BigInt::zero(), one], &mut out);
            } else if d == -3 {
                // ω and ω² = ω − 1
                push_pm(vec![BigInt::zero(), one.clone()], &mut out);
                push_pm(vec![-one.clone(), one], &mut out);
            }
        }
        FieldSpec::Quadratic(_) => {
            let (a, b) = fundamental_unit(f).unwrap();
            let eps = vec![a.clone(), b.clone()];
            let (t, _) = f.omega_relation();
            // ε^-1 = ±conj(ε), the sign being Nm(ε)
            let nm = &a * &a + &a * &b * BigInt::from(t) - f.omega_relation().1 * &b * &b;
            let conj = [&a + &b * BigInt::from(t), -b.clone()];
            let inv: Vec<BigInt> = conj.iter().map(|x| x * &nm).collect();
            push_pm(vec![one.clone(), BigInt::zero()], &mut out);
            let (mut pos, mut neg) = (eps.clone(), inv.clone());
            let (mut pos_live, mut neg_live) = (true, true);
            while pos_live || neg_live {
                if neg_live {
                    if height_big(&neg) <= *h {
                        push_pm(neg.clone(), &mut out);
                        neg = mul_component(f, &neg, &inv);
                    } else {
                        neg_live = false;
                    }
                }
                if pos_live {
                    if height_big(&pos) <= *h {
                        push_pm(pos.clone(), &mut out);
                        pos = mul_component(f, &pos, &eps);
                    } else {
                        pos_live = false;
                    }
                }
            }
        }
    }
    out
}

/// All units of height at most H (max absolute coordinate).
pub fn units_up_to<T: Scalar>(alg: &EtaleAlgebra, h: u64) -> UnitList<T> {
    let hb = BigInt::from(h);
    let per: Vec<Vec<Vec<BigInt>>> = alg
        .components()
        .iter()
        .map(|f| component_units(*f, &hb))
        .collect();
    let mut acc: Vec<Vec<BigInt>> = vec![vec![]];
    for list in &per {
        let mut next = Vec::new();
        for prefix in &acc {
            for u in list {
                let mut v = prefix.clone();
                v.extend(u.iter().cloned());
                next.push(v);
            }
        }
        acc = next;
    }
    let units = acc
        .into_iter()
        .filter_map(|v| {
            v.iter()
                .map(T::from_bigint)
                .collect::<Option<Vec<T>>>()
                .map(AlgebraicInt::new)
        })
        .collect();
    let fundamental = alg
        .components()
        .iter()
        .map(|f| fundamental_unit(*f).map(|(a, b)| vec![a.to_string(), b.to_string()]))
        .collect();
    UnitList { units, fundamental }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Smallest unit > 1 by brute force over a + bω.
    fn pell_oracle(d: i64) -> (i64, i64) {
        let f = FieldSpec::quadratic(d).unwrap();
        let (t, n) = f.omega_relation();
        let sd = (d as f64).sqrt();
        let w = if t == 1 { (1.0 + sd) / 2.0 } else { sd };
        let mut best: Option<(f64, i64, i64)> = None;
        for b in 1..1_000_000i64 {
            // a ranges near ±bω so that |Nm| = 1
            let center = -(b as f64) * w;
            for a in (center.floor() as i64 - 3)..=(center.ceil() as i64 + 3) {
                for a in [a, -a - b * t] {
                    let nm = a * a + a * b * t - n * b * b;
                    if nm.abs() == 1 {
                        let v = a as f64 + b as f64 * w;
                        if v > 1.0 && best.is_none_or(|(bv, _, _)| v < bv - 1e-9) {
                            best = Some((v, a, b));
                        }
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        let (_, a, b) = best.unwrap();
        (a, b)
    }

    #[test]
    fn fundamental_matches_pell() {
        for d in 2..120i64 {
            if !crate::arith::is_squarefree(d) {
                continue;
            }
            let f = FieldSpec::quadratic(d).unwrap();
            let (a, b) = fundamental_unit(f).unwrap();
            let (oa, ob) = pell_oracle(d);
            assert_eq!((a, b), (BigInt::from(oa), BigInt::from(ob)), "d = {d}");
        }
    }

    #[test]
    fn small_unit_lists() {
        let q = EtaleAlgebra::rational();
        let u = units_up_to::<i64>(&q, 5);
        assert_eq!(u.units.len(), 2);
        let k2 = EtaleAlgebra::quadratic(2).unwrap();
        let u = units_up_to::<i64>(&k2, 2);
        assert!(u.units.contains(&AlgebraicInt::from_i64s(&[1, 1])));
        assert_eq!(u.units[2].coords, vec![-1, 1]);
        let k13 = EtaleAlgebra::quadratic(13).unwrap();
        let u = units_up_to::<i64>(&k13, 4);
        assert_eq!(
            u.fundamental[0],
            Some(vec!["1".to_string(), "1".to_string()])
        );
        let gi = EtaleAlgebra::quadratic(-1).unwrap();
        assert_eq!(units_up_to::<i64>(&gi, 3).units.len(), 4);
        let e3 = EtaleAlgebra::quadratic(-3).unwrap();
        assert_eq!(units_up_to::<i64>(&e3, 3).units.len(), 6);
    }
}
