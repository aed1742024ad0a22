//! Small fixed examples per module, run by `--selftest`.

use std::f64::consts::LN_2;

use serde_json::json;

use kfree::entropy::{empirical_entropy, entropy_product, zeta_k};
use kfree::linmaps::{
    check_local_condition, check_unit_preservation, cover_witness, decompose_monomial, induced_mod,
    preserver_scan, scan_primes, ZLinearMap,
};
use kfree::localglobal::{check_local_surjectivity, parse_constraint, solve};
use kfree::rings::{
    algebra_homs, ideal_power, split_prime, units_up_to, EtaleAlgebra, FieldSpec, Modulus,
};
use kfree::shiftspace::{
    apply_block_code, conjugacy_search, count_admissible, derived_local_set, is_admissible,
    symmetry_scan, verify_intertwiner, Conjugacy, VerifyConfig, WindowCode,
};
use kfree::sieve::{build_sieve, density_interval, kfree_sieve, tail_count, LocalSet, TailRule};
use kfree::{Error, Pattern, Sieve};

use crate::report::Report;

type Check = (&'static str, Box<dyn Fn() -> kfree::Result<bool>>);

fn q() -> EtaleAlgebra {
    EtaleAlgebra::rational()
}

fn quad(d: i64) -> EtaleAlgebra {
    EtaleAlgebra::quadratic(d).unwrap()
}

fn sq() -> Sieve {
    kfree_sieve(&q(), 2).unwrap()
}

fn empty() -> Sieve {
    build_sieve(q(), TailRule::Empty, vec![]).unwrap()
}

fn sieve_checks() -> Vec<Check> {
    vec![
        (
            "Q(sqrt 13) has degree 2",
            Box::new(|| Ok(quad(13).degree() == 2)),
        ),
        (
            "Q x Q(sqrt 2) has degree 3",
            Box::new(|| {
                Ok(
                    EtaleAlgebra::new(vec![FieldSpec::Rational, FieldSpec::quadratic(2)?])?
                        .degree()
                        == 3,
                )
            }),
        ),
        (
            "Q(sqrt 12) is rejected",
            Box::new(|| {
                Ok(matches!(
                    EtaleAlgebra::quadratic(12),
                    Err(Error::InvalidDiscriminant(_))
                ))
            }),
        ),
        (
            "one prime of norm 7 above 7 in Q",
            Box::new(|| {
                let ps = split_prime(&q(), 7)?;
                Ok(ps.len() == 1 && ps[0].norm() == 7)
            }),
        ),
        (
            "3^2 over Q is 9Z",
            Box::new(|| {
                let m: Modulus<i64> = ideal_power(&split_prime(&q(), 3)?[0], 2)?;
                Ok(m.norm == 9 && m.reduce(&[10])? == vec![1] && m.reduce(&[0])? == vec![0])
            }),
        ),
        (
            "two homs Q(sqrt 13) -> Q(sqrt 13)",
            Box::new(|| Ok(algebra_homs(&quad(13), &quad(13)).len() == 2)),
        ),
        (
            "one hom Q -> Q(sqrt 5)",
            Box::new(|| Ok(algebra_homs(&q(), &quad(5)).len() == 1)),
        ),
        (
            "units of Z are +-1",
            Box::new(|| {
                Ok(units_up_to::<i64>(&q(), 7)
                    .units
                    .iter()
                    .map(|u| u.coords[0])
                    .collect::<Vec<_>>()
                    == [1, -1])
            }),
        ),
        (
            "class 9 mod 9 is out of range",
            Box::new(|| {
                let three = split_prime(&q(), 3)?[0];
                Ok(matches!(
                    LocalSet::<i64>::new(&three, 2, vec![vec![9]]),
                    Err(Error::ClassOutOfRange(_))
                ))
            }),
        ),
        (
            "empty tail has empty local sets",
            Box::new(|| Ok(empty().local_set(&split_prime(&q(), 5)?[0])?.is_empty())),
        ),
        (
            "empty tail enumerates -2..2",
            Box::new(|| {
                Ok(empty()
                    .enumerate_v(2)?
                    .iter()
                    .map(|x| x.coords[0])
                    .collect::<Vec<_>>()
                    == [-2, -1, 0, 1, 2])
            }),
        ),
        (
            "empty tail has density 1",
            Box::new(|| {
                let iv = density_interval(&empty(), 100)?;
                Ok(iv.lo_f64() == 1.0 && iv.hi_f64() == 1.0)
            }),
        ),
        (
            "1-free density is not boundable",
            Box::new(|| {
                Ok(matches!(
                    density_interval(&kfree_sieve::<i64>(&q(), 1)?, 100),
                    Err(Error::TailNotBoundable)
                ))
            }),
        ),
        (
            "N'(50, 10) = 0 over Q",
            Box::new(|| Ok(tail_count(&q(), 2, 50, 10)? == 0)),
        ),
    ]
}

fn lg_checks() -> Vec<Check> {
    vec![
        (
            "y = 0 mod 4 is rejected",
            Box::new(|| {
                let c = parse_constraint::<i64>(&q(), "2^2=0")?;
                Ok(matches!(
                    solve(&sq(), &[c], 10),
                    Err(Error::InvalidConstraint(_))
                ))
            }),
        ),
        (
            "y = 3 mod 4 gives 3",
            Box::new(|| {
                Ok(solve(&sq(), &[parse_constraint::<i64>(&q(), "2^2=3")?], 10)?.coords == [3])
            }),
        ),
        (
            "k = 1 surjectivity is rejected",
            Box::new(|| {
                Ok(matches!(
                    check_local_surjectivity(&q(), 1, 5, 10),
                    Err(Error::PreconditionFailed(_))
                ))
            }),
        ),
        (
            "1-free y = 2 mod 5 has no solution",
            Box::new(|| {
                let c = parse_constraint::<i64>(&q(), "5^1=2")?;
                Ok(matches!(
                    solve(&kfree_sieve(&q(), 1)?, &[c], 50),
                    Err(Error::TailNotBoundable)
                ))
            }),
        ),
    ]
}

fn linmap_checks() -> Vec<Check> {
    vec![
        (
            "[[1,1],[0,1]] is bijective mod 7",
            Box::new(|| {
                Ok(induced_mod(
                    &ZLinearMap::from_row_major(quad(2), quad(2), &[1, 1, 0, 1])?,
                    7,
                    1,
                )?
                .bijective)
            }),
        ),
        (
            "[[2,0],[0,1]] is not bijective mod 2",
            Box::new(|| {
                Ok(!induced_mod(
                    &ZLinearMap::from_row_major(quad(2), quad(2), &[2, 0, 0, 1])?,
                    2,
                    1,
                )?
                .bijective)
            }),
        ),
        (
            "identity on Z/9",
            Box::new(|| {
                let t = induced_mod(&ZLinearMap::identity(&q()), 3, 2)?
                    .table
                    .unwrap_or_default();
                Ok(t.len() == 9 && t.iter().all(|(x, y)| x == y))
            }),
        ),
        (
            "identity keeps V locally for p <= 50",
            Box::new(|| {
                let id = ZLinearMap::identity(&q());
                for p in kfree::arith::primes_up_to(50) {
                    if !check_local_condition(&id, &sq(), &sq(), p, 1 << 20)?.holds {
                        return Ok(false);
                    }
                }
                Ok(true)
            }),
        ),
        (
            "identity passes the scan",
            Box::new(|| {
                Ok(scan_primes(&ZLinearMap::identity(&q()), &sq(), &sq(), 50, 1 << 20)?.is_none())
            }),
        ),
        (
            "identity decomposes as (id, 1)",
            Box::new(|| {
                let k = quad(2);
                let d = decompose_monomial(&ZLinearMap::identity(&k));
                Ok(d.is_some_and(|d| d.epsilon == k.one() && d.epsilon_is_unit))
            }),
        ),
        (
            "F_3 units as 1x1 preservers",
            Box::new(|| Ok(preserver_scan(3, 1, 1, 100)?.len() == 2)),
        ),
        (
            "cover witness t = 1",
            Box::new(|| Ok(cover_witness(5, 1, &[1, 1], &[0, 0], &[vec![0], vec![0]])? == 1)),
        ),
        (
            "cover with measure 4/3 is rejected",
            Box::new(|| {
                let r = cover_witness(3, 1, &[1, 1], &[0, 0], &[vec![0, 1], vec![0, 2]]);
                Ok(matches!(r, Err(Error::PreconditionFailed(_))))
            }),
        ),
        (
            "multiplication by 1+w keeps units",
            Box::new(|| {
                let k = quad(2);
                let eps = k.parse_element::<i64>("1+w")?;
                Ok(check_unit_preservation(&ZLinearMap::multiplication(&k, &eps), 20)?.holds)
            }),
        ),
        (
            "identity on Z keeps units",
            Box::new(|| Ok(check_unit_preservation(&ZLinearMap::identity(&q()), 9)?.holds)),
        ),
    ]
}

fn shift_checks() -> Vec<Check> {
    vec![
        (
            "{0,1,2,3} is not admissible at 2",
            Box::new(|| {
                let a = is_admissible(&sq(), &Pattern::from_ints(&q(), &[0, 1, 2, 3])?)?;
                Ok(!a.admissible && a.violation.is_some_and(|v| v.p == 2))
            }),
        ),
        (
            "N = 1 gives 2 admissible sets",
            Box::new(|| Ok(count_admissible(&sq(), 1)? == 2)),
        ),
        (
            "empty tail, N = 3 gives 8",
            Box::new(|| Ok(count_admissible(&empty(), 3)? == 8)),
        ),
        (
            "any code maps the empty set to itself",
            Box::new(|| {
                let c = WindowCode::rational(&[0, 1], &[&[0, 1]])?;
                Ok(apply_block_code(&c, &Pattern::empty(&q()), None, None)?.is_empty())
            }),
        ),
        (
            "corrupted family fails the intertwiner check",
            Box::new(|| {
                let two = split_prime(&q(), 2)?[0];
                let e2 = || LocalSet::new(&two, 1, vec![]);
                let r = build_sieve(q(), TailRule::KFree(1), vec![e2()?])?;
                let s = build_sieve(q(), TailRule::two_class(&q()), vec![e2()?])?;
                let bad = WindowCode::rational(&[0, 1], &[&[0], &[0, 1]])?;
                let rep = verify_intertwiner(
                    &bad,
                    &r,
                    &s,
                    &VerifyConfig {
                        trials: 20,
                        ..Default::default()
                    },
                )?;
                Ok(!rep.ok())
            }),
        ),
        (
            "family {{0}} derives R itself",
            Box::new(|| {
                let five = split_prime(&q(), 5)?[0];
                let t = [q().zero()].into_iter().collect();
                Ok(derived_local_set(&sq(), &five, &[t])? == sq().local_set(&five)?)
            }),
        ),
        (
            "Q(sqrt 2) squarefree is self-conjugate by (id, 1)",
            Box::new(|| {
                let s = kfree_sieve::<i64>(&quad(2), 2)?;
                Ok(
                    matches!(conjugacy_search(&s, &s, 20, 30)?, Conjugacy::Witness { ref epsilon, .. } if *epsilon == quad(2).one()),
                )
            }),
        ),
        (
            "Q and Q(sqrt 2) are not conjugate",
            Box::new(|| {
                let s = kfree_sieve::<i64>(&quad(2), 2)?;
                Ok(matches!(
                    conjugacy_search(&sq(), &s, 20, 30)?,
                    Conjugacy::NotConjugate { .. }
                ))
            }),
        ),
        (
            "W = 0 leaves only the identity",
            Box::new(|| {
                let r = symmetry_scan(&sq(), 0, 1 << 16)?;
                Ok(r.survivors.len() == 1 && r.survivors[0].translation.as_deref() == Some("0"))
            }),
        ),
    ]
}

fn entropy_checks() -> Vec<Check> {
    vec![
        (
            "zeta with P = 1 is the pure tail",
            Box::new(|| {
                let z = zeta_k(&q(), 2, 1)?;
                Ok(z.lo_f64() == 1.0 && z.hi_f64() > 1.6449)
            }),
        ),
        (
            "empty tail entropy is log 2",
            Box::new(|| {
                let h = entropy_product(&empty(), 10)?;
                Ok((h.lo_f64() - LN_2).abs() < 1e-12 && (h.hi_f64() - LN_2).abs() < 1e-12)
            }),
        ),
        (
            "empty tail, N = 4 gives log 2",
            Box::new(|| Ok((empirical_entropy(&empty(), 4)?.value - LN_2).abs() < 1e-15)),
        ),
    ]
}

pub fn run(group: &str) -> Report {
    let checks = match group {
        "sieve" => sieve_checks(),
        "lg" => lg_checks(),
        "linmap" => linmap_checks(),
        "shift" => shift_checks(),
        _ => entropy_checks(),
    };
    let mut rows = Vec::new();
    let mut failed = 0;
    for (name, f) in &checks {
        let (ok, detail) = match f() {
            Ok(b) => (b, String::new()),
            Err(e) => (false, e.to_string()),
        };
        if !ok {
            failed += 1;
        }
        rows.push(json!({ "check": name, "pass": ok, "detail": detail }));
    }
    let body = json!({ "module": group, "checks": rows, "failed": failed });
    if failed == 0 {
        Report::ok(body)
    } else {
        Report::negative(body, format!("{failed} selftest checks failed"))
    }
}
