//! Approximating admissible sets by translates of V_{K,k}.

use serde::Serialize;

use super::Pattern;
use crate::error::{Error, Result};
use crate::localglobal::{solve_filtered, CongruenceConstraint};
use crate::rings::{ideal_power, primes_of, AlgebraicInt, EtaleAlgebra, Modulus, PrimeIdeal};
use crate::sieve::{build_sieve, kfree_sieve, TailRule};

#[derive(Debug, Clone, Serialize)]
pub struct OrbitApprox {
    pub delta: AlgebraicInt<i64>,
    /// Δ + m ∈ 𝔮^k forced for each m ∈ M outside X.
    pub forced: Vec<(String, PrimeIdeal)>,
}

/// Nonzero Δ with (−Δ + V_{K,k}) ∩ M = X ∩ M.
///
/// Δ is searched in V(K, R′) with R′_𝔭 = −(X ∩ M) + 𝔭^k, so that Δ + x is
/// k-free for every kept x; each dropped m gets its own prime 𝔮 with
/// Δ + m ≡ 0 mod 𝔮^k.
pub fn orbit_approximation(
    alg: &EtaleAlgebra,
    k: u32,
    x: &Pattern<i64>,
    m: &Pattern<i64>,
    bound: u64,
) -> Result<OrbitApprox> {
    if k < 2 {
        return Err(Error::TailNotBoundable);
    }
    if &x.algebra != alg || &m.algebra != alg {
        return Err(Error::ComponentMismatch(
            "patterns use a different algebra".into(),
        ));
    }
    let kept: Vec<AlgebraicInt<i64>> = m.points.iter().filter(|p| x.contains(p)).cloned().collect();
    let dropped: Vec<AlgebraicInt<i64>> = m
        .points
        .iter()
        .filter(|p| !x.contains(p))
        .cloned()
        .collect();
    let tail = if kept.is_empty() {
        TailRule::Empty
    } else {
        TailRule::Translates {
            offsets: kept.iter().map(|p| p.neg()).collect(),
            exponent: k,
        }
    };
    let aux = build_sieve(alg.clone(), tail, vec![])?;
    let mut used = Vec::new();
    let mut cs = Vec::new();
    let mut forced = Vec::new();
    for d in &dropped {
        let q = primes_of(alg)
            .find(|q| {
                if used.contains(q) {
                    return false;
                }
                let md: Modulus<i64> = ideal_power(q, k).expect("ideal power");
                // d − x ∉ 𝔮^k for kept x, else no Δ can work
                kept.iter()
                    .all(|kx| !md.contains(alg.component_coords(&d.sub(kx), q.component)))
            })
            .expect("infinitely many primes");
        used.push(q);
        let neg = d.neg();
        cs.push(CongruenceConstraint::new(
            q,
            k,
            alg.component_coords(&neg, q.component),
        )?);
        forced.push((alg.format_element(d), q));
    }
    // zero shift excluded
    let delta = solve_filtered(&aux, &cs, bound, |y| !y.is_zero())?;
    let v = kfree_sieve::<i64>(alg, k)?;
    for p in &m.points {
        if v.membership(&delta.add(p))?.member != x.contains(p) {
            return Err(Error::NoWitness(format!(
                "Δ = {} fails at {}",
                alg.format_element(&delta),
                alg.format_element(p)
            )));
        }
    }
    Ok(OrbitApprox { delta, forced })
}
