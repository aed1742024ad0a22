//! Derived local sets, translate tests, conjugacy and symmetry searches.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::code::{apply_block_code, WindowCode};
use super::{is_admissible, relevant_primes, Pattern};
use crate::error::{Error, Result};
use crate::linmaps::ZLinearMap;
use crate::rings::{
    algebra_homs, primes_up_to_norm, units_up_to, AlgebraHom, AlgebraicInt, PrimeIdeal,
};
use crate::scalar::Scalar;
use crate::sieve::{LocalSet, SieveSpec};

/// −T + R_𝔭 = {r − t}.
pub fn minus_pattern_plus<T: Scalar>(
    s: &SieveSpec<T>,
    q: &PrimeIdeal,
    t: &BTreeSet<AlgebraicInt<T>>,
) -> Result<LocalSet<T>> {
    let ls = s.local_set(q)?;
    let lat = &ls.modulus.lattice;
    let mut classes = BTreeSet::new();
    for tp in t {
        let tc = s.algebra.component_coords(tp, q.component);
        for r in &ls.classes {
            let v: Vec<T> = r
                .iter()
                .zip(tc)
                .map(|(a, b)| a.clone() - b.clone())
                .collect();
            classes.insert(lat.reduce(&v));
        }
    }
    Ok(LocalSet {
        modulus: ls.modulus.clone(),
        classes,
    })
}

/// R′_𝔭 = ∩_{T ∈ 𝒯} (−T + R_𝔭).
pub fn derived_local_set<T: Scalar>(
    s: &SieveSpec<T>,
    q: &PrimeIdeal,
    family: &[BTreeSet<AlgebraicInt<T>>],
) -> Result<LocalSet<T>> {
    let mut it = family.iter();
    let first = it
        .next()
        .ok_or_else(|| Error::InvalidArgument("pattern family is empty".into()))?;
    let mut acc = minus_pattern_plus(s, q, first)?;
    for t in it {
        let next = minus_pattern_plus(s, q, t)?;
        acc.classes = acc.classes.intersection(&next.classes).cloned().collect();
    }
    Ok(acc)
}

fn common<T: Scalar>(a: &LocalSet<T>, b: &LocalSet<T>) -> Result<(LocalSet<T>, LocalSet<T>)> {
    if a.prime() != b.prime() {
        return Err(Error::ComponentMismatch(format!(
            "{} against {}",
            a.prime(),
            b.prime()
        )));
    }
    let e = a.exponent().max(b.exponent());
    Ok((a.lift(e)?, b.lift(e)?))
}

/// The smallest canonical δ with `small` ⊆ δ + `big`, if any.
pub fn translate_subset<T: Scalar>(
    small: &LocalSet<T>,
    big: &LocalSet<T>,
) -> Result<Option<Vec<T>>> {
    let (a, b) = common(small, big)?;
    let lat = &a.modulus.lattice;
    let Some(s0) = a.classes.iter().next() else {
        return Ok(Some(vec![T::zero(); lat.dim()]));
    };
    // δ must carry some class of `big` onto s0
    let mut found: Option<Vec<T>> = None;
    for bc in &b.classes {
        let d: Vec<T> = s0
            .iter()
            .zip(bc)
            .map(|(x, y)| x.clone() - y.clone())
            .collect();
        let d = lat.reduce(&d);
        if found.as_ref().is_some_and(|f| *f <= d) {
            continue;
        }
        if b.translate(&d).classes.is_superset(&a.classes) {
            found = Some(d);
        }
    }
    Ok(found)
}

/// δ with a = δ + b, if any.
pub fn translate_equal<T: Scalar>(a: &LocalSet<T>, b: &LocalSet<T>) -> Result<Option<Vec<T>>> {
    let (x, y) = common(a, b)?;
    if x.len() != y.len() {
        return Ok(None);
    }
    translate_subset(&x, &y)
}

/// Least e such that the set is a union of classes modulo 𝔭^e (0 for ∅
/// and for everything).
pub fn minimal_exponent<T: Scalar>(ls: &LocalSet<T>) -> Result<u32> {
    if ls.is_empty() || ls.is_full() {
        return Ok(0);
    }
    let mut e = ls.exponent();
    while e > 1 {
        let lower: LocalSet<T> = LocalSet::from_elements(
            ls.prime(),
            e - 1,
            &ls.classes.iter().cloned().collect::<Vec<_>>(),
        )?;
        if lower.lift(ls.exponent())?.classes != ls.classes {
            break;
        }
        e -= 1;
    }
    Ok(e)
}

/// Result of a conjugacy search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conjugacy<T> {
    /// S_{τ(𝔭)} = δ_𝔭 + ε·τ(R_𝔭) on every checked prime.
    Witness {
        tau: AlgebraHom,
        epsilon: AlgebraicInt<T>,
        deltas: Vec<(PrimeIdeal, Vec<T>)>,
    },
    NoWitnessUpToBound {
        isomorphisms: usize,
        units_tested: usize,
    },
    NotConjugate {
        reason: String,
    },
}

/// Image ε·τ(R_𝔭) as a local set at τ(𝔭).
fn image_set<T: Scalar>(
    r: &SieveSpec<T>,
    l: &SieveSpec<T>,
    tau: &AlgebraHom,
    eps: &AlgebraicInt<T>,
    p: &PrimeIdeal,
    q: &PrimeIdeal,
    ls: &LocalSet<T>,
) -> Result<LocalSet<T>> {
    let range = r.algebra.range(p.component);
    let reps: Vec<Vec<T>> = ls
        .classes
        .iter()
        .map(|c| {
            let mut full = vec![T::zero(); r.algebra.degree()];
            for (i, v) in range.clone().zip(c) {
                full[i] = v.clone();
            }
            let img = l.algebra.mul(eps, &tau.apply(&AlgebraicInt::new(full)));
            l.algebra.component_coords(&img, q.component).to_vec()
        })
        .collect();
    LocalSet::from_elements(q, ls.exponent(), &reps)
}

/// Search (τ, ε) with S_{τ(𝔭)} a translate of ε·τ(R_𝔭) on exception
/// primes of both sieves and on tail primes of norm ≤ `tail_cutoff`.
pub fn conjugacy_search<T: Scalar>(
    r: &SieveSpec<T>,
    s: &SieveSpec<T>,
    h: u64,
    tail_cutoff: u64,
) -> Result<Conjugacy<T>> {
    for (name, x) in [("first", r), ("second", s)] {
        if !x.flags.non_large || !x.flags.cofinite {
            return Err(Error::PreconditionFailed(format!(
                "the {name} sieve must be non-large and cofinite"
            )));
        }
    }
    let isos: Vec<AlgebraHom> = algebra_homs(&r.algebra, &s.algebra)
        .into_iter()
        .filter(|t| t.is_isomorphism())
        .collect();
    if isos.is_empty() {
        return Ok(Conjugacy::NotConjugate {
            reason: format!("no algebra isomorphism {} → {}", r.algebra, s.algebra),
        });
    }
    let mut live = Vec::new();
    let mut reasons = Vec::new();
    for tau in &isos {
        let mut primes: BTreeSet<PrimeIdeal> = r.exceptions.keys().copied().collect();
        for q in s.exceptions.keys() {
            if let Some(p) = tau.preimage_prime(q) {
                primes.insert(p);
            }
        }
        primes.extend(primes_up_to_norm(&r.algebra, tail_cutoff));
        let mut pairs = Vec::new();
        let mut bad = None;
        for p in primes {
            let q = tau
                .map_prime(&p)
                .ok_or_else(|| Error::ComponentMismatch(format!("no image for {p}")))?;
            let (a, b) = (r.local_set(&p)?, s.local_set(&q)?);
            let (ea, eb) = (minimal_exponent(&a)?, minimal_exponent(&b)?);
            if a.measure() != b.measure() || ea != eb {
                bad = Some(format!(
                    "under {}: at {p} the measures are {} and {}, the minimal exponents {ea} and {eb}",
                    tau.describe(),
                    a.measure(),
                    b.measure()
                ));
                break;
            }
            pairs.push((p, q, a, b));
        }
        match bad {
            Some(why) => reasons.push(why),
            None => live.push((tau, pairs)),
        }
    }
    if live.is_empty() {
        return Ok(Conjugacy::NotConjugate {
            reason: reasons.join("; "),
        });
    }
    let units = units_up_to::<T>(&s.algebra, h).units;
    for (tau, pairs) in &live {
        'eps: for eps in &units {
            let mut deltas = Vec::new();
            for (p, q, a, b) in pairs {
                let img = image_set(r, s, tau, eps, p, q, a)?;
                match translate_equal(b, &img)? {
                    Some(d) => deltas.push((*q, d)),
                    None => continue 'eps,
                }
            }
            return Ok(Conjugacy::Witness {
                tau: (*tau).clone(),
                epsilon: eps.clone(),
                deltas,
            });
        }
    }
    Ok(Conjugacy::NoWitnessUpToBound {
        isomorphisms: live.len(),
        units_tested: units.len(),
    })
}

/// One surviving candidate of the symmetry scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryCode {
    pub patterns: Vec<Vec<String>>,
    /// g when the code is X ↦ g + X.
    pub translation: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryScan {
    pub window: Vec<String>,
    pub admissible_patterns: usize,
    pub families: u64,
    pub with_singleton: u64,
    pub local_ok: u64,
    pub survivors: Vec<SymmetryCode>,
}

fn subsets_of(points: &[AlgebraicInt<i64>]) -> Vec<BTreeSet<AlgebraicInt<i64>>> {
    (1u64..1 << points.len())
        .map(|m| {
            points
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

fn cube(n: usize, r: i64) -> Vec<AlgebraicInt<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-r..=r).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out.iter().map(|p| AlgebraicInt::from_i64s(p)).collect()
}

/// Codes with A = id and window [−W, W]^n that survive the necessary
/// conditions for a symmetry: a singleton pattern, R_𝔭 ⊆ δ + R′_𝔭 at the
/// primes a window can see, and, on every admissible subset of a test box,
/// admissible images and injectivity.
pub fn symmetry_scan(s: &SieveSpec<i64>, w: u32, budget: u64) -> Result<SymmetryScan> {
    let alg = &s.algebra;
    let n = alg.degree();
    let window = cube(n, w as i64);
    if window.len() > 20 {
        return Err(Error::BudgetExceeded(format!(
            "window of {} points",
            window.len()
        )));
    }
    let pats: Vec<BTreeSet<AlgebraicInt<i64>>> = subsets_of(&window)
        .into_iter()
        .filter(|t| {
            Pattern::new(alg, t.iter().cloned())
                .and_then(|p| is_admissible(s, &p))
                .is_ok_and(|a| a.admissible)
        })
        .collect();
    if pats.len() >= 63 || (1u64 << pats.len()) - 1 > budget {
        return Err(Error::BudgetExceeded(format!(
            "{} admissible patterns give too many families",
            pats.len()
        )));
    }
    let families = (1u64 << pats.len()) - 1;
    // test box: as wide as possible with at most 12 points
    let mut radius = 3 * w as i64 + 2;
    while (2 * radius + 1).pow(n as u32) > 12 && radius > 0 {
        radius -= 1;
    }
    let test_sets: Vec<Pattern<i64>> = std::iter::once(Pattern::empty(alg))
        .chain(
            subsets_of(&cube(n, radius))
                .into_iter()
                .map(|t| Pattern::new(alg, t).expect("box point")),
        )
        .filter(|p| is_admissible(s, p).is_ok_and(|a| a.admissible))
        .collect();
    let (local_primes, _) = relevant_primes(s, window.len())?;
    let id = ZLinearMap::identity(alg);
    let mut with_singleton = 0;
    let mut local_ok = 0;
    let mut survivors = Vec::new();
    for mask in 1..=families {
        let fam: Vec<BTreeSet<AlgebraicInt<i64>>> = (0..pats.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| pats[i].clone())
            .collect();
        if !fam.iter().any(|t| t.len() == 1) {
            continue;
        }
        with_singleton += 1;
        let mut ok = true;
        for q in &local_primes {
            let rq = s.local_set(q)?;
            if translate_subset(&rq, &derived_local_set(s, q, &fam)?)?.is_none() {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        local_ok += 1;
        let code = WindowCode::new(id.clone(), window.iter().cloned(), fam.clone())?;
        let mut images = HashSet::new();
        for x in &test_sets {
            let fx = apply_block_code(&code, x, None, None)?;
            if !images.insert(fx.points.clone()) || !is_admissible(s, &fx)?.admissible {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        // X ↦ X − t is the family of admissible patterns containing t
        let translation = window.iter().find_map(|t| {
            let tf: BTreeSet<_> = pats.iter().filter(|p| p.contains(t)).cloned().collect();
            (tf == fam.iter().cloned().collect()).then(|| alg.format_element(&t.neg()))
        });
        survivors.push(SymmetryCode {
            patterns: fam
                .iter()
                .map(|t| t.iter().map(|p| alg.format_element(p)).collect())
                .collect(),
            translation,
        });
    }
    Ok(SymmetryScan {
        window: window.iter().map(|p| alg.format_element(p)).collect(),
        admissible_patterns: pats.len(),
        families,
        with_singleton,
        local_ok,
        survivors,
    })
}
