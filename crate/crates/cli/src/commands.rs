use serde::Serialize;
use serde_json::{json, Map, Value};

use kfree::entropy::{empirical_entropy, entropy_product, log2_over_zeta, zeta_k};
use kfree::linmaps::{
    check_local_condition, check_unit_preservation, cover_witness, decompose_monomial,
    preserver_scan, scan_primes, LocalCheck, ZLinearMap,
};
use kfree::localglobal::{check_local_surjectivity, parse_constraint, solve};
use kfree::rings::{AlgebraicInt, EtaleAlgebra};
use kfree::shiftspace::{
    apply_block_code, conjugacy_search, is_admissible, orbit_approximation, symmetry_scan,
    verify_intertwiner, BoxRegion, Conjugacy, VerifyConfig,
};
use kfree::sieve::{density_interval, tail_count, TailRule};
use kfree::{Pattern, Sieve};

use crate::input::{self, MapArgs};
use crate::report::Report;
use crate::*;

type Outcome = Result<Report, CliError>;
type Dispatched = (String, Map<String, Value>, Option<&'static str>, Outcome);

fn run<A: Serialize>(
    name: &str,
    group: &'static str,
    args: &A,
    common: &Common,
    f: impl FnOnce() -> Outcome,
) -> Dispatched {
    let cfg = config_of(args);
    if common.selftest {
        return (
            name.to_string(),
            cfg,
            Some(group),
            Ok(Report::ok(Value::Null)),
        );
    }
    (name.to_string(), cfg, None, f())
}

pub fn dispatch(g: &Group, ctx: &Ctx) -> Dispatched {
    match g {
        Group::Sieve(c) => match c {
            SieveCmd::Enumerate(a) => run("sieve enumerate", "sieve", a, &a.common, || {
                enumerate(ctx, a)
            }),
            SieveCmd::Density(a) => run("sieve density", "sieve", a, &a.common, || density(ctx, a)),
            SieveCmd::Tail(a) => run("sieve tail", "sieve", a, &a.common, || tail(ctx, a)),
        },
        Group::Lg(c) => match c {
            LgCmd::Solve(a) => run("lg solve", "lg", a, &a.common, || lg_solve(ctx, a)),
            LgCmd::Surjectivity(a) => run("lg surjectivity", "lg", a, &a.common, || {
                surjectivity(ctx, a)
            }),
        },
        Group::Linmap(c) => match c {
            LinmapCmd::Check(a) => run("linmap check", "linmap", a, &a.common, || lm_check(ctx, a)),
            LinmapCmd::Scan(a) => run("linmap scan", "linmap", a, &a.common, || lm_scan(ctx, a)),
            LinmapCmd::Decompose(a) => run("linmap decompose", "linmap", a, &a.common, || {
                lm_decompose(a)
            }),
            LinmapCmd::Preservers(a) => run("linmap preservers", "linmap", a, &a.common, || {
                lm_preservers(a)
            }),
            LinmapCmd::Cover(a) => run("linmap cover", "linmap", a, &a.common, || lm_cover(a)),
            LinmapCmd::Units(a) => run("linmap units", "linmap", a, &a.common, || lm_units(a)),
        },
        Group::Shift(c) => match c {
            ShiftCmd::Admissible(a) => run("shift admissible", "shift", a, &a.common, || {
                admissible(ctx, a)
            }),
            ShiftCmd::Apply(a) => run("shift apply", "shift", a, &a.common, || apply(a)),
            ShiftCmd::Verify(a) => run("shift verify", "shift", a, &a.common, || verify(ctx, a)),
            ShiftCmd::Conjugacy(a) => run("shift conjugacy", "shift", a, &a.common, || {
                conjugacy(ctx, a)
            }),
            ShiftCmd::Symmetries(a) => run("shift symmetries", "shift", a, &a.common, || {
                symmetries(ctx, a)
            }),
            ShiftCmd::Orbit(a) => run("shift orbit", "shift", a, &a.common, || orbit(a)),
        },
        Group::Entropy(c) => match c {
            EntropyCmd::Product(a) => run("entropy product", "entropy", a, &a.common, || {
                product(ctx, a)
            }),
            EntropyCmd::Empirical(a) => run("entropy empirical", "entropy", a, &a.common, || {
                empirical(ctx, a)
            }),
            EntropyCmd::Zeta(a) => run("entropy zeta", "entropy", a, &a.common, || zeta(a)),
        },
    }
}

fn spec_sieve(ctx: &Ctx) -> Result<Sieve, CliError> {
    input::sieve(ctx.spec()?)
}

/// `--algebra`, else the sieve's algebra.
fn algebra_arg(ctx: &Ctx, a: &Option<String>) -> Result<EtaleAlgebra, CliError> {
    match a {
        Some(s) => input::algebra(s),
        None => Ok(spec_sieve(ctx)?.algebra),
    }
}

fn tail_exponent(ctx: &Ctx, k: &Option<u32>) -> Result<u32, CliError> {
    match k {
        Some(k) => Ok(*k),
        None => spec_sieve(ctx)?
            .tail
            .exponent()
            .ok_or_else(|| CliError::Usage("the sieve has no tail exponent; give --k".into())),
    }
}

fn strs(alg: &EtaleAlgebra, xs: &[kfree::Element]) -> Vec<String> {
    xs.iter().map(|x| alg.format_element(x)).collect()
}

// sieve

fn enumerate(ctx: &Ctx, a: &EnumerateArgs) -> Outcome {
    let s = spec_sieve(ctx)?;
    let v = s.enumerate_v(a.bound)?;
    let shown = &v[..v.len().min(a.limit)];
    Ok(Report::ok(json!({
        "algebra": s.algebra.to_string(),
        "count": v.len(),
        "members": strs(&s.algebra, shown),
        "truncated": v.len() > a.limit,
    })))
}

fn density(ctx: &Ctx, a: &DensityArgs) -> Outcome {
    let s = spec_sieve(ctx)?;
    let iv = density_interval(&s, a.cutoff)?;
    Ok(Report::ok(json!({ "density": iv.view(a.digits) })))
}

fn tail(ctx: &Ctx, a: &TailArgs) -> Outcome {
    let alg = algebra_arg(ctx, &a.algebra)?;
    let k = tail_exponent(ctx, &a.k)?;
    let n = tail_count(&alg, k, a.x, a.m)?;
    Ok(Report::ok(
        json!({ "algebra": alg.to_string(), "k": k, "count": n }),
    ))
}

// local-global

fn lg_solve(ctx: &Ctx, a: &SolveArgs) -> Outcome {
    let s = spec_sieve(ctx)?;
    let cs = a
        .cong
        .iter()
        .map(|c| parse_constraint::<i64>(&s.algebra, c))
        .collect::<kfree::Result<Vec<_>>>()?;
    let y = solve(&s, &cs, a.bound)?;
    let verdict = s.membership(&y)?;
    Ok(Report::ok(json!({
        "y": s.algebra.format_element(&y),
        "coords": y.coords,
        "member": verdict.member,
        "constraints": cs.iter().map(|c| format!("{}^{} = {:?}", c.prime, c.exponent, c.residue)).collect::<Vec<_>>(),
    })))
}

fn surjectivity(ctx: &Ctx, a: &SurjArgs) -> Outcome {
    let alg = algebra_arg(ctx, &a.algebra)?;
    let k = tail_exponent(ctx, &a.k)?;
    let p = need(&a.p, "--p")?;
    let r = check_local_surjectivity(&alg, k, p, a.bound)?;
    Ok(Report::ok(serde_json::to_value(&r).expect("json")))
}

// linear maps

fn map_of(m: &MapSel) -> Result<ZLinearMap, CliError> {
    input::linear_map(&MapArgs {
        map: m.map.as_deref(),
        source: m.source.as_deref(),
        target: m.target.as_deref(),
        matrix: m.matrix.as_deref(),
    })
}

fn map_json(a: &ZLinearMap) -> Value {
    json!({
        "source": a.source.to_string(),
        "target": a.target.to_string(),
        "matrix": a.matrix,
    })
}

fn sieves_for(ctx: &Ctx, a: &ZLinearMap, sp: &SievePair) -> Result<(Sieve, Sieve), CliError> {
    let r = input::sieve_or_kfree(ctx.spec.as_deref(), &a.source, sp.k)?;
    let s = input::sieve_or_kfree(sp.target_spec.as_deref(), &a.target, sp.k)?;
    Ok((r, s))
}

fn local_json(c: &LocalCheck) -> Value {
    json!({
        "p": c.p,
        "holds": c.holds,
        "violation": c.violation,
        "violated_at": c.violated_at.map(|q| q.to_string()),
        "candidates": c.candidates,
    })
}

fn lm_check(ctx: &Ctx, a: &CheckArgs) -> Outcome {
    let m = map_of(&a.map)?;
    let (r, s) = sieves_for(ctx, &m, &a.sieves)?;
    let p = need(&a.p, "--p")?;
    let c = check_local_condition(&m, &r, &s, p, a.budget)?;
    let body = json!({ "map": map_json(&m), "check": local_json(&c) });
    Ok(if c.holds {
        Report::ok(body)
    } else {
        Report::negative(body, format!("local condition fails at p = {p}"))
    })
}

fn lm_scan(ctx: &Ctx, a: &ScanArgs) -> Outcome {
    let m = map_of(&a.map)?;
    let (r, s) = sieves_for(ctx, &m, &a.sieves)?;
    Ok(match scan_primes(&m, &r, &s, a.cutoff, a.budget)? {
        None => Report::ok(json!({ "map": map_json(&m), "failure": null })),
        Some(c) => {
            let why = format!("local condition fails at p = {}", c.p);
            Report::negative(
                json!({ "map": map_json(&m), "failure": local_json(&c) }),
                why,
            )
        }
    })
}

fn lm_decompose(a: &DecomposeArgs) -> Outcome {
    let m = map_of(&a.map)?;
    Ok(match decompose_monomial(&m) {
        Some(d) => {
            let body = json!({
                "map": map_json(&m),
                "tau": d.tau.describe(),
                "epsilon": m.target.format_element(&d.epsilon),
                "epsilon_is_unit": d.epsilon_is_unit,
            });
            if d.epsilon_is_unit {
                Report::ok(body)
            } else {
                Report::negative(body, "ε = A(1) is not a unit")
            }
        }
        None => Report::negative(
            json!({ "map": map_json(&m) }),
            "A is not ε·τ for any algebra hom τ",
        ),
    })
}

fn lm_preservers(a: &PreserverArgs) -> Outcome {
    let q = need(&a.q, "--q")?;
    let n = need(&a.n, "--n")?;
    let m = a.m.unwrap_or(n);
    let ps = preserver_scan(q, n, m, a.budget)?;
    let mono = ps.iter().filter(|p| p.monomial).count();
    let mut body = json!({
        "count": ps.len(),
        "monomial": mono,
        "non_monomial": ps.len() - mono,
    });
    if a.list {
        body["matrices"] = json!(ps
            .iter()
            .map(|p| json!({ "matrix": p.matrix, "monomial": p.monomial }))
            .collect::<Vec<_>>());
    }
    Ok(Report::ok(body))
}

fn lm_cover(a: &CoverArgs) -> Outcome {
    let p = need(&a.p, "--p")?;
    let x = input::int_list(&need(&a.x, "--x")?)?;
    let off = input::int_list(&need(&a.a, "--a")?)?;
    let r: Vec<Vec<i64>> = need(&a.r, "--r")?
        .split(';')
        .map(input::int_list)
        .collect::<Result<_, _>>()?;
    let t = cover_witness(p, a.k, &x, &off, &r)?;
    Ok(Report::ok(json!({ "t": t, "modulus": p.pow(a.k) })))
}

fn lm_units(a: &UnitArgs) -> Outcome {
    let m = map_of(&a.map)?;
    let c = check_unit_preservation(&m, a.height)?;
    let body = json!({
        "map": map_json(&m),
        "holds": c.holds,
        "units_tested": c.units_tested,
        "witness": c.witness.as_ref().map(|(u, img)| json!({ "unit": u, "image": img })),
    });
    Ok(if c.holds {
        Report::ok(body)
    } else {
        let (u, _) = c.witness.clone().unwrap_or_default();
        Report::negative(body, format!("the unit {u} maps to a non-unit"))
    })
}

// shift spaces

fn admissible(ctx: &Ctx, a: &AdmissibleArgs) -> Outcome {
    let s = spec_sieve(ctx)?;
    let x = input::pattern(
        a.pattern.pattern.as_deref(),
        a.pattern.points.as_deref(),
        &s.algebra,
    )?
    .pattern;
    let r = is_admissible(&s, &x)?;
    let body = json!({
        "pattern": x.to_strings(),
        "admissible": r.admissible,
        "violation": r.violation.map(|q| q.to_string()),
        "tail_norm_bound": r.tail_norm_bound.to_string(),
        "witnesses": r.witnesses.iter().map(|w| json!({
            "prime": w.prime.to_string(),
            "exponent": w.exponent,
            "delta": w.delta,
        })).collect::<Vec<_>>(),
    });
    Ok(if r.admissible {
        Report::ok(body)
    } else {
        let q = r.violation.map(|q| q.to_string()).unwrap_or_default();
        Report::negative(body, format!("every translate of R meets X at {q}"))
    })
}

fn apply(a: &ApplyArgs) -> Outcome {
    let code = input::code(&need(&a.code, "--code")?)?;
    let mut pin = input::pattern(
        a.pattern.pattern.as_deref(),
        a.pattern.points.as_deref(),
        code.source(),
    )?;
    if let Some(k) = &a.known {
        pin.known = Some(BoxRegion::parse(k)?);
    }
    if let Some(r) = &a.region {
        pin.region = Some(BoxRegion::parse(r)?);
    }
    let fx = apply_block_code(&code, &pin.pattern, pin.known.as_ref(), pin.region.as_ref())?;
    Ok(Report::ok(json!({
        "pattern": pin.pattern.to_strings(),
        "known": pin.known.as_ref().map(|b| b.to_string()),
        "region": pin.region.as_ref().map(|b| b.to_string()),
        "image": fx.to_strings(),
        "size": fx.len(),
    })))
}

fn verify(ctx: &Ctx, a: &VerifyArgs) -> Outcome {
    let code = input::code(&need(&a.code, "--code")?)?;
    let r = spec_sieve(ctx)?;
    let s = match &a.target_spec {
        Some(p) => input::sieve(p)?,
        None => r.clone(),
    };
    let cfg = VerifyConfig {
        trials: a.trials,
        seed: a.seed,
        involution: a.involution,
        preimage: a.preimage.as_deref().map(input::code).transpose()?,
    };
    let rep = verify_intertwiner(&code, &r, &s, &cfg)?;
    let body = serde_json::to_value(&rep).expect("json");
    Ok(if rep.ok() {
        Report::ok(body)
    } else {
        let f = &rep.failures[0];
        Report::negative(body, format!("trial {}: {}", f.trial, f.reason))
    })
}

fn conjugacy(ctx: &Ctx, a: &ConjugacyArgs) -> Outcome {
    let r = spec_sieve(ctx)?;
    let s = input::sieve(&need(&a.target_spec, "--target-spec")?)?;
    Ok(match conjugacy_search(&r, &s, a.height, a.tail_cutoff)? {
        Conjugacy::Witness {
            tau,
            epsilon,
            deltas,
        } => Report::ok(json!({
            "outcome": "witness",
            "tau": tau.describe(),
            "epsilon": s.algebra.format_element(&epsilon),
            "deltas": deltas.iter().map(|(q, d)| json!({ "prime": q.to_string(), "delta": d })).collect::<Vec<_>>(),
        })),
        Conjugacy::NotConjugate { reason } => Report::negative(
            json!({ "outcome": "not conjugate", "reason": reason }),
            "provably not conjugate",
        ),
        Conjugacy::NoWitnessUpToBound {
            isomorphisms,
            units_tested,
        } => Report::negative(
            json!({ "outcome": "no witness up to bound", "isomorphisms": isomorphisms, "units_tested": units_tested }),
            "no witness within the unit bound",
        ),
    })
}

fn symmetries(ctx: &Ctx, a: &SymmetryArgs) -> Outcome {
    let s = spec_sieve(ctx)?;
    let r = symmetry_scan(&s, a.w, a.budget)?;
    Ok(Report::ok(serde_json::to_value(&r).expect("json")))
}

/// A point list, or a box `lo..hi` expanded into its lattice points.
fn window_points(alg: &EtaleAlgebra, s: &str) -> Result<Pattern, CliError> {
    if !s.contains("..") {
        return Ok(Pattern::parse(alg, s)?);
    }
    let b = BoxRegion::parse(s)?;
    if b.lo.len() != alg.degree() {
        return Err(kfree::Error::InvalidArgument(format!(
            "box `{s}` does not have dimension {}",
            alg.degree()
        ))
        .into());
    }
    let mut pts = vec![vec![]];
    for (l, h) in b.lo.iter().zip(&b.hi) {
        pts = pts
            .into_iter()
            .flat_map(|p: Vec<i64>| (*l..=*h).map(move |v| [p.clone(), vec![v]].concat()))
            .collect();
    }
    Ok(Pattern::new(
        alg,
        pts.iter().map(|c| AlgebraicInt::from_i64s(c)),
    )?)
}

fn orbit(a: &OrbitArgs) -> Outcome {
    let alg = input::algebra(&a.algebra)?;
    let x = Pattern::parse(&alg, &a.x)?;
    let m = window_points(&alg, &need(&a.m, "--m")?)?;
    let r = orbit_approximation(&alg, a.k, &x, &m, a.bound)?;
    Ok(Report::ok(json!({
        "delta": alg.format_element(&r.delta),
        "forced": r.forced.iter().map(|(m, q)| json!({ "point": m, "prime": q.to_string() })).collect::<Vec<_>>(),
    })))
}

// entropy

fn product(ctx: &Ctx, a: &ProductArgs) -> Outcome {
    let s = spec_sieve(ctx)?;
    let e = entropy_product(&s, a.cutoff)?;
    let mut body = json!({ "entropy": e.view(a.digits) });
    if let (TailRule::KFree(k), true) = (&s.tail, s.exceptions.is_empty()) {
        if *k >= 2 {
            let z = log2_over_zeta(&s.algebra, *k, a.cutoff)?;
            body["log2_over_zeta"] = json!(z.view(a.digits));
            body["routes_agree"] = json!(z.overlaps(&e));
        }
    }
    Ok(Report::ok(body))
}

fn empirical(ctx: &Ctx, a: &EmpiricalArgs) -> Outcome {
    let s = spec_sieve(ctx)?;
    let e = empirical_entropy(&s, a.n)?;
    Ok(Report::ok(json!({
        "n": e.n,
        "volume": e.volume,
        "count": e.count.to_string(),
        "entropy": e.value,
    })))
}

fn zeta(a: &ZetaArgs) -> Outcome {
    let alg = input::algebra(&a.algebra)?;
    let z = zeta_k(&alg, a.s, a.cutoff)?;
    Ok(Report::ok(
        json!({ "algebra": alg.to_string(), "zeta": z.view(a.digits) }),
    ))
}
