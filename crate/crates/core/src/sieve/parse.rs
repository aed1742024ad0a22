//! Text format for sieve specifications.
//!
//! ```text
//! algebra Q(sqrt 13)
//! tail kfree 2
//! exceptions
//! 2 0 1 :
//! 3 1 2 : 0, 4
//! ```
//!
//! Exception lines read `p [index] k : classes`; the optional index picks a
//! prime among those above p (in split_prime order) and classes are
//! canonical component literals. `tail translates k : t1, t2` gives a tail
//! R_𝔭 = ∪ (t_i + 𝔭^k) with full-algebra offsets.

use super::{build_sieve, LocalSet, SieveSpec, TailRule};
use crate::error::{Error, Result};
use crate::rings::{split_prime, EtaleAlgebra};
use crate::scalar::Scalar;

fn perr(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn parse_num<N: std::str::FromStr>(s: &str, line: usize) -> Result<N> {
    s.trim()
        .parse()
        .map_err(|_| perr(line, format!("expected a number, got `{s}`")))
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

pub fn parse_sieve<T: Scalar>(text: &str) -> Result<SieveSpec<T>> {
    let mut algebra: Option<EtaleAlgebra> = None;
    let mut tail_line: Option<(usize, String)> = None;
    let mut exc_lines: Vec<(usize, String)> = Vec::new();
    let mut in_exceptions = false;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("algebra") {
            algebra = Some(EtaleAlgebra::parse(rest.trim())?);
            in_exceptions = false;
        } else if let Some(rest) = line.strip_prefix("tail") {
            tail_line = Some((ln, rest.trim().to_string()));
            in_exceptions = false;
        } else if line == "exceptions" {
            in_exceptions = true;
        } else if in_exceptions {
            exc_lines.push((ln, line.to_string()));
        } else {
            return Err(perr(ln, format!("unexpected `{line}`")));
        }
    }
    let algebra = algebra.ok_or_else(|| Error::Parse("missing `algebra` line".into()))?;
    let tail = match tail_line {
        None => TailRule::Empty,
        Some((ln, t)) => parse_tail(&algebra, &t, ln)?,
    };
    let mut exceptions = Vec::new();
    for (ln, l) in exc_lines {
        let (head, classes) = l
            .split_once(':')
            .ok_or_else(|| perr(ln, "exception lines need `:`"))?;
        let nums: Vec<&str> = head.split_whitespace().collect();
        let (p, idx, k) = match nums.as_slice() {
            [p, k] => (parse_num::<u64>(p, ln)?, None, parse_num::<u32>(k, ln)?),
            [p, i, k] => (
                parse_num::<u64>(p, ln)?,
                Some(parse_num::<usize>(i, ln)?),
                parse_num::<u32>(k, ln)?,
            ),
            _ => return Err(perr(ln, "expected `p [index] k : classes`")),
        };
        let above = split_prime(&algebra, p)?;
        let q = match idx {
            Some(i) => *above
                .get(i)
                .ok_or_else(|| perr(ln, format!("only {} primes above {p}", above.len())))?,
            None if above.len() == 1 => above[0],
            None => {
                return Err(perr(
                    ln,
                    format!("{} primes above {p}; give an index", above.len()),
                ))
            }
        };
        if k == 0 {
            return Err(perr(ln, "exponent must be at least 1"));
        }
        let field = EtaleAlgebra::new(vec![q.field])?;
        let cls = split_list(classes)
            .map(|c| field.parse_element::<T>(c).map(|e| e.coords))
            .collect::<Result<Vec<_>>>()?;
        exceptions.push(LocalSet::new(&q, k, cls)?);
    }
    build_sieve(algebra, tail, exceptions)
}

fn parse_tail<T: Scalar>(alg: &EtaleAlgebra, t: &str, ln: usize) -> Result<TailRule<T>> {
    let (head, list) = match t.split_once(':') {
        Some((h, l)) => (h.trim(), Some(l)),
        None => (t.trim(), None),
    };
    let words: Vec<&str> = head.split_whitespace().collect();
    match (words.as_slice(), list) {
        (["empty"], None) => Ok(TailRule::Empty),
        (["kfree", k], None) => Ok(TailRule::KFree(parse_num(k, ln)?)),
        (["translates", k], Some(list)) => {
            let offsets = split_list(list)
                .map(|o| alg.parse_element(o))
                .collect::<Result<Vec<_>>>()?;
            Ok(TailRule::Translates {
                offsets,
                exponent: parse_num(k, ln)?,
            })
        }
        _ => Err(perr(ln, format!("unknown tail rule `{t}`"))),
    }
}

/// Inverse of [`parse_sieve`].
pub fn format_sieve<T: Scalar>(s: &SieveSpec<T>) -> String {
    let alg = &s.algebra;
    let mut out = format!("algebra {alg}\n");
    match &s.tail {
        TailRule::Empty => out.push_str("tail empty\n"),
        TailRule::KFree(k) => out.push_str(&format!("tail kfree {k}\n")),
        TailRule::Translates { offsets, exponent } => {
            let o: Vec<String> = offsets.iter().map(|x| alg.format_element(x)).collect();
            out.push_str(&format!("tail translates {exponent} : {}\n", o.join(", ")));
        }
    }
    if !s.exceptions.is_empty() {
        out.push_str("exceptions\n");
    }
    for (q, ls) in &s.exceptions {
        let field = EtaleAlgebra::new(vec![q.field]).expect("valid field");
        let idx = split_prime(alg, q.p)
            .expect("prime")
            .iter()
            .position(|x| x == q)
            .unwrap();
        let cls: Vec<String> = ls
            .classes
            .iter()
            .map(|c| field.format_element(&crate::rings::AlgebraicInt::new(c.clone())))
            .collect();
        out.push_str(&format!(
            "{} {} {} : {}\n",
            q.p,
            idx,
            ls.exponent(),
            cls.join(", ")
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "algebra Q\ntail translates 1 : 0, 1\nexceptions\n2 1 :\n3 1 :\n";
        let s = parse_sieve::<i64>(text).unwrap();
        assert_eq!(s.exceptions.len(), 2);
        assert_eq!(
            format_sieve(&s),
            "algebra Q\ntail translates 1 : 0, 1\nexceptions\n2 0 1 : \n3 0 1 : \n"
        );
        let again = parse_sieve::<i64>(&format_sieve(&s)).unwrap();
        assert_eq!(format_sieve(&again), format_sieve(&s));
    }

    #[test]
    fn quadratic_exception_and_errors() {
        let s = parse_sieve::<i64>("algebra Q(sqrt 13)\ntail kfree 2\nexceptions\n3 1 1 : 2\n")
            .unwrap();
        assert_eq!(s.exceptions.len(), 1);
        assert!(matches!(
            parse_sieve::<i64>("algebra Q\ntail kfree 2\nexceptions\n3 2 : 9\n"),
            Err(Error::ClassOutOfRange(_))
        ));
        assert!(matches!(
            parse_sieve::<i64>("tail kfree 2\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_sieve::<i64>("algebra Q x Q\nexceptions\n3 1 : 0\n"),
            Err(Error::Parse(_))
        ));
    }
}
