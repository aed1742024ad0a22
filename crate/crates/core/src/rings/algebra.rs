use std::fmt;

use serde::Serialize;

use super::field::FieldSpec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite product of ℚ and quadratic fields; component order matters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EtaleAlgebra {
    components: Vec<FieldSpec>,
    offsets: Vec<usize>,
    degree: usize,
}

/// An element of the maximal order, stored as the concatenation of the
/// per-component coordinate vectors over the integral bases.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AlgebraicInt<T> {
    pub coords: Vec<T>,
}

impl<T: Scalar> AlgebraicInt<T> {
    pub fn new(coords: Vec<T>) -> Self {
        AlgebraicInt { coords }
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        AlgebraicInt::new(v.iter().map(|&c| T::from_i64_exact(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        AlgebraicInt::new(
            self.coords
                .iter()
                .zip(&o.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        AlgebraicInt::new(
            self.coords
                .iter()
                .zip(&o.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        AlgebraicInt::new(self.coords.iter().map(|a| -a.clone()).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        AlgebraicInt::new(self.coords.iter().map(|a| a.clone() * s.clone()).collect())
    }

    /// Maximum absolute coordinate.
    pub fn height(&self) -> T {
        self.coords
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(T::zero)
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(|c| c.to_i64()).collect()
    }
}

/// Validate and build an algebra from its component list.
pub fn make_algebra(parts: &[FieldSpec]) -> Result<EtaleAlgebra> {
    let mut comps = Vec::with_capacity(parts.len());
    for p in parts {
        comps.push(match *p {
            FieldSpec::Rational => FieldSpec::Rational,
            FieldSpec::Quadratic(d) => FieldSpec::quadratic(d)?,
        });
    }
    EtaleAlgebra::new(comps)
}

impl EtaleAlgebra {
    pub fn new(components: Vec<FieldSpec>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("algebra needs a component".into()));
        }
        let mut offsets = Vec::with_capacity(components.len());
        let mut degree = 0;
        for c in &components {
            if let FieldSpec::Quadratic(d) = *c {
                FieldSpec::quadratic(d)?;
            }
            offsets.push(degree);
            degree += c.degree();
        }
        Ok(EtaleAlgebra {
            components,
            offsets,
            degree,
        })
    }

    pub fn rational() -> Self {
        EtaleAlgebra::new(vec![FieldSpec::Rational]).unwrap()
    }

    pub fn quadratic(d: i64) -> Result<Self> {
        EtaleAlgebra::new(vec![FieldSpec::quadratic(d)?])
    }

    pub fn components(&self) -> &[FieldSpec] {
        &self.components
    }

    pub fn component(&self, i: usize) -> FieldSpec {
        self.components[i]
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.components[i].degree()
    }

    pub fn is_totally_real(&self) -> bool {
        self.components.iter().all(|c| c.is_totally_real())
    }

    pub fn zero<T: Scalar>(&self) -> AlgebraicInt<T> {
        AlgebraicInt::new(vec![T::zero(); self.degree])
    }

    pub fn one<T: Scalar>(&self) -> AlgebraicInt<T> {
        self.from_int(T::one())
    }

    pub fn from_int<T: Scalar>(&self, v: T) -> AlgebraicInt<T> {
        let mut c = vec![T::zero(); self.degree];
        for &o in &self.offsets {
            c[o] = v.clone();
        }
        AlgebraicInt::new(c)
    }

    /// The i-th basis element (1 or ω of some component).
    pub fn basis_element<T: Scalar>(&self, i: usize) -> AlgebraicInt<T> {
        let mut c = vec![T::zero(); self.degree];
        c[i] = T::one();
        AlgebraicInt::new(c)
    }

    pub fn check<T: Scalar>(&self, x: &AlgebraicInt<T>) -> Result<()> {
        if x.coords.len() != self.degree {
            return Err(Error::ComponentMismatch(format!(
                "element has {} coordinates, algebra degree is {}",
                x.coords.len(),
                self.degree
            )));
        }
        Ok(())
    }

    pub fn component_coords<'a, T: Scalar>(&self, x: &'a AlgebraicInt<T>, i: usize) -> &'a [T] {
        &x.coords[self.range(i)]
    }

    pub fn mul<T: Scalar>(&self, x: &AlgebraicInt<T>, y: &AlgebraicInt<T>) -> AlgebraicInt<T> {
        let mut out = Vec::with_capacity(self.degree);
        for (i, f) in self.components.iter().enumerate() {
            let r = self.range(i);
            out.extend(mul_component(*f, &x.coords[r.clone()], &y.coords[r]));
        }
        AlgebraicInt::new(out)
    }

    pub fn pow<T: Scalar>(&self, x: &AlgebraicInt<T>, e: u32) -> AlgebraicInt<T> {
        let mut r = self.one();
        for _ in 0..e {
            r = self.mul(&r, x);
        }
        r
    }

    /// Field norm of the i-th component.
    pub fn norm_component<T: Scalar>(&self, x: &AlgebraicInt<T>, i: usize) -> T {
        norm_component(self.components[i], &x.coords[self.range(i)])
    }

    /// Componentwise field norms.
    pub fn norms<T: Scalar>(&self, x: &AlgebraicInt<T>) -> Vec<T> {
        (0..self.components.len())
            .map(|i| self.norm_component(x, i))
            .collect()
    }

    /// Norm of the whole algebra (product of component norms).
    pub fn norm<T: Scalar>(&self, x: &AlgebraicInt<T>) -> T {
        self.norms(x).into_iter().fold(T::one(), |a, b| a * b)
    }

    pub fn is_unit<T: Scalar>(&self, x: &AlgebraicInt<T>) -> bool {
        self.norms(x).iter().all(|n| n.abs().is_one())
    }

    /// Parse `a+b*w; c` style literals, one component per `;`.
    pub fn parse_element<T: Scalar>(&self, s: &str) -> Result<AlgebraicInt<T>> {
        let parts: Vec<&str> = s.split(';').collect();
        if parts.len() != self.components.len() {
            return Err(Error::Parse(format!(
                "element `{s}` has {} components, algebra has {}",
                parts.len(),
                self.components.len()
            )));
        }
        let mut coords = Vec::with_capacity(self.degree);
        for (p, f) in parts.iter().zip(&self.components) {
            let (a, b) = parse_component(p)?;
            coords.push(T::from_i64_exact(a));
            match f {
                FieldSpec::Rational if b != 0 => {
                    return Err(Error::Parse(format!(
                        "`{p}` uses w in a rational component"
                    )))
                }
                FieldSpec::Rational => {}
                FieldSpec::Quadratic(_) => coords.push(T::from_i64_exact(b)),
            }
        }
        Ok(AlgebraicInt::new(coords))
    }

    pub fn format_element<T: Scalar>(&self, x: &AlgebraicInt<T>) -> String {
        (0..self.components.len())
            .map(|i| format_component(&x.coords[self.range(i)]))
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Parse `Q`, `Q(sqrt d)` joined by `x`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut comps = Vec::new();
        for part in split_components(s) {
            let p: String = part.chars().filter(|c| !c.is_whitespace()).collect();
            if p == "Q" {
                comps.push(FieldSpec::Rational);
            } else if let Some(inner) = p.strip_prefix("Q(sqrt").and_then(|r| r.strip_suffix(')')) {
                let d: i64 = inner
                    .trim_start_matches('(')
                    .trim_end_matches(')')
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad discriminant in `{part}`")))?;
                comps.push(FieldSpec::quadratic(d)?);
            } else {
                return Err(Error::Parse(format!("unknown field `{part}`")));
            }
        }
        EtaleAlgebra::new(comps)
    }
}

fn split_components(s: &str) -> Vec<&str> {
    // `x` separates components; it never occurs inside a component token.
    s.split(['x', '×'])
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect()
}

impl fmt::Display for EtaleAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

pub(crate) fn mul_component<T: Scalar>(f: FieldSpec, x: &[T], y: &[T]) -> Vec<T> {
    match f {
        FieldSpec::Rational => vec![x[0].clone() * y[0].clone()],
        FieldSpec::Quadratic(_) => {
            let (t, n) = f.omega_relation();
            let (t, n) = (T::from_i64_exact(t), T::from_i64_exact(n));
            let (a, b, c, e) = (&x[0], &x[1], &y[0], &y[1]);
            let be = b.clone() * e.clone();
            vec![
                a.clone() * c.clone() + n * be.clone(),
                a.clone() * e.clone() + b.clone() * c.clone() + t * be,
            ]
        }
    }
}

pub(crate) fn norm_component<T: Scalar>(f: FieldSpec, x: &[T]) -> T {
    match f {
        FieldSpec::Rational => x[0].clone(),
        FieldSpec::Quadratic(_) => {
            let (t, n) = f.omega_relation();
            let (a, b) = (&x[0], &x[1]);
            a.clone() * a.clone() + a.clone() * b.clone() * T::from_i64_exact(t)
                - T::from_i64_exact(n) * b.clone() * b.clone()
        }
    }
}

/// Galois conjugate of a quadratic component: a+bω ↦ (a+bt) − bω.
pub(crate) fn conj_component<T: Scalar>(f: FieldSpec, x: &[T]) -> Vec<T> {
    match f {
        FieldSpec::Rational => x.to_vec(),
        FieldSpec::Quadratic(_) => {
            let (t, _) = f.omega_relation();
            vec![
                x[0].clone() + x[1].clone() * T::from_i64_exact(t),
                -x[1].clone(),
            ]
        }
    }
}

fn parse_component(s: &str) -> Result<(i64, i64)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    let bad = || Error::Parse(format!("bad element literal `{s}`"));
    let (mut a, mut b) = (0i64, 0i64);
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1i64;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -1;
            }
            i += 1;
        } else if i != 0 {
            return Err(bad());
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let num = if i > start {
            Some(s[start..i].parse::<i64>().map_err(|_| bad())?)
        } else {
            None
        };
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
            if i >= bytes.len() || bytes[i] != b'w' || num.is_none() {
                return Err(bad());
            }
        }
        if i < bytes.len() && bytes[i] == b'w' {
            i += 1;
            b += sign * num.unwrap_or(1);
        } else {
            a += sign * num.ok_or_else(bad)?;
        }
    }
    Ok((a, b))
}

fn format_component<T: Scalar>(x: &[T]) -> String {
    if x.len() == 1 || x[1].is_zero() {
        return x[0].to_string();
    }
    let b = &x[1];
    let wpart = if b.is_one() {
        "w".to_string()
    } else if (-b.clone()).is_one() {
        "-w".to_string()
    } else {
        format!("{b}*w")
    };
    if x[0].is_zero() {
        wpart
    } else if b.is_negative() {
        format!("{}{}", x[0], wpart)
    } else {
        format!("{}+{}", x[0], wpart)
    }
}
