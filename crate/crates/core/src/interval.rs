//! Rigorous enclosures with dyadic endpoints and outward rounding.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Fractional bits carried by enclosures.
pub const PREC: u32 = 256;

/// Closed interval with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalView {
    pub lo: String,
    pub hi: String,
    pub width: f64,
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    // scale to keep precision for tiny or huge values
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() && d != 0.0 {
        return n / d;
    }
    let shift = r.denom().bits() as i64 - 60;
    let num = if shift > 0 {
        r.numer() >> shift as usize
    } else {
        r.numer() << (-shift) as usize
    };
    let den = if shift > 0 {
        r.denom() >> shift as usize
    } else {
        r.denom() << (-shift) as usize
    };
    num.to_f64().unwrap() / den.to_f64().unwrap()
}

/// Decimal expansion of a rational, rounded toward -inf (down) or +inf (up).
pub fn to_decimal(r: &BigRational, digits: usize, round_up: bool) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r.numer() * &scale;
    let (mut q, rem) = scaled.div_mod_floor(r.denom());
    if round_up && !rem.is_zero() {
        q += 1;
    }
    let neg = q.is_negative();
    let s = q.abs().to_string();
    let s = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

impl RationalInterval {
    pub fn point(v: BigRational) -> Self {
        RationalInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn lo_f64(&self) -> f64 {
        ratio_to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        ratio_to_f64(&self.hi)
    }

    pub fn width(&self) -> f64 {
        ratio_to_f64(&(&self.hi - &self.lo))
    }

    pub fn midpoint(&self) -> f64 {
        ratio_to_f64(&((&self.hi + &self.lo) / BigRational::from_integer(BigInt::from(2))))
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    /// Containment of an f64 value, testing with the exact binary value.
    pub fn contains_f64(&self, v: f64) -> bool {
        match BigRational::from_float(v) {
            Some(r) => self.contains(&r),
            None => false,
        }
    }

    pub fn overlaps(&self, o: &RationalInterval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn view(&self, digits: usize) -> IntervalView {
        IntervalView {
            lo: to_decimal(&self.lo, digits, false),
            hi: to_decimal(&self.hi, digits, true),
            width: self.width(),
        }
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            to_decimal(&self.lo, 12, false),
            to_decimal(&self.hi, 12, true)
        )
    }
}

/// Non-negative enclosure [lo, hi] · 2^-PREC, maintained with outward rounding.
#[derive(Debug, Clone)]
pub(crate) struct Enclosure {
    lo: BigInt,
    hi: BigInt,
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn unit() -> BigInt {
    BigInt::one() << PREC
}

impl Enclosure {
    pub fn one() -> Self {
        Enclosure {
            lo: unit(),
            hi: unit(),
        }
    }

    pub fn from_bounds(lo: BigInt, hi: BigInt) -> Self {
        Enclosure { lo, hi }
    }

    /// Multiply by the exact positive ratio num/den.
    pub fn mul_ratio(&mut self, num: &BigInt, den: &BigInt) {
        self.lo = (&self.lo * num).div_floor(den);
        self.hi = ceil_div(&(&self.hi * num), den);
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: (&self.lo * &o.lo) >> PREC,
            hi: ceil_div(&(&self.hi * &o.hi), &unit()),
        }
    }

    /// self / o for a strictly positive o.
    pub fn div(&self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: (&self.lo << PREC).div_floor(&o.hi),
            hi: ceil_div(&(&self.hi << PREC), &o.lo),
        }
    }

    pub fn clamp_lo_nonneg(&mut self) {
        if self.lo.is_negative() {
            self.lo = BigInt::zero();
        }
    }

    pub fn lo(&self) -> &BigInt {
        &self.lo
    }

    pub fn to_interval(&self) -> RationalInterval {
        let d = unit();
        RationalInterval {
            lo: BigRational::new(self.lo.clone(), d.clone()),
            hi: BigRational::new(self.hi.clone(), d),
        }
    }
}

/// log 2 = Σ_{j≥1} 1/(j 2^j); the tail after J terms is below 1/((J+1) 2^J).
pub(crate) fn log2_enclosure() -> Enclosure {
    let terms = PREC + 8;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for j in 1..=terms {
        let den = BigInt::from(j) << j;
        lo += unit().div_floor(&den);
        hi += ceil_div(&unit(), &den);
    }
    let tail = BigInt::from(terms + 1) << terms;
    hi += ceil_div(&unit(), &tail);
    Enclosure { lo, hi }
}

/// Upper bound for exp(y), y ≥ 0 given as a fixed-point numerator (ceil).
pub(crate) fn exp_upper(y: &BigInt) -> BigInt {
    assert!(!y.is_negative());
    // halve until y ≤ 2^-12
    let mut s = 0u32;
    let limit = BigInt::one() << (PREC - 12);
    let mut z = y.clone();
    while z > limit {
        z = ceil_div(&z, &BigInt::from(2));
        s += 1;
    }
    // Taylor sum with ceil rounding; remainder below 3 z^(J+1)/(J+1)!, far under one ulp
    let mut term = unit();
    let mut sum = unit();
    for j in 1..=40u32 {
        term = ceil_div(&(&term * &z), &(BigInt::from(j) << PREC));
        if term.is_zero() {
            break;
        }
        sum += &term;
    }
    sum += 2;
    for _ in 0..s {
        sum = ceil_div(&(&sum * &sum), &unit());
    }
    sum
}

/// Fixed-point ceil of a positive rational num/den.
pub(crate) fn fixed_ceil(num: &BigInt, den: &BigInt) -> BigInt {
    ceil_div(&(num << PREC), den)
}
