//! Scalar abstraction shared by the exact-rational and floating arithmetic modes.
//!
//! Every identity that holds exactly (normalization, consistency, coherency,
//! Radon-Nikodym ratios) is evaluated generically over [`Scalar`], so the same
//! code path runs with [`Rational`] in tests and with `f64` in samplers.

use std::fmt::{self, Debug, Display};
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used by the exact arithmetic mode.
pub type Rational = BigRational;

/// Arithmetic mode selected per call by the drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown arithmetic mode '{other}'"))),
        }
    }
}

impl Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

pub trait Scalar:
    Num + Clone + Debug + PartialOrd + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_biguint(v: &BigUint) -> Self;

    fn to_f64(&self) -> f64;

    /// Slack allowed when checking `sum <= 1` style constraints.
    fn constraint_slack() -> Self;

    fn from_bigint(v: &BigInt) -> Self {
        let m = Self::from_biguint(v.magnitude());
        if v.sign() == num_bigint::Sign::Minus {
            -m
        } else {
            m
        }
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Integer power with `0^0 = 1`.
    fn powi(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Signed integer power; negative exponents invert.
    fn powi_signed(&self, exp: i64) -> Self {
        let p = self.powi(exp.unsigned_abs() as u32);
        if exp < 0 {
            Self::one() / p
        } else {
            p
        }
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_biguint(v: &BigUint) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn constraint_slack() -> Self {
        1e-12
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_biguint(v: &BigUint) -> Self {
        Rational::from_integer(BigInt::from(v.clone()))
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn constraint_slack() -> Self {
        Rational::zero()
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }
}

/// Converts a big rational to the nearest-ish double, robust to huge numerators
/// and denominators (plain `to_f64` on both halves overflows past 1e308).
pub fn ratio_to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let (n, d) = (r.numer(), r.denom());
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b != 0.0 => a / b,
        _ => {
            let shift_n = n.bits().saturating_sub(60);
            let shift_d = d.bits().saturating_sub(60);
            let a = (n >> shift_n).to_f64().unwrap_or(0.0);
            let b = (d >> shift_d).to_f64().unwrap_or(1.0);
            a / b * 2f64.powi(shift_n as i32 - shift_d as i32)
        }
    }
}

/// Parses "p/q", "p" or a finite decimal ("0.25") into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("bad rational '{s}'")));
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad rational '{s}'")));
    }
    let numer: BigInt = digits.parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Rising factorial `t (t+1) ... (t+n-1)`; the empty product is 1.
pub fn rising_factorial<T: Scalar>(t: &T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, k| acc * (t.clone() + T::from_i64(k as i64)))
}

/// `n!` as an exact integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn rational_from_int(v: &BigInt) -> Rational {
    Rational::from_integer(v.clone())
}
