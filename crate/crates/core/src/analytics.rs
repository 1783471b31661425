//! Closed-form compression ratios, flag lengths and the multi-round growth
//! model, all in exact rational arithmetic.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pit::{Radix, Width};

/// An exact fraction in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio(BigRational);

impl Ratio {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Ratio(BigRational::new(numer.into(), denom.into()))
    }

    pub fn integer(v: impl Into<BigInt>) -> Self {
        Ratio(BigRational::from_integer(v.into()))
    }

    pub fn one() -> Self {
        Ratio(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn pow(&self, exp: u32) -> Ratio {
        Ratio(Pow::pow(&self.0, exp))
    }

    /// Decimal rendering rounded half away from zero to `places` digits.
    pub fn to_decimal(&self, places: usize) -> String {
        let scale = BigInt::from(10u32).pow(places as u32);
        let scaled = self.0.numer().abs() * &scale;
        let (q, r) = scaled.div_rem(self.0.denom());
        let q = if r * 2u32 >= *self.0.denom() {
            q + 1u32
        } else {
            q
        };
        let digits = q.to_string();
        let sign = if self.0.is_negative() && !q.is_zero() {
            "-"
        } else {
            ""
        };
        if places == 0 {
            return format!("{sign}{digits}");
        }
        let padded = format!("{digits:0>width$}", width = places + 1);
        let (int, frac) = padded.split_at(padded.len() - places);
        format!("{sign}{int}.{frac}")
    }

    /// Lossy conversion, for display only.
    pub fn to_f64(&self) -> f64 {
        self.to_decimal(17).parse().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("not a fraction: {s:?}"));
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Ratio::new(n, d))
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

macro_rules! ratio_op {
    ($trait:ident, $method:ident) => {
        impl $trait for Ratio {
            type Output = Ratio;
            fn $method(self, rhs: Ratio) -> Ratio {
                Ratio($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Ratio> for &'a Ratio {
            type Output = Ratio;
            fn $method(self, rhs: &'a Ratio) -> Ratio {
                Ratio($trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

ratio_op!(Add, add);
ratio_op!(Sub, sub);
ratio_op!(Mul, mul);
ratio_op!(Div, div);

fn big(v: impl Into<BigInt>) -> BigInt {
    v.into()
}

fn pow(p: Radix, e: usize) -> BigInt {
    big(p.get()).pow(e as u32)
}

/// Clone 1: `(n p^n - (n+1) p^{n-1} + 1) / (n (p-1) p^{n-1})`.
pub fn ratio_clone1(p: Radix, n: Width) -> Ratio {
    let (pb, nb, n) = (big(p.get()), big(n.get()), n.get());
    let num = &nb * pow(p, n) - (&nb + 1) * pow(p, n - 1) + 1;
    let den = nb * (pb - 1) * pow(p, n - 1);
    Ratio::new(num, den)
}

/// Clone 2: `((n-1) p^{n-1} - n p^{n-2} + 1) / (n (p-1) p^{n-2})`.
pub fn ratio_clone2(p: Radix, n: Width) -> Result<Ratio> {
    let n = clone2_width(n)?;
    let (pb, nb) = (big(p.get()), big(n));
    let num = (&nb - 1) * pow(p, n - 1) - &nb * pow(p, n - 2) + 1;
    let den = nb * (pb - 1) * pow(p, n - 2);
    Ok(Ratio::new(num, den))
}

/// Clone 3:
/// `(n p^{n+2} - (2n+1) p^{n+1} + n p^n + n p^2 + (1-n) p) / (n p^n (p-1)^2)`.
pub fn ratio_clone3(p: Radix, n: Width) -> Ratio {
    let (pb, nb, n) = (big(p.get()), big(n.get()), n.get());
    let num = &nb * pow(p, n + 2) - (big(2) * &nb + 1) * pow(p, n + 1)
        + &nb * pow(p, n)
        + &nb * &pb * &pb
        + (big(1) - &nb) * &pb;
    let pm1 = &pb - 1;
    let den = nb * pow(p, n) * &pm1 * &pm1;
    Ratio::new(num, den)
}

/// Clone 1 flag length on the main file: `(p^{n+1} - p) / (p - 1)`.
pub fn flag_len_clone1(p: Radix, n: Width) -> BigInt {
    let pb = big(p.get());
    (pow(p, n.get() + 1) - &pb) / (pb - 1)
}

/// Clone 2 flag lengths on the main file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clone2Flags {
    /// `p^n`: one top pit per element.
    pub msb: BigInt,
    /// `(p^{n+2} - p^2) / (p - 1)` as printed.
    pub paper_len: BigInt,
    /// `(p^{n+1} - p^2) / (p - 1)`, the value conservation requires.
    pub corrected_len: BigInt,
}

pub fn flag_lens_clone2(p: Radix, n: Width) -> Result<Clone2Flags> {
    let n = clone2_width(n)?;
    let pb = big(p.get());
    let p2 = &pb * &pb;
    Ok(Clone2Flags {
        msb: pow(p, n),
        paper_len: (pow(p, n + 2) - &p2) / (&pb - 1),
        corrected_len: (pow(p, n + 1) - &p2) / (&pb - 1),
    })
}

/// Which closed form produced a clone-3 flag length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clone3FlagCase {
    /// `3 * 2^n - 2n - 2`.
    Binary,
    /// General radix, evaluated at the smallest `m` with `(p^m - 1)/(p - 1) >= n - 1`.
    General { m: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clone3Flag {
    pub value: BigInt,
    pub case: Clone3FlagCase,
}

pub fn flag_len_clone3(p: Radix, n: Width) -> Clone3Flag {
    let n = n.get();
    if p.get() == 2 {
        return Clone3Flag {
            value: big(3) * pow(p, n) - big(2 * n as u64) - 2,
            case: Clone3FlagCase::Binary,
        };
    }
    let pb = big(p.get());
    let target = big(n as u64 - 1);
    let mut m: u32 = 1;
    while (Pow::pow(&pb, m) - 1u32) / (&pb - 1u32) < target {
        m += 1;
    }
    // ((m-1) x^{m+1} - m x^m + x) / (x-1)^2 with x = p-1 is the integer
    // sum of i x^i for i < m.
    let x = &pb - 1u32;
    let xm1 = &pb - 2u32;
    let num = big(m - 1) * Pow::pow(&x, m + 1) - big(m) * Pow::pow(&x, m) + &x;
    let tail = num / (&xm1 * &xm1);
    Clone3Flag {
        value: pow(p, n) + tail,
        case: Clone3FlagCase::General { m },
    }
}

/// Growth of total pits per round: `(n+1)/n`.
pub fn expansion_factor(n: Width) -> Ratio {
    Ratio::new(n.get() as u64 + 1, n.get() as u64)
}

/// Extra pits per main-file pass: `p^n`.
pub fn delta_len(p: Radix, n: Width) -> BigInt {
    pow(p, n.get())
}

/// Total size after `m` rounds relative to the input, assuming every round
/// shrinks its remainder by `k`: `((kf-1) k^m + k - kf) / (k-1)`.
pub fn growth_after_rounds(k: &Ratio, kf: &Ratio, m: u32) -> Result<Ratio> {
    if m == 0 {
        return Err(Error::InvalidParams(
            "round count must be at least 1".into(),
        ));
    }
    let one = Ratio::one();
    if *k == one {
        return Err(Error::DegenerateRatio);
    }
    let num = &(&(kf - &one) * &k.pow(m)) + &(k - kf);
    Ok(&num / &(k - &one))
}

fn clone2_width(n: Width) -> Result<usize> {
    match n.get() {
        n if n >= 2 => Ok(n),
        n => Err(Error::UnsupportedWidth { clone: 2, width: n }),
    }
}

/// Every closed-form quantity for one `(p, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaSet {
    pub radix: Radix,
    pub width: Width,
    pub k1: Ratio,
    /// Absent for `n < 2`.
    pub k2: Option<Ratio>,
    pub k3: Ratio,
    pub lf_clone1: BigInt,
    pub lf_clone2: Option<Clone2Flags>,
    pub lf_clone3: Clone3Flag,
    pub kf: Ratio,
    pub delta_len: BigInt,
}

impl FormulaSet {
    pub fn evaluate(p: Radix, n: Width) -> Self {
        FormulaSet {
            radix: p,
            width: n,
            k1: ratio_clone1(p, n),
            k2: ratio_clone2(p, n).ok(),
            k3: ratio_clone3(p, n),
            lf_clone1: flag_len_clone1(p, n),
            lf_clone2: flag_lens_clone2(p, n).ok(),
            lf_clone3: flag_len_clone3(p, n),
            kf: expansion_factor(n),
            delta_len: delta_len(p, n),
        }
    }
}
