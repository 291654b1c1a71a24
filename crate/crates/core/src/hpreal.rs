//! High-precision reals with a certified absolute error bound.
//!
//! An [`HpReal`] is a ball `mid ± rad`: `mid` is a correctly rounded
//! multi-precision float and `rad` an `f64` upper bound on the distance to the
//! true value. Every operation widens the radius by the propagated input
//! error plus one ulp of rounding. A ball whose radius is infinite carries no
//! information; operations outside their domain (division by a ball that
//! contains zero, `ln` of a non-positive ball) produce one instead of
//! panicking.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: usize = 256;
pub const MIN_PRECISION: usize = 128;
/// Radii are `f64`; beyond this the one-ulp rounding term would underflow.
pub const MAX_PRECISION: usize = 960;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Rounds an f64 error term upward by a few f64 ulps.
fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (1.0 + 8.0 * f64::EPSILON) + f64::MIN_POSITIVE
    }
}

fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let (words, bits, sign, exp, _) = x.as_raw_parts().expect("finite number");
    // value = 0.m × 2^exp with the top word's MSB set.
    let top = *words.last().expect("nonempty mantissa") as f64;
    let second = if words.len() > 1 {
        words[words.len() - 2] as f64 / 2f64.powi(64)
    } else {
        0.0
    };
    let _ = bits;
    let m = (top + second) / 2f64.powi(64);
    let v = m * 2f64.powi(exp);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

fn bigint_to_big(n: &BigInt, prec: usize) -> BigFloat {
    let (sign, digits) = n.to_u64_digits();
    // Wide enough that every intermediate step is exact.
    let wide = 64 * (digits.len() + 2);
    let shift = BigFloat::from_u128(1u128 << 64, wide);
    let mut acc = BigFloat::from_u64(0, wide);
    for d in digits.iter().rev() {
        acc = acc.mul(&shift, wide, RM);
        acc = acc.add(&BigFloat::from_u64(*d, wide), wide, RM);
    }
    if sign == num_bigint::Sign::Minus {
        acc = -acc;
    }
    let _ = acc.set_precision(prec.max(64), RM);
    acc
}

/// Ball `mid ± rad` in multi-precision arithmetic.
#[derive(Clone)]
pub struct HpReal {
    mid: BigFloat,
    rad: f64,
    prec: usize,
}

impl HpReal {
    fn raw(mid: BigFloat, rad: f64, prec: usize) -> Self {
        let rad = if mid.is_nan() || mid.is_inf() || rad.is_nan() {
            f64::INFINITY
        } else {
            rad
        };
        Self { mid, rad, prec }
    }

    fn unbounded(prec: usize) -> Self {
        Self {
            mid: BigFloat::from_u64(0, prec),
            rad: f64::INFINITY,
            prec,
        }
    }

    /// One ulp of `v` at precision `prec` (zero if `v` was computed exactly).
    fn rounding(v: &BigFloat, prec: usize) -> f64 {
        if !v.inexact() || v.is_zero() {
            return 0.0;
        }
        let e = v.exponent().unwrap_or(0);
        up(2f64.powi(e + 1 - prec as i32))
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        Self::raw(BigFloat::from_i64(n, prec.max(64)), 0.0, prec)
    }

    /// Exact conversion of a double.
    pub fn from_f64(x: f64, prec: usize) -> Self {
        Self::raw(BigFloat::from_f64(x, prec.max(64)), 0.0, prec)
    }

    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        let mid = bigint_to_big(n, prec);
        let rad = Self::rounding(&mid, prec);
        Self::raw(mid, rad, prec)
    }

    pub fn from_rational(x: &BigRational, prec: usize) -> Self {
        let num = Self::from_bigint(x.numer(), prec);
        let den = Self::from_bigint(x.denom(), prec);
        &num / &den
    }

    /// A value known only to lie in `mid ± rad`.
    pub fn from_f64_with_error(mid: f64, rad: f64, prec: usize) -> Self {
        let mut v = Self::from_f64(mid, prec);
        v.rad = up(rad.abs());
        v
    }

    pub fn pi(prec: usize) -> Self {
        let mid = with_consts(|cc| cc.pi(prec, RM));
        let rad = up(2f64.powi(2 - prec as i32));
        Self::raw(mid, rad, prec)
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    /// Integer constant at this value's precision.
    pub fn int(&self, n: i64) -> Self {
        Self::from_i64(n, self.prec)
    }

    pub fn rat(&self, num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()), self.prec)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    /// Same ball, later operations carried out at `prec` bits.
    pub fn with_precision(&self, prec: usize) -> Self {
        let mut mid = self.mid.clone();
        if prec < self.prec {
            let _ = mid.set_precision(prec, RM);
            let extra = Self::rounding(&mid, prec);
            return Self::raw(mid, up(self.rad + extra), prec);
        }
        Self::raw(mid, self.rad, prec)
    }

    /// Certified absolute error bound.
    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn mid_f64(&self) -> f64 {
        big_to_f64(&self.mid)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid_f64()
    }

    pub fn is_bounded(&self) -> bool {
        self.rad.is_finite()
    }

    fn abs_upper(&self) -> f64 {
        up(self.mid_f64().abs() + self.rad)
    }

    fn abs_lower(&self) -> f64 {
        let m = self.mid_f64().abs() * (1.0 - 4.0 * f64::EPSILON);
        (m - self.rad).max(0.0)
    }

    pub fn lower_f64(&self) -> f64 {
        let m = self.mid_f64();
        m - m.abs() * 4.0 * f64::EPSILON - self.rad
    }

    pub fn upper_f64(&self) -> f64 {
        let m = self.mid_f64();
        m + m.abs() * 4.0 * f64::EPSILON + self.rad
    }

    pub fn is_positive(&self) -> bool {
        self.is_bounded() && self.mid.is_positive() && self.abs_lower() > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.is_bounded() && self.mid.is_negative() && self.abs_lower() > 0.0
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// `true` when the midpoints are identical (inputs were built from the
    /// same value).
    pub fn same_mid(&self, other: &Self) -> bool {
        self.mid.cmp(&other.mid) == Some(0)
    }

    /// Ordering of the midpoints.
    pub fn cmp_mid(&self, other: &Self) -> Ordering {
        match self.mid.cmp(&other.mid) {
            Some(c) if c < 0 => Ordering::Less,
            Some(0) => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// `true` when `|self - x| <= tol` is certain.
    pub fn within(&self, x: &HpReal, tol: f64) -> bool {
        let d = self - x;
        d.abs_upper() <= tol
    }

    /// Same midpoint, radius enlarged by `err`.
    pub fn widen(&self, err: f64) -> Self {
        Self::raw(self.mid.clone(), up(self.rad + err.abs()), self.prec)
    }

    pub fn abs(&self) -> Self {
        Self::raw(self.mid.abs(), self.rad, self.prec)
    }

    pub fn recip(&self) -> Self {
        self.one_like() / self
    }

    fn one_like(&self) -> Self {
        Self::one(self.prec)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn sqrt(&self) -> Self {
        let lo = self.abs_lower();
        if !self.is_positive() && !(self.mid.is_zero() && self.rad == 0.0) {
            return Self::unbounded(self.prec);
        }
        let mid = self.mid.sqrt(self.prec, RM);
        let prop = if self.rad == 0.0 { 0.0 } else { up(self.rad / lo.sqrt()) };
        let rad = up(prop + Self::rounding(&mid, self.prec));
        Self::raw(mid, rad, self.prec)
    }

    pub fn exp(&self) -> Self {
        let mid = with_consts(|cc| self.mid.exp(self.prec, RM, cc));
        let v = big_to_f64(&mid).abs();
        let prop = if self.rad == 0.0 {
            0.0
        } else {
            up(v * self.rad.exp_m1() * (1.0 + self.rad))
        };
        let rad = up(prop + Self::rounding(&mid, self.prec));
        Self::raw(mid, rad, self.prec)
    }

    pub fn ln(&self) -> Self {
        if !self.is_positive() {
            return Self::unbounded(self.prec);
        }
        let lo = self.abs_lower();
        let mid = with_consts(|cc| self.mid.ln(self.prec, RM, cc));
        let prop = if self.rad == 0.0 { 0.0 } else { up(self.rad / lo) };
        let rad = up(prop + Self::rounding(&mid, self.prec));
        Self::raw(mid, rad, self.prec)
    }

    /// Hyperbolic cotangent via `(1 + e^{-2x}) / (1 - e^{-2x})`, `x > 0`.
    pub fn coth(&self) -> Self {
        let e = (-(self * &self.int(2))).exp();
        &(&self.one_like() + &e) / &(&self.one_like() - &e)
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if !self.is_bounded() {
            return "unbounded".into();
        }
        let bits = ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 8;
        let mut m = self.mid.clone();
        let _ = m.set_precision(bits.max(64), RM);
        let s = with_consts(|cc| m.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into());
        trim_decimal(&s, digits)
    }
}

/// Cuts a scientific-notation string from astro-float down to `digits`
/// significant digits (truncating) and writes moderate exponents in fixed
/// notation.
fn trim_decimal(s: &str, digits: usize) -> String {
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (s, 0),
    };
    let (sign, body) = match mant.strip_prefix('-') {
        Some(b) => ("-", b),
        None => ("", mant),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let mut all: String = format!("{int}{frac}");
    let mut point = int.len() as i64 + exp;
    // Drop leading zeros (astro-float normalises, but be defensive).
    while all.len() > 1 && all.starts_with('0') {
        all.remove(0);
        point -= 1;
    }
    all.truncate(digits.max(1));
    if !(-5..=21).contains(&point) {
        let (h, t) = all.split_at(1);
        let t = if t.is_empty() { "0" } else { t };
        return format!("{sign}{h}.{t}e{}", point - 1);
    }
    let text = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), all)
    } else if point as usize >= all.len() {
        format!("{}{}", all, "0".repeat(point as usize - all.len()))
    } else {
        let (h, t) = all.split_at(point as usize);
        format!("{h}.{t}")
    };
    format!("{sign}{text}")
}

impl fmt::Debug for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.3e}", self.to_decimal(30), self.rad)
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(f.precision().unwrap_or(30)))
    }
}

impl Add for &HpReal {
    type Output = HpReal;

    fn add(self, rhs: &HpReal) -> HpReal {
        let prec = self.prec.max(rhs.prec);
        let mid = self.mid.add(&rhs.mid, prec, RM);
        let rad = up(self.rad + rhs.rad + HpReal::rounding(&mid, prec));
        HpReal::raw(mid, rad, prec)
    }
}

impl Sub for &HpReal {
    type Output = HpReal;

    fn sub(self, rhs: &HpReal) -> HpReal {
        let prec = self.prec.max(rhs.prec);
        let mid = self.mid.sub(&rhs.mid, prec, RM);
        let rad = up(self.rad + rhs.rad + HpReal::rounding(&mid, prec));
        HpReal::raw(mid, rad, prec)
    }
}

impl Mul for &HpReal {
    type Output = HpReal;

    fn mul(self, rhs: &HpReal) -> HpReal {
        let prec = self.prec.max(rhs.prec);
        let mid = self.mid.mul(&rhs.mid, prec, RM);
        let a = self.mid_f64().abs();
        let b = rhs.mid_f64().abs();
        let prop = if self.rad == 0.0 && rhs.rad == 0.0 {
            0.0
        } else {
            up(up(a * rhs.rad) + up(b * self.rad) + up(self.rad * rhs.rad))
        };
        let rad = up(prop + HpReal::rounding(&mid, prec));
        HpReal::raw(mid, rad, prec)
    }
}

impl Div for &HpReal {
    type Output = HpReal;

    fn div(self, rhs: &HpReal) -> HpReal {
        let prec = self.prec.max(rhs.prec);
        if rhs.contains_zero() {
            return HpReal::unbounded(prec);
        }
        let mid = self.mid.div(&rhs.mid, prec, RM);
        let a = self.mid_f64().abs();
        let b = rhs.abs_lower();
        let bm = rhs.mid_f64().abs();
        // |a/b - (a+da)/(b+db)| <= (|a| db + |b| da) / (|b| (|b| - db))
        let prop = if self.rad == 0.0 && rhs.rad == 0.0 {
            0.0
        } else {
            up((up(a * rhs.rad) + up(bm * self.rad)) / up(bm * b).max(f64::MIN_POSITIVE))
        };
        let rad = up(prop + HpReal::rounding(&mid, prec));
        HpReal::raw(mid, rad, prec)
    }
}

impl Neg for &HpReal {
    type Output = HpReal;

    fn neg(self) -> HpReal {
        HpReal::raw(-self.mid.clone(), self.rad, self.prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for HpReal {
            type Output = HpReal;

            fn $m(self, rhs: HpReal) -> HpReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&HpReal> for HpReal {
            type Output = HpReal;

            fn $m(self, rhs: &HpReal) -> HpReal {
                (&self).$m(rhs)
            }
        }
        impl $tr<HpReal> for &HpReal {
            type Output = HpReal;

            fn $m(self, rhs: HpReal) -> HpReal {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for HpReal {
    type Output = HpReal;

    fn neg(self) -> HpReal {
        -&self
    }
}
