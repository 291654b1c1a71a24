//! Sharp bound constants and the special functions behind them.
//!
//! All values are [`HpReal`] balls. Polygamma functions use upward recurrence
//! to a large argument followed by the Bernoulli asymptotic expansion, whose
//! truncation error is bounded by twice the first omitted term. ζ(s) uses
//! Euler–Maclaurin summation with the same remainder rule.
//!
//! Near-coincident or near-zero arguments are evaluated from the generic
//! closed form at a working precision raised by the number of bits lost to
//! cancellation; exact coincidences use the limit formulas.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactnum::rational_to_f64;
use crate::hpreal::MAX_PRECISION;
use crate::{Error, HpReal, Result};

/// Largest Bernoulli index kept in the cache.
const BERNOULLI_MAX: usize = 200;

fn bernoulli_table() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut b: Vec<BigRational> = Vec::with_capacity(BERNOULLI_MAX + 1);
        b.push(BigRational::one());
        // binom[k] = C(m+1, k), rebuilt per row.
        let mut row: Vec<BigInt> = vec![BigInt::one(), BigInt::one()];
        for m in 1..=BERNOULLI_MAX {
            let mut next = vec![BigInt::one(); m + 2];
            for k in 1..=m {
                next[k] = &row[k - 1] + &row[k];
            }
            row = next;
            if m >= 3 && m % 2 == 1 {
                b.push(BigRational::zero());
                continue;
            }
            let mut s = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                if !bk.is_zero() {
                    s += BigRational::from_integer(row[k].clone()) * bk;
                }
            }
            b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b
    })
}

/// Bernoulli number `B_n` (with `B_1 = -1/2`), exact.
pub fn bernoulli(n: usize) -> Result<BigRational> {
    bernoulli_table()
        .get(n)
        .cloned()
        .ok_or(Error::IndexOutOfRange {
            index: n,
            max: BERNOULLI_MAX,
        })
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn ensure_bounded(x: HpReal, what: &str) -> Result<HpReal> {
    if x.is_bounded() {
        Ok(x)
    } else {
        Err(Error::Numerical(format!("{what}: no error bound at this precision")))
    }
}

/// Working precision that absorbs cancellation across the given gaps.
fn raised(prec: usize, gaps: &[f64]) -> usize {
    let lost: f64 = gaps
        .iter()
        .map(|g| {
            let g = g.abs();
            if g == 0.0 {
                0.0
            } else {
                (-g.log2()).max(0.0)
            }
        })
        .sum();
    (prec + lost.ceil() as usize + 16).min(MAX_PRECISION)
}

/// Is the ball exactly the integer `n`?
fn is_exactly(x: &HpReal, n: i64) -> bool {
    x.rad() == 0.0 && x.same_mid(&x.int(n))
}

enum Relation {
    Identical,
    Distinct,
}

fn relation(a: &HpReal, b: &HpReal) -> Result<Relation> {
    if a.rad() == 0.0 && b.rad() == 0.0 && a.same_mid(b) {
        return Ok(Relation::Identical);
    }
    if (a - b).contains_zero() {
        return Err(Error::Numerical(
            "arguments indistinguishable at this precision".into(),
        ));
    }
    Ok(Relation::Distinct)
}

/// Polygamma function `ψ^{(m)}(x)` for `x > 0`; `m = 0` is the digamma
/// function.
pub fn polygamma(m: u32, x: &HpReal) -> Result<HpReal> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("polygamma pole or negative argument: {x}")));
    }
    let prec = x.precision();
    let m_us = m as usize;
    let z0 = (0.2 * prec as f64).max(32.0);
    let shift = (z0 - x.mid_f64()).ceil().max(0.0) as i64;

    // ψ^{(m)}(x) = ψ^{(m)}(x+L) − (−1)^m m! Σ_{j<L} (x+j)^{−m−1}
    let mut recur = HpReal::zero(prec);
    for j in 0..shift {
        let xj = x + &x.int(j);
        recur = &recur + &xj.powi(m + 1).recip();
    }
    let mfact = HpReal::from_bigint(&factorial(m_us), prec);
    recur = &recur * &mfact;
    if m % 2 == 1 {
        recur = -recur;
    }

    let z = x + &x.int(shift);
    let zf = z.lower_f64();
    let inv = z.recip();
    let inv2 = &inv * &inv;
    let target = -(prec as f64 + 10.0) * std::f64::consts::LN_2;

    // Leading part and the Bernoulli sum, both with the sign (−1)^{m+1}
    // folded in at the end (digamma handled separately).
    let mut acc;
    let mut pw; // z^{−(2k+m)} at loop entry for k = 1
    if m == 0 {
        acc = &z.ln() - &(&inv / &x.int(2));
        pw = inv2.clone();
    } else {
        let lead = &HpReal::from_bigint(&factorial(m_us - 1), prec) * &inv.powi(m);
        let second = &(&mfact / &x.int(2)) * &inv.powi(m + 1);
        acc = &lead + &second;
        pw = &inv.powi(m) * &inv2;
    }
    let mut omitted = None;
    for k in 1..=BERNOULLI_MAX / 2 {
        let b = bernoulli(2 * k)?;
        // c_k = B_{2k} (2k+m−1)! / (2k)!  (digamma: B_{2k} / (2k))
        let c = if m == 0 {
            b.clone() / BigRational::from_integer(BigInt::from(2 * k))
        } else {
            b.clone() * BigRational::new(factorial(2 * k + m_us - 1), factorial(2 * k))
        };
        let log_mag = rational_to_f64(&b).abs().ln() + ln_factorial(2 * k + m_us.max(1) - 1)
            - ln_factorial(2 * k)
            - (2 * k + m_us) as f64 * zf.ln();
        if log_mag < target {
            omitted = Some(2.0 * log_mag.exp());
            break;
        }
        let term = &HpReal::from_rational(&c, prec) * &pw;
        acc = if m == 0 { &acc - &term } else { &acc + &term };
        pw = &pw * &inv2;
    }
    let omitted = omitted.ok_or_else(|| {
        Error::Numerical(format!("polygamma({m}) asymptotic series did not converge"))
    })?;
    let asym = if m == 0 || m % 2 == 1 { acc } else { -acc };
    let value = (&asym - &recur).widen(omitted);
    ensure_bounded(value, "polygamma")
}

pub fn digamma(x: &HpReal) -> Result<HpReal> {
    polygamma(0, x)
}

pub fn trigamma(x: &HpReal) -> Result<HpReal> {
    polygamma(1, x)
}

/// Euler's constant γ = −ψ(1).
pub fn euler_gamma(prec: usize) -> Result<HpReal> {
    Ok(-digamma(&HpReal::one(prec))?)
}

/// Riemann zeta function for real `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: &HpReal) -> Result<HpReal> {
    let prec = s.precision();
    let one = HpReal::one(prec);
    let sm1 = s - &one;
    if !sm1.is_positive() {
        return Err(Error::Domain(format!("zeta needs s > 1, got {s}")));
    }
    let m = (0.2 * prec as f64).max(32.0) as i64;
    let integer_s = (0..=64).find(|&n| is_exactly(s, n));
    let pow_neg = |n: i64| -> HpReal {
        let base = s.int(n);
        match integer_s {
            Some(k) => base.powi(k as u32).recip(),
            None => (-(s * &base.ln())).exp(),
        }
    };
    let mut sum = HpReal::zero(prec);
    for n in (1..m).rev() {
        sum = &sum + &pow_neg(n);
    }
    let mm = s.int(m);
    let m_s = pow_neg(m);
    sum = &sum + &(&(&m_s * &mm) / &sm1);
    sum = &sum + &(&m_s / &s.int(2));

    // Σ_k B_{2k}/(2k)! · s(s+1)…(s+2k−2) · M^{−s−2k+1}
    let inv_m = mm.recip();
    let inv_m2 = &inv_m * &inv_m;
    let mut rising = s.clone(); // s(s+1)…(s+2k−2)
    let mut pw = &m_s * &inv_m; // M^{−s−1}
    let target = -(prec as f64 + 10.0) * std::f64::consts::LN_2;
    let sf = s.upper_f64();
    let mut omitted = None;
    for k in 1..=BERNOULLI_MAX / 2 {
        let b = bernoulli(2 * k)?;
        let log_rising: f64 = (0..(2 * k - 1)).map(|i| (sf + i as f64).ln()).sum();
        let log_mag = rational_to_f64(&b).abs().ln() - ln_factorial(2 * k) + log_rising
            - (s.lower_f64() + 2.0 * k as f64 - 1.0) * (m as f64).ln();
        if log_mag < target {
            omitted = Some(2.0 * log_mag.exp());
            break;
        }
        let c = b / BigRational::from_integer(factorial(2 * k));
        sum = &sum + &(&(&HpReal::from_rational(&c, prec) * &rising) * &pw);
        let a = s + &s.int(2 * k as i64 - 1);
        let b2 = s + &s.int(2 * k as i64);
        rising = &(&rising * &a) * &b2;
        pw = &pw * &inv_m2;
    }
    let omitted =
        omitted.ok_or_else(|| Error::Numerical("zeta Euler–Maclaurin did not converge".into()))?;
    ensure_bounded(sum.widen(omitted), "zeta")
}

fn check_gt_minus_one(x: &HpReal, name: &str) -> Result<()> {
    if (x + &x.int(1)).is_positive() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must exceed -1, got {x}")))
    }
}

/// `A_α = Σ 1/(n(n+α)) = (ψ(1+α) − ψ(1))/α`, `α > −1`; `A_0 = π²/6`.
pub fn a_const(alpha: &HpReal) -> Result<HpReal> {
    check_gt_minus_one(alpha, "alpha")?;
    let prec = alpha.precision();
    if is_exactly(alpha, 0) {
        return trigamma(&HpReal::one(prec));
    }
    if alpha.contains_zero() {
        return Err(Error::Numerical("alpha indistinguishable from 0".into()));
    }
    let wp = raised(prec, &[alpha.mid_f64()]);
    let a = alpha.with_precision(wp);
    let one = HpReal::one(wp);
    let v = &(&digamma(&(&one + &a))? - &digamma(&one)?) / &a;
    ensure_bounded(v.with_precision(prec), "A")
}

/// `B_α = Σ 1/(n²+α²) = (πα coth πα − 1)/(2α²)`, `α > 0`.
pub fn b_const(alpha: &HpReal) -> Result<HpReal> {
    if !alpha.is_positive() {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let prec = alpha.precision();
    let g = alpha.mid_f64();
    let wp = raised(prec, &[g, g * g]);
    let a = alpha.with_precision(wp);
    let pa = &HpReal::pi(wp) * &a;
    let num = &(&pa * &pa.coth()) - &HpReal::one(wp);
    let v = &num / &(&(&a * &a) * &a.int(2));
    ensure_bounded(v.with_precision(prec), "B")
}

/// `C_{α,β} = Σ 1/((n+α)(n+β)) = (ψ(1+β) − ψ(1+α))/(β − α)`; `ψ′(1+α)` when
/// `α = β`.
pub fn c_const(alpha: &HpReal, beta: &HpReal) -> Result<HpReal> {
    check_gt_minus_one(alpha, "alpha")?;
    check_gt_minus_one(beta, "beta")?;
    let prec = alpha.precision().max(beta.precision());
    let v = match relation(alpha, beta)? {
        Relation::Identical => trigamma(&(&HpReal::one(prec) + alpha))?,
        Relation::Distinct => {
            let wp = raised(prec, &[(beta - alpha).mid_f64()]);
            let (a, b) = (alpha.with_precision(wp), beta.with_precision(wp));
            let one = HpReal::one(wp);
            &(&digamma(&(&one + &b))? - &digamma(&(&one + &a))?) / &(&b - &a)
        }
    };
    ensure_bounded(v.with_precision(prec), "C")
}

/// `D_{α,β} = Σ 1/(n(n+α)(n+β))` with its four closed-form branches.
pub fn d_const(alpha: &HpReal, beta: &HpReal) -> Result<HpReal> {
    check_gt_minus_one(alpha, "alpha")?;
    check_gt_minus_one(beta, "beta")?;
    let prec = alpha.precision().max(beta.precision());
    let az = is_exactly(alpha, 0);
    let bz = is_exactly(beta, 0);
    let v = match (az, bz) {
        (true, true) => zeta(&HpReal::from_i64(3, prec))?,
        (true, false) | (false, true) => {
            let x = if az { beta } else { alpha };
            if x.contains_zero() {
                return Err(Error::Numerical("argument indistinguishable from 0".into()));
            }
            let wp = raised(prec, &[x.mid_f64()]);
            let x = x.with_precision(wp);
            let z2 = zeta(&HpReal::from_i64(2, wp))?;
            &(&z2 - &a_const(&x)?) / &x
        }
        (false, false) => {
            if alpha.contains_zero() || beta.contains_zero() {
                return Err(Error::Numerical("argument indistinguishable from 0".into()));
            }
            match relation(alpha, beta)? {
                Relation::Identical => {
                    let wp = raised(prec, &[alpha.mid_f64(), alpha.mid_f64()]);
                    let a = alpha.with_precision(wp);
                    let one = HpReal::one(wp);
                    let pa = digamma(&(&one + &a))?;
                    let first = &(&pa - &digamma(&one)?) / &(&a * &a);
                    &first - &(&trigamma(&(&one + &a))? / &a)
                }
                Relation::Distinct => {
                    let (g1, g2) = (alpha.mid_f64(), beta.mid_f64());
                    let wp = raised(prec, &[g1, g2, g2 - g1]);
                    let (a, b) = (alpha.with_precision(wp), beta.with_precision(wp));
                    let one = HpReal::one(wp);
                    let pa = &digamma(&(&one + &a))? / &a;
                    let pb = &digamma(&(&one + &b))? / &b;
                    let psi1 = digamma(&one)?;
                    -(&(&(&pb - &pa) / &(&b - &a)) + &(&psi1 / &(&a * &b)))
                }
            }
        }
    };
    ensure_bounded(v.with_precision(prec), "D")
}

/// `E_{α,β} = Σ n/((n+α)²(n+β)) = (β C_{α,β} − α C_{α,α})/(β − α)`;
/// `ψ′(1+α) + (α/2) ψ″(1+α)` when `α = β`. Both arguments must be nonzero.
pub fn e_const(alpha: &HpReal, beta: &HpReal) -> Result<HpReal> {
    check_gt_minus_one(alpha, "alpha")?;
    check_gt_minus_one(beta, "beta")?;
    if alpha.contains_zero() || beta.contains_zero() {
        return Err(Error::Domain("E needs nonzero alpha and beta".into()));
    }
    let prec = alpha.precision().max(beta.precision());
    let v = match relation(alpha, beta)? {
        Relation::Identical => {
            let x = &HpReal::one(prec) + alpha;
            let half = &(alpha / &alpha.int(2)) * &polygamma(2, &x)?;
            &trigamma(&x)? + &half
        }
        Relation::Distinct => {
            let wp = raised(prec, &[(beta - alpha).mid_f64()]);
            let (a, b) = (alpha.with_precision(wp), beta.with_precision(wp));
            let cab = c_const(&a, &b)?;
            let caa = c_const(&a, &a)?;
            &(&(&b * &cab) - &(&a * &caa)) / &(&b - &a)
        }
    };
    ensure_bounded(v.with_precision(prec), "E")
}

/// The two extra sharp constants `ζ(3) − 1` and `(18 − π² − 6ζ(3))/6`.
pub fn zeta_tail_constants(prec: usize) -> Result<(HpReal, HpReal)> {
    let z3 = zeta(&HpReal::from_i64(3, prec))?;
    let pi = HpReal::pi(prec);
    let first = &z3 - &HpReal::one(prec);
    let inner = &(&HpReal::from_i64(18, prec) - &(&pi * &pi)) - &(&z3 * &z3.int(6));
    Ok((first, &inner / &z3.int(6)))
}

/// The printed closed form `(20/19²)(1 − γ − ψ(21/20)) − (20/19)(π²/6 − 1)`
/// for `E_{1,1/20}`. It evaluates to `−E_{1,1/20}`; kept as a diagnostic.
pub fn e_1_20_printed_form(prec: usize) -> Result<HpReal> {
    let one = HpReal::one(prec);
    let gamma = euler_gamma(prec)?;
    let psi = digamma(&one.rat(21, 20))?;
    let pi = HpReal::pi(prec);
    let first = &one.rat(20, 361) * &(&(&one - &gamma) - &psi);
    let second = &one.rat(20, 19) * &(&(&(&pi * &pi) / &one.int(6)) - &one);
    Ok(&first - &second)
}

/// `2/√3`, the parameter of the `n/(n²+4/3)` weight.
pub fn two_over_sqrt3(prec: usize) -> HpReal {
    &HpReal::from_i64(2, prec) / &HpReal::from_i64(3, prec).sqrt()
}

/// One row of the constants table.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantEntry {
    pub name: String,
    /// Decimal midpoint.
    pub value: String,
    /// Certified absolute error bound.
    pub error: f64,
    /// Defining series or closed form.
    pub definition: String,
    #[serde(skip)]
    pub ball: HpReal,
}

fn entry(name: &str, definition: &str, ball: HpReal, digits: usize) -> ConstantEntry {
    ConstantEntry {
        name: name.into(),
        value: ball.to_decimal(digits),
        error: ball.rad(),
        definition: definition.into(),
        ball,
    }
}

/// All named constants at `prec` bits, printed with `digits` significant
/// digits.
pub fn table(prec: usize, digits: usize) -> Result<Vec<ConstantEntry>> {
    let h = HpReal::one(prec);
    let r = |n, d| h.rat(n, d);
    let pi = HpReal::pi(prec);
    let (c1, c2) = zeta_tail_constants(prec)?;
    let rows = vec![
        entry("A(0)", "sum 1/n^2 = pi^2/6", a_const(&r(0, 1))?, digits),
        entry("A(1)", "sum 1/(n(n+1)) = 1", a_const(&r(1, 1))?, digits),
        entry("A(2)", "sum 1/(n(n+2)) = 3/4", a_const(&r(2, 1))?, digits),
        entry("A(3)", "sum 1/(n(n+3)) = 11/18", a_const(&r(3, 1))?, digits),
        entry("A(1/2)", "sum 1/(n(n+1/2)) = 4(1-log 2)", a_const(&r(1, 2))?, digits),
        entry("A(-1/2)", "sum 1/(n(n-1/2)) = 4 log 2", a_const(&r(-1, 2))?, digits),
        entry("B(1)", "sum 1/(n^2+1) = (pi coth pi - 1)/2", b_const(&r(1, 1))?, digits),
        entry("B(2/sqrt3)", "sum 1/(n^2+4/3)", b_const(&two_over_sqrt3(prec))?, digits),
        entry("C(1/2,-1/2)", "sum 1/((n+1/2)(n-1/2)) = 2", c_const(&r(1, 2), &r(-1, 2))?, digits),
        entry("C(1/2,1)", "sum 1/((n+1/2)(n+1)) = 2(2 log 2 - 1)", c_const(&r(1, 2), &r(1, 1))?, digits),
        entry("C(1,1)", "sum 1/(n+1)^2 = pi^2/6 - 1", c_const(&r(1, 1), &r(1, 1))?, digits),
        entry("D(1,2)", "sum 1/(n(n+1)(n+2)) = 1/4", d_const(&r(1, 1), &r(2, 1))?, digits),
        entry("D(1,1)", "sum 1/(n(n+1)^2) = 2 - pi^2/6", d_const(&r(1, 1), &r(1, 1))?, digits),
        entry("D(0,0)", "sum 1/n^3 = zeta(3)", d_const(&r(0, 1), &r(0, 1))?, digits),
        entry("E(1,1/20)", "sum n/((n+1)^2(n+1/20))", e_const(&r(1, 1), &r(1, 20))?, digits),
        entry("zeta(2)", "sum 1/n^2", zeta(&r(2, 1))?, digits),
        entry("zeta(3)", "sum 1/n^3", zeta(&r(3, 1))?, digits),
        entry("zeta(3)-1", "sum 1/(n+1)^3", c1, digits),
        entry("(18-pi^2-6zeta(3))/6", "sum 1/(n(n+1)^3)", c2, digits),
        entry("pi", "pi", pi, digits),
        entry("euler_gamma", "-psi(1)", euler_gamma(prec)?, digits),
        entry(
            "E(1,1/20) printed form",
            "(20/19^2)(1-gamma-psi(21/20)) - (20/19)(pi^2/6-1); sign-flipped E(1,1/20)",
            e_1_20_printed_form(prec)?,
            digits,
        ),
    ];
    Ok(rows)
}
