//! Weight sequences `p_n`, their differences, and convexity certificates.
//!
//! `q_n = p_n − p_{n+1}` and `λ_n = q_n − q_{n+1}`. Families are validated at
//! construction so evaluation is total. The tail condition `λ_n ≥ 0` for all
//! large `n` is discharged analytically: either by the family's parameter
//! predicate, or by certifying that the numerator of `φ″` (with `p_n = φ(n)`)
//! has no real roots on `[N₀, ∞)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::constants;
use crate::exactnum::{count_roots_between, parse_rational, rat, rational_to_f64, Bound};
use crate::hpreal::{HpReal, MIN_PRECISION};
use crate::{Error, RatPoly, Result};

/// Exact-window length used to cross-check analytic tail thresholds.
pub const TAIL_WINDOW: u64 = 64;
/// Distance to the boundary below which the logarithmic predicate is
/// reported indeterminate.
pub const LOG_PREDICATE_BAND: f64 = 1e-20;

type Evaluator = Arc<dyn Fn(u64) -> BigRational + Send + Sync>;

/// Caller-supplied exact weight.
#[derive(Clone)]
pub struct CustomWeight {
    pub name: String,
    eval: Evaluator,
}

impl fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomWeight({})", self.name)
    }
}

/// The parametrised shapes. Read through [`WeightFamily::shape`]; build with
/// the validating constructors.
#[derive(Clone, Debug)]
pub enum Shape {
    /// `1/(n+α)`
    Reciprocal { alpha: BigRational },
    /// `n/(n²+an+b)`
    RatQuadNum { a: BigRational, b: BigRational },
    /// `n/((n+α)(n+β))`
    TwoFactorNum { alpha: BigRational, beta: BigRational },
    /// `1/(n²+an+b)`
    InvQuad { a: BigRational, b: BigRational },
    /// `1/((n+α)(n+β))`
    InvTwoFactor { alpha: BigRational, beta: BigRational },
    /// `n²/((n+α)²(n+β))`
    SquaredFactor { alpha: BigRational, beta: BigRational },
    /// `(n+α) rⁿ`
    GeomShift { alpha: BigRational, r: BigRational },
    /// `r^{2n}`
    Geometric { r: BigRational },
    /// `n^{−α}`; not rational-valued.
    PowerLaw { alpha: HpReal, text: String },
    Custom(CustomWeight),
}

/// A positive weight sequence `p_n`, `n ≥ 1`.
#[derive(Clone, Debug)]
pub struct WeightFamily(Shape);

/// Outcome of a parameter predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convexity {
    Holds,
    Fails,
    Indeterminate,
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

fn nq(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `x² + a x + b > 0` at every integer `x ≥ 1`.
fn quadratic_positive_on_integers(a: &BigRational, b: &BigRational) -> bool {
    let at = |x: &BigRational| x * x + a * x + b;
    if !at(&q(1)).is_positive() {
        return false;
    }
    let vertex = -a / q(2);
    if vertex <= q(1) {
        return true;
    }
    let lo = vertex.floor();
    let hi = vertex.ceil();
    at(&lo).is_positive() && at(&hi).is_positive()
}

fn gt_minus_one(x: &BigRational, name: &str) -> Result<()> {
    if x > &q(-1) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must exceed -1")))
    }
}

fn in_unit_interval(r: &BigRational) -> Result<()> {
    if r.is_positive() && r < &q(1) {
        Ok(())
    } else {
        Err(Error::Domain("r must lie in (0, 1)".into()))
    }
}

/// Compact rendering: `"3"` for integers, `"4/3"` otherwise.
fn short(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl WeightFamily {
    pub fn reciprocal(alpha: BigRational) -> Result<Self> {
        gt_minus_one(&alpha, "alpha")?;
        Ok(Self(Shape::Reciprocal { alpha }))
    }

    pub fn rat_quad_num(a: BigRational, b: BigRational) -> Result<Self> {
        if !quadratic_positive_on_integers(&a, &b) {
            return Err(Error::Domain("n² + an + b must be positive for n ≥ 1".into()));
        }
        Ok(Self(Shape::RatQuadNum { a, b }))
    }

    pub fn two_factor_num(alpha: BigRational, beta: BigRational) -> Result<Self> {
        gt_minus_one(&alpha, "alpha")?;
        gt_minus_one(&beta, "beta")?;
        Ok(Self(Shape::TwoFactorNum { alpha, beta }))
    }

    pub fn inv_quad(a: BigRational, b: BigRational) -> Result<Self> {
        if !quadratic_positive_on_integers(&a, &b) {
            return Err(Error::Domain("n² + an + b must be positive for n ≥ 1".into()));
        }
        Ok(Self(Shape::InvQuad { a, b }))
    }

    pub fn inv_two_factor(alpha: BigRational, beta: BigRational) -> Result<Self> {
        gt_minus_one(&alpha, "alpha")?;
        gt_minus_one(&beta, "beta")?;
        Ok(Self(Shape::InvTwoFactor { alpha, beta }))
    }

    pub fn squared_factor(alpha: BigRational, beta: BigRational) -> Result<Self> {
        gt_minus_one(&alpha, "alpha")?;
        gt_minus_one(&beta, "beta")?;
        Ok(Self(Shape::SquaredFactor { alpha, beta }))
    }

    pub fn geom_shift(alpha: BigRational, r: BigRational) -> Result<Self> {
        gt_minus_one(&alpha, "alpha")?;
        in_unit_interval(&r)?;
        Ok(Self(Shape::GeomShift { alpha, r }))
    }

    pub fn geometric(r: BigRational) -> Result<Self> {
        in_unit_interval(&r)?;
        Ok(Self(Shape::Geometric { r }))
    }

    /// `n^{−α}` with `α > 0`, carried at `prec` bits.
    pub fn power_law(alpha: &BigRational, prec: usize) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::Domain("power-law alpha must be positive".into()));
        }
        Ok(Self(Shape::PowerLaw {
            alpha: HpReal::from_rational(alpha, prec.max(MIN_PRECISION)),
            text: short(alpha),
        }))
    }

    /// Exact weight from a caller-supplied evaluator. The caller is
    /// responsible for positivity.
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(u64) -> BigRational + Send + Sync + 'static,
    ) -> Self {
        Self(Shape::Custom(CustomWeight {
            name: name.into(),
            eval: Arc::new(eval),
        }))
    }

    pub fn shape(&self) -> &Shape {
        &self.0
    }

    /// `true` when every `p_n` is an exact rational.
    pub fn is_rational(&self) -> bool {
        !matches!(self.0, Shape::PowerLaw { .. })
    }

    /// Exact `p_n`, `n ≥ 1`.
    pub fn p_exact(&self, n: u64) -> Result<BigRational> {
        if n == 0 {
            return Err(Error::Domain("weights are indexed from n = 1".into()));
        }
        let x = nq(n);
        Ok(match &self.0 {
            Shape::Reciprocal { alpha } => (x + alpha).recip(),
            Shape::RatQuadNum { a, b } => &x / (&x * &x + a * &x + b),
            Shape::TwoFactorNum { alpha, beta } => &x / ((&x + alpha) * (&x + beta)),
            Shape::InvQuad { a, b } => (&x * &x + a * &x + b).recip(),
            Shape::InvTwoFactor { alpha, beta } => ((&x + alpha) * (&x + beta)).recip(),
            Shape::SquaredFactor { alpha, beta } => {
                let s = &x + alpha;
                &x * &x / (&s * &s * (&x + beta))
            }
            Shape::GeomShift { alpha, r } => (&x + alpha) * num_traits::pow(r.clone(), n as usize),
            Shape::Geometric { r } => num_traits::pow(r.clone(), 2 * n as usize),
            Shape::PowerLaw { .. } => {
                return Err(Error::NotRational("power-law weights are irrational".into()))
            }
            Shape::Custom(c) => (c.eval)(n),
        })
    }

    /// `p_n` as a ball at `prec` bits.
    pub fn p_hp(&self, n: u64, prec: usize) -> Result<HpReal> {
        match &self.0 {
            Shape::PowerLaw { alpha, .. } => {
                if n == 0 {
                    return Err(Error::Domain("weights are indexed from n = 1".into()));
                }
                let a = alpha.with_precision(prec);
                let ln = HpReal::from_i64(n as i64, prec).ln();
                Ok((-(&a * &ln)).exp())
            }
            _ => Ok(HpReal::from_rational(&self.p_exact(n)?, prec)),
        }
    }

    pub fn p_f64(&self, n: u64) -> Result<f64> {
        match &self.0 {
            Shape::PowerLaw { alpha, .. } => Ok((n as f64).powf(-alpha.mid_f64())),
            _ => Ok(rational_to_f64(&self.p_exact(n)?)),
        }
    }

    /// `φ = num/den` with `p_n = φ(n)`, for the families rational in `n`.
    pub fn rational_form(&self) -> Option<(RatPoly, RatPoly)> {
        let x = RatPoly::x();
        let lin = |c: &BigRational| &x + &RatPoly::constant(c.clone());
        let quad = |a: &BigRational, b: &BigRational| {
            RatPoly::new(vec![b.clone(), a.clone(), q(1)])
        };
        match &self.0 {
            Shape::Reciprocal { alpha } => Some((RatPoly::one(), lin(alpha))),
            Shape::RatQuadNum { a, b } => Some((x.clone(), quad(a, b))),
            Shape::TwoFactorNum { alpha, beta } => Some((x.clone(), &lin(alpha) * &lin(beta))),
            Shape::InvQuad { a, b } => Some((RatPoly::one(), quad(a, b))),
            Shape::InvTwoFactor { alpha, beta } => {
                Some((RatPoly::one(), &lin(alpha) * &lin(beta)))
            }
            Shape::SquaredFactor { alpha, beta } => {
                Some((&x * &x, &lin(alpha).pow(2) * &lin(beta)))
            }
            _ => None,
        }
    }

    /// Compact text form accepted by [`FromStr`].
    pub fn spec(&self) -> String {
        match &self.0 {
            Shape::Reciprocal { alpha } => format!("reciprocal:alpha={}", short(alpha)),
            Shape::RatQuadNum { a, b } => format!("ratquadnum:a={},b={}", short(a), short(b)),
            Shape::TwoFactorNum { alpha, beta } => {
                format!("twofactornum:alpha={},beta={}", short(alpha), short(beta))
            }
            Shape::InvQuad { a, b } => format!("invquad:a={},b={}", short(a), short(b)),
            Shape::InvTwoFactor { alpha, beta } => {
                format!("invtwofactor:alpha={},beta={}", short(alpha), short(beta))
            }
            Shape::SquaredFactor { alpha, beta } => {
                format!("squaredfactor:alpha={},beta={}", short(alpha), short(beta))
            }
            Shape::GeomShift { alpha, r } => {
                format!("geomshift:alpha={},r={}", short(alpha), short(r))
            }
            Shape::Geometric { r } => format!("geometric:r={}", short(r)),
            Shape::PowerLaw { text, .. } => format!("powerlaw:alpha={text}"),
            Shape::Custom(c) => format!("custom:{}", c.name),
        }
    }

    /// The parameter predicate of the family's convexity criterion, evaluated
    /// exactly (the logarithmic one in ball arithmetic). Geometric and
    /// power-law weights are convex throughout their domain.
    pub fn convexity_condition(&self) -> Result<Convexity> {
        let holds = |b: bool| if b { Convexity::Holds } else { Convexity::Fails };
        let one = q(1);
        Ok(match &self.0 {
            Shape::Reciprocal { alpha } => holds(alpha > &q(-1)),
            Shape::RatQuadNum { a, b } => holds(quad_num_predicate(a, b)),
            Shape::TwoFactorNum { alpha, beta } => {
                holds(quad_num_predicate(&(alpha + beta), &(alpha * beta)))
            }
            Shape::InvQuad { a, b } => holds(
                (a + b + &one).is_positive()
                    && a + q(2) >= BigRational::zero()
                    && b <= &(a * a + q(6) * a + q(11)),
            ),
            Shape::InvTwoFactor { alpha, beta } => holds(alpha > &q(-1) && beta > &q(-1)),
            Shape::SquaredFactor { alpha, beta } => holds(
                alpha > &q(-1)
                    && beta > &q(-1)
                    && alpha.abs() * (&one + q(3) * beta.abs() + beta * beta) <= rat(1, 2),
            ),
            Shape::GeomShift { alpha, r } => {
                if !(alpha > &q(-1) && r.is_positive() && r < &one) {
                    Convexity::Fails
                } else {
                    let x = log_margin(&(alpha + &one), r);
                    if x.lower_f64() > LOG_PREDICATE_BAND {
                        Convexity::Holds
                    } else if x.upper_f64() < -LOG_PREDICATE_BAND {
                        Convexity::Fails
                    } else {
                        Convexity::Indeterminate
                    }
                }
            }
            Shape::Geometric { .. } | Shape::PowerLaw { .. } => Convexity::Holds,
            Shape::Custom(_) => {
                return Err(Error::NoSymbolicCondition(
                    "no symbolic condition available for a custom weight".into(),
                ))
            }
        })
    }

    /// Smallest certified `N₀` with `λ_n ≥ 0` for every `n ≥ N₀`, or `None`
    /// for custom weights.
    pub fn tail_certificate(&self) -> Result<Option<TailCertificate>> {
        if matches!(self.0, Shape::Custom(_)) {
            return Ok(None);
        }
        let (n0, method) = if self.convexity_condition()? == Convexity::Holds {
            (1, TailMethod::Predicate)
        } else if let Some((num, den)) = self.rational_form() {
            match second_derivative_threshold(&num, &den)? {
                Some(n0) => (n0, TailMethod::SecondDerivative),
                None => return Ok(None),
            }
        } else if let Shape::GeomShift { alpha, r } = &self.0 {
            (geom_shift_threshold(alpha, r), TailMethod::LogInequality)
        } else {
            return Ok(None);
        };
        let window = if self.is_rational() {
            for n in n0..n0 + TAIL_WINDOW {
                let l = self.lambda_exact(n)?;
                if l.is_negative() {
                    return Err(Error::Numerical(format!(
                        "tail threshold {n0} contradicted: lambda_{n} < 0"
                    )));
                }
            }
            Some((n0, n0 + TAIL_WINDOW - 1))
        } else {
            None
        };
        Ok(Some(TailCertificate {
            n0,
            method,
            window,
        }))
    }

    /// `λ_n = p_n − 2p_{n+1} + p_{n+2}`.
    pub fn lambda_exact(&self, n: u64) -> Result<BigRational> {
        Ok(self.p_exact(n)? - q(2) * self.p_exact(n + 1)? + self.p_exact(n + 2)?)
    }

    /// Closed form of `Σ_{n≥1} p_n / n` where one is available.
    pub fn sum_p_over_n(&self, prec: usize) -> Result<Option<HpReal>> {
        let h = |x: &BigRational| HpReal::from_rational(x, prec);
        let one = HpReal::one(prec);
        Ok(Some(match &self.0 {
            Shape::Reciprocal { alpha } => constants::a_const(&h(alpha))?,
            Shape::RatQuadNum { a, b } => match quad_roots(a, b, prec) {
                QuadRoots::Real(x, y) => constants::c_const(&x, &y)?,
                QuadRoots::Imaginary(s) => constants::b_const(&s)?,
                QuadRoots::Complex => return Ok(None),
            },
            Shape::TwoFactorNum { alpha, beta } => constants::c_const(&h(alpha), &h(beta))?,
            Shape::InvQuad { a, b } => match quad_roots(a, b, prec) {
                QuadRoots::Real(x, y) => constants::d_const(&x, &y)?,
                _ => return Ok(None),
            },
            Shape::InvTwoFactor { alpha, beta } => constants::d_const(&h(alpha), &h(beta))?,
            Shape::SquaredFactor { alpha, beta } => {
                if alpha.is_zero() || beta.is_zero() {
                    return Ok(None);
                }
                constants::e_const(&h(alpha), &h(beta))?
            }
            Shape::GeomShift { alpha, r } => {
                let r = h(r);
                let omr = &one - &r;
                &(&r / &omr) + &(&h(alpha) * &(-omr.ln()))
            }
            Shape::Geometric { r } => {
                let r = h(r);
                -(&one - &(&r * &r)).ln()
            }
            Shape::PowerLaw { alpha, .. } => constants::zeta(&(&alpha.with_precision(prec) + &one))?,
            Shape::Custom(_) => return Ok(None),
        }))
    }
}

enum QuadRoots {
    /// `x² + ax + b = (x+α)(x+β)`
    Real(HpReal, HpReal),
    /// `a = 0`, `x² + s²`
    Imaginary(HpReal),
    Complex,
}

fn quad_roots(a: &BigRational, b: &BigRational, prec: usize) -> QuadRoots {
    let disc = a * a - q(4) * b;
    if a.is_zero() && b.is_positive() {
        return QuadRoots::Imaginary(HpReal::from_rational(b, prec).sqrt());
    }
    if disc.is_negative() {
        return QuadRoots::Complex;
    }
    let s = HpReal::from_rational(&disc, prec).sqrt();
    let ha = HpReal::from_rational(a, prec);
    let two = HpReal::from_i64(2, prec);
    QuadRoots::Real(&(&ha + &s) / &two, &(&ha - &s) / &two)
}

fn quad_num_predicate(a: &BigRational, b: &BigRational) -> bool {
    (a + b + q(1)).is_positive()
        && a + q(3) >= BigRational::zero()
        && (q(6) + a) * b <= q(6)
}

/// `c · log(1/r) − 2` at the predicate's working precision.
fn log_margin(c: &BigRational, r: &BigRational) -> HpReal {
    let p = MIN_PRECISION;
    let l = -HpReal::from_rational(r, p).ln();
    &(&HpReal::from_rational(c, p) * &l) - &HpReal::from_i64(2, p)
}

/// First `n ≥ 1` with `(n+α) log(1/r) ≥ 2` certified.
fn geom_shift_threshold(alpha: &BigRational, r: &BigRational) -> u64 {
    let l = -rational_to_f64(r).ln();
    let guess = (2.0 / l - rational_to_f64(alpha)).ceil().max(1.0) as u64;
    let mut n = guess.saturating_sub(1).max(1);
    loop {
        if log_margin(&(nq(n) + alpha), r).lower_f64() > 0.0 {
            return n;
        }
        n += 1;
    }
}

/// How a tail threshold was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    /// The parameter predicate holds, so the whole sequence is convex.
    Predicate,
    /// Numerator of `φ″` certified positive on `[N₀, ∞)` by Sturm counting.
    SecondDerivative,
    /// `(x+α) log(1/r) ≥ 2` on `[N₀, ∞)`.
    LogInequality,
}

/// Certified threshold `N₀` for `λ_n ≥ 0`, `n ≥ N₀`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailCertificate {
    pub n0: u64,
    pub method: TailMethod,
    /// Inclusive range over which `λ_n ≥ 0` was also checked exactly.
    pub window: Option<(u64, u64)>,
}

/// Numerator of `(N/D)″` over `D³`: `(N″D − ND″)D − 2D′(N′D − ND′)`.
pub fn second_derivative_numerator(num: &RatPoly, den: &RatPoly) -> RatPoly {
    let (n1, d1) = (num.derivative(), den.derivative());
    let (n2, d2) = (n1.derivative(), d1.derivative());
    let a = &(&(&n2 * den) - &(num * &d2)) * den;
    let b = &(&d1 * &(&(&n1 * den) - &(num * &d1))).scale(&q(2));
    &a - b
}

/// `p > 0` on the open ray `(from, ∞)`, hence `p ≥ 0` on `[from, ∞)`.
fn positive_beyond(p: &RatPoly, from: &BigRational) -> Result<bool> {
    if p.is_zero() || p.sign_at_pos_inf() <= 0 {
        return Ok(false);
    }
    Ok(count_roots_between(p, &Bound::Finite(from.clone()), &Bound::PosInf)? == 0)
}

/// Smallest `N₀ ≤ 64` such that `φ = num/den` is convex on `[N₀, ∞)`.
fn second_derivative_threshold(num: &RatPoly, den: &RatPoly) -> Result<Option<u64>> {
    let top = second_derivative_numerator(num, den);
    for n0 in 1..=64u64 {
        let x = nq(n0);
        let den_ok = den.eval(&x).is_positive() && positive_beyond(den, &x)?;
        if den_ok && positive_beyond(&top, &x)? {
            return Ok(Some(n0));
        }
    }
    Ok(None)
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl FromStr for WeightFamily {
    type Err = Error;

    /// Parses `"name:key=value,..."`, e.g. `"ratquadnum:a=0,b=4/3"`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut params: Vec<(String, BigRational)> = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
            params.push((k.trim().to_ascii_lowercase(), parse_rational(v)?));
        }
        let mut take = |key: &str| -> Result<BigRational> {
            let i = params
                .iter()
                .position(|(k, _)| k == key)
                .ok_or_else(|| Error::Parse(format!("{name}: missing parameter {key}")))?;
            Ok(params.remove(i).1)
        };
        let family = match name.to_ascii_lowercase().as_str() {
            "reciprocal" => Self::reciprocal(take("alpha")?)?,
            "ratquadnum" => {
                let a = take("a")?;
                Self::rat_quad_num(a, take("b")?)?
            }
            "twofactornum" => {
                let a = take("alpha")?;
                Self::two_factor_num(a, take("beta")?)?
            }
            "invquad" => {
                let a = take("a")?;
                Self::inv_quad(a, take("b")?)?
            }
            "invtwofactor" => {
                let a = take("alpha")?;
                Self::inv_two_factor(a, take("beta")?)?
            }
            "squaredfactor" => {
                let a = take("alpha")?;
                Self::squared_factor(a, take("beta")?)?
            }
            "geomshift" => {
                let a = take("alpha")?;
                Self::geom_shift(a, take("r")?)?
            }
            "geometric" => Self::geometric(take("r")?)?,
            "powerlaw" => Self::power_law(&take("alpha")?, crate::hpreal::DEFAULT_PRECISION)?,
            other => return Err(Error::Parse(format!("unknown weight family {other:?}"))),
        };
        if let Some((k, _)) = params.first() {
            return Err(Error::Parse(format!("{name}: unexpected parameter {k}")));
        }
        Ok(family)
    }
}

/// Differences of `p_n` up to a cutoff `N`, cached eagerly.
#[derive(Clone, Debug)]
pub struct DerivedSeq {
    family: WeightFamily,
    n: usize,
    /// `p[i] = p_{i+1}` for `i ≤ N+3`.
    p: Vec<BigRational>,
}

impl DerivedSeq {
    pub fn new(family: WeightFamily, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("cutoff N must be positive".into()));
        }
        if !family.is_rational() {
            return Err(Error::NotRational(format!(
                "{family} has irrational weights; exact differences unavailable"
            )));
        }
        let p = (1..=(n as u64 + 4))
            .map(|i| family.p_exact(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { family, n, p })
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    /// The cutoff `N`.
    pub fn cutoff(&self) -> usize {
        self.n
    }

    pub fn p(&self, n: usize) -> BigRational {
        match self.p.get(n.wrapping_sub(1)) {
            Some(v) => v.clone(),
            None => self.family.p_exact(n as u64).expect("validated family"),
        }
    }

    /// `q_n = p_n − p_{n+1}`.
    pub fn q(&self, n: usize) -> BigRational {
        self.p(n) - self.p(n + 1)
    }

    /// `λ_n = q_n − q_{n+1}`.
    pub fn lambda(&self, n: usize) -> BigRational {
        self.q(n) - self.q(n + 1)
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            Err(Error::IndexOutOfRange {
                index: k,
                max: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// `μ_k = Σ_{n=k}^{N} (n−k+1) λ_n`.
    pub fn mu(&self, k: usize) -> Result<BigRational> {
        self.check_index(k)?;
        Ok((k..=self.n)
            .map(|n| self.lambda(n) * BigRational::from_integer((n - k + 1).into()))
            .fold(BigRational::zero(), |a, b| a + b))
    }

    /// `ν_m = q_m − q_{N+1}`.
    pub fn nu(&self, m: usize) -> Result<BigRational> {
        self.check_index(m)?;
        Ok(self.q(m) - self.q(self.n + 1))
    }

    /// `v_k = λ_k + λ_{k+2} + …`, last index `N` or `N−1` by parity.
    pub fn v(&self, k: usize) -> Result<BigRational> {
        self.check_index(k)?;
        Ok((k..=self.n)
            .step_by(2)
            .map(|n| self.lambda(n))
            .fold(BigRational::zero(), |a, b| a + b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(s: &str) -> WeightFamily {
        s.parse().unwrap()
    }

    #[test]
    fn parse_roundtrip() {
        for s in [
            "reciprocal:alpha=1",
            "ratquadnum:a=0,b=4/3",
            "twofactornum:alpha=1,beta=1",
            "invquad:a=1,b=2",
            "invtwofactor:alpha=1/2,beta=3",
            "squaredfactor:alpha=1,beta=1/20",
            "geomshift:alpha=0,r=1/2",
            "geometric:r=1/3",
            "powerlaw:alpha=2",
        ] {
            assert_eq!(fam(s).spec(), s);
        }
        assert!("ratquadnum:a=0".parse::<WeightFamily>().is_err());
        assert!("ratquadnum:a=0,b=1,c=2".parse::<WeightFamily>().is_err());
        assert!("nosuch:a=1".parse::<WeightFamily>().is_err());
    }

    #[test]
    fn domain_validation() {
        assert!(WeightFamily::reciprocal(rat(-1, 1)).is_err());
        assert!(WeightFamily::rat_quad_num(rat(-3, 1), rat(1, 1)).is_err());
        // n² − 5n + 7 > 0 at every integer but not everywhere on the reals.
        assert!(WeightFamily::rat_quad_num(rat(-5, 1), rat(7, 1)).is_ok());
        assert!(WeightFamily::rat_quad_num(rat(-5, 1), rat(6, 1)).is_err());
        assert!(WeightFamily::geometric(rat(1, 1)).is_err());
        assert!(WeightFamily::power_law(&rat(0, 1), 128).is_err());
    }

    #[test]
    fn sample_values() {
        assert_eq!(fam("ratquadnum:a=0,b=4/3").p_exact(1).unwrap(), rat(3, 7));
        assert_eq!(fam("squaredfactor:alpha=1,beta=1/20").p_exact(1).unwrap(), rat(5, 21));
        assert_eq!(fam("twofactornum:alpha=1,beta=1").p_exact(2).unwrap(), rat(2, 9));
        assert_eq!(fam("geomshift:alpha=1,r=1/2").p_exact(2).unwrap(), rat(3, 4));
        assert!(fam("powerlaw:alpha=2").p_exact(1).is_err());
        assert!((fam("powerlaw:alpha=2").p_f64(3).unwrap() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn second_derivative_numerator_of_reciprocal() {
        // (1/(x+α))″ = 2/(x+α)³, so the numerator over D³ is the constant 2.
        let top = second_derivative_numerator(&RatPoly::one(), &RatPoly::from_i64s(&[3, 1]));
        assert_eq!(top, RatPoly::from_i64s(&[2]));
    }

    #[test]
    fn tail_thresholds() {
        let t = |s: &str| fam(s).tail_certificate().unwrap().map(|c| c.n0);
        assert_eq!(t("ratquadnum:a=0,b=4/3"), Some(2));
        assert_eq!(t("squaredfactor:alpha=1,beta=1/20"), Some(3));
        assert_eq!(t("reciprocal:alpha=1"), Some(1));
        assert_eq!(t("geometric:r=1/2"), Some(1));
        // (n+0)·log 2 ≥ 2 from n = 3 on.
        assert_eq!(t("geomshift:alpha=0,r=1/2"), Some(3));
        let custom = WeightFamily::custom("flat", |_| rat(1, 1));
        assert_eq!(custom.tail_certificate().unwrap(), None);
        assert!(custom.convexity_condition().is_err());
    }

    #[test]
    fn derived_sequence_identities() {
        let d = DerivedSeq::new(fam("twofactornum:alpha=1,beta=1"), 5).unwrap();
        assert_eq!(d.lambda(1), rat(-1, 144));
        assert_eq!(d.nu(5).unwrap(), d.lambda(5));
        assert_eq!(d.mu(5).unwrap(), d.lambda(5));
        assert_eq!(d.v(1).unwrap(), d.lambda(1) + d.lambda(3) + d.lambda(5));
        assert_eq!(d.v(2).unwrap(), d.lambda(2) + d.lambda(4));
        assert!(d.mu(6).is_err());
        assert!(d.nu(0).is_err());
    }
}
