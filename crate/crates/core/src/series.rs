//! Truncated power series, logarithmic coefficients and the `U`-operator.
//!
//! A [`PowerSeries`] of order `M` knows `c_0 … c_M` and nothing beyond; every
//! operation truncates to the smallest order it can vouch for. Coefficients
//! are `Complex<R>` with `R` either [`BigRational`] (exact) or `f64`.
//!
//! For normalized `f = z + a_2 z² + …`, `log(f/z) = 2 Σ γ_n zⁿ`.

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Zero};
use serde::Serialize;

use crate::exactnum::{format_rational, parse_rational};
use crate::hpreal::HpReal;
use crate::weights::WeightFamily;
use crate::{constants, Error, Result};

/// Real scalars the series engine runs on.
pub trait Real:
    Clone + Num + Neg<Output = Self> + FromPrimitive + PartialOrd + Debug + Send + Sync
{
    /// `p_n` of `family` in this scalar type.
    fn weight(family: &WeightFamily, n: u64) -> Result<Self>;
}

impl Real for BigRational {
    fn weight(family: &WeightFamily, n: u64) -> Result<Self> {
        family.p_exact(n)
    }
}

impl Real for f64 {
    fn weight(family: &WeightFamily, n: u64) -> Result<Self> {
        family.p_f64(n)
    }
}

fn int<R: Real>(n: usize) -> R {
    R::from_usize(n).expect("small integer")
}

fn cint<R: Real>(n: usize) -> Complex<R> {
    Complex::new(int(n), R::zero())
}

/// `c_0 + c_1 z + … + c_M z^M + O(z^{M+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<R: Real> {
    coeffs: Vec<Complex<R>>,
}

pub type ExactSeries = PowerSeries<BigRational>;
pub type FloatSeries = PowerSeries<f64>;

impl<R: Real> PowerSeries<R> {
    /// Series of order `coeffs.len() − 1`. Panics on an empty vector.
    pub fn new(coeffs: Vec<Complex<R>>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least c_0");
        Self { coeffs }
    }

    pub fn from_real(coeffs: Vec<R>) -> Self {
        Self::new(coeffs.into_iter().map(|c| Complex::new(c, R::zero())).collect())
    }

    /// `z` to order `m`.
    pub fn identity(m: usize) -> Self {
        let mut c = vec![Complex::zero(); m + 1];
        if m >= 1 {
            c[1] = Complex::one();
        }
        Self::new(c)
    }

    /// `z/(1 − ωz)² = Σ n ω^{n−1} zⁿ` to order `m`.
    pub fn rotated_koebe(omega: Complex<R>, m: usize) -> Self {
        let mut c = vec![Complex::zero(); m + 1];
        let mut w = Complex::<R>::one();
        for (n, slot) in c.iter_mut().enumerate().skip(1) {
            *slot = w.clone() * cint::<R>(n);
            w = w * omega.clone();
        }
        Self::new(c)
    }

    /// `z/(1 − z)²` to order `m`.
    pub fn koebe(m: usize) -> Self {
        Self::rotated_koebe(Complex::one(), m)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex<R>] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&Complex<R>> {
        self.coeffs.get(n)
    }

    pub fn truncate(&self, m: usize) -> Self {
        Self::new(self.coeffs[..=m.min(self.order())].to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        Self::new((0..=m).map(|i| self.coeffs[i].clone() + other.coeffs[i].clone()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        Self::new((0..=m).map(|i| self.coeffs[i].clone() - other.coeffs[i].clone()).collect())
    }

    pub fn scale(&self, c: &Complex<R>) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        let mut out = vec![Complex::zero(); m + 1];
        for (i, a) in self.coeffs[..=m].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=m - i].iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// `1/self`; needs `c_0 ≠ 0`.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::Series("inverse needs a nonzero constant term".into()));
        }
        let inv0 = Complex::<R>::one() / c0.clone();
        let m = self.order();
        let mut out: Vec<Complex<R>> = Vec::with_capacity(m + 1);
        out.push(inv0.clone());
        for n in 1..=m {
            let mut s = Complex::<R>::zero();
            for k in 1..=n {
                s = s + self.coeffs[k].clone() * out[n - k].clone();
            }
            let t: Complex<R> = s * inv0.clone();
            out.push(-t);
        }
        Ok(Self::new(out))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// `f′`, one order lower.
    pub fn derivative(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::Series("derivative of an order-0 series is unknown".into()));
        }
        Ok(Self::new(
            (1..=self.order())
                .map(|n| self.coeffs[n].clone() * cint::<R>(n))
                .collect(),
        ))
    }

    /// `∫_0^z`, one order higher.
    pub fn integrate(&self) -> Self {
        let mut out = vec![Complex::zero()];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c.clone() / cint::<R>(n + 1)),
        );
        Self::new(out)
    }

    /// `f/z`; needs `c_0 = 0`.
    pub fn div_z(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() || self.order() == 0 {
            return Err(Error::Series("division by z needs c_0 = 0 and order ≥ 1".into()));
        }
        Ok(Self::new(self.coeffs[1..].to_vec()))
    }

    /// `z f`.
    pub fn mul_z(&self) -> Self {
        let mut out = vec![Complex::zero()];
        out.extend(self.coeffs.iter().cloned());
        Self::new(out)
    }

    /// `exp(self)`; needs `c_0 = 0`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Series("exp needs c_0 = 0".into()));
        }
        // E′ = g′E, so n e_n = Σ_k k g_k e_{n−k}.
        let m = self.order();
        let mut e: Vec<Complex<R>> = vec![Complex::one()];
        for n in 1..=m {
            let mut s = Complex::<R>::zero();
            for k in 1..=n {
                s = s + self.coeffs[k].clone() * cint::<R>(k) * e[n - k].clone();
            }
            e.push(s / cint::<R>(n));
        }
        Ok(Self::new(e))
    }

    /// `log(self)`; needs `c_0 = 1`.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != Complex::one() {
            return Err(Error::Series("log needs c_0 = 1".into()));
        }
        if self.order() == 0 {
            return Ok(Self::new(vec![Complex::zero()]));
        }
        Ok(self.derivative()?.div(self)?.integrate())
    }

    fn check_normalized(&self) -> Result<()> {
        if self.order() < 1 || !self.coeffs[0].is_zero() || self.coeffs[1] != Complex::one() {
            return Err(Error::Series("expected a normalized series z + a_2 z² + …".into()));
        }
        Ok(())
    }
}

impl PowerSeries<BigRational> {
    /// `[[re, im], …]` with `"num/den"` strings.
    pub fn to_json(&self) -> String {
        let v: Vec<[String; 2]> = self
            .coeffs
            .iter()
            .map(|c| [format_rational(&c.re), format_rational(&c.im)])
            .collect();
        serde_json::to_string(&v).expect("strings serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Vec<[String; 2]> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if v.is_empty() {
            return Err(Error::Parse("empty series".into()));
        }
        let coeffs = v
            .iter()
            .map(|[re, im]| Ok(Complex::new(parse_rational(re)?, parse_rational(im)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }
}

/// `γ_1 … γ_{M−1}` of a normalized series of order `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogCoeffs<R: Real> {
    gamma: Vec<Complex<R>>,
}

impl<R: Real> LogCoeffs<R> {
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// `γ_n`, `n ≥ 1`.
    pub fn gamma(&self, n: usize) -> Option<&Complex<R>> {
        n.checked_sub(1).and_then(|i| self.gamma.get(i))
    }

    pub fn as_slice(&self) -> &[Complex<R>] {
        &self.gamma
    }

    fn get(&self, n: usize) -> Result<&Complex<R>> {
        self.gamma(n).ok_or(Error::IndexOutOfRange {
            index: n,
            max: self.gamma.len(),
        })
    }

    /// `f/z = exp(2 Σ γ_n zⁿ)` rebuilt, as `f`.
    pub fn reconstruct(&self) -> Result<PowerSeries<R>> {
        let mut c = vec![Complex::zero()];
        c.extend(self.gamma.iter().map(|g| g.clone() * cint::<R>(2)));
        Ok(PowerSeries::new(c).exp()?.mul_z())
    }
}

/// `γ_n` from `(log g)′ = g′/g`, `g = f/z`.
pub fn log_coefficients<R: Real>(f: &PowerSeries<R>) -> Result<LogCoeffs<R>> {
    f.check_normalized()?;
    let l = f.div_z()?.log()?;
    let two = cint::<R>(2);
    Ok(LogCoeffs {
        gamma: l.coeffs()[1..].iter().map(|c| c.clone() / two.clone()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmCheck<R> {
    pub lhs: R,
    pub rhs: R,
    pub slack: R,
}

/// `Σ_{k≤n} k(n−k+1)|γ_k|²` against `Σ_{k≤n} (n−k+1)/k`.
pub fn lebedev_milin_check<R: Real>(gamma: &LogCoeffs<R>, n: usize) -> Result<LmCheck<R>> {
    let mut lhs = R::zero();
    let mut rhs = R::zero();
    for k in 1..=n {
        let w: R = int(n - k + 1);
        lhs = lhs + int::<R>(k) * w.clone() * gamma.get(k)?.norm_sqr();
        rhs = rhs + w / int(k);
    }
    let slack = rhs.clone() - lhs.clone();
    Ok(LmCheck { lhs, rhs, slack })
}

#[derive(Clone, Debug)]
pub struct WeightedCheck<R> {
    /// `n p_n |γ_n|²`, `n = 1 … M`.
    pub lhs_terms: Vec<R>,
    /// `p_n / n`.
    pub rhs_terms: Vec<R>,
    pub lhs_partial: R,
    pub rhs_partial: R,
    /// `Σ_{n≥1} p_n/n` in closed form, where available.
    pub rhs_infinite: Option<HpReal>,
    pub termwise_equal: bool,
}

/// Partial sums of both sides of `Σ n p_n |γ_n|² ≤ Σ p_n/n`.
pub fn weighted_check<R: Real>(
    family: &WeightFamily,
    gamma: &LogCoeffs<R>,
    m: usize,
    prec: usize,
) -> Result<WeightedCheck<R>> {
    let mut lhs_terms = Vec::with_capacity(m);
    let mut rhs_terms = Vec::with_capacity(m);
    for n in 1..=m {
        let p = R::weight(family, n as u64)?;
        lhs_terms.push(int::<R>(n) * p.clone() * gamma.get(n)?.norm_sqr());
        rhs_terms.push(p / int(n));
    }
    let sum = |v: &[R]| v.iter().cloned().fold(R::zero(), |a, b| a + b);
    Ok(WeightedCheck {
        lhs_partial: sum(&lhs_terms),
        rhs_partial: sum(&rhs_terms),
        termwise_equal: lhs_terms == rhs_terms,
        lhs_terms,
        rhs_terms,
        rhs_infinite: family.sum_p_over_n(prec)?,
    })
}

/// `h_f = z + 2 Σ_{n≥2} ((n−1)/n) γ_{n−1} zⁿ`.
pub fn transform_hf<R: Real>(f: &PowerSeries<R>) -> Result<PowerSeries<R>> {
    let gamma = log_coefficients(f)?;
    let m = f.order();
    let mut c = vec![Complex::zero(); m + 1];
    c[1] = Complex::one();
    for n in 2..=m {
        let r: R = int::<R>(2 * (n - 1)) / int(n);
        c[n] = gamma.get(n - 1)?.clone() * Complex::new(r, R::zero());
    }
    Ok(PowerSeries::new(c))
}

/// `h_f = ∫_0^z ζ f′(ζ)/f(ζ) dζ` by series division.
pub fn transform_hf_direct<R: Real>(f: &PowerSeries<R>) -> Result<PowerSeries<R>> {
    f.check_normalized()?;
    Ok(f.derivative()?.div(&f.div_z()?)?.integrate())
}

/// `H = z²/h_f`.
pub fn transform_h<R: Real>(f: &PowerSeries<R>) -> Result<PowerSeries<R>> {
    Ok(transform_hf(f)?.div_z()?.inverse()?.mul_z())
}

/// `P_f = f/f′`.
pub fn transform_pf<R: Real>(f: &PowerSeries<R>) -> Result<PowerSeries<R>> {
    f.check_normalized()?;
    let fp = f.derivative()?;
    f.truncate(fp.order()).div(&fp)
}

/// `U_F = F′ (z/F)² − 1`.
pub fn u_operator<R: Real>(big_f: &PowerSeries<R>) -> Result<PowerSeries<R>> {
    big_f.check_normalized()?;
    let zf = big_f.div_z()?.inverse()?;
    let mut u = big_f.derivative()?.mul(&zf.mul(&zf));
    u.coeffs[0] = u.coeffs[0].clone() - Complex::one();
    Ok(u)
}

/// Coefficient of `zⁿ` in `U_H` predicted from `γ`: `−2(n−1)n γ_n/(n+1)`.
pub fn u_h_coefficient<R: Real>(gamma: &LogCoeffs<R>, n: usize) -> Result<Complex<R>> {
    if n < 2 {
        return Ok(Complex::zero());
    }
    let r: R = -(int::<R>(2 * (n - 1) * n) / int(n + 1));
    Ok(gamma.get(n)?.clone() * Complex::new(r, R::zero()))
}

/// Coefficient of `zⁿ` in `U_{P_f}` predicted from `γ`: `−2n(n−1)γ_n`.
pub fn u_pf_coefficient<R: Real>(gamma: &LogCoeffs<R>, n: usize) -> Result<Complex<R>> {
    if n < 2 {
        return Ok(Complex::zero());
    }
    let r: R = -int::<R>(2 * n * (n - 1));
    Ok(gamma.get(n)?.clone() * Complex::new(r, R::zero()))
}

/// The series whose closed forms are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormId {
    /// `Σ_{n≥2} (n−1)²(n+1/20)/n · r^{2n}`
    UhSum,
    /// `Σ_{n≥2} (n−1)²(n²+4/3) r^{2n}`
    UpfSum,
    /// `Σ_{n≥1} ((n+α)/n) r^{2n}`
    GeomShiftSum,
}

impl ClosedFormId {
    pub const ALL: [ClosedFormId; 3] =
        [ClosedFormId::UhSum, ClosedFormId::UpfSum, ClosedFormId::GeomShiftSum];

    pub fn as_str(self) -> &'static str {
        match self {
            ClosedFormId::UhSum => "uh_sum",
            ClosedFormId::UpfSum => "upf_sum",
            ClosedFormId::GeomShiftSum => "geom_shift_sum",
        }
    }
}

impl std::str::FromStr for ClosedFormId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClosedFormId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown series id {s:?}")))
    }
}

fn sum_until_small(term: impl Fn(f64) -> f64, start: usize) -> f64 {
    let mut s = 0.0;
    for n in start..100_000 {
        let t = term(n as f64);
        s += t;
        if t.abs() < 1e-20 * s.abs().max(1e-300) && n > start + 4 {
            break;
        }
    }
    s
}

pub fn uh_sum(r: f64) -> f64 {
    let r2 = r * r;
    sum_until_small(|n| (n - 1.0).powi(2) * (n + 0.05) / n * r2.powf(n), 2)
}

pub fn uh_closed(r: f64) -> f64 {
    let r2 = r * r;
    (-r2 + 23.0 * r2 * r2 + 18.0 * r2.powi(3)) / (20.0 * (1.0 - r2).powi(3)) - (-r2).ln_1p() / 20.0
}

pub fn upf_sum(r: f64) -> f64 {
    let r2 = r * r;
    sum_until_small(|n| (n - 1.0).powi(2) * (n * n + 4.0 / 3.0) * r2.powf(n), 2)
}

pub fn upf_closed(r: f64) -> f64 {
    let r2 = r * r;
    4.0 * r2 * r2 * (r2.powi(3) + 2.0 * r2 * r2 + 11.0 * r2 + 4.0) / (3.0 * (1.0 - r2).powi(5))
}

pub fn geom_shift_sum(alpha: f64, r: f64) -> f64 {
    let r2 = r * r;
    sum_until_small(|n| (n + alpha) / n * r2.powf(n), 1)
}

pub fn geom_shift_closed(alpha: f64, r: f64) -> f64 {
    let r2 = r * r;
    r2 / (1.0 - r2) - alpha * (-r2).ln_1p()
}

/// Radii and tolerance of the closed-form comparison.
pub const CLOSED_FORM_RADII: [f64; 4] = [0.1, 0.3, 0.5, 0.7];
pub const CLOSED_FORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormCheck {
    pub id: ClosedFormId,
    /// `(r, series, closed form)`; for the shifted geometric sum one row per
    /// `α ∈ {0, 1/2, 1}`.
    pub rows: Vec<(f64, f64, f64)>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Compares truncated series with their closed forms.
pub fn series_closed_form_check(id: ClosedFormId) -> ClosedFormCheck {
    let mut rows = Vec::new();
    for &r in &CLOSED_FORM_RADII {
        match id {
            ClosedFormId::UhSum => rows.push((r, uh_sum(r), uh_closed(r))),
            ClosedFormId::UpfSum => rows.push((r, upf_sum(r), upf_closed(r))),
            ClosedFormId::GeomShiftSum => {
                for alpha in [0.0, 0.5, 1.0] {
                    rows.push((r, geom_shift_sum(alpha, r), geom_shift_closed(alpha, r)));
                }
            }
        }
    }
    let max_deviation = rows.iter().map(|(_, s, c)| (s - c).abs()).fold(0.0, f64::max);
    ClosedFormCheck {
        id,
        rows,
        max_deviation,
        passed: max_deviation <= CLOSED_FORM_TOL,
    }
}

/// Both sides of the Cauchy–Schwarz step bounding `|U_H|` on `|z| = r`:
/// `2 Σ (n−1)n|γ_n| rⁿ/(n+1)` and `2 (E_{1,1/20} − (5/21)|γ_1|²)^{1/2} S(r)^{1/2}`
/// with `S` the first closed-form sum. Partial sums run to the order of `γ`.
pub fn cauchy_schwarz_chain(gamma: &LogCoeffs<f64>, r: f64) -> Result<(f64, f64)> {
    let e = constants::e_const(
        &HpReal::one(crate::hpreal::DEFAULT_PRECISION),
        &HpReal::from_rational(&crate::exactnum::rat(1, 20), crate::hpreal::DEFAULT_PRECISION),
    )?
    .mid_f64();
    let mut lhs = 0.0;
    for n in 2..=gamma.len() {
        let nf = n as f64;
        lhs += (nf - 1.0) * nf * gamma.get(n)?.norm() / (nf + 1.0) * r.powi(n as i32);
    }
    let g1 = gamma.get(1)?.norm_sqr();
    let rhs = 2.0 * (e - 5.0 * g1 / 21.0).sqrt() * uh_sum(r).sqrt();
    Ok((2.0 * lhs, rhs))
}
