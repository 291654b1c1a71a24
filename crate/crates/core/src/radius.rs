//! The four radius equations and the cubic for `b₀`.
//!
//! Each equation is rewritten as a residual `g(r)` that is strictly increasing
//! on `(0, 1)`, negative near `0` and positive near `1`; the radius is its
//! unique zero. Constants come from [`crate::constants`] at
//! [`DEFAULT_PRECISION`] and are rounded to `f64` once.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{b_const, e_const, two_over_sqrt3};
use crate::exactnum::{count_roots_between, rat, rational_serde, rational_to_f64, Bound};
use crate::hpreal::{HpReal, DEFAULT_PRECISION};
use crate::{Error, RatPoly, Result};

/// Guaranteed accuracy of a returned radius.
pub const RADIUS_TOL: f64 = 1e-10;
/// Bisection runs until the bracket is this narrow, so residuals stay below `1e-9`.
const BRACKET_WIDTH: f64 = RADIUS_TOL / 100.0;
pub const MAX_ITERATIONS: usize = 60;
/// Admissible range of `b = |a_2|`.
pub const B_MAX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusId {
    R1,
    R2,
    R3,
    R4,
}

impl RadiusId {
    pub const ALL: [RadiusId; 4] = [RadiusId::R1, RadiusId::R2, RadiusId::R3, RadiusId::R4];

    pub fn as_str(self) -> &'static str {
        match self {
            RadiusId::R1 => "r1",
            RadiusId::R2 => "r2",
            RadiusId::R3 => "r3",
            RadiusId::R4 => "r4",
        }
    }
}

impl fmt::Display for RadiusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RadiusId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RadiusId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown radius {s:?}")))
    }
}

struct Consts {
    /// `2π²/3 − 4`
    prior: f64,
    e_1_20: f64,
    b_2_sqrt3: f64,
}

fn consts() -> &'static Consts {
    static C: OnceLock<Consts> = OnceLock::new();
    C.get_or_init(|| {
        let prec = DEFAULT_PRECISION;
        let pi = HpReal::pi(prec);
        let prior = &(&(&pi * &pi) * &pi.rat(2, 3)) - &pi.int(4);
        let one = HpReal::one(prec);
        let e = e_const(&one, &one.rat(1, 20)).expect("E_{1,1/20} is finite");
        let b = b_const(&two_over_sqrt3(prec)).expect("B_{2/sqrt3} is finite");
        Consts {
            prior: prior.to_f64(),
            e_1_20: e.to_f64(),
            b_2_sqrt3: b.to_f64(),
        }
    })
}

fn prefactor(id: RadiusId, b: f64) -> f64 {
    let c = consts();
    match id {
        RadiusId::R1 | RadiusId::R3 => c.prior - b * b / 4.0,
        RadiusId::R2 => 4.0 * c.e_1_20 - 5.0 * b * b / 84.0,
        RadiusId::R4 => 4.0 * c.b_2_sqrt3 - 3.0 * b * b / 7.0,
    }
}

/// The increasing residual whose zero in `(0, 1)` is the radius.
pub fn residual(id: RadiusId, b: f64, r: f64) -> f64 {
    let s = r * r;
    let k = prefactor(id, b);
    match id {
        RadiusId::R1 => k * s * s * (1.0 + s) - (1.0 - s).powi(3),
        RadiusId::R2 => {
            -(-s).ln_1p() + (-s + 23.0 * s * s + 18.0 * s.powi(3)) / (1.0 - s).powi(3) - 20.0 / k
        }
        RadiusId::R3 => {
            k * s * s * (s.powi(3) - 5.0 * s * s + 19.0 * s + 9.0) - (1.0 - s).powi(5)
        }
        RadiusId::R4 => {
            k * s * s * (s.powi(3) + 2.0 * s * s + 11.0 * s + 4.0) - 0.75 * (1.0 - s).powi(5)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusSolution {
    pub id: RadiusId,
    pub b: f64,
    pub r: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Bracket endpoints; the residuals are finite there for every admissible `b`.
const LO: f64 = 1e-6;
const HI: f64 = 1.0 - 1e-9;

/// Unique zero of [`residual`] in `(0, 1)`.
pub fn solve_radius(id: RadiusId, b: f64) -> Result<RadiusSolution> {
    if !(0.0..=B_MAX).contains(&b) {
        return Err(Error::Domain(format!("b must lie in [0, 2], got {b}")));
    }
    if prefactor(id, b) <= 0.0 {
        return Err(Error::Numerical(format!("{id}: nonpositive prefactor at b = {b}")));
    }
    let (mut lo, mut hi) = (LO, HI);
    let (glo, ghi) = (residual(id, b, lo), residual(id, b, hi));
    if !(glo < 0.0 && ghi > 0.0) {
        return Err(Error::Numerical(format!(
            "{id}: no sign change on [{lo}, {hi}] at b = {b} ({glo}, {ghi})"
        )));
    }
    let mut iterations = 0;
    while hi - lo > BRACKET_WIDTH && iterations < MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if residual(id, b, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let r = 0.5 * (lo + hi);
    Ok(RadiusSolution {
        id,
        b,
        r,
        residual: residual(id, b, r),
        iterations,
    })
}

/// One row of the radius table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusRow {
    pub b: f64,
    pub r1: f64,
    pub r2: f64,
    pub r2_minus_r1: f64,
    pub r3: f64,
    pub r4: f64,
    pub r4_minus_r3: f64,
}

pub const CSV_HEADER: &str = "b,r1,r2,r2_minus_r1,r3,r4,r4_minus_r3";

impl RadiusRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12}",
            self.b, self.r1, self.r2, self.r2_minus_r1, self.r3, self.r4, self.r4_minus_r3
        )
    }
}

/// All four radii at every grid point.
pub fn radius_table(grid: &[f64]) -> Result<Vec<RadiusRow>> {
    grid.par_iter()
        .map(|&b| {
            let r = |id| solve_radius(id, b).map(|s| s.r);
            let (r1, r2, r3, r4) = (r(RadiusId::R1)?, r(RadiusId::R2)?, r(RadiusId::R3)?, r(RadiusId::R4)?);
            Ok(RadiusRow {
                b,
                r1,
                r2,
                r2_minus_r1: r2 - r1,
                r3,
                r4,
                r4_minus_r3: r4 - r3,
            })
        })
        .collect()
}

/// `(b, r)` pairs for one equation.
pub fn radius_curve(id: RadiusId, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.par_iter()
        .map(|&b| solve_radius(id, b).map(|s| (b, s.r)))
        .collect()
}

/// `points` equally spaced values from `0` to `2`.
pub fn default_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| B_MAX * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// `3b³ + 40b² + 317b − 440`.
pub fn b0_cubic() -> RatPoly {
    RatPoly::from_i64s(&[-440, 317, 40, 3])
}

pub const B0_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct B0 {
    /// Lower end of the final bracket; the cubic is negative there.
    #[serde(with = "rational_serde")]
    pub lower: BigRational,
    #[serde(with = "rational_serde")]
    pub upper: BigRational,
    pub value: f64,
    /// Real roots of the cubic on `ℝ`, by Sturm counting.
    pub real_roots: usize,
    #[serde(skip)]
    pub ball: HpReal,
}

/// The unique real root of [`b0_cubic`], bracketed exactly on `[1, 2]`.
pub fn solve_b0() -> Result<B0> {
    let p = b0_cubic();
    let real_roots = count_roots_between(&p, &Bound::NegInf, &Bound::PosInf)?;
    let (mut lo, mut hi) = (rat(1, 1), rat(2, 1));
    let zero = rat(0, 1);
    if !(p.eval(&lo) < zero && p.eval(&hi) > zero) {
        return Err(Error::Numerical("cubic does not change sign on [1, 2]".into()));
    }
    let tol = BigRational::new(1.into(), num_bigint::BigInt::from(10).pow(12));
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / rat(2, 1);
        let v = p.eval(&mid);
        if v == zero {
            lo = mid.clone();
            hi = mid;
            break;
        }
        if v < zero {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let prec = DEFAULT_PRECISION;
    let mid_ball = HpReal::from_rational(&((&lo + &hi) / rat(2, 1)), prec);
    let half_width = rational_to_f64(&(&hi - &lo)) / 2.0;
    Ok(B0 {
        value: rational_to_f64(&lo),
        ball: mid_ball.widen(half_width),
        lower: lo,
        upper: hi,
        real_roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_at_zero() {
        let want = [0.557666, 0.558509, 0.360794, 0.362012];
        for (id, w) in RadiusId::ALL.into_iter().zip(want) {
            let s = solve_radius(id, 0.0).unwrap();
            assert!((s.r - w).abs() < 1e-5, "{id}: {}", s.r);
            assert!(s.residual.abs() < 1e-9);
            assert!(s.iterations <= MAX_ITERATIONS);
        }
    }

    #[test]
    fn b_out_of_range() {
        assert!(solve_radius(RadiusId::R1, 2.5).is_err());
        assert!(solve_radius(RadiusId::R1, -0.1).is_err());
    }

    #[test]
    fn b0_is_unique_root() {
        let b0 = solve_b0().unwrap();
        assert_eq!(b0.real_roots, 1);
        assert!((b0.value - 1.1925184).abs() < 1e-6);
        assert!(b0_cubic().eval(&b0.lower) < rat(0, 1));
    }

    #[test]
    fn grid_shape() {
        let g = default_grid(21);
        assert_eq!(g.len(), 21);
        assert_eq!(g[20], 2.0);
        assert_eq!(g[10], 1.0);
    }
}
