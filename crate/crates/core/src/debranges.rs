//! The triangular linear system for the weight functions `τ_k(t)`.
//!
//! `τ_k − τ_{k+1} = −τ′_k/k − τ′_{k+1}/(k+1)` with `τ_{N+1} ≡ 0` and
//! `τ_k(0) = μ_k`. Its solution is
//! `τ′_k(t) = −k e^{−kt} Q_k(1 − 2e^{−t})`. In the variables `x_k = τ_k/k` the
//! system reads `x′ = A_N x`, and `A_N x(0) = −(v_1, …, v_N)`.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use serde::Serialize;

use crate::certifier::build_q;
use crate::exactnum::{rat, rational_to_f64};
use crate::weights::{DerivedSeq, WeightFamily};
use crate::{Error, HpReal, RatPoly, Result};

/// `τ`-system of a weight truncated at `N`, with the `Q_k` prebuilt.
#[derive(Debug, Clone)]
pub struct TauSystem {
    seq: DerivedSeq,
    q: Vec<RatPoly>,
}

impl TauSystem {
    pub fn new(seq: DerivedSeq) -> Result<Self> {
        let q = (1..=seq.cutoff())
            .map(|k| build_q(&seq, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { seq, q })
    }

    pub fn size(&self) -> usize {
        self.seq.cutoff()
    }

    pub fn seq(&self) -> &DerivedSeq {
        &self.seq
    }

    fn q(&self, k: usize) -> Result<&RatPoly> {
        if k == 0 || k > self.size() {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.size(),
            });
        }
        Ok(&self.q[k - 1])
    }

    /// `τ′_k(0) = −k Q_k(−1)`, exactly.
    pub fn tau_prime_at_zero(&self, k: usize) -> Result<BigRational> {
        let qk = self.q(k)?;
        Ok(-BigRational::from_integer(k.into()) * qk.eval(&rat(-1, 1)))
    }

    /// `τ′_k(t) = −k e^{−kt} Q_k(1 − 2e^{−t})`, `t ≥ 0`.
    pub fn tau_prime(&self, k: usize, t: &HpReal) -> Result<HpReal> {
        if t.is_negative() {
            return Err(Error::Domain("t must be nonnegative".into()));
        }
        let qk = self.q(k)?;
        let prec = t.precision();
        let e = (-t).exp();
        let x = &t.int(1) - &(&e * &t.int(2));
        let mut acc = HpReal::zero(prec);
        for c in qk.coeffs().iter().rev() {
            acc = &(&acc * &x) + &HpReal::from_rational(c, prec);
        }
        let scale = &t.int(-(k as i64)) * &e.powi(k as u32);
        Ok(&scale * &acc)
    }

    pub fn tau_prime_f64(&self, k: usize, t: f64) -> Result<f64> {
        let qk = self.q(k)?;
        let e = (-t).exp();
        Ok(-(k as f64) * e.powi(k as i32) * qk.eval_f64(1.0 - 2.0 * e))
    }

    /// `τ_k(0) = μ_k` as doubles.
    pub fn initial_tau(&self) -> Result<Vec<f64>> {
        (1..=self.size())
            .map(|k| Ok(rational_to_f64(&self.seq.mu(k)?)))
            .collect()
    }
}

/// `τ′` from `τ` by back-substitution in the defining system.
pub fn tau_derivatives(tau: &[f64]) -> Vec<f64> {
    let n = tau.len();
    let mut d = vec![0.0; n];
    for k in (1..=n).rev() {
        let next = if k < n { tau[k] } else { 0.0 };
        let next_d = if k < n { d[k] / (k + 1) as f64 } else { 0.0 };
        d[k - 1] = -(k as f64) * (tau[k - 1] - next + next_d);
    }
    d
}

/// Square matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: Vec<Vec<BigRational>>,
}

impl RatMatrix {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Entry in row `i`, column `j`, both from 1.
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i - 1][j - 1]
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row[..i].iter().all(Zero::is_zero))
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| rational_to_f64(&self.rows[i][j]))
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// `A_N`: row `k` has `−k` on the diagonal and `(−1)^{m−k+1} 2m` in column
/// `m > k`.
pub fn system_matrix(n: usize) -> RatMatrix {
    let rows = (1..=n)
        .map(|k| {
            (1..=n)
                .map(|m| {
                    let v: i64 = if m < k {
                        0
                    } else if m == k {
                        -(k as i64)
                    } else if (m - k) % 2 == 1 {
                        2 * m as i64
                    } else {
                        -2 * m as i64
                    };
                    rat(v, 1)
                })
                .collect()
        })
        .collect();
    RatMatrix { rows }
}

/// `e^{tA}` with a bound on the Taylor truncation error.
#[derive(Debug, Clone)]
pub struct MatrixExp {
    pub value: DMatrix<f64>,
    /// Bound on the 1-norm error of the truncated series before squaring,
    /// propagated through the squarings.
    pub truncation_bound: f64,
}

/// Scaled-and-squared Taylor series. `t ≥ 0`.
pub fn matrix_exp(a: &RatMatrix, t: f64) -> Result<MatrixExp> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Domain("t must be finite and nonnegative".into()));
    }
    let b = a.to_f64() * t;
    let norm = b.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let bs = &b / 2f64.powi(squarings as i32);
    let ns = norm / 2f64.powi(squarings as i32);
    let n = a.size();
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut term_norm = 1.0;
    let mut j = 0u32;
    // Remainder after the last kept term: ≤ term_norm · ns/(j+1) / (1 − ns/(j+2)).
    let bound = loop {
        j += 1;
        term = &term * &bs / j as f64;
        term_norm *= ns / j as f64;
        sum += &term;
        let rest = term_norm * ns / (j + 1) as f64 / (1.0 - ns / (j + 2) as f64);
        if rest < 1e-18 || j > 60 {
            break rest;
        }
    };
    let mut value = sum;
    let mut err = bound;
    let mut vnorm = value.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
    for _ in 0..squarings {
        value = &value * &value;
        err = 2.0 * vnorm * err + err * err;
        vnorm = value.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
    }
    Ok(MatrixExp {
        value,
        truncation_bound: err,
    })
}

/// Counterexample showing `v_k > 0` does not force `τ′_k ≤ 0`.
#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub epsilon: f64,
    pub v: [f64; 3],
    pub t_witness: f64,
    /// `x′_1(t) = (−e^{tA_3} v)_1 > 0`.
    pub first_entry_value: f64,
    /// `τ′_1(t)` from the closed form for a weight realising `v`.
    pub tau_prime_1: f64,
    pub sign_chain: &'static str,
}

const SIGN_CHAIN: &str = "x_k = tau_k/k, x' = A_3 x, A_3 x(0) = -v, so x'(t) = -e^{tA_3} v and \
tau'_1(t) = x'_1(t); a positive first entry means tau'_1(t) > 0";

/// Exact weight, supported on `n ≤ 3`, whose `N = 3` values are
/// `v = (ε, ε, 1 − 2ε)`.
pub fn synthetic_family(eps: &BigRational) -> WeightFamily {
    let one = rat(1, 1);
    let two = rat(2, 1);
    let p3 = &one - &two * eps;
    let p2 = eps + &two * &p3;
    let lambda1 = rat(3, 1) * eps - &one;
    let p1 = &lambda1 + &two * &p2 - &p3;
    WeightFamily::custom(format!("synthetic-v(eps={eps})"), move |n| match n {
        1 => p1.clone(),
        2 => p2.clone(),
        3 => p3.clone(),
        _ => BigRational::zero(),
    })
}

/// Searches `t ∈ (0, 2]` for a positive first entry of `−e^{tA_3} v`,
/// `v = (ε, ε, 1 − 2ε)`.
pub fn insufficiency_demo(epsilon: f64) -> Result<DemoReport> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Domain("epsilon must lie in (0, 1/2)".into()));
    }
    let v = [epsilon, epsilon, 1.0 - 2.0 * epsilon];
    let a3 = system_matrix(3);
    let vv = nalgebra::DVector::from_column_slice(&v);
    // Log-spaced from 1e-8 to 2.
    let points = 4000;
    let found = (0..=points)
        .map(|i| 1e-8 * (2.0f64 / 1e-8).powf(i as f64 / points as f64))
        .map(|t| {
            let e = matrix_exp(&a3, t)?;
            Ok((t, -(&e.value * &vv)[0]))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .find(|&(_, x1)| x1 > 0.0);
    let (t, x1) = found.ok_or_else(|| {
        Error::DemoFailed(format!("no positive first entry for epsilon = {epsilon}"))
    })?;
    let eps = BigRational::from_f64(epsilon).expect("finite epsilon");
    let sys = TauSystem::new(DerivedSeq::new(synthetic_family(&eps), 3)?)?;
    Ok(DemoReport {
        epsilon,
        v,
        t_witness: t,
        first_entry_value: x1,
        tau_prime_1: sys.tau_prime_f64(1, t)?,
        sign_chain: SIGN_CHAIN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matrices() {
        let a2 = system_matrix(2);
        assert_eq!(a2.get(1, 1), &rat(-1, 1));
        assert_eq!(a2.get(1, 2), &rat(4, 1));
        assert_eq!(a2.get(2, 2), &rat(-2, 1));
        let a3 = system_matrix(3);
        assert_eq!(a3.get(1, 3), &rat(-6, 1));
        assert_eq!(a3.get(2, 3), &rat(6, 1));
        assert!(a3.is_upper_triangular());
        assert_eq!(system_matrix(1).get(1, 1), &rat(-1, 1));
    }

    #[test]
    fn exp_at_zero_is_identity() {
        let e = matrix_exp(&system_matrix(4), 0.0).unwrap();
        assert_eq!(e.value, DMatrix::identity(4, 4));
    }

    #[test]
    fn initial_vector_maps_to_minus_v() {
        let seq = DerivedSeq::new("twofactornum:alpha=1,beta=1".parse().unwrap(), 5).unwrap();
        let x0: Vec<BigRational> = (1..=5)
            .map(|k| seq.mu(k).unwrap() / BigRational::from_integer(k.into()))
            .collect();
        let ax = system_matrix(5).mul_vec(&x0);
        for k in 1..=5 {
            assert_eq!(ax[k - 1], -seq.v(k).unwrap());
        }
    }

    #[test]
    fn synthetic_family_has_requested_v() {
        let eps = rat(1, 1000);
        let seq = DerivedSeq::new(synthetic_family(&eps), 3).unwrap();
        assert_eq!(seq.v(1).unwrap(), eps);
        assert_eq!(seq.v(2).unwrap(), eps);
        assert_eq!(seq.v(3).unwrap(), rat(1, 1) - rat(2, 1) * &eps);
    }

    #[test]
    fn demo_finds_witness() {
        let d = insufficiency_demo(1e-3).unwrap();
        assert!(d.t_witness > 0.0 && d.t_witness < 0.5);
        assert!(d.first_entry_value > 0.0);
        assert!(d.tau_prime_1 > 0.0);
        assert!(insufficiency_demo(0.0).is_err());
    }
}
