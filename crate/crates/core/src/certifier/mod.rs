//! The `Q_k` positivity pipeline.
//!
//! For a weight `p_n` and cutoff `N`, the coefficient inequality follows from
//! three conditions: `p_{N+1} > 0`; `λ_n ≥ 0` for all `n > N`; and
//! `Q_k(x) = Σ_{j=0}^{N−k} ν_{j+k} P_j^{(2k,0)}(x) > 0` on `(−1, 1)` for every
//! `k ≤ N`, where `ν_m = q_m − q_{N+1}`. Every check here is exact.
//!
//! `Q_k(−1) = v_k` always, so a negative `v_k` already rules out the route.

mod appendix;
mod report;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::exactnum::{
    certify_positive, count_real_roots, count_roots_between, rat, rational_serde, Bound,
};
use crate::jacobi::jacobi_sequence;
use crate::weights::{DerivedSeq, WeightFamily};
use crate::{Error, RatPoly, Result};

pub use appendix::{
    builtin_tables, corrupt, load_tables, verify_against, verify_appendix, AppendixCheck, AppendixTable,
    Mismatch, ProfileCheck, TableId,
};
pub use report::{CertificateReport, Condition0, ConditionI, QCheck, Stage, VEntry, Verdict};

const EQUALITY_CASE: &str = "rotations of the Koebe function z/(1-e^{i theta}z)^2";

/// `Q_k = Σ_{j=0}^{N−k} ν_{j+k} P_j^{(2k,0)}`.
pub fn build_q(seq: &DerivedSeq, k: usize) -> Result<RatPoly> {
    let n = seq.cutoff();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    let jac = jacobi_sequence(n - k, &rat(2 * k as i64, 1), &BigRational::zero())?;
    let mut q = RatPoly::zero();
    for (j, pj) in jac[..=n - k].iter().enumerate() {
        q = &q + &pj.scale(&seq.nu(j + k)?);
    }
    Ok(q)
}

fn sign(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn condition_i(seq: &DerivedSeq) -> Result<ConditionI> {
    let n = seq.cutoff() as u64;
    let Some(cert) = seq.family().tail_certificate()? else {
        return Ok(ConditionI {
            passed: false,
            n0: None,
            method: None,
            window: None,
            bridged: None,
            note: "no analytic tail threshold available".into(),
        });
    };
    let mut out = ConditionI {
        passed: true,
        n0: Some(cert.n0),
        method: Some(cert.method),
        window: cert.window,
        bridged: None,
        note: String::new(),
    };
    if cert.n0 > n + 1 {
        for m in n + 1..cert.n0 {
            if seq.lambda(m as usize).is_negative() {
                out.passed = false;
                out.note = format!("lambda_{m} < 0 beyond the cutoff");
                return Ok(out);
            }
        }
        out.bridged = Some((n + 1, cert.n0 - 1));
    }
    Ok(out)
}

fn check_q(seq: &DerivedSeq, k: usize) -> Result<QCheck> {
    let q = build_q(seq, k)?;
    let v = seq.v(k)?;
    if q.eval(&rat(-1, 1)) != v {
        return Err(Error::Numerical(format!("Q_{k}(-1) differs from v_{k}")));
    }
    let cert = certify_positive(&q, &rat(-1, 1), &rat(1, 1))?;
    Ok(QCheck {
        k,
        roots_in_interval: cert.interior_roots,
        passed: cert.positive,
        witness: cert.witness.clone(),
        q,
        certificate: cert,
    })
}

/// Runs all three conditions plus the `v_k ≥ 0` pre-filter.
pub fn certify(family: &WeightFamily, n: usize) -> Result<CertificateReport> {
    let seq = DerivedSeq::new(family.clone(), n)?;

    let p_next = seq.p(n + 1);
    let condition0 = Condition0 {
        passed: p_next.is_positive(),
        p_next,
    };
    let condition_i = condition_i(&seq)?;

    let necessary_v = (1..=n)
        .map(|k| {
            let value = seq.v(k)?;
            Ok(VEntry {
                k,
                sign: sign(&value),
                value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let necessary_v_passed = necessary_v.iter().all(|e| e.sign >= 0);

    let condition_ii = (1..=n)
        .into_par_iter()
        .map(|k| check_q(&seq, k))
        .collect::<Result<Vec<_>>>()?;

    let verdict = if !condition0.passed {
        Verdict::Failed {
            stage: Stage::Condition0,
            k: None,
            reason: format!("p_{} is not positive", n + 1),
        }
    } else if let Some(bad) = necessary_v.iter().find(|e| e.sign < 0) {
        Verdict::Failed {
            stage: Stage::NecessaryV,
            k: Some(bad.k),
            reason: format!("v_{} = {} < 0", bad.k, bad.value),
        }
    } else if let Some(bad) = condition_ii.iter().find(|c| !c.passed) {
        Verdict::Failed {
            stage: Stage::ConditionIi,
            k: Some(bad.k),
            reason: format!("Q_{} is not positive on (-1, 1)", bad.k),
        }
    } else if !condition_i.passed {
        Verdict::Indeterminate {
            reason: if condition_i.note.is_empty() {
                "tail convexity not established".into()
            } else {
                condition_i.note.clone()
            },
        }
    } else {
        Verdict::Certified
    };

    Ok(CertificateReport {
        family: family.spec(),
        n,
        condition0,
        condition_i,
        necessary_v,
        necessary_v_passed,
        condition_ii,
        verdict,
        equality_case: EQUALITY_CASE,
    })
}

/// Distinct real roots of `Q_k` by region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootProfile {
    pub total_real_roots: usize,
    /// On `(−∞, −1]`.
    pub roots_left_of_minus1: usize,
    /// On `(−1, 1)`.
    pub roots_in_unit_interval: usize,
    /// On `[1, ∞)`.
    pub roots_right_of_one: usize,
}

pub fn profile_of(q: &RatPoly) -> Result<RootProfile> {
    let (m1, p1) = (rat(-1, 1), rat(1, 1));
    let inner = count_real_roots(q, &m1, &p1)?;
    let left = count_roots_between(q, &Bound::NegInf, &Bound::Finite(m1))?
        + usize::from(inner.root_at_lower);
    let right = count_roots_between(q, &Bound::Finite(p1), &Bound::PosInf)?
        + usize::from(inner.root_at_upper);
    Ok(RootProfile {
        total_real_roots: count_roots_between(q, &Bound::NegInf, &Bound::PosInf)?,
        roots_left_of_minus1: left,
        roots_in_unit_interval: inner.interior,
        roots_right_of_one: right,
    })
}

pub fn root_profile(seq: &DerivedSeq, k: usize) -> Result<RootProfile> {
    profile_of(&build_q(seq, k)?)
}

/// One grid point of a parameter scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    #[serde(with = "rational_serde")]
    pub b: BigRational,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    #[serde(with = "rational_serde::option")]
    pub last_certified: Option<BigRational>,
    #[serde(with = "rational_serde::option")]
    pub first_failed: Option<BigRational>,
}

/// Certifies `template(b)` at `steps + 1` equally spaced `b` in `[lo, hi]`.
pub fn scan_parameter<F>(
    template: F,
    lo: &BigRational,
    hi: &BigRational,
    steps: usize,
    n: usize,
) -> Result<ScanResult>
where
    F: Fn(&BigRational) -> Result<WeightFamily> + Sync,
{
    if lo > hi || (steps == 0 && lo != hi) {
        return Err(Error::EmptyInterval {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    let width = hi - lo;
    let grid: Vec<BigRational> = (0..=steps)
        .map(|i| {
            if steps == 0 {
                lo.clone()
            } else {
                lo + &width * rat(i as i64, steps as i64)
            }
        })
        .collect();
    let points = grid
        .into_par_iter()
        .map(|b| {
            let verdict = certify(&template(&b)?, n)?.verdict;
            Ok(ScanPoint { b, verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    let last_certified = points
        .iter()
        .rev()
        .find(|p| p.verdict.is_certified())
        .map(|p| p.b.clone());
    let first_failed = points
        .iter()
        .find(|p| matches!(p.verdict, Verdict::Failed { .. }))
        .map(|p| p.b.clone());
    Ok(ScanResult {
        points,
        last_certified,
        first_failed,
    })
}

/// Smallest `N ≤ n_max` whose certification succeeds.
pub fn scan_cutoff(family: &WeightFamily, n_max: usize) -> Result<Option<usize>> {
    for n in 1..=n_max {
        if certify(family, n)?.verdict.is_certified() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str, n: usize) -> DerivedSeq {
        DerivedSeq::new(s.parse().unwrap(), n).unwrap()
    }

    #[test]
    fn last_polynomial_is_lambda_n() {
        let d = seq("twofactornum:alpha=1,beta=1", 5);
        assert_eq!(build_q(&d, 5).unwrap(), RatPoly::constant(rat(95, 28224)));
        assert_eq!(build_q(&d, 5).unwrap(), RatPoly::constant(d.lambda(5)));
        assert!(build_q(&d, 6).is_err());
    }

    #[test]
    fn roth_certifies_and_small_cutoff_fails() {
        let f: WeightFamily = "twofactornum:alpha=1,beta=1".parse().unwrap();
        assert!(certify(&f, 5).unwrap().verdict.is_certified());
        let r = certify(&f, 2).unwrap();
        assert!(matches!(
            r.verdict,
            Verdict::Failed {
                stage: Stage::NecessaryV,
                k: Some(1),
                ..
            }
        ));
    }

    #[test]
    fn custom_family_is_indeterminate() {
        let f = WeightFamily::custom("recip", |n| rat(1, n as i64 + 1));
        let r = certify(&f, 3).unwrap();
        assert_eq!(r.verdict.label(), "INDETERMINATE");
    }

    #[test]
    fn builtin_tables_match() {
        for id in TableId::ALL {
            let c = verify_appendix(id).unwrap();
            assert!(c.all_match, "{id}: {:?}", c.mismatches);
            assert!(c.profiles_hold, "{id}");
        }
    }

    #[test]
    fn corrupted_table_is_detected() {
        let t = builtin_tables().unwrap().remove(0);
        let bad = corrupt(&t, 4, 1, rat(11876, 705600));
        let c = verify_against(&bad).unwrap();
        assert!(!c.all_match);
        assert_eq!(c.mismatches.len(), 1);
        assert_eq!((c.mismatches[0].k, c.mismatches[0].position), (4, 1));
    }

    #[test]
    fn profile_counts() {
        let q = RatPoly::from_i64s(&[-1, 0, 1]); // roots ±1
        let p = profile_of(&q).unwrap();
        assert_eq!(p.total_real_roots, 2);
        assert_eq!(p.roots_left_of_minus1, 1);
        assert_eq!(p.roots_right_of_one, 1);
        assert_eq!(p.roots_in_unit_interval, 0);
    }
}
