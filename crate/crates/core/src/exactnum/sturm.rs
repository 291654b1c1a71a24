use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::RatPoly;
use super::rational::rational_serde;
use crate::{Error, Result};

/// An end point for Sturm counting, possibly infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl From<BigRational> for Bound {
    fn from(x: BigRational) -> Self {
        Bound::Finite(x)
    }
}

/// Sturm sequence of the square-free part of a polynomial.
///
/// `chain[0]` is the square-free part (the input itself when it is already
/// square-free), `chain[1]` its derivative, and every later entry is the
/// negated remainder of the two before it, divided by its positive content.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SturmChain {
    pub chain: Vec<RatPoly>,
}

impl SturmChain {
    pub fn new(p: &RatPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::Degenerate("Sturm chain of the zero polynomial".into()));
        }
        let head = p.square_free_part();
        let mut chain = vec![head.clone()];
        let d = head.derivative();
        if d.is_zero() {
            return Ok(Self { chain });
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1])?;
            if r.is_zero() {
                break;
            }
            chain.push((-&r).primitive_part());
        }
        Ok(Self { chain })
    }

    /// Number of sign changes in the chain at `at`, zeros skipped.
    pub fn sign_variations(&self, at: &Bound) -> usize {
        let signs = self.chain.iter().map(|q| match at {
            Bound::NegInf => q.sign_at_neg_inf(),
            Bound::PosInf => q.sign_at_pos_inf(),
            Bound::Finite(x) => sign(&q.eval(x)),
        });
        let mut prev = 0;
        let mut changes = 0;
        for s in signs.filter(|&s| s != 0) {
            if prev != 0 && s != prev {
                changes += 1;
            }
            prev = s;
        }
        changes
    }

    /// Distinct real roots in the half-open interval `(lo, hi]`.
    pub fn roots_in_half_open(&self, lo: &Bound, hi: &Bound) -> usize {
        self.sign_variations(lo)
            .saturating_sub(self.sign_variations(hi))
    }

    fn head(&self) -> &RatPoly {
        &self.chain[0]
    }
}

fn sign(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn midpoint(a: &BigRational, b: &BigRational) -> BigRational {
    (a + b) / BigRational::from_integer(2.into())
}

/// Root count over an open interval, with the end points reported apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCount {
    /// Distinct real roots strictly inside `(a, b)`.
    pub interior: usize,
    pub root_at_lower: bool,
    pub root_at_upper: bool,
}

/// Counts the distinct real roots of `p` in the open interval `(a, b)`.
pub fn count_real_roots(p: &RatPoly, a: &BigRational, b: &BigRational) -> Result<RootCount> {
    if a >= b {
        return Err(Error::EmptyInterval {
            lo: a.to_string(),
            hi: b.to_string(),
        });
    }
    let chain = SturmChain::new(p)?;
    let root_at_upper = p.eval(b).is_zero();
    let root_at_lower = p.eval(a).is_zero();
    let half_open = chain.roots_in_half_open(&Bound::Finite(a.clone()), &Bound::Finite(b.clone()));
    Ok(RootCount {
        interior: half_open - usize::from(root_at_upper),
        root_at_lower,
        root_at_upper,
    })
}

/// Distinct real roots strictly between two (possibly infinite) bounds.
pub fn count_roots_between(p: &RatPoly, lo: &Bound, hi: &Bound) -> Result<usize> {
    let chain = SturmChain::new(p)?;
    let hi_is_root = matches!(hi, Bound::Finite(x) if p.eval(x).is_zero());
    Ok(chain.roots_in_half_open(lo, hi) - usize::from(hi_is_root))
}

/// A located real root: either pinned exactly or isolated in an open interval
/// that contains no other root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsolatedRoot {
    Exact {
        #[serde(with = "rational_serde")]
        at: BigRational,
    },
    Interval {
        #[serde(with = "rational_serde")]
        lo: BigRational,
        #[serde(with = "rational_serde")]
        hi: BigRational,
    },
}

/// Isolates every distinct root of `p` in the open interval `(a, b)`, in
/// increasing order.
pub fn isolate_roots(p: &RatPoly, a: &BigRational, b: &BigRational) -> Result<Vec<IsolatedRoot>> {
    if a >= b {
        return Err(Error::EmptyInterval {
            lo: a.to_string(),
            hi: b.to_string(),
        });
    }
    enum Work {
        Range(BigRational, BigRational),
        Exact(BigRational),
    }
    let chain = SturmChain::new(p)?;
    let mut out = Vec::new();
    // Left halves are pushed last so they pop first: output stays sorted.
    let mut stack = vec![Work::Range(a.clone(), b.clone())];
    while let Some(work) = stack.pop() {
        let (lo, hi) = match work {
            Work::Exact(at) => {
                out.push(IsolatedRoot::Exact { at });
                continue;
            }
            Work::Range(lo, hi) => (lo, hi),
        };
        let hi_root = chain.head().eval(&hi).is_zero();
        let n = chain.roots_in_half_open(&Bound::Finite(lo.clone()), &Bound::Finite(hi.clone()))
            - usize::from(hi_root);
        match n {
            0 => {}
            1 => out.push(IsolatedRoot::Interval { lo, hi }),
            _ => {
                let mid = midpoint(&lo, &hi);
                stack.push(Work::Range(mid.clone(), hi));
                if chain.head().eval(&mid).is_zero() {
                    stack.push(Work::Exact(mid.clone()));
                }
                stack.push(Work::Range(lo, mid));
            }
        }
    }
    Ok(out)
}

/// Evidence that a polynomial is not positive on an interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A rational point of the interval where the polynomial is `<= 0`.
    NonPositiveSample {
        #[serde(with = "rational_serde")]
        x: BigRational,
        #[serde(with = "rational_serde")]
        value: BigRational,
    },
    /// An open interval inside the range containing exactly one root.
    RootInterval {
        #[serde(with = "rational_serde")]
        lo: BigRational,
        #[serde(with = "rational_serde")]
        hi: BigRational,
    },
}

/// Outcome of [`certify_positive`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub positive: bool,
    /// Distinct real roots strictly inside the interval.
    pub interior_roots: usize,
    #[serde(with = "rational_serde")]
    pub sample: BigRational,
    #[serde(with = "rational_serde")]
    pub sample_value: BigRational,
    pub witness: Option<Witness>,
}

/// Decides `p(x) > 0` for every `x` in the open interval `(a, b)`.
///
/// Positive means: no root inside (Sturm count) and a positive value at an
/// interior sample. The sample is the midpoint, moved towards `a` by halving
/// while it hits a root.
pub fn certify_positive(
    p: &RatPoly,
    a: &BigRational,
    b: &BigRational,
) -> Result<PositivityCertificate> {
    let count = count_real_roots(p, a, b)?;
    let mut sample = midpoint(a, b);
    let mut sample_value = p.eval(&sample);
    while sample_value.is_zero() {
        sample = midpoint(a, &sample);
        sample_value = p.eval(&sample);
    }
    if count.interior == 0 && sample_value.is_positive() {
        return Ok(PositivityCertificate {
            positive: true,
            interior_roots: 0,
            sample,
            sample_value,
            witness: None,
        });
    }
    let witness = if !sample_value.is_positive() {
        Witness::NonPositiveSample {
            x: sample.clone(),
            value: sample_value.clone(),
        }
    } else {
        nonpositive_witness(p, a, b)?
    };
    Ok(PositivityCertificate {
        positive: false,
        interior_roots: count.interior,
        sample,
        sample_value,
        witness: Some(witness),
    })
}

/// Looks for a sample with `p <= 0` between and at the isolated roots; falls
/// back to an isolating interval when `p` only touches zero.
fn nonpositive_witness(p: &RatPoly, a: &BigRational, b: &BigRational) -> Result<Witness> {
    let roots = isolate_roots(p, a, b)?;
    let mut probes = Vec::new();
    let mut left = a.clone();
    for r in &roots {
        match r {
            IsolatedRoot::Exact { at } => {
                return Ok(Witness::NonPositiveSample {
                    x: at.clone(),
                    value: BigRational::zero(),
                })
            }
            IsolatedRoot::Interval { lo, hi } => {
                if &left < lo {
                    probes.push(midpoint(&left, lo));
                }
                if lo > a {
                    probes.push(lo.clone());
                }
                if hi < b {
                    probes.push(hi.clone());
                }
                left = hi.clone();
            }
        }
    }
    if &left < b {
        probes.push(midpoint(&left, b));
    }
    for x in probes {
        let v = p.eval(&x);
        if !v.is_positive() {
            return Ok(Witness::NonPositiveSample { x, value: v });
        }
    }
    // Even-multiplicity touch: refine the first isolating interval until its
    // midpoint is non-positive or the interval is tiny.
    match roots.into_iter().next() {
        Some(IsolatedRoot::Interval { mut lo, mut hi }) => {
            let chain = SturmChain::new(p)?;
            for _ in 0..64 {
                let mid = midpoint(&lo, &hi);
                let v = p.eval(&mid);
                if !v.is_positive() {
                    return Ok(Witness::NonPositiveSample { x: mid, value: v });
                }
                let left_has = chain
                    .roots_in_half_open(&Bound::Finite(lo.clone()), &Bound::Finite(mid.clone()))
                    > 0;
                if left_has {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(Witness::RootInterval { lo, hi })
        }
        Some(IsolatedRoot::Exact { at }) => Ok(Witness::NonPositiveSample {
            x: at,
            value: BigRational::zero(),
        }),
        None => Err(Error::Numerical(
            "no root located although the Sturm count was positive".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn x2m2() -> RatPoly {
        RatPoly::from_i64s(&[-2, 0, 1])
    }

    fn roth_q4() -> RatPoly {
        RatPoly::new(vec![rat(15171, 705600), rat(11875, 705600)])
    }

    fn positively_proportional(a: &RatPoly, b: &RatPoly) -> bool {
        let (Some(la), Some(lb)) = (a.leading_coeff(), b.leading_coeff()) else {
            return false;
        };
        let c = la / lb;
        c.is_positive() && &b.scale(&c) == a
    }

    #[test]
    fn textbook_chain_up_to_positive_scaling() {
        let chain = SturmChain::new(&x2m2()).unwrap().chain;
        let expected = [x2m2(), RatPoly::from_i64s(&[0, 2]), RatPoly::from_i64s(&[2])];
        assert_eq!(chain.len(), 3);
        for (got, want) in chain.iter().zip(&expected) {
            assert!(positively_proportional(got, want), "{got} vs {want}");
        }
    }

    #[test]
    fn repeated_root_uses_square_free_part() {
        let chain = SturmChain::new(&RatPoly::from_i64s(&[0, 0, 1])).unwrap().chain;
        assert_eq!(chain, vec![RatPoly::from_i64s(&[0, 1]), RatPoly::from_i64s(&[1])]);
    }

    #[test]
    fn linear_chain_is_p_and_derivative() {
        let chain = SturmChain::new(&roth_q4()).unwrap().chain;
        assert_eq!(chain, vec![roth_q4(), RatPoly::constant(rat(11875, 705600))]);
    }

    #[test]
    fn zero_polynomial_is_degenerate() {
        assert!(matches!(SturmChain::new(&RatPoly::zero()), Err(Error::Degenerate(_))));
        assert!(certify_positive(&RatPoly::zero(), &rat(-1, 1), &rat(1, 1)).is_err());
    }

    #[test]
    fn counts_roots_in_open_intervals() {
        let p = x2m2();
        assert_eq!(count_real_roots(&p, &rat(0, 1), &rat(2, 1)).unwrap().interior, 1);
        assert_eq!(count_real_roots(&p, &rat(-2, 1), &rat(2, 1)).unwrap().interior, 2);
        assert_eq!(count_real_roots(&roth_q4(), &rat(-1, 1), &rat(1, 1)).unwrap().interior, 0);
        // The only root of Q_4 lies left of -1.
        let root = rat(-15171, 11875);
        assert!(root < rat(-1, 1));
        assert!(roth_q4().eval(&root).is_zero());
    }

    #[test]
    fn endpoint_roots_reported_apart() {
        // x(x-1)(x+1)
        let p = RatPoly::from_i64s(&[0, -1, 0, 1]);
        let c = count_real_roots(&p, &rat(-1, 1), &rat(1, 1)).unwrap();
        assert_eq!(c.interior, 1);
        assert!(c.root_at_lower && c.root_at_upper);
    }

    #[test]
    fn empty_interval_is_an_error() {
        assert!(matches!(
            count_real_roots(&x2m2(), &rat(1, 1), &rat(1, 1)),
            Err(Error::EmptyInterval { .. })
        ));
    }

    #[test]
    fn infinite_bounds() {
        let p = x2m2();
        assert_eq!(count_roots_between(&p, &Bound::NegInf, &Bound::PosInf).unwrap(), 2);
        // 3b^3 + 40b^2 + 317b - 440 has a single real root.
        let cubic = RatPoly::from_i64s(&[-440, 317, 40, 3]);
        assert_eq!(count_roots_between(&cubic, &Bound::NegInf, &Bound::PosInf).unwrap(), 1);
    }

    #[test]
    fn certifies_positive_constant() {
        let q5 = RatPoly::constant(rat(95, 28224));
        let cert = certify_positive(&q5, &rat(-1, 1), &rat(1, 1)).unwrap();
        assert!(cert.positive);
        assert!(cert.witness.is_none());
    }

    #[test]
    fn negative_sample_is_the_witness() {
        let cert = certify_positive(&x2m2(), &rat(-1, 1), &rat(1, 1)).unwrap();
        assert!(!cert.positive);
        assert_eq!(
            cert.witness,
            Some(Witness::NonPositiveSample {
                x: rat(0, 1),
                value: rat(-2, 1)
            })
        );
    }

    #[test]
    fn finds_negative_dip_between_roots() {
        // (x - 1/4)(x - 1/2) + tiny: positive at the midpoint 0 but dips below.
        let p = RatPoly::from_i64s(&[1, -6, 8]).scale(&rat(1, 8));
        let cert = certify_positive(&p, &rat(-1, 1), &rat(1, 1)).unwrap();
        assert!(!cert.positive);
        assert_eq!(cert.interior_roots, 2);
        match cert.witness.unwrap() {
            Witness::NonPositiveSample { x, value } => {
                assert!(!value.is_positive());
                assert_eq!(p.eval(&x), value);
                assert!(x > rat(-1, 1) && x < rat(1, 1));
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn touching_root_gives_zero_witness() {
        // (x - 1/3)^2 touches zero at 1/3.
        let p = RatPoly::new(vec![rat(1, 9), rat(-2, 3), rat(1, 1)]);
        let cert = certify_positive(&p, &rat(-1, 1), &rat(1, 1)).unwrap();
        assert!(!cert.positive);
        assert_eq!(cert.interior_roots, 1);
        match cert.witness.unwrap() {
            Witness::NonPositiveSample { x, value } => {
                assert!(value.is_zero());
                assert_eq!(x, rat(1, 3));
            }
            Witness::RootInterval { lo, hi } => assert!(lo < rat(1, 3) && rat(1, 3) < hi),
        }
    }

    #[test]
    fn isolates_roots_in_order() {
        // (x + 1/2) x (x - 1/2)
        let p = RatPoly::new(vec![rat(0, 1), rat(-1, 4), rat(0, 1), rat(1, 1)]);
        let roots = isolate_roots(&p, &rat(-1, 1), &rat(1, 1)).unwrap();
        assert_eq!(roots.len(), 3);
        assert_eq!(roots[1], IsolatedRoot::Exact { at: rat(0, 1) });
    }
}
