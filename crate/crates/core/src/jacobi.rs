//! Exact Jacobi polynomials `P_j^{(α,β)}` by the three-term recurrence.
//!
//! Sequences are memoized per `(α, β)` and extended on demand; the cache only
//! ever grows and every stored polynomial is final.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, RatPoly, Result};

type Key = (BigRational, BigRational);

fn cache() -> &'static RwLock<HashMap<Key, Arc<Vec<RatPoly>>>> {
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<Vec<RatPoly>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn r(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn extend(seq: &mut Vec<RatPoly>, upto: usize, a: &BigRational, b: &BigRational) {
    if seq.is_empty() {
        seq.push(RatPoly::one());
    }
    if seq.len() == 1 && upto >= 1 {
        // P_1 = (α+1) + (α+β+2)(x−1)/2
        let half = (a + b + r(2)) / r(2);
        seq.push(RatPoly::new(vec![a + r(1) - &half, half]));
    }
    let ab = a + b;
    while seq.len() <= upto {
        let n = seq.len() as i64;
        let s = r(2 * n) + &ab; // 2n+α+β
        let c0 = r(2 * n) * (r(n) + &ab) * (&s - r(2));
        let c1 = &s - r(1);
        let lin = RatPoly::new(vec![&c1 * (a * a - b * b), &c1 * &s * (&s - r(2))]);
        let c2 = r(2) * (r(n) + a - r(1)) * (r(n) + b - r(1)) * &s;
        let next = &(&lin * &seq[n as usize - 1]) - &seq[n as usize - 2].scale(&c2);
        seq.push(next.scale(&c0.recip()));
    }
}

/// `P_0 … P_upto` for parameters `(α, β)`, both `> −1`.
pub fn jacobi_sequence(upto: usize, alpha: &BigRational, beta: &BigRational) -> Result<Arc<Vec<RatPoly>>> {
    let m1 = -BigRational::one();
    if alpha <= &m1 || beta <= &m1 {
        return Err(Error::Domain("Jacobi parameters must exceed -1".into()));
    }
    let key = (alpha.clone(), beta.clone());
    if let Some(seq) = cache().read().expect("jacobi cache").get(&key) {
        if seq.len() > upto {
            return Ok(Arc::clone(seq));
        }
    }
    let mut guard = cache().write().expect("jacobi cache");
    let entry = guard.entry(key).or_insert_with(|| Arc::new(Vec::new()));
    if entry.len() <= upto {
        let mut seq = (**entry).clone();
        extend(&mut seq, upto, alpha, beta);
        *entry = Arc::new(seq);
    }
    Ok(Arc::clone(entry))
}

/// `P_j^{(α,β)}` exactly.
pub fn jacobi_poly(j: usize, alpha: &BigRational, beta: &BigRational) -> Result<RatPoly> {
    Ok(jacobi_sequence(j, alpha, beta)?[j].clone())
}

/// `Σ_{j=0}^{m} P_j^{(2k,0)}`.
pub fn jacobi_partial_sum(m: usize, k: usize) -> RatPoly {
    let seq = jacobi_sequence(m, &r(2 * k as i64), &BigRational::zero()).expect("valid parameters");
    seq[..=m].iter().fold(RatPoly::zero(), |acc, p| &acc + p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn low_degrees() {
        let two = r(2);
        let zero = r(0);
        assert_eq!(jacobi_poly(0, &two, &zero).unwrap(), RatPoly::one());
        assert_eq!(jacobi_poly(1, &two, &zero).unwrap(), RatPoly::from_i64s(&[1, 2]));
        // Legendre P_2 = (3x² − 1)/2
        assert_eq!(
            jacobi_poly(2, &zero, &zero).unwrap(),
            RatPoly::new(vec![rat(-1, 2), rat(0, 1), rat(3, 2)])
        );
    }

    #[test]
    fn partial_sums() {
        assert_eq!(jacobi_partial_sum(0, 3), RatPoly::one());
        assert_eq!(jacobi_partial_sum(1, 1), RatPoly::from_i64s(&[2, 2]));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(jacobi_poly(2, &r(-1), &r(0)).is_err());
    }

    #[test]
    fn cache_extends() {
        let a = rat(7, 3);
        let b = rat(1, 5);
        let short = jacobi_sequence(3, &a, &b).unwrap();
        let long = jacobi_sequence(9, &a, &b).unwrap();
        assert_eq!(short[..], long[..4]);
    }
}
