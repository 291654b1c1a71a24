use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// Shorthand for `num / den` as a [`BigRational`].
///
/// Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-1.19245"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let mut num: BigInt = digits.parse().expect("ascii digits");
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(num, den));
    }
    let num: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(BigRational::from_integer(num))
}

/// Always renders `"num/den"`, including integers (`"3/1"`).
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Nearest-ish `f64`; exact for values representable in a double, otherwise
/// within a couple of ulps.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() && !(v == 0.0 && !x.is_zero()) {
            return v;
        }
    }
    // Huge or tiny: scale by a power of two first.
    let num_bits = x.numer().bits() as i64;
    let den_bits = x.denom().bits() as i64;
    let shift = num_bits - den_bits;
    let two = BigInt::from(2);
    let scaled = if shift > 0 {
        x / BigRational::from_integer(num_traits::pow(two, shift as usize))
    } else {
        x * BigRational::from_integer(num_traits::pow(two, (-shift) as usize))
    };
    let m = scaled.to_f64().unwrap_or(0.0);
    m * 2f64.powi(shift as i32)
}

/// Serde adapter writing a [`BigRational`] as a `"num/den"` string.
pub mod rational_serde {
    use super::{format_rational, parse_rational};
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(v) => s.serialize_some(&format_rational(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<BigRational>, D::Error> {
            let s: Option<String> = Option::deserialize(d)?;
            s.map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            let v: Vec<String> = Vec::deserialize(d)?;
            v.iter()
                .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("95/28224").unwrap(), rat(95, 28224));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("1.19245").unwrap(), rat(119245, 100000));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn formats_with_explicit_denominator() {
        assert_eq!(format_rational(&rat(3, 1)), "3/1");
        assert_eq!(format_rational(&rat(-10, 4)), "-5/2");
    }

    #[test]
    fn to_f64_handles_huge_components() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let x = BigRational::new(big.clone() * 3, big);
        assert_eq!(rational_to_f64(&x), 3.0);
    }
}
