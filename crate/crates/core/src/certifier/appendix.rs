//! Stored `Q_k` tables and their exact re-derivation.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{build_q, profile_of, RootProfile};
use crate::exactnum::{certify_positive, format_rational, rat};
use crate::weights::{DerivedSeq, WeightFamily};
use crate::{Error, RatPoly, Result};

const BUILTIN: &str = include_str!("../../data/appendix.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableId {
    /// `n/(n+1)²`, `N = 5`.
    Roth5,
    /// `n/(n²+4/3)`, `N = 9`.
    Quad43,
    /// `n²/((n+1)²(n+1/20))`, `N = 9`.
    Squared120,
}

impl TableId {
    pub const ALL: [TableId; 3] = [TableId::Roth5, TableId::Quad43, TableId::Squared120];

    pub fn as_str(self) -> &'static str {
        match self {
            TableId::Roth5 => "roth5",
            TableId::Quad43 => "quad43",
            TableId::Squared120 => "squared120",
        }
    }

    /// Whether the table comes with the parity root-profile claim: no real
    /// roots for odd `k`, a single real root left of `−1` for even `k`.
    pub fn has_parity_claim(self) -> bool {
        !matches!(self, TableId::Roth5)
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown table {s:?}")))
    }
}

/// A stored table: the weight, the cutoff and `Q_1 … Q_N`.
#[derive(Debug, Clone)]
pub struct AppendixTable {
    pub id: TableId,
    pub family: String,
    pub n: usize,
    pub polynomials: Vec<RatPoly>,
}

#[derive(Deserialize)]
struct RawTable {
    family: String,
    n: usize,
    polynomials: Vec<Vec<String>>,
}

/// Parses a JSON object keyed by table id.
pub fn load_tables(json: &str) -> Result<Vec<AppendixTable>> {
    let mut raw: std::collections::BTreeMap<String, RawTable> =
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    TableId::ALL
        .into_iter()
        .filter_map(|id| raw.remove(id.as_str()).map(|t| (id, t)))
        .map(|(id, t)| {
            let polynomials = t
                .polynomials
                .iter()
                .map(|c| RatPoly::from_strings(c))
                .collect::<Result<Vec<_>>>()?;
            if polynomials.len() != t.n {
                return Err(Error::Parse(format!(
                    "table {id}: {} polynomials for N = {}",
                    polynomials.len(),
                    t.n
                )));
            }
            Ok(AppendixTable {
                id,
                family: t.family,
                n: t.n,
                polynomials,
            })
        })
        .collect()
}

pub fn builtin_tables() -> Result<Vec<AppendixTable>> {
    load_tables(BUILTIN)
}

/// A coefficient that differs between the table and the rebuilt polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub k: usize,
    /// Power of `x`.
    pub position: usize,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileCheck {
    pub k: usize,
    pub profile: RootProfile,
    pub positive_on_unit_interval: bool,
    pub claim: Option<String>,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixCheck {
    pub table: TableId,
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub matched: usize,
    pub total: usize,
    pub all_match: bool,
    pub mismatches: Vec<Mismatch>,
    pub profiles: Vec<ProfileCheck>,
    pub profiles_hold: bool,
}

fn diff(k: usize, expected: &RatPoly, actual: &RatPoly) -> Vec<Mismatch> {
    let len = expected.coeffs().len().max(actual.coeffs().len());
    (0..len)
        .filter_map(|i| {
            let (e, a) = (expected.coeff(i), actual.coeff(i));
            (e != a).then(|| Mismatch {
                k,
                position: i,
                expected: format_rational(&e),
                actual: format_rational(&a),
            })
        })
        .collect()
}

fn parity_claim(k: usize, p: &RootProfile) -> (String, bool) {
    if k % 2 == 1 {
        ("no real roots".into(), p.total_real_roots == 0)
    } else {
        (
            "one real root, less than -1".into(),
            p.total_real_roots == 1 && p.roots_left_of_minus1 == 1,
        )
    }
}

/// Rebuilds every `Q_k` of `table` and compares exactly.
pub fn verify_against(table: &AppendixTable) -> Result<AppendixCheck> {
    let family: WeightFamily = table.family.parse()?;
    let seq = DerivedSeq::new(family, table.n)?;
    let mut mismatches = Vec::new();
    let mut matched = 0;
    let mut profiles = Vec::new();
    for (i, expected) in table.polynomials.iter().enumerate() {
        let k = i + 1;
        let actual = build_q(&seq, k)?;
        let d = diff(k, expected, &actual);
        if d.is_empty() {
            matched += 1;
        }
        mismatches.extend(d);
        let profile = profile_of(&actual)?;
        let positive = certify_positive(&actual, &rat(-1, 1), &rat(1, 1))?.positive;
        let (claim, holds) = if table.id.has_parity_claim() {
            let (c, h) = parity_claim(k, &profile);
            let strictly_left = k % 2 == 1 || !actual.eval(&rat(-1, 1)).is_zero();
            (Some(c), h && strictly_left)
        } else {
            (None, true)
        };
        profiles.push(ProfileCheck {
            k,
            profile,
            positive_on_unit_interval: positive,
            claim,
            holds: holds && positive,
        });
    }
    let profiles_hold = profiles.iter().all(|p| p.holds);
    Ok(AppendixCheck {
        table: table.id,
        family: table.family.clone(),
        n: table.n,
        matched,
        total: table.polynomials.len(),
        all_match: mismatches.is_empty() && matched == table.n,
        mismatches,
        profiles,
        profiles_hold,
    })
}

/// Verifies one of the built-in tables.
pub fn verify_appendix(id: TableId) -> Result<AppendixCheck> {
    let table = builtin_tables()?
        .into_iter()
        .find(|t| t.id == id)
        .ok_or_else(|| Error::Parse(format!("table {id} missing from the data file")))?;
    verify_against(&table)
}

/// Helper for fault-injection tests: `table` with one coefficient replaced.
pub fn corrupt(table: &AppendixTable, k: usize, position: usize, value: BigRational) -> AppendixTable {
    let mut t = table.clone();
    let mut c = t.polynomials[k - 1].coeffs().to_vec();
    if c.len() <= position {
        c.resize(position + 1, BigRational::zero());
    }
    c[position] = value;
    t.polynomials[k - 1] = RatPoly::new(c);
    t
}
