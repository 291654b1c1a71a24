use num_rational::BigRational;
use serde::Serialize;

use crate::exactnum::{rational_serde, PositivityCertificate, Witness};
use crate::weights::TailMethod;
use crate::RatPoly;

/// Where a failed certification broke down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Condition0,
    NecessaryV,
    ConditionIi,
}

/// Final outcome. `Failed` always carries a concrete obstruction to the
/// polynomial route; `Indeterminate` means a hypothesis could not be
/// established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Certified,
    Failed {
        stage: Stage,
        k: Option<usize>,
        reason: String,
    },
    Indeterminate {
        reason: String,
    },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Certified => "CERTIFIED",
            Verdict::Failed { .. } => "FAILED",
            Verdict::Indeterminate { .. } => "INDETERMINATE",
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }
}

/// `p_{N+1} > 0`.
#[derive(Debug, Clone, Serialize)]
pub struct Condition0 {
    pub passed: bool,
    #[serde(with = "rational_serde")]
    pub p_next: BigRational,
}

/// `λ_n ≥ 0` for every `n > N`.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionI {
    pub passed: bool,
    pub n0: Option<u64>,
    pub method: Option<TailMethod>,
    /// Range past `N₀` where `λ_n ≥ 0` was also checked exactly.
    pub window: Option<(u64, u64)>,
    /// Range `N+1 … N₀−1` bridged by exact evaluation, if any.
    pub bridged: Option<(u64, u64)>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VEntry {
    pub k: usize,
    #[serde(with = "rational_serde")]
    pub value: BigRational,
    pub sign: i8,
}

/// Positivity of one `Q_k` on `(−1, 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct QCheck {
    pub k: usize,
    pub q: RatPoly,
    pub roots_in_interval: usize,
    pub passed: bool,
    pub witness: Option<Witness>,
    #[serde(skip)]
    pub certificate: PositivityCertificate,
}

/// Everything established while certifying one `(family, N)` pair.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub condition0: Condition0,
    pub condition_i: ConditionI,
    pub necessary_v: Vec<VEntry>,
    pub necessary_v_passed: bool,
    pub condition_ii: Vec<QCheck>,
    pub verdict: Verdict,
    /// Extremal functions when the inequality holds with these weights.
    pub equality_case: &'static str,
}

impl CertificateReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
