//! Constructive steps behind the density bounds: skew dense subsets, round
//! restrictions, long lines from a line and a plane, and prime-power
//! arithmetic.
//!
//! Every procedure checks the hypotheses it can compute and refuses with
//! [`ProcedureError::PreconditionFailed`] otherwise. Outputs are re-verified
//! with exact rational arithmetic before they are returned.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::matroid::MatroidError;
use crate::minors::MinorError;

mod arith;
mod line_plane;
mod round;
mod skew;

pub use arith::{gap_check, largest_prime_power_leq, PrimePowerTable};
pub use line_plane::line_from_line_and_plane;
pub use round::{
    classify_round_restriction, round_dense_restriction, round_restriction, GrowthPolicy, RoundDense,
};
pub use skew::skew_dense_subset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProcedureError {
    #[error("precondition failed: {condition} ({detail})")]
    PreconditionFailed { condition: &'static str, detail: String },
    #[error("no flat of rank r - 2 avoiding element {element}: the dense set has rank {rank}")]
    NoSuchFlat { element: usize, rank: usize },
    #[error("found a U(2,{points}) minor, so the matroid is not in U({l})")]
    NotInClass { l: u64, points: usize },
    #[error("neither side of the non-round partition meets the growth bound")]
    InternalContradiction,
    #[error("no element lies outside both spans while rank exceeds 3 (matroid round: {round})")]
    NoFreeElement { round: bool },
    #[error("postcondition failed: {0}")]
    PostconditionFailed(String),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Minor(#[from] MinorError),
}

/// Rationals as `"n/d"` or `"n"` strings.
pub mod rational_str {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn parse(s: &str) -> Result<BigRational, String> {
        let s = s.trim();
        if s.split('/').nth(1).is_some_and(|d| d.trim_start_matches(['+', '0']).is_empty()) {
            return Err(format!("zero denominator in `{s}`"));
        }
        s.parse().map_err(|_| format!("`{s}` is not a rational number"))
    }

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }
}

pub(crate) fn precondition(condition: &'static str, detail: impl Into<String>) -> ProcedureError {
    ProcedureError::PreconditionFailed { condition, detail: detail.into() }
}

/// Parameters of a skew dense subset search: find `A' ⊆ A` skew to `B`
/// with `ε(A') > λ l^(-k) q^r(A')` in a matroid without a `U_{2,l+2}`-minor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityTarget {
    #[serde(with = "rational_str")]
    pub lambda: BigRational,
    pub q: u64,
    pub l: u64,
    pub k: usize,
}

impl DensityTarget {
    pub fn new(lambda: BigRational, q: u64, l: u64, k: usize) -> Result<Self, ProcedureError> {
        if !lambda.is_positive() {
            return Err(precondition("lambda > 0", format!("lambda = {lambda}")));
        }
        if q < 2 || l < q {
            return Err(precondition("l >= q >= 2", format!("q = {q}, l = {l}")));
        }
        Ok(DensityTarget { lambda, q, l, k })
    }

    /// The guaranteed bound `λ l^(-k)`.
    pub fn final_lambda(&self) -> BigRational {
        &self.lambda / BigRational::from_integer(BigInt::from(self.l)).pow(self.k as i32)
    }
}

/// `eps > lambda * q^r`, exactly.
pub fn exceeds(eps: usize, lambda: &BigRational, q: u64, r: usize) -> bool {
    BigRational::from_integer(BigInt::from(eps)) > lambda * int_pow(q, r)
}

pub(crate) fn int_pow(q: u64, r: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(q).pow(r as u32))
}

pub(crate) fn ratio(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Stand-in for the density threshold `α(l, q, n)` of the projective
/// geometry minor theorem. No values are known, so this is caller-supplied
/// configuration and every check that needs it is disabled when unset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityThreshold {
    #[serde(with = "rational_str")]
    pub alpha: BigRational,
    /// Where the value came from.
    pub provenance: String,
}

impl DensityThreshold {
    pub fn new(alpha: BigRational, provenance: impl Into<String>) -> Result<Self, ProcedureError> {
        if alpha < BigRational::one() {
            return Err(precondition("alpha >= 1", format!("alpha = {alpha}")));
        }
        Ok(DensityThreshold { alpha, provenance: provenance.into() })
    }

    /// Least `n` with `(q/(q-1))^n > α q^5 (q-1)^2`.
    pub fn rank_threshold(&self, q: u64) -> Option<u32> {
        if q < 2 {
            return None;
        }
        let target = &self.alpha * int_pow(q, 5) * int_pow(q - 1, 2);
        let step = BigRational::new(BigInt::from(q), BigInt::from(q - 1));
        let mut power = BigRational::one();
        for n in 0..100_000u32 {
            if power > target {
                return Some(n);
            }
            power *= &step;
        }
        None
    }
}
