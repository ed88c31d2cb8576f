use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{precondition, ratio, rational_str, ProcedureError};
use crate::field::is_prime_power;
use crate::geometry::geometric_count;
use crate::mask::SubsetMask;
use crate::matroid::{is_round, Matroid, PointIndex, RestrictionView, Roundness};

/// A growth function `f(1..=r_max)` with `f(1) >= 1` and
/// `f(k) >= 2 f(k-1) - 1`, the hypothesis under which a dense matroid has a
/// dense round restriction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct GrowthPolicy {
    table: Vec<BigRational>,
}

impl TryFrom<Vec<String>> for GrowthPolicy {
    type Error = String;
    fn try_from(table: Vec<String>) -> Result<Self, String> {
        let table = table.iter().map(|s| rational_str::parse(s)).collect::<Result<Vec<_>, _>>()?;
        GrowthPolicy::from_table(table).map_err(|e| e.to_string())
    }
}

impl From<GrowthPolicy> for Vec<String> {
    fn from(p: GrowthPolicy) -> Self {
        p.table.iter().map(ToString::to_string).collect()
    }
}

impl GrowthPolicy {
    /// `table[k - 1] = f(k)`.
    pub fn from_table(table: Vec<BigRational>) -> Result<Self, ProcedureError> {
        let Some(first) = table.first() else {
            return Err(precondition("non-empty growth table", "no entries"));
        };
        if *first < BigRational::one() {
            return Err(precondition("f(1) >= 1", format!("f(1) = {first}")));
        }
        let two = ratio(2);
        for k in 1..table.len() {
            let floor = &two * &table[k - 1] - BigRational::one();
            if table[k] < floor {
                return Err(precondition(
                    "f(k) >= 2 f(k-1) - 1",
                    format!("f({}) = {} < {floor}", k + 1, table[k]),
                ));
            }
        }
        Ok(GrowthPolicy { table })
    }

    pub fn from_integers(values: &[u64]) -> Result<Self, ProcedureError> {
        Self::from_table(values.iter().map(|&v| ratio(v)).collect())
    }

    /// `f(k) = (q/2)^(s-k) θ_q(k)` for `k = 1..=s`.
    pub fn dense_round(q: u64, s: usize) -> Result<Self, ProcedureError> {
        let half_q = BigRational::new(q.into(), 2.into());
        let table = (1..=s)
            .map(|k| {
                let theta = geometric_count(q, k as u32).ok_or_else(|| precondition("θ_q(k) fits", format!("q = {q}, k = {k}")))?;
                let mut f = ratio(theta);
                for _ in k..s {
                    f *= &half_q;
                }
                Ok(f)
            })
            .collect::<Result<Vec<_>, ProcedureError>>()?;
        Self::from_table(table)
    }

    pub fn max_rank(&self) -> usize {
        self.table.len()
    }

    /// `f(k)` for `1 <= k <= max_rank()`.
    pub fn value(&self, k: usize) -> Option<&BigRational> {
        k.checked_sub(1).and_then(|i| self.table.get(i))
    }

    pub fn table(&self) -> &[BigRational] {
        &self.table
    }

    fn meets(&self, eps: usize, r: usize) -> bool {
        self.value(r).is_some_and(|f| ratio(eps as u64) >= *f)
    }
}

/// A round restriction `N` with `ε(N) >= f(r(N))` and `r(N) >= 1`.
///
/// While the current set is not round, its roundness certificate splits it
/// into two parts of smaller rank; at least one keeps `ε >= f(r)`, since
/// otherwise `ε <= 2 f(r - 1) - 2 < f(r)`. The part with more points is kept,
/// ties going to the part holding the least element.
pub fn round_restriction<M: Matroid + ?Sized>(m: &M, policy: &GrowthPolicy) -> Result<SubsetMask, ProcedureError> {
    let r = m.full_rank();
    if r < 1 {
        return Err(precondition("r(M) >= 1", "r(M) = 0"));
    }
    let Some(f) = policy.value(r) else {
        return Err(precondition(
            "r(M) within the growth table",
            format!("r(M) = {r}, table covers 1..={}", policy.max_rank()),
        ));
    };
    let idx = PointIndex::new(m);
    let eps = idx.count();
    if ratio(eps as u64) < *f {
        return Err(precondition("ε(M) >= f(r(M))", format!("ε(M) = {eps}, f({r}) = {f}")));
    }

    let mut current = m.ground_set();
    loop {
        let view = RestrictionView::new(m, current.clone())?;
        let verdict = is_round(&view)?;
        let Roundness::Covered(_) = &verdict else {
            return Ok(current);
        };
        let (first, second) = verdict
            .partition(&view.ground_set())
            .expect("a cover yields a partition");
        let sides = [view.to_base(&first), view.to_base(&second)];
        let score = |s: &SubsetMask| {
            let rank = m.rank(s);
            let eps = idx.epsilon_of(s);
            (rank >= 1 && policy.meets(eps, rank)).then_some(eps)
        };
        current = match (score(&sides[0]), score(&sides[1])) {
            (Some(a), Some(b)) if a == b => {
                let [x, y] = sides;
                if x.first() < y.first() { x } else { y }
            }
            (Some(a), Some(b)) => {
                let [x, y] = sides;
                if a > b { x } else { y }
            }
            (Some(_), None) => sides[0].clone(),
            (None, Some(_)) => sides[1].clone(),
            (None, None) => return Err(ProcedureError::InternalContradiction),
        };
    }
}

/// Outcome of [`round_dense_restriction`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RoundDense {
    AlreadyRound,
    /// A round restriction of rank at least `t` with `ε(N) > θ_q(r(N))`.
    RoundDense { set: SubsetMask, rank: usize, points: usize },
    /// A round restriction of rank below `t` with `ε(N) > θ_{q^2}(r(N))`,
    /// which by Kung's bound forces a `U_{2,q^2+2}`-minor.
    DensityWitness { set: SubsetMask, rank: usize, points: usize },
}

/// Either `M` is round, or it has a round restriction that is dense for its
/// rank over GF(q), or a low-rank round restriction dense enough to force a
/// `U_{2,q^2+2}`-minor.
///
/// Requires `q >= 4` a prime power, `r(M) >= 3t` and `ε(M) >= θ_q(r(M))`,
/// and uses the growth function `f(k) = (q/2)^(r(M)-k) θ_q(k)`.
pub fn round_dense_restriction<M: Matroid + ?Sized>(m: &M, q: u64, t: usize) -> Result<RoundDense, ProcedureError> {
    if q < 4 || !is_prime_power(q) {
        return Err(precondition("q >= 4 a prime power", format!("q = {q}")));
    }
    let r = m.full_rank();
    if r < 3 * t || r == 0 {
        return Err(precondition("r(M) >= 3t and r(M) >= 1", format!("r(M) = {r}, t = {t}")));
    }
    let eps = PointIndex::new(m).count();
    let theta = geometric_count(q, r as u32).unwrap_or(u64::MAX);
    if (eps as u64) < theta {
        return Err(precondition("ε(M) >= θ_q(r(M))", format!("ε(M) = {eps}, θ_{q}({r}) = {theta}")));
    }
    if is_round(m)?.is_round() {
        return Ok(RoundDense::AlreadyRound);
    }
    let policy = GrowthPolicy::dense_round(q, r)?;
    let n = round_restriction(m, &policy)?;
    classify_round_restriction(m, &n, q, t)
}

/// Labels a round restriction `N` by comparing `r(N)` with `t`, verifying
/// the matching density inequality exactly.
pub fn classify_round_restriction<M: Matroid + ?Sized>(
    m: &M,
    n: &SubsetMask,
    q: u64,
    t: usize,
) -> Result<RoundDense, ProcedureError> {
    let rank = m.rank(n);
    let points = PointIndex::within(m, n).count();
    if rank >= t {
        let theta = geometric_count(q, rank as u32).unwrap_or(u64::MAX);
        if points as u64 <= theta {
            return Err(ProcedureError::PostconditionFailed(format!(
                "round restriction of rank {rank} has {points} points, not above θ_{q}({rank}) = {theta}"
            )));
        }
        Ok(RoundDense::RoundDense { set: n.clone(), rank, points })
    } else {
        let theta = geometric_count(q * q, rank as u32).unwrap_or(u64::MAX);
        if points as u64 <= theta {
            return Err(ProcedureError::PostconditionFailed(format!(
                "low-rank restriction of rank {rank} has {points} points, not above θ_{}({rank}) = {theta}",
                q * q
            )));
        }
        Ok(RoundDense::DensityWitness { set: n.clone(), rank, points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pg;
    use crate::matroid::{epsilon_restricted, DirectSum, UniformMatroid};
    use crate::minors::{has_u2n_minor, MinorSearchBudget};

    #[test]
    fn policy_invariants() {
        assert!(GrowthPolicy::from_integers(&[1, 1, 1]).is_ok());
        assert!(GrowthPolicy::from_integers(&[0]).is_err());
        assert!(GrowthPolicy::from_integers(&[3, 4]).is_err());
        assert!(GrowthPolicy::from_integers(&[]).is_err());
        let p = GrowthPolicy::dense_round(4, 3).unwrap();
        assert_eq!(p.table(), &[ratio(4), ratio(10), ratio(21)]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<GrowthPolicy>(&json).unwrap(), p);
        assert!(serde_json::from_str::<GrowthPolicy>(r#"["3/1","4/1"]"#).is_err());
    }

    #[test]
    fn round_input_is_a_fixed_point() {
        let m = pg(4, 2).unwrap();
        let p = GrowthPolicy::from_integers(&[1, 2, 4, 8]).unwrap();
        assert_eq!(round_restriction(&m, &p).unwrap(), m.ground_set());
    }

    #[test]
    fn splits_a_direct_sum() {
        let m = DirectSum::new(UniformMatroid::new(2, 3).unwrap(), UniformMatroid::new(2, 3).unwrap()).unwrap();
        let p = GrowthPolicy::from_integers(&[1, 1, 1, 1]).unwrap();
        let n = round_restriction(&m, &p).unwrap();
        let view = RestrictionView::new(&m, n.clone()).unwrap();
        assert!(is_round(&view).unwrap().is_round());
        assert!(epsilon_restricted(&m, &n).unwrap() >= 1);
    }

    #[test]
    fn free_pair_splits_to_a_point() {
        let m = UniformMatroid::new(2, 2).unwrap();
        let p = GrowthPolicy::from_integers(&[1, 1]).unwrap();
        let n = round_restriction(&m, &p).unwrap();
        assert_eq!(n.len(), 1);
        assert_eq!(m.rank(&n), 1);
    }

    #[test]
    fn round_dense_wrapper_cases() {
        let m = pg(3, 4).unwrap();
        assert_eq!(round_dense_restriction(&m, 4, 1).unwrap(), RoundDense::AlreadyRound);
        let sum = DirectSum::new(UniformMatroid::new(2, 3).unwrap(), UniformMatroid::new(2, 3).unwrap()).unwrap();
        assert!(matches!(
            round_dense_restriction(&sum, 4, 1),
            Err(ProcedureError::PreconditionFailed { condition: "ε(M) >= θ_q(r(M))", .. })
        ));
        assert!(matches!(
            round_dense_restriction(&m, 3, 1),
            Err(ProcedureError::PreconditionFailed { .. })
        ));
        assert!(matches!(
            round_dense_restriction(&m, 4, 2),
            Err(ProcedureError::PreconditionFailed { .. })
        ));
    }

    #[test]
    fn classifier_labels_density_witnesses() {
        // A long line of rank 2 < t: 18 > θ_16(2) = 17 points.
        let line = UniformMatroid::new(2, 18).unwrap();
        let out = classify_round_restriction(&line, &line.ground_set(), 4, 3).unwrap();
        assert!(matches!(out, RoundDense::DensityWitness { rank: 2, points: 18, .. }));
        assert!(has_u2n_minor(&line, 18, MinorSearchBudget::default()).unwrap().is_present());
        let short = UniformMatroid::new(2, 17).unwrap();
        assert!(classify_round_restriction(&short, &short.ground_set(), 4, 3).is_err());
    }
}
