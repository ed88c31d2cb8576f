//! Projective geometries over GF(q) and their recognition.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::field::{is_prime_power, prime_power, FieldError, FieldSpec};
use crate::mask::{SubsetMask, MAX_GROUND_SIZE};
use crate::matroid::{lines_with_index, LinearMatroid, Matroid, MatroidError, PointIndex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("(q^r - 1)/(q - 1) overflows for q = {q}, r = {r}")]
    Overflow { q: u64, r: u32 },
    #[error("PG({}, {q}) has {size} points, above the cap of {limit}", .n - 1)]
    SizeLimit { n: u32, q: u64, size: u64, limit: usize },
    #[error("GF({sub}) is not a subfield of GF({q})")]
    NotASubfield { q: usize, sub: u64 },
    #[error("projective recognition needs rank at least 3, got {0}")]
    RankTooSmall(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

/// `1 + base + ... + base^(r-1)`, summed exactly. `None` on overflow.
pub fn geometric_count(base: u64, r: u32) -> Option<u64> {
    let mut term = 1u64;
    let mut sum = 0u64;
    for i in 0..r {
        sum = sum.checked_add(term)?;
        if i + 1 < r {
            term = term.checked_mul(base)?;
        }
    }
    Some(sum)
}

/// Number of points of PG(r-1, q): `(q^r - 1)/(q - 1)`.
pub fn theta(q: u64, r: u32) -> Result<u64, GeometryError> {
    if !is_prime_power(q) {
        return Err(GeometryError::NotPrimePower(q));
    }
    geometric_count(q, r).ok_or(GeometryError::Overflow { q, r })
}

/// PG(n-1, q) as the matrix whose columns are the nonzero vectors of
/// GF(q)^n with leading nonzero coordinate 1, in lexicographic order.
pub fn pg(n: u32, q: u64) -> Result<LinearMatroid, GeometryError> {
    pg_with_cap(n, q, MAX_GROUND_SIZE)
}

pub fn pg_with_cap(n: u32, q: u64, cap: usize) -> Result<LinearMatroid, GeometryError> {
    let size = theta(q, n)?;
    if size > cap as u64 {
        return Err(GeometryError::SizeLimit { n, q, size, limit: cap });
    }
    let field = Arc::new(FieldSpec::new(q)?);
    let n = n as usize;
    let q = q as usize;
    let mut columns = Vec::with_capacity(size as usize);
    let mut v = vec![0u8; n];
    // Odometer over GF(q)^n with coordinate 0 most significant.
    loop {
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            columns.push(v.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(LinearMatroid::from_columns(field, n, &columns)?);
            }
            i -= 1;
            if (v[i] as usize) + 1 < q {
                v[i] += 1;
                break;
            }
            v[i] = 0;
        }
    }
}

/// Columns whose normalized coordinates all lie in the subfield of order
/// `p^sub_degree`. For PG(n-1, p^k) this is a PG(n-1, p^sub_degree)
/// restriction.
pub fn subfield_subgeometry(m: &LinearMatroid, sub_degree: usize) -> Result<SubsetMask, GeometryError> {
    let f = m.field();
    if sub_degree == 0 || f.degree() % sub_degree != 0 {
        return Err(GeometryError::NotASubfield {
            q: f.order(),
            sub: (f.characteristic() as u64).saturating_pow(sub_degree as u32),
        });
    }
    let mut keep = SubsetMask::new();
    for j in 0..m.ground_size() {
        let col = m.column(j);
        let Some(&lead) = col.iter().find(|&&x| x != 0) else {
            continue;
        };
        let s = f.inv(lead);
        if col.iter().all(|&x| f.in_subfield(f.mul(x, s), sub_degree)) {
            keep.insert(j);
        }
    }
    Ok(keep)
}

/// The axiom a candidate geometry fails, in the order they are checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    NotSimple,
    ShortLine { line: SubsetMask, points: usize },
    UnequalLines { first: usize, second: usize },
    DisjointLinesNotSkew { first: SubsetMask, second: SubsetMask, connectivity: usize },
    OrderNotPrimePower { order: u64 },
    PointCount { order: u64, expected: u64, found: usize },
}

impl AxiomViolation {
    pub fn name(&self) -> &'static str {
        match self {
            AxiomViolation::NotSimple => "simple",
            AxiomViolation::ShortLine { .. } => "every line has at least three points",
            AxiomViolation::UnequalLines { .. } => "all lines have the same size",
            AxiomViolation::DisjointLinesNotSkew { .. } => "disjoint lines are skew",
            AxiomViolation::OrderNotPrimePower { .. } => "order is a prime power",
            AxiomViolation::PointCount { .. } => "point count matches the order",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PgVerdict {
    /// Rank at least 4 and all axioms hold: PG(r-1, q).
    Geometry { q: u64 },
    /// Rank 3 and the projective-plane axioms hold. Whether the plane is
    /// Desarguesian is not checked; for orders up to 8 it always is.
    Plane { order: u64 },
    Violation(AxiomViolation),
}

impl PgVerdict {
    pub fn order(&self) -> Option<u64> {
        match self {
            PgVerdict::Geometry { q } => Some(*q),
            PgVerdict::Plane { order } => Some(*order),
            PgVerdict::Violation(_) => None,
        }
    }
}

/// Recognizes projective geometries (rank >= 4) and projective planes
/// (rank 3) from their line structure. The order is read off the line size.
pub fn is_projective_geometry<M: Matroid + ?Sized>(m: &M) -> Result<PgVerdict, GeometryError> {
    let r = m.full_rank();
    if r <= 2 {
        return Err(GeometryError::RankTooSmall(r));
    }
    let idx = PointIndex::new(m);
    if idx.count() != m.ground_size() {
        return Ok(PgVerdict::Violation(AxiomViolation::NotSimple));
    }
    let lines = lines_with_index(m, &idx, 2);
    if let Some((line, points)) = lines.iter().find(|(_, c)| *c < 3) {
        return Ok(PgVerdict::Violation(AxiomViolation::ShortLine { line: line.clone(), points: *points }));
    }
    let size = lines[0].1;
    if let Some((_, other)) = lines.iter().find(|(_, c)| *c != size) {
        return Ok(PgVerdict::Violation(AxiomViolation::UnequalLines { first: size, second: *other }));
    }
    for (i, (a, _)) in lines.iter().enumerate() {
        for (b, _) in &lines[i + 1..] {
            if a.is_disjoint(b) {
                let conn = m.rank(a) + m.rank(b) - m.rank(&a.union(b));
                if conn != 0 {
                    return Ok(PgVerdict::Violation(AxiomViolation::DisjointLinesNotSkew {
                        first: a.clone(),
                        second: b.clone(),
                        connectivity: conn,
                    }));
                }
            }
        }
    }
    let order = (size - 1) as u64;
    let expected = geometric_count(order, r as u32).unwrap_or(u64::MAX);
    if expected != idx.count() as u64 {
        return Ok(PgVerdict::Violation(AxiomViolation::PointCount { order, expected, found: idx.count() }));
    }
    if r == 3 {
        return Ok(PgVerdict::Plane { order });
    }
    if prime_power(order).is_none() {
        return Ok(PgVerdict::Violation(AxiomViolation::OrderNotPrimePower { order }));
    }
    Ok(PgVerdict::Geometry { q: order })
}
