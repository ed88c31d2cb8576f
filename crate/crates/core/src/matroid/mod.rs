//! Rank-oracle matroids and the structural primitives built on them:
//! closure, points, lines, flats, local connectivity, minors and roundness.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::certificate::WitnessCertificate;
use crate::field::FieldError;
use crate::mask::SubsetMask;

mod any;
mod explicit;
mod linear;
mod uniform;
mod views;

pub use any::{AnyMatroid, MatroidSpec};
pub use explicit::{ExplicitMatroid, MAX_EXPLICIT_SIZE};
pub use linear::LinearMatroid;
pub use uniform::UniformMatroid;
pub use views::{DirectSum, MinorView, RestrictionView};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("element {index} is outside the ground set of size {size}")]
    OutOfRange { index: usize, size: usize },
    #[error("contraction and deletion sets overlap in {0}")]
    Overlap(SubsetMask),
    #[error("matroid has rank zero")]
    RankZero,
    #[error("no flats of rank {k} in a matroid of rank {rank}")]
    RankOutOfRange { k: usize, rank: usize },
    #[error("ground set of size {size} exceeds the limit of {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("invalid rank function: {0}")]
    InvalidRank(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A matroid presented by its rank function on subsets of `0..ground_size()`.
///
/// Implementations are immutable; `rank` may be called concurrently. Callers
/// must only pass subsets of the ground set; the checked entry points in this
/// module return [`MatroidError::OutOfRange`] otherwise.
pub trait Matroid {
    fn ground_size(&self) -> usize;

    fn rank(&self, set: &SubsetMask) -> usize;

    fn full_rank(&self) -> usize {
        self.rank(&self.ground_set())
    }

    fn ground_set(&self) -> SubsetMask {
        SubsetMask::full(self.ground_size())
    }

    /// `{e : r(X + e) = r(X)}`. Representations override this when they can
    /// do better than one rank query per element.
    fn closure(&self, set: &SubsetMask) -> SubsetMask {
        let r = self.rank(set);
        let mut out = set.clone();
        for e in 0..self.ground_size() {
            if !set.contains(e) && self.rank(&set.with(e)) == r {
                out.insert(e);
            }
        }
        out
    }
}

impl<M: Matroid + ?Sized> Matroid for &M {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn rank(&self, set: &SubsetMask) -> usize {
        (**self).rank(set)
    }
    fn full_rank(&self) -> usize {
        (**self).full_rank()
    }
    fn closure(&self, set: &SubsetMask) -> SubsetMask {
        (**self).closure(set)
    }
}

impl<M: Matroid + ?Sized> Matroid for Box<M> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn rank(&self, set: &SubsetMask) -> usize {
        (**self).rank(set)
    }
    fn full_rank(&self) -> usize {
        (**self).full_rank()
    }
    fn closure(&self, set: &SubsetMask) -> SubsetMask {
        (**self).closure(set)
    }
}

impl<M: Matroid + ?Sized> Matroid for Arc<M> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn rank(&self, set: &SubsetMask) -> usize {
        (**self).rank(set)
    }
    fn full_rank(&self) -> usize {
        (**self).full_rank()
    }
    fn closure(&self, set: &SubsetMask) -> SubsetMask {
        (**self).closure(set)
    }
}

pub fn check_subset<M: Matroid + ?Sized>(m: &M, set: &SubsetMask) -> Result<(), MatroidError> {
    let size = m.ground_size();
    match set.last() {
        Some(index) if index >= size => Err(MatroidError::OutOfRange { index, size }),
        _ => Ok(()),
    }
}

pub fn closure<M: Matroid + ?Sized>(m: &M, set: &SubsetMask) -> Result<SubsetMask, MatroidError> {
    check_subset(m, set)?;
    Ok(m.closure(set))
}

pub fn is_flat<M: Matroid + ?Sized>(m: &M, set: &SubsetMask) -> bool {
    m.closure(set) == *set
}

pub fn is_loop<M: Matroid + ?Sized>(m: &M, e: usize) -> bool {
    m.rank(&SubsetMask::singleton(e)) == 0
}

/// Parallel classes of non-loop elements, computed once and reused for
/// fast point counting on arbitrary subsets.
#[derive(Clone, Debug)]
pub struct PointIndex {
    class_of: Vec<Option<u32>>,
    classes: Vec<SubsetMask>,
}

impl PointIndex {
    pub fn new<M: Matroid + ?Sized>(m: &M) -> Self {
        Self::within(m, &m.ground_set())
    }

    /// Parallel classes of `M|set`.
    pub fn within<M: Matroid + ?Sized>(m: &M, set: &SubsetMask) -> Self {
        let n = m.ground_size();
        let mut class_of: Vec<Option<u32>> = vec![None; n];
        let mut classes = Vec::new();
        let nonloops: Vec<usize> = set.iter().filter(|&e| !is_loop(m, e)).collect();
        for (i, &e) in nonloops.iter().enumerate() {
            if class_of[e].is_some() {
                continue;
            }
            let id = classes.len() as u32;
            let mut class = SubsetMask::singleton(e);
            class_of[e] = Some(id);
            let single = SubsetMask::singleton(e);
            for &f in &nonloops[i + 1..] {
                if class_of[f].is_none() && m.rank(&single.with(f)) == 1 {
                    class_of[f] = Some(id);
                    class.insert(f);
                }
            }
            classes.push(class);
        }
        PointIndex { class_of, classes }
    }

    pub fn points(&self) -> &[SubsetMask] {
        &self.classes
    }

    /// Least-index element of every point, in increasing order.
    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.first().unwrap()).collect()
    }

    pub fn class_of(&self, e: usize) -> Option<usize> {
        self.class_of.get(e).copied().flatten().map(|c| c as usize)
    }

    pub fn count(&self) -> usize {
        self.classes.len()
    }

    /// Number of points of the restriction to `set`.
    pub fn epsilon_of(&self, set: &SubsetMask) -> usize {
        let mut seen = SubsetMask::new();
        for e in set.iter() {
            if let Some(c) = self.class_of(e) {
                seen.insert(c);
            }
        }
        seen.len()
    }

    /// Representatives (least index within `set`) of the points meeting `set`.
    pub fn representatives_in(&self, set: &SubsetMask) -> Vec<usize> {
        let mut seen = SubsetMask::new();
        let mut reps = Vec::new();
        for e in set.iter() {
            if let Some(c) = self.class_of(e) {
                if !seen.contains(c) {
                    seen.insert(c);
                    reps.push(e);
                }
            }
        }
        reps
    }
}

/// Points of `M` as parallel classes, ordered by least element.
pub fn points<M: Matroid + ?Sized>(m: &M) -> Vec<SubsetMask> {
    PointIndex::new(m).classes
}

/// The number of points, ignoring loops.
pub fn epsilon<M: Matroid + ?Sized>(m: &M) -> usize {
    PointIndex::new(m).count()
}

/// `epsilon(M|set)`.
pub fn epsilon_restricted<M: Matroid + ?Sized>(m: &M, set: &SubsetMask) -> Result<usize, MatroidError> {
    check_subset(m, set)?;
    Ok(PointIndex::within(m, set).count())
}

pub fn is_simple<M: Matroid + ?Sized>(m: &M) -> bool {
    let idx = PointIndex::new(m);
    idx.count() == m.ground_size()
}

/// Rank-2 flats with at least `min_points` points, each as its full closure,
/// in order of their least pair of point representatives.
pub fn lines<M: Matroid + ?Sized>(m: &M, min_points: usize) -> Vec<SubsetMask> {
    let idx = PointIndex::new(m);
    lines_with_index(m, &idx, min_points)
        .into_iter()
        .map(|(flat, _)| flat)
        .collect()
}

/// Lines together with their point counts.
pub fn lines_with_index<M: Matroid + ?Sized>(
    m: &M,
    idx: &PointIndex,
    min_points: usize,
) -> Vec<(SubsetMask, usize)> {
    let reps = idx.representatives();
    let mut covered: Vec<SubsetMask> = vec![SubsetMask::new(); reps.len()];
    let mut out = Vec::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            if covered[i].contains(j) {
                continue;
            }
            let flat = m.closure(&[reps[i], reps[j]].into_iter().collect());
            let on_line: SubsetMask = (0..reps.len()).filter(|&c| flat.contains(reps[c])).collect();
            for c in on_line.iter() {
                covered[c] = covered[c].union(&on_line);
            }
            let count = on_line.len();
            if count >= min_points {
                out.push((flat, count));
            }
        }
    }
    out
}

/// Every flat of rank `k` exactly once, generated level by level: the
/// rank-j flats are the closures of a rank-(j-1) flat plus one point.
pub fn flats_of_rank<M: Matroid + ?Sized>(m: &M, k: usize) -> Result<Vec<SubsetMask>, MatroidError> {
    let rank = m.full_rank();
    if k > rank {
        return Err(MatroidError::RankOutOfRange { k, rank });
    }
    let reps = PointIndex::new(m).representatives();
    let mut level = vec![m.closure(&SubsetMask::new())];
    for _ in 0..k {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for flat in &level {
            for &p in &reps {
                if flat.contains(p) {
                    continue;
                }
                let g = m.closure(&flat.with(p));
                if seen.insert(g.clone()) {
                    next.push(g);
                }
            }
        }
        level = next;
    }
    Ok(level)
}

pub fn hyperplanes<M: Matroid + ?Sized>(m: &M) -> Vec<SubsetMask> {
    match m.full_rank() {
        0 => Vec::new(),
        r => flats_of_rank(m, r - 1).expect("r - 1 <= r"),
    }
}

/// `r(A) + r(B) - r(A u B)`.
pub fn local_connectivity<M: Matroid + ?Sized>(
    m: &M,
    a: &SubsetMask,
    b: &SubsetMask,
) -> Result<usize, MatroidError> {
    check_subset(m, a)?;
    check_subset(m, b)?;
    Ok(m.rank(a) + m.rank(b) - m.rank(&a.union(b)))
}

pub fn is_skew<M: Matroid + ?Sized>(m: &M, a: &SubsetMask, b: &SubsetMask) -> Result<bool, MatroidError> {
    Ok(local_connectivity(m, a, b)? == 0)
}

/// `M / contract \ delete` as a reindexed view over `m`.
pub fn minor<'a, M: Matroid + ?Sized>(
    m: &'a M,
    contract: &SubsetMask,
    delete: &SubsetMask,
) -> Result<MinorView<&'a M>, MatroidError> {
    MinorView::new(m, contract.clone(), delete.clone())
}

/// Keeps the least-index element of every point and drops all loops.
pub fn simplify<M: Matroid + ?Sized>(m: &M) -> RestrictionView<&M> {
    let keep: SubsetMask = PointIndex::new(m).representatives().into_iter().collect();
    RestrictionView::new(m, keep).expect("representatives lie in the ground set")
}

/// Outcome of a roundness test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Roundness {
    Round,
    /// Two hyperplanes whose union is the ground set.
    Covered(WitnessCertificate),
}

impl Roundness {
    pub fn is_round(&self) -> bool {
        matches!(self, Roundness::Round)
    }

    pub fn certificate(&self) -> Option<&WitnessCertificate> {
        match self {
            Roundness::Round => None,
            Roundness::Covered(c) => Some(c),
        }
    }

    /// The split `(H1, E - H1)`, both parts of rank below `r(M)`.
    pub fn partition(&self, ground: &SubsetMask) -> Option<(SubsetMask, SubsetMask)> {
        match self.certificate()? {
            WitnessCertificate::HyperplanePairCover { first, .. } => {
                Some((first.clone(), ground.difference(first)))
            }
            _ => None,
        }
    }
}

/// Roundness via hyperplane covers.
///
/// If `E = A u B` with `r(A), r(B) < r(M)`, then `cl(A)` and `cl(B)` are
/// proper flats and each extends to a hyperplane, giving two hyperplanes that
/// cover `E`. Conversely hyperplanes `H1 u H2 = E` give the partition
/// `(H1, E - H1)` with `E - H1` inside `H2`. So `M` is round exactly when the
/// complement of every hyperplane is spanning.
pub fn is_round<M: Matroid + ?Sized>(m: &M) -> Result<Roundness, MatroidError> {
    let r = m.full_rank();
    if r == 0 {
        return Err(MatroidError::RankZero);
    }
    let ground = m.ground_set();
    for h in hyperplanes(m) {
        let rest = ground.difference(&h);
        if m.rank(&rest) < r {
            let second = extend_to_hyperplane(m, m.closure(&rest), r);
            return Ok(Roundness::Covered(WitnessCertificate::HyperplanePairCover {
                first: h,
                second,
            }));
        }
    }
    Ok(Roundness::Round)
}

/// Grows a flat of rank below `r` to a hyperplane by adding least-index elements.
pub(crate) fn extend_to_hyperplane<M: Matroid + ?Sized>(m: &M, mut flat: SubsetMask, r: usize) -> SubsetMask {
    while m.rank(&flat) + 1 < r {
        let e = (0..m.ground_size())
            .find(|&e| !flat.contains(e))
            .expect("a non-spanning flat misses some element");
        flat = m.closure(&flat.with(e));
    }
    flat
}

/// A maximal independent subset of `set`, chosen greedily by least index.
pub fn basis_of<M: Matroid + ?Sized>(m: &M, set: &SubsetMask) -> SubsetMask {
    let mut basis = SubsetMask::new();
    for e in set.iter() {
        let cand = basis.with(e);
        if m.rank(&cand) == cand.len() {
            basis = cand;
        }
    }
    basis
}

pub fn is_independent<M: Matroid + ?Sized>(m: &M, set: &SubsetMask) -> bool {
    m.rank(set) == set.len()
}

#[cfg(test)]
mod tests;
