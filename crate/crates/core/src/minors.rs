//! Minor detection: the longest line in any minor, membership in the class of
//! matroids without a `U_{2,n}`-minor, small-target minor isomorphism and
//! projective-geometry restrictions.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::WitnessCertificate;
use crate::field::is_prime_power;
use crate::geometry::{geometric_count, is_projective_geometry};
use crate::mask::SubsetMask;
use crate::matroid::{
    basis_of, flats_of_rank, ExplicitMatroid, Matroid, MatroidError, PointIndex, RestrictionView,
};

/// Largest target accepted by [`minor_isomorphic`].
pub const MAX_TARGET_SIZE: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MinorError {
    #[error("line minors need rank at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("U(2,{0}) is not a line target; need at least 3 points")]
    LineTooShort(usize),
    #[error("search budget of {nodes} nodes exhausted")]
    BudgetExceeded { nodes: u64 },
    #[error("target has {0} elements; at most {MAX_TARGET_SIZE} are supported")]
    TargetTooLarge(usize),
    #[error("target matroid is not simple")]
    TargetNotSimple,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

/// Limits for exponential searches. Running out is reported, never
/// mistaken for a negative answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorSearchBudget {
    /// Largest contraction rank explored when not exhaustive.
    pub max_depth: Option<usize>,
    /// Nodes (contraction flats or partial embeddings) expanded.
    pub max_nodes: Option<u64>,
    /// Ignore `max_depth` and explore every independent contraction set.
    pub exhaustive: bool,
}

impl Default for MinorSearchBudget {
    fn default() -> Self {
        MinorSearchBudget { max_depth: None, max_nodes: Some(5_000_000), exhaustive: true }
    }
}

impl MinorSearchBudget {
    pub fn unlimited() -> Self {
        MinorSearchBudget { max_depth: None, max_nodes: None, exhaustive: true }
    }

    pub fn with_nodes(max_nodes: u64) -> Self {
        MinorSearchBudget { max_nodes: Some(max_nodes), ..Self::default() }
    }
}

/// The longest line found in a minor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineMinor {
    pub points: usize,
    pub certificate: WitnessCertificate,
    /// False when the budget cut the search short; `points` is then only a
    /// lower bound.
    pub exact: bool,
    pub nodes: u64,
}

struct LineSearch<'a, M: ?Sized> {
    m: &'a M,
    rank: usize,
    budget: MinorSearchBudget,
    stop_at: Option<usize>,
    nodes: u64,
    visited: HashSet<SubsetMask>,
    best: usize,
    best_cert: Option<(SubsetMask, SubsetMask)>,
    incomplete: bool,
}

impl<M: Matroid + ?Sized> LineSearch<'_, M> {
    fn done(&self) -> bool {
        self.stop_at.is_some_and(|t| self.best >= t)
    }

    /// Point representatives of `M / flat`, one per parallel class.
    fn contracted_points(&self, flat: &SubsetMask) -> Vec<usize> {
        let mut assigned = flat.clone();
        let mut reps = Vec::new();
        for e in 0..self.m.ground_size() {
            if assigned.contains(e) {
                continue;
            }
            reps.push(e);
            assigned = assigned.union(&self.m.closure(&flat.with(e)));
        }
        reps
    }

    fn visit(&mut self, flat: SubsetMask, basis: SubsetMask) {
        if self.done() || self.incomplete && self.budget.max_nodes.is_some_and(|n| self.nodes >= n) {
            return;
        }
        if self.budget.max_nodes.is_some_and(|n| self.nodes >= n) {
            self.incomplete = true;
            return;
        }
        self.nodes += 1;
        let rf = basis.len();
        let reps = self.contracted_points(&flat);
        if reps.len() <= self.best {
            // No further contraction can carry more points than M / flat has.
            return;
        }
        if rf + 2 == self.rank {
            self.best = reps.len();
            self.best_cert = Some((basis.clone(), self.m.ground_set().difference(&basis)));
            return;
        }

        let mut covered: Vec<SubsetMask> = vec![SubsetMask::new(); reps.len()];
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                if covered[i].contains(j) {
                    continue;
                }
                let pair = basis.with(reps[i]).with(reps[j]);
                let on: SubsetMask = (0..reps.len())
                    .filter(|&c| c == i || c == j || self.m.rank(&pair.with(reps[c])) == rf + 2)
                    .collect();
                for c in on.iter() {
                    covered[c] = covered[c].union(&on);
                }
                if on.len() > self.best {
                    self.best = on.len();
                    let line = self.m.closure(&pair).difference(&basis);
                    self.best_cert = Some((basis.clone(), line));
                    if self.done() {
                        return;
                    }
                }
            }
        }

        if rf + 1 > self.rank - 2 {
            return;
        }
        if !self.budget.exhaustive && self.budget.max_depth.is_some_and(|d| rf + 1 > d) {
            self.incomplete = true;
            return;
        }
        for &p in &reps {
            let child = self.m.closure(&flat.with(p));
            if self.visited.insert(child.clone()) {
                self.visit(child, basis.with(p));
                if self.done() {
                    return;
                }
            }
        }
    }
}

fn search_lines<M: Matroid + ?Sized>(
    m: &M,
    budget: MinorSearchBudget,
    stop_at: Option<usize>,
) -> Result<LineMinor, MinorError> {
    let rank = m.full_rank();
    if rank < 2 {
        return Err(MinorError::RankTooSmall(rank));
    }
    let root = m.closure(&SubsetMask::new());
    let mut s = LineSearch {
        m,
        rank,
        budget,
        stop_at,
        nodes: 0,
        visited: HashSet::from([root.clone()]),
        best: 0,
        best_cert: None,
        incomplete: false,
    };
    s.visit(root, SubsetMask::new());
    let exact = !s.incomplete || s.done();
    let (contract, line) = s
        .best_cert
        .ok_or(MinorError::BudgetExceeded { nodes: s.nodes })?;
    Ok(LineMinor {
        points: s.best,
        certificate: WitnessCertificate::ContractionLine { contract, line, points: s.best },
        exact,
        nodes: s.nodes,
    })
}

/// The largest `n` such that `M` has a `U_{2,n}`-minor.
///
/// Explores every flat of rank at most `r(M) - 2` as a contraction, reached
/// depth-first by contracting point representatives in index order; each
/// flat is visited once and a subtree is pruned when its contraction has no
/// more points than the best line so far.
pub fn max_line_minor<M: Matroid + ?Sized>(m: &M, budget: MinorSearchBudget) -> Result<LineMinor, MinorError> {
    search_lines(m, budget, None)
}

/// Three-valued answer of a budgeted minor test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinorAnswer {
    Present(WitnessCertificate),
    Absent,
    Unknown { lower_bound: usize },
}

impl MinorAnswer {
    pub fn is_present(&self) -> bool {
        matches!(self, MinorAnswer::Present(_))
    }
}

/// Whether `M` has a `U_{2,n}`-minor.
pub fn has_u2n_minor<M: Matroid + ?Sized>(m: &M, n: usize, budget: MinorSearchBudget) -> Result<MinorAnswer, MinorError> {
    if n < 3 {
        return Err(MinorError::LineTooShort(n));
    }
    if m.full_rank() < 2 {
        return Ok(MinorAnswer::Absent);
    }
    let found = match search_lines(m, budget, Some(n)) {
        Ok(f) => f,
        Err(MinorError::BudgetExceeded { .. }) => return Ok(MinorAnswer::Unknown { lower_bound: 0 }),
        Err(e) => return Err(e),
    };
    Ok(if found.points >= n {
        MinorAnswer::Present(found.certificate)
    } else if found.exact {
        MinorAnswer::Absent
    } else {
        MinorAnswer::Unknown { lower_bound: found.points }
    })
}

/// Searches for a minor of `M` isomorphic to the small simple `target`.
///
/// Every minor can be written `M / C \ D` with `C` independent and
/// `r(M) - |C|` equal to the rank of the minor, and contracting `C` or its
/// closure differ only by loops. So the search runs over flats of rank
/// `r(M) - r(target)` and then backtracks an assignment of target elements
/// to distinct points of the contraction, checking every rank as it goes.
pub fn minor_isomorphic<M: Matroid + ?Sized>(
    m: &M,
    target: &ExplicitMatroid,
    budget: MinorSearchBudget,
) -> Result<Option<WitnessCertificate>, MinorError> {
    let t = target.ground_size();
    if t > MAX_TARGET_SIZE {
        return Err(MinorError::TargetTooLarge(t));
    }
    if PointIndex::new(target).count() != t {
        return Err(MinorError::TargetNotSimple);
    }
    let rt = target.full_rank();
    let r = m.full_rank();
    if rt > r || t > m.ground_size() {
        return Ok(None);
    }
    let mut nodes = 0u64;
    for flat in flats_of_rank(m, r - rt)? {
        let contract = basis_of(m, &flat);
        let rc = contract.len();
        let mut reps = Vec::new();
        let mut assigned = flat.clone();
        for e in 0..m.ground_size() {
            if !assigned.contains(e) {
                reps.push(e);
                assigned = assigned.union(&m.closure(&flat.with(e)));
            }
        }
        if reps.len() < t {
            continue;
        }
        let mut image = Vec::with_capacity(t);
        if embed(m, target, &contract, rc, &reps, &mut image, &mut nodes, budget.max_nodes)? {
            let image_set: SubsetMask = image.iter().copied().collect();
            let delete = m.ground_set().difference(&contract).difference(&image_set);
            return Ok(Some(WitnessCertificate::MinorEmbedding {
                contract,
                delete,
                image,
                target: target.clone(),
            }));
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn embed<M: Matroid + ?Sized>(
    m: &M,
    target: &ExplicitMatroid,
    contract: &SubsetMask,
    rc: usize,
    reps: &[usize],
    image: &mut Vec<usize>,
    nodes: &mut u64,
    max_nodes: Option<u64>,
) -> Result<bool, MinorError> {
    let i = image.len();
    if i == target.ground_size() {
        return Ok(true);
    }
    for &cand in reps {
        if image.contains(&cand) {
            continue;
        }
        *nodes += 1;
        if max_nodes.is_some_and(|n| *nodes > n) {
            return Err(MinorError::BudgetExceeded { nodes: *nodes });
        }
        let consistent = (0u32..1 << i).all(|bits| {
            let mut set = contract.with(cand);
            for (k, &e) in image.iter().enumerate() {
                if bits & (1 << k) != 0 {
                    set.insert(e);
                }
            }
            m.rank(&set) - rc == target.rank_bits(bits | 1 << i)
        });
        if consistent {
            image.push(cand);
            if embed(m, target, contract, rc, reps, image, nodes, max_nodes)? {
                return Ok(true);
            }
            image.pop();
        }
    }
    Ok(false)
}

/// A set `S` of points such that `M|S` is PG(rank-1, q), searched inside
/// each rank-`rank` flat in enumeration order.
///
/// The search grows `S` one point at a time: while some line through two
/// points of `S` has fewer than `q + 1` points of `S`, it branches on the
/// next point of that line; otherwise it branches on a point outside the
/// span of `S`. A finished candidate goes through the projective recognizer
/// (plane-order check only at rank 3).
pub fn find_pg_restriction<M: Matroid + ?Sized>(
    m: &M,
    rank: usize,
    q: u64,
) -> Result<Option<SubsetMask>, MinorError> {
    if rank < 3 {
        return Err(MinorError::InvalidArgument(format!("PG restriction rank must be at least 3, got {rank}")));
    }
    if !is_prime_power(q) {
        return Err(MinorError::InvalidArgument(format!("{q} is not a prime power")));
    }
    if rank > m.full_rank() {
        return Ok(None);
    }
    let need = geometric_count(q, rank as u32).unwrap_or(u64::MAX) as usize;
    let idx = PointIndex::new(m);
    for flat in flats_of_rank(m, rank)? {
        let reps = idx.representatives_in(&flat);
        if reps.len() < need {
            continue;
        }
        let mut search = PgSearch::new(m, reps, rank, q as usize + 1, need);
        if let Some(found) = search.run() {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

struct PgSearch<'a, M: ?Sized> {
    m: &'a M,
    reps: Vec<usize>,
    rank: usize,
    line_size: usize,
    need: usize,
    /// `line[a][b]`: indices of reps on the line through reps `a` and `b`.
    line: Vec<Vec<SubsetMask>>,
}

impl<'a, M: Matroid + ?Sized> PgSearch<'a, M> {
    fn new(m: &'a M, reps: Vec<usize>, rank: usize, line_size: usize, need: usize) -> Self {
        let p = reps.len();
        let mut line = vec![vec![SubsetMask::new(); p]; p];
        for a in 0..p {
            for b in a + 1..p {
                if !line[a][b].is_empty() {
                    continue;
                }
                let flat = m.closure(&[reps[a], reps[b]].into_iter().collect());
                let on: SubsetMask = (0..p).filter(|&c| flat.contains(reps[c])).collect();
                for x in on.iter() {
                    for y in on.iter() {
                        line[x][y] = on.clone();
                    }
                }
            }
        }
        PgSearch { m, reps, rank, line_size, need, line }
    }

    fn base_set(&self, s: &SubsetMask) -> SubsetMask {
        s.iter().map(|i| self.reps[i]).collect()
    }

    fn addable(&self, s: &SubsetMask, c: usize) -> bool {
        let with = s.with(c);
        s.iter().all(|x| self.line[c][x].intersection(&with).len() <= self.line_size)
    }

    fn run(&mut self) -> Option<SubsetMask> {
        let all = SubsetMask::full(self.reps.len());
        self.grow(SubsetMask::new(), SubsetMask::new(), &all)
    }

    fn grow(&self, s: SubsetMask, excluded: SubsetMask, all: &SubsetMask) -> Option<SubsetMask> {
        let avail = all.difference(&s).difference(&excluded);
        if s.len() > self.need || s.len() + avail.len() < self.need {
            return None;
        }
        let deficient = s.iter().find_map(|a| {
            s.iter()
                .filter(|&b| b > a)
                .find(|&b| self.line[a][b].intersection(&s).len() < self.line_size)
                .map(|b| (a, b))
        });
        let candidates = match deficient {
            Some((a, b)) => self.line[a][b].intersection(&avail),
            None => {
                let base = self.base_set(&s);
                if self.m.rank(&base) == self.rank {
                    return self.accept(base);
                }
                let span = self.m.closure(&base);
                avail.iter().filter(|&c| !span.contains(self.reps[c])).collect()
            }
        };
        let mut excluded = excluded;
        for c in candidates.iter() {
            if self.addable(&s, c) {
                if let Some(found) = self.grow(s.with(c), excluded.clone(), all) {
                    return Some(found);
                }
            }
            excluded.insert(c);
        }
        None
    }

    fn accept(&self, base: SubsetMask) -> Option<SubsetMask> {
        if base.len() != self.need {
            return None;
        }
        let view = RestrictionView::new(self.m, base.clone()).ok()?;
        let order = is_projective_geometry(&view).ok()?.order()?;
        (order as usize + 1 == self.line_size).then_some(base)
    }
}
