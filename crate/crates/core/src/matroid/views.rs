use super::{check_subset, Matroid, MatroidError};
use crate::mask::SubsetMask;

const ABSENT: u32 = u32::MAX;

fn positions(n: usize, elements: &[usize]) -> Vec<u32> {
    let mut pos = vec![ABSENT; n];
    for (i, &e) in elements.iter().enumerate() {
        pos[e] = i as u32;
    }
    pos
}

/// `base / contract \ delete`, with the surviving elements renumbered
/// `0..` in increasing base order.
///
/// `rank(X) = r_base(X u C) - r_base(C)`.
#[derive(Clone, Debug)]
pub struct MinorView<M> {
    base: M,
    contract: SubsetMask,
    delete: SubsetMask,
    contract_rank: usize,
    elements: Vec<usize>,
    position: Vec<u32>,
}

impl<M: Matroid> MinorView<M> {
    pub fn new(base: M, contract: SubsetMask, delete: SubsetMask) -> Result<Self, MatroidError> {
        check_subset(&base, &contract)?;
        check_subset(&base, &delete)?;
        let overlap = contract.intersection(&delete);
        if !overlap.is_empty() {
            return Err(MatroidError::Overlap(overlap));
        }
        let n = base.ground_size();
        let elements: Vec<usize> = (0..n)
            .filter(|&e| !contract.contains(e) && !delete.contains(e))
            .collect();
        let position = positions(n, &elements);
        let contract_rank = base.rank(&contract);
        Ok(MinorView { base, contract, delete, contract_rank, elements, position })
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    pub fn contracted(&self) -> &SubsetMask {
        &self.contract
    }

    pub fn deleted(&self) -> &SubsetMask {
        &self.delete
    }

    /// Base index of view element `i`.
    pub fn base_index(&self, i: usize) -> usize {
        self.elements[i]
    }

    /// View subset to base indices (without the contracted set).
    pub fn to_base(&self, set: &SubsetMask) -> SubsetMask {
        set.iter().map(|i| self.elements[i]).collect()
    }

    /// Base subset to view indices; contracted and deleted elements are dropped.
    pub fn from_base(&self, set: &SubsetMask) -> SubsetMask {
        set.iter()
            .filter_map(|e| match self.position.get(e) {
                Some(&p) if p != ABSENT => Some(p as usize),
                _ => None,
            })
            .collect()
    }
}

impl<M: Matroid> Matroid for MinorView<M> {
    fn ground_size(&self) -> usize {
        self.elements.len()
    }

    fn rank(&self, set: &SubsetMask) -> usize {
        self.base.rank(&self.to_base(set).union(&self.contract)) - self.contract_rank
    }

    fn closure(&self, set: &SubsetMask) -> SubsetMask {
        self.from_base(&self.base.closure(&self.to_base(set).union(&self.contract)))
    }
}

/// `base | set`, renumbered in increasing base order.
#[derive(Clone, Debug)]
pub struct RestrictionView<M> {
    base: M,
    set: SubsetMask,
    elements: Vec<usize>,
    position: Vec<u32>,
}

impl<M: Matroid> RestrictionView<M> {
    pub fn new(base: M, set: SubsetMask) -> Result<Self, MatroidError> {
        check_subset(&base, &set)?;
        let elements = set.to_vec();
        let position = positions(base.ground_size(), &elements);
        Ok(RestrictionView { base, set, elements, position })
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    /// The kept elements, in base indices.
    pub fn kept(&self) -> &SubsetMask {
        &self.set
    }

    pub fn base_index(&self, i: usize) -> usize {
        self.elements[i]
    }

    pub fn to_base(&self, set: &SubsetMask) -> SubsetMask {
        set.iter().map(|i| self.elements[i]).collect()
    }

    pub fn from_base(&self, set: &SubsetMask) -> SubsetMask {
        set.iter()
            .filter_map(|e| match self.position.get(e) {
                Some(&p) if p != ABSENT => Some(p as usize),
                _ => None,
            })
            .collect()
    }
}

impl<M: Matroid> Matroid for RestrictionView<M> {
    fn ground_size(&self) -> usize {
        self.elements.len()
    }

    fn rank(&self, set: &SubsetMask) -> usize {
        self.base.rank(&self.to_base(set))
    }

    fn closure(&self, set: &SubsetMask) -> SubsetMask {
        self.from_base(&self.base.closure(&self.to_base(set)))
    }
}

/// `left (+) right` on the ground set `0..n1` followed by `n1..n1+n2`.
#[derive(Clone, Debug)]
pub struct DirectSum<A, B> {
    left: A,
    right: B,
    split: usize,
}

impl<A: Matroid, B: Matroid> DirectSum<A, B> {
    pub fn new(left: A, right: B) -> Result<Self, MatroidError> {
        let split = left.ground_size();
        let size = split + right.ground_size();
        if size > crate::mask::MAX_GROUND_SIZE {
            return Err(MatroidError::SizeLimit { size, limit: crate::mask::MAX_GROUND_SIZE });
        }
        Ok(DirectSum { left, right, split })
    }

    pub fn left(&self) -> &A {
        &self.left
    }

    pub fn right(&self) -> &B {
        &self.right
    }

    /// Ground set of the left summand.
    pub fn left_block(&self) -> SubsetMask {
        SubsetMask::full(self.split)
    }

    pub fn right_block(&self) -> SubsetMask {
        self.ground_set().difference(&self.left_block())
    }
}

impl<A: Matroid, B: Matroid> Matroid for DirectSum<A, B> {
    fn ground_size(&self) -> usize {
        self.split + self.right.ground_size()
    }

    fn rank(&self, set: &SubsetMask) -> usize {
        let (lo, hi) = set.split_at(self.split);
        self.left.rank(&lo) + self.right.rank(&hi)
    }

    fn full_rank(&self) -> usize {
        self.left.full_rank() + self.right.full_rank()
    }

    fn closure(&self, set: &SubsetMask) -> SubsetMask {
        let (lo, hi) = set.split_at(self.split);
        self.left.closure(&lo).union(&self.right.closure(&hi).shifted_up(self.split))
    }
}
