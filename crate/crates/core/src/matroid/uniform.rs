use super::{Matroid, MatroidError};
use crate::mask::{SubsetMask, MAX_GROUND_SIZE};

/// `U_{r,n}`: every set of at most `r` elements is independent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniformMatroid {
    rank: usize,
    size: usize,
}

impl UniformMatroid {
    pub fn new(rank: usize, size: usize) -> Result<Self, MatroidError> {
        if rank > size {
            return Err(MatroidError::InvalidRank(format!("U({rank},{size}) needs rank <= size")));
        }
        if size > MAX_GROUND_SIZE {
            return Err(MatroidError::SizeLimit { size, limit: MAX_GROUND_SIZE });
        }
        Ok(UniformMatroid { rank, size })
    }

    /// The `n`-point line `U_{2,n}`.
    pub fn line(n: usize) -> Result<Self, MatroidError> {
        Self::new(2, n)
    }
}

impl Matroid for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.size
    }

    fn rank(&self, set: &SubsetMask) -> usize {
        set.len().min(self.rank)
    }

    fn full_rank(&self) -> usize {
        self.rank
    }

    fn closure(&self, set: &SubsetMask) -> SubsetMask {
        if set.len() >= self.rank {
            self.ground_set()
        } else {
            set.clone()
        }
    }
}
