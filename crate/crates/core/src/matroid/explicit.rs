use serde::{Deserialize, Serialize};

use super::{Matroid, MatroidError};
use crate::mask::SubsetMask;

pub const MAX_EXPLICIT_SIZE: usize = 20;

/// A matroid stored as its full rank table, indexed by subset bitmask.
///
/// Construction checks the rank axioms in their local form: `r(empty) = 0`,
/// unit increments, and `r(X+e) + r(X+f) >= r(X+e+f) + r(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ExplicitRepr", into = "ExplicitRepr")]
pub struct ExplicitMatroid {
    size: usize,
    ranks: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct ExplicitRepr {
    size: usize,
    ranks: Vec<u8>,
}

impl TryFrom<ExplicitRepr> for ExplicitMatroid {
    type Error = MatroidError;
    fn try_from(r: ExplicitRepr) -> Result<Self, MatroidError> {
        ExplicitMatroid::from_table(r.size, r.ranks)
    }
}

impl From<ExplicitMatroid> for ExplicitRepr {
    fn from(m: ExplicitMatroid) -> Self {
        ExplicitRepr { size: m.size, ranks: m.ranks }
    }
}

impl ExplicitMatroid {
    pub fn from_table(size: usize, ranks: Vec<u8>) -> Result<Self, MatroidError> {
        if size > MAX_EXPLICIT_SIZE {
            return Err(MatroidError::SizeLimit { size, limit: MAX_EXPLICIT_SIZE });
        }
        if ranks.len() != 1 << size {
            return Err(MatroidError::InvalidRank(format!(
                "rank table has {} entries, expected {}",
                ranks.len(),
                1usize << size
            )));
        }
        check_local_axioms(size, &ranks)?;
        Ok(ExplicitMatroid { size, ranks })
    }

    pub fn from_rank_fn(size: usize, f: impl Fn(u32) -> usize) -> Result<Self, MatroidError> {
        if size > MAX_EXPLICIT_SIZE {
            return Err(MatroidError::SizeLimit { size, limit: MAX_EXPLICIT_SIZE });
        }
        let ranks = (0..1u32 << size).map(|x| f(x) as u8).collect();
        Self::from_table(size, ranks)
    }

    /// Copies the rank function of `m` onto a table.
    pub fn from_matroid<M: Matroid + ?Sized>(m: &M) -> Result<Self, MatroidError> {
        Self::from_rank_fn(m.ground_size(), |x| m.rank(&SubsetMask::from_bits(x as u64)))
    }

    pub fn table(&self) -> &[u8] {
        &self.ranks
    }

    #[inline]
    pub fn rank_bits(&self, bits: u32) -> usize {
        self.ranks[bits as usize] as usize
    }
}

fn check_local_axioms(n: usize, ranks: &[u8]) -> Result<(), MatroidError> {
    if ranks.first().copied().unwrap_or(0) != 0 {
        return Err(MatroidError::InvalidRank("rank of the empty set is not 0".into()));
    }
    for x in 0..ranks.len() {
        let rx = ranks[x] as i32;
        for e in 0..n {
            if x & (1 << e) != 0 {
                continue;
            }
            let re = ranks[x | 1 << e] as i32;
            if re != rx && re != rx + 1 {
                return Err(MatroidError::InvalidRank(format!(
                    "adding {e} to {x:#b} changes rank by {}",
                    re - rx
                )));
            }
            for f in e + 1..n {
                if x & (1 << f) != 0 {
                    continue;
                }
                let rf = ranks[x | 1 << f] as i32;
                let ref_ = ranks[x | 1 << e | 1 << f] as i32;
                if re + rf < ref_ + rx {
                    return Err(MatroidError::InvalidRank(format!(
                        "submodularity fails at {x:#b} with {e}, {f}"
                    )));
                }
            }
        }
    }
    Ok(())
}

impl Matroid for ExplicitMatroid {
    fn ground_size(&self) -> usize {
        self.size
    }

    fn rank(&self, set: &SubsetMask) -> usize {
        let bits = set.as_u64().expect("explicit matroids have at most 20 elements");
        self.ranks[bits as usize] as usize
    }
}
