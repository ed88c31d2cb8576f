use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    DirectSum, ExplicitMatroid, LinearMatroid, Matroid, MatroidError, MinorView, RestrictionView,
    UniformMatroid,
};
use crate::field::FieldSpec;
use crate::mask::SubsetMask;

/// An owned matroid of any supported representation.
#[derive(Clone, Debug)]
pub enum AnyMatroid {
    Linear(LinearMatroid),
    Uniform(UniformMatroid),
    Explicit(ExplicitMatroid),
    DirectSum(Box<DirectSum<AnyMatroid, AnyMatroid>>),
    Minor(Box<MinorView<Arc<AnyMatroid>>>),
    Restriction(Box<RestrictionView<Arc<AnyMatroid>>>),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            AnyMatroid::Linear($m) => $body,
            AnyMatroid::Uniform($m) => $body,
            AnyMatroid::Explicit($m) => $body,
            AnyMatroid::DirectSum($m) => $body,
            AnyMatroid::Minor($m) => $body,
            AnyMatroid::Restriction($m) => $body,
        }
    };
}

impl Matroid for AnyMatroid {
    fn ground_size(&self) -> usize {
        dispatch!(self, m => m.ground_size())
    }

    fn rank(&self, set: &SubsetMask) -> usize {
        dispatch!(self, m => m.rank(set))
    }

    fn full_rank(&self) -> usize {
        dispatch!(self, m => m.full_rank())
    }

    fn closure(&self, set: &SubsetMask) -> SubsetMask {
        dispatch!(self, m => m.closure(set))
    }
}

impl From<LinearMatroid> for AnyMatroid {
    fn from(m: LinearMatroid) -> Self {
        AnyMatroid::Linear(m)
    }
}

impl From<UniformMatroid> for AnyMatroid {
    fn from(m: UniformMatroid) -> Self {
        AnyMatroid::Uniform(m)
    }
}

impl From<ExplicitMatroid> for AnyMatroid {
    fn from(m: ExplicitMatroid) -> Self {
        AnyMatroid::Explicit(m)
    }
}

impl AnyMatroid {
    pub fn direct_sum(left: AnyMatroid, right: AnyMatroid) -> Result<Self, MatroidError> {
        Ok(AnyMatroid::DirectSum(Box::new(DirectSum::new(left, right)?)))
    }

    pub fn minor(base: Arc<AnyMatroid>, contract: SubsetMask, delete: SubsetMask) -> Result<Self, MatroidError> {
        Ok(AnyMatroid::Minor(Box::new(MinorView::new(base, contract, delete)?)))
    }

    pub fn restriction(base: Arc<AnyMatroid>, keep: SubsetMask) -> Result<Self, MatroidError> {
        Ok(AnyMatroid::Restriction(Box::new(RestrictionView::new(base, keep)?)))
    }

    pub fn as_linear(&self) -> Option<&LinearMatroid> {
        match self {
            AnyMatroid::Linear(m) => Some(m),
            _ => None,
        }
    }

    pub fn to_spec(&self) -> MatroidSpec {
        match self {
            AnyMatroid::Linear(m) => MatroidSpec::Linear {
                q: m.field().order() as u64,
                size: m.ground_size(),
                rows: m.rows().iter().map(|r| r.iter().map(|&x| x as u32).collect()).collect(),
            },
            AnyMatroid::Uniform(m) => MatroidSpec::Uniform { rank: m.full_rank(), size: m.ground_size() },
            AnyMatroid::Explicit(m) => MatroidSpec::Explicit { size: m.ground_size(), ranks: m.table().to_vec() },
            AnyMatroid::DirectSum(d) => MatroidSpec::DirectSum {
                left: Box::new(d.left().to_spec()),
                right: Box::new(d.right().to_spec()),
            },
            AnyMatroid::Minor(v) => MatroidSpec::Minor {
                base: Box::new(v.base().to_spec()),
                contract: v.contracted().clone(),
                delete: v.deleted().clone(),
            },
            AnyMatroid::Restriction(v) => MatroidSpec::Restriction {
                base: Box::new(v.base().to_spec()),
                keep: v.kept().clone(),
            },
        }
    }
}

/// Serializable description of an [`AnyMatroid`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatroidSpec {
    Linear { q: u64, size: usize, rows: Vec<Vec<u32>> },
    Uniform { rank: usize, size: usize },
    Explicit { size: usize, ranks: Vec<u8> },
    DirectSum { left: Box<MatroidSpec>, right: Box<MatroidSpec> },
    Minor { base: Box<MatroidSpec>, contract: SubsetMask, delete: SubsetMask },
    Restriction { base: Box<MatroidSpec>, keep: SubsetMask },
}

impl MatroidSpec {
    pub fn build(&self) -> Result<AnyMatroid, MatroidError> {
        Ok(match self {
            MatroidSpec::Linear { q, size, rows } => {
                let field = Arc::new(FieldSpec::new(*q)?);
                let rows = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|&x| {
                                u8::try_from(x).map_err(|_| MatroidError::InvalidMatrix(format!("entry {x} out of range")))
                            })
                            .collect::<Result<Vec<u8>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                AnyMatroid::Linear(LinearMatroid::with_size(field, rows, *size)?)
            }
            MatroidSpec::Uniform { rank, size } => AnyMatroid::Uniform(UniformMatroid::new(*rank, *size)?),
            MatroidSpec::Explicit { size, ranks } => {
                AnyMatroid::Explicit(ExplicitMatroid::from_table(*size, ranks.clone())?)
            }
            MatroidSpec::DirectSum { left, right } => AnyMatroid::direct_sum(left.build()?, right.build()?)?,
            MatroidSpec::Minor { base, contract, delete } => {
                AnyMatroid::minor(Arc::new(base.build()?), contract.clone(), delete.clone())?
            }
            MatroidSpec::Restriction { base, keep } => AnyMatroid::restriction(Arc::new(base.build()?), keep.clone())?,
        })
    }
}
