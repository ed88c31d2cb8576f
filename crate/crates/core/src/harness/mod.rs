//! Experiments over catalogs of small matroids: catalog generation and
//! caching, brute-force oracles, and the bound-verification census.

use thiserror::Error;

use crate::field::FieldError;
use crate::geometry::GeometryError;
use crate::matroid::MatroidError;
use crate::minors::MinorError;
use crate::procedures::ProcedureError;

pub mod catalog;
pub mod census;
pub mod config;
pub mod oracles;

pub use catalog::{Catalog, CatalogMember, CatalogSpec, BUILTIN_CATALOGS};
pub use census::{check_kung_bound, density_profile, extremal_census, CensusOptions, CensusReport};
pub use config::Config;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown catalog {0:?}")]
    UnknownCatalog(String),
    #[error("unknown named matroid {0:?}")]
    UnknownNamed(String),
    #[error("catalog member {key} is not a matroid: {detail}")]
    InvalidMember { key: String, detail: String },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("ground set of size {size} exceeds the oracle limit {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Minor(#[from] MinorError),
    #[error(transparent)]
    Procedure(#[from] ProcedureError),
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}
