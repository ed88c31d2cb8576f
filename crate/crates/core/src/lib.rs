//! Matroids given by rank oracles, projective geometries over small finite
//! fields, and searches for long lines in minors.

pub mod certificate;
pub mod field;
pub mod geometry;
pub mod harness;
pub mod mask;
pub mod matrix_io;
pub mod matroid;
pub mod minors;
pub mod procedures;

pub use certificate::{verify_certificate, WitnessCertificate};
pub use field::FieldSpec;
pub use mask::SubsetMask;
pub use matroid::{AnyMatroid, Matroid, MatroidError};
