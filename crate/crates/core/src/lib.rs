//! Intersection type systems for the λ-calculus as checkable derivation trees.

pub mod approx;
pub mod corpus;
pub mod derivation;
pub mod format;
pub mod reduce;
pub mod term;
pub mod transform;
pub mod typability;
pub mod types;
