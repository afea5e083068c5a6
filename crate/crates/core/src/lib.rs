//! Learning-unlearning schemes with small deletion tickets.

pub mod agnostic;
pub mod bits;
pub mod central;
pub mod chain;
pub mod ctz;
pub mod domain;
pub mod error;
pub mod gf2;
pub mod mergeable;
pub mod scheme;
pub mod sharp;
pub mod sperner;
pub mod tree;

pub use bits::{bits_for, BitReader, BitString};
pub use domain::{ConceptClass, Dataset, Example, ExplicitTable, Hypothesis, Point};
pub use error::{Error, Result};
