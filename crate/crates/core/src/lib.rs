#![cfg_attr(not(feature = "std"), no_std)]
//! Ideal Proof System workbench core.
//!
//! Exact coefficient fields, sparse multivariate polynomials, restricted
//! circuit classes (powering formulas, roABPs, multilinear formulas, general
//! circuits), complexity measures, IPS certificates and the small-instance
//! hardness checks built on them. Needs only `alloc`.

extern crate alloc;

pub mod circuit;
pub mod error;
pub mod field;
pub mod hardness;
pub mod ips;
pub mod linalg;
pub mod measure;
pub mod poly;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};

pub use poly::{Monomial, MonomialOrder, SparsePoly, VarLayout};
