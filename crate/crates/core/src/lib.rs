//! Sharp weak-type estimates for dyadic-like maximal operators.
//!
//! Given the L¹ mass `f`, the L^q mass `A` and the weak-L^p norm `F` of a
//! nonnegative function `φ`, the largest possible measure of the level set
//! `{M_T φ ≥ λ}` of the tree maximal operator is
//!
//! ```text
//! min{ 1, G_{f,A}(λ), (F/λ)^p }
//! ```
//!
//! where `G_{f,A}` is the sharp bound under the L¹ and L^q constraints alone.
//! This crate evaluates that closed form ([`bounds`]), builds functions that
//! attain it ([`extremal`]), and certifies both directions on a concrete
//! m-adic tree over `[0, 1]` ([`sim`]).

pub mod bounds;
pub mod domain;
pub mod error;
pub mod extremal;
pub mod grid;
pub mod profile;
pub mod roots;
pub mod sim;

pub use bounds::{g_fa, solve_k, t1, t_scaled, weak_norm_sup, BoundBranch, BoundReport};
pub use domain::{domain_check, gamma, normalize, Boundary, ConstraintTriple, DomainVerdict, Exponents};
pub use error::{Error, Result};
pub use extremal::{extremizer_for, ExtremalBranch, ExtremalRecipe};
pub use grid::{extract_equal_average_block, GridFunction};
pub use profile::{Profile, Segment};
pub use sim::{maximal_operator, oracle_search, transplant, verify_sharpness, MaximalField, SharpnessReport, TreeSpec};
