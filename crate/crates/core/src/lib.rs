//! Numerical model of the standard Hilbert module `ℓ²(A)` over a
//! finite-dimensional W*-algebra, truncated to `A^N`.
//!
//! The crate provides the algebra layer (`M_n(C)` and its diagonal
//! subalgebra), the module with its A-valued inner product, normal states,
//! the seminorm families generating the topologies `τ₁ ⊂ τ ⊂ τ₂`, adjointable
//! operators with the rank-one operators `Θ_{y,z}`, and the compactness
//! machinery: ε-nets, net distances, unit-ball separation, the commutative
//! counterexample and the witness construction for non-"compact" operators.

pub mod algebra;
pub mod check;
pub mod compactness;
pub mod error;
pub mod json;
pub mod module;
pub mod operators;
pub mod sampling;
pub mod states;
pub mod topology;

pub use algebra::{AlgebraDescriptor, AlgebraElement, C64};
pub use check::Check;
pub use error::{Error, Result};
pub use module::ModuleVector;
pub use operators::{ModuleOperator, OperatorTag};
pub use states::NormalState;
pub use topology::{AdmissibleWeights, SeminormKind, SeminormSpec};
