//! Exact symbolic-numeric toolkit for a three-dimensional superintegrable
//! quantum model with four coupling parameters.
//!
//! The crate has three layers:
//!
//! * [`weyl`] / [`param`] / [`scalar`] / [`parse`]: an exact Weyl-algebra
//!   engine over Q(i)[c1..c4] with Laurent position powers, normal ordering,
//!   commutators, formal adjoints, and a round-tripping text form.
//! * [`model`] / [`fit`]: the model's sixteen named integrals of motion, the
//!   audited quadratic symmetry algebra among them, exact span-fitting of
//!   structure constants, and the two cubic Casimir operators.
//! * [`qalg`] / [`numeric`]: the generic three-generator quadratic-algebra
//!   machinery (Casimir, structure functions, finite-dimensional unirrep
//!   constraints) that produces the algebraic spectrum, plus independent
//!   finite-difference eigensolvers and closed-form cross-checks.

pub mod error;
pub mod fit;
pub mod model;
pub mod numeric;
pub mod param;
pub mod parse;
pub mod qalg;
pub mod scalar;
pub mod weyl;

pub use error::{DomainError, WeylError};
pub use param::{param_degree_cap, set_param_degree_cap, Coefficient, ParamMonomial};
pub use parse::{parse_and_lower, parse_operator, ExprError, ParseError};
pub use scalar::GaussianRational;
pub use weyl::{normal_order_word, OperatorExpr, WeylMonomial};
