//! Semiring programs: a logical theory, a commutative semiring and a weight
//! or measure specification, evaluated to the count `#(φ, w)`.
//!
//! ```
//! let prog = spc_core::lang::parse(
//!     "(set-logic PL) (set-algebra [NAT,+,0])
//!      (declare-predicate p ()) (declare-predicate q ())
//!      (count (p or q))",
//! ).unwrap();
//! let r = spc_core::engine::count(&prog, &Default::default()).unwrap();
//! assert_eq!(r.value.to_string(), "3");
//! ```

pub mod compose;
pub mod engine;
pub mod error;
pub mod finite;
pub mod lang;
pub mod logic;
pub mod measure;
pub mod result;
pub mod scalar;
pub mod semiring;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact scalar used on the reference path.
pub type Rational = num_rational::BigRational;
/// Float scalar used on the approximate path.
pub type Real = f64;
