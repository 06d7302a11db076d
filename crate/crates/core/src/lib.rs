pub mod brst;
pub mod error;
pub mod freefields;
pub mod invred;
pub mod opecore;
pub mod rootdata;
pub mod scalars;

pub use error::{Error, Result};
pub use scalars::{Coefficient, Rational, Scalar};

/// Field expression with coefficients in ℚ(k).
pub type Expr = opecore::FieldExpr<Scalar>;
