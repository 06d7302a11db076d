//! λ-brackets and operator products of normally ordered fields, lattice
//! vertex operators, screening zero modes, and an independent mode-algebra
//! oracle.

mod engine;
mod expr;
mod grammar;
mod lambda;
mod oracle;
mod presentation;

pub use engine::{Engine, DEFAULT_BUDGET};
pub use expr::{ExponentVector, Factor, FieldExpr, GenId, Monomial, Parity};
pub use grammar::{canonicalize, canonicalize_randomized, format_expr, format_ope, parse_expr, parse_raw, RawExpr};
pub use lambda::{
    lambda_bracket, ope, skew, vop_product, zero_mode_action, zero_mode_direct, LambdaPoly, OpeResult,
    ScreeningField, VopProduct,
};
pub use oracle::{mode_oracle, ModeOracle, ModeWord, OracleTable, State};
pub use presentation::{GeneratorDecl, Presentation};

#[cfg(test)]
mod tests;
