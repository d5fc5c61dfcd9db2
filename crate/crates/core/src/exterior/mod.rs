//! Exterior calculus on coordinate charts.
//!
//! Forms keep strictly increasing multi-indices only; reordering signs are
//! applied when terms are built. Coefficients may be symbolic
//! ([`ScalarField`](crate::fieldexpr::ScalarField)), plain numbers, or
//! Taylor jets, which is how `d` is evaluated pointwise.

mod fields;
mod form;
mod ops;

pub use fields::{symmetric_from_products, GraphMap, OperatorField, SymmetricTensorField, VectorField};
pub use form::{sort_with_sign, Coeff, DifferentialForm, Form, FormJson, TermJson};
pub use ops::{form_from_operator, is_nondegenerate, operator_at, operator_from_pair, signature};
