//! Trinomial data, exact polynomials in the `T_ij`, normal forms modulo
//! `(g)`, and the fine grading.

mod grading;
mod poly;
mod quotient;
mod trinomial;

pub use grading::{fine_grading, ExplicitGrading, FineGrading, GradingError, Homogeneity};
pub use poly::{Monomial, Polynomial};
pub use quotient::{
    decompose_homogeneous, decompose_over_blocks, mul_reduced, normal_form, BinaryForm,
    BlockDecomposition,
};
pub use trinomial::{TrinomialData, TrinomialError, Var};
