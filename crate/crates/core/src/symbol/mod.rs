//! Exact Laurent-polynomial algebra over the dyadic rationals: masks and
//! their symbols, sum rules, reduction modulo the quotient ideal and the
//! matrix-valued representation masks.

mod dyadic;
mod ideal;
mod matrix;
mod poly;

pub use dyadic::{Dyadic, GaussianDyadic, Scalar};
pub use ideal::{
    coset_sums, cross_generator, difference, dilated_difference_symbol, evaluate_at_root, hbasis_reduce,
    representation_mask, s_poly, sum_rule_by_evaluation, sum_rule_check, sum_rule_for_lattice,
    verify_representation, z1_binomial, z2_binomial, HBasisReduction, QUOTIENT_MONOMIALS,
};
pub use matrix::MatrixMask;
pub use poly::{Exp, LaurentPoly};
