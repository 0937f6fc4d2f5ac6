//! Matrix-valued scattering functions on the rapidity strip, example families and axiom validators.

pub mod block;
pub mod builders;
pub mod function;
pub mod validate;

pub use block::{assemble_block_diagonal, block_mask};
pub use builders::{
    constant, constant_identity, flip_lr_unchecked, lr_constant, lr_identity, lr_scalar, on_template, scalar_constant,
    scalar_family, scalar_function, sinh_factor, sinh_product, tensor_square, ScalarFn,
};
pub use function::{Convention, Domain, Kind, MatrixEvaluator, MatrixScatteringFunction};
pub use validate::{
    analyticity_entries, build_flip_lr, check_crossing, check_flip_symmetry, check_hermitian_analyticity,
    check_internal_symmetry, check_mass_compatibility, check_mixed_ybe, check_reflection_symmetry, check_tcp,
    check_unitarity, check_ybe, left_mixed_ybe_residual, ll_suite, lr_suite, right_mixed_ybe_residual, CrossingMode,
    MassAssignment, Tolerances,
};
