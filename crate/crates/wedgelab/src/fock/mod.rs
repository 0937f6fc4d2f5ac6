//! Truncated R-symmetric Fock space: braiding, projector, second quantization and fields.

mod braiding;
mod norms;
mod ops;
mod vector;

pub use braiding::{BraidingData, MAX_SUM_RANK};
pub use norms::{
    braid_relation_residual, dense_matrix, flip_product_identity_check, operator_norm, projector_residuals,
    representation_residual, word_difference, DENSE_LIMIT, POWER_ITERATIONS,
};
pub use ops::{
    annihilate, check_particle_bounds, create, create_with, hat_second_quantize, reflected_field,
    reflected_field_with, second_quantize, segal_field, AntilinearOp, CreateMethod, HatSecondQuantized,
    OneParticleOp, ReflectedRoute, SecondQuantized, PROBES,
};
pub use vector::FockVector;
