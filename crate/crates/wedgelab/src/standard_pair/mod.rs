//! One-particle representations: translations, modular objects, and the standard subspace.

mod membership;
mod rep;
mod transforms;
mod vector;

pub use membership::{check_h_membership, check_h_membership_with, MembershipOpts, MEMBERSHIP_LINES};
pub use rep::StandardPairRep;
pub use transforms::{
    bump_profile, half_line_transform, intertwining_residual, mass_shell, massive_intertwine, minkowski,
    verify_isometry, wedge_transform, IsometryCheck, PlaneFn, RealLineFn, TestFunction, TestFunction2,
    TransformSign, TRANSFORM_PROBES,
};
pub use vector::{ComponentEvaluator, OneParticleVector, SupportCertificate, VectorDomain};
