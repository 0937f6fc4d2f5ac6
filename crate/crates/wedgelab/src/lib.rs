//! Numerical toolkit for matrix-valued factorizing S-matrices on a discretized rapidity line.
//!
//! The core is generic over the real scalar type (`f32` or `f64`); the aliases at the crate root
//! fix it to `f64`.

pub mod error;
pub mod fock;
pub mod linalg;
pub mod locality;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod scattering;
pub mod standard_pair;
pub mod tensor;

pub use error::{Error, Result};
pub use report::{ReportEntry, ValidationReport};
pub use scalar::{Real, C};

pub type Complex64 = C<f64>;
pub type Matrix = linalg::CMatrix<f64>;
pub type Grid = tensor::RapidityGrid<f64>;
pub type Leg = tensor::LegSpace<f64>;
pub type Tensor = tensor::LeggedTensor<f64>;
pub type ScatteringFunction = scattering::MatrixScatteringFunction<f64>;
pub type Vector = standard_pair::OneParticleVector<f64>;
pub type Representation = standard_pair::StandardPairRep<f64>;
pub type Braiding = fock::BraidingData<f64>;
pub type Fock = fock::FockVector<f64>;
pub type Bundle = locality::TripleBundle<f64>;
