//! Resource theory of asymmetry for pure and mixed states under compact Lie group symmetry:
//! geometric-tensor measures, asymptotic conversion rates, covariant conversion channels
//! and finite-copy experiments.
//!
//! Everything is generic over [`Real`]; the root aliases fix the scalar to `f64`, with `F32`
//! variants for single precision.

pub mod chankit;
pub mod error;
pub mod measures;
pub mod numkit;
pub mod ratekit;
pub mod repkit;
pub mod scalar;
pub mod simkit;

pub use error::{Error, Result};

pub use numkit::ToleranceConfig;
pub use scalar::{Extended, Real};

pub type CMat = numkit::CMat<f64>;
pub type CMatF32 = numkit::CMat<f32>;
pub type CVec = numkit::CVec<f64>;
pub type CVecF32 = numkit::CVec<f32>;
pub type HermMatrix = numkit::HermMatrix<f64>;
pub type HermMatrixF32 = numkit::HermMatrix<f32>;
pub type PureState = numkit::PureState<f64>;
pub type PureStateF32 = numkit::PureState<f32>;
pub type DensityMatrix = numkit::DensityMatrix<f64>;
pub type DensityMatrixF32 = numkit::DensityMatrix<f32>;
pub type Representation = repkit::Representation<f64>;
pub type RepresentationF32 = repkit::Representation<f32>;
pub type RepPair = repkit::RepPair<f64>;
pub type RepPairF32 = repkit::RepPair<f32>;
pub type GroupPoint = repkit::GroupPoint<f64>;
pub type GroupPointF32 = repkit::GroupPoint<f32>;
pub type MetricSpec = measures::MetricSpec<f64>;
pub type MetricSpecF32 = measures::MetricSpec<f32>;
pub type AsymmetryTensor = measures::AsymmetryTensor<f64>;
pub type AsymmetryTensorF32 = measures::AsymmetryTensor<f32>;
pub type KrausChannel = chankit::KrausChannel<f64>;
pub type KrausChannelF32 = chankit::KrausChannel<f32>;
