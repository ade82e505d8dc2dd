//! Constrained Bayesian optimization of a parameterized plane truss.
//!
//! A five-variable trapezoidal truss ([`truss`]) is analyzed by the direct
//! stiffness method ([`fea`]) and its mass minimized under a yield-stress
//! constraint by a Gaussian-process surrogate ([`gp`]) driven by expected
//! improvement weighted with the probability of feasibility
//! ([`acquisition`], [`bo`]).
//!
//! The geometry, solver, surrogate and acquisition code is generic over
//! [`Scalar`] (`f32` or `f64`). The optimizer driver and the command-line
//! front end work in `f64`; the aliases below name the `f64` instances.

pub mod acquisition;
pub mod bo;
pub mod cli;
pub mod config;
pub mod fea;
pub mod gp;
pub mod linalg;
pub mod optim;
pub mod report;
pub mod scalar;
pub mod truss;

pub use scalar::Scalar;

pub type Design = truss::DesignParams<f64>;
pub type Derived = truss::DerivedDesign<f64>;
pub type Geometry = truss::TrussGeometry<f64>;
pub type Material = truss::Material<f64>;
pub type Section = truss::Section<f64>;
pub type Analysis = fea::FeaResult<f64>;
pub type Surrogate = gp::GpModel<f64>;
pub type Observations = gp::Dataset<f64>;
pub type Hyperparams = gp::GpHyperparams<f64>;

pub type Design32 = truss::DesignParams<f32>;
pub type Analysis32 = fea::FeaResult<f32>;
pub type Surrogate32 = gp::GpModel<f32>;
