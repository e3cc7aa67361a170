//! Hyperbolic network generation and embedding on the native disk.
//!
//! - [`pso`]: PSO, generalised PSO and E-PSO growth models.
//! - [`likelihood`]: the E-PSO logarithmic loss, degree-ordered radial
//!   coordinates and parameter estimation.
//! - [`ncmce`]: repulsion-attraction pre-weighting, minimum curvilinear
//!   distances and the SVD-based angular ordering.
//! - [`angular`]: local log-loss search over angular positions.
//! - [`hypermap`]: degree-ordered insertion baseline.
//! - [`quality`]: greedy routing, densification curves and best-of-n
//!   statistics.
//! - [`pipeline`]: method dispatch, reports and repeated runs.
//! - [`coords`]: coordinate file reading and writing.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision case.

pub mod angular;
pub mod coords;
pub mod error;
pub mod graph;
pub mod hypermap;
pub mod hyperbolic;
pub mod likelihood;
pub mod ncmce;
pub mod params;
pub mod pipeline;
pub mod pso;
pub mod quality;
pub mod scalar;

pub use angular::{OptimizationTrace, OptimizerSchedule};
pub use error::{Error, Result};
pub use graph::{DegreeKind, DegreeVector, Graph, WeightedGraph};
pub use hyperbolic::{Curvature, PolarCoord};
pub use likelihood::{Embedding, LossBreakdown};
pub use ncmce::SimilarityMatrix;
pub use params::EpsoParams;
pub use pipeline::{EmbedConfig, EmbedMethod};
pub use pso::GeneratedNetwork;
pub use quality::{ExtremeValueFit, QualityReport};
pub use scalar::Real;

pub type PolarCoord64 = PolarCoord<f64>;
pub type PolarCoord32 = PolarCoord<f32>;
pub type EpsoParams64 = EpsoParams<f64>;
pub type EpsoParams32 = EpsoParams<f32>;
pub type Embedding64 = Embedding<f64>;
pub type Embedding32 = Embedding<f32>;
pub type LossBreakdown64 = LossBreakdown<f64>;
pub type WeightedGraph64 = WeightedGraph<f64>;
pub type SimilarityMatrix64 = SimilarityMatrix<f64>;
pub type GeneratedNetwork64 = GeneratedNetwork<f64>;
pub type ExtremeValueFit64 = ExtremeValueFit<f64>;
