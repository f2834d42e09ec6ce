//! Deterministic photometric and geometric preprocessing for low-light
//! Gaussian-Splatting pipelines.
//!
//! The crate is organized around two halves of the preprocessing problem:
//!
//! - **Photometric**: Naka–Rushton low-light enhancement ([`naka`]),
//!   frequency-decoupled chroma correction ([`chroma`]), and the mask-guided
//!   compound objective used to fit and evaluate corrections ([`objective`]),
//!   all built on the planar float image container in [`image`].
//! - **Geometric**: the point preprocessing module ([`ppm`]): similarity
//!   alignment from camera centers, voxel pooling, and distance-adaptive
//!   progressive pruning, turning dense, noisy point-cloud priors into
//!   compact initialization sets.
//!
//! [`io`] provides bit-exact readers and writers (PLY, PNG, correction-map
//! rasters, camera and pipeline-config JSON). Everything is deterministic:
//! stochastic pruning draws come from a counter-based generator in [`rng`],
//! so results are reproducible for a fixed seed regardless of scheduling.

pub mod chroma;
pub mod error;
pub mod image;
pub mod io;
pub mod naka;
pub mod objective;
pub mod ppm;
pub mod rng;

pub use error::{Error, Result};
