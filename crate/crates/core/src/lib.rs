//! Shape descriptors for silhouette classification and retrieval.
//!
//! The crate provides six descriptor families over binary/gray silhouettes:
//!
//! - **GFD**: generic Fourier descriptor of the polar-resampled region.
//! - **MSGBD**: multi-scale gradient descriptor built from maximal steerable
//!   Gaussian-derivative responses along the boundary.
//! - **CBID**: compact descriptor of nearest-neighbour interpolated Harris
//!   corner radii.
//! - **ISD**: weighted concatenation of GFD and MSGBD.
//! - **EFD** and **CBFD**: elliptic and centroid-distance Fourier baselines.
//!
//! plus a random forest classifier and a two-stage CBID→ISD recognizer.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the pipeline and CLI
//! use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod descriptors;
pub mod error;
pub mod geometry;
pub mod imgproc;
pub mod learn;
pub mod pipeline;
pub mod scalar;
pub mod spectral;

pub use error::{Result, ShapeError};
pub use scalar::Scalar;

pub type GrayImage = imgproc::Image<f64>;
pub type GrayImageF32 = imgproc::Image<f32>;
pub type Raster = imgproc::Raster<f64>;
pub type Spectrum1D = spectral::Spectrum1D<f64>;
pub type Spectrum2D = spectral::Spectrum2D<f64>;
pub type Descriptor = descriptors::Descriptor<f64>;
pub type ExtractionConfig = descriptors::ExtractionConfig<f64>;
pub type ForestModel = learn::ForestModel<f64>;
pub type LabeledSet = learn::LabeledSet<f64>;
pub type Contour = geometry::Contour<f64>;
