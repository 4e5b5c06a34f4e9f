//! Geometric core for spherical layout-and-depth processing on
//! equirectangular panoramas.
//!
//! The crate covers the non-learned half of a joint layout/depth pipeline:
//!
//! - [`pano`]: the equirectangular grid, pixel/angle/Cartesian conversions,
//!   depth lifting and normals from depth.
//! - [`synth`]: an analytic cuboid-room renderer used as ground truth.
//! - [`labeling`]: semantic-to-layout class mapping and dense CRF refinement.
//! - [`boundary`]: greedy boundary extraction plus median/MAD cleanup.
//! - [`recon`]: bottom-boundary reconstruction from the top boundary and depth.
//! - [`attention`]: layout-derived attention maps and residual application.
//! - [`eval`]: depth metrics, layout RMSE, indicators, losses, lighting bias.
//! - [`transforms`]: modality-consistent panorama augmentations.
//! - [`io`]: PFM, boundary JSON, label PNG and pipeline configuration.
//! - [`pipeline`]: the full cue extraction chain.

pub mod attention;
pub mod boundary;
pub mod error;
pub mod eval;
pub mod io;
pub mod labeling;
pub mod pano;
pub mod pipeline;
pub mod recon;
mod stats;
pub mod synth;
pub mod transforms;

pub use error::{Error, Result};
