//! File formats: PFM float maps, boundary JSON, label and color PNG, and
//! the pipeline configuration.

mod boundary_json;
mod config;
mod image;
mod pfm;

pub use boundary_json::{boundary_from_json, boundary_to_json, read_boundary, write_boundary};
pub use config::{CueParams, LossParams, MetricParams, PipelineConfig, SynthParams};
pub use image::{
    palette_json, palette_path, read_color_png, read_label_png, read_layout_png, write_color_png,
    write_layout_png,
};
pub use pfm::{decode_pfm, encode_pfm, read_pfm, write_pfm};
