//! Weak layout cue extraction: semantic labels, normals and depth in;
//! cleaned top boundary, reconstructed bottom boundary and validity out.

use crate::boundary::{
    greedy_vertical_edges, mad_reject, median_filter_boundary, BoundaryKind, BoundaryVector,
    MadReport,
};
use crate::error::{check_shape, Result};
use crate::io::{CueParams, PipelineConfig};
use crate::labeling::{
    build_unary, crf_refine, map_to_layout_classes, ClassMapping, CrfParams, LabelMap,
    LayoutClassMap,
};
use crate::pano::EquirectGrid;
use crate::recon::{
    estimate_plane_heights, layout_validity, reconstruct_bottom, reconstruct_bottom_exact,
    sample_depth_at_boundary, LayoutValidity, PlaneHeights, ReconParams,
};

/// Parameters of every stage of [`extract_cues`].
#[derive(Debug, Clone, PartialEq)]
pub struct CueConfig {
    pub mapping: ClassMapping,
    pub crf: CrfParams,
    pub recon: ReconParams,
    pub cues: CueParams,
}

impl Default for CueConfig {
    fn default() -> Self {
        Self {
            mapping: ClassMapping::identity(),
            crf: CrfParams::default(),
            recon: ReconParams::default(),
            cues: CueParams::default(),
        }
    }
}

impl CueConfig {
    pub fn from_pipeline(cfg: &PipelineConfig) -> Result<Self> {
        Ok(Self {
            mapping: cfg.class_mapping()?,
            crf: cfg.crf,
            recon: cfg.recon,
            cues: cfg.cues,
        })
    }
}

/// Every intermediate of the chain, in order.
#[derive(Debug, Clone)]
pub struct CueOutputs {
    pub layout: LayoutClassMap,
    pub refined: LayoutClassMap,
    pub greedy_top: BoundaryVector,
    pub greedy_bottom: BoundaryVector,
    pub median_top: BoundaryVector,
    pub top: BoundaryVector,
    pub mad: MadReport,
    /// Error text when the plane heights could not be estimated.
    pub heights: std::result::Result<PlaneHeights, String>,
    pub radii: Vec<Option<f64>>,
    pub bottom: BoundaryVector,
    pub validity: LayoutValidity,
}

/// Runs mapping, unary construction, CRF refinement, greedy edge search,
/// median filtering, MAD rejection, bottom reconstruction and validity.
///
/// An unreconstructable scene is not an error: the bottom boundary comes
/// back all-invalid and the validity flags say so.
pub fn extract_cues(
    labels: &LabelMap,
    normals: &EquirectGrid,
    depth: &EquirectGrid,
    cfg: &CueConfig,
) -> Result<CueOutputs> {
    cfg.cues.validate()?;
    check_shape(labels.dims(), normals.dims())?;
    check_shape(labels.dims(), depth.dims())?;
    let layout = map_to_layout_classes(labels, &cfg.mapping)?;
    let unary = build_unary(&layout, cfg.cues.confidence)?;
    let refined = crf_refine(&unary, normals, &cfg.crf)?;
    let (greedy_top, greedy_bottom) = greedy_vertical_edges(&refined);
    let median_top = median_filter_boundary(&greedy_top, cfg.cues.median_window)?;
    let (top, mad) = mad_reject(&median_top, cfg.cues.mad_z);
    let heights = estimate_plane_heights(depth, &cfg.recon);
    let radii = sample_depth_at_boundary(depth, &top, cfg.recon.w)?;
    let bottom = match &heights {
        Ok(h) if cfg.cues.exact => reconstruct_bottom_exact(&top, &radii, h)?,
        Ok(h) => reconstruct_bottom(&top, &radii, h)?,
        Err(_) => BoundaryVector::invalid(BoundaryKind::Bottom, top.width()),
    };
    let validity = layout_validity(&top, &radii, &heights, cfg.recon.min_valid_fraction);
    Ok(CueOutputs {
        layout,
        refined,
        greedy_top,
        greedy_bottom,
        median_top,
        top,
        mad,
        heights: heights.map_err(|e| e.to_string()),
        radii,
        bottom,
        validity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::eval::layout_rmse;
    use crate::labeling::LabelMap;
    use crate::synth::{render_cuboid, CuboidScene};

    fn labels_of(map: &LayoutClassMap) -> LabelMap {
        let (w, h) = map.dims();
        LabelMap::new(w, h, map.ids().into_iter().map(u32::from).collect()).unwrap()
    }

    #[test]
    fn oracle_room_recovers_boundaries() {
        let scene = CuboidScene::sample(3, 128, 64, false);
        let r = render_cuboid(&scene).unwrap();
        let out = extract_cues(
            &labels_of(&r.labels),
            &r.normals,
            &r.depth,
            &CueConfig::default(),
        )
        .unwrap();
        let px = std::f64::consts::PI / 64.0;
        assert!(layout_rmse(&out.top, &r.top, None).unwrap() < 2.0 * px);
        assert!(layout_rmse(&out.bottom, &r.bottom, None).unwrap() < 3.0 * px);
        assert!(out.validity.scene_valid);
    }

    #[test]
    fn unmapped_label_and_holes() {
        let scene = CuboidScene::sample(4, 32, 16, true);
        let r = render_cuboid(&scene).unwrap();
        let mut cfg = CueConfig::default();
        cfg.mapping = ClassMapping::new();
        let err = extract_cues(&labels_of(&r.labels), &r.normals, &r.depth, &cfg).unwrap_err();
        assert!(matches!(err, Error::UnmappedLabel(_)));

        let empty = EquirectGrid::new(32, 16, 1).unwrap();
        let out = extract_cues(
            &labels_of(&r.labels),
            &r.normals,
            &empty,
            &CueConfig::default(),
        )
        .unwrap();
        assert!(out.heights.is_err());
        assert_eq!(out.bottom.valid_count(), 0);
        assert!(!out.validity.scene_valid);
    }
}
