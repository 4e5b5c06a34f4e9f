//! Depth metrics, layout RMSE, aggregate indicators, losses and the
//! lightness/inverse-depth bias diagnostic.

mod bias;
mod losses;
mod metrics;
mod report;

pub use bias::{lightness, luminance_invdepth_pcc, pearson, srgb_to_linear};
pub use losses::{
    boundary_haversine_mean, haversine_layout_loss, log_l1_loss, surface_loss, total_loss,
    virtual_normal_loss, LayoutTerms, LossBreakdown, LossWeights, ScaleInputs, ScaleTerms,
    VirtualNormalOutcome, VirtualNormalParams, LOG_L1_ALPHA,
};
pub use metrics::{
    depth_indicator, depth_metrics, indicators, layout_indicator, layout_rmse, Indicators,
    MetricsReport,
};
pub use report::EvalReport;

use crate::error::{check_shape, Error, Result};
use crate::pano::{is_hole, spherical_row_weights, EquirectGrid};

/// Pixel validity plus a per-row weight used by averaged losses.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    valid: Vec<bool>,
    row_weights: Vec<f64>,
}

impl PixelMask {
    pub fn all(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            valid: vec![true; width * height],
            row_weights: vec![1.0; height],
        }
    }

    pub fn from_bools(width: usize, height: usize, valid: Vec<bool>) -> Result<Self> {
        if valid.len() != width * height {
            return Err(Error::Domain(format!(
                "mask {width}x{height} needs {} flags, got {}",
                width * height,
                valid.len()
            )));
        }
        Ok(Self {
            width,
            height,
            valid,
            row_weights: vec![1.0; height],
        })
    }

    /// Valid where the first channel is finite and non-zero.
    pub fn from_grid(grid: &EquirectGrid) -> Self {
        let (w, h) = grid.dims();
        let c = grid.channels();
        let valid = grid
            .data()
            .chunks(c)
            .map(|px| px[0].is_finite() && px[0] != 0.0)
            .collect();
        Self {
            width: w,
            height: h,
            valid,
            row_weights: vec![1.0; h],
        }
    }

    /// Valid where `depth` has no hole and lies in `[min, max]`.
    pub fn depth_range(depth: &EquirectGrid, min: f64, max: f64) -> Self {
        let (w, h) = depth.dims();
        let valid = (0..w * h)
            .map(|i| {
                let d = depth.get(i % w, i / w, 0);
                !is_hole(d) && (min..=max).contains(&(d as f64))
            })
            .collect();
        Self {
            width: w,
            height: h,
            valid,
            row_weights: vec![1.0; h],
        }
    }

    /// Same flags, rows weighted by `sin θ`.
    pub fn with_spherical_weights(mut self) -> Self {
        self.row_weights = spherical_row_weights(self.height);
        self
    }

    pub fn and(&self, other: &PixelMask) -> Result<Self> {
        check_shape(self.dims(), other.dims())?;
        let mut out = self.clone();
        for (a, b) in out.valid.iter_mut().zip(&other.valid) {
            *a = *a && *b;
        }
        Ok(out)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn is_valid(&self, u: usize, v: usize) -> bool {
        self.valid[v * self.width + u]
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn row_weights(&self) -> &[f64] {
        &self.row_weights
    }

    pub fn count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn roll_columns(&self, offset: isize) -> Self {
        let w = self.width as isize;
        let mut out = self.clone();
        for v in 0..self.height {
            for u in 0..self.width {
                let src = (u as isize - offset).rem_euclid(w) as usize;
                out.valid[v * self.width + u] = self.valid[v * self.width + src];
            }
        }
        out
    }
}

/// Weighted mean over valid pixels of `f(u, v)`; `None` skips the pixel.
pub(crate) fn masked_mean<F>(mask: &PixelMask, mut f: F) -> Option<f64>
where
    F: FnMut(usize, usize) -> Option<f64>,
{
    let (w, h) = mask.dims();
    let (mut num, mut den) = (0.0, 0.0);
    for v in 0..h {
        let wt = mask.row_weights[v];
        for u in 0..w {
            if !mask.is_valid(u, v) {
                continue;
            }
            if let Some(x) = f(u, v) {
                num += wt * x;
                den += wt;
            }
        }
    }
    (den > 0.0).then(|| num / den)
}
