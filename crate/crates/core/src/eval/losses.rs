use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{masked_mean, PixelMask};
use crate::boundary::BoundaryVector;
use crate::error::{check_shape, Error, Result};
use crate::pano::{
    haversine_lat, is_hole, lift_depth, normal_is_valid, normals_from_depth, Cart3, EquirectGrid,
};

/// Offset inside the log-L1 depth loss.
pub const LOG_L1_ALPHA: f64 = 0.5;

/// Mean `|h|` (or signed `h`) over meridians valid in both boundaries and in
/// `mask`. Zero when nothing is valid.
pub fn boundary_haversine_mean(
    pred: &BoundaryVector,
    gt: &BoundaryVector,
    mask: &[bool],
    absolute: bool,
) -> Result<f64> {
    if pred.width() != gt.width() || mask.len() != gt.width() {
        return Err(Error::ShapeMismatch {
            expected: (gt.width(), 1),
            found: (pred.width(), mask.len()),
        });
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for u in 0..gt.width() {
        if !mask[u] {
            continue;
        }
        if let (Some(p), Some(g)) = (pred.latitude(u), gt.latitude(u)) {
            let h = haversine_lat(g, p);
            sum += if absolute { h.abs() } else { h };
            n += 1;
        }
    }
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

/// Masked mean absolute haversine error of the top boundary plus that of the
/// bottom boundary.
pub fn haversine_layout_loss(
    pred_top: &BoundaryVector,
    gt_top: &BoundaryVector,
    pred_bottom: &BoundaryVector,
    gt_bottom: &BoundaryVector,
    top_mask: &[bool],
    bottom_mask: &[bool],
) -> Result<f64> {
    Ok(boundary_haversine_mean(pred_top, gt_top, top_mask, true)?
        + boundary_haversine_mean(pred_bottom, gt_bottom, bottom_mask, true)?)
}

fn positive_on_mask(pred: &EquirectGrid, gt: &EquirectGrid, mask: &PixelMask) -> Result<()> {
    check_shape(gt.dims(), pred.dims())?;
    check_shape(gt.dims(), mask.dims())?;
    let (w, h) = gt.dims();
    for v in 0..h {
        for u in 0..w {
            if mask.is_valid(u, v) && (is_hole(pred.get(u, v, 0)) || is_hole(gt.get(u, v, 0))) {
                return Err(Error::Domain(format!(
                    "depths must be positive on the mask, pixel ({u}, {v}) is not"
                )));
            }
        }
    }
    Ok(())
}

/// Weighted mean of `ln(|p − g| + alpha)`.
pub fn log_l1_loss(
    pred: &EquirectGrid,
    gt: &EquirectGrid,
    mask: &PixelMask,
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Config(format!(
            "log-L1 offset must be positive, got {alpha}"
        )));
    }
    positive_on_mask(pred, gt, mask)?;
    masked_mean(mask, |u, v| {
        let d = (pred.get(u, v, 0) as f64 - gt.get(u, v, 0) as f64).abs();
        Some((d + alpha).ln())
    })
    .ok_or(Error::EmptySet("log-L1 loss"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VirtualNormalParams {
    /// Triplets drawn as a fraction of the valid pixel count.
    pub sample_ratio: f64,
    /// Triangles with any angle outside `[min_angle_deg, 180 − min_angle_deg]`
    /// are rejected.
    pub min_angle_deg: f64,
    /// Triangles with a side shorter than this, in meters, are rejected.
    pub min_side_m: f64,
    pub seed: u64,
}

impl Default for VirtualNormalParams {
    fn default() -> Self {
        Self {
            sample_ratio: 0.15,
            min_angle_deg: 15.0,
            min_side_m: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualNormalOutcome {
    pub loss: f64,
    pub sampled: usize,
    pub accepted: usize,
}

fn triangle_ok(p: [Cart3; 3], min_angle: f64, max_angle: f64, min_side: f64) -> bool {
    for i in 0..3 {
        let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
        let (e1, e2) = (b - a, c - a);
        if e1.norm() < min_side {
            return false;
        }
        let angle = e1.angle(&e2);
        if !(angle >= min_angle && angle <= max_angle) {
            return false;
        }
    }
    true
}

fn plane_normal(p: [Cart3; 3]) -> Option<Cart3> {
    let n = (p[1] - p[0]).cross(&(p[2] - p[0]));
    let len = n.norm();
    (len > 0.0 && len.is_finite()).then(|| n / len)
}

/// Mean L1 difference between unit normals of seeded point triplets lifted
/// from the predicted and ground-truth depth at the same pixels. Triplets
/// are screened on the ground truth. No accepted triplet gives zero loss
/// with `accepted = 0`.
pub fn virtual_normal_loss(
    pred: &EquirectGrid,
    gt: &EquirectGrid,
    mask: &PixelMask,
    params: &VirtualNormalParams,
) -> Result<VirtualNormalOutcome> {
    positive_on_mask(pred, gt, mask)?;
    let (w, _) = gt.dims();
    let pixels: Vec<usize> = mask
        .valid()
        .iter()
        .enumerate()
        .filter_map(|(i, &ok)| ok.then_some(i))
        .collect();
    if pixels.len() < 3 {
        return Err(Error::EmptySet("virtual normal loss"));
    }
    let pc = lift_depth(pred);
    let gc = lift_depth(gt);
    let count = ((params.sample_ratio * pixels.len() as f64).round() as usize).max(1);
    let min_angle = params.min_angle_deg.to_radians();
    let max_angle = std::f64::consts::PI - min_angle;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (mut sum, mut accepted) = (0.0, 0usize);
    for _ in 0..count {
        let a = rng.random_range(0..pixels.len());
        let b = rng.random_range(0..pixels.len());
        let c = rng.random_range(0..pixels.len());
        if a == b || b == c || a == c {
            continue;
        }
        let idx = [pixels[a], pixels[b], pixels[c]];
        let gp = idx.map(|i| gc.point(i % w, i / w));
        if !triangle_ok(gp, min_angle, max_angle, params.min_side_m) {
            continue;
        }
        let pp = idx.map(|i| pc.point(i % w, i / w));
        let (Some(ng), Some(np)) = (plane_normal(gp), plane_normal(pp)) else {
            continue;
        };
        sum += (np - ng).abs().sum();
        accepted += 1;
    }
    Ok(VirtualNormalOutcome {
        loss: if accepted == 0 {
            0.0
        } else {
            sum / accepted as f64
        },
        sampled: count,
        accepted,
    })
}

/// Weighted mean of `1 − n_pred · n_gt` with normals derived from each depth
/// map, over masked pixels where both normals exist.
pub fn surface_loss(pred: &EquirectGrid, gt: &EquirectGrid, mask: &PixelMask) -> Result<f64> {
    check_shape(gt.dims(), pred.dims())?;
    check_shape(gt.dims(), mask.dims())?;
    let np = normals_from_depth(pred);
    let ng = normals_from_depth(gt);
    masked_mean(mask, |u, v| {
        let (a, b) = (np.pixel(u, v), ng.pixel(u, v));
        if !normal_is_valid(a) || !normal_is_valid(b) {
            return None;
        }
        let dot: f64 = a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum();
        Some(1.0 - dot)
    })
    .ok_or(Error::EmptySet("surface loss"))
}

/// Per-scale loss weights and the layout weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossWeights {
    pub lambda_l1: [f64; 3],
    pub lambda_v: [f64; 3],
    pub lambda_s: [f64; 3],
    pub lambda_layout: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_l1: [0.15, 0.1, 0.05],
            lambda_v: [0.1, 0.1, 0.05],
            lambda_s: [0.1, 0.1, 0.05],
            lambda_layout: 0.05,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let all = self
            .lambda_l1
            .iter()
            .chain(&self.lambda_v)
            .chain(&self.lambda_s)
            .chain(std::iter::once(&self.lambda_layout));
        for &x in all {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(Error::Config(format!(
                    "loss weights must be non-negative, got {x}"
                )));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self {
            lambda_l1: self.lambda_l1.map(|x| x * f),
            lambda_v: self.lambda_v.map(|x| x * f),
            lambda_s: self.lambda_s.map(|x| x * f),
            lambda_layout: self.lambda_layout * f,
        }
    }
}

/// Prediction, ground truth and mask at one output scale.
#[derive(Debug, Clone, Copy)]
pub struct ScaleInputs<'a> {
    pub pred: &'a EquirectGrid,
    pub gt: &'a EquirectGrid,
    pub mask: &'a PixelMask,
}

/// Boundaries and validity masks for the layout term.
#[derive(Debug, Clone, Copy)]
pub struct LayoutTerms<'a> {
    pub pred_top: &'a BoundaryVector,
    pub gt_top: &'a BoundaryVector,
    pub pred_bottom: &'a BoundaryVector,
    pub gt_bottom: &'a BoundaryVector,
    pub top_mask: &'a [bool],
    pub bottom_mask: &'a [bool],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleTerms {
    pub log_l1: f64,
    pub virtual_normal: f64,
    pub surface: f64,
    /// `λ_L1 · log_l1 + λ_V · virtual_normal + λ_S · surface`
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossBreakdown {
    pub scales: Vec<ScaleTerms>,
    pub layout: f64,
    pub total: f64,
}

/// Sum over the three scales of the weighted depth terms plus the weighted
/// layout term. Per-pixel means inside every scale use `sin θ` row weights.
pub fn total_loss(
    scales: &[ScaleInputs<'_>; 3],
    layout: Option<LayoutTerms<'_>>,
    weights: &LossWeights,
    vn: &VirtualNormalParams,
) -> Result<LossBreakdown> {
    weights.validate()?;
    let mut terms = Vec::with_capacity(3);
    let mut total = 0.0;
    for (s, input) in scales.iter().enumerate() {
        let mask = input.mask.clone().with_spherical_weights();
        let log_l1 = log_l1_loss(input.pred, input.gt, &mask, LOG_L1_ALPHA)?;
        let virtual_normal = virtual_normal_loss(input.pred, input.gt, &mask, vn)?.loss;
        let surface = surface_loss(input.pred, input.gt, &mask)?;
        let weighted = weights.lambda_l1[s] * log_l1
            + weights.lambda_v[s] * virtual_normal
            + weights.lambda_s[s] * surface;
        total += weighted;
        terms.push(ScaleTerms {
            log_l1,
            virtual_normal,
            surface,
            weighted,
        });
    }
    let layout = match layout {
        Some(l) => haversine_layout_loss(
            l.pred_top,
            l.gt_top,
            l.pred_bottom,
            l.gt_bottom,
            l.top_mask,
            l.bottom_mask,
        )?,
        None => 0.0,
    };
    total += weights.lambda_layout * layout;
    Ok(LossBreakdown {
        scales: terms,
        layout,
        total,
    })
}
