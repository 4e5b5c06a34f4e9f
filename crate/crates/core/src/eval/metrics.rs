use serde::{Deserialize, Serialize};

use super::PixelMask;
use crate::boundary::BoundaryVector;
use crate::error::{check_shape, Error, Result};
use crate::pano::{is_hole, EquirectGrid};

/// Standard monocular depth metrics. Deltas are percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub abs_rel: f64,
    pub sq_rel: f64,
    pub rmse: f64,
    pub rmsle: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub n_valid: usize,
}

/// Depth metrics over the masked pixels, without median scaling.
///
/// `δ_i` counts pixels with `max(p/g, g/p) < 1.25^i`, strictly.
pub fn depth_metrics(
    pred: &EquirectGrid,
    gt: &EquirectGrid,
    mask: &PixelMask,
) -> Result<MetricsReport> {
    check_shape(gt.dims(), pred.dims())?;
    check_shape(gt.dims(), mask.dims())?;
    let (w, h) = gt.dims();
    let (mut abs_rel, mut sq_rel, mut sq, mut sq_log) = (0.0, 0.0, 0.0, 0.0);
    let mut hits = [0usize; 3];
    let mut n = 0usize;
    let thresholds = [1.25, 1.25f64.powi(2), 1.25f64.powi(3)];
    for v in 0..h {
        for u in 0..w {
            if !mask.is_valid(u, v) {
                continue;
            }
            let (p, g) = (pred.get(u, v, 0), gt.get(u, v, 0));
            if is_hole(p) || is_hole(g) {
                return Err(Error::Domain(format!(
                    "depth metrics need positive depths on the mask, got pred {p} and gt {g} at ({u}, {v})"
                )));
            }
            let (p, g) = (p as f64, g as f64);
            let d = p - g;
            abs_rel += d.abs() / g;
            sq_rel += d * d / g;
            sq += d * d;
            let dl = p.ln() - g.ln();
            sq_log += dl * dl;
            let ratio = (p / g).max(g / p);
            for (hit, t) in hits.iter_mut().zip(thresholds) {
                if ratio < t {
                    *hit += 1;
                }
            }
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptySet("depth metrics"));
    }
    let nf = n as f64;
    let pct = |k: usize| 100.0 * k as f64 / nf;
    Ok(MetricsReport {
        abs_rel: abs_rel / nf,
        sq_rel: sq_rel / nf,
        rmse: (sq / nf).sqrt(),
        rmsle: (sq_log / nf).sqrt(),
        delta1: pct(hits[0]),
        delta2: pct(hits[1]),
        delta3: pct(hits[2]),
        n_valid: n,
    })
}

/// Latitude RMSE in radians over meridians valid in both boundaries and in
/// `validity`, when given.
pub fn layout_rmse(
    pred: &BoundaryVector,
    gt: &BoundaryVector,
    validity: Option<&[bool]>,
) -> Result<f64> {
    if pred.width() != gt.width() || validity.is_some_and(|m| m.len() != gt.width()) {
        return Err(Error::ShapeMismatch {
            expected: (gt.width(), 1),
            found: (pred.width(), 1),
        });
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for u in 0..gt.width() {
        if validity.is_some_and(|m| !m[u]) {
            continue;
        }
        if let (Some(p), Some(g)) = (pred.latitude(u), gt.latitude(u)) {
            sum += (p - g) * (p - g);
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptySet("layout rmse"));
    }
    Ok((sum / n as f64).sqrt())
}

/// `(1 − δ1/100) × RMSE`
pub fn depth_indicator(delta1: f64, rmse: f64) -> f64 {
    (1.0 - delta1 / 100.0) * rmse
}

/// `RMSE_top × RMSE_bottom × 1000`
pub fn layout_indicator(rmse_top: f64, rmse_bottom: f64) -> f64 {
    rmse_top * rmse_bottom * 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indicators {
    pub i_d: f64,
    pub i_l: f64,
}

pub fn indicators(report: &MetricsReport, rmse_top: f64, rmse_bottom: f64) -> Indicators {
    Indicators {
        i_d: depth_indicator(report.delta1, report.rmse),
        i_l: layout_indicator(rmse_top, rmse_bottom),
    }
}
