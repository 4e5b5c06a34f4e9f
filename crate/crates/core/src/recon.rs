//! Bottom-boundary reconstruction from the top boundary and depth.
//!
//! Walls are vertical, so the wall-floor edge sits straight below the
//! ceiling-wall edge. Given the top boundary, the distance to it, and the
//! ceiling and floor heights sampled at the poles, the bottom boundary
//! follows per meridian. Two forms are provided: the midpoint-translation
//! chain ([`reconstruct_bottom`]) and the exact vertical projection
//! ([`reconstruct_bottom_exact`]).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryKind, BoundaryVector};
use crate::error::{Error, Result};
use crate::pano::{is_hole, lift_depth, EquirectGrid};
use crate::stats::order_free_mean;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconParams {
    /// Rows sampled at each pole for the plane heights.
    pub k: usize,
    /// Rows averaged around the boundary when sampling its distance.
    pub w: usize,
    /// A scene is usable when at least this fraction of meridians is valid.
    pub min_valid_fraction: f64,
}

impl Default for ReconParams {
    fn default() -> Self {
        Self {
            k: 3,
            w: 3,
            min_valid_fraction: 0.25,
        }
    }
}

impl ReconParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.w == 0 || self.w % 2 == 0 {
            return Err(Error::Config(format!(
                "recon needs k >= 1 and odd w >= 1, got k = {}, w = {}",
                self.k, self.w
            )));
        }
        if !(0.0..=1.0).contains(&self.min_valid_fraction) {
            return Err(Error::Config(format!(
                "min_valid_fraction must lie in [0, 1], got {}",
                self.min_valid_fraction
            )));
        }
        Ok(())
    }
}

/// Ceiling and floor heights in the camera frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneHeights {
    pub y_ceil_mean: f64,
    pub y_floor_mean: f64,
    /// Room height.
    pub h: f64,
    /// Vertical coordinate of the room's mid plane.
    pub y_mid: f64,
    /// Vertical translation taking the camera to the mid plane.
    pub y_d: f64,
}

impl PlaneHeights {
    pub fn from_means(y_ceil_mean: f64, y_floor_mean: f64) -> Result<Self> {
        if !(y_floor_mean < 0.0 && 0.0 < y_ceil_mean) || !(y_ceil_mean - y_floor_mean).is_finite() {
            return Err(Error::Unreconstructable(format!(
                "camera is not between floor ({y_floor_mean}) and ceiling ({y_ceil_mean})"
            )));
        }
        let y_mid = 0.5 * (y_ceil_mean + y_floor_mean);
        Ok(Self {
            y_ceil_mean,
            y_floor_mean,
            h: y_ceil_mean - y_floor_mean,
            y_mid,
            y_d: -y_mid,
        })
    }
}

/// Mean vertical coordinate of the lifted depth over the first and last `k`
/// rows, valid pixels only.
pub fn estimate_plane_heights(depth: &EquirectGrid, params: &ReconParams) -> Result<PlaneHeights> {
    params.validate()?;
    let (w, h) = depth.dims();
    if 2 * params.k > h {
        return Err(Error::Config(format!(
            "cannot sample {} rows at each pole of a {h}-row map",
            params.k
        )));
    }
    let cloud = lift_depth(depth);
    let rows_mean = |rows: std::ops::Range<usize>| {
        let ys: Vec<f64> = rows
            .flat_map(|v| (0..w).map(move |u| (u, v)))
            .filter(|&(u, v)| cloud.is_valid(u, v))
            .map(|(u, v)| cloud.point(u, v).y)
            .collect();
        order_free_mean(ys)
    };
    let top = rows_mean(0..params.k)
        .ok_or_else(|| Error::Unreconstructable("no valid depth at the zenith".into()))?;
    let bottom = rows_mean(h - params.k..h)
        .ok_or_else(|| Error::Unreconstructable("no valid depth at the nadir".into()))?;
    PlaneHeights::from_means(top, bottom)
}

/// Row nearest to polar angle `theta`.
fn nearest_row(theta: f64, height: usize) -> usize {
    let v = (theta * height as f64 / PI - 0.5).round();
    v.clamp(0.0, height as f64 - 1.0) as usize
}

/// Mean valid depth over the `w` rows centred on the boundary row of each
/// meridian. `None` where the meridian is invalid or the window is all holes.
pub fn sample_depth_at_boundary(
    depth: &EquirectGrid,
    top: &BoundaryVector,
    w: usize,
) -> Result<Vec<Option<f64>>> {
    if w == 0 || w % 2 == 0 {
        return Err(Error::Config(format!(
            "sampling window must be odd, got {w}"
        )));
    }
    let (width, height) = depth.dims();
    if top.width() != width {
        return Err(Error::ShapeMismatch {
            expected: (width, 1),
            found: (top.width(), 1),
        });
    }
    let half = w / 2;
    Ok((0..width)
        .map(|u| {
            let centre = nearest_row(top.latitude(u)?, height);
            let lo = centre.saturating_sub(half);
            let hi = (centre + half).min(height - 1);
            let values: Vec<f64> = (lo..=hi)
                .map(|v| depth.get(u, v, 0))
                .filter(|&d| !is_hole(d))
                .map(f64::from)
                .collect();
            order_free_mean(values)
        })
        .collect())
}

/// Bottom latitude by translating the top edge point to the mid-plane
/// frame, mirroring there, and carrying the top's latitude offset back.
///
/// `θ_b = (π − θ_t^o) + (θ_t − θ_t^o)`, where `θ_t^o` is the top edge
/// latitude seen from the mid plane. `None` if the translated point
/// degenerates.
pub fn bottom_latitude_chain(theta_t: f64, r_t: f64, heights: &PlaneHeights) -> Option<f64> {
    if !(r_t > 0.0) || !theta_t.is_finite() {
        return None;
    }
    let (s, c) = theta_t.sin_cos();
    let rho = r_t * s;
    let y_o = r_t * c + heights.y_d;
    let r_o = rho.hypot(y_o);
    if !(r_o > 0.0) {
        return None;
    }
    let theta_o = (y_o / r_o).clamp(-1.0, 1.0).acos();
    let theta_b = (PI - theta_o) + (theta_t - theta_o);
    (theta_b > FRAC_PI_2 && theta_b <= PI).then_some(theta_b)
}

/// Bottom latitude of the point straight below the top edge point at the
/// floor height.
pub fn bottom_latitude_exact(theta_t: f64, r_t: f64, heights: &PlaneHeights) -> Option<f64> {
    if !(r_t > 0.0) || !theta_t.is_finite() {
        return None;
    }
    let rho = r_t * theta_t.sin();
    if !(rho > 0.0) {
        return None;
    }
    let theta_b = rho.atan2(heights.y_floor_mean);
    (theta_b > FRAC_PI_2 && theta_b <= PI).then_some(theta_b)
}

fn reconstruct_with(
    top: &BoundaryVector,
    radii: &[Option<f64>],
    heights: &PlaneHeights,
    f: fn(f64, f64, &PlaneHeights) -> Option<f64>,
) -> Result<BoundaryVector> {
    if top.kind() != BoundaryKind::Top {
        return Err(Error::Domain(
            "bottom reconstruction needs a top boundary".into(),
        ));
    }
    if radii.len() != top.width() {
        return Err(Error::ShapeMismatch {
            expected: (top.width(), 1),
            found: (radii.len(), 1),
        });
    }
    let mut out = BoundaryVector::invalid(BoundaryKind::Bottom, top.width());
    for (u, r) in radii.iter().enumerate() {
        let theta = top.latitude(u).zip(*r).and_then(|(t, r)| f(t, r, heights));
        out.set(u, theta);
    }
    Ok(out)
}

/// Bottom boundary via the midpoint-translation chain.
pub fn reconstruct_bottom(
    top: &BoundaryVector,
    radii: &[Option<f64>],
    heights: &PlaneHeights,
) -> Result<BoundaryVector> {
    reconstruct_with(top, radii, heights, bottom_latitude_chain)
}

/// Bottom boundary via exact vertical projection onto the floor.
pub fn reconstruct_bottom_exact(
    top: &BoundaryVector,
    radii: &[Option<f64>],
    heights: &PlaneHeights,
) -> Result<BoundaryVector> {
    reconstruct_with(top, radii, heights, bottom_latitude_exact)
}

/// Per-meridian layout validity and the scene-level verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutValidity {
    pub meridians: Vec<bool>,
    pub scene_valid: bool,
}

/// A meridian is valid when its top boundary, its sampled distance and the
/// plane heights all are. The scene is valid when at least
/// `min_valid_fraction` of the meridians are.
pub fn layout_validity(
    top: &BoundaryVector,
    radii: &[Option<f64>],
    heights: &Result<PlaneHeights>,
    min_valid_fraction: f64,
) -> LayoutValidity {
    let width = top.width();
    let meridians: Vec<bool> = (0..width)
        .map(|u| heights.is_ok() && top.is_valid(u) && radii.get(u).is_some_and(|r| r.is_some()))
        .collect();
    let count = meridians.iter().filter(|&&v| v).count();
    let scene_valid = count > 0 && count as f64 >= min_valid_fraction * width as f64;
    LayoutValidity {
        meridians,
        scene_valid,
    }
}
