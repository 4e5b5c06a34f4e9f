//! Pixel, angular and Cartesian coordinates on the equirectangular sphere.
//!
//! Conventions: `y` is the vertical axis, `phi` is the azimuth measured from
//! `+z` towards `+x` in `[0, 2π)`, and `theta` is the polar angle measured
//! from the zenith (`+y`), so the equator sits at `π/2`. Pixel `(u, v)` is
//! addressed at its center.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Cartesian point in the camera frame, meters.
pub type Cart3 = Vector3<f64>;

/// Spherical direction `(phi, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularCoord {
    pub phi: f64,
    pub theta: f64,
}

impl AngularCoord {
    pub fn new(phi: f64, theta: f64) -> Self {
        Self { phi, theta }
    }
}

/// Azimuth of the center of column `u`.
#[inline]
pub fn column_phi(u: usize, width: usize) -> f64 {
    (u as f64 + 0.5) * TAU / width as f64
}

/// Polar angle of the center of row `v`.
#[inline]
pub fn row_theta(v: usize, height: usize) -> f64 {
    (v as f64 + 0.5) * PI / height as f64
}

/// Angular coordinate of the center of pixel `(u, v)`.
pub fn pix_to_ang(u: usize, v: usize, width: usize, height: usize) -> Result<AngularCoord> {
    if u >= width || v >= height {
        return Err(Error::Domain(format!(
            "pixel ({u}, {v}) outside {width}x{height} grid"
        )));
    }
    Ok(AngularCoord::new(
        column_phi(u, width),
        row_theta(v, height),
    ))
}

/// Continuous pixel coordinate of an angular coordinate.
///
/// `u` wraps into `[0, W)`, `v` is clamped to `[0, H - 1]`.
pub fn ang_to_pix(rho: AngularCoord, width: usize, height: usize) -> (f64, f64) {
    let w = width as f64;
    let mut u = (rho.phi * w / TAU - 0.5).rem_euclid(w);
    if u >= w {
        u -= w;
    }
    let v = (rho.theta * height as f64 / PI - 0.5).clamp(0.0, height as f64 - 1.0);
    (u, v)
}

/// Spherical to Cartesian: `x = r sinφ sinθ`, `y = r cosθ`, `z = r cosφ sinθ`.
pub fn sph_to_cart(r: f64, rho: AngularCoord) -> Result<Cart3> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    Ok(unit_direction(rho) * r)
}

/// Unit ray direction for `rho`.
#[inline]
pub fn unit_direction(rho: AngularCoord) -> Cart3 {
    let (sp, cp) = rho.phi.sin_cos();
    let (st, ct) = rho.theta.sin_cos();
    Vector3::new(sp * st, ct, cp * st)
}

/// Cartesian to spherical, returning `(r, rho)`.
///
/// The azimuth uses the full-quadrant arctangent of `(x, z)`; at the poles
/// it is 0.
pub fn cart_to_sph(p: &Cart3) -> Result<(f64, AngularCoord)> {
    let r = p.norm();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "cannot convert point ({}, {}, {}) to spherical",
            p.x, p.y, p.z
        )));
    }
    let mut phi = p.x.atan2(p.z).rem_euclid(TAU);
    if phi >= TAU {
        phi -= TAU;
    }
    let theta = (p.y / r).clamp(-1.0, 1.0).acos();
    Ok((r, AngularCoord::new(phi, theta)))
}

/// Signed great-circle distance between two latitudes on one meridian,
/// `2·asin(sin((θ2 − θ1)/2))`.
///
/// Periodic in the difference: a full turn maps back to zero.
#[inline]
pub fn haversine_lat(theta1: f64, theta2: f64) -> f64 {
    2.0 * ((theta2 - theta1) * 0.5).sin().asin()
}

/// First-order latitude change for a vertical displacement `dy` of a point
/// at polar angle `theta` and radius `r`: `dθ = −sinθ / r · dy`.
pub fn vertical_latitude_shift(theta: f64, r: f64, dy: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    Ok(-theta.sin() / r * dy)
}

/// Per-row spherical area weights, `sin θ` at row centers.
pub fn spherical_row_weights(height: usize) -> Vec<f64> {
    (0..height).map(|v| row_theta(v, height).sin()).collect()
}
