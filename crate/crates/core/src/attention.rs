//! Layout-derived attention maps.
//!
//! Every meridian gets a latitude Gaussian centred on its top boundary,
//! using the haversine as the distance. The map can be blurred on the
//! sphere and applied to feature grids of any resolution as residual
//! attention.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryVector;
use crate::error::{Error, Result};
use crate::pano::{haversine_lat, row_theta, EquirectGrid};

/// What invalid meridians are filled with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvalidFill {
    /// Constant column equal to the mean over all valid meridians.
    MeridianMean,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttentionParams {
    pub sigma_deg: f64,
    pub blur_kernel: usize,
    pub blur_sigma_px: f64,
    pub blur_passes: usize,
    /// Use `h²` in the exponent instead of `|h|`.
    pub squared: bool,
    /// Rescale the map by its maximum before residual application.
    pub normalize: bool,
    pub invalid_fill: InvalidFill,
}

impl Default for AttentionParams {
    fn default() -> Self {
        Self {
            sigma_deg: 9.5,
            blur_kernel: 5,
            blur_sigma_px: 1.0,
            blur_passes: 2,
            squared: false,
            normalize: true,
            invalid_fill: InvalidFill::MeridianMean,
        }
    }
}

impl AttentionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_deg > 0.0) || !self.sigma_deg.is_finite() {
            return Err(Error::Config(format!(
                "attention sigma must be positive, got {}",
                self.sigma_deg
            )));
        }
        if self.blur_kernel % 2 == 0 {
            return Err(Error::Config(format!(
                "blur kernel must be odd, got {}",
                self.blur_kernel
            )));
        }
        if !(self.blur_sigma_px > 0.0) || !self.blur_sigma_px.is_finite() {
            return Err(Error::Config(format!(
                "blur sigma must be positive, got {}",
                self.blur_sigma_px
            )));
        }
        Ok(())
    }

    pub fn sigma_rad(&self) -> f64 {
        self.sigma_deg.to_radians()
    }
}

/// Single-channel attention values on the panorama.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionMap {
    pub grid: EquirectGrid,
    /// Angular standard deviation used to build the map, radians.
    pub sigma: f64,
}

/// `A(φ, θ) = exp(−|h(θ, θ_b(φ))| / 2σ²) / (σ√(2π))`, or with `h²` when
/// `params.squared` is set.
pub fn build_attention(
    top: &BoundaryVector,
    params: &AttentionParams,
    width: usize,
    height: usize,
) -> Result<AttentionMap> {
    params.validate()?;
    if top.width() != width {
        return Err(Error::ShapeMismatch {
            expected: (width, height),
            found: (top.width(), height),
        });
    }
    let sigma = params.sigma_rad();
    let peak = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let c = 0.5 / (sigma * sigma);
    let value = |theta: f64, boundary: f64| {
        let h = haversine_lat(theta, boundary);
        let d = if params.squared { h * h } else { h.abs() };
        peak * (-d * c).exp()
    };
    let mut grid = EquirectGrid::new(width, height, 1)?;
    let mut valid_sum = 0.0;
    let mut valid_cols = 0usize;
    for u in 0..width {
        let Some(b) = top.latitude(u) else { continue };
        valid_cols += 1;
        for v in 0..height {
            let a = value(row_theta(v, height), b);
            valid_sum += a;
            grid.set(u, v, 0, a as f32);
        }
    }
    let fill = match params.invalid_fill {
        InvalidFill::MeridianMean if valid_cols > 0 => {
            (valid_sum / (valid_cols * height) as f64) as f32
        }
        _ => 0.0,
    };
    for u in (0..width).filter(|&u| !top.is_valid(u)) {
        for v in 0..height {
            grid.set(u, v, 0, fill);
        }
    }
    Ok(AttentionMap { grid, sigma })
}

/// Normalized Gaussian taps of odd length `size`.
fn blur_taps(size: usize, sigma: f64) -> Vec<f64> {
    let r = (size / 2) as isize;
    let raw: Vec<f64> = (-r..=r)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|t| t / s).collect()
}

/// Source pixel for row `v` (possibly past a pole) at column `u`. Rows
/// beyond a pole come from the mirrored row on the opposite meridian.
fn pole_padded(u: usize, v: isize, width: usize, height: usize) -> (usize, usize) {
    let h = height as isize;
    let mut v = v;
    let mut u = u;
    // repeated reflection handles kernels taller than the map
    loop {
        if v < 0 {
            v = -1 - v;
        } else if v >= h {
            v = 2 * h - 1 - v;
        } else {
            return (u, v as usize);
        }
        u = (u + width / 2) % width;
    }
}

/// Separable Gaussian blur, wrapping across the seam and reflecting across
/// the poles with a half-turn in azimuth.
pub fn spherical_blur(a: &AttentionMap, params: &AttentionParams) -> Result<AttentionMap> {
    params.validate()?;
    let taps = blur_taps(params.blur_kernel, params.blur_sigma_px);
    let r = (taps.len() / 2) as isize;
    let (w, h) = a.grid.dims();
    let mut cur = a.grid.clone();
    for _ in 0..params.blur_passes {
        let mut tmp = cur.clone();
        for v in 0..h {
            for u in 0..w {
                let mut acc = 0.0f64;
                for (k, t) in taps.iter().enumerate() {
                    let su = cur.wrap_column(u as isize + k as isize - r);
                    acc += t * cur.get(su, v, 0) as f64;
                }
                tmp.set(u, v, 0, acc as f32);
            }
        }
        for v in 0..h {
            for u in 0..w {
                let mut acc = 0.0f64;
                for (k, t) in taps.iter().enumerate() {
                    let (su, sv) = pole_padded(u, v as isize + k as isize - r, w, h);
                    acc += t * tmp.get(su, sv, 0) as f64;
                }
                cur.set(u, v, 0, acc as f32);
            }
        }
    }
    Ok(AttentionMap {
        grid: cur,
        sigma: a.sigma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttentionMode {
    /// `f + f·A`
    Direct,
    /// `f + f·(1 − A)`
    Complement,
}

/// Divides a map by its maximum; an all-zero map stays zero.
pub fn normalize_max(grid: &mut EquirectGrid) {
    let max = grid.data().iter().cloned().fold(0.0f32, f32::max);
    if max > 0.0 {
        grid.map_inplace(|x| x / max);
    }
}

/// Resampling weights along one axis: `(source index, weight)` per target.
fn axis_weights(src: usize, dst: usize, wrap: bool) -> Vec<Vec<(usize, f64)>> {
    if src == dst {
        return (0..dst).map(|i| vec![(i, 1.0)]).collect();
    }
    let scale = src as f64 / dst as f64;
    if dst < src {
        // area average over the source cells covered by each target cell
        (0..dst)
            .map(|i| {
                let (lo, hi) = (i as f64 * scale, (i + 1) as f64 * scale);
                let mut ws = Vec::new();
                let mut s = lo.floor() as usize;
                while (s as f64) < hi && s < src {
                    let overlap = (hi.min(s as f64 + 1.0) - lo.max(s as f64)).max(0.0);
                    if overlap > 0.0 {
                        ws.push((s, overlap / scale));
                    }
                    s += 1;
                }
                ws
            })
            .collect()
    } else {
        // linear interpolation between source centres
        (0..dst)
            .map(|i| {
                let x = (i as f64 + 0.5) * scale - 0.5;
                let x0 = x.floor();
                let f = x - x0;
                let (a, b) = if wrap {
                    let n = src as isize;
                    (
                        (x0 as isize).rem_euclid(n) as usize,
                        (x0 as isize + 1).rem_euclid(n) as usize,
                    )
                } else {
                    let last = src as f64 - 1.0;
                    (
                        x0.clamp(0.0, last) as usize,
                        (x0 + 1.0).clamp(0.0, last) as usize,
                    )
                };
                vec![(a, 1.0 - f), (b, f)]
            })
            .collect()
    }
}

/// Area-average (downsampling) or linear (upsampling) resampling of a
/// single-channel grid, per axis. Columns wrap, rows clamp.
pub fn resample_attention(a: &EquirectGrid, width: usize, height: usize) -> Result<EquirectGrid> {
    let (sw, sh) = a.dims();
    let wu = axis_weights(sw, width, true);
    let wv = axis_weights(sh, height, false);
    let mut rows = vec![0.0f64; sh * width];
    for v in 0..sh {
        for (u, ws) in wu.iter().enumerate() {
            rows[v * width + u] = ws.iter().map(|&(s, t)| t * a.get(s, v, 0) as f64).sum();
        }
    }
    EquirectGrid::from_fn(width, height, 1, |u, v, px| {
        px[0] = wv[v]
            .iter()
            .map(|&(s, t)| t * rows[s * width + u])
            .sum::<f64>() as f32;
    })
}

/// Residual attention on a feature grid of any resolution and channel
/// count. The attention is resampled to the feature grid and, when
/// `normalize` is set, divided by its maximum (an all-zero map stays zero).
pub fn apply_residual_attention(
    features: &EquirectGrid,
    a: &AttentionMap,
    mode: AttentionMode,
    normalize: bool,
) -> Result<EquirectGrid> {
    let (w, h) = features.dims();
    let mut att = resample_attention(&a.grid, w, h)?;
    if normalize {
        normalize_max(&mut att);
    }
    let c = features.channels();
    let mut out = features.clone();
    for v in 0..h {
        for u in 0..w {
            let gain = match mode {
                AttentionMode::Direct => att.get(u, v, 0),
                AttentionMode::Complement => 1.0 - att.get(u, v, 0),
            };
            let px = out.pixel_mut(u, v);
            for x in px.iter_mut().take(c) {
                *x += *x * gain;
            }
        }
    }
    Ok(out)
}
