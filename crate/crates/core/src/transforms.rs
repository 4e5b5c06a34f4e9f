//! Augmentations applied consistently to every modality of a sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryVector;
use crate::error::{Error, Result};
use crate::labeling::LayoutClassMap;
use crate::pano::{normal_is_valid, EquirectGrid};

/// A panorama with any subset of its modalities.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sample {
    /// 3-channel color in `[0, 255]`.
    pub color: Option<EquirectGrid>,
    pub depth: Option<EquirectGrid>,
    /// World-aligned unit normals; zero vectors mark missing normals.
    pub normals: Option<EquirectGrid>,
    pub labels: Option<LayoutClassMap>,
    pub top: Option<BoundaryVector>,
    pub bottom: Option<BoundaryVector>,
    pub mask: Option<EquirectGrid>,
}

impl Sample {
    /// Width and height shared by every present modality.
    pub fn dims(&self) -> Result<Option<(usize, usize)>> {
        let grids = [&self.color, &self.depth, &self.normals, &self.mask];
        let mut dims: Option<(usize, usize)> = None;
        let mut check = |d: (usize, usize), what: &str| match dims {
            None => {
                dims = Some(d);
                Ok(())
            }
            Some(e) if e == d => Ok(()),
            Some(e) => Err(Error::Domain(format!("{what} is {d:?}, expected {e:?}"))),
        };
        for g in grids.into_iter().flatten() {
            check(g.dims(), "grid")?;
        }
        if let Some(l) = &self.labels {
            check(l.dims(), "labels")?;
        }
        for b in [&self.top, &self.bottom].into_iter().flatten() {
            if let Some((w, _)) = dims {
                if b.width() != w {
                    return Err(Error::Domain(format!(
                        "boundary has {} meridians, expected {w}",
                        b.width()
                    )));
                }
            }
        }
        Ok(dims)
    }

    fn width(&self) -> Result<usize> {
        if let Some((w, _)) = self.dims()? {
            return Ok(w);
        }
        [&self.top, &self.bottom]
            .into_iter()
            .flatten()
            .map(|b| b.width())
            .next()
            .ok_or_else(|| Error::Domain("sample is empty".into()))
    }
}

/// Exact `(cos, sin)` of `2π · offset / width`, exact on quarter turns.
fn turn(offset: isize, width: usize) -> (f64, f64) {
    let w = width as isize;
    let k = offset.rem_euclid(w);
    if (4 * k) % w == 0 {
        return match 4 * k / w {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
    }
    let a = std::f64::consts::TAU * k as f64 / width as f64;
    (a.cos(), a.sin())
}

/// Rotates world-aligned normals about the vertical axis by the azimuth
/// `2π · offset / W` that a column roll by `offset` represents.
fn rotate_normals(normals: &EquirectGrid, offset: isize) -> EquirectGrid {
    let (c, s) = turn(offset, normals.width());
    let mut out = normals.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        if !normal_is_valid(px) {
            continue;
        }
        let (x, z) = (px[0] as f64, px[2] as f64);
        px[0] = (x * c + z * s) as f32;
        px[2] = (z * c - x * s) as f32;
    }
    out
}

/// Rolls every modality right by `offset` columns.
pub fn circular_shift(s: &Sample, offset: isize) -> Result<Sample> {
    s.width()?;
    Ok(Sample {
        color: s.color.as_ref().map(|g| g.roll_columns(offset)),
        depth: s.depth.as_ref().map(|g| g.roll_columns(offset)),
        normals: s
            .normals
            .as_ref()
            .map(|g| rotate_normals(&g.roll_columns(offset), offset)),
        labels: s.labels.as_ref().map(|l| l.roll_columns(offset)),
        top: s.top.as_ref().map(|b| b.roll(offset)),
        bottom: s.bottom.as_ref().map(|b| b.roll(offset)),
        mask: s.mask.as_ref().map(|g| g.roll_columns(offset)),
    })
}

/// Mirrors every modality left to right; normals get their x negated.
pub fn horizontal_flip(s: &Sample) -> Result<Sample> {
    s.width()?;
    let normals = s.normals.as_ref().map(|g| {
        let mut n = g.flip_columns();
        for px in n.data_mut().chunks_exact_mut(3) {
            if normal_is_valid(px) {
                px[0] = -px[0];
            }
        }
        n
    });
    Ok(Sample {
        color: s.color.as_ref().map(|g| g.flip_columns()),
        depth: s.depth.as_ref().map(|g| g.flip_columns()),
        normals,
        labels: s.labels.as_ref().map(|l| l.flip_columns()),
        top: s.top.as_ref().map(|b| b.flip()),
        bottom: s.bottom.as_ref().map(|b| b.flip()),
        mask: s.mask.as_ref().map(|g| g.flip_columns()),
    })
}

/// `clamp((c/255)^gamma · contrast + brightness, 0, 1) · 255` on color.
pub fn photometric(s: &Sample, gamma: f64, brightness: f64, contrast: f64) -> Result<Sample> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let mut out = s.clone();
    if let Some(color) = &mut out.color {
        color.map_inplace(|c| {
            let x = (c as f64 / 255.0).max(0.0).powf(gamma) * contrast + brightness;
            (x.clamp(0.0, 1.0) * 255.0) as f32
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EraseParams {
    pub count: usize,
    pub min_size: (usize, usize),
    pub max_size: (usize, usize),
}

/// Replaces `count` seeded rectangles of the color image by its mean color.
/// Rectangles wrap across the seam.
pub fn random_erase(s: &Sample, params: &EraseParams, seed: u64) -> Result<Sample> {
    let mut out = s.clone();
    let Some(color) = &mut out.color else {
        return Ok(out);
    };
    if params.count == 0 {
        return Ok(out);
    }
    let (w, h) = color.dims();
    let ((min_w, min_h), (max_w, max_h)) = (params.min_size, params.max_size);
    if min_w == 0 || min_h == 0 || min_w > max_w || min_h > max_h || max_w > w || max_h > h {
        return Err(Error::Domain(format!(
            "erase sizes {:?}..{:?} do not fit a {w}x{h} image",
            params.min_size, params.max_size
        )));
    }
    let c = color.channels();
    let mut mean = vec![0.0f64; c];
    for px in color.data().chunks_exact(c) {
        for (m, x) in mean.iter_mut().zip(px) {
            *m += *x as f64;
        }
    }
    let fill: Vec<f32> = mean.iter().map(|m| (m / (w * h) as f64) as f32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..params.count {
        let rw = rng.random_range(min_w..=max_w);
        let rh = rng.random_range(min_h..=max_h);
        let u0 = rng.random_range(0..w);
        let v0 = rng.random_range(0..=h - rh);
        for v in v0..v0 + rh {
            for du in 0..rw {
                color.pixel_mut(u0 + du, v).copy_from_slice(&fill);
            }
        }
    }
    Ok(out)
}

/// One seeded draw of augmentation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentPlan {
    pub shift: isize,
    pub flip: bool,
    pub gamma: f64,
    pub brightness: f64,
    pub contrast: f64,
    pub erase: EraseParams,
    pub erase_seed: u64,
}

impl AugmentPlan {
    pub fn sample(seed: u64, width: usize, height: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let max = ((width / 8).max(1), (height / 8).max(1));
        Self {
            shift: rng.random_range(0..width) as isize,
            flip: rng.random_bool(0.5),
            gamma: rng.random_range(0.8..1.2),
            brightness: rng.random_range(-0.1..0.1),
            contrast: rng.random_range(0.8..1.2),
            erase: EraseParams {
                count: rng.random_range(0..=3),
                min_size: (1, 1),
                max_size: max,
            },
            erase_seed: rng.random(),
        }
    }

    /// Shift, then flip, then photometric, then erasure.
    pub fn apply(&self, s: &Sample) -> Result<Sample> {
        let mut out = circular_shift(s, self.shift)?;
        if self.flip {
            out = horizontal_flip(&out)?;
        }
        out = photometric(&out, self.gamma, self.brightness, self.contrast)?;
        random_erase(&out, &self.erase, self.erase_seed)
    }
}
