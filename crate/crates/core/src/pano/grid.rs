use crate::error::{Error, Result};

/// Dense W×H×C float field on the equirectangular pixel domain.
///
/// Storage is row-major with interleaved channels: the value of channel `c`
/// at column `u`, row `v` lives at `(v * W + u) * C + c`. Row 0 is the
/// zenith row. Column indices wrap around the azimuth seam.
#[derive(Debug, Clone, PartialEq)]
pub struct EquirectGrid {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

/// Depth holes are encoded as zero, negative or non-finite values.
#[inline]
pub fn is_hole(depth: f32) -> bool {
    !(depth.is_finite() && depth > 0.0)
}

impl EquirectGrid {
    /// Zero-filled grid.
    pub fn new(width: usize, height: usize, channels: usize) -> Result<Self> {
        Self::filled(width, height, channels, 0.0)
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f32) -> Result<Self> {
        check_dims(width, height, channels)?;
        let len = checked_len(width, height, channels)?;
        Ok(Self {
            width,
            height,
            channels,
            data: vec![value; len],
        })
    }

    pub fn from_vec(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        check_dims(width, height, channels)?;
        let len = checked_len(width, height, channels)?;
        if data.len() != len {
            return Err(Error::Domain(format!(
                "grid {width}x{height}x{channels} needs {len} values, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds a grid by evaluating `f(u, v, pixel)` for every pixel.
    pub fn from_fn<F>(width: usize, height: usize, channels: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, &mut [f32]),
    {
        let mut grid = Self::new(width, height, channels)?;
        for v in 0..height {
            for u in 0..width {
                f(u, v, grid.pixel_mut(u, v));
            }
        }
        Ok(grid)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    /// Returns a note when the grid is not the usual 2:1 panorama shape.
    pub fn aspect_warning(&self) -> Option<String> {
        (self.width != 2 * self.height).then(|| {
            format!(
                "grid is {}x{}, equirectangular panoramas are usually 2:1",
                self.width, self.height
            )
        })
    }

    /// Wraps a signed column index onto `[0, W)`.
    #[inline]
    pub fn wrap_column(&self, u: isize) -> usize {
        u.rem_euclid(self.width as isize) as usize
    }

    #[inline]
    fn offset(&self, u: usize, v: usize) -> usize {
        debug_assert!(v < self.height);
        ((v * self.width) + (u % self.width)) * self.channels
    }

    #[inline]
    pub fn pixel(&self, u: usize, v: usize) -> &[f32] {
        let o = self.offset(u, v);
        &self.data[o..o + self.channels]
    }

    #[inline]
    pub fn pixel_mut(&mut self, u: usize, v: usize) -> &mut [f32] {
        let o = self.offset(u, v);
        let c = self.channels;
        &mut self.data[o..o + c]
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize, c: usize) -> f32 {
        self.data[self.offset(u, v) + c]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, c: usize, value: f32) {
        let o = self.offset(u, v);
        self.data[o + c] = value;
    }

    /// Per-pixel depth validity of a single-channel grid.
    pub fn validity(&self) -> Vec<bool> {
        self.data
            .chunks_exact(self.channels)
            .map(|p| !is_hole(p[0]))
            .collect()
    }

    /// Rolls all columns right by `offset` (negative rolls left).
    pub fn roll_columns(&self, offset: isize) -> Self {
        let mut out = self.clone();
        for v in 0..self.height {
            for u in 0..self.width {
                let src = self.wrap_column(u as isize - offset);
                out.pixel_mut(u, v).copy_from_slice(self.pixel(src, v));
            }
        }
        out
    }

    /// Mirrors the columns, `u -> W - 1 - u`.
    pub fn flip_columns(&self) -> Self {
        let mut out = self.clone();
        for v in 0..self.height {
            for u in 0..self.width {
                out.pixel_mut(u, v)
                    .copy_from_slice(self.pixel(self.width - 1 - u, v));
            }
        }
        out
    }

    /// Applies `f` to every scalar in place.
    pub fn map_inplace<F: FnMut(f32) -> f32>(&mut self, mut f: F) {
        for x in &mut self.data {
            *x = f(*x);
        }
    }
}

fn check_dims(width: usize, height: usize, channels: usize) -> Result<()> {
    if width < 2 || height < 1 || channels < 1 {
        return Err(Error::Domain(format!(
            "grid dimensions {width}x{height}x{channels} are too small (need W >= 2, H >= 1, C >= 1)"
        )));
    }
    Ok(())
}

fn checked_len(width: usize, height: usize, channels: usize) -> Result<usize> {
    width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::Domain(format!("grid {width}x{height}x{channels} overflows")))
}
