use super::PixelMask;
use crate::error::{check_shape, Error, Result};
use crate::pano::{is_hole, EquirectGrid};

/// sRGB channel in `[0, 1]` to linear light.
pub fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// CIE L* of an sRGB color given in `[0, 255]`, D65 white.
pub fn lightness(rgb: [f64; 3]) -> f64 {
    let [r, g, b] = rgb.map(|c| srgb_to_linear((c / 255.0).clamp(0.0, 1.0)));
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const EPS: f64 = 216.0 / 24389.0;
    const KAPPA: f64 = 24389.0 / 27.0;
    if y > EPS {
        116.0 * y.cbrt() - 16.0
    } else {
        KAPPA * y
    }
}

/// Pearson correlation of two equally long series.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            expected: (x.len(), 1),
            found: (y.len(), 1),
        });
    }
    if x.len() < 2 {
        return Err(Error::EmptySet("correlation"));
    }
    let constant = |s: &[f64]| s.iter().all(|&a| a == s[0]);
    if constant(x) {
        return Err(Error::UndefinedCorrelation("first series"));
    }
    if constant(y) {
        return Err(Error::UndefinedCorrelation("second series"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Correlation between color lightness and inverse depth over masked
/// pixels with positive depth.
pub fn luminance_invdepth_pcc(
    color: &EquirectGrid,
    depth: &EquirectGrid,
    mask: &PixelMask,
) -> Result<f64> {
    check_shape(depth.dims(), color.dims())?;
    check_shape(depth.dims(), mask.dims())?;
    if color.channels() != 3 {
        return Err(Error::Domain(format!(
            "color needs 3 channels, got {}",
            color.channels()
        )));
    }
    let (w, h) = depth.dims();
    let mut l = Vec::new();
    let mut inv = Vec::new();
    for v in 0..h {
        for u in 0..w {
            let d = depth.get(u, v, 0);
            if !mask.is_valid(u, v) || is_hole(d) {
                continue;
            }
            let px = color.pixel(u, v);
            l.push(lightness([px[0] as f64, px[1] as f64, px[2] as f64]));
            inv.push(1.0 / d as f64);
        }
    }
    match pearson(&l, &inv) {
        Err(Error::UndefinedCorrelation("first series")) => {
            Err(Error::UndefinedCorrelation("lightness"))
        }
        Err(Error::UndefinedCorrelation("second series")) => {
            Err(Error::UndefinedCorrelation("inverse depth"))
        }
        other => other,
    }
}
