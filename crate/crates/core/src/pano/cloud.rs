use super::coords::{column_phi, row_theta, unit_direction, AngularCoord, Cart3};
use super::grid::{is_hole, EquirectGrid};

/// Per-pixel Cartesian points lifted from a depth map.
#[derive(Debug, Clone)]
pub struct StructuredPointCloud {
    width: usize,
    height: usize,
    points: Vec<Cart3>,
    valid: Vec<bool>,
}

impl StructuredPointCloud {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Point at `(u, v)`; `u` wraps.
    #[inline]
    pub fn point(&self, u: usize, v: usize) -> Cart3 {
        self.points[v * self.width + u % self.width]
    }

    #[inline]
    pub fn is_valid(&self, u: usize, v: usize) -> bool {
        self.valid[v * self.width + u % self.width]
    }

    pub fn points(&self) -> &[Cart3] {
        &self.points
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }
}

/// Lifts every pixel of a single-channel depth map to `depth · direction`.
///
/// Hole pixels get the origin and an invalid flag.
pub fn lift_depth(depth: &EquirectGrid) -> StructuredPointCloud {
    let (w, h) = depth.dims();
    let mut points = Vec::with_capacity(w * h);
    let mut valid = Vec::with_capacity(w * h);
    for v in 0..h {
        let theta = row_theta(v, h);
        for u in 0..w {
            let d = depth.get(u, v, 0);
            if is_hole(d) {
                points.push(Cart3::zeros());
                valid.push(false);
            } else {
                let dir = unit_direction(AngularCoord::new(column_phi(u, w), theta));
                points.push(dir * d as f64);
                valid.push(true);
            }
        }
    }
    StructuredPointCloud {
        width: w,
        height: h,
        points,
        valid,
    }
}

/// A normal is valid when it is finite and non-zero.
#[inline]
pub fn normal_is_valid(n: &[f32]) -> bool {
    n.iter().all(|x| x.is_finite()) && n.iter().any(|&x| x != 0.0)
}

/// Camera-facing unit normals from central differences of the lifted cloud.
///
/// The horizontal difference wraps across the seam. Pixels whose stencil
/// touches a hole, and the first and last rows, are written as zero vectors.
pub fn normals_from_depth(depth: &EquirectGrid) -> EquirectGrid {
    let cloud = lift_depth(depth);
    let (w, h) = depth.dims();
    let mut out = EquirectGrid::new(w, h, 3).expect("dims already validated");
    for v in 1..h.saturating_sub(1) {
        for u in 0..w {
            let left = (u + w - 1) % w;
            let right = (u + 1) % w;
            let stencil = [(u, v), (left, v), (right, v), (u, v - 1), (u, v + 1)];
            if !stencil.iter().all(|&(su, sv)| cloud.is_valid(su, sv)) {
                continue;
            }
            let du = cloud.point(right, v) - cloud.point(left, v);
            let dv = cloud.point(u, v + 1) - cloud.point(u, v - 1);
            let cross = dv.cross(&du);
            let norm = cross.norm();
            if !(norm > 0.0) || !norm.is_finite() {
                continue;
            }
            let mut n = cross / norm;
            if n.dot(&-cloud.point(u, v)) < 0.0 {
                n = -n;
            }
            let px = out.pixel_mut(u, v);
            px[0] = n.x as f32;
            px[1] = n.y as f32;
            px[2] = n.z as f32;
        }
    }
    out
}
