//! Analytic axis-aligned room renderer.
//!
//! Rays through every pixel center are intersected with the six room
//! planes, which gives exact depth, normals and labels. The layout
//! boundaries come from the closed-form wall distance per meridian, so the
//! renderer doubles as ground truth for everything downstream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryKind, BoundaryVector};
use crate::error::{Error, Result};
use crate::labeling::{LayoutClass, LayoutClassMap};
use crate::pano::{column_phi, pix_to_ang, unit_direction, Cart3, EquirectGrid};

/// Axis-aligned room around a camera at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuboidScene {
    pub x_min: f64,
    pub x_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub y_floor: f64,
    pub y_ceil: f64,
    pub width: usize,
    pub height: usize,
}

/// The six room planes, in tie-breaking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoomPlane {
    XMin,
    XMax,
    ZMin,
    ZMax,
    Floor,
    Ceiling,
}

impl RoomPlane {
    pub const ALL: [RoomPlane; 6] = [
        RoomPlane::XMin,
        RoomPlane::XMax,
        RoomPlane::ZMin,
        RoomPlane::ZMax,
        RoomPlane::Floor,
        RoomPlane::Ceiling,
    ];

    /// Unit normal pointing into the room.
    pub fn inward_normal(self) -> Cart3 {
        match self {
            RoomPlane::XMin => Cart3::new(1.0, 0.0, 0.0),
            RoomPlane::XMax => Cart3::new(-1.0, 0.0, 0.0),
            RoomPlane::ZMin => Cart3::new(0.0, 0.0, 1.0),
            RoomPlane::ZMax => Cart3::new(0.0, 0.0, -1.0),
            RoomPlane::Floor => Cart3::new(0.0, 1.0, 0.0),
            RoomPlane::Ceiling => Cart3::new(0.0, -1.0, 0.0),
        }
    }

    pub fn class(self) -> LayoutClass {
        match self {
            RoomPlane::Floor => LayoutClass::Floor,
            RoomPlane::Ceiling => LayoutClass::Ceiling,
            _ => LayoutClass::Wall,
        }
    }
}

impl CuboidScene {
    /// Room with walls at `±half_x`, `±half_z` and ceiling/floor at
    /// `±half_height`, camera at the centroid.
    pub fn centered(
        half_x: f64,
        half_z: f64,
        half_height: f64,
        width: usize,
        height: usize,
    ) -> Self {
        Self {
            x_min: -half_x,
            x_max: half_x,
            z_min: -half_z,
            z_max: half_z,
            y_floor: -half_height,
            y_ceil: half_height,
            width,
            height,
        }
    }

    /// Random room with wall distances in `[1.5, 4]` m and half height in
    /// `[1.2, 1.6]` m. With `symmetric` the camera sits at mid height.
    pub fn sample(seed: u64, width: usize, height: usize, symmetric: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut wall = || rng.random_range(1.5..4.0);
        let (x_min, x_max, z_min, z_max) = (-wall(), wall(), -wall(), wall());
        let half_height = rng.random_range(1.2..1.6);
        let offset = if symmetric {
            0.0
        } else {
            rng.random_range(-0.3..0.3)
        };
        Self {
            x_min,
            x_max,
            z_min,
            z_max,
            y_floor: -half_height - offset,
            y_ceil: half_height - offset,
            width,
            height,
        }
    }

    /// Same room seen from a camera raised by `dy` meters.
    pub fn with_camera_raised(mut self, dy: f64) -> Self {
        self.y_ceil -= dy;
        self.y_floor -= dy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let inside = self.x_min < 0.0
            && 0.0 < self.x_max
            && self.z_min < 0.0
            && 0.0 < self.z_max
            && self.y_floor < 0.0
            && 0.0 < self.y_ceil;
        let finite = [
            self.x_min,
            self.x_max,
            self.z_min,
            self.z_max,
            self.y_floor,
            self.y_ceil,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !inside || !finite {
            return Err(Error::Domain(format!(
                "camera must lie strictly inside the room: {self:?}"
            )));
        }
        if self.width < 2 || self.height < 1 {
            return Err(Error::Domain(format!(
                "render size {}x{} is too small",
                self.width, self.height
            )));
        }
        Ok(())
    }

    fn plane_offset(&self, plane: RoomPlane) -> (usize, f64) {
        match plane {
            RoomPlane::XMin => (0, self.x_min),
            RoomPlane::XMax => (0, self.x_max),
            RoomPlane::ZMin => (2, self.z_min),
            RoomPlane::ZMax => (2, self.z_max),
            RoomPlane::Floor => (1, self.y_floor),
            RoomPlane::Ceiling => (1, self.y_ceil),
        }
    }

    /// Nearest positive hit of a ray from the origin. Ties go to the plane
    /// listed first in [`RoomPlane::ALL`].
    pub fn intersect(&self, dir: &Cart3) -> Option<(f64, RoomPlane)> {
        let mut best: Option<(f64, RoomPlane)> = None;
        for plane in RoomPlane::ALL {
            let (axis, offset) = self.plane_offset(plane);
            let t = offset / dir[axis];
            if t > 0.0 && t.is_finite() && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, plane));
            }
        }
        best
    }

    /// Horizontal distance from the camera to the wall line at azimuth `phi`.
    pub fn wall_distance(&self, phi: f64) -> f64 {
        let (sx, cz) = phi.sin_cos();
        let along = |d: f64, lo: f64, hi: f64| {
            if d > 0.0 {
                hi / d
            } else if d < 0.0 {
                lo / d
            } else {
                f64::INFINITY
            }
        };
        along(sx, self.x_min, self.x_max).min(along(cz, self.z_min, self.z_max))
    }

    /// Polar angle of the ceiling-wall edge at azimuth `phi`.
    pub fn top_latitude(&self, phi: f64) -> f64 {
        self.wall_distance(phi).atan2(self.y_ceil)
    }

    /// Polar angle of the wall-floor edge at azimuth `phi`.
    pub fn bottom_latitude(&self, phi: f64) -> f64 {
        self.wall_distance(phi).atan2(self.y_floor)
    }

    /// Distance from the camera to the ceiling-wall edge at azimuth `phi`.
    pub fn top_radius(&self, phi: f64) -> f64 {
        self.wall_distance(phi).hypot(self.y_ceil)
    }

    /// Exact top and bottom boundaries at the column centers.
    pub fn boundaries(&self) -> (BoundaryVector, BoundaryVector) {
        let phis: Vec<f64> = (0..self.width).map(|u| column_phi(u, self.width)).collect();
        let top = phis.iter().map(|&p| self.top_latitude(p)).collect();
        let bottom = phis.iter().map(|&p| self.bottom_latitude(p)).collect();
        (
            BoundaryVector::from_latitudes(BoundaryKind::Top, top).expect("analytic latitudes"),
            BoundaryVector::from_latitudes(BoundaryKind::Bottom, bottom)
                .expect("analytic latitudes"),
        )
    }

    /// Exact distances to the top edge at the column centers.
    pub fn top_radii(&self) -> Vec<f64> {
        (0..self.width)
            .map(|u| self.top_radius(column_phi(u, self.width)))
            .collect()
    }
}

/// Ground-truth maps of a rendered room.
#[derive(Debug, Clone)]
pub struct SceneRender {
    pub depth: EquirectGrid,
    pub normals: EquirectGrid,
    pub labels: LayoutClassMap,
    pub top: BoundaryVector,
    pub bottom: BoundaryVector,
}

pub fn render_cuboid(scene: &CuboidScene) -> Result<SceneRender> {
    scene.validate()?;
    let (w, h) = (scene.width, scene.height);
    let mut depth = EquirectGrid::new(w, h, 1)?;
    let mut normals = EquirectGrid::new(w, h, 3)?;
    let mut labels = LayoutClassMap::filled(w, h, LayoutClass::NotLayout)?;
    for v in 0..h {
        for u in 0..w {
            let dir = unit_direction(pix_to_ang(u, v, w, h)?);
            let (t, plane) = scene
                .intersect(&dir)
                .expect("a ray from inside a closed room always hits a plane");
            depth.set(u, v, 0, t as f32);
            let n = plane.inward_normal();
            let px = normals.pixel_mut(u, v);
            px[0] = n.x as f32;
            px[1] = n.y as f32;
            px[2] = n.z as f32;
            labels.set(u, v, plane.class());
        }
    }
    let (top, bottom) = scene.boundaries();
    Ok(SceneRender {
        depth,
        normals,
        labels,
        top,
        bottom,
    })
}

/// Punches seeded rectangular `NotLayout` holes into a class map until
/// roughly `hole_fraction` of the pixels are covered. Rectangles wrap across
/// the seam.
pub fn perturb_labels(
    labels: &LayoutClassMap,
    hole_fraction: f64,
    seed: u64,
) -> Result<LayoutClassMap> {
    if !(0.0..=0.5).contains(&hole_fraction) {
        return Err(Error::Domain(format!(
            "hole fraction must lie in [0, 0.5], got {hole_fraction}"
        )));
    }
    let (w, h) = labels.dims();
    let mut out = labels.clone();
    let target = (hole_fraction * (w * h) as f64).round() as usize;
    if target == 0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut holed = vec![false; w * h];
    let mut covered = 0;
    let (max_w, max_h) = ((w / 8).max(1), (h / 8).max(1));
    let (min_w, min_h) = ((w / 32).max(1), (h / 32).max(1));
    while covered < target {
        let rw = rng.random_range(min_w..=max_w);
        let rh = rng.random_range(min_h..=max_h);
        let u0 = rng.random_range(0..w);
        let v0 = rng.random_range(0..=h - rh);
        for v in v0..v0 + rh {
            for du in 0..rw {
                let u = (u0 + du) % w;
                if !holed[v * w + u] {
                    holed[v * w + u] = true;
                    covered += 1;
                    out.set(u, v, LayoutClass::NotLayout);
                }
            }
        }
    }
    Ok(out)
}
