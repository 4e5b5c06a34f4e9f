//! Equirectangular grid container and spherical geometry.

mod cloud;
mod coords;
mod grid;

pub use cloud::{lift_depth, normal_is_valid, normals_from_depth, StructuredPointCloud};
pub use coords::{
    ang_to_pix, cart_to_sph, column_phi, haversine_lat, pix_to_ang, row_theta, sph_to_cart,
    spherical_row_weights, unit_direction, vertical_latitude_shift, AngularCoord, Cart3,
};
pub use grid::{is_hole, EquirectGrid};
