use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryKind, BoundaryVector};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryDoc {
    kind: BoundaryKind,
    width: usize,
    latitudes: Vec<Option<f64>>,
    valid: Vec<bool>,
}

/// Serializes a boundary as `{kind, width, latitudes, valid}`. Invalid
/// meridians carry `null` latitudes.
pub fn boundary_to_json(b: &BoundaryVector) -> String {
    let doc = BoundaryDoc {
        kind: b.kind(),
        width: b.width(),
        latitudes: (0..b.width()).map(|u| b.latitude(u)).collect(),
        valid: b.valid().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("boundary documents hold finite numbers")
}

pub fn boundary_from_json(text: &str) -> std::result::Result<BoundaryVector, String> {
    let doc: BoundaryDoc = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if doc.latitudes.len() != doc.width || doc.valid.len() != doc.width {
        return Err(format!(
            "declared width {} but found {} latitudes and {} validity flags",
            doc.width,
            doc.latitudes.len(),
            doc.valid.len()
        ));
    }
    let mut lat = Vec::with_capacity(doc.width);
    for (u, (l, &ok)) in doc.latitudes.iter().zip(&doc.valid).enumerate() {
        match (l, ok) {
            (Some(x), _) => lat.push(*x),
            (None, false) => lat.push(f64::NAN),
            (None, true) => return Err(format!("latitudes[{u}] is null on a valid meridian")),
        }
    }
    BoundaryVector::new(doc.kind, lat, doc.valid).map_err(|e| e.to_string())
}

pub fn read_boundary(path: &Path) -> Result<BoundaryVector> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    boundary_from_json(&text).map_err(|m| Error::format(path, m))
}

pub fn write_boundary(path: &Path, b: &BoundaryVector) -> Result<()> {
    std::fs::write(path, boundary_to_json(b)).map_err(|e| Error::io(path, e))
}
