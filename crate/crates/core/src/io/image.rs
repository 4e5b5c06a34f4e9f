//! 8-bit PNG for label maps (grayscale) and color panoramas (RGB).

use std::io::Cursor;
use std::path::{Path, PathBuf};

use png::{BitDepth, ColorType, Transformations};

use crate::error::{Error, Result};
use crate::labeling::{LabelMap, LayoutClass, LayoutClassMap};
use crate::pano::EquirectGrid;

/// Display colors stored in the palette sidecar, by class id.
const PALETTE: [[u8; 3]; 4] = [[230, 200, 80], [70, 130, 200], [120, 80, 50], [0, 0, 0]];

fn encode(
    width: usize,
    height: usize,
    color: ColorType,
    data: &[u8],
) -> std::result::Result<Vec<u8>, String> {
    let (w, h) = (
        u32::try_from(width).map_err(|_| "width exceeds PNG limits")?,
        u32::try_from(height).map_err(|_| "height exceeds PNG limits")?,
    );
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, w, h);
        enc.set_color(color);
        enc.set_depth(BitDepth::Eight);
        let mut writer = enc.write_header().map_err(|e| e.to_string())?;
        writer.write_image_data(data).map_err(|e| e.to_string())?;
    }
    Ok(out)
}

/// Decodes an 8-bit PNG of the expected color type.
fn decode(bytes: &[u8], want: ColorType) -> std::result::Result<(usize, usize, Vec<u8>), String> {
    let mut dec = png::Decoder::new(Cursor::new(bytes));
    dec.set_transformations(Transformations::IDENTITY);
    let mut reader = dec.read_info().map_err(|e| e.to_string())?;
    let info = reader.info();
    if info.bit_depth != BitDepth::Eight || info.color_type != want {
        return Err(format!(
            "expected 8-bit {want:?}, found {:?}-bit {:?}",
            info.bit_depth as u8, info.color_type
        ));
    }
    let size = reader.output_buffer_size().ok_or("image too large")?;
    let mut buf = vec![0; size];
    let frame = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    buf.truncate(frame.buffer_size());
    Ok((frame.width as usize, frame.height as usize, buf))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Semantic label ids from an 8-bit grayscale PNG.
pub fn read_label_png(path: &Path) -> Result<LabelMap> {
    let (w, h, data) =
        decode(&read_bytes(path)?, ColorType::Grayscale).map_err(|m| Error::format(path, m))?;
    LabelMap::new(w, h, data.into_iter().map(u32::from).collect())
        .map_err(|e| Error::format(path, e.to_string()))
}

/// Layout classes from an 8-bit grayscale PNG of class ids.
pub fn read_layout_png(path: &Path) -> Result<LayoutClassMap> {
    let (w, h, data) =
        decode(&read_bytes(path)?, ColorType::Grayscale).map_err(|m| Error::format(path, m))?;
    LayoutClassMap::from_ids(w, h, &data).map_err(|e| Error::format(path, e.to_string()))
}

/// Path of the palette sidecar: same stem, `.json` extension.
pub fn palette_path(png_path: &Path) -> PathBuf {
    png_path.with_extension("json")
}

/// `{"<id>": {"name": ..., "rgb": [r, g, b]}}` for the four classes.
pub fn palette_json() -> String {
    let map: serde_json::Map<String, serde_json::Value> = LayoutClass::ALL
        .iter()
        .map(|c| {
            (
                c.id().to_string(),
                serde_json::json!({ "name": c.name(), "rgb": PALETTE[c.id() as usize] }),
            )
        })
        .collect();
    serde_json::to_string_pretty(&map).expect("palette is plain data")
}

/// Writes class ids as grayscale PNG plus the palette sidecar.
pub fn write_layout_png(path: &Path, labels: &LayoutClassMap) -> Result<()> {
    let (w, h) = labels.dims();
    let bytes =
        encode(w, h, ColorType::Grayscale, &labels.ids()).map_err(|m| Error::format(path, m))?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let side = palette_path(path);
    std::fs::write(&side, palette_json()).map_err(|e| Error::io(&side, e))
}

/// RGB PNG into a 3-channel grid with values in `[0, 255]`.
pub fn read_color_png(path: &Path) -> Result<EquirectGrid> {
    let (w, h, data) =
        decode(&read_bytes(path)?, ColorType::Rgb).map_err(|m| Error::format(path, m))?;
    EquirectGrid::from_vec(w, h, 3, data.into_iter().map(f32::from).collect())
        .map_err(|e| Error::format(path, e.to_string()))
}

/// Writes a 3-channel grid as RGB PNG, rounding and clamping to `[0, 255]`.
pub fn write_color_png(path: &Path, color: &EquirectGrid) -> Result<()> {
    if color.channels() != 3 {
        return Err(Error::Domain(format!(
            "{}: color needs 3 channels, got {}",
            path.display(),
            color.channels()
        )));
    }
    let (w, h) = color.dims();
    let data: Vec<u8> = color
        .data()
        .iter()
        .map(|&c| c.round().clamp(0.0, 255.0) as u8)
        .collect();
    let bytes = encode(w, h, ColorType::Rgb, &data).map_err(|m| Error::format(path, m))?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_round_trip_with_palette() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.png");
        let ids: Vec<u8> = (0..6 * 3).map(|i| (i % 4) as u8).collect();
        let map = LayoutClassMap::from_ids(6, 3, &ids).unwrap();
        write_layout_png(&path, &map).unwrap();
        assert_eq!(read_layout_png(&path).unwrap(), map);
        let raw = read_label_png(&path).unwrap();
        assert_eq!(
            raw.ids(),
            ids.iter().map(|&i| i as u32).collect::<Vec<_>>().as_slice()
        );
        let pal: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("labels.json")).unwrap())
                .unwrap();
        assert_eq!(pal["3"]["name"], "not_layout");
    }

    #[test]
    fn color_round_trip_and_wrong_type() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.png");
        let g = EquirectGrid::from_fn(4, 2, 3, |u, v, px| {
            px.copy_from_slice(&[u as f32, v as f32, 255.0])
        })
        .unwrap();
        write_color_png(&path, &g).unwrap();
        assert_eq!(read_color_png(&path).unwrap(), g);
        let err = read_label_png(&path).unwrap_err();
        assert!(matches!(err, Error::Format { .. }), "{err}");
    }

    #[test]
    fn garbage_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        std::fs::write(&path, b"not a png").unwrap();
        assert!(matches!(read_label_png(&path), Err(Error::Format { .. })));
        assert!(matches!(
            read_label_png(&dir.path().join("missing.png")),
            Err(Error::Io { .. })
        ));
    }
}
