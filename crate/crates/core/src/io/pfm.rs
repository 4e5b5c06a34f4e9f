//! Portable float map: `PF` (3 channels) or `Pf` (1 channel), a size line,
//! a scale line whose sign gives the byte order (negative is
//! little-endian), then rows of 32-bit floats from the bottom row up.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pano::EquirectGrid;

/// Encodes a 1- or 3-channel grid as little-endian PFM.
pub fn encode_pfm(grid: &EquirectGrid) -> Result<Vec<u8>> {
    let magic = match grid.channels() {
        1 => "Pf",
        3 => "PF",
        c => {
            return Err(Error::Domain(format!(
                "PFM stores 1 or 3 channels, grid has {c}"
            )))
        }
    };
    let (w, h) = grid.dims();
    let row_len = w * grid.channels();
    let mut out = format!("{magic}\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(grid.data().len() * 4);
    for v in (0..h).rev() {
        for x in &grid.data()[v * row_len..(v + 1) * row_len] {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    Ok(out)
}

/// Reads the next whitespace-delimited token starting at `*pos`.
fn token<'a>(bytes: &'a [u8], pos: &mut usize) -> std::result::Result<&'a [u8], String> {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(format!("header ends early at byte offset {start}"));
    }
    Ok(&bytes[start..*pos])
}

fn parse_num<T: std::str::FromStr>(
    tok: &[u8],
    what: &str,
    offset: usize,
) -> std::result::Result<T, String> {
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("bad {what} at byte offset {offset}"))
}

/// Decodes PFM bytes. Errors name the byte offset where parsing failed.
pub fn decode_pfm(bytes: &[u8]) -> std::result::Result<EquirectGrid, String> {
    let mut pos = 0;
    let channels = match token(bytes, &mut pos)? {
        b"PF" => 3,
        b"Pf" => 1,
        _ => return Err("missing PF/Pf magic at byte offset 0".into()),
    };
    let at = pos;
    let w: usize = parse_num(token(bytes, &mut pos)?, "width", at)?;
    let at = pos;
    let h: usize = parse_num(token(bytes, &mut pos)?, "height", at)?;
    let at = pos;
    let scale: f64 = parse_num(token(bytes, &mut pos)?, "scale", at)?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(format!(
            "scale must be non-zero and finite at byte offset {at}"
        ));
    }
    // exactly one whitespace byte separates the header from the payload
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(format!("header ends early at byte offset {pos}"));
    }
    pos += 1;
    let count = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(channels))
        .filter(|n| n.checked_mul(4).is_some())
        .ok_or_else(|| format!("dimensions {w}x{h} overflow"))?;
    let need = count * 4;
    let have = bytes.len() - pos;
    if have < need {
        return Err(format!(
            "payload truncated at byte offset {}: expected {need} bytes after the header",
            bytes.len()
        ));
    }
    if have > need {
        return Err(format!(
            "{} trailing bytes after byte offset {}",
            have - need,
            pos + need
        ));
    }
    let little = scale < 0.0;
    let row_len = w * channels;
    let mut data = vec![0.0f32; count];
    for (i, chunk) in bytes[pos..].chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let x = if little {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let (file_row, col) = (i / row_len, i % row_len);
        data[(h - 1 - file_row) * row_len + col] = x;
    }
    EquirectGrid::from_vec(w, h, channels, data).map_err(|e| e.to_string())
}

pub fn read_pfm(path: &Path) -> Result<EquirectGrid> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pfm(&bytes).map_err(|m| Error::format(path, m))
}

pub fn write_pfm(path: &Path, grid: &EquirectGrid) -> Result<()> {
    let bytes = encode_pfm(grid)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
