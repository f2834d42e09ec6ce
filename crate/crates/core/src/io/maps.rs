//! Correction-map raster format.
//!
//! Layout: 16-byte header (`NKGSMAPS` magic, width u32 LE, height u32 LE)
//! followed by float32 LE planes: the gain plane, then the three offset
//! planes.

use std::path::Path;

use crate::chroma::CorrectionMaps;
use crate::error::{Error, Result};
use crate::image::ImageBuffer;

pub const MAPS_MAGIC: &[u8; 8] = b"NKGSMAPS";

pub fn write_maps(maps: &CorrectionMaps, path: impl AsRef<Path>) -> Result<()> {
    let (w, h) = (maps.width(), maps.height());
    let mut bytes = Vec::with_capacity(16 + 16 * w * h);
    bytes.extend_from_slice(MAPS_MAGIC);
    bytes.extend_from_slice(&(w as u32).to_le_bytes());
    bytes.extend_from_slice(&(h as u32).to_le_bytes());
    for &v in maps.mul().data() {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    for &v in maps.add().data() {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn read_maps(path: impl AsRef<Path>) -> Result<CorrectionMaps> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 16 {
        return Err(Error::MalformedHeader(format!(
            "file is {} bytes, header needs 16",
            bytes.len()
        )));
    }
    if &bytes[..8] != MAPS_MAGIC {
        return Err(Error::MalformedHeader("bad magic, expected NKGSMAPS".into()));
    }
    let w = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let h = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let expected = 16 + 16 * w * h;
    if bytes.len() < expected {
        return Err(Error::TruncatedBody {
            expected,
            found: bytes.len(),
            unit: "bytes",
        });
    }
    if bytes.len() > expected {
        return Err(Error::MalformedData {
            location: format!("offset {expected}"),
            reason: format!("{} trailing bytes", bytes.len() - expected),
        });
    }
    let n = w * h;
    let plane = |index: usize| -> Vec<f64> {
        let start = 16 + index * 4 * n;
        (0..n)
            .map(|i| {
                let o = start + 4 * i;
                f64::from(f32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()))
            })
            .collect()
    };
    let mul = ImageBuffer::new(w, h, 1, plane(0))?;
    let mut add_data = plane(1);
    add_data.extend(plane(2));
    add_data.extend(plane(3));
    let add = ImageBuffer::new(w, h, 3, add_data)?;
    CorrectionMaps::new(mul, add)
}
