//! Camera-set JSON: an array of `{"id": string, "center": [x, y, z]}`.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ppm::CameraSet;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraEntry {
    id: String,
    center: [f64; 3],
}

pub fn read_cameras(path: impl AsRef<Path>) -> Result<CameraSet> {
    let text = std::fs::read_to_string(&path)?;
    let entries: Vec<CameraEntry> = serde_json::from_str(&text)?;
    for e in &entries {
        if e.center.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedData {
                location: format!("camera `{}`", e.id),
                reason: "non-finite center coordinate".into(),
            });
        }
    }
    let (ids, centers) = entries.into_iter().map(|e| (e.id, e.center)).unzip();
    CameraSet::new(ids, centers)
}
