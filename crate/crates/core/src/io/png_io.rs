//! PNG image reading and writing (8- and 16-bit grayscale and RGB).

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PngDepth {
    Eight,
    Sixteen,
}

impl std::str::FromStr for PngDepth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "8" => Ok(PngDepth::Eight),
            "16" => Ok(PngDepth::Sixteen),
            other => Err(Error::invalid(
                "depth",
                format!("expected 8 or 16, got `{other}`"),
            )),
        }
    }
}

/// Read an 8- or 16-bit grayscale or RGB PNG into a planar unit-range image.
/// Integer samples map to `[0, 1]` by division with the sample maximum.
pub fn read_png(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let decoder = png::Decoder::new(BufReader::new(File::open(path)?));
    let mut reader = decoder.read_info()?;
    let buffer_size = reader.output_buffer_size().ok_or_else(|| {
        Error::UnsupportedColorType("image dimensions overflow the output buffer".into())
    })?;
    let mut buf = vec![0u8; buffer_size];
    let info = reader.next_frame(&mut buf)?;

    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => return Err(Error::UnsupportedColorType(format!("{other:?}"))),
    };
    let (w, h) = (info.width as usize, info.height as usize);
    let n = w * h;
    let mut data = vec![0.0f64; n * channels];
    match info.bit_depth {
        png::BitDepth::Eight => {
            for i in 0..n {
                for c in 0..channels {
                    data[c * n + i] = buf[i * channels + c] as f64 / 255.0;
                }
            }
        }
        png::BitDepth::Sixteen => {
            for i in 0..n {
                for c in 0..channels {
                    let o = (i * channels + c) * 2;
                    let v = u16::from_be_bytes([buf[o], buf[o + 1]]);
                    data[c * n + i] = v as f64 / 65535.0;
                }
            }
        }
        other => return Err(Error::UnsupportedColorType(format!("bit depth {other:?}"))),
    }
    ImageBuffer::new(w, h, channels, data)
}

/// Write a unit-range image as an 8- or 16-bit PNG. Samples are scaled by
/// the maximum value and rounded half-away-from-zero.
pub fn write_png(img: &ImageBuffer, path: impl AsRef<Path>, depth: PngDepth) -> Result<()> {
    if img.data().iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::invalid(
            "image",
            "values must be in [0, 1] for PNG export",
        ));
    }
    let color = match img.channels() {
        1 => png::ColorType::Grayscale,
        3 => png::ColorType::Rgb,
        other => return Err(Error::UnsupportedColorType(format!("{other} channels"))),
    };
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let channels = img.channels();

    let mut encoder = png::Encoder::new(
        BufWriter::new(File::create(path)?),
        w as u32,
        h as u32,
    );
    encoder.set_color(color);
    let bytes = match depth {
        PngDepth::Eight => {
            encoder.set_depth(png::BitDepth::Eight);
            let mut bytes = vec![0u8; n * channels];
            for i in 0..n {
                for c in 0..channels {
                    bytes[i * channels + c] = (img.data()[c * n + i] * 255.0).round() as u8;
                }
            }
            bytes
        }
        PngDepth::Sixteen => {
            encoder.set_depth(png::BitDepth::Sixteen);
            let mut bytes = vec![0u8; n * channels * 2];
            for i in 0..n {
                for c in 0..channels {
                    let v = (img.data()[c * n + i] * 65535.0).round() as u16;
                    let be = v.to_be_bytes();
                    let o = (i * channels + c) * 2;
                    bytes[o] = be[0];
                    bytes[o + 1] = be[1];
                }
            }
            bytes
        }
    };
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&bytes)?;
    Ok(())
}
