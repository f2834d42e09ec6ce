//! PLY point-cloud reader and writer (ascii and binary little-endian).
//!
//! Supported vertex layout: `x, y, z` as float32 or float64, optional
//! `red, green, blue` as uchar, optional `nx, ny, nz` as float32 or float64.
//! Writing always emits float32 positions/normals and uchar colors, so
//! `write(read(write(c)))` is byte-identical.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ppm::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyFormat {
    Ascii,
    BinaryLe,
}

impl std::str::FromStr for PlyFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(PlyFormat::Ascii),
            "binary" | "binary_le" => Ok(PlyFormat::BinaryLe),
            other => Err(Error::invalid(
                "format",
                format!("expected `ascii` or `binary`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScalarType {
    F32,
    F64,
    U8,
}

impl ScalarType {
    fn size(self) -> usize {
        match self {
            ScalarType::F32 => 4,
            ScalarType::F64 => 8,
            ScalarType::U8 => 1,
        }
    }
}

#[derive(Debug)]
struct VertexLayout {
    /// Property names and types in file order.
    properties: Vec<(String, ScalarType)>,
    count: usize,
}

impl VertexLayout {
    fn index_of(&self, name: &str) -> Option<usize> {
        self.properties.iter().position(|(n, _)| n == name)
    }

    fn has_all(&self, names: &[&str]) -> bool {
        names.iter().all(|n| self.index_of(n).is_some())
    }

    fn has_any(&self, names: &[&str]) -> bool {
        names.iter().any(|n| self.index_of(n).is_some())
    }
}

pub fn read_ply(path: impl AsRef<Path>) -> Result<PointCloud> {
    let mut reader = BufReader::new(File::open(path)?);
    let (format, layout) = parse_header(&mut reader)?;
    let records = match format {
        PlyFormat::Ascii => read_ascii_body(&mut reader, &layout)?,
        PlyFormat::BinaryLe => read_binary_body(&mut reader, &layout)?,
    };
    build_cloud(&layout, records)
}

fn parse_header(reader: &mut impl BufRead) -> Result<(PlyFormat, VertexLayout)> {
    let mut line = String::new();
    read_header_line(reader, &mut line)?;
    if line.trim_end() != "ply" {
        return Err(Error::MalformedHeader(format!(
            "expected magic `ply`, got `{}`",
            line.trim_end()
        )));
    }
    read_header_line(reader, &mut line)?;
    let format = match line.trim_end() {
        "format ascii 1.0" => PlyFormat::Ascii,
        "format binary_little_endian 1.0" => PlyFormat::BinaryLe,
        other => {
            return Err(Error::MalformedHeader(format!(
                "unsupported format line `{other}`"
            )))
        }
    };

    let mut layout: Option<VertexLayout> = None;
    loop {
        read_header_line(reader, &mut line)?;
        let trimmed = line.trim_end();
        let mut words = trimmed.split_whitespace();
        match words.next() {
            Some("comment") | Some("obj_info") => continue,
            Some("element") => {
                let name = words
                    .next()
                    .ok_or_else(|| Error::MalformedHeader("element without a name".into()))?;
                if name != "vertex" {
                    return Err(Error::UnsupportedLayout(format!("element `{name}`")));
                }
                if layout.is_some() {
                    return Err(Error::MalformedHeader("duplicate vertex element".into()));
                }
                let count: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| Error::MalformedHeader("bad vertex count".into()))?;
                layout = Some(VertexLayout {
                    properties: Vec::new(),
                    count,
                });
            }
            Some("property") => {
                let layout = layout.as_mut().ok_or_else(|| {
                    Error::MalformedHeader("property before any element".into())
                })?;
                let ty = words
                    .next()
                    .ok_or_else(|| Error::MalformedHeader("property without a type".into()))?;
                if ty == "list" {
                    return Err(Error::UnsupportedLayout(
                        "list property on vertex element".into(),
                    ));
                }
                let name = words
                    .next()
                    .ok_or_else(|| Error::MalformedHeader("property without a name".into()))?;
                let scalar = match (ty, name) {
                    ("float" | "float32", "x" | "y" | "z" | "nx" | "ny" | "nz") => ScalarType::F32,
                    ("double" | "float64", "x" | "y" | "z" | "nx" | "ny" | "nz") => ScalarType::F64,
                    ("uchar" | "uint8", "red" | "green" | "blue") => ScalarType::U8,
                    _ => {
                        return Err(Error::UnsupportedLayout(format!(
                            "vertex property `{ty} {name}`"
                        )))
                    }
                };
                layout.properties.push((name.to_string(), scalar));
            }
            Some("end_header") => break,
            Some(other) => {
                return Err(Error::MalformedHeader(format!(
                    "unrecognized header line `{other} ...`"
                )))
            }
            None => continue,
        }
    }

    let layout =
        layout.ok_or_else(|| Error::MalformedHeader("no vertex element declared".into()))?;
    if !layout.has_all(&["x", "y", "z"]) {
        return Err(Error::UnsupportedLayout(
            "vertex element must declare x, y, z".into(),
        ));
    }
    for group in [["red", "green", "blue"], ["nx", "ny", "nz"]] {
        let refs: Vec<&str> = group.to_vec();
        if layout.has_any(&refs) && !layout.has_all(&refs) {
            return Err(Error::UnsupportedLayout(format!(
                "partial attribute group {group:?}"
            )));
        }
    }
    Ok((format, layout))
}

fn read_header_line(reader: &mut impl BufRead, line: &mut String) -> Result<()> {
    line.clear();
    if reader.read_line(line)? == 0 {
        return Err(Error::MalformedHeader(
            "end of file before end_header".into(),
        ));
    }
    // tolerate CRLF
    while line.ends_with('\n') || line.ends_with('\r') {
        line.pop();
    }
    Ok(())
}

fn read_ascii_body(reader: &mut impl BufRead, layout: &VertexLayout) -> Result<Vec<Vec<f64>>> {
    let mut records = Vec::with_capacity(layout.count);
    let mut line = String::new();
    while records.len() < layout.count {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Err(Error::TruncatedBody {
                expected: layout.count,
                found: records.len(),
                unit: "vertices",
            });
        }
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != layout.properties.len() {
            return Err(Error::MalformedData {
                location: format!("vertex {}", records.len()),
                reason: format!(
                    "{} values for {} properties",
                    tokens.len(),
                    layout.properties.len()
                ),
            });
        }
        let mut record = Vec::with_capacity(tokens.len());
        for (token, (name, ty)) in tokens.iter().zip(&layout.properties) {
            let value = match ty {
                // parse at the declared precision so ascii and binary
                // encodings of the same cloud agree exactly
                ScalarType::F32 => token.parse::<f32>().map(f64::from).ok(),
                ScalarType::F64 => token.parse::<f64>().ok(),
                ScalarType::U8 => token.parse::<u8>().map(f64::from).ok(),
            }
            .ok_or_else(|| Error::MalformedData {
                location: format!("vertex {}", records.len()),
                reason: format!("bad value `{token}` for property `{name}`"),
            })?;
            record.push(value);
        }
        records.push(record);
    }
    Ok(records)
}

fn read_binary_body(reader: &mut impl Read, layout: &VertexLayout) -> Result<Vec<Vec<f64>>> {
    let record_size: usize = layout.properties.iter().map(|(_, t)| t.size()).sum();
    let mut body = Vec::new();
    reader.read_to_end(&mut body)?;
    if body.len() < record_size * layout.count {
        return Err(Error::TruncatedBody {
            expected: layout.count,
            found: body.len() / record_size.max(1),
            unit: "vertices",
        });
    }
    let mut records = Vec::with_capacity(layout.count);
    let mut offset = 0;
    for _ in 0..layout.count {
        let mut record = Vec::with_capacity(layout.properties.len());
        for (_, ty) in &layout.properties {
            let value = match ty {
                ScalarType::F32 => f64::from(f32::from_le_bytes(
                    body[offset..offset + 4].try_into().unwrap(),
                )),
                ScalarType::F64 => {
                    f64::from_le_bytes(body[offset..offset + 8].try_into().unwrap())
                }
                ScalarType::U8 => f64::from(body[offset]),
            };
            offset += ty.size();
            record.push(value);
        }
        records.push(record);
    }
    Ok(records)
}

fn build_cloud(layout: &VertexLayout, records: Vec<Vec<f64>>) -> Result<PointCloud> {
    let xi = layout.index_of("x").unwrap();
    let yi = layout.index_of("y").unwrap();
    let zi = layout.index_of("z").unwrap();
    let positions: Vec<[f64; 3]> = records.iter().map(|r| [r[xi], r[yi], r[zi]]).collect();
    let colors = layout.index_of("red").map(|ri| {
        let gi = layout.index_of("green").unwrap();
        let bi = layout.index_of("blue").unwrap();
        records
            .iter()
            .map(|r| [r[ri] / 255.0, r[gi] / 255.0, r[bi] / 255.0])
            .collect()
    });
    let normals = layout.index_of("nx").map(|nxi| {
        let nyi = layout.index_of("ny").unwrap();
        let nzi = layout.index_of("nz").unwrap();
        records.iter().map(|r| [r[nxi], r[nyi], r[nzi]]).collect()
    });
    PointCloud::new(positions, colors, normals)
}

pub fn write_ply(cloud: &PointCloud, path: impl AsRef<Path>, format: PlyFormat) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    let format_line = match format {
        PlyFormat::Ascii => "format ascii 1.0",
        PlyFormat::BinaryLe => "format binary_little_endian 1.0",
    };
    write!(writer, "ply\n{format_line}\nelement vertex {}\n", cloud.len())?;
    write!(
        writer,
        "property float x\nproperty float y\nproperty float z\n"
    )?;
    if cloud.colors().is_some() {
        write!(
            writer,
            "property uchar red\nproperty uchar green\nproperty uchar blue\n"
        )?;
    }
    if cloud.normals().is_some() {
        write!(
            writer,
            "property float nx\nproperty float ny\nproperty float nz\n"
        )?;
    }
    writeln!(writer, "end_header")?;

    for i in 0..cloud.len() {
        let p = cloud.positions()[i];
        let color = cloud.colors().map(|c| {
            let q = c[i];
            [
                (q[0] * 255.0).round().clamp(0.0, 255.0) as u8,
                (q[1] * 255.0).round().clamp(0.0, 255.0) as u8,
                (q[2] * 255.0).round().clamp(0.0, 255.0) as u8,
            ]
        });
        let normal = cloud.normals().map(|n| n[i]);
        match format {
            PlyFormat::Ascii => {
                write!(writer, "{} {} {}", p[0] as f32, p[1] as f32, p[2] as f32)?;
                if let Some(c) = color {
                    write!(writer, " {} {} {}", c[0], c[1], c[2])?;
                }
                if let Some(n) = normal {
                    write!(writer, " {} {} {}", n[0] as f32, n[1] as f32, n[2] as f32)?;
                }
                writer.write_all(b"\n")?;
            }
            PlyFormat::BinaryLe => {
                for v in p {
                    writer.write_all(&(v as f32).to_le_bytes())?;
                }
                if let Some(c) = color {
                    writer.write_all(&c)?;
                }
                if let Some(n) = normal {
                    for v in n {
                        writer.write_all(&(v as f32).to_le_bytes())?;
                    }
                }
            }
        }
    }
    writer.flush()?;
    Ok(())
}
