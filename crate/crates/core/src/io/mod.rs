//! Bit-exact readers and writers: PLY point clouds, PNG images,
//! correction-map rasters, camera sets, and pipeline configuration.

mod cameras;
mod config;
mod maps;
mod ply;
mod png_io;

pub use cameras::read_cameras;
pub use config::{read_config, PipelineConfig};
pub use maps::{read_maps, write_maps, MAPS_MAGIC};
pub use ply::{read_ply, write_ply, PlyFormat};
pub use png_io::{read_png, write_png, PngDepth};
