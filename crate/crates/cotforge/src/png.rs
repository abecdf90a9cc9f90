//! PNG encode/decode for the core's raw RGBA images. Content hashes are
//! computed over pixel buffers, never encoded bytes, so they stay stable
//! regardless of encoder version.

use std::fs;
use std::path::Path;

use cotforge_core::render::Image;
use image::{ImageBuffer, Rgba};

use crate::PipelineError;

pub fn write_png(img: &Image, path: &Path) -> crate::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| PipelineError::data(format!("creating {}: {e}", parent.display())))?;
    }
    let buffer: ImageBuffer<Rgba<u8>, Vec<u8>> =
        ImageBuffer::from_raw(img.width(), img.height(), img.pixels().to_vec())
            .expect("buffer length matches dimensions");
    buffer
        .save(path)
        .map_err(|e| PipelineError::data(format!("writing {}: {e}", path.display())))
}

pub fn read_png(path: &Path) -> crate::Result<Image> {
    let loaded = image::open(path)
        .map_err(|e| PipelineError::data(format!("reading {}: {e}", path.display())))?
        .to_rgba8();
    let (w, h) = loaded.dimensions();
    Image::from_rgba8(w, h, loaded.into_raw())
        .ok_or_else(|| PipelineError::data(format!("{}: inconsistent buffer", path.display())))
}
