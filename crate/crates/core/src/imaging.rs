//! Tone mapping and binary PPM output.

use std::io::Write;

use thiserror::Error;

use crate::radiometry::Spectrum;
use crate::scheduler::AccumulationBuffer;

#[derive(Debug, Clone, Copy)]
pub struct ToneMapParams {
    pub gamma: f64,
    pub exposure: f64,
}

impl Default for ToneMapParams {
    fn default() -> Self {
        ToneMapParams { gamma: 2.2, exposure: 1.0 }
    }
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("buffer has no completed passes; mean image is undefined")]
    NoPasses,
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Linear mean radiance to display-referred 8-bit: per channel
/// clamp(exposure * v, 0, 1) ^ (1/gamma), scaled to [0, 255], rounded
/// half-up.
pub fn tone_map(mean_radiance: Spectrum, params: &ToneMapParams) -> [u8; 3] {
    let map = |v: f64| {
        let clamped = (params.exposure * v).clamp(0.0, 1.0);
        (255.0 * clamped.powf(1.0 / params.gamma)).round() as u8
    };
    [map(mean_radiance.r), map(mean_radiance.g), map(mean_radiance.b)]
}

/// Binary PPM (P6): `P6\n<width> <height>\n255\n` then width*height*3 bytes,
/// row 0 at the top, left to right. Returns the number of bytes written.
pub fn write_ppm(
    buffer: &AccumulationBuffer,
    params: &ToneMapParams,
    out: &mut dyn Write,
) -> Result<usize, WriteError> {
    if buffer.passes_completed == 0 {
        return Err(WriteError::NoPasses);
    }
    let header = format!("P6\n{} {}\n255\n", buffer.width, buffer.height);
    out.write_all(header.as_bytes())?;
    let mean = buffer.mean_image();
    let mut body = Vec::with_capacity(mean.pixels.len() * 3);
    for pixel in &mean.pixels {
        body.extend_from_slice(&tone_map(*pixel, params));
    }
    out.write_all(&body)?;
    Ok(header.len() + body.len())
}

/// Minimal P6 reader used as an independent check of the writer. Accepts the
/// exact header shape the writer emits.
pub fn read_ppm(bytes: &[u8]) -> Option<(u32, u32, Vec<[u8; 3]>)> {
    let mut parts = bytes.splitn(4, |&b| b == b'\n');
    let magic = parts.next()?;
    if magic != b"P6" {
        return None;
    }
    let dims = std::str::from_utf8(parts.next()?).ok()?;
    let mut it = dims.split_whitespace();
    let width: u32 = it.next()?.parse().ok()?;
    let height: u32 = it.next()?.parse().ok()?;
    if parts.next()? != b"255" {
        return None;
    }
    let body = parts.next()?;
    if body.len() != (width * height * 3) as usize {
        return None;
    }
    let pixels = body.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Some((width, height, pixels))
}
