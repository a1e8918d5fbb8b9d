//! Pass engine: one trace per pixel per pass, tiled across a worker pool,
//! accumulating into the progressive buffer. The final buffer is a pure
//! function of (scene, config, seed) — worker count, tile size, and tile
//! execution order are invisible in the output.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::radiometry::Spectrum;
use crate::scene::Scene;
use crate::tracer::{
    generate_camera_ray, trace_global_iterative, trace_local, RngStream, TraceConfig,
    TraceMode,
};

/// Per-pixel running radiance sums plus the number of completed passes.
/// Sums are kept in double precision so thousands of passes accumulate
/// without drift.
#[derive(Debug, Clone, PartialEq)]
pub struct AccumulationBuffer {
    pub width: u32,
    pub height: u32,
    pub sums: Vec<Spectrum>,
    pub passes_completed: u32,
}

impl AccumulationBuffer {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0);
        AccumulationBuffer {
            width,
            height,
            sums: vec![Spectrum::ZERO; (width * height) as usize],
            passes_completed: 0,
        }
    }

    /// Mean radiance image, sums / passes_completed.
    pub fn mean_image(&self) -> RadianceImage {
        assert!(self.passes_completed > 0, "no passes accumulated");
        let scale = 1.0 / self.passes_completed as f64;
        RadianceImage {
            width: self.width,
            height: self.height,
            pixels: self.sums.iter().map(|&s| s * scale).collect(),
        }
    }

    /// Bitwise equality of the accumulated state.
    pub fn bit_identical(&self, other: &AccumulationBuffer) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.passes_completed == other.passes_completed
            && self
                .sums
                .iter()
                .zip(&other.sums)
                .all(|(a, b)| {
                    a.r.to_bits() == b.r.to_bits()
                        && a.g.to_bits() == b.g.to_bits()
                        && a.b.to_bits() == b.b.to_bits()
                })
    }
}

/// A plain linear-radiance image (row 0 at the top).
#[derive(Debug, Clone, PartialEq)]
pub struct RadianceImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<Spectrum>,
}

#[derive(Debug, Clone)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
    pub passes: u32,
    pub trace: TraceConfig,
    pub workers: usize,
    pub tile_size: u32,
}

impl RenderConfig {
    pub fn new(width: u32, height: u32, passes: u32, trace: TraceConfig) -> Self {
        RenderConfig { width, height, passes, trace, workers: 1, tile_size: 32 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        assert!(workers >= 1);
        self.workers = workers;
        self
    }
}

/// Pixel rectangle: x in [x0, x1), y in [y0, y1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tile {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl Tile {
    pub fn area(&self) -> usize {
        ((self.x1 - self.x0) * (self.y1 - self.y0)) as usize
    }
}

/// Disjoint cover of the image by tile_size-sided squares; edge tiles may be
/// smaller.
pub fn partition_tiles(width: u32, height: u32, tile_size: u32) -> Vec<Tile> {
    assert!(width > 0 && height > 0 && tile_size > 0);
    let mut tiles = Vec::new();
    let mut y0 = 0;
    while y0 < height {
        let y1 = (y0 + tile_size).min(height);
        let mut x0 = 0;
        while x0 < width {
            let x1 = (x0 + tile_size).min(width);
            tiles.push(Tile { x0, y0, x1, y1 });
            x0 = x1;
        }
        y0 = y1;
    }
    tiles
}

fn trace_pixel(
    px: u32,
    py: u32,
    scene: &Scene,
    cfg: &RenderConfig,
    pass_index: u32,
) -> Spectrum {
    let pixel_index = (py * cfg.width + px) as u64;
    let mut rng = RngStream::new(cfg.trace.seed, pixel_index, pass_index as u64);
    let jitter = (rng.next_f64(), rng.next_f64());
    let ray = generate_camera_ray(px, py, jitter, cfg.width, cfg.height, &scene.camera);
    match cfg.trace.mode {
        TraceMode::Local => trace_local(&ray, scene, &mut rng),
        TraceMode::Global => {
            let trace_cfg = TraceConfig { pass_index, ..cfg.trace };
            trace_global_iterative(&ray, scene, &trace_cfg, &mut rng)
        }
    }
}

/// Run one pass: exactly one camera ray per pixel, added into the buffer.
/// Returns the number of traces performed (width * height).
pub fn render_pass(
    scene: &Scene,
    cfg: &RenderConfig,
    buffer: &mut AccumulationBuffer,
    pass_index: u32,
) -> usize {
    assert_eq!(buffer.width, cfg.width);
    assert_eq!(buffer.height, cfg.height);

    let tiles = partition_tiles(cfg.width, cfg.height, cfg.tile_size);
    let next_tile = AtomicUsize::new(0);
    let done: Mutex<Vec<(Tile, Vec<Spectrum>)>> = Mutex::new(Vec::with_capacity(tiles.len()));

    std::thread::scope(|scope| {
        for _ in 0..cfg.workers {
            scope.spawn(|| loop {
                let i = next_tile.fetch_add(1, Ordering::Relaxed);
                let Some(tile) = tiles.get(i).copied() else {
                    break;
                };
                let mut samples = Vec::with_capacity(tile.area());
                for py in tile.y0..tile.y1 {
                    for px in tile.x0..tile.x1 {
                        samples.push(trace_pixel(px, py, scene, cfg, pass_index));
                    }
                }
                done.lock().unwrap().push((tile, samples));
            });
        }
    });

    // Each pixel belongs to exactly one tile, so merge order cannot affect
    // the per-pixel sums.
    for (tile, samples) in done.into_inner().unwrap() {
        let mut it = samples.into_iter();
        for py in tile.y0..tile.y1 {
            for px in tile.x0..tile.x1 {
                buffer.sums[(py * cfg.width + px) as usize] += it.next().unwrap();
            }
        }
    }
    buffer.passes_completed += 1;
    (cfg.width * cfg.height) as usize
}

/// Continue rendering into an existing buffer until cfg.passes total passes
/// are accumulated. Pass indices resume from buffer.passes_completed, so a
/// checkpointed buffer finishes bit-identical to an uninterrupted run.
pub fn render_into(
    scene: &Scene,
    cfg: &RenderConfig,
    buffer: &mut AccumulationBuffer,
    mut progress_sink: Option<&mut dyn FnMut(u32, &AccumulationBuffer)>,
) {
    while buffer.passes_completed < cfg.passes {
        let pass_index = buffer.passes_completed;
        render_pass(scene, cfg, buffer, pass_index);
        if let Some(sink) = progress_sink.as_deref_mut() {
            sink(pass_index, buffer);
        }
    }
}

/// Render cfg.passes passes from a fresh buffer. Passes run as a strict
/// sequence; parallelism lives inside each pass.
pub fn render(
    scene: &Scene,
    cfg: &RenderConfig,
    progress_sink: Option<&mut dyn FnMut(u32, &AccumulationBuffer)>,
) -> AccumulationBuffer {
    let mut buffer = AccumulationBuffer::new(cfg.width, cfg.height);
    render_into(scene, cfg, &mut buffer, progress_sink);
    buffer
}
