//! Serial-vs-parallel benchmark harness. Times the same workload at several
//! worker counts and refuses to report speedups unless every run produced a
//! bit-identical buffer.

use std::fmt;
use std::time::Instant;

use thiserror::Error;

use crate::scene::Scene;
use crate::scheduler::{render, AccumulationBuffer, RenderConfig};

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub workers: usize,
    pub seconds: f64,
    pub rays_per_sec: f64,
    pub speedup: f64,
    pub buffers_identical: bool,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("empty worker count list")]
    NoWorkerCounts,
    #[error("buffers differ between workers={baseline} and workers={mismatched}; determinism violation")]
    BufferMismatch { baseline: usize, mismatched: usize },
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("workers,seconds,rays_per_sec,speedup,buffers_identical\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{:.6},{:.1},{:.3},{}\n",
                row.workers, row.seconds, row.rays_per_sec, row.speedup, row.buffers_identical
            ));
        }
        out
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>8} {:>12} {:>16} {:>9} {:>10}",
            "workers", "seconds", "rays/sec", "speedup", "identical"
        )?;
        for row in &self.rows {
            writeln!(
                f,
                "{:>8} {:>12.4} {:>16.1} {:>9.3} {:>10}",
                row.workers, row.seconds, row.rays_per_sec, row.speedup, row.buffers_identical
            )?;
        }
        Ok(())
    }
}

fn timed_render(scene: &Scene, cfg: &RenderConfig) -> (f64, AccumulationBuffer) {
    let start = Instant::now();
    let buffer = render(scene, cfg, None);
    (start.elapsed().as_secs_f64(), buffer)
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    values[values.len() / 2]
}

/// Render the identical workload at each worker count and report wall-clock
/// seconds (monotonic, median of `timed_runs` after one discarded warmup),
/// camera rays per second, and speedup versus the first worker count.
/// Buffers must be bit-identical across all worker counts; a mismatch aborts
/// the report.
pub fn run_benchmark(
    scene: &Scene,
    cfg: &RenderConfig,
    worker_counts: &[usize],
    timed_runs: usize,
) -> Result<BenchReport, BenchError> {
    if worker_counts.is_empty() {
        return Err(BenchError::NoWorkerCounts);
    }
    let timed_runs = timed_runs.max(1);
    let total_rays = (cfg.width as u64 * cfg.height as u64 * cfg.passes as u64) as f64;

    let mut baseline: Option<(usize, AccumulationBuffer)> = None;
    let mut timings = Vec::new();
    for &workers in worker_counts {
        let run_cfg = RenderConfig { workers: workers.max(1), ..cfg.clone() };
        let (_, warmup_buffer) = timed_render(scene, &run_cfg);
        let mut seconds = Vec::with_capacity(timed_runs);
        let mut last_buffer = warmup_buffer;
        for _ in 0..timed_runs {
            let (secs, buffer) = timed_render(scene, &run_cfg);
            seconds.push(secs);
            last_buffer = buffer;
        }
        match &baseline {
            None => baseline = Some((workers, last_buffer)),
            Some((base_workers, base_buffer)) => {
                if !base_buffer.bit_identical(&last_buffer) {
                    return Err(BenchError::BufferMismatch {
                        baseline: *base_workers,
                        mismatched: workers,
                    });
                }
            }
        }
        timings.push((workers, median(seconds)));
    }

    let reference_seconds = timings[0].1;
    let rows = timings
        .into_iter()
        .map(|(workers, seconds)| BenchRow {
            workers,
            seconds,
            rays_per_sec: total_rays / seconds,
            speedup: reference_seconds / seconds,
            buffers_identical: true,
        })
        .collect();
    Ok(BenchReport { rows })
}
