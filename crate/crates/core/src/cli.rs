//! Command-line entry point: scene loading, progressive rendering with
//! optional snapshots, the serial reference mode, and the benchmark mode.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::bench::run_benchmark;
use crate::imaging::{write_ppm, ToneMapParams};
use crate::oracle::{oracle_render_local, OracleConfig};
use crate::scene::{parse_scene, Scene};
use crate::scheduler::{render, AccumulationBuffer, RenderConfig};
use crate::tracer::{TraceConfig, TraceMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "spheretrace",
    about = "Progressive Monte Carlo ray tracer for sphere scenes",
    disable_help_flag = false
)]
struct Args {
    /// Scene file path
    #[arg(long)]
    scene: PathBuf,

    /// Image width in pixels
    #[arg(long, default_value_t = 640)]
    width: u32,

    /// Image height in pixels
    #[arg(long, default_value_t = 480)]
    height: u32,

    /// Number of progressive passes
    #[arg(long, default_value_t = 64)]
    passes: u32,

    /// Shading mode: local (direct lighting only) or global
    #[arg(long, default_value = "global")]
    mode: String,

    /// Bounce depth for global mode
    #[arg(long, default_value_t = 6)]
    depth: u32,

    /// Worker threads (defaults to host cores)
    #[arg(long)]
    workers: Option<usize>,

    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output PPM path
    #[arg(long, default_value = "out.ppm")]
    out: PathBuf,

    /// Display gamma
    #[arg(long, default_value_t = 2.2)]
    gamma: f64,

    /// Linear exposure scale
    #[arg(long, default_value_t = 1.0)]
    exposure: f64,

    /// Run the serial reference renderer instead of the progressive one
    #[arg(long, default_value_t = false)]
    oracle: bool,

    /// Light-surface grid side for --oracle (samples per emitter = grid^2)
    #[arg(long, default_value_t = 16)]
    light_grid: u32,

    /// Camera rays per pixel for --oracle
    #[arg(long, default_value_t = 4)]
    rays_per_pixel: u32,

    /// Benchmark mode: comma-separated worker counts, e.g. 1,2,4
    #[arg(long, value_delimiter = ',')]
    bench: Option<Vec<usize>>,

    /// CSV output path for --bench
    #[arg(long, default_value = "bench.csv")]
    bench_csv: PathBuf,

    /// Write an intermediate image every K passes
    #[arg(long)]
    snapshot_every: Option<u32>,
}

fn snapshot_path(out: &Path, pass: u32) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = format!("{stem}.pass{pass:05}.ppm");
    out.with_file_name(name)
}

fn write_image_file(
    buffer: &AccumulationBuffer,
    params: &ToneMapParams,
    path: &Path,
) -> Result<(), String> {
    let mut file =
        fs::File::create(path).map_err(|e| format!("cannot create {}: {e}", path.display()))?;
    write_ppm(buffer, params, &mut file)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(())
}

fn load_scene(path: &Path) -> Result<Scene, (i32, String)> {
    let bytes = fs::read(path)
        .map_err(|e| (EXIT_IO, format!("cannot read scene file {}: {e}", path.display())))?;
    parse_scene(&bytes).map_err(|e| (EXIT_PARSE, format!("{}: {e}", path.display())))
}

pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            // clap renders --help/--version as "errors" with success status.
            if e.use_stderr() {
                eprint!("{e}");
                return EXIT_USAGE;
            }
            print!("{e}");
            return EXIT_OK;
        }
    };

    let mode = match args.mode.as_str() {
        "local" => TraceMode::Local,
        "global" => TraceMode::Global,
        other => {
            eprintln!("unknown mode '{other}' (expected 'local' or 'global')");
            return EXIT_USAGE;
        }
    };
    if args.width == 0 || args.height == 0 || args.passes == 0 {
        eprintln!("width, height, and passes must be positive");
        return EXIT_USAGE;
    }
    if !(args.gamma > 0.0 && args.exposure > 0.0) {
        eprintln!("gamma and exposure must be positive");
        return EXIT_USAGE;
    }
    let workers = args.workers.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    if workers == 0 {
        eprintln!("workers must be at least 1");
        return EXIT_USAGE;
    }

    let scene = match load_scene(&args.scene) {
        Ok(scene) => scene,
        Err((code, message)) => {
            eprintln!("{message}");
            return code;
        }
    };

    let trace = TraceConfig { mode, max_depth: args.depth, pass_index: 0, seed: args.seed };
    let tone = ToneMapParams { gamma: args.gamma, exposure: args.exposure };

    if let Some(worker_counts) = &args.bench {
        let cfg = RenderConfig::new(args.width, args.height, args.passes, trace)
            .with_workers(workers);
        let report = match run_benchmark(&scene, &cfg, worker_counts, 3) {
            Ok(report) => report,
            Err(e) => {
                eprintln!("benchmark failed: {e}");
                return EXIT_USAGE;
            }
        };
        print!("{report}");
        if let Err(e) = fs::write(&args.bench_csv, report.to_csv()) {
            eprintln!("cannot write {}: {e}", args.bench_csv.display());
            return EXIT_IO;
        }
        return EXIT_OK;
    }

    if args.oracle {
        let cfg = OracleConfig {
            light_grid: args.light_grid,
            width: args.width,
            height: args.height,
            rays_per_pixel: args.rays_per_pixel,
        };
        let image = oracle_render_local(&scene, &cfg);
        let buffer = AccumulationBuffer {
            width: image.width,
            height: image.height,
            sums: image.pixels,
            passes_completed: 1,
        };
        if let Err(message) = write_image_file(&buffer, &tone, &args.out) {
            eprintln!("{message}");
            return EXIT_IO;
        }
        return EXIT_OK;
    }

    let cfg =
        RenderConfig::new(args.width, args.height, args.passes, trace).with_workers(workers);
    let mut snapshot_error: Option<String> = None;
    let mut sink = |pass_index: u32, buffer: &AccumulationBuffer| {
        if let Some(every) = args.snapshot_every {
            let completed = pass_index + 1;
            if every > 0 && completed % every == 0 && completed < cfg.passes {
                let path = snapshot_path(&args.out, completed);
                if let Err(message) = write_image_file(buffer, &tone, &path) {
                    snapshot_error.get_or_insert(message);
                }
            }
        }
    };
    let buffer = render(&scene, &cfg, Some(&mut sink));
    if let Some(message) = snapshot_error {
        eprintln!("{message}");
        return EXIT_IO;
    }
    if let Err(message) = write_image_file(&buffer, &tone, &args.out) {
        eprintln!("{message}");
        return EXIT_IO;
    }
    EXIT_OK
}
