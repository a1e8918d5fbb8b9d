//! Progressive Monte Carlo ray tracer for sphere-only scenes.
//!
//! The crate pairs two renderers over the same radiometric model: a serial
//! reference renderer that integrates direct lighting with fixed grids
//! ([`oracle`]), and a progressive pass-based renderer that traces one
//! sample per pixel per pass on a worker pool ([`scheduler`]) using either
//! direct lighting only or depth-bounded global illumination ([`tracer`]).
//! Per-pixel counter-based random streams make the progressive output a
//! pure function of (scene, config, seed), independent of worker count and
//! tile layout.

pub mod bench;
pub mod cli;
pub mod geometry;
pub mod imaging;
pub mod oracle;
pub mod radiometry;
pub mod scene;
pub mod scheduler;
pub mod tracer;
