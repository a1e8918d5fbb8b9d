//! Literal serial local-illumination reference renderer and image-difference
//! metrics. The oracle uses fixed stratified grids everywhere (pixel jitter
//! and light-surface samples), so two runs are bit-identical and its output
//! doubles as a regression fixture.

use thiserror::Error;

use crate::geometry::{intersect_scene, Ray, Vec3, EPS_T};
use crate::radiometry::{brdf_eval, Spectrum};
use crate::scene::{MaterialKind, Scene};
use crate::scheduler::RadianceImage;
use crate::tracer::generate_camera_ray;

#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Sampling points per emitter = light_grid^2, on a fixed
    /// latitude-longitude grid.
    pub light_grid: u32,
    pub width: u32,
    pub height: u32,
    /// Camera rays per pixel; laid out on a square stratified grid, so the
    /// effective count is the largest square <= this value.
    pub rays_per_pixel: u32,
}

/// RMSE and maximum absolute difference over linear radiance, per channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageDelta {
    pub rmse: f64,
    pub max_abs: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeltaError {
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
}

/// Direct lighting at a surface point by midpoint quadrature over every
/// emitter's surface: each latitude-longitude cell contributes
/// integrand * cell_area, with a per-sample shadow test.
fn direct_lighting_grid(
    p: Vec3,
    n: Vec3,
    material: &crate::scene::Material,
    w_o: Vec3,
    scene: &Scene,
    light_grid: u32,
) -> Spectrum {
    let mut total = Spectrum::ZERO;
    let shadow_origin = p + n * EPS_T;
    let g = light_grid as f64;
    let dtheta = std::f64::consts::PI / g;
    let dphi = 2.0 * std::f64::consts::PI / g;

    for &emitter_index in &scene.emitter_indices {
        let light = &scene.spheres[emitter_index];
        for i in 0..light_grid {
            let theta = (i as f64 + 0.5) * dtheta;
            let (sin_t, cos_t) = theta.sin_cos();
            for j in 0..light_grid {
                let phi = (j as f64 + 0.5) * dphi;
                let dir = Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t);
                let q = light.center + dir * light.radius;
                let to_light = q - shadow_origin;
                let dist2 = to_light.length_squared();
                if dist2 == 0.0 {
                    continue;
                }
                let dist = dist2.sqrt();
                let w_i = to_light / dist;
                let cos_surface = n.dot(w_i).max(0.0);
                let cos_light = (-w_i.dot(dir)).max(0.0);
                if cos_surface == 0.0 || cos_light == 0.0 {
                    continue;
                }
                let shadow_ray = Ray { origin: shadow_origin, direction: w_i };
                if let Some(hit) = intersect_scene(&shadow_ray, scene) {
                    if hit.object_index != emitter_index && hit.t < dist - EPS_T {
                        continue;
                    }
                }
                let area = light.radius * light.radius * sin_t * dtheta * dphi;
                let f_r = brdf_eval(material, w_i, w_o, n);
                total += f_r
                    * light.material.emission
                    * (cos_surface * cos_light / dist2 * area);
            }
        }
    }
    total
}

/// Serial reference render: per pixel, per stratified camera ray, nearest
/// intersection, then grid quadrature over every emitter surface with
/// per-sample shadow rejection; ray contributions are averaged.
pub fn oracle_render_local(scene: &Scene, cfg: &OracleConfig) -> RadianceImage {
    assert!(cfg.light_grid >= 1);
    assert!(cfg.width > 0 && cfg.height > 0 && cfg.rays_per_pixel >= 1);
    let strata = (cfg.rays_per_pixel as f64).sqrt().floor().max(1.0) as u32;
    let mut pixels = Vec::with_capacity((cfg.width * cfg.height) as usize);

    for py in 0..cfg.height {
        for px in 0..cfg.width {
            let mut acc = Spectrum::ZERO;
            for sy in 0..strata {
                for sx in 0..strata {
                    let jitter = (
                        (sx as f64 + 0.5) / strata as f64,
                        (sy as f64 + 0.5) / strata as f64,
                    );
                    let ray = generate_camera_ray(
                        px, py, jitter, cfg.width, cfg.height, &scene.camera,
                    );
                    if let Some(hit) = intersect_scene(&ray, scene) {
                        let material = &scene.spheres[hit.object_index].material;
                        acc += material.emission;
                        if material.kind == MaterialKind::Diffuse {
                            acc += direct_lighting_grid(
                                hit.point,
                                hit.normal,
                                material,
                                -ray.direction,
                                scene,
                                cfg.light_grid,
                            );
                        }
                    }
                }
            }
            pixels.push(acc * (1.0 / (strata * strata) as f64));
        }
    }
    RadianceImage { width: cfg.width, height: cfg.height, pixels }
}

/// RMSE and max-abs over pixels and channels of two equally sized images.
pub fn image_delta(a: &RadianceImage, b: &RadianceImage) -> Result<ImageDelta, DeltaError> {
    if a.width != b.width || a.height != b.height {
        return Err(DeltaError::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let mut sum_sq = 0.0;
    let mut max_abs: f64 = 0.0;
    for (pa, pb) in a.pixels.iter().zip(&b.pixels) {
        for (ca, cb) in [(pa.r, pb.r), (pa.g, pb.g), (pa.b, pb.b)] {
            let d = (ca - cb).abs();
            sum_sq += d * d;
            max_abs = max_abs.max(d);
        }
    }
    let n = (a.pixels.len() * 3) as f64;
    Ok(ImageDelta { rmse: (sum_sq / n).sqrt(), max_abs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Sphere;
    use crate::scene::{Camera, Material};
    use crate::scheduler::{render, RenderConfig};
    use crate::tracer::{TraceConfig, TraceMode};

    fn simple_scene() -> Scene {
        let camera = Camera {
            eye: Vec3::new(0.0, 0.0, -10.0),
            look_at: Vec3::ZERO,
            up: Vec3::new(0.0, 1.0, 0.0),
            vfov_degrees: 50.0,
        };
        Scene::new(
            vec![
                Sphere::new(
                    Vec3::new(0.0, 0.0, 3.0),
                    2.0,
                    Material {
                        kind: MaterialKind::Diffuse,
                        albedo: Spectrum::splat(0.8),
                        emission: Spectrum::ZERO,
                        ior: 1.0,
                    },
                ),
                Sphere::new(
                    Vec3::new(0.0, 6.0, -2.0),
                    1.5,
                    Material {
                        kind: MaterialKind::Diffuse,
                        albedo: Spectrum::ZERO,
                        emission: Spectrum::splat(10.0),
                        ior: 1.0,
                    },
                ),
            ],
            camera,
        )
    }

    fn no_emitter_scene() -> Scene {
        let mut scene = simple_scene();
        scene.spheres.truncate(1);
        Scene::new(scene.spheres, scene.camera)
    }

    #[test]
    fn zero_emitters_means_emission_only() {
        let scene = no_emitter_scene();
        let cfg = OracleConfig { light_grid: 4, width: 16, height: 12, rays_per_pixel: 4 };
        let image = oracle_render_local(&scene, &cfg);
        assert!(image.pixels.iter().all(|p| p.is_black()));
    }

    #[test]
    fn oracle_is_deterministic() {
        let scene = simple_scene();
        let cfg = OracleConfig { light_grid: 8, width: 16, height: 12, rays_per_pixel: 4 };
        let a = oracle_render_local(&scene, &cfg);
        let b = oracle_render_local(&scene, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn grid_refinement_converges() {
        let scene = simple_scene();
        let base = OracleConfig { light_grid: 32, width: 16, height: 12, rays_per_pixel: 4 };
        let fine = OracleConfig { light_grid: 64, ..base.clone() };
        let coarse_img = oracle_render_local(&scene, &base);
        let fine_img = oracle_render_local(&scene, &fine);
        let peak = fine_img
            .pixels
            .iter()
            .map(|p| p.max_channel())
            .fold(0.0f64, f64::max);
        let delta = image_delta(&coarse_img, &fine_img).unwrap();
        assert!(
            delta.max_abs <= 0.005 * peak,
            "max_abs {} vs peak {peak}",
            delta.max_abs
        );
    }

    #[test]
    fn progressive_local_mode_matches_oracle() {
        // Small-scale version of the central cross-implementation check.
        let scene = simple_scene();
        let oracle_cfg =
            OracleConfig { light_grid: 32, width: 16, height: 12, rays_per_pixel: 16 };
        let reference = oracle_render_local(&scene, &oracle_cfg);

        let trace = TraceConfig { mode: TraceMode::Local, ..TraceConfig::default() };
        let render_cfg = RenderConfig::new(16, 12, 2048, trace);
        let progressive = render(&scene, &render_cfg, None).mean_image();

        let peak = reference
            .pixels
            .iter()
            .map(|p| p.max_channel())
            .fold(0.0f64, f64::max);
        let delta = image_delta(&reference, &progressive).unwrap();
        assert!(
            delta.rmse <= 0.01 * peak,
            "rmse {} vs 1% of peak {peak}",
            delta.rmse
        );
    }

    #[test]
    fn delta_identical_images() {
        let scene = no_emitter_scene();
        let cfg = OracleConfig { light_grid: 1, width: 4, height: 4, rays_per_pixel: 1 };
        let image = oracle_render_local(&scene, &cfg);
        assert_eq!(
            image_delta(&image, &image).unwrap(),
            ImageDelta { rmse: 0.0, max_abs: 0.0 }
        );
    }

    #[test]
    fn delta_constant_offset() {
        let a = RadianceImage {
            width: 2,
            height: 2,
            pixels: vec![Spectrum::splat(0.3); 4],
        };
        let mut b = a.clone();
        for p in &mut b.pixels {
            *p += Spectrum::splat(0.1);
        }
        let d = image_delta(&a, &b).unwrap();
        assert!((d.rmse - 0.1).abs() < 1e-12);
        assert!((d.max_abs - 0.1).abs() < 1e-12);
    }

    #[test]
    fn delta_single_channel_spike() {
        let a = RadianceImage {
            width: 2,
            height: 2,
            pixels: vec![Spectrum::ZERO; 4],
        };
        let mut b = a.clone();
        b.pixels[2].g += 1.0;
        let d = image_delta(&a, &b).unwrap();
        assert!((d.rmse - (1.0f64 / 12.0).sqrt()).abs() < 1e-12);
        assert_eq!(d.max_abs, 1.0);
    }

    #[test]
    fn delta_dimension_mismatch_is_error() {
        let a = RadianceImage { width: 2, height: 2, pixels: vec![Spectrum::ZERO; 4] };
        let b = RadianceImage { width: 2, height: 3, pixels: vec![Spectrum::ZERO; 6] };
        assert!(image_delta(&a, &b).is_err());
    }

    #[test]
    fn max_abs_bounds_rmse() {
        let a = RadianceImage {
            width: 3,
            height: 1,
            pixels: vec![
                Spectrum::new(0.1, 0.9, 0.4),
                Spectrum::new(0.0, 0.2, 0.8),
                Spectrum::new(0.5, 0.5, 0.5),
            ],
        };
        let b = RadianceImage {
            width: 3,
            height: 1,
            pixels: vec![
                Spectrum::new(0.3, 0.1, 0.2),
                Spectrum::new(0.9, 0.2, 0.1),
                Spectrum::new(0.5, 0.0, 0.5),
            ],
        };
        let d = image_delta(&a, &b).unwrap();
        assert!(d.max_abs >= d.rmse);
        assert!(d.rmse >= 0.0);
    }
}
