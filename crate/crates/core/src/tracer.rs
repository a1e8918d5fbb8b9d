//! Per-ray radiance estimation: camera-ray generation, the single-pass
//! local-illumination kernel, and the iterative depth-bounded global tracer.

use crate::geometry::{intersect_scene, reflect, refract, Ray};
use crate::radiometry::{
    cosine_weighted_direction, direct_radiance, sample_light_point, LightSample, Spectrum,
};
use crate::scene::{build_camera_basis, Camera, MaterialKind, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Local,
    Global,
}

#[derive(Debug, Clone, Copy)]
pub struct TraceConfig {
    pub mode: TraceMode,
    /// Number of bounces after the camera hit (the iteration cap standing in
    /// for recursion depth).
    pub max_depth: u32,
    pub pass_index: u32,
    pub seed: u64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig { mode: TraceMode::Global, max_depth: 6, pass_index: 0, seed: 0 }
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based random stream. The output sequence is a pure function of
/// (seed, pixel_index, pass_index, counter); drawing advances only the
/// counter, so streams are reproducible from their indices alone.
#[derive(Debug, Clone)]
pub struct RngStream {
    pub seed: u64,
    pub pixel_index: u64,
    pub pass_index: u64,
    pub counter: u64,
    base: u64,
}

impl RngStream {
    pub fn new(seed: u64, pixel_index: u64, pass_index: u64) -> Self {
        let base = mix64(mix64(mix64(seed ^ GOLDEN) ^ pixel_index) ^ pass_index);
        RngStream { seed, pixel_index, pass_index, counter: 0, base }
    }

    /// Uniform draw in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        let bits = mix64(self.base ^ self.counter.wrapping_mul(GOLDEN));
        self.counter += 1;
        (bits >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }
}

/// Pinhole camera ray through image-plane point ((px+u1)/width,
/// (py+u2)/height); row py = 0 is the top of the image.
pub fn generate_camera_ray(
    px: u32,
    py: u32,
    jitter: (f64, f64),
    width: u32,
    height: u32,
    camera: &Camera,
) -> Ray {
    let (right, up, forward) = build_camera_basis(camera);
    let aspect = width as f64 / height as f64;
    let half_h = (camera.vfov_degrees.to_radians() * 0.5).tan();
    let u = (px as f64 + jitter.0) / width as f64;
    let v = (py as f64 + jitter.1) / height as f64;
    let x = (2.0 * u - 1.0) * aspect * half_h;
    let y = (1.0 - 2.0 * v) * half_h;
    Ray::new(camera.eye, forward + right * x + up * y)
}

fn draw_light_samples(scene: &Scene, rng: &mut RngStream) -> Vec<LightSample> {
    scene
        .emitter_indices
        .iter()
        .map(|&i| {
            let u1 = rng.next_f64();
            let u2 = rng.next_f64();
            sample_light_point(&scene.spheres[i], u1, u2)
        })
        .collect()
}

/// Single-pass local illumination: emission of the hit surface plus direct
/// lighting from one fresh sample per emitter. Delta materials return their
/// emission only; a miss is black.
pub fn trace_local(ray: &Ray, scene: &Scene, rng: &mut RngStream) -> Spectrum {
    let Some(hit) = intersect_scene(ray, scene) else {
        return Spectrum::ZERO;
    };
    let material = &scene.spheres[hit.object_index].material;
    let mut result = material.emission;
    if material.kind == MaterialKind::Diffuse {
        let samples = draw_light_samples(scene, rng);
        result += direct_radiance(
            hit.point,
            hit.normal,
            material,
            -ray.direction,
            scene,
            &samples,
        );
    }
    result
}

/// Depth-bounded iterative global illumination. Maintains (ray, throughput)
/// across bounces 0..=max_depth with next-event estimation at every diffuse
/// bounce; emission is collected only at the eye or after a non-diffuse
/// bounce, so emitters already handled by direct lighting are not counted
/// twice. No Russian roulette: termination is the fixed depth cap.
pub fn trace_global_iterative(
    ray: &Ray,
    scene: &Scene,
    cfg: &TraceConfig,
    rng: &mut RngStream,
) -> Spectrum {
    let mut current = *ray;
    let mut throughput = Spectrum::ONE;
    let mut result = Spectrum::ZERO;
    let mut collect_emission = true;

    for _bounce in 0..=cfg.max_depth {
        let Some(hit) = intersect_scene(&current, scene) else {
            break;
        };
        let sphere = &scene.spheres[hit.object_index];
        let material = &sphere.material;

        if collect_emission {
            result += throughput * material.emission;
        }

        match material.kind {
            MaterialKind::Diffuse => {
                let samples = draw_light_samples(scene, rng);
                result += throughput
                    * direct_radiance(
                        hit.point,
                        hit.normal,
                        material,
                        -current.direction,
                        scene,
                        &samples,
                    );
                throughput = throughput * material.albedo;
                let u1 = rng.next_f64();
                let u2 = rng.next_f64();
                let dir = cosine_weighted_direction(hit.normal, u1, u2);
                current = Ray { origin: hit.point, direction: dir };
                collect_emission = false;
            }
            MaterialKind::Specular => {
                throughput = throughput * material.albedo;
                let dir = reflect(current.direction, hit.normal);
                current = Ray { origin: hit.point, direction: dir };
                collect_emission = true;
            }
            MaterialKind::Refractive => {
                throughput = throughput * material.albedo;
                let outward = sphere.outward_normal(hit.point);
                let entering = current.direction.dot(outward) < 0.0;
                let eta_ratio = if entering {
                    1.0 / material.ior
                } else {
                    material.ior
                };
                let dir = match refract(current.direction, hit.normal, eta_ratio) {
                    None => reflect(current.direction, hit.normal),
                    Some(transmitted) => {
                        // Schlick split between reflection and transmission.
                        let f0 = {
                            let r = (material.ior - 1.0) / (material.ior + 1.0);
                            r * r
                        };
                        let cos = if entering {
                            -current.direction.dot(hit.normal)
                        } else {
                            transmitted.dot(outward)
                        };
                        let fresnel = f0 + (1.0 - f0) * (1.0 - cos).powi(5);
                        if rng.next_f64() < fresnel {
                            reflect(current.direction, hit.normal)
                        } else {
                            transmitted
                        }
                    }
                };
                current = Ray { origin: hit.point, direction: dir };
                collect_emission = true;
            }
        }

        if throughput.is_black() {
            break;
        }
    }
    result
}
