//! BRDF evaluation, area-light sampling, and the single-sample
//! direct-lighting estimator.

use std::ops::{Add, AddAssign, Mul};

use crate::geometry::{intersect_scene, Ray, Sphere, Vec3, EPS_T};
use crate::scene::{Material, MaterialKind, Scene};

/// RGB radiance or reflectance triple. Components are nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spectrum {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl Spectrum {
    pub const ZERO: Spectrum = Spectrum { r: 0.0, g: 0.0, b: 0.0 };
    pub const ONE: Spectrum = Spectrum { r: 1.0, g: 1.0, b: 1.0 };

    pub fn new(r: f64, g: f64, b: f64) -> Self {
        Spectrum { r, g, b }
    }

    pub fn splat(v: f64) -> Self {
        Spectrum::new(v, v, v)
    }

    pub fn is_black(self) -> bool {
        self.r == 0.0 && self.g == 0.0 && self.b == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.r.is_finite() && self.g.is_finite() && self.b.is_finite()
    }

    pub fn max_channel(self) -> f64 {
        self.r.max(self.g).max(self.b)
    }
}

impl Add for Spectrum {
    type Output = Spectrum;
    fn add(self, rhs: Spectrum) -> Spectrum {
        Spectrum::new(self.r + rhs.r, self.g + rhs.g, self.b + rhs.b)
    }
}

impl AddAssign for Spectrum {
    fn add_assign(&mut self, rhs: Spectrum) {
        *self = *self + rhs;
    }
}

impl Mul<f64> for Spectrum {
    type Output = Spectrum;
    fn mul(self, rhs: f64) -> Spectrum {
        Spectrum::new(self.r * rhs, self.g * rhs, self.b * rhs)
    }
}

// Componentwise product (throughput modulation).
impl Mul for Spectrum {
    type Output = Spectrum;
    fn mul(self, rhs: Spectrum) -> Spectrum {
        Spectrum::new(self.r * rhs.r, self.g * rhs.g, self.b * rhs.b)
    }
}

/// A point sampled on an emitter's surface.
#[derive(Debug, Clone, Copy)]
pub struct LightSample {
    pub point: Vec3,
    /// Probability density per unit surface area.
    pub pdf_area: f64,
    pub emitted: Spectrum,
    pub normal_at_sample: Vec3,
}

/// BRDF value for the given geometry. Diffuse surfaces are Lambertian
/// (albedo / pi); delta materials (specular, refractive) carry no finite
/// density and evaluate to zero.
pub fn brdf_eval(material: &Material, _w_i: Vec3, _w_o: Vec3, _n: Vec3) -> Spectrum {
    match material.kind {
        MaterialKind::Diffuse => material.albedo * std::f64::consts::FRAC_1_PI,
        MaterialKind::Specular | MaterialKind::Refractive => Spectrum::ZERO,
    }
}

/// Uniform sample over the full surface of an emitter sphere.
/// Mapping: cos(theta) = 1 - 2*u1, phi = 2*pi*u2; pdf_area = 1/(4*pi*r^2).
pub fn sample_light_point(light: &Sphere, u1: f64, u2: f64) -> LightSample {
    let cos_theta = 1.0 - 2.0 * u1;
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    let phi = 2.0 * std::f64::consts::PI * u2;
    let dir = Vec3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta);
    LightSample {
        point: light.center + dir * light.radius,
        pdf_area: 1.0 / (4.0 * std::f64::consts::PI * light.radius * light.radius),
        emitted: light.material.emission,
        normal_at_sample: dir,
    }
}

/// One-sample-per-light direct illumination at a diffuse surface point.
///
/// `samples` holds exactly one LightSample per entry of
/// `scene.emitter_indices`, in order. Each unshadowed emitter contributes
/// f_r * L_e * cos(surface) * cos(light) / (dist^2 * pdf_area); a blocked
/// emitter contributes zero. The emitter itself never blocks its own sample.
pub fn direct_radiance(
    p: Vec3,
    n: Vec3,
    material: &Material,
    w_o: Vec3,
    scene: &Scene,
    samples: &[LightSample],
) -> Spectrum {
    debug_assert_eq!(samples.len(), scene.emitter_indices.len());
    let mut total = Spectrum::ZERO;
    let shadow_origin = p + n * EPS_T;
    for (&emitter_index, sample) in scene.emitter_indices.iter().zip(samples) {
        let to_light = sample.point - shadow_origin;
        let dist2 = to_light.length_squared();
        if dist2 == 0.0 {
            continue;
        }
        let dist = dist2.sqrt();
        let w_i = to_light / dist;
        let cos_surface = n.dot(w_i).max(0.0);
        let cos_light = (-w_i.dot(sample.normal_at_sample)).max(0.0);
        if cos_surface == 0.0 || cos_light == 0.0 {
            continue;
        }
        let shadow_ray = Ray { origin: shadow_origin, direction: w_i };
        if let Some(hit) = intersect_scene(&shadow_ray, scene) {
            if hit.object_index != emitter_index && hit.t < dist - EPS_T {
                continue;
            }
        }
        let f_r = brdf_eval(material, w_i, w_o, n);
        total += f_r * sample.emitted * (cos_surface * cos_light / (dist2 * sample.pdf_area));
    }
    total
}

/// Cosine-weighted hemisphere direction about unit normal `n`,
/// pdf = cos(theta) / pi.
pub fn cosine_weighted_direction(n: Vec3, u1: f64, u2: f64) -> Vec3 {
    let r = u1.sqrt();
    let phi = 2.0 * std::f64::consts::PI * u2;
    let x = r * phi.cos();
    let y = r * phi.sin();
    let z = (1.0 - u1).max(0.0).sqrt();
    let (tangent, bitangent) = orthonormal_basis(n);
    (tangent * x + bitangent * y + n * z).normalized()
}

/// Deterministic tangent frame around a unit normal.
fn orthonormal_basis(n: Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() > 0.9 {
        Vec3::new(0.0, 1.0, 0.0)
    } else {
        Vec3::new(1.0, 0.0, 0.0)
    };
    let tangent = helper.cross(n).normalized();
    let bitangent = n.cross(tangent);
    (tangent, bitangent)
}
