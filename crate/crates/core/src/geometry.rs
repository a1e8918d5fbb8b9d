//! Vector algebra, rays, and the ray-sphere intersection kernel.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scene::{Material, Scene};

/// Minimum accepted hit parameter. Rejects self-intersection of secondary
/// rays at their origin surface.
pub const EPS_T: f64 = 1e-4;

/// 3-component vector. Used for positions, unit directions, and offsets.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, rhs: Vec3) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    pub fn cross(self, rhs: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * rhs.z - self.z * rhs.y,
            y: self.z * rhs.x - self.x * rhs.z,
            z: self.x * rhs.y - self.y * rhs.x,
        }
    }

    pub fn length_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn length(self) -> f64 {
        self.length_squared().sqrt()
    }

    /// Unit vector in the same direction. Caller must not pass a zero vector.
    pub fn normalized(self) -> Vec3 {
        self / self.length()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        rhs * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x / rhs, self.y / rhs, self.z / rhs)
    }
}

/// Origin plus unit direction. Direction is normalized at construction so
/// the quadratic's leading coefficient is always 1.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, direction: Vec3) -> Self {
        Ray {
            origin,
            direction: direction.normalized(),
        }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
    pub material: Material,
}

impl Sphere {
    pub fn new(center: Vec3, radius: f64, material: Material) -> Self {
        assert!(radius > 0.0, "sphere radius must be positive");
        Sphere { center, radius, material }
    }

    /// Outward unit normal at a surface point.
    pub fn outward_normal(&self, point: Vec3) -> Vec3 {
        (point - self.center) / self.radius
    }
}

/// Nearest-intersection record.
#[derive(Debug, Clone, Copy)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
    /// Unit normal facing against the incoming ray (flipped for interior hits).
    pub normal: Vec3,
    pub object_index: usize,
}

/// Real roots of a quadratic, ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadRoots {
    None,
    One(f64),
    Two(f64, f64),
}

impl QuadRoots {
    pub fn smallest_at_least(self, min: f64) -> Option<f64> {
        match self {
            QuadRoots::None => None,
            QuadRoots::One(r) => (r >= min).then_some(r),
            QuadRoots::Two(r0, r1) => {
                if r0 >= min {
                    Some(r0)
                } else if r1 >= min {
                    Some(r1)
                } else {
                    None
                }
            }
        }
    }
}

/// All real roots of a*t^2 + b*t + c = 0, a != 0.
///
/// Uses the cancellation-free form: q = -(b + sign(b)*sqrt(disc))/2 with
/// roots q/a and c/q.
pub fn solve_quadratic(a: f64, b: f64, c: f64) -> QuadRoots {
    debug_assert!(a != 0.0);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return QuadRoots::None;
    }
    if disc == 0.0 {
        return QuadRoots::One(-b / (2.0 * a));
    }
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * disc.sqrt());
    let (r0, r1) = (q / a, c / q);
    if r0 <= r1 {
        QuadRoots::Two(r0, r1)
    } else {
        QuadRoots::Two(r1, r0)
    }
}

/// Smallest hit parameter t >= EPS_T, if any. An origin inside the sphere
/// yields the exit root.
pub fn intersect_sphere(ray: &Ray, sphere: &Sphere) -> Option<f64> {
    let oc = ray.origin - sphere.center;
    let a = ray.direction.length_squared();
    let b = 2.0 * oc.dot(ray.direction);
    let c = oc.length_squared() - sphere.radius * sphere.radius;
    solve_quadratic(a, b, c).smallest_at_least(EPS_T)
}

/// Linear scan for the nearest hit; ties go to the lowest object index.
pub fn intersect_scene(ray: &Ray, scene: &Scene) -> Option<Hit> {
    let mut best: Option<(f64, usize)> = None;
    for (index, sphere) in scene.spheres.iter().enumerate() {
        if let Some(t) = intersect_sphere(ray, sphere) {
            if best.map_or(true, |(bt, _)| t < bt) {
                best = Some((t, index));
            }
        }
    }
    best.map(|(t, object_index)| {
        let point = ray.at(t);
        let mut normal = scene.spheres[object_index].outward_normal(point);
        if normal.dot(ray.direction) > 0.0 {
            normal = -normal;
        }
        Hit { t, point, normal, object_index }
    })
}

/// Mirror reflection of unit direction `d` about unit normal `n`.
pub fn reflect(d: Vec3, n: Vec3) -> Vec3 {
    d - 2.0 * d.dot(n) * n
}

/// Snell refraction of unit direction `d` through a surface with unit normal
/// `n` opposing `d`. `eta_ratio` is n_incident / n_transmitted. Returns None
/// on total internal reflection.
pub fn refract(d: Vec3, n: Vec3, eta_ratio: f64) -> Option<Vec3> {
    let cos_i = -d.dot(n);
    let sin2_t = eta_ratio * eta_ratio * (1.0 - cos_i * cos_i);
    if sin2_t > 1.0 {
        return None;
    }
    let cos_t = (1.0 - sin2_t).sqrt();
    Some((eta_ratio * d + (eta_ratio * cos_i - cos_t) * n).normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radiometry::Spectrum;
    use crate::scene::{Camera, Material, MaterialKind, Scene};
    use proptest::prelude::*;

    fn plain_material() -> Material {
        Material {
            kind: MaterialKind::Diffuse,
            albedo: Spectrum::new(0.5, 0.5, 0.5),
            emission: Spectrum::ZERO,
            ior: 1.0,
        }
    }

    fn test_camera() -> Camera {
        Camera {
            eye: Vec3::new(0.0, 0.0, -10.0),
            look_at: Vec3::ZERO,
            up: Vec3::new(0.0, 1.0, 0.0),
            vfov_degrees: 45.0,
        }
    }

    fn scene_of(spheres: Vec<Sphere>) -> Scene {
        Scene::new(spheres, test_camera())
    }

    #[test]
    fn quadratic_two_roots() {
        assert_eq!(solve_quadratic(1.0, -6.0, 8.0), QuadRoots::Two(2.0, 4.0));
    }

    #[test]
    fn quadratic_no_roots() {
        assert_eq!(solve_quadratic(1.0, 0.0, 1.0), QuadRoots::None);
    }

    #[test]
    fn quadratic_tangent() {
        assert_eq!(solve_quadratic(1.0, -2.0, 1.0), QuadRoots::One(1.0));
    }

    #[test]
    fn sphere_front_hit() {
        let ray = Ray::new(Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0));
        let sphere = Sphere::new(Vec3::new(0.0, 0.0, 5.0), 1.0, plain_material());
        let t = intersect_sphere(&ray, &sphere).unwrap();
        assert!((t - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_miss() {
        let ray = Ray::new(Vec3::ZERO, Vec3::new(0.0, 1.0, 0.0));
        let sphere = Sphere::new(Vec3::new(0.0, 0.0, 5.0), 1.0, plain_material());
        assert!(intersect_sphere(&ray, &sphere).is_none());
    }

    #[test]
    fn sphere_origin_at_center_exit_root() {
        let ray = Ray::new(Vec3::new(0.0, 0.0, 5.0), Vec3::new(0.0, 0.0, 1.0));
        let sphere = Sphere::new(Vec3::new(0.0, 0.0, 5.0), 1.0, plain_material());
        let t = intersect_sphere(&ray, &sphere).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_tangent_hit() {
        let ray = Ray::new(Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0));
        let sphere = Sphere::new(Vec3::new(0.0, 0.0, 5.0), 1.0, plain_material());
        let t = intersect_sphere(&ray, &sphere).unwrap();
        assert!((t - 5.0).abs() < 1e-9);
    }

    #[test]
    fn scene_nearest_wins() {
        let scene = scene_of(vec![
            Sphere::new(Vec3::new(0.0, 0.0, 8.0), 1.0, plain_material()),
            Sphere::new(Vec3::new(0.0, 0.0, 5.0), 1.0, plain_material()),
        ]);
        let ray = Ray::new(Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0));
        let hit = intersect_scene(&ray, &scene).unwrap();
        assert_eq!(hit.object_index, 1);
        assert!((hit.t - 4.0).abs() < 1e-12);
    }

    #[test]
    fn scene_empty_misses() {
        let scene = scene_of(vec![]);
        let ray = Ray::new(Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0));
        assert!(intersect_scene(&ray, &scene).is_none());
    }

    #[test]
    fn scene_tie_breaks_to_lower_index() {
        let sphere = Sphere::new(Vec3::new(0.0, 0.0, 5.0), 1.0, plain_material());
        let scene = scene_of(vec![sphere.clone(), sphere]);
        let ray = Ray::new(Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0));
        let hit = intersect_scene(&ray, &scene).unwrap();
        assert_eq!(hit.object_index, 0);
    }

    #[test]
    fn interior_hit_flips_normal() {
        let scene = scene_of(vec![Sphere::new(Vec3::ZERO, 2.0, plain_material())]);
        let ray = Ray::new(Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0));
        let hit = intersect_scene(&ray, &scene).unwrap();
        assert!(hit.normal.dot(ray.direction) <= 0.0);
    }

    #[test]
    fn reflect_head_on() {
        let out = reflect(Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0));
        assert!((out - Vec3::new(0.0, 0.0, -1.0)).length() < 1e-12);
    }

    #[test]
    fn reflect_45_degrees() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let out = reflect(Vec3::new(s, -s, 0.0), Vec3::new(0.0, 1.0, 0.0));
        assert!((out - Vec3::new(s, s, 0.0)).length() < 1e-12);
    }

    #[test]
    fn reflect_grazing() {
        let out = reflect(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0));
        assert!((out - Vec3::new(1.0, 0.0, 0.0)).length() < 1e-12);
    }

    #[test]
    fn refract_index_match_is_identity() {
        let d = Vec3::new(0.0, 0.0, 1.0);
        let out = refract(d, Vec3::new(0.0, 0.0, -1.0), 1.0).unwrap();
        assert!((out - d).length() < 1e-9);
    }

    #[test]
    fn refract_normal_incidence_unchanged() {
        let d = Vec3::new(0.0, 0.0, 1.0);
        let out = refract(d, Vec3::new(0.0, 0.0, -1.0), 1.5).unwrap();
        assert!((out - d).length() < 1e-9);
    }

    #[test]
    fn refract_total_internal_reflection() {
        // 60 degree incidence, dense to sparse with ratio 1.5; critical
        // angle is asin(1/1.5) ~ 41.8 degrees.
        let theta = 60f64.to_radians();
        let d = Vec3::new(theta.sin(), 0.0, theta.cos()).normalized();
        assert!(refract(d, Vec3::new(0.0, 0.0, -1.0), 1.5).is_none());
    }

    fn arb_unit() -> impl Strategy<Value = Vec3> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter_map("too short", |(x, y, z)| {
                let v = Vec3::new(x, y, z);
                (v.length() > 1e-3).then(|| v.normalized())
            })
    }

    proptest! {
        #[test]
        fn hit_point_lies_on_sphere(
            ox in -10.0f64..10.0, oy in -10.0f64..10.0, oz in -10.0f64..10.0,
            d in arb_unit(),
            cx in -10.0f64..10.0, cy in -10.0f64..10.0, cz in -10.0f64..10.0,
            r in 0.05f64..8.0,
        ) {
            let ray = Ray::new(Vec3::new(ox, oy, oz), d);
            let sphere = Sphere::new(Vec3::new(cx, cy, cz), r, plain_material());
            if let Some(t) = intersect_sphere(&ray, &sphere) {
                prop_assert!(t >= EPS_T);
                let p = ray.at(t);
                let err = ((p - sphere.center).length() - r).abs();
                prop_assert!(err <= 1e-6 * r.max(1.0));
            }
        }

        #[test]
        fn intersect_agrees_with_quadratic(
            ox in -10.0f64..10.0, oy in -10.0f64..10.0, oz in -10.0f64..10.0,
            d in arb_unit(),
            cx in -10.0f64..10.0, cy in -10.0f64..10.0, cz in -10.0f64..10.0,
            r in 0.05f64..8.0,
        ) {
            let ray = Ray::new(Vec3::new(ox, oy, oz), d);
            let sphere = Sphere::new(Vec3::new(cx, cy, cz), r, plain_material());
            let oc = ray.origin - sphere.center;
            let expected = solve_quadratic(
                ray.direction.length_squared(),
                2.0 * oc.dot(ray.direction),
                oc.length_squared() - r * r,
            )
            .smallest_at_least(EPS_T);
            prop_assert_eq!(intersect_sphere(&ray, &sphere), expected);
        }

        #[test]
        fn reflect_is_involution(d in arb_unit(), n in arb_unit()) {
            prop_assume!(d.dot(n) < -1e-6);
            let twice = reflect(reflect(d, n), n);
            prop_assert!((twice - d).length() < 1e-9);
        }

        #[test]
        fn refract_unity_ratio_identity(d in arb_unit(), n in arb_unit()) {
            prop_assume!(d.dot(n) < -1e-6);
            let out = refract(d, n, 1.0).unwrap();
            prop_assert!((out - d).length() < 1e-9);
        }

        #[test]
        fn origin_shift_reduces_t(
            oz in -10.0f64..-2.0,
            delta in 0.0f64..1.0,
            r in 0.1f64..1.5,
        ) {
            let dir = Vec3::new(0.0, 0.0, 1.0);
            let sphere = Sphere::new(Vec3::ZERO, r, plain_material());
            let a = intersect_sphere(&Ray::new(Vec3::new(0.0, 0.0, oz), dir), &sphere);
            let b = intersect_sphere(
                &Ray::new(Vec3::new(0.0, 0.0, oz + delta), dir),
                &sphere,
            );
            if let (Some(ta), Some(tb)) = (a, b) {
                prop_assert!((ta - tb - delta).abs() < 1e-6);
            }
        }
    }
}
