//! Scene data model and the line-oriented scene-file parser.
//!
//! Grammar (whitespace-separated fields, `#` comments, blank lines ignored):
//!
//! ```text
//! camera ex ey ez  lx ly lz  ux uy uz  vfov
//! sphere radius  cx cy cz  er eg eb  ar ag ab  kind [ior]
//! ```
//!
//! where `(er,eg,eb)` is emission, `(ar,ag,ab)` is albedo, and `kind` is one
//! of `diffuse`, `specular`, `refractive`. `ior` defaults to 1.5 when
//! omitted on a refractive sphere.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Sphere, Vec3};
use crate::radiometry::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaterialKind {
    Diffuse,
    Specular,
    Refractive,
}

impl MaterialKind {
    fn as_str(self) -> &'static str {
        match self {
            MaterialKind::Diffuse => "diffuse",
            MaterialKind::Specular => "specular",
            MaterialKind::Refractive => "refractive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Material {
    pub kind: MaterialKind,
    /// Per-channel reflectance in [0, 1].
    pub albedo: Spectrum,
    /// Emitted radiance, nonnegative.
    pub emission: Spectrum,
    /// Refractive index, used only when kind is refractive.
    pub ior: f64,
}

#[derive(Debug, Clone)]
pub struct Camera {
    pub eye: Vec3,
    pub look_at: Vec3,
    pub up: Vec3,
    pub vfov_degrees: f64,
}

/// Orthonormal camera frame: (right, up, forward) with
/// forward = normalize(look_at - eye) and right = normalize(forward x up).
pub fn build_camera_basis(camera: &Camera) -> (Vec3, Vec3, Vec3) {
    let forward = (camera.look_at - camera.eye).normalized();
    let right = forward.cross(camera.up).normalized();
    let up = right.cross(forward);
    (right, up, forward)
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub spheres: Vec<Sphere>,
    pub camera: Camera,
    /// Indices of spheres with nonzero emission, in sphere order.
    pub emitter_indices: Vec<usize>,
}

impl Scene {
    pub fn new(spheres: Vec<Sphere>, camera: Camera) -> Self {
        let emitter_indices = spheres
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.material.emission.is_black())
            .map(|(i, _)| i)
            .collect();
        Scene { spheres, camera, emitter_indices }
    }

    /// Serialize back to the scene-file grammar. Round-trips through
    /// `parse_scene`.
    pub fn to_scene_text(&self) -> String {
        let c = &self.camera;
        let mut out = String::new();
        writeln!(
            out,
            "camera {} {} {} {} {} {} {} {} {} {}",
            c.eye.x, c.eye.y, c.eye.z,
            c.look_at.x, c.look_at.y, c.look_at.z,
            c.up.x, c.up.y, c.up.z,
            c.vfov_degrees,
        )
        .unwrap();
        for s in &self.spheres {
            let m = &s.material;
            write!(
                out,
                "sphere {} {} {} {} {} {} {} {} {} {} {}",
                s.radius,
                s.center.x, s.center.y, s.center.z,
                m.emission.r, m.emission.g, m.emission.b,
                m.albedo.r, m.albedo.g, m.albedo.b,
                m.kind.as_str(),
            )
            .unwrap();
            if m.kind == MaterialKind::Refractive {
                write!(out, " {}", m.ior).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("missing camera")]
    MissingCamera,
    #[error("scene file is not valid UTF-8")]
    InvalidUtf8,
}

fn err(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Line { line, reason: reason.into() }
}

fn parse_f64(tok: &str, line: usize, what: &str) -> Result<f64, ParseError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| err(line, format!("non-numeric {what} field '{tok}'")))?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite {what} field '{tok}'")));
    }
    Ok(v)
}

/// Parse a scene file. Unknown directives are errors; the emitter cache is
/// built on success.
pub fn parse_scene(bytes: &[u8]) -> Result<Scene, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ParseError::InvalidUtf8)?;
    let mut camera: Option<Camera> = None;
    let mut spheres = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "camera" => {
                if camera.is_some() {
                    return Err(err(line_no, "duplicate camera"));
                }
                if tokens.len() != 11 {
                    return Err(err(
                        line_no,
                        format!("camera expects 10 fields, got {}", tokens.len() - 1),
                    ));
                }
                let mut f = [0.0; 10];
                for (k, tok) in tokens[1..].iter().enumerate() {
                    f[k] = parse_f64(tok, line_no, "camera")?;
                }
                let cam = Camera {
                    eye: Vec3::new(f[0], f[1], f[2]),
                    look_at: Vec3::new(f[3], f[4], f[5]),
                    up: Vec3::new(f[6], f[7], f[8]),
                    vfov_degrees: f[9],
                };
                if !(cam.vfov_degrees > 0.0 && cam.vfov_degrees < 180.0) {
                    return Err(err(line_no, "vfov must be in (0, 180)"));
                }
                let view = cam.look_at - cam.eye;
                if view.length() == 0.0 {
                    return Err(err(line_no, "eye and look_at coincide"));
                }
                if view.normalized().cross(cam.up).length() < 1e-9 {
                    return Err(err(line_no, "up is parallel to the view direction"));
                }
                camera = Some(cam);
            }
            "sphere" => {
                if tokens.len() != 12 && tokens.len() != 13 {
                    return Err(err(
                        line_no,
                        format!(
                            "sphere expects 11 fields plus optional ior, got {}",
                            tokens.len() - 1
                        ),
                    ));
                }
                let mut f = [0.0; 10];
                for (k, tok) in tokens[1..11].iter().enumerate() {
                    f[k] = parse_f64(tok, line_no, "sphere")?;
                }
                let radius = f[0];
                if radius <= 0.0 {
                    return Err(err(line_no, "radius must be positive"));
                }
                let emission = Spectrum::new(f[4], f[5], f[6]);
                if emission.r < 0.0 || emission.g < 0.0 || emission.b < 0.0 {
                    return Err(err(line_no, "emission must be nonnegative"));
                }
                let albedo = Spectrum::new(f[7], f[8], f[9]);
                for ch in [albedo.r, albedo.g, albedo.b] {
                    if !(0.0..=1.0).contains(&ch) {
                        return Err(err(line_no, "albedo must be in [0, 1]"));
                    }
                }
                let kind = match tokens[11] {
                    "diffuse" => MaterialKind::Diffuse,
                    "specular" => MaterialKind::Specular,
                    "refractive" => MaterialKind::Refractive,
                    other => {
                        return Err(err(line_no, format!("unknown material kind '{other}'")))
                    }
                };
                let ior = match (kind, tokens.len()) {
                    (MaterialKind::Refractive, 13) => {
                        let v = parse_f64(tokens[12], line_no, "ior")?;
                        if v < 1.0 {
                            return Err(err(line_no, "ior must be >= 1"));
                        }
                        v
                    }
                    (MaterialKind::Refractive, _) => 1.5,
                    (_, 13) => {
                        return Err(err(line_no, "ior is only valid on refractive spheres"))
                    }
                    _ => 1.0,
                };
                spheres.push(Sphere::new(
                    Vec3::new(f[1], f[2], f[3]),
                    radius,
                    Material { kind, albedo, emission, ior },
                ));
            }
            other => return Err(err(line_no, format!("unknown directive '{other}'"))),
        }
    }

    let camera = camera.ok_or(ParseError::MissingCamera)?;
    Ok(Scene::new(spheres, camera))
}
