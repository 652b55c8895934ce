//! Scene description files for the simulator: a small JSON document listing
//! a ground plane, spheres, and axis-aligned boxes with class labels.
//!
//! ```json
//! {
//!   "ground": { "z": -1.73, "label": 1 },
//!   "spheres": [ { "center": [12, 3, 0.5], "radius": 2, "label": 3 } ],
//!   "boxes": [ { "min": [-40, -40, -2], "max": [40, 40, 8], "label": 2 } ]
//! }
//! ```

use std::path::Path;

use rangekit_core::geometry::Vec3;
use rangekit_core::simulator::{Aabb, GroundPlane, Scene, Sphere};
use serde::Deserialize;

use super::FormatError;

#[derive(Deserialize)]
struct SceneSpec {
    #[serde(default)]
    ground: Option<GroundSpec>,
    #[serde(default)]
    spheres: Vec<SphereSpec>,
    #[serde(default)]
    boxes: Vec<BoxSpec>,
}

#[derive(Deserialize)]
struct GroundSpec {
    z: f64,
    label: u32,
}

#[derive(Deserialize)]
struct SphereSpec {
    center: [f64; 3],
    radius: f64,
    label: u32,
}

#[derive(Deserialize)]
struct BoxSpec {
    min: [f64; 3],
    max: [f64; 3],
    label: u32,
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

pub fn read_scene(path: &Path) -> Result<Scene, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    let spec: SceneSpec = serde_json::from_str(&text)
        .map_err(|e| FormatError::line(path, e.line(), format!("bad scene: {e}")))?;
    Ok(Scene {
        ground: spec.ground.map(|g| GroundPlane { z: g.z, label: g.label }),
        spheres: spec
            .spheres
            .into_iter()
            .map(|s| Sphere { center: vec3(s.center), radius: s.radius, label: s.label })
            .collect(),
        boxes: spec
            .boxes
            .into_iter()
            .map(|b| Aabb { min: vec3(b.min), max: vec3(b.max), label: b.label })
            .collect(),
    })
}
