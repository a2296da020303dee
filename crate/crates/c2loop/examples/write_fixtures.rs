//! Regenerates the JSON fixtures under `fixtures/` from the built-in constructors.

use c2loop::fixtures::{cube_sphere, octa_domain, two_face_sphere};
use c2loop::quadgraph::QuadGraph;
use c2loop::stepped::SteppedSolid;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};
use std::path::Path;

fn write(dir: &Path, name: &str, v: serde_json::Value) {
    std::fs::write(dir.join(name), serde_json::to_string_pretty(&v).unwrap() + "\n").unwrap();
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    write(&dir, "cube_sphere.json", cube_sphere().to_json());
    write(&dir, "two_face_sphere.json", two_face_sphere().to_json());
    write(&dir, "grid_2x2.json", QuadGraph::grid(2, 2).to_json());
    write(&dir, "octa_pi4.json", octa_domain(FRAC_PI_4).to_json());
    write(&dir, "octa_pi6.json", octa_domain(FRAC_PI_6).to_json());
    write(&dir, "one_cube.json", SteppedSolid::new([[-1, -1, -1]]).to_json());
    write(&dir, "two_cubes.json", SteppedSolid::new([[-1, -1, -1], [-2, -1, -1]]).to_json());
    write(&dir, "three_cubes.json", SteppedSolid::new([[-1, -1, -1], [-2, -1, -1], [-1, -2, -1]]).to_json());
}
