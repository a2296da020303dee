//! Built-in graphs and domains used by tests, the CLI and the demo page.

use crate::ffdimers::{FFParams, TorusDomain};
use crate::quadgraph::{Color, QuadGraph, Vertex};

fn color_of(parity: i64) -> Color {
    if parity.rem_euclid(2) == 0 {
        Color::Black
    } else {
        Color::White
    }
}

/// The boundary of the unit cube: 8 vertices, 12 edges, 6 faces.
pub fn cube_sphere() -> QuadGraph {
    let pt = |k: usize| [(k >> 2 & 1) as i64, (k >> 1 & 1) as i64, (k & 1) as i64];
    let vertices = (0..8)
        .map(|k| {
            let p = pt(k);
            // bottom face outside, top face inside
            let s = if p[2] == 0 { 2.0 } else { 1.0 };
            let position = [(p[0] as f64 - 0.5) * s, (p[1] as f64 - 0.5) * s];
            Vertex { color: color_of(p[0] + p[1] + p[2]), position }
        })
        .collect();
    let mut faces = Vec::new();
    for axis in 0..3 {
        for side in 0..2i64 {
            let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
            let mut quad = Vec::new();
            for (a, b) in [(0, 0), (1, 0), (1, 1), (0, 1)] {
                let mut p = [0i64; 3];
                p[axis] = side;
                p[i] = a;
                p[j] = b;
                quad.push((p[0] * 4 + p[1] * 2 + p[2]) as usize);
            }
            // (e_i, e_j, e_axis) is right-handed, so this order is counterclockwise
            // seen from +e_axis; reverse it for the outer normal +e_axis
            if side == 1 {
                quad.reverse();
            }
            let start = quad.iter().position(|&k| {
                let p = pt(k);
                (p[0] + p[1] + p[2]) % 2 == 0
            });
            let start = start.unwrap();
            faces.push((0..4).map(|k| quad[(start + k) % 4]).collect());
        }
    }
    QuadGraph::from_faces(vertices, faces)
}

/// Two quads glued along all four edges.
pub fn two_face_sphere() -> QuadGraph {
    let v = |c, x: f64, y: f64| Vertex { color: c, position: [x, y] };
    let vs = vec![
        v(Color::Black, 0.0, 0.0),
        v(Color::White, 0.0, 1.0),
        v(Color::Black, 1.0, 1.0),
        v(Color::White, 1.0, 0.0),
    ];
    QuadGraph::from_faces(vs, vec![vec![0, 1, 2, 3], vec![0, 3, 2, 1]])
}

/// ℤ² modulo the lattice spanned by (1,1) and (1,−1): one black and one white
/// vertex, four edges, two faces.
pub fn square_torus() -> (QuadGraph, Vec<[i32; 2]>) {
    let vs = vec![
        Vertex { color: Color::Black, position: [0.0, 0.0] },
        Vertex { color: Color::White, position: [0.0, 1.0] },
    ];
    let g = QuadGraph::from_faces_and_edges(
        vs,
        vec![vec![0, 1, 0, 1], vec![0, 1, 0, 1]],
        vec![vec![0, 1, 2, 3], vec![3, 0, 1, 2]],
    )
    .expect("fixture");
    // period coordinates of the second face seen across each edge from the first
    let offsets = vec![[-1, -1], [0, -1], [0, 0], [-1, 0]];
    (g, offsets)
}

/// The square-lattice integrable domain at angle `theta`, with the two faces
/// carrying `(sin θ, cos θ)` and `(cos θ, sin θ)`.
pub fn octa_domain(theta: f64) -> TorusDomain {
    let (g, offsets) = square_torus();
    let (s, c) = theta.sin_cos();
    TorusDomain {
        graph: g,
        params: vec![FFParams { lambda: 1.0, a: s, b: c }, FFParams { lambda: 1.0, a: c, b: s }],
        offsets,
        periods: [[1, 1], [1, -1]],
        twist: [-1, 1],
    }
}
