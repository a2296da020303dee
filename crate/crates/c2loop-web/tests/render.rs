use c2loop_web::{curve_markup, diverging, free_energy_markup, free_energy_table, heatmap_markup};

#[test]
fn colours() {
    assert_eq!(diverging(0.0), "#ffffff");
    assert_eq!(diverging(-1.0), "#0000ff");
    assert_eq!(diverging(1.0), "#ff0000");
    assert_eq!(diverging(7.0), diverging(1.0));
}

#[test]
fn heatmap_layer_has_one_cell_per_point() {
    let s = heatmap_markup(12, 0.5, 6).unwrap();
    // i + j + k = 6 has 28 points
    assert_eq!(s.matches("<polygon").count(), 28);
    assert!(s.starts_with("<svg") && s.ends_with("</svg>"));
    assert_eq!(s, heatmap_markup(12, 0.5, 6).unwrap());
    assert!(heatmap_markup(2, 0.5, 1).is_err());
}

#[test]
fn curve_and_free_energy() {
    let c = curve_markup(3.0, 100).unwrap();
    assert!(c.contains("<polygon"));
    assert!(curve_markup(-1.0, 100).is_err());
    let t = free_energy_table(5, 64).unwrap();
    assert_eq!(t.len(), 5);
    assert!(t.windows(2).all(|w| w[0][0] < w[1][0]));
    // symmetric under θ ↦ π/2 − θ
    assert!((t[0][1] - t[4][1]).abs() < 1e-9 && (t[0][2] - t[4][2]).abs() < 1e-9);
    assert_eq!(free_energy_markup(5, 64).unwrap().matches("<polyline").count(), 2);
}
