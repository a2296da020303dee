//! Browser bindings: the dual curve, a layer of the ρ field and the free
//! energy of the square-lattice domain as SVG strings.

use c2loop::ffdimers::{free_energy, lobachevsky_free_energy};
use c2loop::fixtures::octa_domain;
use c2loop::limitshape::{curve_svg, dual_curve, lambda_param, rho_field};
use std::fmt::Write;
use wasm_bindgen::prelude::*;

fn js_err(e: c2loop::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Blue for negative, red for positive, white at zero; `t` in `[−1, 1]`.
pub fn diverging(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let fade = |x: f64| (255.0 * (1.0 - x.abs())).round() as u8;
    let (r, g, b) = if t < 0.0 { (fade(t), fade(t), 255) } else { (255, fade(t), fade(t)) };
    format!("#{r:02x}{g:02x}{b:02x}")
}

pub fn curve_markup(r: f64, points: usize) -> c2loop::Result<String> {
    let lam = lambda_param(r)?;
    Ok(curve_svg(&dual_curve(lam, points)?))
}

/// Points `i + j + k = level` drawn as triangle cells, coloured by ρ relative
/// to the largest magnitude on that layer.
pub fn heatmap_markup(n: i64, r: f64, level: i64) -> c2loop::Result<String> {
    let f = rho_field(n, r)?;
    let level = level.clamp(0, n);
    let layer: Vec<[i64; 3]> = f.points().into_iter().filter(|p| p[0] + p[1] + p[2] == level).collect();
    let top = layer.iter().map(|&p| f.get(p).abs()).fold(0.0, f64::max);
    let size = 500.0;
    let cell = (size - 40.0) / (level.max(1) as f64 + 1.0);
    let h = cell * 3f64.sqrt() / 2.0;
    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    for p in &layer {
        let (row, col) = (p[2] as f64, p[1] as f64 + p[2] as f64 / 2.0);
        let x = 20.0 + col * cell;
        let y = size - 20.0 - (row + 1.0) * h;
        let v = f.get(*p);
        let fill = diverging(if top > 0.0 { v / top } else { 0.0 });
        let _ = write!(
            s,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{fill}"><title>({},{},{}) {}</title></polygon>"#,
            x,
            y + h,
            x + cell,
            y + h,
            x + cell / 2.0,
            y,
            p[0],
            p[1],
            p[2],
            c2loop::fmt_sig(v)
        );
    }
    let _ = write!(
        s,
        r#"<text x="10" y="16" font-size="12">layer {level}, max |ρ| = {}</text></svg>"#,
        c2loop::fmt_sig(top)
    );
    Ok(s)
}

/// `(θ, Kasteleyn free energy, closed form)` on `steps` interior angles.
pub fn free_energy_table(steps: usize, grid: usize) -> c2loop::Result<Vec<[f64; 3]>> {
    let half = std::f64::consts::FRAC_PI_2;
    (1..=steps.max(1))
        .map(|k| {
            let th = half * k as f64 / (steps.max(1) + 1) as f64;
            Ok([th, free_energy(&octa_domain(th), grid)?, lobachevsky_free_energy(th)?])
        })
        .collect()
}

pub fn free_energy_markup(steps: usize, grid: usize) -> c2loop::Result<String> {
    let rows = free_energy_table(steps, grid)?;
    let (w, h, pad) = (500.0, 300.0, 30.0);
    let lo = rows.iter().flat_map(|r| [r[1], r[2]]).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().flat_map(|r| [r[1], r[2]]).fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-12);
    let px = |th: f64| pad + (w - 2.0 * pad) * th / std::f64::consts::FRAC_PI_2;
    let py = |v: f64| h - pad - (h - 2.0 * pad) * (v - lo) / span;
    let line = |k: usize| {
        rows.iter().map(|r| format!("{:.2},{:.2}", px(r[0]), py(r[k]))).collect::<Vec<_>>().join(" ")
    };
    Ok(format!(
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            r##"<rect x="{pad}" y="{pad}" width="{iw}" height="{ih}" fill="none" stroke="#999"/>"##,
            r#"<polyline points="{a}" fill="none" stroke="black" stroke-width="2"/>"#,
            r##"<polyline points="{b}" fill="none" stroke="#c33" stroke-dasharray="5,3"/>"##,
            r#"<text x="{pad}" y="20" font-size="12">free energy {lo} to {hi}; black: Kasteleyn, red: closed form</text>"#,
            r#"<text x="{pad}" y="{by}" font-size="12">θ from 0 to π/2</text></svg>"#
        ),
        w = w,
        h = h,
        pad = pad,
        iw = w - 2.0 * pad,
        ih = h - 2.0 * pad,
        a = line(1),
        b = line(2),
        lo = c2loop::fmt_sig(lo),
        hi = c2loop::fmt_sig(hi),
        by = h - 8.0
    ))
}

#[wasm_bindgen]
pub fn curve(r: f64, points: usize) -> Result<String, JsValue> {
    curve_markup(r, points).map_err(js_err)
}

#[wasm_bindgen]
pub fn heatmap(n: i32, r: f64, level: i32) -> Result<String, JsValue> {
    heatmap_markup(n as i64, r, level as i64).map_err(js_err)
}

#[wasm_bindgen]
pub fn free_energy_plot(steps: usize, grid: usize) -> Result<String, JsValue> {
    free_energy_markup(steps, grid).map_err(js_err)
}

#[wasm_bindgen]
pub fn lambda_of(r: f64) -> Result<f64, JsValue> {
    lambda_param(r).map_err(js_err)
}
