//! WebAssembly bindings for the demo page in `www/`.

use poropml::forms::{ricker, ricker_duration};
use poropml::materials::{derive, wave_speeds, MaterialSet, PRESET_NAMES};
use poropml::stretching::{beta0_from_reflection, Axis, PmlCoefficients, PmlFace, StretchingConfig, StretchingMode};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// `n` samples of the unit Ricker pulse on `[0, t_end]`.
#[wasm_bindgen]
pub fn ricker_curve(frequency: f64, t_end: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| ricker(t_end * k as f64 / (n - 1) as f64, frequency)).collect()
}

#[wasm_bindgen]
pub fn pulse_duration(frequency: f64) -> f64 {
    ricker_duration(frequency)
}

#[wasm_bindgen]
pub fn material_names() -> Vec<String> {
    PRESET_NAMES.iter().map(|s| s.to_string()).collect()
}

/// `[ρ, ρ_w, α, M, f_c, c_1p, c_2p, c_s]` of a shipped material set.
#[wasm_bindgen]
pub fn material_summary(name: &str) -> Result<Vec<f64>, JsError> {
    let set = MaterialSet::preset(name).ok_or_else(|| js_err(format!("unknown material `{name}`")))?;
    let d = derive(&set).map_err(js_err)?;
    let s = wave_speeds(&d).map_err(js_err)?;
    Ok(vec![d.rho, d.rho_w, d.alpha, d.m, d.f_c, s.c_1p, s.c_2p, s.c_s])
}

/// One coefficient of the layer (`a`, `b`, `c`, `beta_x`, `beta_y`) on an
/// `nx × ny` grid over `[-a-L, a+L] × [-d-L, 0]`, row-major from the top.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn layer_map(
    half_width: f64,
    depth: f64,
    width: f64,
    c_p: f64,
    alpha0: f64,
    multiaxial: bool,
    ratio: f64,
    field: &str,
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, JsError> {
    let beta0 = beta0_from_reflection(3, c_p, width, 1e-4).map_err(js_err)?;
    let face = |axis, start, normal| PmlFace { axis, start, normal, beta0 };
    let cfg = StretchingConfig {
        order: 3,
        width,
        alpha0,
        mode: if multiaxial { StretchingMode::Mpml } else { StretchingMode::Pml },
        p_yx: ratio,
        p_xy: ratio,
        faces: vec![face(Axis::X, -half_width, -1.0), face(Axis::X, half_width, 1.0), face(Axis::Y, -depth, -1.0)],
        bounds: [[-half_width - width, half_width + width], [-depth - width, 0.0]],
    };
    cfg.validate().map_err(js_err)?;
    let (nx, ny) = (nx.max(2), ny.max(2));
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = -(depth + width) * j as f64 / (ny - 1) as f64;
        for i in 0..nx {
            let x = cfg.bounds[0][0] + (cfg.bounds[0][1] - cfg.bounds[0][0]) * i as f64 / (nx - 1) as f64;
            let p = cfg.profiles(x, y).map_err(js_err)?;
            let c = PmlCoefficients::from_profiles(p);
            out.push(match field {
                "a" => c.a,
                "b" => c.b,
                "c" => c.c,
                "beta_x" => p.beta[0],
                "beta_y" => p.beta[1],
                _ => return Err(js_err(format!("unknown field `{field}`"))),
            });
        }
    }
    Ok(out)
}
