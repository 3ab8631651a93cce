//! Browser bindings for the basin laboratory.
//!
//! Each export is a thin wrapper over a plain Rust function so the logic
//! runs and is tested natively as well.

use newtonlab::basin::{direction_field, render_basin, sample_labels, trajectory_comparison, FieldKind, RenderOptions};
use newtonlab::benchmark::parse_benchmark;
use newtonlab::{FlowConfig, Mode, Rect};
use wasm_bindgen::prelude::*;

/// Largest grid the page may request, to keep the tab responsive.
pub const MAX_CELLS: usize = 400 * 400;

fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Rect, String> {
    let r = Rect::new(x0, x1, y0, y1);
    r.is_valid().then_some(r).ok_or_else(|| "rectangle must satisfy x0 < x1 and y0 < y1".to_string())
}

fn check_resolution(nx: usize, ny: usize) -> Result<(), String> {
    if nx < 2 || ny < 2 {
        Err("resolution must be at least 2 along each axis".into())
    } else if nx * ny > MAX_CELLS {
        Err(format!("at most {MAX_CELLS} cells"))
    } else {
        Ok(())
    }
}

/// RGBA pixels of a basin image, row 0 at the top edge `y1`.
pub fn basin_rgba(problem: &str, r: [f64; 4], nx: usize, ny: usize, mode: &str, shade: bool) -> Result<Vec<u8>, String> {
    let bench = parse_benchmark(problem).map_err(|e| e.to_string())?;
    let rect = rect(r[0], r[1], r[2], r[3])?;
    check_resolution(nx, ny)?;
    let mode: Mode = mode.parse().map_err(|e: newtonlab::solver::ModeParseError| e.to_string())?;
    let grid = sample_labels(bench.as_ref(), rect, nx, ny, &bench.solver_config(mode));
    let opts = RenderOptions { shade_iterations: shade, ..RenderOptions::default() };
    Ok(render_basin(&grid, &opts).to_rgba())
}

/// Classical, adaptive and flow trajectories from one start, as JSON.
/// For non-planar problems `(x, y)` are the guess parameters.
pub fn compare_json(problem: &str, x: f64, y: f64, tau: f64, dt: f64) -> Result<String, String> {
    let bench = parse_benchmark(problem).map_err(|e| e.to_string())?;
    Mode::adaptive(tau).map_err(|e| e.to_string())?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err("flow step must be positive".into());
    }
    let x0 = if bench.is_planar() { vec![x, y] } else { bench.initial_guess(x, y) };
    let cfg = FlowConfig { dt, ..FlowConfig::default() };
    Ok(trajectory_comparison(bench.as_ref(), &x0, tau, &cfg).to_json())
}

/// Unit directions of a planar field: five numbers per sample
/// `(x, y, vx, vy, magnitude)`, NaN directions at singular points.
pub fn field_values(problem: &str, r: [f64; 4], nx: usize, ny: usize, kind: &str) -> Result<Vec<f64>, String> {
    let bench = parse_benchmark(problem).map_err(|e| e.to_string())?;
    if !bench.is_planar() {
        return Err(format!("`{problem}` has no planar field"));
    }
    let rect = rect(r[0], r[1], r[2], r[3])?;
    check_resolution(nx, ny)?;
    let kind: FieldKind = kind.parse()?;
    Ok(direction_field(bench.problem(), rect, nx, ny, kind)
        .into_iter()
        .flat_map(|s| {
            let (vx, vy) = s.direction.unwrap_or((f64::NAN, f64::NAN));
            [s.x, s.y, vx, vy, s.magnitude]
        })
        .collect())
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen(js_name = renderBasin)]
#[allow(clippy::too_many_arguments)]
pub fn render_basin_js(problem: &str, x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize, mode: &str, shade: bool) -> Result<Vec<u8>, JsError> {
    basin_rgba(problem, [x0, x1, y0, y1], nx, ny, mode, shade).map_err(js)
}

#[wasm_bindgen(js_name = compareTrajectories)]
pub fn compare_trajectories_js(problem: &str, x: f64, y: f64, tau: f64, dt: f64) -> Result<String, JsError> {
    compare_json(problem, x, y, tau, dt).map_err(js)
}

#[wasm_bindgen(js_name = directionField)]
#[allow(clippy::too_many_arguments)]
pub fn direction_field_js(problem: &str, x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize, kind: &str) -> Result<Vec<f64>, JsError> {
    field_values(problem, [x0, x1, y0, y1], nx, ny, kind).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basin_image_size() {
        let px = basin_rgba("cubic", [-2.0, 2.0, -2.0, 2.0], 8, 6, "adaptive:0.1", false).unwrap();
        assert_eq!(px.len(), 8 * 6 * 4);
        assert!(px.chunks(4).all(|p| p[3] == 255));
    }

    #[test]
    fn bad_inputs_are_reported() {
        assert!(basin_rgba("cubic", [1.0, 0.0, 0.0, 1.0], 4, 4, "classical", false).is_err());
        assert!(basin_rgba("cubic", [0.0, 1.0, 0.0, 1.0], 4, 4, "adaptive:0", false).is_err());
        assert!(basin_rgba("cubic", [0.0, 1.0, 0.0, 1.0], 1000, 1000, "classical", false).is_err());
        assert!(field_values("bratu", [0.0, 1.0, 0.0, 1.0], 4, 4, "nrt").is_err());
        assert!(compare_json("cubic", 0.0, 0.0, -1.0, 0.01).is_err());
    }

    #[test]
    fn comparison_labels() {
        let json = compare_json("cubic", 0.08, 0.55, 0.05, 0.01).unwrap();
        assert!(json.contains("\"adaptive\"") && json.contains("\"flow\""));
    }

    #[test]
    fn field_layout() {
        let v = field_values("cubic", [-1.0, 1.0, -1.0, 1.0], 3, 3, "raw").unwrap();
        assert_eq!(v.len(), 45);
        let origin = &v[4 * 5..5 * 5];
        assert_eq!(origin, &[0.0, 0.0, -1.0, 0.0, 4.0]);
    }
}
