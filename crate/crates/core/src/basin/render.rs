//! Basin images: one pixel per cell, coloured by the solution reached.

use super::sample::BasinGrid;

pub type Rgb = [u8; 3];

/// Colour of cells that did not converge to a known solution.
pub const DIVERGENT: Rgb = [18, 22, 40];
const MARKER: Rgb = [255, 255, 255];

#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    pub roots: Vec<Rgb>,
    pub divergent: Rgb,
}

impl Default for Palette {
    fn default() -> Self {
        Self {
            roots: vec![
                [230, 159, 0],
                [86, 180, 233],
                [0, 158, 115],
                [240, 228, 66],
                [204, 121, 167],
                [213, 94, 0],
            ],
            divergent: DIVERGENT,
        }
    }
}

impl Palette {
    pub fn color(&self, label: usize) -> Rgb {
        self.roots[label % self.roots.len()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub palette: Palette,
    /// Darken cells that needed many iterations.
    pub shade_iterations: bool,
    /// Draw rings at root locations that fall inside the rectangle.
    pub markers: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { palette: Palette::default(), shade_iterations: false, markers: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl RgbImage {
    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn set(&mut self, x: usize, y: usize, c: Rgb) {
        let i = 3 * (y * self.width + x);
        self.pixels[i..i + 3].copy_from_slice(&c);
    }

    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn to_rgba(&self) -> Vec<u8> {
        self.pixels.chunks(3).flat_map(|c| [c[0], c[1], c[2], 255]).collect()
    }

    /// Image flipped top to bottom.
    pub fn flipped_vertically(&self) -> Self {
        let row = 3 * self.width;
        let pixels = self.pixels.chunks(row).rev().flatten().copied().collect();
        Self { width: self.width, height: self.height, pixels }
    }
}

fn shade(c: Rgb, iterations: usize) -> Rgb {
    let f = 1.0 - 0.65 * (iterations.min(40) as f64 / 40.0);
    c.map(|v| (v as f64 * f).round() as u8)
}

pub fn render_basin(grid: &BasinGrid, opts: &RenderOptions) -> RgbImage {
    let (w, h) = (grid.plan.nx, grid.plan.ny);
    let mut img = RgbImage { width: w, height: h, pixels: vec![0; 3 * w * h] };
    for iy in 0..h {
        for ix in 0..w {
            let cell = grid.cell(ix, iy);
            let color = match cell.label {
                Some(l) if cell.converged() => {
                    let c = opts.palette.color(l);
                    if opts.shade_iterations {
                        shade(c, cell.iterations)
                    } else {
                        c
                    }
                }
                _ => opts.palette.divergent,
            };
            img.set(ix, iy, color);
        }
    }
    if opts.markers {
        let rect = grid.plan.rect;
        let radius = (w.min(h) as f64 / 80.0).max(2.0);
        for &(mx, my) in &grid.markers {
            if !rect.contains(mx, my) {
                continue;
            }
            let cx = (mx - rect.x0) / (rect.x1 - rect.x0) * (w.max(2) - 1) as f64;
            let cy = (rect.y1 - my) / (rect.y1 - rect.y0) * (h.max(2) - 1) as f64;
            for iy in 0..h {
                for ix in 0..w {
                    let d = ((ix as f64 - cx).powi(2) + (iy as f64 - cy).powi(2)).sqrt();
                    if (d - radius).abs() < 0.5 {
                        img.set(ix, iy, MARKER);
                    }
                }
            }
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basin::sample::{CellRecord, SamplingPlan};
    use crate::benchmark::{OracleConfig, Rect};
    use crate::solver::{Mode, SolveStatus, SolverConfig};

    fn grid_of(cells: Vec<CellRecord>, nx: usize, ny: usize) -> BasinGrid {
        BasinGrid {
            problem_id: "t".into(),
            labels: vec!["a".into(), "b".into()],
            plan: SamplingPlan {
                rect: Rect::new(-1.0, 1.0, -1.0, 1.0),
                nx,
                ny,
                solver: SolverConfig::new(Mode::Classical),
                oracle: OracleConfig::default(),
            },
            markers: vec![(0.0, 0.0)],
            cells,
        }
    }

    fn record(label: Option<usize>) -> CellRecord {
        CellRecord {
            label,
            status: if label.is_some() { SolveStatus::Converged } else { SolveStatus::MaxIters },
            iterations: 4,
            final_step: 1.0,
            steps: vec![],
            oracle: label,
            correct: label.is_some(),
            errors: vec![],
        }
    }

    #[test]
    fn single_converged_cell() {
        let img = render_basin(&grid_of(vec![record(Some(1))], 1, 1), &RenderOptions::default());
        assert_eq!(img.pixels, Palette::default().color(1).to_vec());
        let ppm = img.to_ppm();
        assert!(ppm.starts_with(b"P6\n1 1\n255\n"));
        assert_eq!(ppm.len(), 11 + 3);
    }

    #[test]
    fn all_divergent_is_dark() {
        let img = render_basin(&grid_of(vec![record(None); 16], 4, 4), &RenderOptions { markers: false, ..Default::default() });
        assert!(img.pixels.chunks(3).all(|c| c == DIVERGENT));
    }

    #[test]
    fn shading_darkens() {
        let c = shade([200, 100, 50], 40);
        assert!(c[0] < 200 && c[1] < 100);
        assert_eq!(shade([200, 100, 50], 0), [200, 100, 50]);
    }
}
