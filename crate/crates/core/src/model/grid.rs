use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{InlsError, Result};
use crate::linalg::Band;
use crate::model::quadrature::{line_product_weights, radial_product_weights};

/// Discretization order of the radial Laplacian.
///
/// `Second` is the conservative finite-volume form (self-adjoint in the grid
/// inner product, so Crank–Nicolson conserves the discrete mass exactly).
/// `Fourth` uses five-point stencils and is meant for ground-state solves
/// where the identity checks need more accuracy than second order gives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RadialOrder {
    #[default]
    Second,
    Fourth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// Periodized interval `[-L, L]`, dimension 1.
    Line { half_width: f64, n: usize },
    /// Radial functions on `|x| < rmax` in `R^dim`.
    Radial {
        dim: usize,
        rmax: f64,
        n: usize,
        order: RadialOrder,
    },
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match *self {
            Geometry::Line { .. } => 1,
            Geometry::Radial { dim, .. } => dim,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Geometry::Line { n, .. } | Geometry::Radial { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `L` for the line, `Rmax` for radial grids.
    pub fn extent(&self) -> f64 {
        match *self {
            Geometry::Line { half_width, .. } => half_width,
            Geometry::Radial { rmax, .. } => rmax,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Line { .. } => "line",
            Geometry::Radial { .. } => "radial",
        }
    }
}

pub(crate) struct Spectral {
    pub(crate) k: Vec<f64>,
    pub(crate) forward: Arc<dyn Fft<f64>>,
    pub(crate) inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Normalized inverse transform.
    pub(crate) fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let s = 1.0 / buf.len() as f64;
        for v in buf.iter_mut() {
            *v *= s;
        }
    }

    /// Applies the Fourier multiplier `m(k)` to `u`.
    pub(crate) fn multiply(&self, u: &[Complex64], m: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let mut buf = u.to_vec();
        self.forward(&mut buf);
        for (v, &k) in buf.iter_mut().zip(&self.k) {
            *v *= m(k);
        }
        self.inverse(&mut buf);
        buf
    }
}

pub(crate) enum Ops {
    Line(Spectral),
    Radial { laplacian: Band, gradient: Band },
}

/// Cell-centred spatial grid with quadrature weights.
pub struct Grid {
    geometry: Geometry,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    spacing: f64,
    ops: Ops,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("geometry", &self.geometry)
            .field("spacing", &self.spacing)
            .finish()
    }
}

/// Surface area of the unit sphere in `R^dim`.
pub fn sphere_area(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        d => 2.0 * PI * sphere_area(d - 2) / (d as f64 - 2.0),
    }
}

pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    sphere_area(dim) * radius.powi(dim as i32) / dim as f64
}

impl Grid {
    pub fn line(half_width: f64, n: usize) -> Result<Arc<Grid>> {
        Grid::new(Geometry::Line { half_width, n }).map(Arc::new)
    }

    /// Second-order radial grid.
    pub fn radial(dim: usize, rmax: f64, n: usize) -> Result<Arc<Grid>> {
        Grid::radial_with_order(dim, rmax, n, RadialOrder::Second)
    }

    pub fn radial_with_order(dim: usize, rmax: f64, n: usize, order: RadialOrder) -> Result<Arc<Grid>> {
        Grid::new(Geometry::Radial { dim, rmax, n, order }).map(Arc::new)
    }

    pub fn new(geometry: Geometry) -> Result<Grid> {
        match geometry {
            Geometry::Line { half_width, n } => {
                if !(half_width > 0.0 && half_width.is_finite()) {
                    return Err(InlsError::invalid("L", format!("half width {half_width} must be positive")));
                }
                if n < 8 || n % 2 != 0 {
                    return Err(InlsError::invalid("n", format!("line grid needs an even n >= 8, got {n}")));
                }
                Ok(Grid::build_line(half_width, n))
            }
            Geometry::Radial { dim, rmax, n, order } => {
                if dim < 2 {
                    return Err(InlsError::invalid("dim", "radial grids need dim >= 2; use the line for dim = 1"));
                }
                if !(rmax > 0.0 && rmax.is_finite()) {
                    return Err(InlsError::invalid("Rmax", format!("radius {rmax} must be positive")));
                }
                if n < 8 {
                    return Err(InlsError::invalid("n", format!("radial grid needs n >= 8, got {n}")));
                }
                // the first product weight turns negative beyond four dimensions
                if order == RadialOrder::Fourth && dim > 4 {
                    return Err(InlsError::invalid("radial_order", "fourth order supports dim <= 4"));
                }
                Ok(Grid::build_radial(dim, rmax, n, order))
            }
        }
    }

    fn build_line(l: f64, n: usize) -> Grid {
        let h = 2.0 * l / n as f64;
        let nodes = (0..n).map(|j| -l + (j as f64 + 0.5) * h).collect();
        let dk = std::f64::consts::PI / l;
        let k = (0..n)
            .map(|j| if j <= n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk })
            .collect();
        let mut planner = FftPlanner::new();
        let spectral = Spectral {
            k,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        };
        Grid {
            geometry: Geometry::Line { half_width: l, n },
            nodes,
            weights: vec![h; n],
            spacing: h,
            ops: Ops::Line(spectral),
        }
    }

    fn build_radial(dim: usize, rmax: f64, n: usize, order: RadialOrder) -> Grid {
        let h = rmax / n as f64;
        let nd = dim as f64;
        let r: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * h).collect();
        let omega = sphere_area(dim);
        let (weights, laplacian, gradient) = match order {
            RadialOrder::Second => {
                let shell: Vec<f64> = r
                    .iter()
                    .map(|&rj| ((rj + 0.5 * h).powf(nd) - (rj - 0.5 * h).powf(nd)) / (nd * h))
                    .collect();
                let face = |j: isize| -> f64 {
                    if j < 0 {
                        0.0
                    } else {
                        ((j as f64 + 1.0) * h).powi(dim as i32 - 1)
                    }
                };
                let lap = Band::from_stencil(n, |j| {
                    let s = 1.0 / (h * h * shell[j]);
                    let lo = face(j as isize - 1) * s;
                    let hi = face(j as isize) * s;
                    [0.0, lo, -(lo + hi), hi, 0.0]
                });
                let grad = Band::from_stencil(n, |_| [0.0, -0.5 / h, 0.0, 0.5 / h, 0.0]);
                let w = shell.iter().map(|s| omega * h * s).collect();
                (w, lap, grad)
            }
            RadialOrder::Fourth => {
                let d2 = [-1.0, 16.0, -30.0, 16.0, -1.0];
                let d1 = [1.0, -8.0, 0.0, 8.0, -1.0];
                let lap = Band::from_stencil(n, |j| {
                    let mut row = [0.0; 5];
                    for k in 0..5 {
                        row[k] = d2[k] / (12.0 * h * h) + (nd - 1.0) / r[j] * d1[k] / (12.0 * h);
                    }
                    row
                });
                let grad = Band::from_stencil(n, |_| {
                    let mut row = [0.0; 5];
                    for k in 0..5 {
                        row[k] = d1[k] / (12.0 * h);
                    }
                    row
                });
                let w = radial_product_weights(&r, h, nd - 1.0)
                    .into_iter()
                    .map(|w| omega * w)
                    .collect();
                (w, lap, grad)
            }
        };
        Grid {
            geometry: Geometry::Radial { dim, rmax, n, order },
            nodes: r,
            weights,
            spacing: h,
            ops: Ops::Radial { laplacian, gradient },
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.geometry, Geometry::Radial { .. })
    }

    /// Node coordinates: `x_j` on the line, `r_j` on radial grids.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights; radial weights include the surface factor.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn extent(&self) -> f64 {
        self.geometry.extent()
    }

    pub fn radial_order(&self) -> Option<RadialOrder> {
        match self.geometry {
            Geometry::Radial { order, .. } => Some(order),
            Geometry::Line { .. } => None,
        }
    }

    /// `W_j` such that `Σ w_j W_j f_j` approximates `∫ |x|^{-b} f`.
    ///
    /// The singular factor is integrated exactly cell by cell against a
    /// local interpolant of `f`, so the rule keeps its order near the origin.
    pub fn potential_weights(&self, b: f64) -> Vec<f64> {
        if b == 0.0 {
            return vec![1.0; self.len()];
        }
        let h = self.spacing;
        match self.geometry {
            Geometry::Line { .. } => line_product_weights(&self.nodes, h, -b).into_iter().map(|w| w / h).collect(),
            Geometry::Radial { dim, order, .. } => {
                let nd = dim as f64;
                match order {
                    RadialOrder::Second => self
                        .nodes
                        .iter()
                        .map(|&r| {
                            let (lo, hi) = (r - 0.5 * h, r + 0.5 * h);
                            let num = (hi.powf(nd - b) - lo.powf(nd - b)) / (nd - b);
                            let den = (hi.powf(nd) - lo.powf(nd)) / nd;
                            num / den
                        })
                        .collect(),
                    RadialOrder::Fourth => {
                        let num = radial_product_weights(&self.nodes, h, nd - 1.0 - b);
                        let den = radial_product_weights(&self.nodes, h, nd - 1.0);
                        num.iter().zip(&den).map(|(a, d)| a / d).collect()
                    }
                }
            }
        }
    }

    pub(crate) fn spectral(&self) -> Option<&Spectral> {
        match &self.ops {
            Ops::Line(s) => Some(s),
            Ops::Radial { .. } => None,
        }
    }

    pub(crate) fn laplacian_band(&self) -> Option<&Band> {
        match &self.ops {
            Ops::Radial { laplacian, .. } => Some(laplacian),
            Ops::Line(_) => None,
        }
    }

    pub fn apply_laplacian(&self, u: &[Complex64]) -> Vec<Complex64> {
        match &self.ops {
            Ops::Line(s) => s.multiply(u, |k| Complex64::new(-k * k, 0.0)),
            Ops::Radial { laplacian, .. } => laplacian.apply(u),
        }
    }

    /// `du/dx` on the line (spectral, Nyquist mode dropped) or `du/dr`.
    pub fn apply_gradient(&self, u: &[Complex64]) -> Vec<Complex64> {
        match &self.ops {
            Ops::Line(s) => {
                let n = self.len();
                let nyquist = s.k[n / 2];
                s.multiply(u, |k| if k == nyquist { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, k) })
            }
            Ops::Radial { gradient, .. } => gradient.apply(u),
        }
    }

    /// Real-valued Laplacian, used by the ground-state iteration.
    pub fn apply_laplacian_real(&self, u: &[f64]) -> Vec<f64> {
        match &self.ops {
            Ops::Line(_) => {
                let c: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                self.apply_laplacian(&c).into_iter().map(|z| z.re).collect()
            }
            Ops::Radial { laplacian, .. } => laplacian.apply(u),
        }
    }

    /// `Σ_{|x| ≤ R} w_j`, with the cell straddling `R` counted by its covered fraction.
    pub fn ball_weight(&self, radius: f64) -> f64 {
        let h = self.spacing;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * covered_fraction(x.abs(), h, radius))
            .sum()
    }
}

/// Fraction of the cell `[c - h/2, c + h/2]` lying inside `|x| ≤ radius`.
pub(crate) fn covered_fraction(c: f64, h: f64, radius: f64) -> f64 {
    ((radius - (c - 0.5 * h)) / h).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((ball_volume(3, 2.0) - 32.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn nodes_avoid_origin() {
        let g = Grid::line(5.0, 64).unwrap();
        let min = g.nodes().iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        assert!((min - 0.5 * g.spacing()).abs() < 1e-14);
        let g = Grid::radial(3, 5.0, 50).unwrap();
        assert!((g.nodes()[0] - 0.05).abs() < 1e-14);
    }

    #[test]
    fn ball_quadrature_matches_volume() {
        for dim in 2..=4 {
            for order in [RadialOrder::Second, RadialOrder::Fourth] {
                let g = Grid::radial_with_order(dim, 10.0, 4096, order).unwrap();
                for radius in [1.0, 3.3, 7.0] {
                    let exact = ball_volume(dim, radius);
                    let rel = (g.ball_weight(radius) - exact).abs() / exact;
                    assert!(rel < 1e-3, "dim {dim} {order:?} R {radius}: {rel}");
                }
            }
        }
        let g = Grid::line(10.0, 4096).unwrap();
        assert!((g.ball_weight(2.5) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn radial_weights_positive() {
        for dim in 2..=5 {
            for order in [RadialOrder::Second, RadialOrder::Fourth] {
                let Ok(g) = Grid::radial_with_order(dim, 4.0, 64, order) else {
                    assert!(dim > 4);
                    continue;
                };
                assert!(g.weights().iter().all(|&w| w > 0.0));
                assert!(g.potential_weights(0.5).iter().all(|&w| w > 0.0));
            }
        }
        let g = Grid::line(4.0, 64).unwrap();
        assert!(g.potential_weights(0.5).iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(Grid::line(1.0, 7).is_err());
        assert!(Grid::line(-1.0, 64).is_err());
        assert!(Grid::radial(1, 1.0, 64).is_err());
    }
}
