//! Differential operators, interpolation and the scaling symmetry.

use num_complex::Complex64;

use crate::error::{InlsError, Result};
use crate::model::field::Field;
use crate::model::grid::Geometry;

/// Spectral Laplacian on the line, finite differences on radial grids.
pub fn laplacian(u: &Field) -> Field {
    Field::from_parts(u.model(), u.grid().apply_laplacian(u.values()))
}

/// `du/dx` on the line, `du/dr` on radial grids.
pub fn gradient(u: &Field) -> Field {
    Field::from_parts(u.model(), u.grid().apply_gradient(u.values()))
}

/// Four-point Lagrange interpolation of `u` at coordinate `y`; zero outside
/// the grid. On radial grids `y` is a radius and the even extension through
/// the origin is used.
pub fn interpolate(u: &Field, y: f64) -> Complex64 {
    let grid = u.grid();
    let h = grid.spacing();
    let n = grid.len() as isize;
    let vals = u.values();
    let zero = Complex64::new(0.0, 0.0);
    let (s, radial) = match grid.geometry() {
        Geometry::Line { half_width, .. } => {
            if y.abs() > half_width {
                return zero;
            }
            ((y + half_width) / h - 0.5, false)
        }
        Geometry::Radial { rmax, .. } => {
            let r = y.abs();
            if r > rmax {
                return zero;
            }
            (r / h - 0.5, true)
        }
    };
    let i = s.floor();
    let t = s - i;
    let i = i as isize;
    let at = |k: isize| -> Complex64 {
        let k = if radial && k < 0 { -k - 1 } else { k };
        if k < 0 || k >= n {
            zero
        } else {
            vals[k as usize]
        }
    };
    let w = [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ];
    at(i - 1) * w[0] + at(i) * w[1] + at(i + 1) * w[2] + at(i + 2) * w[3]
}

/// Mass fraction of `u` lying outside `|x| ≤ radius`.
pub(crate) fn mass_fraction_outside(u: &Field, radius: f64) -> f64 {
    let grid = u.grid();
    let h = grid.spacing();
    let mut total = 0.0;
    let mut outside = 0.0;
    for ((&x, &w), v) in grid.nodes().iter().zip(grid.weights()).zip(u.values()) {
        let m = w * v.norm_sqr();
        total += m;
        outside += m * (1.0 - crate::model::grid::covered_fraction(x.abs(), h, radius));
    }
    if total > 0.0 {
        outside / total
    } else {
        0.0
    }
}

/// `v(x) = rho^{(2-b)/(2σ)} u(rho x)`, sampled on the same grid.
///
/// Logs a warning when more than 1% of the mass of `u` falls outside the
/// part of the domain that the rescaled grid still sees.
pub fn rescale(u: &Field, rho: f64) -> Result<Field> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(InlsError::invalid("rho", format!("scale {rho} must be positive")));
    }
    if rho == 1.0 {
        return Ok(u.clone());
    }
    let lost = mass_fraction_outside(u, rho * u.grid().extent());
    if lost > 0.01 {
        log::warn!("rescale by {rho}: {:.2}% of the mass falls outside the domain", 100.0 * lost);
    }
    let amp = rho.powf(u.params().scaling_exponent());
    Ok(Field::from_parts(
        u.model(),
        u.grid().nodes().iter().map(|&x| interpolate(u, rho * x) * amp).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::field::Model;
    use crate::model::grid::Grid;
    use crate::model::params::ProblemParams;

    fn line_model(l: f64, n: usize) -> Arc<Model> {
        Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), Grid::line(l, n).unwrap()).unwrap()
    }

    #[test]
    fn laplacian_kills_constants_and_scales_modes() {
        let m = line_model(std::f64::consts::PI, 64);
        let c = m.sample_real(|_| 2.5);
        assert!(laplacian(&c).max_abs() < 1e-12);
        let k = 5.0;
        let s = m.sample_real(|x| (k * x).sin());
        let l = laplacian(&s);
        for (a, &x) in l.values().iter().zip(m.grid().nodes()) {
            assert!((a.re + k * k * (k * x).sin()).abs() < 1e-11);
        }
    }

    #[test]
    fn radial_laplacian_second_order() {
        let mut errs = vec![];
        for n in [200usize, 400, 800] {
            let grid = Grid::radial(3, 8.0, n).unwrap();
            let m = Model::new(ProblemParams::new(3, 1.0, 0.5).unwrap(), grid).unwrap();
            let u = m.sample_real(|r| (-r * r / 2.0).exp());
            let l = laplacian(&u);
            let e = m
                .grid()
                .nodes()
                .iter()
                .zip(l.values())
                .take(n / 2)
                .map(|(&r, v)| (v.re - (r * r - 3.0) * (-r * r / 2.0).exp()).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((1.8..=2.2).contains(&order), "order {order}");
        }
    }

    #[test]
    fn interpolation_is_exact_at_nodes() {
        let m = line_model(5.0, 128);
        let u = m.sample_real(|x| (-x * x).exp());
        for (j, &x) in m.grid().nodes().iter().enumerate() {
            assert!((interpolate(&u, x) - u.values()[j]).norm() < 1e-14);
        }
        assert_eq!(interpolate(&u, 6.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rescale_identity_and_rejects_bad_rho() {
        let m = line_model(5.0, 128);
        let u = m.sample_real(|x| (-x * x).exp());
        let v = rescale(&u, 1.0).unwrap();
        assert_eq!(u.values(), v.values());
        assert!(rescale(&u, 0.0).is_err());
        assert!(rescale(&u, -1.0).is_err());
    }
}
