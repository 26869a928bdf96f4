//! Scalar functionals of a field: mass, energy, moments and window integrals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{InlsError, Result};
use crate::model::grid::covered_fraction;
use crate::model::ops::gradient;
use crate::model::Field;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedPair {
    pub mass: f64,
    pub energy: f64,
}

/// Result of a window integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub value: f64,
    pub center: f64,
    /// Set when the window is narrower than one cell.
    pub low_resolution: bool,
}

fn weighted_sum(u: &Field, f: impl Fn(f64, Complex64) -> f64) -> f64 {
    let g = u.grid();
    g.nodes()
        .iter()
        .zip(g.weights())
        .zip(u.values())
        .map(|((&x, &w), &v)| w * f(x, v))
        .sum()
}

pub fn mass(u: &Field) -> f64 {
    weighted_sum(u, |_, v| v.norm_sqr())
}

/// `∫ |x|^{-b} |u|^{2σ+2}`.
pub fn potential(u: &Field) -> f64 {
    let p = u.params().sigma + 1.0;
    let g = u.grid();
    g.weights()
        .iter()
        .zip(u.model().potential_weights())
        .zip(u.values())
        .map(|((&w, &wp), v)| w * wp * v.norm_sqr().powf(p))
        .sum()
}

/// `∫_{|x| ≥ radius} |x|^{-b} |u|^{2σ+2}`.
pub fn tail_potential(u: &Field, radius: f64) -> f64 {
    let p = u.params().sigma + 1.0;
    let g = u.grid();
    let h = g.spacing();
    g.nodes()
        .iter()
        .zip(g.weights())
        .zip(u.model().potential_weights())
        .zip(u.values())
        .map(|(((&x, &w), &wp), v)| w * wp * (1.0 - covered_fraction(x.abs(), h, radius)) * v.norm_sqr().powf(p))
        .sum()
}

/// `∫ |∇u|²`, taken as `-Re <u, Δu>` so it matches the discrete Laplacian.
pub fn grad_norm_sq(u: &Field) -> f64 {
    let g = u.grid();
    if let Some(s) = g.spectral() {
        let mut buf = u.values().to_vec();
        s.forward(&mut buf);
        let n = buf.len() as f64;
        let h = g.spacing();
        return buf.iter().zip(&s.k).map(|(v, &k)| k * k * v.norm_sqr()).sum::<f64>() * h / n;
    }
    let lap = g.apply_laplacian(u.values());
    -u.values()
        .iter()
        .zip(&lap)
        .zip(g.weights())
        .map(|((a, b), &w)| w * (a.conj() * b).re)
        .sum::<f64>()
}

pub fn energy(u: &Field) -> f64 {
    0.5 * grad_norm_sq(u) - potential(u) / (2.0 * u.params().sigma + 2.0)
}

pub fn conserved(u: &Field) -> ConservedPair {
    ConservedPair {
        mass: mass(u),
        energy: energy(u),
    }
}

/// `∫ |x|² |u|²`.
pub fn variance(u: &Field) -> f64 {
    weighted_sum(u, |x, v| x * x * v.norm_sqr())
}

/// `Im ∫ conj(u) x·∇u`.
pub fn radial_momentum(u: &Field) -> f64 {
    let du = gradient(u);
    let g = u.grid();
    g.nodes()
        .iter()
        .zip(g.weights())
        .zip(u.values().iter().zip(du.values()))
        .map(|((&x, &w), (a, d))| w * x * (a.conj() * d).im)
        .sum()
}

/// `∫ |∇u|²` restricted to `|x| ≥ radius`, from the pointwise gradient.
pub fn tail_grad_norm_sq(u: &Field, radius: f64) -> f64 {
    let du = gradient(u);
    let g = u.grid();
    let h = g.spacing();
    g.nodes()
        .iter()
        .zip(g.weights())
        .zip(du.values())
        .map(|((&x, &w), d)| w * (1.0 - covered_fraction(x.abs(), h, radius)) * d.norm_sqr())
        .sum()
}

/// `∫ |u|²` restricted to `|x| ≥ radius`.
pub fn tail_mass(u: &Field, radius: f64) -> f64 {
    let h = u.grid().spacing();
    weighted_sum(u, |x, v| (1.0 - covered_fraction(x.abs(), h, radius)) * v.norm_sqr())
}

/// `∫_a^b` of the quadratic through `(-1, fm), (0, f0), (1, fp)`, in cell units.
fn quadratic_cell_integral(fm: f64, f0: f64, fp: f64, a: f64, b: f64) -> f64 {
    let c1 = 0.5 * (fp - fm);
    let c2 = 0.5 * (fp - 2.0 * f0 + fm);
    let prim = |t: f64| t * (f0 + t * (0.5 * c1 + t * c2 / 3.0));
    prim(b) - prim(a)
}

/// Cell masses `|u_j|²` on the line with periodic neighbours.
fn line_density(u: &Field) -> Vec<f64> {
    u.values().iter().map(|v| v.norm_sqr()).collect()
}

/// `h ∫` over the part `[a, b]` (local units, within `[-1/2, 1/2]`) of cell `j`.
fn line_cell_part(f: &[f64], h: f64, j: usize, a: f64, b: f64) -> f64 {
    let n = f.len();
    let fm = f[(j + n - 1) % n];
    let fp = f[(j + 1) % n];
    h * quadratic_cell_integral(fm, f[j], fp, a, b)
}

/// `∫_{|x - center| ≤ radius} |u|²`.
///
/// On the line each cell contributes the exact integral of the local
/// quadratic interpolant over its covered part, so windows keep third-order
/// accuracy at their edges. Radial cells count by covered fraction and only
/// `center = 0` is accepted.
pub fn concentrated_mass(u: &Field, center: f64, radius: f64) -> Result<Concentration> {
    if !(radius > 0.0) {
        return Err(InlsError::invalid("radius", format!("window radius {radius} must be positive")));
    }
    let g = u.grid();
    let h = g.spacing();
    let low_resolution = radius < h;
    if low_resolution {
        log::debug!("window radius {radius} is below the grid spacing {h}");
    }
    if g.is_radial() {
        if center != 0.0 {
            return Err(InlsError::invalid("center", "radial windows are centred at the origin"));
        }
        let value = weighted_sum(u, |r, v| covered_fraction(r, h, radius) * v.norm_sqr());
        return Ok(Concentration {
            value,
            center,
            low_resolution,
        });
    }
    let l = g.extent();
    if center - radius <= -l && center + radius >= l {
        return Ok(Concentration {
            value: mass(u),
            center,
            low_resolution,
        });
    }
    let f = line_density(u);
    let value = g
        .nodes()
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let a = ((center - radius - x) / h).max(-0.5);
            let b = ((center + radius - x) / h).min(0.5);
            if b > a {
                line_cell_part(&f, h, j, a, b)
            } else {
                0.0
            }
        })
        .sum();
    Ok(Concentration {
        value,
        center,
        low_resolution,
    })
}

/// Largest window mass over grid-centred windows of the given radius.
///
/// On the line the scan covers every node in O(n) via prefix sums; radial
/// fields are evaluated at the origin.
pub fn sup_concentrated_mass(u: &Field, radius: f64) -> Result<Concentration> {
    if !(radius > 0.0) {
        return Err(InlsError::invalid("radius", format!("window radius {radius} must be positive")));
    }
    let g = u.grid();
    if g.is_radial() {
        return concentrated_mass(u, 0.0, radius);
    }
    let h = g.spacing();
    let n = g.len();
    let f = line_density(u);
    let q = radius / h;
    let mut best = (f64::NEG_INFINITY, 0usize);
    if q < 0.5 {
        for j in 0..n {
            let v = line_cell_part(&f, h, j, -q, q);
            if v > best.0 {
                best = (v, j);
            }
        }
    } else {
        let m = (q - 0.5).floor() as isize;
        let frac = (q - 0.5 - m as f64).clamp(0.0, 1.0);
        let full: Vec<f64> = (0..n).map(|j| line_cell_part(&f, h, j, -0.5, 0.5)).collect();
        let mut prefix = vec![0.0; n + 1];
        for j in 0..n {
            prefix[j + 1] = prefix[j] + full[j];
        }
        let range = |lo: isize, hi: isize| {
            let lo = lo.clamp(0, n as isize) as usize;
            let hi = hi.clamp(0, n as isize) as usize;
            if hi > lo {
                prefix[hi] - prefix[lo]
            } else {
                0.0
            }
        };
        let inside = |j: isize| j >= 0 && (j as usize) < n;
        for c in 0..n as isize {
            let mut v = range(c - m, c + m + 1);
            if frac > 0.0 {
                if inside(c - m - 1) {
                    v += line_cell_part(&f, h, (c - m - 1) as usize, 0.5 - frac, 0.5);
                }
                if inside(c + m + 1) {
                    v += line_cell_part(&f, h, (c + m + 1) as usize, -0.5, -0.5 + frac);
                }
            }
            if v > best.0 {
                best = (v, c as usize);
            }
        }
    }
    Ok(Concentration {
        value: best.0.max(0.0),
        center: g.nodes()[best.1],
        low_resolution: radius < h,
    })
}

/// `(∫_region |u|^p)^{1/p}`; `radius = None` means the whole grid, otherwise
/// the ball of that radius about the origin.
pub fn lp_norm(u: &Field, p: f64, radius: Option<f64>) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(InlsError::invalid("p", format!("exponent {p} must be at least 1")));
    }
    Ok(lp_integral(u, p, radius).powf(1.0 / p))
}

/// `∫_region |u|^p`.
pub fn lp_integral(u: &Field, p: f64, radius: Option<f64>) -> f64 {
    let h = u.grid().spacing();
    weighted_sum(u, |x, v| {
        let a = v.norm();
        if a == 0.0 {
            return 0.0;
        }
        let frac = radius.map_or(1.0, |r| covered_fraction(x.abs(), h, r));
        frac * (p * a.ln()).exp()
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::model::{Grid, Model, ProblemParams};

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    fn line(sigma: f64, b: f64) -> Arc<Model> {
        let p = if b == 0.0 {
            ProblemParams::validation_only(1, sigma).unwrap()
        } else {
            ProblemParams::new(1, sigma, b).unwrap()
        };
        Model::new(p, Grid::line(12.0, 512).unwrap()).unwrap()
    }

    fn gauss(m: &Arc<Model>) -> Field {
        m.sample_real(|x| (-x * x / 2.0).exp())
    }

    #[test]
    fn zero_field() {
        let m = line(1.5, 0.5);
        let z = m.zeros();
        assert_eq!(mass(&z), 0.0);
        assert_eq!(potential(&z), 0.0);
        assert_eq!(energy(&z), 0.0);
        assert_eq!(grad_norm_sq(&z), 0.0);
        assert_eq!(variance(&z), 0.0);
        let s = sup_concentrated_mass(&z, 1.0).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn gaussian_moments() {
        let u = gauss(&line(1.5, 0.5));
        assert!((mass(&u) - SQRT_PI).abs() < 1e-8);
        assert!((grad_norm_sq(&u) - SQRT_PI / 2.0).abs() < 1e-8);
        assert!((variance(&u) - SQRT_PI / 2.0).abs() < 1e-8);
        let x0 = 1.3;
        let t = u.model().sample_real(|x| (-(x - x0) * (x - x0) / 2.0).exp());
        assert!((variance(&t) - (SQRT_PI / 2.0 + x0 * x0 * SQRT_PI)).abs() < 1e-6);
    }

    #[test]
    fn potential_matches_quadrature_oracle() {
        // ∫ |x|^{-1/2} e^{-2x²} dx, 30-digit adaptive quadrature
        let oracle = 3.048_762_374_932_151_5;
        for n in [4096usize, 16384] {
            let m = Model::new(ProblemParams::new(1, 1.0, 0.5).unwrap(), Grid::line(12.0, n).unwrap()).unwrap();
            let u = gauss(&m);
            let rel = (potential(&u) - oracle).abs() / oracle;
            assert!(rel < 1e-6, "n={n}: {rel}");
        }
    }

    #[test]
    fn momentum_of_chirped_gaussian() {
        let m = line(1.5, 0.5);
        let u = m.sample(|x| Complex64::from_polar((-x * x / 2.0).exp(), -x * x / 4.0));
        assert!((radial_momentum(&u) + SQRT_PI / 4.0).abs() < 1e-6);
        assert!(radial_momentum(&gauss(&m)).abs() < 1e-14);
    }

    #[test]
    fn window_integrals() {
        let u = gauss(&line(1.5, 0.5));
        let c = concentrated_mass(&u, 0.0, 1.0).unwrap();
        assert!((c.value - 1.493_648_265_624_854).abs() < 1e-6);
        let full = concentrated_mass(&u, 0.0, 100.0).unwrap();
        assert_eq!(full.value, mass(&u));
        assert!(concentrated_mass(&u, 0.0, 0.0).is_err());
        assert!(concentrated_mass(&u, 0.0, 1e-3).unwrap().low_resolution);
    }

    #[test]
    fn sup_window_finds_the_bump() {
        let m = line(1.5, 0.5);
        let x0 = -2.7;
        let u = m.sample_real(|x| (-(x - x0) * (x - x0) / 2.0).exp());
        let s = sup_concentrated_mass(&u, 0.8).unwrap();
        assert!((s.center - x0).abs() <= m.grid().spacing());
        let two = m.sample_real(|x| (-(x + 4.0) * (x + 4.0)).exp() + 2.0 * (-(x - 3.0) * (x - 3.0)).exp());
        let s = sup_concentrated_mass(&two, 1.0).unwrap();
        assert!((s.center - 3.0).abs() <= m.grid().spacing());
    }

    #[test]
    fn sup_agrees_with_direct_windows() {
        let m = line(1.5, 0.5);
        let u = m.sample_real(|x| (-(x - 0.3) * (x - 0.3)).exp() * (1.0 + 0.3 * (3.0 * x).sin()));
        for r in [0.01, 0.2, 0.77, 3.0] {
            let s = sup_concentrated_mass(&u, r).unwrap();
            let direct = m
                .grid()
                .nodes()
                .iter()
                .map(|&c| concentrated_mass(&u, c, r).unwrap().value)
                .fold(0.0, f64::max);
            assert!((s.value - direct).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn lp_norms() {
        let u = gauss(&line(1.5, 0.5));
        assert!((lp_norm(&u, 2.0, None).unwrap() - mass(&u).sqrt()).abs() < 1e-14);
        assert!((lp_norm(&u, 4.0, None).unwrap() - 1.058_071_422_409_776_5).abs() < 1e-6);
        assert!(lp_norm(&u, 0.5, None).is_err());
        let m = Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), Grid::line(16.0, 512).unwrap()).unwrap();
        let plateau = m.sample_real(|x| if x.abs() < 2.0 { 0.7 } else { 0.0 });
        let v = lp_norm(&plateau, 3.0, None).unwrap();
        assert!((v - 0.7 * 4.0f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn radial_gaussian_mass() {
        let m = Model::new(ProblemParams::new(3, 1.0, 0.5).unwrap(), Grid::radial(3, 10.0, 2000).unwrap()).unwrap();
        let u = m.sample_real(|r| (-r * r / 2.0).exp());
        // ∫_{R^3} e^{-r²} = π^{3/2}
        assert!((mass(&u) - PI.powf(1.5)).abs() / PI.powf(1.5) < 1e-5);
        // ∫ |∇u|² = (3/2) π^{3/2}
        let g = grad_norm_sq(&u);
        assert!((g - 1.5 * PI.powf(1.5)).abs() / g < 1e-5);
        assert!(concentrated_mass(&u, 1.0, 1.0).is_err());
    }
}
