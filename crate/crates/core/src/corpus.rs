//! Seeded random test fields: sums of Gaussian bumps with random widths,
//! centers and phases.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Field, Model};

/// Default corpus seed.
pub const DEFAULT_SEED: u64 = 0x1415;

/// Generator for `label`, independent of every other label under the same seed.
pub fn labeled_rng(seed: u64, label: &str) -> ChaCha8Rng {
    // FNV-1a selects the ChaCha stream
    let stream = label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One random field of 1 to 4 bumps, kept inside the middle third of the domain.
pub fn random_field(model: &Arc<Model>, rng: &mut impl Rng) -> Field {
    let grid = model.grid();
    let extent = grid.extent();
    let h = grid.spacing();
    let radial = grid.is_radial();
    let count = rng.gen_range(1..=4);
    let bumps: Vec<(f64, f64, f64, f64, f64)> = (0..count)
        .map(|_| {
            let amp = rng.gen_range(0.2..2.0);
            let width = rng.gen_range((8.0 * h).max(0.2 * extent / 10.0)..extent / 8.0);
            let center = if radial {
                rng.gen_range(0.0..extent / 3.0)
            } else {
                rng.gen_range(-extent / 3.0..extent / 3.0)
            };
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let chirp = rng.gen_range(-1.0..1.0);
            (amp, width, center, phase, chirp)
        })
        .collect();
    model.sample(|x| {
        bumps
            .iter()
            .map(|&(a, w, c, phi, k)| {
                let g = |y: f64| (-((y - c) / w).powi(2)).exp();
                // even in r so the profile stays smooth through the origin
                let env = if radial { g(x) + g(-x) } else { g(x) };
                let theta = if radial { phi + k * x * x / extent } else { phi + k * x };
                Complex64::from_polar(a * env, theta)
            })
            .sum()
    })
}

/// `count` fields drawn from the `label` stream.
pub fn corpus(model: &Arc<Model>, seed: u64, label: &str, count: usize) -> Vec<Field> {
    let mut rng = labeled_rng(seed, label);
    (0..count).map(|_| random_field(model, &mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Grid, ProblemParams};

    #[test]
    fn deterministic_per_label() {
        let m = Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), Grid::line(10.0, 256).unwrap()).unwrap();
        let a = corpus(&m, 7, "x", 3);
        let b = corpus(&m, 7, "x", 3);
        let c = corpus(&m, 7, "y", 3);
        for (u, v) in a.iter().zip(&b) {
            assert_eq!(u.values(), v.values());
        }
        assert_ne!(a[0].values(), c[0].values());
        assert!(a.iter().all(|u| u.is_finite() && u.l2_norm() > 0.0));
    }

    #[test]
    fn fields_decay_at_the_boundary() {
        let m = Model::new(ProblemParams::new(2, 1.0, 0.5).unwrap(), Grid::radial(2, 20.0, 512).unwrap()).unwrap();
        for u in corpus(&m, DEFAULT_SEED, "edge", 50) {
            let edge = u.values().last().unwrap().norm();
            assert!(edge < 1e-6 * u.max_abs(), "{edge}");
        }
    }
}
