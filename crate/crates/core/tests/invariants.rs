use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;

use inls::analysis::decompose;
use inls::corpus::{corpus, labeled_rng, random_field};
use inls::evolution::{evolve, StepPolicy};
use inls::functionals::{grad_norm_sq, mass, potential};
use inls::ground_state::{c_of_mm, gn_ratio, solve_ground_state, GroundStateOptions};
use inls::model::io::{read_field, write_field};
use inls::model::ops::rescale;
use inls::{Grid, Model, ProblemParams};

fn radial(sigma: f64) -> Arc<Model> {
    Model::new(ProblemParams::new(2, sigma, 0.5).unwrap(), Grid::radial(2, 20.0, 512).unwrap()).unwrap()
}

fn line() -> Arc<Model> {
    Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), Grid::line(20.0, 512).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mass_is_phase_invariant(seed in any::<u64>(), theta in -10.0..10.0f64) {
        let m = radial(1.0);
        let u = random_field(&m, &mut labeled_rng(seed, "phase"));
        assert_relative_eq!(mass(&u.rotate(theta)), mass(&u), max_relative = 1e-13);
        assert_relative_eq!(potential(&u.rotate(theta)), potential(&u), max_relative = 1e-13);
    }

    #[test]
    fn critical_rescaling_keeps_mass(seed in any::<u64>(), rho in 0.7..1.4f64) {
        let m = radial(0.75);
        let u = random_field(&m, &mut labeled_rng(seed, "rescale"));
        let v = rescale(&u, rho).unwrap();
        prop_assert!((mass(&v) / mass(&u) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn radial_strang_steps_conserve_mass(seed in any::<u64>()) {
        let m = radial(1.0);
        let u = random_field(&m, &mut labeled_rng(seed, "strang"));
        let policy = StepPolicy { dt0: 1e-3, sample_every: 10, theta: 10.0, ..StepPolicy::default() };
        let traj = evolve(&u, 0.02, &policy).unwrap();
        prop_assert!(traj.max_mass_drift < 1e-12);
    }

    #[test]
    fn decomposition_reconstructs(seed in any::<u64>(), r in 1.0..8.0f64, rho in 0.5..20.0f64) {
        for m in [line(), radial(1.0)] {
            let u = random_field(&m, &mut labeled_rng(seed, "split"));
            let d = decompose(&u, r, rho).unwrap();
            prop_assert!(d.reconstruct().sub(&u).l2_norm() <= 1e-12 * u.l2_norm());
        }
    }

    #[test]
    fn c_of_mm_scales_with_m(big_m in 0.1..10.0f64, m in 0.1..10.0f64, k in 0.5..2.0f64) {
        let p = ProblemParams::mass_critical(2, 0.5).unwrap();
        let e = (4.0 - 2.0 * p.b) / 2.0 + 2.0;
        let ratio = c_of_mm(big_m, k * m, &p).unwrap() / c_of_mm(big_m, m, &p).unwrap();
        assert_relative_eq!(ratio, k.powf(e * 2.0 / (2.0 * (2.0 - p.b))), max_relative = 1e-10);
    }
}

#[test]
fn field_files_round_trip() {
    let m = line();
    let dir = tempfile::tempdir().unwrap();
    for (i, u) in corpus(&m, 3, "io", 4).into_iter().enumerate() {
        let path = dir.path().join(format!("u{i}.bin"));
        write_field(&path, &u).unwrap();
        assert_eq!(read_field(&path, &m).unwrap().values(), u.values());
    }
}

#[test]
fn ground_state_maximizes_the_quotient() {
    let m = radial(1.0);
    let q = solve_ground_state(&m, &GroundStateOptions::default()).unwrap();
    let at_q = gn_ratio(&q.profile).unwrap();
    assert_relative_eq!(at_q, q.k_opt, max_relative = 5e-3);
    for u in corpus(&m, 11, "weinstein", 50) {
        assert!(gn_ratio(&u).unwrap() < at_q);
    }
    assert!(grad_norm_sq(&q.profile) > 0.0);
}
