//! Closed-form reference solutions: the standing wave, the pseudoconformal
//! transformation and the minimal-mass blow-up family `S_{T,λ,γ}`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{InlsError, Result};
use crate::ground_state::GroundState;
use crate::model::ops::interpolate;
use crate::model::{Field, Model};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SFamilyParams {
    #[serde(rename = "T")]
    pub t_blowup: f64,
    pub lambda: f64,
    pub gamma: f64,
}

impl SFamilyParams {
    pub fn new(t_blowup: f64, lambda: f64, gamma: f64) -> Result<Self> {
        if !(t_blowup > 0.0 && t_blowup.is_finite()) {
            return Err(InlsError::invalid("T", "blow-up time must be positive"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(InlsError::invalid("lambda", "must be positive"));
        }
        if !gamma.is_finite() {
            return Err(InlsError::invalid("gamma", "must be finite"));
        }
        Ok(SFamilyParams {
            t_blowup,
            lambda,
            gamma,
        })
    }
}

/// `e^{it} Q`.
pub fn standing_wave(q: &GroundState, t: f64) -> Field {
    q.profile.rotate(t)
}

/// Maps the slice `u(·, 1/t)` to `v(·, t) = |t|^{-N/2} conj(u(x/t, 1/t)) e^{i|x|²/(4t)}`.
///
/// With this sign of the quadratic phase the map sends solutions to
/// solutions and is an involution (apply with `t`, then with `1/t`).
pub fn pseudoconformal(u: &Field, t: f64) -> Result<Field> {
    if t == 0.0 || !t.is_finite() {
        return Err(InlsError::invalid("t", "pseudoconformal time must be nonzero and finite"));
    }
    u.params().require_mass_critical()?;
    let n = u.params().dim as f64;
    let amp = t.abs().powf(-n / 2.0);
    Ok(Field::from_parts(
        u.model(),
        u.grid()
            .nodes()
            .iter()
            .map(|&x| interpolate(u, x / t).conj() * Complex64::from_polar(amp, x * x / (4.0 * t)))
            .collect(),
    ))
}

/// `S_{T,λ,γ}(t)` on the ground state's own grid.
pub fn s_profile(p: &SFamilyParams, q: &GroundState, t: f64) -> Result<Field> {
    s_profile_on(q.model(), p, q, t)
}

/// `e^{iγ} e^{iλ²/(T-t)} e^{-i|x|²/(4(T-t))} (λ/(T-t))^{N/2} Q(λx/(T-t))`
/// sampled on `model`, with one scale `λ` in amplitude and argument.
pub fn s_profile_on(model: &Arc<Model>, p: &SFamilyParams, q: &GroundState, t: f64) -> Result<Field> {
    model.params().require_mass_critical()?;
    if model.params().dim != q.params().dim {
        return Err(InlsError::invalid("dim", "ground state and target grid differ in dimension"));
    }
    if !(t < p.t_blowup) {
        return Err(InlsError::invalid("t", format!("t = {t} must precede the blow-up time {}", p.t_blowup)));
    }
    let s = p.t_blowup - t;
    let n = model.params().dim as f64;
    let scale = p.lambda / s;
    let amp = scale.powf(n / 2.0);
    let base = p.gamma + p.lambda * p.lambda / s;
    Ok(Field::from_parts(
        model,
        model
            .grid()
            .nodes()
            .iter()
            .map(|&x| {
                let phase = base - x * x / (4.0 * s);
                interpolate(&q.profile, scale * x) * Complex64::from_polar(amp, phase)
            })
            .collect(),
    ))
}

/// `E[e^{i|x|²/(4t)} u]`.
pub fn chirped_energy(u: &Field, t: f64) -> f64 {
    let c = u.map_with_node(|x, v| v * Complex64::from_polar(1.0, x * x / (4.0 * t)));
    crate::functionals::energy(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{energy, grad_norm_sq, mass, variance};
    use crate::ground_state::{solve_ground_state, GroundStateOptions};
    use crate::model::{Grid, ProblemParams};

    fn ground_state() -> GroundState {
        let m = Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), Grid::line(20.0, 16384).unwrap()).unwrap();
        solve_ground_state(&m, &GroundStateOptions::default()).unwrap()
    }

    #[test]
    fn standing_wave_phase() {
        let q = ground_state();
        let s = standing_wave(&q, 0.0);
        assert_eq!(s.values(), q.profile.values());
        let s = standing_wave(&q, 2.7);
        assert!((mass(&s) - q.q_mass).abs() < 1e-12);
        assert!((energy(&s) - energy(&q.profile)).abs() < 1e-12);
    }

    #[test]
    fn s_family_at_unit_parameters() {
        let q = ground_state();
        let p = SFamilyParams::new(1.0, 1.0, 0.0).unwrap();
        let s = s_profile(&p, &q, 0.0).unwrap();
        for ((v, &x), qv) in s.values().iter().zip(q.model().grid().nodes()).zip(q.profile.values()) {
            let expected = Complex64::from_polar(qv.re, 1.0 - x * x / 4.0);
            assert!((v - expected).norm() < 1e-14);
        }
        assert!(s_profile(&p, &q, 1.0).is_err());
    }

    #[test]
    fn s_family_mass_and_energy_invariant() {
        let q = ground_state();
        let p = SFamilyParams::new(1.0, 1.0, 0.3).unwrap();
        let s0 = s_profile(&p, &q, 0.0).unwrap();
        let (e0, g0) = (energy(&s0), grad_norm_sq(&s0));
        for t in [0.0, 0.3, 0.5, 0.6] {
            let s = s_profile(&p, &q, t).unwrap();
            assert!((mass(&s) - q.q_mass).abs() / q.q_mass < 1e-6, "t={t}");
            assert!((energy(&s) - e0).abs() / g0 < 1e-4, "t={t}");
        }
    }

    #[test]
    fn s_family_gradient_rate() {
        let q = ground_state();
        let p = SFamilyParams::new(1.0, 1.0, 0.0).unwrap();
        let pts: Vec<(f64, f64)> = [0.5, 0.6, 0.7, 0.8, 0.85, 0.9]
            .iter()
            .map(|&t| {
                let g = grad_norm_sq(&s_profile(&p, &q, t).unwrap()).sqrt();
                ((1.0 - t).ln(), g.ln())
            })
            .collect();
        let slope = crate::analysis::linear_fit(&pts).slope;
        assert!((slope + 1.0).abs() < 0.02, "{slope}");
    }

    #[test]
    fn pseudoconformal_involution_and_family() {
        let q = ground_state();
        let t = -1.6;
        let slice = standing_wave(&q, 1.0 / t);
        let v = pseudoconformal(&slice, t).unwrap();
        assert!((mass(&v) - q.q_mass).abs() / q.q_mass < 1e-6);
        let back = pseudoconformal(&v, 1.0 / t).unwrap();
        let err = back.sub(&slice).l2_norm() / slice.l2_norm();
        assert!(err < 1e-5, "{err}");
        // v(·, t) is S_{1,1,0} at time 1 + t
        let s = s_profile(&SFamilyParams::new(1.0, 1.0, 0.0).unwrap(), &q, 1.0 + t).unwrap();
        let err = v.sub(&s).l2_norm() / s.l2_norm();
        assert!(err < 1e-5, "{err}");
        assert!(pseudoconformal(&slice, 0.0).is_err());
    }

    #[test]
    fn chirped_energy_matches_variance() {
        let q = ground_state();
        let p = SFamilyParams::new(1.0, 1.0, 0.0).unwrap();
        let u0 = s_profile(&p, &q, 0.0).unwrap();
        for t in [0.2, 0.5, 0.7] {
            let ut = s_profile(&p, &q, t).unwrap();
            let lhs = chirped_energy(&u0, t);
            let rhs = variance(&ut) / (8.0 * t * t);
            assert!((lhs - rhs).abs() / rhs < 1e-3, "t={t}: {lhs} vs {rhs}");
        }
    }
}
