//! Functional inequalities as executable predicates, plus a seeded suite
//! that runs each one over a random corpus.
//!
//! Every `check_*` returns `lhs - rhs` (or a ratio for the critical
//! Gagliardo-Nirenberg bound), so a satisfied inequality gives a value `<= 0`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::decompose;
use crate::corpus::{labeled_rng, random_field};
use crate::error::{InlsError, Result};
use crate::functionals::{energy, grad_norm_sq, lp_norm, mass, potential, tail_grad_norm_sq, tail_mass, tail_potential};
use crate::ground_state::{k_opt, solve_ground_state, GroundStateOptions};
use crate::model::ops::gradient;
use crate::model::{Field, Grid, Model, ProblemParams};

/// Slack below which a value counts as attaining the bound.
pub const WITNESS_THRESHOLD: f64 = -1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub trials: usize,
    /// Largest relative slack; negative when every trial satisfied the bound.
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Reference value where one applies (the ratio at `Q` for the critical bound).
    pub reference: Option<f64>,
    /// File name of the stored witness, filled in by whoever writes it.
    pub witness: Option<String>,
    #[serde(skip)]
    pub witness_field: Option<Field>,
}

/// `P(u) - K_opt ‖∇u‖^{Nσ+b} ‖u‖^{2σ+2-(Nσ+b)}`.
pub fn check_gagliardo(u: &Field, k_opt: f64) -> f64 {
    let p = u.params();
    let a = p.nsb();
    let rhs = k_opt * grad_norm_sq(u).powf(a / 2.0) * mass(u).powf((2.0 * p.sigma + 2.0 - a) / 2.0);
    potential(u) - rhs
}

/// Gradient of a real profile by central differences (one-sided at the line
/// ends), or by the radial stencil.
fn real_gradient(theta: &Field) -> Vec<f64> {
    let grid = theta.grid();
    if grid.is_radial() {
        return gradient(theta).values().iter().map(|v| v.re).collect();
    }
    let t = theta.real_parts();
    let h = grid.spacing();
    let n = t.len();
    (0..n)
        .map(|j| match j {
            0 => (t[1] - t[0]) / h,
            j if j == n - 1 => (t[n - 1] - t[n - 2]) / h,
            j => (t[j + 1] - t[j - 1]) / (2.0 * h),
        })
        .collect()
}

/// Parts of the phase-modulation bound: `(∫ Im(v ∇v̄)·∇θ, ∫|v|²|∇θ|²)`.
fn banica_terms(v: &Field, theta: &Field) -> (f64, f64) {
    let dtheta = real_gradient(theta);
    let dv = gradient(v);
    let w = v.grid().weights();
    let mut lhs = 0.0;
    let mut weight = 0.0;
    for j in 0..v.len() {
        let a = v.values()[j];
        lhs += w[j] * (a * dv.values()[j].conj()).im * dtheta[j];
        weight += w[j] * a.norm_sqr() * dtheta[j] * dtheta[j];
    }
    (lhs, weight)
}

/// `(∫ Im(v ∇v̄)·∇θ)² - 2 E(v) ∫|v|²|∇θ|²` for `‖v‖² ≤ ‖Q‖²`.
pub fn check_banica(v: &Field, theta: &Field, q_mass: f64) -> Result<f64> {
    v.params().require_mass_critical()?;
    if theta.len() != v.len() {
        return Err(InlsError::invalid("theta", "phase lives on a different grid"));
    }
    let m = mass(v);
    if m > q_mass {
        return Err(InlsError::Hypothesis(format!("mass {m} exceeds the ground-state mass {q_mass}")));
    }
    let (lhs, weight) = banica_terms(v, theta);
    Ok(lhs * lhs - 2.0 * energy(v) * weight)
}

fn require_radial(u: &Field) -> Result<()> {
    if !u.grid().is_radial() {
        return Err(InlsError::Hypothesis("the radial bounds need a radial grid with N >= 2".into()));
    }
    Ok(())
}

/// `sup_{|x|≥R}|u| - R^{-(N-1)/2} ‖u‖^{1/2}_{L²(|x|≥R)} ‖∇u‖^{1/2}_{L²(|x|≥R)}`.
pub fn check_strauss(u: &Field, radius: f64) -> Result<f64> {
    require_radial(u)?;
    let nodes = u.grid().nodes();
    if !(radius > nodes[0]) {
        return Err(InlsError::invalid("R", format!("radius {radius} must exceed the first node {}", nodes[0])));
    }
    let sup = nodes
        .iter()
        .zip(u.values())
        .filter(|(&r, _)| r >= radius)
        .fold(0.0f64, |m, (_, v)| m.max(v.norm()));
    let n = u.params().dim as f64;
    let rhs = radius.powf(-(n - 1.0) / 2.0) * (tail_mass(u, radius) * tail_grad_norm_sq(u, radius)).sqrt().sqrt();
    Ok(sup - rhs)
}

/// Young constant `C(η) = (2-σ)/2 (σ/(2η))^{σ/(2-σ)}`.
pub fn young_constant(sigma: f64, eta: f64) -> f64 {
    (2.0 - sigma) / 2.0 * (sigma / (2.0 * eta)).powf(sigma / (2.0 - sigma))
}

fn radial_gn_parts(u: &Field, radius: f64, eta: f64) -> (f64, f64) {
    let p = u.params();
    let n = p.dim as f64;
    let s = p.sigma;
    let lhs = tail_potential(u, radius);
    let rhs = eta * grad_norm_sq(u)
        + young_constant(s, eta)
            * radius.powf(-2.0 * (s * (n - 1.0) + p.b) / (2.0 - s))
            * mass(u).sqrt().powf(2.0 * (s + 2.0) / (2.0 - s));
    (lhs, rhs)
}

/// `∫_{|x|≥R}|x|^{-b}|u|^{2σ+2} - η‖∇u‖² - C(η) R^{-2(σ(N-1)+b)/(2-σ)} ‖u‖^{2(σ+2)/(2-σ)}`.
pub fn check_radial_gn(u: &Field, radius: f64, eta: f64) -> Result<f64> {
    require_radial(u)?;
    let s = u.params().sigma;
    if s >= 2.0 {
        return Err(InlsError::Hypothesis(format!("sigma = {s} must be below 2")));
    }
    if !(eta > 0.0) {
        return Err(InlsError::invalid("eta", "must be positive"));
    }
    if !(radius > 0.0) {
        return Err(InlsError::invalid("R", "must be positive"));
    }
    let (lhs, rhs) = radial_gn_parts(u, radius, eta);
    Ok(lhs - rhs)
}

/// `P(u) / (‖∇u‖² ‖u‖^{2σ}_{L^{σ_c}})`.
pub fn check_critical_gn(u: &Field) -> Result<f64> {
    let p = u.params();
    p.require_intercritical()?;
    if p.dim < 2 {
        return Err(InlsError::Hypothesis("the critical bound is checked for N >= 2".into()));
    }
    let g = grad_norm_sq(u);
    let l = lp_norm(u, p.sigma_c, None)?;
    if !(g > 0.0 && l > 0.0) {
        return Err(InlsError::invalid("u", "critical ratio of a zero field"));
    }
    Ok(potential(u) / (g * l.powf(2.0 * p.sigma)))
}

/// Running maximum of the relative slack together with its input.
struct Tracker {
    name: &'static str,
    tolerance: f64,
    trials: usize,
    worst: f64,
    witness: Option<Field>,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tracker {
            name,
            tolerance,
            trials: 0,
            worst: f64::NEG_INFINITY,
            witness: None,
        }
    }

    fn record(&mut self, slack: f64, u: &Field) {
        self.trials += 1;
        if slack > self.worst {
            self.worst = slack;
            self.witness = (slack > WITNESS_THRESHOLD).then(|| u.clone());
        }
    }

    fn finish(self, reference: Option<f64>) -> InequalityReport {
        InequalityReport {
            name: self.name.to_string(),
            trials: self.trials,
            max_violation: self.worst,
            tolerance: self.tolerance,
            passed: self.worst <= self.tolerance,
            reference,
            witness: None,
            witness_field: self.witness,
        }
    }
}

fn ratio(value: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        value / scale
    } else {
        value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub trials: usize,
    pub decomposition_trials: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: crate::corpus::DEFAULT_SEED,
            trials: 1000,
            decomposition_trials: 100,
        }
    }
}

const STRAUSS_RADII: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
const ETAS: [f64; 3] = [1e-2, 1e-1, 1.0];

fn model(params: ProblemParams, grid: Arc<Grid>) -> Result<Arc<Model>> {
    Model::new(params, grid)
}

/// Runs every check over its own labelled corpus stream.
pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<InequalityReport>> {
    let gs_opts = GroundStateOptions::default();
    let line = model(ProblemParams::new(1, 1.5, 0.5)?, Grid::line(20.0, 2048)?)?;
    let radial_mc = model(ProblemParams::new(2, 0.75, 0.5)?, Grid::radial(2, 20.0, 1024)?)?;
    let radial_ic = model(ProblemParams::new(2, 1.0, 0.5)?, Grid::radial(2, 20.0, 1024)?)?;
    let q_line = solve_ground_state(&line, &gs_opts)?;
    let q_mc = solve_ground_state(&radial_mc, &gs_opts)?;
    let q_ic = solve_ground_state(&radial_ic, &gs_opts)?;
    let mut reports = Vec::new();

    for (name, m, q) in [("gagliardo", &line, &q_line), ("gagliardo_radial", &radial_ic, &q_ic)] {
        let k = k_opt(m.params(), q.q_mass)?;
        let mut t = Tracker::new(name, 1e-6);
        let mut rng = labeled_rng(opts.seed, name);
        for _ in 0..opts.trials {
            let u = random_field(m, &mut rng);
            t.record(ratio(check_gagliardo(&u, k), potential(&u)), &u);
        }
        reports.push(t.finish(Some(k)));
    }

    for (name, m, q) in [("banica", &line, &q_line), ("banica_radial", &radial_mc, &q_mc)] {
        let mut t = Tracker::new(name, 1e-10);
        let mut quad = Tracker::new(if m.grid().is_radial() { "banica_quadratic_radial" } else { "banica_quadratic" }, 1e-10);
        let mut rng = labeled_rng(opts.seed, name);
        for _ in 0..opts.trials {
            let u = random_field(m, &mut rng);
            let target = rng.gen_range(0.05..0.99) * q.q_mass;
            let v = u.scale_real((target / mass(&u)).sqrt());
            let (a, c, s) = (rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0), rng.gen_range(1.0..4.0));
            let theta = m.sample_real(|x| a * x * x + c * (-(x / s).powi(2)).exp());
            let value = check_banica(&v, &theta, q.q_mass)?;
            let (lhs, weight) = banica_terms(&v, &theta);
            t.record(ratio(value, lhs * lhs + 2.0 * energy(&v).abs() * weight), &v);
            for alpha in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                let phased = v.values().iter().zip(theta.values()).map(|(z, t)| z * Complex64::from_polar(1.0, alpha * t.re));
                let w = Field::from_parts(m, phased.collect());
                quad.record(ratio(-energy(&w), 0.5 * grad_norm_sq(&w)), &w);
            }
        }
        reports.push(t.finish(Some(q.q_mass)));
        reports.push(quad.finish(None));
    }

    let mut strauss = Tracker::new("strauss", 1e-3);
    let mut rng = labeled_rng(opts.seed, "strauss");
    for _ in 0..opts.trials {
        let u = random_field(&radial_ic, &mut rng);
        for r in STRAUSS_RADII {
            let value = check_strauss(&u, r)?;
            let n = radial_ic.params().dim as f64;
            let scale = r.powf(-(n - 1.0) / 2.0) * (tail_mass(&u, r) * tail_grad_norm_sq(&u, r)).sqrt().sqrt();
            strauss.record(ratio(value, scale), &u);
        }
    }
    reports.push(strauss.finish(None));

    let mut rgn = Tracker::new("radial_gn", 1e-6);
    let mut rng = labeled_rng(opts.seed, "radial_gn");
    for _ in 0..opts.trials {
        let u = random_field(&radial_ic, &mut rng);
        let r = rng.gen_range(0.5..8.0);
        for eta in ETAS {
            let value = check_radial_gn(&u, r, eta)?;
            let (_, rhs) = radial_gn_parts(&u, r, eta);
            rgn.record(ratio(value, rhs), &u);
        }
    }
    reports.push(rgn.finish(None));

    // boundedness report: slack is sup / (10 × ratio at Q) - 1
    let reference = check_critical_gn(&q_ic.profile)?;
    let mut crit = Tracker::new("critical_gn", 0.0);
    let mut rng = labeled_rng(opts.seed, "critical_gn");
    for _ in 0..opts.trials {
        let u = random_field(&radial_ic, &mut rng);
        crit.record(check_critical_gn(&u)? / (10.0 * reference) - 1.0, &u);
    }
    reports.push(crit.finish(Some(reference)));

    let mut dec = Tracker::new("decomposition_reconstruction", 1e-10);
    let mut rng = labeled_rng(opts.seed, "decomposition");
    for i in 0..opts.decomposition_trials {
        let m = if i % 2 == 0 { &line } else { &radial_ic };
        let u = random_field(m, &mut rng);
        let r = rng.gen_range(1.0..8.0);
        let rho = rng.gen_range(0.5..20.0);
        let d = decompose(&u, r, rho)?;
        let err = d.reconstruct().sub(&u).l2_norm() / u.l2_norm();
        // reported as error minus tolerance so that the usual sign convention holds
        dec.record(err - 1e-10, &u);
    }
    let mut report = dec.finish(None);
    report.max_violation += 1e-10;
    report.passed = report.max_violation <= report.tolerance;
    reports.push(report);

    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ops::rescale;

    fn radial_ic() -> Arc<Model> {
        Model::new(ProblemParams::new(2, 1.0, 0.5).unwrap(), Grid::radial(2, 20.0, 2048).unwrap()).unwrap()
    }

    #[test]
    fn young_constant_is_optimal() {
        // min over x of η x^{2/σ} + C y^{2/(2-σ)} - x y touches zero at y = 1
        let (s, eta) = (1.0, 0.1);
        let c = young_constant(s, eta);
        let worst = (1..20000)
            .map(|i| {
                let x = i as f64 * 1e-3;
                eta * x.powf(2.0 / s) + c - x
            })
            .fold(f64::INFINITY, f64::min);
        assert!(worst.abs() < 1e-6, "{worst}");
    }

    #[test]
    fn strauss_gaussian_and_empty_tail() {
        let m = radial_ic();
        let u = m.sample_real(|r| (-r * r).exp());
        assert!(check_strauss(&u, 1.0).unwrap() <= 1e-3);
        let compact = m.sample_real(|r| if r < 0.5 { (1.0 - 4.0 * r * r).powi(3) } else { 0.0 });
        assert!(check_strauss(&compact, 1.0).unwrap() <= 0.0);
        let line = Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), Grid::line(10.0, 64).unwrap()).unwrap();
        assert!(check_strauss(&line.zeros(), 1.0).is_err());
    }

    #[test]
    fn radial_gn_gaussian() {
        let m = radial_ic();
        let u = m.sample_real(|r| (-r * r).exp());
        assert!(check_radial_gn(&u, 1.0, 0.1).unwrap() <= 0.0);
        let compact = m.sample_real(|r| if r < 0.5 { (1.0 - 4.0 * r * r).powi(3) } else { 0.0 });
        let (lhs, _) = radial_gn_parts(&compact, 1.0, 0.1);
        assert_eq!(lhs, 0.0);
        let m2 = Model::new(ProblemParams::new(2, 2.5, 0.5).unwrap(), Grid::radial(2, 5.0, 64).unwrap()).unwrap();
        assert!(check_radial_gn(&m2.zeros(), 1.0, 0.1).is_err());
    }

    #[test]
    fn banica_at_scaled_ground_state() {
        let m = Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), Grid::line(20.0, 2048).unwrap()).unwrap();
        let q = solve_ground_state(&m, &GroundStateOptions::default()).unwrap();
        let v = q.profile.scale_real(0.9);
        let theta = m.sample_real(|x| x * x);
        assert!(check_banica(&v, &theta, q.q_mass).unwrap() <= 1e-10);
        // a real v has no phase current
        let (lhs, _) = banica_terms(&v, &theta);
        assert!(lhs.abs() < 1e-14);
        assert!(check_banica(&q.profile.scale_real(1.1), &theta, q.q_mass).is_err());
    }

    #[test]
    fn gagliardo_sharp_at_q() {
        let m = Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), Grid::line(15.0, 16384).unwrap()).unwrap();
        let q = solve_ground_state(&m, &GroundStateOptions::default()).unwrap();
        let v = check_gagliardo(&q.profile, q.k_opt);
        assert!(v.abs() < 1e-5 * potential(&q.profile), "{v}");
        assert_eq!(check_gagliardo(&m.zeros(), q.k_opt), 0.0);
    }

    #[test]
    fn critical_ratio_is_scale_invariant() {
        let m = radial_ic();
        let u = m.sample(|r| Complex64::from_polar((-r * r / 4.0).exp(), 0.3 * r * r));
        let base = check_critical_gn(&u).unwrap();
        for rho in [0.5, 0.8, 1.25, 2.0] {
            let v = rescale(&u, rho).unwrap();
            let r = check_critical_gn(&v).unwrap();
            assert!((r / base - 1.0).abs() < 1e-4, "rho={rho}: {r} vs {base}");
        }
    }
}
