use serde::{Deserialize, Serialize};

use crate::error::{InlsError, Result};

const MASS_CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `s_c < 0`: every H¹ solution is global.
    Subcritical,
    /// `sigma = (2 - b)/N`, i.e. `s_c = 0`.
    MassCritical,
    /// `0 < s_c < 1`.
    Intercritical,
}

/// Exponents of `i u_t + Δu + |x|^{-b}|u|^{2σ}u = 0` and the indices derived
/// from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub dim: usize,
    pub sigma: f64,
    pub b: f64,
    pub s_c: f64,
    pub sigma_c: f64,
    pub regime: Regime,
    /// Set for `b = 0` runs, which sit outside the `0 < b` hypothesis and
    /// exist only to compare against closed-form NLS solitons.
    #[serde(default)]
    pub validation_only: bool,
}

impl ProblemParams {
    /// Validated constructor: requires `0 < b < min(2, dim)` and
    /// `sigma < sigma*_b`.
    pub fn new(dim: usize, sigma: f64, b: f64) -> Result<Self> {
        if dim == 0 {
            return Err(InlsError::invalid("dim", "must be at least 1"));
        }
        if !(b > 0.0 && b < 2.0_f64.min(dim as f64)) {
            return Err(InlsError::invalid(
                "b",
                format!("b = {b} must lie in (0, min(2, dim)) = (0, {})", 2.0_f64.min(dim as f64)),
            ));
        }
        Self::build(dim, sigma, b, false)
    }

    /// `b = 0` (classical NLS) for solver validation against exact solitons.
    pub fn validation_only(dim: usize, sigma: f64) -> Result<Self> {
        if dim == 0 {
            return Err(InlsError::invalid("dim", "must be at least 1"));
        }
        Self::build(dim, sigma, 0.0, true)
    }

    /// Mass-critical exponent `sigma = (2 - b)/dim`.
    pub fn mass_critical(dim: usize, b: f64) -> Result<Self> {
        Self::new(dim, (2.0 - b) / dim as f64, b)
    }

    fn build(dim: usize, sigma: f64, b: f64, validation_only: bool) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(InlsError::invalid("sigma", format!("sigma = {sigma} must be positive")));
        }
        let star = sigma_star(dim, b);
        if sigma >= star {
            return Err(InlsError::invalid(
                "sigma",
                format!("sigma = {sigma} must be below the energy-critical power {star}"),
            ));
        }
        let n = dim as f64;
        let s_c = n / 2.0 - (2.0 - b) / (2.0 * sigma);
        let sigma_c = 2.0 * n * sigma / (2.0 - b);
        let regime = if (sigma - (2.0 - b) / n).abs() < MASS_CRITICAL_TOL {
            Regime::MassCritical
        } else if s_c < 0.0 {
            Regime::Subcritical
        } else {
            Regime::Intercritical
        };
        Ok(ProblemParams {
            dim,
            sigma,
            b,
            s_c: if regime == Regime::MassCritical { 0.0 } else { s_c },
            sigma_c,
            regime,
            validation_only,
        })
    }

    pub fn is_mass_critical(&self) -> bool {
        self.regime == Regime::MassCritical
    }

    pub fn is_intercritical(&self) -> bool {
        self.regime == Regime::Intercritical
    }

    /// `N σ + b`, the homogeneity that appears in every identity.
    pub fn nsb(&self) -> f64 {
        self.dim as f64 * self.sigma + self.b
    }

    /// Exponent of the scaling symmetry `u_ρ = ρ^{(2-b)/(2σ)} u(ρx, ρ²t)`.
    pub fn scaling_exponent(&self) -> f64 {
        (2.0 - self.b) / (2.0 * self.sigma)
    }

    pub fn sigma_star(&self) -> f64 {
        sigma_star(self.dim, self.b)
    }

    /// Existence/uniqueness of Q is established for `b < 2~` with
    /// `2~ = N/3` when `N <= 3` and `2` otherwise.
    pub fn in_proven_regime(&self) -> bool {
        let tilde_two = if self.dim <= 3 { self.dim as f64 / 3.0 } else { 2.0 };
        self.b > 0.0 && self.b < tilde_two
    }

    pub(crate) fn require_mass_critical(&self) -> Result<()> {
        if self.is_mass_critical() {
            Ok(())
        } else {
            Err(InlsError::Regime {
                required: "mass-critical",
                actual: format!("{:?} (sigma = {}, b = {}, dim = {})", self.regime, self.sigma, self.b, self.dim),
            })
        }
    }

    pub(crate) fn require_intercritical(&self) -> Result<()> {
        if self.is_intercritical() {
            Ok(())
        } else {
            Err(InlsError::Regime {
                required: "intercritical",
                actual: format!("{:?} (sigma = {}, b = {}, dim = {})", self.regime, self.sigma, self.b, self.dim),
            })
        }
    }
}

pub fn sigma_star(dim: usize, b: f64) -> f64 {
    if dim <= 2 {
        f64::INFINITY
    } else {
        (2.0 - b) / (dim as f64 - 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_indices() {
        let p = ProblemParams::new(3, 1.0, 0.5).unwrap();
        assert!((p.s_c - 0.75).abs() < 1e-15);
        assert!((p.sigma_c - 4.0).abs() < 1e-15);
        assert_eq!(p.regime, Regime::Intercritical);
    }

    #[test]
    fn mass_critical_line() {
        let p = ProblemParams::new(1, 1.5, 0.5).unwrap();
        assert_eq!(p.regime, Regime::MassCritical);
        assert_eq!(p.s_c, 0.0);
        assert!((p.sigma_c - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_energy_supercritical() {
        let err = ProblemParams::new(3, 2.0, 0.5).unwrap_err();
        assert!(matches!(err, InlsError::Invalid { ref field, .. } if field == "sigma"));
        assert!((sigma_star(3, 0.5) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_b_out_of_range() {
        for b in [0.0, -0.1, 2.0, 2.5] {
            let err = ProblemParams::new(3, 1.0, b).unwrap_err();
            assert!(matches!(err, InlsError::Invalid { ref field, .. } if field == "b"));
        }
        // b must also stay below the dimension
        assert!(ProblemParams::new(1, 1.0, 1.2).is_err());
        assert!(ProblemParams::new(1, 1.0, 0.9).is_ok());
    }

    #[test]
    fn validation_mode_allows_b_zero() {
        let p = ProblemParams::validation_only(1, 2.0).unwrap();
        assert!(p.validation_only);
        assert_eq!(p.regime, Regime::MassCritical);
        let p = ProblemParams::validation_only(1, 1.0).unwrap();
        assert_eq!(p.regime, Regime::Subcritical);
    }

    #[test]
    fn proven_regime_flag() {
        assert!(!ProblemParams::new(1, 1.5, 0.5).unwrap().in_proven_regime());
        assert!(ProblemParams::new(3, 1.0, 0.5).unwrap().in_proven_regime());
    }
}
