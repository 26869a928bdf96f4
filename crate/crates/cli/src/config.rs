use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use inls::evolution::{SnapshotPolicy, StepPolicy};
use inls::model::Manifest;
use inls::{InlsError, Model, RadialOrder};

/// Flat run configuration. Every key is optional; see `Default`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    pub sigma: f64,
    pub b: f64,
    /// `line` or `radial`.
    pub geometry: String,
    /// Half-width `L` on the line, `Rmax` for radial grids.
    pub extent: f64,
    pub n: usize,
    pub radial_order: RadialOrder,

    /// `ground_state_multiple`, `gaussian`, `s_family` or `file`.
    pub initial_data: String,
    pub multiple: f64,
    pub amplitude: f64,
    pub width: f64,
    pub family_t: f64,
    pub family_lambda: f64,
    pub family_gamma: f64,
    pub file: Option<PathBuf>,

    pub t_end: f64,
    pub dt0: f64,
    pub c_dt: f64,
    pub theta: f64,
    pub sample_every: usize,
    /// Keep a field snapshot every this many samples; 0 keeps none.
    pub snapshots: usize,
    pub max_steps: usize,

    /// Window exponent for the mass-concentration series.
    pub alpha: f64,
    pub c0: f64,
    pub c0_tilde: f64,
    /// Times at which `exact` samples the reference solution.
    pub exact_times: Vec<f64>,

    pub trials: usize,
    pub decomposition_trials: usize,

    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let policy = StepPolicy::default();
        RunConfig {
            dim: 2,
            sigma: 0.75,
            b: 0.5,
            geometry: "radial".into(),
            extent: 15.0,
            n: 8000,
            radial_order: RadialOrder::Second,
            initial_data: "ground_state_multiple".into(),
            multiple: 1.05,
            amplitude: 1.0,
            width: 1.0,
            family_t: 1.0,
            family_lambda: 1.0,
            family_gamma: 0.0,
            file: None,
            t_end: 20.0,
            dt0: 2e-3,
            c_dt: 1e-2,
            theta: 0.1,
            sample_every: 5,
            snapshots: 0,
            max_steps: policy.max_steps,
            alpha: 0.25,
            c0: 10.0,
            c0_tilde: 1.0,
            exact_times: vec![0.0, 0.5, 0.9],
            trials: 1000,
            decomposition_trials: 100,
            output_dir: PathBuf::from("out"),
            seed: inls::corpus::DEFAULT_SEED,
        }
    }
}

pub fn invalid(field: &str, reason: impl Into<String>) -> InlsError {
    InlsError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(toml::from_str(&text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn model(&self) -> Result<Arc<Model>, InlsError> {
        Manifest {
            dim: self.dim,
            sigma: self.sigma,
            b: self.b,
            geometry: self.geometry.clone(),
            l_or_rmax: self.extent,
            n: self.n,
            radial_order: Some(self.radial_order),
        }
        .to_model()
    }

    /// `snapshots` overrides `fallback` when nonzero.
    pub fn policy(&self, fallback: SnapshotPolicy) -> StepPolicy {
        StepPolicy {
            dt0: self.dt0,
            c_dt: self.c_dt,
            theta: self.theta,
            sample_every: self.sample_every,
            snapshots: if self.snapshots > 0 {
                SnapshotPolicy::EverySamples(self.snapshots)
            } else {
                fallback
            },
            max_steps: self.max_steps,
        }
    }

    /// Checks the keys that no library constructor sees.
    pub fn validate(&self) -> Result<(), InlsError> {
        self.model()?;
        match self.initial_data.as_str() {
            "ground_state_multiple" => {
                if !(self.multiple > 0.0 && self.multiple.is_finite()) {
                    return Err(invalid("multiple", "must be positive"));
                }
            }
            "gaussian" => {
                if !self.amplitude.is_finite() {
                    return Err(invalid("amplitude", "must be finite"));
                }
                if !(self.width > 0.0 && self.width.is_finite()) {
                    return Err(invalid("width", "must be positive"));
                }
            }
            "s_family" => {
                inls::exact::SFamilyParams::new(self.family_t, self.family_lambda, self.family_gamma)?;
            }
            "file" => {
                if self.file.is_none() {
                    return Err(invalid("file", "initial_data = \"file\" needs a path"));
                }
            }
            other => {
                return Err(invalid(
                    "initial_data",
                    format!("unknown kind `{other}`; expected ground_state_multiple, gaussian, s_family or file"),
                ))
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(invalid("alpha", "must lie in (0, 1/2)"));
        }
        if self.exact_times.iter().any(|t| !t.is_finite()) {
            return Err(invalid("exact_times", "times must be finite"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let back: RunConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        c.validate().unwrap();
    }

    #[test]
    fn bad_values_name_their_key() {
        let c: RunConfig = toml::from_str("b = 2.5").unwrap();
        assert!(matches!(c.validate(), Err(InlsError::Invalid { field, .. }) if field == "b"));
        let c: RunConfig = toml::from_str("initial_data = \"sech\"").unwrap();
        assert!(matches!(c.validate(), Err(InlsError::Invalid { field, .. }) if field == "initial_data"));
        let err = toml::from_str::<RunConfig>("sigmaa = 1.0").unwrap_err();
        assert!(err.to_string().contains("sigmaa"));
    }
}
