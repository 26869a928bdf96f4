use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use serde::Serialize;
use serde_json::json;

use inls::analysis::{
    estimate_blowup_time, mass_concentration_series, sigma_c_window_series, virial_pointwise, virial_quadratic,
    WindowMode,
};
use inls::evolution::{evolve, SnapshotPolicy, Trajectory};
use inls::exact::{s_profile, standing_wave, SFamilyParams};
use inls::experiments;
use inls::functionals::{energy, grad_norm_sq, mass};
use inls::ground_state::{solve_ground_state, GroundState, GroundStateOptions};
use inls::inequalities::{run_suite, SuiteOptions};
use inls::model::{read_field, write_field, Manifest};
use inls::{Complex64, Field, Model};

use crate::config::{invalid, RunConfig};

/// Whether the command's own checks passed.
pub type Outcome = anyhow::Result<bool>;

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> anyhow::Result<Output> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output { dir: dir.to_path_buf() })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn text(&self, name: &str, body: &str) -> anyhow::Result<()> {
        let p = self.path(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
    }

    fn json(&self, name: &str, value: &impl Serialize) -> anyhow::Result<()> {
        self.text(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }

    fn field(&self, name: &str, u: &Field) -> anyhow::Result<()> {
        let p = self.path(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        write_field(&p, u).with_context(|| format!("writing {}", p.display()))
    }

    /// `manifest.json` plus the resolved `config.toml`, enough to rerun.
    pub fn manifest(&self, command: &str, cfg: &RunConfig, model: Option<&Model>) -> anyhow::Result<()> {
        self.text("config.toml", &cfg.to_toml())?;
        self.json(
            "manifest.json",
            &json!({
                "command": command,
                "version": env!("CARGO_PKG_VERSION"),
                "git_hash": env!("INLS_GIT_HASH"),
                "config": cfg,
                "model": model.map(Manifest::from_model),
            }),
        )
    }
}

fn csv(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

fn trajectory_csv(traj: &Trajectory) -> String {
    csv(
        &["t", "dt", "mass", "energy", "grad_norm_sq", "variance", "momentum", "boundary_mass"],
        traj.samples
            .iter()
            .map(|s| vec![s.t, s.dt, s.mass, s.energy, s.grad_norm_sq, s.variance, s.momentum, s.boundary_mass]),
    )
}

fn ground(model: &Arc<Model>) -> anyhow::Result<GroundState> {
    Ok(solve_ground_state(model, &GroundStateOptions::default())?)
}

fn initial_data(cfg: &RunConfig, model: &Arc<Model>) -> anyhow::Result<Field> {
    Ok(match cfg.initial_data.as_str() {
        "ground_state_multiple" => ground(model)?.profile.scale_real(cfg.multiple),
        "gaussian" => {
            let (a, w) = (cfg.amplitude, cfg.width);
            model.sample(|x| Complex64::new(a * (-(x / w).powi(2)).exp(), 0.0))
        }
        "s_family" => {
            let p = SFamilyParams::new(cfg.family_t, cfg.family_lambda, cfg.family_gamma)?;
            s_profile(&p, &ground(model)?, 0.0)?
        }
        "file" => {
            let path = cfg.file.as_ref().ok_or_else(|| invalid("file", "missing path"))?;
            read_field(path, model)?
        }
        other => return Err(invalid("initial_data", format!("unknown kind `{other}`")).into()),
    })
}

pub fn ground_state(cfg: &RunConfig, out: &Output) -> Outcome {
    let model = cfg.model()?;
    out.manifest("ground-state", cfg, Some(&model))?;
    let q = ground(&model)?;
    out.field("Q.bin", &q.profile)?;
    let summary = q.summary();
    out.json("Q.json", &summary)?;
    out.json("summary.json", &summary)?;
    log::info!(
        "ground state: {} iterations, pohozaev residuals {:.2e} {:.2e}",
        q.iterations,
        q.pohozaev_r1,
        q.pohozaev_r2
    );
    Ok(true)
}

fn run_evolution(cfg: &RunConfig, out: &Output, command: &str, fallback: SnapshotPolicy) -> anyhow::Result<Trajectory> {
    let model = cfg.model()?;
    out.manifest(command, cfg, Some(&model))?;
    let u0 = initial_data(cfg, &model)?;
    let traj = evolve(&u0, cfg.t_end, &cfg.policy(fallback))?;
    out.text("trajectory.csv", &trajectory_csv(&traj))?;
    Ok(traj)
}

fn evolution_summary(traj: &Trajectory) -> serde_json::Value {
    let first = &traj.samples[0];
    let last = traj.last();
    let scale = first.energy.abs().max(0.5 * first.grad_norm_sq);
    json!({
        "termination": traj.termination,
        "steps": traj.steps,
        "samples": traj.samples.len(),
        "t_last": last.t,
        "max_mass_drift": traj.max_mass_drift,
        "mass_drift_flag": traj.mass_drift_flag,
        "energy_drift": (last.energy - first.energy).abs() / scale,
        "blowup_fit": estimate_blowup_time(traj).ok(),
    })
}

pub fn evolve_cmd(cfg: &RunConfig, out: &Output) -> Outcome {
    let traj = run_evolution(cfg, out, "evolve", SnapshotPolicy::None)?;
    let mut listing = String::from("index,t,file\n");
    for (i, (s, u)) in traj.snapshots().enumerate() {
        let name = format!("fields/snapshot_{i:05}.bin");
        out.field(&name, u)?;
        let _ = writeln!(listing, "{i},{:.12e},{name}", s.t);
    }
    if cfg.snapshots > 0 {
        out.text("snapshots.csv", &listing)?;
    }
    out.json("summary.json", &evolution_summary(&traj))?;
    Ok(true)
}

pub fn analyze(cfg: &RunConfig, out: &Output) -> Outcome {
    let traj = run_evolution(cfg, out, "analyze", SnapshotPolicy::GradientGrowth(1.05))?;
    let mut summary = evolution_summary(&traj);
    let fit = estimate_blowup_time(&traj)?;
    let p = traj.model.params().clone();
    let extra = if p.is_mass_critical() {
        let series = mass_concentration_series(&traj, &fit, cfg.alpha)?;
        out.text(
            "analysis.csv",
            &csv(
                &["t", "radius", "concentrated_mass", "center", "scaled_radius"],
                series.points.iter().map(|c| vec![c.t, c.radius, c.value, c.center, c.scaled_radius]),
            ),
        )?;
        json!({
            "virial": virial_quadratic(&traj)?,
            "window_hypothesis_holds": series.hypothesis_holds,
            "final_concentrated_mass": series.points.last().map(|c| c.value),
        })
    } else if p.is_intercritical() {
        let fint = sigma_c_window_series(&traj, &fit, WindowMode::Fint, cfg.c0, cfg.c0_tilde)?;
        let inft = sigma_c_window_series(&traj, &fit, WindowMode::Inft, cfg.c0, cfg.c0_tilde)?;
        out.text(
            "analysis.csv",
            &csv(
                &["t", "grad_norm", "fint_radius", "fint_value", "inft_radius", "inft_value"],
                fint.iter()
                    .zip(&inft)
                    .map(|(a, b)| vec![a.t, a.grad_norm, a.radius, a.value, b.radius, b.value]),
            ),
        )?;
        json!({ "virial_pointwise_defect": virial_pointwise(&traj) })
    } else {
        json!({})
    };
    summary["analysis"] = extra;
    out.json("summary.json", &summary)?;
    Ok(true)
}

pub fn verify(cfg: &RunConfig, out: &Output) -> Outcome {
    out.manifest("verify", cfg, None)?;
    let reports = run_suite(&SuiteOptions {
        seed: cfg.seed,
        trials: cfg.trials,
        decomposition_trials: cfg.decomposition_trials,
    })?;
    for r in &reports {
        if let Some(w) = &r.witness_field {
            out.field(&format!("witnesses/{}.bin", r.name), w)?;
        }
        log::info!("{}: max violation {:.3e}, passed {}", r.name, r.max_violation, r.passed);
    }
    let passed = reports.iter().all(|r| r.passed);
    out.json("verify.json", &reports)?;
    out.json("summary.json", &json!({ "passed": passed, "reports": reports.len() }))?;
    Ok(passed)
}

pub fn exact(cfg: &RunConfig, out: &Output) -> Outcome {
    let model = cfg.model()?;
    out.manifest("exact", cfg, Some(&model))?;
    let q = ground(&model)?;
    let family = match cfg.initial_data.as_str() {
        "s_family" => Some(SFamilyParams::new(cfg.family_t, cfg.family_lambda, cfg.family_gamma)?),
        "ground_state_multiple" => None,
        other => {
            return Err(invalid(
                "initial_data",
                format!("exact solutions exist for s_family or ground_state_multiple, not `{other}`"),
            )
            .into())
        }
    };
    let mut rows = Vec::new();
    for (i, &t) in cfg.exact_times.iter().enumerate() {
        let u = match &family {
            Some(p) => s_profile(p, &q, t)?,
            None => standing_wave(&q, t),
        };
        out.field(&format!("fields/exact_{i:03}.bin"), &u)?;
        rows.push(vec![t, mass(&u), energy(&u), grad_norm_sq(&u)]);
    }
    out.text("exact.csv", &csv(&["t", "mass", "energy", "grad_norm_sq"], rows.into_iter()))?;
    out.json("summary.json", &json!({ "family": family, "q_mass": q.q_mass, "times": cfg.exact_times }))?;
    Ok(true)
}

pub fn reproduce(name: &str, cfg: &RunConfig, out: &Output) -> Outcome {
    if !experiments::REGISTERED.contains(&name) {
        return Err(invalid(
            "name",
            format!("unknown experiment `{name}`; registered: {}", experiments::REGISTERED.join(", ")),
        )
        .into());
    }
    out.manifest(&format!("reproduce {name}"), cfg, None)?;
    let report = experiments::reproduce(name, cfg.seed)?;
    for c in &report.checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        println!("{mark} [{}] {} = {:.4e} ({})", c.criterion, c.description, c.value, c.threshold);
    }
    if let Some(t) = &report.table {
        out.text("analysis.csv", &t.to_csv())?;
    }
    out.json("summary.json", &report)?;
    Ok(report.passed())
}
