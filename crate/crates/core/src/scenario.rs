//! Canned, seeded experiments. Each scenario is a committed config
//! file plus a generic runner keyed on the config's `scenario.kind`;
//! verdicts come only from the thresholds declared in the file, and a
//! fixed seed reproduces metrics exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::json;

use crate::analysis::{
    classify, detect_limit_cycle, linearize_origin, non_increasing_trend, sweep_sigma,
    tikhonov_compare, xm_projection, Classification,
};
use crate::config::{ExperimentConfig, ScenarioSpec};
use crate::eig::complex_multiset_distance;
use crate::error::{Error, Result};
use crate::integrate::integrate;
use crate::models::{reduced_hopf_params, HopfParams};
use crate::network::{FullField, NetworkSystem, ReducedField};
use crate::report;
use crate::svg::LinePlot;

/// Verdict, metrics, and artifact paths of one scenario run.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub name: String,
    pub pass: bool,
    pub metrics: BTreeMap<String, f64>,
    pub artifacts: Vec<PathBuf>,
}

impl ScenarioResult {
    pub fn to_json(&self, seed: u64) -> serde_json::Value {
        json!({
            "name": self.name,
            "verdict": if self.pass { "pass" } else { "fail" },
            "seed": seed,
            "metrics": self.metrics,
            "artifacts": self.artifacts.iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>(),
        })
    }
}

struct ScenarioEntry {
    name: &'static str,
    config: &'static str,
}

const SCENARIOS: &[ScenarioEntry] = &[
    ScenarioEntry {
        name: "prop2_gas",
        config: include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/scenarios/prop2_gas.toml"
        )),
    },
    ScenarioEntry {
        name: "prop2_periodic",
        config: include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/scenarios/prop2_periodic.toml"
        )),
    },
    ScenarioEntry {
        name: "expmu_unstable",
        config: include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/scenarios/expmu_unstable.toml"
        )),
    },
    ScenarioEntry {
        name: "example_exp_stable",
        config: include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/scenarios/example_exp_stable.toml"
        )),
    },
    ScenarioEntry {
        name: "prop3_local",
        config: include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/scenarios/prop3_local.toml"
        )),
    },
    ScenarioEntry {
        name: "tikhonov_scaling",
        config: include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/scenarios/tikhonov_scaling.toml"
        )),
    },
    ScenarioEntry {
        name: "sweep_convergence",
        config: include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/scenarios/sweep_convergence.toml"
        )),
    },
];

pub fn scenario_names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|s| s.name).collect()
}

pub fn scenario_config(name: &str) -> Result<&'static str> {
    SCENARIOS
        .iter()
        .find(|s| s.name == name)
        .map(|s| s.config)
        .ok_or_else(|| Error::UnknownScenario(name.into()))
}

/// Runs a named scenario deterministically under the given seed,
/// writing artifacts under `out_dir/<name>/` when a directory is given.
pub fn run_scenario(name: &str, seed: u64, out_dir: Option<&Path>) -> Result<ScenarioResult> {
    let text = scenario_config(name)?;
    let cfg = ExperimentConfig::from_toml(text)?;
    let spec = cfg
        .scenario
        .clone()
        .ok_or_else(|| Error::invalid(format!("scenario `{name}` has no [scenario] block")))?;

    let out = out_dir.map(|d| d.join(name));
    let mut ctx = Context {
        name: name.to_string(),
        cfg,
        spec,
        seed,
        out,
        metrics: BTreeMap::new(),
        artifacts: Vec::new(),
    };

    let pass = match ctx.spec.kind.clone().as_str() {
        "origin_gas" | "origin_local" => run_origin(&mut ctx)?,
        "periodic" => run_periodic(&mut ctx)?,
        "linearization_unstable" => run_linearization_unstable(&mut ctx)?,
        "linearization_complex" => run_linearization_complex(&mut ctx)?,
        "tikhonov" => run_tikhonov(&mut ctx)?,
        "sweep" => run_sweep(&mut ctx)?,
        other => {
            return Err(Error::invalid(format!(
                "unknown scenario kind `{other}` in `{name}`"
            )))
        }
    };

    let result = ScenarioResult {
        name: ctx.name.clone(),
        pass,
        metrics: ctx.metrics.clone(),
        artifacts: ctx.artifacts.clone(),
    };
    if let Some(dir) = &ctx.out {
        let path = dir.join("result.json");
        report::write_text(&path, &serde_json::to_string_pretty(&result.to_json(seed))?)?;
    }
    Ok(result)
}

struct Context {
    name: String,
    cfg: ExperimentConfig,
    spec: ScenarioSpec,
    seed: u64,
    out: Option<PathBuf>,
    metrics: BTreeMap<String, f64>,
    artifacts: Vec<PathBuf>,
}

impl Context {
    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    fn artifact(&mut self, file: &str, content: &str) -> Result<()> {
        if let Some(dir) = &self.out {
            let path = dir.join(file);
            report::write_text(&path, content)?;
            self.artifacts.push(path);
        }
        Ok(())
    }

    fn system(&self) -> Result<NetworkSystem> {
        self.cfg.build_system(self.cfg.sigmas[0])
    }

    fn reduced_hopf(&self) -> Result<HopfParams> {
        let params = self
            .cfg
            .hopf_params()
            .ok_or_else(|| Error::invalid("scenario expects all-Hopf nodes"))?;
        let sys = self.system()?;
        let v_l: Vec<f64> = sys.split().v_l.iter().copied().collect();
        reduced_hopf_params(&v_l, &params)
    }
}

/// All seeded runs must end inside the origin tolerance.
fn run_origin(ctx: &mut Context) -> Result<bool> {
    let tol = ctx.spec.threshold("terminal_norm")?;
    let sys = ctx.system()?;
    let field = FullField(sys);
    let ics = ctx.cfg.initial_conditions(ctx.seed);

    let mut rows = String::from("run,terminal_norm\n");
    let mut worst: f64 = 0.0;
    let mut completed = true;
    for (i, x0) in ics.iter().enumerate() {
        let traj = integrate(&field, x0, &ctx.cfg.solver)?;
        completed &= traj.completed();
        let norm = traj.last_state().norm();
        worst = worst.max(norm);
        rows.push_str(&format!("{i},{norm:.12e}\n"));
    }
    ctx.metric("runs", ics.len() as f64);
    ctx.metric("max_terminal_norm", worst);
    ctx.artifact("terminal_norms.csv", &rows)?;
    Ok(completed && worst < tol)
}

/// Reduced and full orbits must match their analytic targets and the
/// full orbit must be Floquet-stable.
fn run_periodic(ctx: &mut Context) -> Result<bool> {
    let mu_m = ctx.reduced_hopf()?;
    if mu_m.mu_r <= 0.0 || mu_m.mu_i == 0.0 {
        return Err(Error::invalid(format!(
            "periodic scenario needs mu_mR > 0 and mu_mI != 0, got ({}, {})",
            mu_m.mu_r, mu_m.mu_i
        )));
    }
    let target_period = std::f64::consts::TAU / mu_m.mu_i.abs();
    let target_radius = mu_m.mu_r.sqrt();
    let sys = ctx.system()?;
    let solver = ctx.cfg.solver;
    let x0 = ctx.cfg.initial_conditions(ctx.seed)[0].clone();
    let opts = ctx.cfg.analysis.classify_options(solver);

    // Reduced system first.
    let reduced = ReducedField(sys.clone());
    let xm0 = sys.to_bar(&x0)?.x_m;
    let rtraj = integrate(&reduced, &xm0, &solver)?;
    let rorbit = detect_limit_cycle(&reduced, &rtraj, &opts.orbit, &solver)?;
    ctx.metric("reduced_period", rorbit.alpha);
    ctx.metric("reduced_mean_radius", rorbit.mean_radius);
    ctx.artifact(
        "reduced_orbit.csv",
        &report::orbit_samples_csv(&rorbit, ctx.seed),
    )?;

    // Full network.
    let mut fopts = opts.clone();
    fopts.orbit.projection = Some(xm_projection(&sys));
    let classification = classify(&sys, &x0, &fopts)?;
    let (forbit, floquet) = match &classification {
        Classification::Periodic { orbit, floquet } => (orbit, floquet),
        other => {
            ctx.metric("full_period", f64::NAN);
            ctx.metric("floquet_stable", 0.0);
            ctx.artifact(
                "classification.json",
                &serde_json::to_string_pretty(&report::classification_json(other))?,
            )?;
            return Ok(false);
        }
    };
    ctx.metric("full_period", forbit.alpha);
    ctx.metric("full_mean_radius", forbit.mean_radius);
    ctx.metric("floquet_stable", if floquet.stable { 1.0 } else { 0.0 });
    ctx.metric(
        "floquet_trivial_err",
        (floquet.trivial_multiplier() - 1.0).norm(),
    );
    ctx.artifact("orbit_samples.csv", &report::orbit_samples_csv(forbit, ctx.seed))?;
    ctx.artifact(
        "floquet.json",
        &serde_json::to_string_pretty(&report::floquet_json(floquet))?,
    )?;

    let mut phase = LinePlot::new("averaged-unit phase portrait", "xm_0", "xm_1");
    let proj = xm_projection(&sys);
    phase.add_series(
        "x_m orbit",
        forbit
            .samples
            .iter()
            .map(|s| {
                let p = &proj * s;
                (p[0], p[1])
            })
            .collect(),
    );
    ctx.artifact("phase_portrait.svg", &phase.render())?;

    let rp = ctx.spec.threshold("reduced_period_rel_tol")?;
    let rr = ctx.spec.threshold("reduced_radius_rel_tol")?;
    let fp = ctx.spec.threshold("full_period_rel_tol")?;
    let fr = ctx.spec.threshold("full_radius_rel_tol")?;
    let ok = (rorbit.alpha - target_period).abs() / target_period < rp
        && (rorbit.mean_radius - target_radius).abs() / target_radius < rr
        && (forbit.alpha - target_period).abs() / target_period < fp
        && (forbit.mean_radius - target_radius).abs() / target_radius < fr
        && floquet.stable;
    Ok(ok)
}

/// The +-mu pattern of the two-node network, for the closed-form
/// eigenvalue oracles.
fn plus_minus_mu(ctx: &Context) -> Result<Complex64> {
    let params = ctx
        .cfg
        .hopf_params()
        .ok_or_else(|| Error::invalid("scenario expects Hopf nodes"))?;
    if params.len() != 2
        || params[1].mu_r != -params[0].mu_r
        || params[1].mu_i != -params[0].mu_i
    {
        return Err(Error::invalid(
            "scenario expects two nodes with mu_2 = -mu_1",
        ));
    }
    Ok(Complex64::new(params[0].mu_r, params[0].mu_i))
}

fn eigenvalue_error(sys: &NetworkSystem, expected: &[Complex64]) -> Result<f64> {
    let (_, eigs) = linearize_origin(sys)?;
    Ok(complex_multiset_distance(&eigs, expected))
}

fn eigenvalues_csv(sys_eigs: &[(f64, Vec<Complex64>)], seed: u64) -> String {
    let mut out = format!("# seed: {seed}\nsigma,re,im\n");
    for (sigma, eigs) in sys_eigs {
        for e in eigs {
            out.push_str(&format!("{sigma:.6e},{:.12e},{:.12e}\n", e.re, e.im));
        }
    }
    out
}

/// Closed-form eigenvalues `-s -+ sqrt(s^2 + mu^2)` must match the
/// dense eigensolve, one must be positive, and a perturbed-origin run
/// must escape past `escape_norm` while staying under `bound`.
fn run_linearization_unstable(ctx: &mut Context) -> Result<bool> {
    let mu = plus_minus_mu(ctx)?;
    if mu.im != 0.0 {
        return Err(Error::invalid("this scenario expects real +-mu"));
    }
    let eig_tol = ctx.spec.threshold("eig_tol")?;
    let escape_norm = ctx.spec.threshold("escape_norm")?;
    let bound = ctx.spec.threshold("bound")?;

    let base = ctx.system()?;
    let check_sigmas = ctx.spec.check_sigmas.clone();
    let mut ok = true;
    let mut table = Vec::new();
    for (k, &sigma) in check_sigmas.iter().enumerate() {
        let sys = base.with_sigma(sigma)?;
        let root = (sigma * sigma + mu.re * mu.re).sqrt();
        // Each eigenvalue doubles in real planar coordinates.
        let expected = vec![
            Complex64::new(-sigma - root, 0.0),
            Complex64::new(-sigma - root, 0.0),
            Complex64::new(-sigma + root, 0.0),
            Complex64::new(-sigma + root, 0.0),
        ];
        let err = eigenvalue_error(&sys, &expected)?;
        let (_, eigs) = linearize_origin(&sys)?;
        let positive = eigs.iter().any(|l| l.re > 0.0);
        ctx.metric(&format!("eig_err_{k}"), err);
        ok &= err < eig_tol && positive;
        table.push((sigma, eigs));
    }
    ctx.artifact("eigenvalues.csv", &eigenvalues_csv(&table, ctx.seed))?;

    // Perturbed-origin run at the configured sigma.
    let field = FullField(base);
    let x0 = ctx.cfg.initial_conditions(ctx.seed)[0].clone();
    let traj = integrate(&field, &x0, &ctx.cfg.solver)?;
    let max_norm = traj.states.iter().map(|s| s.norm()).fold(0.0, f64::max);
    ctx.metric("max_norm", max_norm);
    ctx.metric("initial_norm", x0.norm());
    ctx.artifact("trajectory.csv", &report::trajectory_csv(&traj, ctx.seed))?;
    ok &= traj.completed() && max_norm > escape_norm && max_norm <= bound;
    Ok(ok)
}

/// Roots of `z^2 + 2 s z - mu^2` (plus conjugates) must match the dense
/// eigensolve; at the last check sigma all real parts are negative.
fn run_linearization_complex(ctx: &mut Context) -> Result<bool> {
    let mu = plus_minus_mu(ctx)?;
    let eig_tol = ctx.spec.threshold("eig_tol")?;

    let base = ctx.system()?;
    let check_sigmas = ctx.spec.check_sigmas.clone();
    let mut ok = true;
    let mut table = Vec::new();
    let mut last_max_re = f64::NAN;
    for (k, &sigma) in check_sigmas.iter().enumerate() {
        let sys = base.with_sigma(sigma)?;
        let root = (Complex64::new(sigma * sigma, 0.0) + mu * mu).sqrt();
        let r1 = -sigma + root;
        let r2 = -sigma - root;
        let expected = vec![r1, r1.conj(), r2, r2.conj()];
        let err = eigenvalue_error(&sys, &expected)?;
        ctx.metric(&format!("eig_err_{k}"), err);
        ok &= err < eig_tol;
        let (_, eigs) = linearize_origin(&sys)?;
        last_max_re = eigs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        table.push((sigma, eigs));
    }
    ctx.metric("max_re_at_last_sigma", last_max_re);
    ctx.artifact("eigenvalues.csv", &eigenvalues_csv(&table, ctx.seed))?;
    Ok(ok && last_max_re < 0.0)
}

/// Log-log slope of the x_m sup-error against epsilon inside the band.
fn run_tikhonov(ctx: &mut Context) -> Result<bool> {
    let slope_min = ctx.spec.threshold("slope_min")?;
    let slope_max = ctx.spec.threshold("slope_max")?;
    let sys = ctx.system()?;
    let x0 = ctx.cfg.initial_conditions(ctx.seed)[0].clone();
    let report_t = tikhonov_compare(
        &sys,
        &x0,
        ctx.cfg.analysis.tikhonov_horizon,
        &ctx.cfg.analysis.epsilons,
        &ctx.cfg.solver,
    )?;
    ctx.metric("fitted_slope", report_t.fitted_slope);
    for (i, (eps, err)) in report_t
        .epsilons
        .iter()
        .zip(&report_t.sup_errors_xm)
        .enumerate()
    {
        ctx.metric(&format!("eps_{i}"), *eps);
        ctx.metric(&format!("sup_err_xm_{i}"), *err);
    }
    ctx.artifact(
        "tikhonov.json",
        &serde_json::to_string_pretty(&report::tikhonov_json(&report_t))?,
    )?;

    let mut errors_csv = String::from("epsilon,sup_err_xm,sup_err_ev\n");
    for i in 0..report_t.epsilons.len() {
        errors_csv.push_str(&format!(
            "{:.6e},{:.12e},{:.12e}\n",
            report_t.epsilons[i], report_t.sup_errors_xm[i], report_t.sup_errors_ev[i]
        ));
    }
    ctx.artifact("errors.csv", &errors_csv)?;

    let mut plot = LinePlot::new("trajectory error vs epsilon (log-log)", "ln eps", "ln err");
    plot.add_series(
        "x_m sup error",
        report_t
            .epsilons
            .iter()
            .zip(&report_t.sup_errors_xm)
            .map(|(e, r)| (e.ln(), r.max(1e-300).ln()))
            .collect(),
    );
    ctx.artifact("error_scaling.svg", &plot.render())?;

    Ok(report_t.fitted_slope > slope_min && report_t.fitted_slope < slope_max)
}

/// Period and orbit-distance trends must be non-increasing (within the
/// declared noise factor) and the error amplitude must shrink.
fn run_sweep(ctx: &mut Context) -> Result<bool> {
    let noise = ctx.spec.threshold("noise_factor")?;
    let mu_m = ctx.reduced_hopf()?;
    let target_period = std::f64::consts::TAU / mu_m.mu_i.abs();

    let sys = ctx.system()?;
    let x0 = ctx.cfg.initial_conditions(ctx.seed)[0].clone();
    let opts = ctx.cfg.analysis.classify_options(ctx.cfg.solver);
    let report_s = sweep_sigma(&sys, &ctx.cfg.sigmas, &x0, &opts)?;

    ctx.artifact("sweep.csv", &report::sweep_csv(&report_s, ctx.seed))?;
    ctx.artifact(
        "sweep.json",
        &serde_json::to_string_pretty(&report::sweep_json(&report_s, ctx.seed))?,
    )?;

    let (period_dev, distances, amplitudes) = match (
        report_s.period_deviations(target_period),
        report_s.orbit_distances(),
        report_s.ev_amplitudes(),
    ) {
        (Some(p), Some(d), Some(a)) => (p, d, a),
        _ => return Ok(false),
    };
    for (i, ((pd, d), a)) in period_dev
        .iter()
        .zip(&distances)
        .zip(&amplitudes)
        .enumerate()
    {
        ctx.metric(&format!("period_dev_{i}"), *pd);
        ctx.metric(&format!("orbit_distance_{i}"), *d);
        ctx.metric(&format!("ev_amplitude_{i}"), *a);
    }

    let mut plot = LinePlot::new("period vs coupling strength", "sigma", "period");
    plot.add_series(
        "detected",
        report_s
            .rows
            .iter()
            .filter_map(|r| r.period.map(|p| (r.sigma, p)))
            .collect(),
    );
    plot.add_series(
        "reduced",
        vec![
            (report_s.rows[0].sigma, target_period),
            (report_s.rows.last().unwrap().sigma, target_period),
        ],
    );
    ctx.artifact("period_vs_sigma.svg", &plot.render())?;

    let mut dplot = LinePlot::new("orbit distance vs coupling strength", "sigma", "distance");
    dplot.add_series(
        "Hausdorff distance",
        report_s
            .rows
            .iter()
            .filter_map(|r| r.orbit_distance.map(|d| (r.sigma, d)))
            .collect(),
    );
    ctx.artifact("distance_vs_sigma.svg", &dplot.render())?;

    Ok(non_increasing_trend(&period_dev, noise)
        && non_increasing_trend(&distances, noise)
        && non_increasing_trend(&amplitudes, noise))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_all_scenarios() {
        let names = scenario_names();
        assert_eq!(names.len(), 7);
        for name in [
            "prop2_gas",
            "prop2_periodic",
            "expmu_unstable",
            "example_exp_stable",
            "prop3_local",
            "tikhonov_scaling",
            "sweep_convergence",
        ] {
            assert!(names.contains(&name));
        }
    }

    #[test]
    fn unknown_scenario_is_an_error() {
        let err = run_scenario("nope", 1, None).unwrap_err();
        assert!(matches!(err, Error::UnknownScenario(_)));
    }

    #[test]
    fn every_scenario_config_parses() {
        for name in scenario_names() {
            let text = scenario_config(name).unwrap();
            let cfg = ExperimentConfig::from_toml(text).unwrap();
            assert!(cfg.scenario.is_some(), "{name} lacks a scenario block");
        }
    }

    #[test]
    fn linearization_scenarios_pass_and_are_deterministic() {
        let a = run_scenario("expmu_unstable", 42, None).unwrap();
        assert!(a.pass, "metrics: {:?}", a.metrics);
        let b = run_scenario("expmu_unstable", 42, None).unwrap();
        assert_eq!(a.metrics, b.metrics);

        let c = run_scenario("example_exp_stable", 42, None).unwrap();
        assert!(c.pass, "metrics: {:?}", c.metrics);
        assert!(c.metrics["max_re_at_last_sigma"] < 0.0);
    }

    #[test]
    fn local_stability_scenario_passes() {
        let r = run_scenario("prop3_local", 42, None).unwrap();
        assert!(r.pass, "metrics: {:?}", r.metrics);
        assert!(r.metrics["max_terminal_norm"] < 1e-6);
    }
}
