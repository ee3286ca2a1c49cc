//! Command-line front end: wires experiment config files to the
//! decomposition, simulation, and analysis operations, and emits CSV,
//! JSON, and SVG artifacts.
//!
//! Exit codes: 0 success (scenario pass), 1 scenario fail, 2 validation
//! error, 3 numerical failure, 4 analysis inconclusive. Failures print
//! machine-readable JSON on standard error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use syncdyn::analysis::{
    detect_limit_cycle, floquet_classify, sweep_sigma, xm_projection,
};
use syncdyn::config::ExperimentConfig;
use syncdyn::error::Error;
use syncdyn::integrate::{integrate, TrajectoryStatus};
use syncdyn::models::reduced_hopf_params;
use syncdyn::network::{FullField, ReducedField};
use syncdyn::report;
use syncdyn::scenario::{run_scenario, scenario_names};
use syncdyn::svg::LinePlot;

#[derive(Parser)]
#[command(
    name = "syncdyn",
    about = "Simulation and analysis of diffusively coupled oscillator networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Experiment config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Seed for every random choice; recorded in all outputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the config's coupling strength.
    #[arg(long)]
    sigma: Option<f64>,
    /// Suppress progress output on stdout.
    #[arg(long, default_value_t = false)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the Laplacian, verify connectivity, and export the
    /// spectral split with its identity residuals.
    Decompose(CommonArgs),
    /// Integrate the full network; write stacked and bar-coordinate
    /// trajectory CSVs.
    Simulate(CommonArgs),
    /// Integrate the reduced (averaged) system; echo the reduced Hopf
    /// parameter when all nodes are Hopf oscillators.
    Reduced(CommonArgs),
    /// Sweep the coupling strength over the config's `sim.sigmas` list
    /// (ignores --sigma); write the report and trend plots.
    Sweep(CommonArgs),
    /// Detect a periodic orbit and compute its characteristic
    /// multipliers.
    Floquet(CommonArgs),
    /// Canned seeded experiments.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    /// Run a named scenario.
    Run {
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = false)]
        quiet: bool,
    },
    /// List available scenarios.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Decompose(args) => cmd_decompose(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Reduced(args) => cmd_reduced(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Floquet(args) => cmd_floquet(&args),
        Command::Scenario { action } => match action {
            ScenarioAction::Run { name, seed, out, quiet } => cmd_scenario(&name, seed, &out, quiet),
            ScenarioAction::List => {
                for name in scenario_names() {
                    println!("{name}");
                }
                Ok(0)
            }
        },
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let payload = match &e {
                Error::InvalidInput(violations) => json!({
                    "error": "validation",
                    "violations": violations,
                }),
                other => json!({
                    "error": "failure",
                    "message": other.to_string(),
                }),
            };
            eprintln!("{payload}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

type CmdResult = Result<u8, Error>;

fn load(args: &CommonArgs) -> Result<(ExperimentConfig, f64), Error> {
    let text = std::fs::read_to_string(&args.config)?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    let sigma = args.sigma.unwrap_or(cfg.sigmas[0]);
    Ok((cfg, sigma))
}

fn say(quiet: bool, msg: &str) {
    if !quiet {
        println!("{msg}");
    }
}

fn cmd_decompose(args: &CommonArgs) -> CmdResult {
    let (cfg, _) = load(args)?;
    let lap = syncdyn::graph::build_laplacian(&cfg.graph);
    if !syncdyn::graph::check_connectivity(&cfg.graph)? {
        return Err(Error::Disconnected(
            "the configured graph has no rooted spanning tree".into(),
        ));
    }
    let split = syncdyn::graph::spectral_split(&lap)?;
    let residuals = split.identity_residuals(&lap);
    let residual = split.identity_residual(&lap);

    let v_l: Vec<f64> = split.v_l.iter().copied().collect();
    say(args.quiet, &format!("v_l = {v_l:?}"));
    let names = ["v_l'1 - 1", "v_l'V", "V_dag V - I", "V V_dag - P", "LV - V Lambda"];
    for (name, r) in names.iter().zip(residuals) {
        say(args.quiet, &format!("residual {name:>13} = {r:.3e}"));
    }
    say(args.quiet, &format!("identity residual = {residual:.3e}"));
    say(
        args.quiet,
        &format!("lambda2 real part = {:.6}", split.lambda2_real),
    );

    let path = args.out.join("split.csv");
    report::write_text(&path, &report::split_csv(&split, residual))?;
    say(args.quiet, &format!("wrote {}", path.display()));
    Ok(0)
}

fn cmd_simulate(args: &CommonArgs) -> CmdResult {
    let (cfg, sigma) = load(args)?;
    let sys = cfg.build_system(sigma)?;
    let field = FullField(sys.clone());
    let ics = cfg.initial_conditions(args.seed);

    let mut worst: Option<TrajectoryStatus> = None;
    for (i, x0) in ics.iter().enumerate() {
        let traj = integrate(&field, x0, &cfg.solver)?;
        let stem = if ics.len() == 1 {
            String::from("trajectory")
        } else {
            format!("trajectory_{i}")
        };
        let path = args.out.join(format!("{stem}.csv"));
        report::write_text(&path, &report::trajectory_csv(&traj, args.seed))?;
        let bar_path = args.out.join(format!("{stem}_bar.csv"));
        report::write_text(&bar_path, &report::bar_trajectory_csv(&sys, &traj, args.seed)?)?;
        say(
            args.quiet,
            &format!(
                "run {i}: {:?} at t = {:.3}, wrote {} and {}",
                traj.status,
                traj.last_time(),
                path.display(),
                bar_path.display()
            ),
        );
        if traj.status != TrajectoryStatus::Completed {
            worst = Some(traj.status);
        }
    }
    if let Some(status) = worst {
        return Err(Error::Numerical(format!(
            "at least one run ended with {status:?}"
        )));
    }
    Ok(0)
}

fn cmd_reduced(args: &CommonArgs) -> CmdResult {
    let (cfg, sigma) = load(args)?;
    let sys = cfg.build_system(sigma)?;
    let x0 = cfg.initial_conditions(args.seed)[0].clone();
    let xm0 = sys.to_bar(&x0)?.x_m;
    let reduced = ReducedField(sys.clone());
    let traj = integrate(&reduced, &xm0, &cfg.solver)?;

    let path = args.out.join("reduced_trajectory.csv");
    report::write_text(&path, &report::trajectory_csv(&traj, args.seed))?;
    say(args.quiet, &format!("wrote {}", path.display()));

    if let Some(params) = cfg.hopf_params() {
        let v_l: Vec<f64> = sys.split().v_l.iter().copied().collect();
        let mu_m = reduced_hopf_params(&v_l, &params)?;
        let echo = json!({
            "mu_m": [mu_m.mu_r, mu_m.mu_i],
            "limit_cycle_radius": if mu_m.mu_r > 0.0 { Some(mu_m.mu_r.sqrt()) } else { None },
            "limit_cycle_period": if mu_m.mu_i != 0.0 {
                Some(std::f64::consts::TAU / mu_m.mu_i.abs())
            } else {
                None
            },
        });
        say(args.quiet, &echo.to_string());
        report::write_text(
            &args.out.join("reduced_params.json"),
            &serde_json::to_string_pretty(&echo)?,
        )?;
    }
    if traj.status != TrajectoryStatus::Completed {
        return Err(Error::Numerical(format!(
            "reduced run ended with {:?}",
            traj.status
        )));
    }
    Ok(0)
}

fn cmd_sweep(args: &CommonArgs) -> CmdResult {
    let (cfg, _) = load(args)?;
    if cfg.sigmas.is_empty() {
        return Err(Error::invalid("sweep needs sim.sigmas in the config"));
    }
    let sys = cfg.build_system(cfg.sigmas[0])?;
    let x0 = cfg.initial_conditions(args.seed)[0].clone();
    let opts = cfg.analysis.classify_options(cfg.solver);
    let report_s = sweep_sigma(&sys, &cfg.sigmas, &x0, &opts)?;

    report::write_text(&args.out.join("sweep.csv"), &report::sweep_csv(&report_s, args.seed))?;
    report::write_text(
        &args.out.join("sweep.json"),
        &serde_json::to_string_pretty(&report::sweep_json(&report_s, args.seed))?,
    )?;

    let mut period_plot = LinePlot::new("period vs coupling strength", "sigma", "period");
    period_plot.add_series(
        "detected",
        report_s
            .rows
            .iter()
            .filter_map(|r| r.period.map(|p| (r.sigma, p)))
            .collect(),
    );
    report::write_text(&args.out.join("period_vs_sigma.svg"), &period_plot.render())?;

    let mut dist_plot = LinePlot::new("orbit distance vs coupling strength", "sigma", "distance");
    dist_plot.add_series(
        "Hausdorff distance",
        report_s
            .rows
            .iter()
            .filter_map(|r| r.orbit_distance.map(|d| (r.sigma, d)))
            .collect(),
    );
    report::write_text(&args.out.join("distance_vs_sigma.svg"), &dist_plot.render())?;

    for row in &report_s.rows {
        say(
            args.quiet,
            &format!(
                "sigma = {:>8.3}: {} period = {:?}",
                row.sigma,
                row.classification
                    .as_ref()
                    .map_or("failed", |c| c.tag()),
                row.period,
            ),
        );
    }
    say(args.quiet, &format!("wrote sweep report under {}", args.out.display()));
    Ok(0)
}

fn cmd_floquet(args: &CommonArgs) -> CmdResult {
    let (cfg, sigma) = load(args)?;
    let sys = cfg.build_system(sigma)?;
    let field = FullField(sys.clone());
    let x0 = cfg.initial_conditions(args.seed)[0].clone();
    let traj = integrate(&field, &x0, &cfg.solver)?;
    if traj.status != TrajectoryStatus::Completed {
        return Err(Error::Numerical(format!(
            "trajectory ended with {:?}",
            traj.status
        )));
    }

    let mut orbit_opts = cfg.analysis.orbit_options();
    orbit_opts.projection = Some(xm_projection(&sys));
    let orbit = detect_limit_cycle(&field, &traj, &orbit_opts, &cfg.solver)?;
    let floquet = floquet_classify(&field, &orbit, &cfg.solver, cfg.analysis.floquet_margin)?;

    let payload = json!({
        "seed": args.seed,
        "sigma": sigma,
        "orbit": report::orbit_json(&orbit),
        "floquet": report::floquet_json(&floquet),
    });
    say(args.quiet, &payload.to_string());
    report::write_text(
        &args.out.join("floquet.json"),
        &serde_json::to_string_pretty(&payload)?,
    )?;
    report::write_text(
        &args.out.join("orbit_samples.csv"),
        &report::orbit_samples_csv(&orbit, args.seed),
    )?;
    say(args.quiet, &format!("wrote floquet report under {}", args.out.display()));
    Ok(0)
}

fn cmd_scenario(name: &str, seed: u64, out: &Path, quiet: bool) -> CmdResult {
    let result = run_scenario(name, seed, Some(out))?;
    say(quiet, &result.to_json(seed).to_string());
    if result.pass {
        say(quiet, &format!("{name}: pass"));
        Ok(0)
    } else {
        say(quiet, &format!("{name}: fail"));
        Ok(1)
    }
}
