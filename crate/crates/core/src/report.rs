//! File emission: CSV tables with stable column orders and JSON
//! reports. Every file records the seed that produced it.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use crate::analysis::{
    Classification, FloquetResult, PeriodicOrbitEstimate, SweepReport, TikhonovReport,
};
use crate::error::Result;
use crate::graph::SpectralSplit;
use crate::integrate::{CrossingEvent, Trajectory};
use crate::network::NetworkSystem;

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

/// `# seed: S` then `t, x_0 ... x_{d-1}`, one row per accepted step.
pub fn trajectory_csv(traj: &Trajectory, seed: u64) -> String {
    let dim = traj.states.first().map_or(0, |s| s.len());
    let mut out = format!("# seed: {seed}\n# status: {:?}\n", traj.status);
    out.push('t');
    for k in 0..dim {
        let _ = write!(out, ",x_{k}");
    }
    out.push('\n');
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let _ = write!(out, "{t:.12e}");
        for v in s.iter() {
            let _ = write!(out, ",{v:.12e}");
        }
        out.push('\n');
    }
    out
}

/// Bar coordinates: `t, xm_0 ... xm_{n-1}, ev_0 ... ev_{n(N-1)-1}`.
pub fn bar_trajectory_csv(sys: &NetworkSystem, traj: &Trajectory, seed: u64) -> Result<String> {
    let n = sys.node_dim();
    let m = n * (sys.node_count() - 1);
    let mut out = format!("# seed: {seed}\n");
    out.push('t');
    for k in 0..n {
        let _ = write!(out, ",xm_{k}");
    }
    for k in 0..m {
        let _ = write!(out, ",ev_{k}");
    }
    out.push('\n');
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let bar = sys.to_bar(s)?;
        let _ = write!(out, "{t:.12e}");
        for v in bar.x_m.iter() {
            let _ = write!(out, ",{v:.12e}");
        }
        for v in bar.e_v.iter() {
            let _ = write!(out, ",{v:.12e}");
        }
        out.push('\n');
    }
    Ok(out)
}

/// `t_cross, x_0 ... x_{d-1}, direction`.
pub fn events_csv(events: &[CrossingEvent], seed: u64) -> String {
    let dim = events.first().map_or(0, |e| e.state_cross.len());
    let mut out = format!("# seed: {seed}\nt_cross");
    for k in 0..dim {
        let _ = write!(out, ",x_{k}");
    }
    out.push_str(",direction\n");
    for e in events {
        let _ = write!(out, "{:.12e}", e.t_cross);
        for v in e.state_cross.iter() {
            let _ = write!(out, ",{v:.12e}");
        }
        let _ = writeln!(out, ",{}", e.direction);
    }
    out
}

/// The spectral split as one CSV with a header naming each block:
/// `v_l` (1 x N), `V` (N x N-1), `V_dag` (N-1 x N), `Lambda`
/// (N-1 x N-1), and the identity residual.
pub fn split_csv(split: &SpectralSplit, residual: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# identity residual: {residual:.6e}");
    out.push_str("# block: v_l\n");
    out.push_str(&row_csv(split.v_l.iter()));
    out.push_str("# block: V\n");
    for r in 0..split.v.nrows() {
        out.push_str(&row_csv(split.v.row(r).iter()));
    }
    out.push_str("# block: V_dag\n");
    for r in 0..split.v_dag.nrows() {
        out.push_str(&row_csv(split.v_dag.row(r).iter()));
    }
    out.push_str("# block: Lambda\n");
    for r in 0..split.lambda.nrows() {
        out.push_str(&row_csv(split.lambda.row(r).iter()));
    }
    out
}

fn row_csv<'a>(values: impl Iterator<Item = &'a f64>) -> String {
    let cells: Vec<String> = values.map(|v| format!("{v:.16e}")).collect();
    let mut line = cells.join(",");
    line.push('\n');
    line
}

/// `sigma, period, orbit_distance, ev_amplitude, classification, note`.
pub fn sweep_csv(report: &SweepReport, seed: u64) -> String {
    let mut out = format!("# seed: {seed}\n");
    out.push_str("sigma,period,orbit_distance,ev_amplitude,classification,note\n");
    for row in &report.rows {
        let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.12e}"));
        let _ = writeln!(
            out,
            "{:.6e},{},{},{},{},{}",
            row.sigma,
            fmt_opt(row.period),
            fmt_opt(row.orbit_distance),
            fmt_opt(row.ev_amplitude),
            row.classification.as_ref().map_or("", |c| c.tag()),
            row.note.as_deref().unwrap_or(""),
        );
    }
    out
}

pub fn sweep_json(report: &SweepReport, seed: u64) -> Value {
    json!({
        "seed": seed,
        "rows": report.rows.iter().map(|row| json!({
            "sigma": row.sigma,
            "period": row.period,
            "orbit_distance": row.orbit_distance,
            "ev_amplitude": row.ev_amplitude,
            "classification": row.classification.as_ref().map(classification_json),
            "note": row.note,
        })).collect::<Vec<_>>(),
    })
}

pub fn orbit_json(orbit: &PeriodicOrbitEstimate) -> Value {
    json!({
        "period": orbit.alpha,
        "residual": orbit.residual,
        "mean_radius": orbit.mean_radius,
        "samples": orbit.samples.len(),
        "section_point": orbit.section.point.iter().copied().collect::<Vec<f64>>(),
        "section_normal": orbit.section.normal.iter().copied().collect::<Vec<f64>>(),
    })
}

/// One period of orbit samples: `index, x_0 ... x_{d-1}`.
pub fn orbit_samples_csv(orbit: &PeriodicOrbitEstimate, seed: u64) -> String {
    let dim = orbit.samples.first().map_or(0, |s| s.len());
    let mut out = format!("# seed: {seed}\n# period: {:.12e}\nindex", orbit.alpha);
    for k in 0..dim {
        let _ = write!(out, ",x_{k}");
    }
    out.push('\n');
    for (i, s) in orbit.samples.iter().enumerate() {
        let _ = write!(out, "{i}");
        for v in s.iter() {
            let _ = write!(out, ",{v:.12e}");
        }
        out.push('\n');
    }
    out
}

pub fn floquet_json(fl: &FloquetResult) -> Value {
    json!({
        "multipliers": fl.multipliers.iter().map(|m| json!([m.re, m.im])).collect::<Vec<_>>(),
        "trivial_index": fl.trivial_index,
        "stable": fl.stable,
        "margin": fl.margin,
    })
}

pub fn classification_json(c: &Classification) -> Value {
    match c {
        Classification::OriginConvergent { final_norm } => json!({
            "tag": c.tag(),
            "final_norm": final_norm,
        }),
        Classification::Periodic { orbit, floquet } => json!({
            "tag": c.tag(),
            "orbit": orbit_json(orbit),
            "floquet": floquet_json(floquet),
        }),
        Classification::PracticalNeighborhood { terminal_bound } => json!({
            "tag": c.tag(),
            "terminal_bound": terminal_bound,
        }),
        Classification::Diverged { t_abort } => json!({
            "tag": c.tag(),
            "t_abort": t_abort,
        }),
    }
}

pub fn tikhonov_json(report: &TikhonovReport) -> Value {
    json!({
        "epsilons": report.epsilons,
        "sup_errors_xm": report.sup_errors_xm,
        "sup_errors_ev": report.sup_errors_ev,
        "fitted_slope": report.fitted_slope,
        "horizon": report.horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::TrajectoryStatus;
    use nalgebra::DVector;

    #[test]
    fn trajectory_csv_has_stable_layout() {
        let traj = Trajectory {
            times: vec![0.0, 0.5],
            states: vec![
                DVector::from_column_slice(&[1.0, 2.0]),
                DVector::from_column_slice(&[3.0, 4.0]),
            ],
            status: TrajectoryStatus::Completed,
        };
        let csv = trajectory_csv(&traj, 42);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# seed: 42");
        assert_eq!(lines[2], "t,x_0,x_1");
        assert!(lines[3].starts_with("0."));
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn events_csv_has_stable_layout() {
        let events = vec![CrossingEvent {
            t_cross: 2.5,
            state_cross: DVector::from_column_slice(&[1.0, 0.0]),
            direction: 1,
        }];
        let csv = events_csv(&events, 7);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# seed: 7");
        assert_eq!(lines[1], "t_cross,x_0,x_1,direction");
        assert!(lines[2].ends_with(",1"));
    }

    #[test]
    fn split_csv_names_every_block() {
        let lap = crate::graph::build_laplacian(
            &crate::graph::WeightedDigraph::from_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap(),
        );
        let split = crate::graph::spectral_split(&lap).unwrap();
        let csv = split_csv(&split, split.identity_residual(&lap));
        for block in ["v_l", "V", "V_dag", "Lambda"] {
            assert!(csv.contains(&format!("# block: {block}")), "{csv}");
        }
    }
}
