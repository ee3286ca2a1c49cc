//! End-to-end runs through the config layer, plus dynamical invariants
//! that need an integrator.

use std::sync::Arc;

use nalgebra::DVector;

use syncdyn::analysis::{detect_limit_cycle, xm_projection};
use syncdyn::config::ExperimentConfig;
use syncdyn::graph::WeightedDigraph;
use syncdyn::integrate::{integrate, SolverConfig};
use syncdyn::models::{hopf_field, HopfParams, VectorField};
use syncdyn::network::{FullField, NetworkSystem};

const EXAMPLE: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../configs/example.toml"
));

#[test]
fn example_config_runs_end_to_end() {
    let cfg = ExperimentConfig::from_toml(EXAMPLE).unwrap();
    let sys = cfg.build_system(cfg.sigmas[0]).unwrap();
    let x0 = cfg.initial_conditions(0)[0].clone();
    let field = FullField(sys.clone());
    let traj = integrate(&field, &x0, &cfg.solver).unwrap();
    assert!(traj.completed());

    let mut opts = cfg.analysis.orbit_options();
    opts.projection = Some(xm_projection(&sys));
    let orbit = detect_limit_cycle(&field, &traj, &opts, &cfg.solver).unwrap();
    // mu_m = 1 + i: the reference experiment locks near period 2 pi.
    assert!((orbit.alpha - std::f64::consts::TAU).abs() < 0.2);
}

#[test]
fn synchronization_subspace_is_invariant_for_identical_nodes() {
    // Identical nodes started synchronized stay synchronized: e_v
    // remains at integrator-noise level over the whole run.
    let nodes: Vec<Arc<dyn VectorField>> = (0..4)
        .map(|_| {
            Arc::new(hopf_field(HopfParams::new(1.0, 1.0).unwrap())) as Arc<dyn VectorField>
        })
        .collect();
    let graph = WeightedDigraph::from_edges(
        4,
        &[(1, 0, 1.0), (2, 1, 0.5), (3, 2, 2.0), (0, 3, 1.0), (2, 0, 0.3)],
    )
    .unwrap();
    let sys = NetworkSystem::new(nodes, graph, 5.0).unwrap();
    let c = [1.3, -0.4];
    let x0 = DVector::from_column_slice(&[c[0], c[1]].repeat(4));
    let traj = integrate(&FullField(sys.clone()), &x0, &SolverConfig::dopri(30.0)).unwrap();
    assert!(traj.completed());
    let mut worst: f64 = 0.0;
    for s in &traj.states {
        let bar = sys.to_bar(s).unwrap();
        worst = worst.max(bar.e_v.norm());
    }
    assert!(worst < 1e-8, "e_v grew to {worst:.3e}");
}

#[test]
fn trajectories_are_reproducible_across_equal_runs() {
    let cfg = ExperimentConfig::from_toml(EXAMPLE).unwrap();
    let sys = cfg.build_system(25.0).unwrap();
    let x0 = cfg.initial_conditions(0)[0].clone();
    let field = FullField(sys);
    let solver = cfg.solver.with_t_end(10.0);
    let a = integrate(&field, &x0, &solver).unwrap();
    let b = integrate(&field, &x0, &solver).unwrap();
    assert_eq!(a.times, b.times);
    assert_eq!(a.states, b.states);
}
