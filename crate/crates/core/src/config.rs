//! Experiment configuration: a single TOML file describing the graph,
//! the per-node models, the coupling strength(s), the solver, the
//! initial conditions, and analysis thresholds.
//!
//! Validation runs every upstream invariant before any compute and
//! reports all violations at once. The same files drive the library,
//! the command line, and the canned scenarios.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::analysis::{ClassifyOptions, OrbitOptions};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::integrate::{Method, SolverConfig};
use crate::models::{hopf_field, HopfParams, MonomialTerm, PolynomialField, VectorField};
use crate::network::NetworkSystem;
use crate::sample::random_ball;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    graph: RawGraph,
    #[serde(default)]
    nodes: Vec<RawNode>,
    sim: RawSim,
    ic: RawIc,
    #[serde(default)]
    analysis: RawAnalysis,
    #[serde(default)]
    scenario: Option<RawScenario>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    n: usize,
    /// `(i, j, weight)` triplets: node i listens to node j.
    edges: Option<Vec<(usize, usize, f64)>>,
    /// Dense row-major weight matrix; alternative to `edges`.
    matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    model: String,
    /// `[mu_r, mu_i]` for the hopf model.
    mu: Option<[f64; 2]>,
    /// Optional cubic coefficient; only `[1, 0]` is supported.
    nu: Option<[f64; 2]>,
    /// Replicates this node block.
    #[serde(default = "one")]
    count: usize,
    /// Polynomial model fields.
    dim: Option<usize>,
    terms: Option<Vec<RawTerm>>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    out: usize,
    coef: f64,
    powers: Vec<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    sigma: Option<f64>,
    sigmas: Option<Vec<f64>>,
    t_end: f64,
    #[serde(default = "default_method")]
    method: String,
    rtol: Option<f64>,
    atol: Option<f64>,
    h: Option<f64>,
    max_steps: Option<usize>,
    divergence_bound: Option<f64>,
}

fn default_method() -> String {
    "dopri45".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIc {
    /// Per-node initial states, node-major.
    states: Option<Vec<Vec<f64>>>,
    random_ball: Option<RawBall>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBall {
    radius: f64,
    count: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    transient_fraction: Option<f64>,
    return_points: Option<usize>,
    return_tol: Option<f64>,
    orbit_samples: Option<usize>,
    min_extent: Option<f64>,
    floquet_margin: Option<f64>,
    origin_tol: Option<f64>,
    epsilons: Option<Vec<f64>>,
    tikhonov_horizon: Option<f64>,
    ub_radius: Option<f64>,
    ub_count: Option<usize>,
    ub_horizon: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: String,
    #[serde(default)]
    check_sigmas: Vec<f64>,
    #[serde(default)]
    thresholds: BTreeMap<String, f64>,
}

/// Node model description, kept symbolic so reports can echo
/// parameters (e.g. the reduced Hopf parameter).
#[derive(Debug, Clone)]
pub enum NodeSpec {
    Hopf(HopfParams),
    Polynomial { dim: usize },
}

/// Initial conditions: an explicit stacked state or a seeded ball.
#[derive(Debug, Clone)]
pub enum IcSpec {
    Explicit(Vec<DVector<f64>>),
    RandomBall { radius: f64, count: usize },
}

/// Analysis thresholds with their defaults.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub transient_fraction: f64,
    pub return_points: usize,
    pub return_tol: f64,
    pub orbit_samples: usize,
    pub min_extent: f64,
    pub floquet_margin: f64,
    pub origin_tol: f64,
    pub epsilons: Vec<f64>,
    pub tikhonov_horizon: f64,
    pub ub_radius: f64,
    pub ub_count: usize,
    pub ub_horizon: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            transient_fraction: 0.5,
            return_points: 8,
            return_tol: 1e-6,
            orbit_samples: 256,
            min_extent: 1e-6,
            floquet_margin: 1e-3,
            origin_tol: 1e-6,
            epsilons: vec![0.1, 0.05, 0.025, 0.0125],
            tikhonov_horizon: 10.0,
            ub_radius: 5.0,
            ub_count: 12,
            ub_horizon: 400.0,
        }
    }
}

impl AnalysisOptions {
    pub fn orbit_options(&self) -> OrbitOptions {
        OrbitOptions {
            transient_fraction: self.transient_fraction,
            return_points: self.return_points,
            return_tol: self.return_tol,
            orbit_samples: self.orbit_samples,
            min_extent: self.min_extent,
            projection: None,
        }
    }

    pub fn classify_options(&self, solver: SolverConfig) -> ClassifyOptions {
        ClassifyOptions {
            solver,
            orbit: self.orbit_options(),
            origin_tol: self.origin_tol,
            floquet_margin: self.floquet_margin,
        }
    }
}

/// Scenario dispatch block of a canned config.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub kind: String,
    pub check_sigmas: Vec<f64>,
    pub thresholds: BTreeMap<String, f64>,
}

impl ScenarioSpec {
    pub fn threshold(&self, key: &str) -> Result<f64> {
        self.thresholds
            .get(key)
            .copied()
            .ok_or_else(|| Error::invalid(format!("scenario config is missing threshold `{key}`")))
    }
}

/// A fully validated experiment description with its node models built.
#[derive(Clone)]
pub struct ExperimentConfig {
    pub graph: WeightedDigraph,
    pub node_specs: Vec<NodeSpec>,
    nodes: Vec<Arc<dyn VectorField>>,
    pub sigmas: Vec<f64>,
    pub solver: SolverConfig,
    pub ic: IcSpec,
    pub analysis: AnalysisOptions,
    pub scenario: Option<ScenarioSpec>,
}

impl std::fmt::Debug for ExperimentConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExperimentConfig")
            .field("nodes", &self.node_specs)
            .field("sigmas", &self.sigmas)
            .field("ic", &self.ic)
            .finish()
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut violations = Vec::new();

        let graph = build_graph(&raw.graph, &mut violations);

        let mut node_specs = Vec::new();
        let mut nodes: Vec<Arc<dyn VectorField>> = Vec::new();
        let mut node_dim = None;
        for (idx, node) in raw.nodes.iter().enumerate() {
            match build_node(idx, node) {
                Ok((spec, field)) => {
                    let dim = field.dim();
                    match node_dim {
                        None => node_dim = Some(dim),
                        Some(d) if d != dim => violations.push(format!(
                            "node block {idx}: dimension {dim} conflicts with earlier {d}"
                        )),
                        _ => {}
                    }
                    for _ in 0..node.count {
                        node_specs.push(spec.clone());
                        nodes.push(field.clone());
                    }
                }
                Err(msgs) => violations.extend(msgs),
            }
        }
        if node_specs.len() != raw.graph.n {
            violations.push(format!(
                "graph has {} nodes but {} node models were configured",
                raw.graph.n,
                node_specs.len()
            ));
        }

        let sigmas = match (&raw.sim.sigma, &raw.sim.sigmas) {
            (Some(s), None) => vec![*s],
            (None, Some(list)) if !list.is_empty() => list.clone(),
            (Some(_), Some(_)) => {
                violations.push("give either sim.sigma or sim.sigmas, not both".into());
                vec![]
            }
            _ => {
                violations.push("sim.sigma (or a non-empty sim.sigmas) is required".into());
                vec![]
            }
        };
        for s in &sigmas {
            if !s.is_finite() || *s <= 0.0 {
                violations.push(format!("coupling strength sigma must be > 0, got {s}"));
            }
        }

        let method = match raw.sim.method.as_str() {
            "dopri45" => Method::Dopri45 {
                rtol: raw.sim.rtol.unwrap_or(1e-9),
                atol: raw.sim.atol.unwrap_or(1e-11),
            },
            "rk4" => match raw.sim.h {
                Some(h) => Method::Rk4 { h },
                None => {
                    violations.push("sim.h is required for the rk4 method".into());
                    Method::Rk4 { h: 1e-3 }
                }
            },
            other => {
                violations.push(format!(
                    "unknown method `{other}` (expected `dopri45` or `rk4`)"
                ));
                Method::Dopri45 { rtol: 1e-9, atol: 1e-11 }
            }
        };
        let solver = SolverConfig {
            method,
            t_end: raw.sim.t_end,
            max_steps: raw.sim.max_steps.unwrap_or(50_000_000),
            divergence_bound: raw.sim.divergence_bound.unwrap_or(1e6),
        };
        if !solver.t_end.is_finite() || solver.t_end <= 0.0 {
            violations.push(format!("sim.t_end must be > 0, got {}", solver.t_end));
        }
        if !solver.divergence_bound.is_finite() || solver.divergence_bound <= 0.0 {
            violations.push(format!(
                "sim.divergence_bound must be > 0, got {}",
                solver.divergence_bound
            ));
        }

        let ic = build_ic(&raw.ic, node_dim.unwrap_or(0), raw.graph.n, &mut violations);

        let defaults = AnalysisOptions::default();
        let a = &raw.analysis;
        let analysis = AnalysisOptions {
            transient_fraction: a.transient_fraction.unwrap_or(defaults.transient_fraction),
            return_points: a.return_points.unwrap_or(defaults.return_points),
            return_tol: a.return_tol.unwrap_or(defaults.return_tol),
            orbit_samples: a.orbit_samples.unwrap_or(defaults.orbit_samples),
            min_extent: a.min_extent.unwrap_or(defaults.min_extent),
            floquet_margin: a.floquet_margin.unwrap_or(defaults.floquet_margin),
            origin_tol: a.origin_tol.unwrap_or(defaults.origin_tol),
            epsilons: a.epsilons.clone().unwrap_or(defaults.epsilons),
            tikhonov_horizon: a.tikhonov_horizon.unwrap_or(defaults.tikhonov_horizon),
            ub_radius: a.ub_radius.unwrap_or(defaults.ub_radius),
            ub_count: a.ub_count.unwrap_or(defaults.ub_count),
            ub_horizon: a.ub_horizon.unwrap_or(defaults.ub_horizon),
        };
        if !(analysis.transient_fraction >= 0.0 && analysis.transient_fraction < 1.0) {
            violations.push(format!(
                "analysis.transient_fraction must be in [0, 1), got {}",
                analysis.transient_fraction
            ));
        }

        if !violations.is_empty() {
            return Err(Error::InvalidInput(violations));
        }
        let graph = graph.expect("graph violations already reported");

        let scenario = raw.scenario.map(|s| ScenarioSpec {
            kind: s.kind,
            check_sigmas: s.check_sigmas,
            thresholds: s.thresholds,
        });

        Ok(ExperimentConfig {
            graph,
            node_specs,
            nodes,
            sigmas,
            solver,
            ic,
            analysis,
            scenario,
        })
    }

    pub fn node_dim(&self) -> usize {
        self.nodes.first().map_or(0, |n| n.dim())
    }

    /// Assembles the network at the given coupling strength.
    pub fn build_system(&self, sigma: f64) -> Result<NetworkSystem> {
        NetworkSystem::new(self.nodes.clone(), self.graph.clone(), sigma)
    }

    /// Stacked initial conditions; the seed feeds the random-ball case.
    pub fn initial_conditions(&self, seed: u64) -> Vec<DVector<f64>> {
        match &self.ic {
            IcSpec::Explicit(states) => states.clone(),
            IcSpec::RandomBall { radius, count } => {
                let dim = self.node_dim() * self.graph.node_count();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..*count)
                    .map(|_| random_ball(&mut rng, dim, *radius))
                    .collect()
            }
        }
    }

    /// Hopf parameters per node when every node is a Hopf oscillator.
    pub fn hopf_params(&self) -> Option<Vec<HopfParams>> {
        self.node_specs
            .iter()
            .map(|s| match s {
                NodeSpec::Hopf(p) => Some(*p),
                _ => None,
            })
            .collect()
    }
}

fn build_graph(raw: &RawGraph, violations: &mut Vec<String>) -> Option<WeightedDigraph> {
    let result = match (&raw.edges, &raw.matrix) {
        (Some(edges), None) => WeightedDigraph::from_edges(raw.n, edges),
        (None, Some(rows)) => {
            if rows.len() != raw.n || rows.iter().any(|r| r.len() != raw.n) {
                Err(Error::invalid(format!(
                    "graph.matrix must be {n} x {n}",
                    n = raw.n
                )))
            } else {
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                WeightedDigraph::from_rows(raw.n, &flat)
            }
        }
        (Some(_), Some(_)) => Err(Error::invalid(
            "give either graph.edges or graph.matrix, not both",
        )),
        (None, None) => Err(Error::invalid(
            "graph needs an `edges` list or a `matrix` block",
        )),
    };
    match result {
        Ok(g) => Some(g),
        Err(Error::InvalidInput(msgs)) => {
            violations.extend(msgs);
            None
        }
        Err(e) => {
            violations.push(e.to_string());
            None
        }
    }
}

type NodeBuild = std::result::Result<(NodeSpec, Arc<dyn VectorField>), Vec<String>>;

fn build_node(idx: usize, raw: &RawNode) -> NodeBuild {
    match raw.model.as_str() {
        "hopf" => {
            let mut msgs = Vec::new();
            if let Some(nu) = raw.nu {
                if nu != [1.0, 0.0] {
                    msgs.push(format!(
                        "node block {idx}: hopf oscillators with nu != 1 are not supported \
                         (got nu = {} + {}i); only the nu = 1 normal form is implemented",
                        nu[0], nu[1]
                    ));
                }
            }
            let mu = match raw.mu {
                Some(m) => m,
                None => {
                    msgs.push(format!(
                        "node block {idx}: hopf model needs `mu = [mu_r, mu_i]`"
                    ));
                    [0.0, 0.0]
                }
            };
            if !msgs.is_empty() {
                return Err(msgs);
            }
            let params =
                HopfParams::new(mu[0], mu[1]).map_err(|e| vec![format!("node block {idx}: {e}")])?;
            Ok((NodeSpec::Hopf(params), Arc::new(hopf_field(params))))
        }
        "polynomial" => {
            let dim = raw
                .dim
                .ok_or_else(|| vec![format!("node block {idx}: polynomial model needs `dim`")])?;
            let terms = raw
                .terms
                .as_ref()
                .ok_or_else(|| vec![format!("node block {idx}: polynomial model needs `terms`")])?;
            let terms: Vec<MonomialTerm> = terms
                .iter()
                .map(|t| MonomialTerm {
                    out: t.out,
                    coef: t.coef,
                    powers: t.powers.clone(),
                })
                .collect();
            let field = PolynomialField::new(dim, terms)
                .map_err(|e| vec![format!("node block {idx}: {e}")])?;
            Ok((NodeSpec::Polynomial { dim }, Arc::new(field)))
        }
        other => Err(vec![format!(
            "node block {idx}: unknown model `{other}` (expected `hopf` or `polynomial`)"
        )]),
    }
}

fn build_ic(raw: &RawIc, node_dim: usize, n: usize, violations: &mut Vec<String>) -> IcSpec {
    match (&raw.states, &raw.random_ball) {
        (Some(states), None) => {
            if states.len() != n {
                violations.push(format!(
                    "ic.states has {} node entries, expected {n}",
                    states.len()
                ));
            }
            for (i, s) in states.iter().enumerate() {
                if s.len() != node_dim {
                    violations.push(format!(
                        "ic.states[{i}] has {} components, expected {node_dim}",
                        s.len()
                    ));
                }
            }
            let total: usize = states.iter().map(|s| s.len()).sum();
            let stacked = DVector::from_iterator(total, states.iter().flatten().copied());
            IcSpec::Explicit(vec![stacked])
        }
        (None, Some(ball)) => {
            if !ball.radius.is_finite() || ball.radius < 0.0 {
                violations.push(format!(
                    "ic.random_ball.radius must be >= 0, got {}",
                    ball.radius
                ));
            }
            if ball.count == 0 {
                violations.push("ic.random_ball.count must be >= 1".into());
            }
            IcSpec::RandomBall {
                radius: ball.radius,
                count: ball.count,
            }
        }
        (Some(_), Some(_)) => {
            violations.push("give either ic.states or ic.random_ball, not both".into());
            IcSpec::Explicit(vec![])
        }
        (None, None) => {
            violations.push("ic needs `states` or `random_ball`".into());
            IcSpec::Explicit(vec![])
        }
    }
}
