//! Stability verifications: limit-cycle detection from return maps,
//! orbital stability via characteristic multipliers, origin
//! linearization and slow-eigenvalue checks, two-time-scale trajectory
//! error bounds, ultimate-bound estimation, behavior classification,
//! and coupling-strength sweeps.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eig::{complex_multiset_distance, eigenvalues_robust, sort_complex};
use crate::integrate::{
    integrate, integrate_sampled, integrate_with_section, monodromy, Section, SolverConfig,
    Trajectory,
};
use crate::models::{reduced_hopf_params, HopfOscillator, VectorField};
use crate::network::{BoundaryLayerField, FullField, NetworkSystem, ReducedField};
use crate::sample::random_ball;

pub const DEFAULT_FLOQUET_MARGIN: f64 = 1e-3;
pub const DEFAULT_ORIGIN_TOL: f64 = 1e-6;

/// Options for return-map based orbit detection.
#[derive(Debug, Clone)]
pub struct OrbitOptions {
    /// Fraction of the trajectory discarded as transient.
    pub transient_fraction: f64,
    /// Number of return-map points that must agree.
    pub return_points: usize,
    /// Pairwise tolerance for those points.
    pub return_tol: f64,
    /// Number of states sampled over one period.
    pub orbit_samples: usize,
    /// Minimum spatial extent of a genuine orbit. A trajectory parked
    /// on an equilibrium still wobbles at integrator noise scale and
    /// can produce a convergent return map; anything this small is
    /// numerically stationary, not periodic.
    pub min_extent: f64,
    /// Linear map from the state space to the plane where the section
    /// is anchored (for network trajectories: the x_m projector).
    /// Identity when absent.
    pub projection: Option<DMatrix<f64>>,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            transient_fraction: 0.5,
            return_points: 8,
            return_tol: 1e-6,
            orbit_samples: 256,
            min_extent: 1e-6,
            projection: None,
        }
    }
}

impl OrbitOptions {
    pub fn with_projection(mut self, projection: DMatrix<f64>) -> Self {
        self.projection = Some(projection);
        self
    }

    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.projection {
            Some(p) => p * x,
            None => x.clone(),
        }
    }
}

/// A detected periodic orbit: period, one period of samples, the
/// section used, the return-map residual, and the mean radius of the
/// projected samples.
#[derive(Debug, Clone)]
pub struct PeriodicOrbitEstimate {
    pub alpha: f64,
    pub samples: Vec<DVector<f64>>,
    pub section: Section,
    /// Max distance between successive return-map points.
    pub residual: f64,
    pub mean_radius: f64,
}

/// Characteristic multipliers of a periodic orbit.
#[derive(Debug, Clone)]
pub struct FloquetResult {
    pub multipliers: Vec<Complex64>,
    /// Index of the multiplier nearest 1 (the flow direction).
    pub trivial_index: usize,
    /// True when all other multipliers have modulus < 1 - margin.
    pub stable: bool,
    pub margin: f64,
}

impl FloquetResult {
    pub fn trivial_multiplier(&self) -> Complex64 {
        self.multipliers[self.trivial_index]
    }

    pub fn nontrivial_moduli(&self) -> Vec<f64> {
        self.multipliers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.trivial_index)
            .map(|(_, m)| m.norm())
            .collect()
    }
}

/// Long-run behavior of one trajectory, with the evidence backing the
/// chosen tag.
#[derive(Debug, Clone)]
pub enum Classification {
    OriginConvergent {
        final_norm: f64,
    },
    Periodic {
        orbit: PeriodicOrbitEstimate,
        floquet: FloquetResult,
    },
    PracticalNeighborhood {
        terminal_bound: f64,
    },
    Diverged {
        t_abort: f64,
    },
}

impl Classification {
    pub fn tag(&self) -> &'static str {
        match self {
            Classification::OriginConvergent { .. } => "origin-convergent",
            Classification::Periodic { .. } => "periodic",
            Classification::PracticalNeighborhood { .. } => "practical-neighborhood",
            Classification::Diverged { .. } => "diverged",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub solver: SolverConfig,
    pub orbit: OrbitOptions,
    pub origin_tol: f64,
    pub floquet_margin: f64,
}

impl ClassifyOptions {
    pub fn new(solver: SolverConfig) -> Self {
        ClassifyOptions {
            solver,
            orbit: OrbitOptions::default(),
            origin_tol: DEFAULT_ORIGIN_TOL,
            floquet_margin: DEFAULT_FLOQUET_MARGIN,
        }
    }
}

/// Per-epsilon sup-norm distances between the full network and its
/// reduced + boundary-layer approximation, with the log-log slope of
/// the x_m error against epsilon.
#[derive(Debug, Clone)]
pub struct TikhonovReport {
    pub epsilons: Vec<f64>,
    pub sup_errors_xm: Vec<f64>,
    pub sup_errors_ev: Vec<f64>,
    pub fitted_slope: f64,
    pub horizon: f64,
}

/// One row of a slow-eigenvalue table.
#[derive(Debug, Clone)]
pub struct SlowEigRow {
    pub sigma: f64,
    /// The n smallest-modulus eigenvalues of A_sigma.
    pub slow: Vec<Complex64>,
    /// Eigenvalues of the reduced Jacobian at the origin.
    pub reference: Vec<Complex64>,
    /// Multiset distance between the two.
    pub distance: f64,
    /// |lambda_{n+1}| / |lambda_n| modulus gap.
    pub gap_ratio: f64,
    /// Set when the slow/fast separation is below 10x.
    pub ambiguous: bool,
}

/// Max terminal norm over a family of seeded runs.
#[derive(Debug, Clone)]
pub struct UltimateBoundReport {
    /// Max over runs of the max state norm over the final 20% of the
    /// horizon.
    pub bound: f64,
    pub terminal_norms: Vec<f64>,
    /// Runs that diverged or hit the step limit (excluded from `bound`).
    pub diverged_runs: Vec<usize>,
}

/// One row of a coupling-strength sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub sigma: f64,
    pub period: Option<f64>,
    /// Hausdorff distance, in bar coordinates, between the detected
    /// orbit and the lifted reduced orbit {x_m in gamma_o, e_v = 0}.
    pub orbit_distance: Option<f64>,
    /// Max |e_v| along the detected orbit.
    pub ev_amplitude: Option<f64>,
    pub classification: Option<Classification>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn sigmas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.sigma).collect()
    }

    pub fn periods(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.period).collect()
    }

    /// |period - target| per row; None when any row lacks an orbit.
    pub fn period_deviations(&self, target: f64) -> Option<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.period.map(|p| (p - target).abs()))
            .collect()
    }

    pub fn orbit_distances(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.orbit_distance).collect()
    }

    pub fn ev_amplitudes(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.ev_amplitude).collect()
    }
}

/// Monotone-trend statistic: every consecutive step is non-increasing
/// up to the multiplicative noise allowance.
pub fn non_increasing_trend(values: &[f64], noise_factor: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] * noise_factor)
}

/// Detects an attracting periodic orbit from a completed trajectory.
///
/// The transient is discarded, a Poincare section is anchored at the
/// point of maximum projected norm with the flow direction as normal,
/// and the trajectory is re-run from there recording positive
/// crossings. The last `return_points` crossings must agree pairwise
/// within `return_tol`; the period is the mean of the last
/// `return_points` inter-crossing intervals, and the samples are
/// re-integrated over exactly one period from the final crossing.
pub fn detect_limit_cycle(
    field: &dyn VectorField,
    traj: &Trajectory,
    opts: &OrbitOptions,
    solver: &SolverConfig,
) -> Result<PeriodicOrbitEstimate> {
    if !traj.completed() {
        return Err(Error::NotPeriodic(format!(
            "trajectory ended with {:?}",
            traj.status
        )));
    }
    let t0 = traj.times[0];
    let t1 = traj.last_time();
    let t_cut = t0 + opts.transient_fraction * (t1 - t0);
    let start_idx = traj
        .times
        .iter()
        .position(|&t| t >= t_cut)
        .unwrap_or(traj.times.len() - 1);
    let post = &traj.states[start_idx..];
    if post.len() < 2 {
        return Err(Error::NotPeriodic("post-transient window is empty".into()));
    }

    let section = match default_section(field, post, opts) {
        Some(s) => s,
        None => return Err(Error::NotPeriodic("flow vanishes at the section anchor".into())),
    };
    let anchor = section.point.clone();

    let collect = solver.with_t_end(t1 - t_cut);
    let (collect_traj, events) = integrate_with_section(field, &anchor, &collect, &section)?;
    if !collect_traj.completed() {
        return Err(Error::NotPeriodic(format!(
            "return-map collection aborted with {:?}",
            collect_traj.status
        )));
    }
    let k = opts.return_points;
    if events.len() < k + 1 {
        return Err(Error::NotPeriodic(format!(
            "only {} section crossings, need {}",
            events.len(),
            k + 1
        )));
    }

    let returns = &events[events.len() - k..];
    let mut residual: f64 = 0.0;
    for pair in returns.windows(2) {
        residual = residual.max((&pair[1].state_cross - &pair[0].state_cross).norm());
    }
    for i in 0..returns.len() {
        for j in i + 1..returns.len() {
            let d = (&returns[j].state_cross - &returns[i].state_cross).norm();
            if d > opts.return_tol {
                return Err(Error::NotPeriodic(format!(
                    "return-map points spread {d:.3e} exceeds tolerance {:.1e}",
                    opts.return_tol
                )));
            }
        }
    }

    let last = &events[events.len() - 1];
    let first_of_window = &events[events.len() - 1 - k];
    let alpha = (last.t_cross - first_of_window.t_cross) / k as f64;

    let m = opts.orbit_samples;
    let times: Vec<f64> = (0..m).map(|j| alpha * j as f64 / m as f64).collect();
    let one_period = solver.with_t_end(alpha);
    let samples = integrate_sampled(field, &last.state_cross, &one_period, &times)?;

    let mut center = DVector::zeros(samples[0].len());
    for s in &samples {
        center += s;
    }
    center /= samples.len() as f64;
    let extent = samples
        .iter()
        .map(|s| (s - &center).norm())
        .fold(0.0, f64::max);
    if extent < opts.min_extent {
        return Err(Error::NotPeriodic(format!(
            "orbit extent {extent:.3e} is below {:.1e}; the trajectory is numerically stationary",
            opts.min_extent
        )));
    }

    let mean_radius =
        samples.iter().map(|s| opts.project(s).norm()).sum::<f64>() / samples.len() as f64;

    Ok(PeriodicOrbitEstimate {
        alpha,
        samples,
        section,
        residual,
        mean_radius,
    })
}

/// Section anchored at the point of maximum projected norm, with the
/// projected flow direction as its (lifted) normal; transversal by
/// construction.
fn default_section(
    field: &dyn VectorField,
    post: &[DVector<f64>],
    opts: &OrbitOptions,
) -> Option<Section> {
    let anchor = post
        .iter()
        .max_by(|a, b| {
            opts.project(a)
                .norm()
                .partial_cmp(&opts.project(b).norm())
                .unwrap()
        })?
        .clone();
    let flow = field.eval(anchor.as_slice());
    let normal = match &opts.projection {
        Some(p) => {
            let pf = p * &flow;
            if pf.norm() < 1e-12 {
                return None;
            }
            p.transpose() * (pf.clone() / pf.norm())
        }
        None => flow,
    };
    if normal.norm() < 1e-12 {
        return None;
    }
    Section::new(anchor, normal).ok()
}

/// Characteristic multipliers of a detected orbit via the monodromy
/// matrix. Errors when no multiplier lies within 1e-2 of 1; the orbit
/// is stable when all non-trivial moduli are below `1 - margin`.
pub fn floquet_classify(
    field: &dyn VectorField,
    orbit: &PeriodicOrbitEstimate,
    solver: &SolverConfig,
    margin: f64,
) -> Result<FloquetResult> {
    let m = monodromy(field, &orbit.samples[0], orbit.alpha, solver)?;
    let multipliers = eigenvalues_robust(&m)?;
    let trivial_index = multipliers
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - 1.0).norm().partial_cmp(&(*b - 1.0).norm()).unwrap()
        })
        .map(|(i, _)| i)
        .expect("monodromy matrix has at least one eigenvalue");
    let trivial_err = (multipliers[trivial_index] - 1.0).norm();
    if trivial_err > 1e-2 {
        return Err(Error::InvalidOrbit(format!(
            "no characteristic multiplier within 1e-2 of 1 (closest: {:.3e} away)",
            trivial_err
        )));
    }
    let stable = multipliers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != trivial_index)
        .all(|(_, m)| m.norm() < 1.0 - margin);
    Ok(FloquetResult {
        multipliers,
        trivial_index,
        stable,
        margin,
    })
}

/// Origin linearization `A_sigma = blkdiag(J_i(0)) - sigma (L (x) I_n)`
/// and its eigenvalues (sorted by (re, im)).
pub fn linearize_origin(sys: &NetworkSystem) -> Result<(DMatrix<f64>, Vec<Complex64>)> {
    let a = sys.linearization_at_origin();
    let mut eigs = eigenvalues_robust(&a)?;
    sort_complex(&mut eigs);
    Ok((a, eigs))
}

/// For each sigma, distance between the n smallest-modulus eigenvalues
/// of `A_sigma` and the eigenvalues of the reduced Jacobian at the
/// origin. The distance shrinks as sigma grows; rows with a slow/fast
/// modulus gap under 10x are flagged ambiguous.
pub fn slow_eigenvalue_check(sys: &NetworkSystem, sigmas: &[f64]) -> Result<Vec<SlowEigRow>> {
    if sigmas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("sigma values must be strictly increasing"));
    }
    let n = sys.node_dim();
    let zero = vec![0.0; n];
    let mut reference = eigenvalues_robust(&sys.reduced_jacobian(&zero))?;
    sort_complex(&mut reference);

    let mut rows = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let a = sys.linearization_at_origin_with_sigma(sigma);
        let mut eigs = eigenvalues_robust(&a)?;
        eigs.sort_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap());
        let slow = eigs[..n].to_vec();
        let gap_ratio = if eigs.len() > n {
            eigs[n].norm() / eigs[n - 1].norm().max(1e-300)
        } else {
            f64::INFINITY
        };
        let distance = complex_multiset_distance(&slow, &reference);
        rows.push(SlowEigRow {
            sigma,
            slow,
            reference: reference.clone(),
            distance,
            gap_ratio,
            ambiguous: gap_ratio < 10.0,
        });
    }
    Ok(rows)
}

/// Integrates (a) the full network at sigma = 1/epsilon, (b) the
/// reduced system from x_m(0), and (c) the boundary layer from e_v(0)
/// in stretched time, and reports sup-norm errors on a shared grid
/// plus the fitted log-log slope of the x_m error against epsilon.
pub fn tikhonov_compare(
    sys: &NetworkSystem,
    x0: &DVector<f64>,
    horizon: f64,
    epsilons: &[f64],
    solver: &SolverConfig,
) -> Result<TikhonovReport> {
    if epsilons.is_empty() || epsilons.iter().any(|&e| !e.is_finite() || e <= 0.0) {
        return Err(Error::invalid("epsilons must be positive and non-empty"));
    }
    let grid_len = 400;
    let times: Vec<f64> = (0..grid_len)
        .map(|i| horizon * i as f64 / (grid_len - 1) as f64)
        .collect();

    let bar0 = sys.to_bar(x0)?;
    let reduced_cfg = solver.with_t_end(horizon);
    let xm_ref = integrate_sampled(&ReducedField(sys.clone()), &bar0.x_m, &reduced_cfg, &times)?;

    let mut sup_errors_xm = Vec::with_capacity(epsilons.len());
    let mut sup_errors_ev = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let sys_eps = sys.with_sigma(1.0 / eps)?;
        let full = integrate_sampled(
            &FullField(sys_eps.clone()),
            x0,
            &solver.with_t_end(horizon),
            &times,
        )?;

        // Boundary layer y' = -(Lambda (x) I) y in stretched time.
        let tau: Vec<f64> = times.iter().map(|t| t / eps).collect();
        let layer_cfg = solver.with_t_end(horizon / eps);
        let layer =
            integrate_sampled(&BoundaryLayerField(sys_eps.clone()), &bar0.e_v, &layer_cfg, &tau)?;

        let mut err_xm: f64 = 0.0;
        let mut err_ev: f64 = 0.0;
        for i in 0..grid_len {
            let bar = sys_eps.to_bar(&full[i])?;
            err_xm = err_xm.max((&bar.x_m - &xm_ref[i]).norm());
            err_ev = err_ev.max((&bar.e_v - &layer[i]).norm());
        }
        sup_errors_xm.push(err_xm);
        sup_errors_ev.push(err_ev);
    }

    let fitted_slope = fit_log_log_slope(epsilons, &sup_errors_xm);
    Ok(TikhonovReport {
        epsilons: epsilons.to_vec(),
        sup_errors_xm,
        sup_errors_ev,
        fitted_slope,
        horizon,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.max(1e-300).ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.max(1e-300).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Max terminal norm (over the final 20% of the horizon) across `count`
/// seeded initial conditions in the ball of the given radius. Diverged
/// runs are excluded and flagged.
pub fn ultimate_bound(
    sys: &NetworkSystem,
    radius: f64,
    count: usize,
    horizon: f64,
    seed: u64,
    solver: &SolverConfig,
) -> Result<UltimateBoundReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = FullField(sys.clone());
    let cfg = solver.with_t_end(horizon);
    let mut terminal_norms = Vec::with_capacity(count);
    let mut diverged_runs = Vec::new();
    for run in 0..count {
        let x0 = random_ball(&mut rng, sys.state_dim(), radius);
        let traj = integrate(&field, &x0, &cfg)?;
        if !traj.completed() {
            diverged_runs.push(run);
            continue;
        }
        let t_tail = 0.8 * horizon;
        let tail_max = traj
            .times
            .iter()
            .zip(&traj.states)
            .filter(|(t, _)| **t >= t_tail)
            .map(|(_, s)| s.norm())
            .fold(0.0, f64::max);
        terminal_norms.push(tail_max);
    }
    let bound = terminal_norms.iter().copied().fold(0.0, f64::max);
    Ok(UltimateBoundReport {
        bound,
        terminal_norms,
        diverged_runs,
    })
}

/// Classifies the long-run behavior of a single run: origin-convergent
/// when the terminal norm is below tolerance, periodic when a stable
/// orbit is detected, practical-neighborhood when merely bounded,
/// diverged otherwise. Total: failures land in a tag, not an error.
pub fn classify(
    sys: &NetworkSystem,
    x0: &DVector<f64>,
    opts: &ClassifyOptions,
) -> Result<Classification> {
    let field = FullField(sys.clone());
    let traj = integrate(&field, x0, &opts.solver)?;
    match traj.status {
        crate::integrate::TrajectoryStatus::Diverged
        | crate::integrate::TrajectoryStatus::StepLimit => {
            return Ok(Classification::Diverged {
                t_abort: traj.last_time(),
            });
        }
        crate::integrate::TrajectoryStatus::Completed => {}
    }
    let final_norm = traj.last_state().norm();
    if final_norm < opts.origin_tol {
        return Ok(Classification::OriginConvergent { final_norm });
    }

    match detect_limit_cycle(&field, &traj, &opts.orbit, &opts.solver) {
        Ok(orbit) => match floquet_classify(&field, &orbit, &opts.solver, opts.floquet_margin) {
            Ok(floquet) if floquet.stable => Ok(Classification::Periodic { orbit, floquet }),
            _ => Ok(Classification::PracticalNeighborhood {
                terminal_bound: tail_bound(&traj),
            }),
        },
        Err(_) => Ok(Classification::PracticalNeighborhood {
            terminal_bound: tail_bound(&traj),
        }),
    }
}

fn tail_bound(traj: &Trajectory) -> f64 {
    let t_tail = traj.times[0] + 0.8 * (traj.last_time() - traj.times[0]);
    traj.times
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t >= t_tail)
        .map(|(_, s)| s.norm())
        .fold(0.0, f64::max)
}

/// Rows of the x_m projector `(v_l' (x) I_n)` as a dense matrix.
pub fn xm_projection(sys: &NetworkSystem) -> DMatrix<f64> {
    let n = sys.node_dim();
    let big_n = sys.node_count();
    let mut p = DMatrix::zeros(n, n * big_n);
    for i in 0..big_n {
        let w = sys.split().v_l[i];
        for k in 0..n {
            p[(k, i * n + k)] = w;
        }
    }
    p
}

/// The lifted reduced orbit Gamma_o = {x_m in gamma_o, e_v = 0} as a
/// point cloud in bar coordinates. Analytic circle for all-Hopf
/// networks; otherwise gamma_o is detected numerically on the reduced
/// system starting from the projection of `x0`.
pub fn reference_orbit_bar(
    sys: &NetworkSystem,
    x0: &DVector<f64>,
    opts: &OrbitOptions,
    solver: &SolverConfig,
) -> Result<Vec<DVector<f64>>> {
    let n = sys.node_dim();
    let total = sys.state_dim();
    let points = opts.orbit_samples;

    if let Some(mu_m) = hopf_reduced_params(sys) {
        if mu_m.mu_r <= 0.0 {
            return Err(Error::NotPeriodic(format!(
                "reduced Hopf parameter mu_mR = {:.4} gives no limit cycle",
                mu_m.mu_r
            )));
        }
        let r = mu_m.mu_r.sqrt();
        return Ok((0..points)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / points as f64;
                let mut p = DVector::zeros(total);
                p[0] = r * th.cos();
                p[1] = r * th.sin();
                p
            })
            .collect());
    }

    // Generic reduced system: detect gamma_o numerically first.
    let bar0 = sys.to_bar(x0)?;
    let reduced = ReducedField(sys.clone());
    let traj = integrate(&reduced, &bar0.x_m, solver)?;
    let mut ropts = opts.clone();
    ropts.projection = None;
    let orbit = detect_limit_cycle(&reduced, &traj, &ropts, solver)?;
    Ok(orbit
        .samples
        .iter()
        .map(|xm| {
            let mut p = DVector::zeros(total);
            p.rows_mut(0, n).copy_from(xm);
            p
        })
        .collect())
}

/// Reduced Hopf parameter when every node is a Hopf oscillator.
pub fn hopf_reduced_params(sys: &NetworkSystem) -> Option<crate::models::HopfParams> {
    let mut params = Vec::with_capacity(sys.node_count());
    for node in sys.nodes() {
        let hopf = node.as_any()?.downcast_ref::<HopfOscillator>()?;
        params.push(hopf.params);
    }
    let v_l: Vec<f64> = sys.split().v_l.iter().copied().collect();
    reduced_hopf_params(&v_l, &params).ok()
}

/// Symmetric Hausdorff distance between two finite point clouds.
pub fn hausdorff_distance(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    let one_way = |xs: &[DVector<f64>], ys: &[DVector<f64>]| {
        xs.iter()
            .map(|x| {
                ys.iter()
                    .map(|y| (x - y).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Max |e_v| along a detected full-network orbit.
pub fn orbit_ev_amplitude(sys: &NetworkSystem, orbit: &PeriodicOrbitEstimate) -> Result<f64> {
    let mut amp: f64 = 0.0;
    for s in &orbit.samples {
        let bar = sys.to_bar(s)?;
        amp = amp.max(bar.e_v.norm());
    }
    Ok(amp)
}

/// Outcome of the statistical almost-global attractivity check.
#[derive(Debug, Clone)]
pub struct AlmostGlobalReport {
    /// Runs whose terminal state landed within `orbit_tol` of the
    /// reference orbit.
    pub converged: Vec<usize>,
    /// Runs that passed within `equilibrium_tol` of the unstable origin
    /// (the measure-zero exception, recorded separately).
    pub near_equilibrium: Vec<usize>,
    /// Runs that did neither.
    pub failed: Vec<usize>,
}

/// Tests almost-global orbital attractivity statistically: `count`
/// seeded initial conditions in the radius ball must all end within
/// `orbit_tol` of the detected orbit, except runs that pass within
/// `equilibrium_tol` of the unstable origin.
#[allow(clippy::too_many_arguments)]
pub fn almost_global_check(
    sys: &NetworkSystem,
    orbit: &PeriodicOrbitEstimate,
    count: usize,
    radius: f64,
    seed: u64,
    solver: &SolverConfig,
    orbit_tol: f64,
    equilibrium_tol: f64,
) -> Result<AlmostGlobalReport> {
    let field = FullField(sys.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AlmostGlobalReport {
        converged: Vec::new(),
        near_equilibrium: Vec::new(),
        failed: Vec::new(),
    };
    for run in 0..count {
        let x0 = random_ball(&mut rng, sys.state_dim(), radius);
        let traj = integrate(&field, &x0, solver)?;
        let min_norm = traj.states.iter().map(|s| s.norm()).fold(f64::INFINITY, f64::min);
        let terminal = traj.last_state();
        let dist_to_orbit = orbit
            .samples
            .iter()
            .map(|s| (terminal - s).norm())
            .fold(f64::INFINITY, f64::min);
        if traj.completed() && dist_to_orbit < orbit_tol {
            report.converged.push(run);
        } else if min_norm < equilibrium_tol {
            report.near_equilibrium.push(run);
        } else {
            report.failed.push(run);
        }
    }
    Ok(report)
}

/// Runs `classify` per coupling strength (in parallel; each point is
/// independent and deterministic) and compares each detected orbit to
/// the lifted reduced orbit. Per-sigma failures are recorded in-row and
/// the sweep continues.
pub fn sweep_sigma(
    sys: &NetworkSystem,
    sigmas: &[f64],
    x0: &DVector<f64>,
    opts: &ClassifyOptions,
) -> Result<SweepReport> {
    if sigmas.is_empty() {
        return Err(Error::invalid("sweep needs at least one sigma"));
    }
    if sigmas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("sigma values must be strictly increasing"));
    }
    let gamma_o = reference_orbit_bar(sys, x0, &opts.orbit, &opts.solver).ok();

    let rows: Vec<SweepRow> = sigmas
        .par_iter()
        .map(|&sigma| {
            let run = || -> Result<SweepRow> {
                let sys_s = sys.with_sigma(sigma)?;
                let mut o = opts.clone();
                o.orbit.projection = Some(xm_projection(&sys_s));
                let classification = classify(&sys_s, x0, &o)?;
                let (period, orbit_distance, ev_amplitude) = match &classification {
                    Classification::Periodic { orbit, .. } => {
                        let bar_points: Result<Vec<DVector<f64>>> = orbit
                            .samples
                            .iter()
                            .map(|s| sys_s.to_bar(s).map(|b| b.stacked()))
                            .collect();
                        let bar_points = bar_points?;
                        let dist = gamma_o.as_ref().map(|g| hausdorff_distance(&bar_points, g));
                        let amp = orbit_ev_amplitude(&sys_s, orbit)?;
                        (Some(orbit.alpha), dist, Some(amp))
                    }
                    _ => (None, None, None),
                };
                Ok(SweepRow {
                    sigma,
                    period,
                    orbit_distance,
                    ev_amplitude,
                    classification: Some(classification),
                    note: None,
                })
            };
            run().unwrap_or_else(|e| SweepRow {
                sigma,
                period: None,
                orbit_distance: None,
                ev_amplitude: None,
                classification: None,
                note: Some(e.to_string()),
            })
        })
        .collect();

    Ok(SweepReport { rows })
}
