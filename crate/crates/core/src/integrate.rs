//! Deterministic ODE integration with dense trajectory output,
//! hyperplane-crossing events, and variational (monodromy) runs.
//!
//! Two explicit steppers: classic fixed-step RK4 and adaptive
//! Dormand-Prince 5(4) with the standard error controller. Dense output
//! between accepted steps is cubic Hermite, used for event refinement
//! and for sampling at caller-chosen times. Everything here is a pure
//! function of its inputs: identical inputs give bit-identical output.
//!
//! Both steppers are explicit, so the synchronization-error modes cap
//! the usable coupling strength: steps shrink like `1 / (sigma
//! |lambda_2|)` once the fast layer dominates. Gains up to a few
//! hundred stay cheap at desk scale; far beyond that an implicit
//! method would be needed, which is out of scope here.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::models::VectorField;

/// Stepper choice and its parameters.
#[derive(Debug, Clone, Copy)]
pub enum Method {
    /// Classic fourth-order Runge-Kutta with fixed step `h`.
    Rk4 { h: f64 },
    /// Dormand-Prince 5(4) with relative/absolute tolerances.
    Dopri45 { rtol: f64, atol: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub method: Method,
    pub t_end: f64,
    pub max_steps: usize,
    /// Abort with `Diverged` once the state norm exceeds this bound.
    pub divergence_bound: f64,
}

impl SolverConfig {
    pub fn dopri(t_end: f64) -> Self {
        SolverConfig {
            method: Method::Dopri45 { rtol: 1e-9, atol: 1e-11 },
            t_end,
            max_steps: 50_000_000,
            divergence_bound: 1e6,
        }
    }

    pub fn rk4(t_end: f64, h: f64) -> Self {
        SolverConfig {
            method: Method::Rk4 { h },
            t_end,
            max_steps: 50_000_000,
            divergence_bound: 1e6,
        }
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    fn validate(&self, dim_ok: bool) -> Result<()> {
        let mut violations = Vec::new();
        match self.method {
            Method::Rk4 { h } => {
                if !h.is_finite() || h <= 0.0 {
                    violations.push(format!("rk4 step must be > 0, got {h}"));
                }
            }
            Method::Dopri45 { rtol, atol } => {
                if !(rtol.is_finite() && atol.is_finite()) || rtol <= 0.0 || atol <= 0.0 {
                    violations.push(format!(
                        "tolerances must be > 0, got rtol = {rtol}, atol = {atol}"
                    ));
                }
            }
        }
        if !self.t_end.is_finite() || self.t_end <= 0.0 {
            violations.push(format!("t_end must be > 0, got {}", self.t_end));
        }
        if !self.divergence_bound.is_finite() || self.divergence_bound <= 0.0 {
            violations.push(format!(
                "divergence bound must be > 0, got {}",
                self.divergence_bound
            ));
        }
        if !dim_ok {
            violations.push("field dimension does not match the initial state".into());
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(violations))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryStatus {
    Completed,
    Diverged,
    StepLimit,
}

/// Time-stamped states, one row per accepted step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn last_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }
}

/// Oriented hyperplane through `point` with unit `normal`.
#[derive(Debug, Clone)]
pub struct Section {
    pub point: DVector<f64>,
    pub normal: DVector<f64>,
}

impl Section {
    pub fn new(point: DVector<f64>, normal: DVector<f64>) -> Result<Self> {
        let norm = normal.norm();
        if !norm.is_finite() || norm <= 1e-12 {
            return Err(Error::invalid("section normal must be nonzero"));
        }
        Ok(Self { point, normal: normal / norm })
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        (x - &self.point).dot(&self.normal)
    }
}

/// A positive-direction crossing of a section.
#[derive(Debug, Clone)]
pub struct CrossingEvent {
    pub t_cross: f64,
    pub state_cross: DVector<f64>,
    /// Sign of the normal velocity at the crossing; always +1 here since
    /// only positive-direction crossings are recorded.
    pub direction: i8,
}

struct StepRecord {
    t0: f64,
    t1: f64,
    y0: DVector<f64>,
    y1: DVector<f64>,
    f0: DVector<f64>,
    f1: DVector<f64>,
}

impl StepRecord {
    /// Cubic Hermite interpolant on [t0, t1].
    fn interpolate(&self, t: f64) -> DVector<f64> {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        &self.y0 * h00 + &self.f0 * (h10 * h) + &self.y1 * h01 + &self.f1 * (h11 * h)
    }
}

/// Integrates `dx/dt = field(x)` from `x0` over `[0, cfg.t_end]`.
///
/// Divergence and step-limit aborts are reported in the trajectory
/// status rather than as errors.
pub fn integrate(field: &dyn VectorField, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<Trajectory> {
    drive(field, x0, cfg, |_| {})
}

/// As `integrate`, also recording positive-direction crossings of
/// `section`, with crossing times refined on the dense interpolant.
pub fn integrate_with_section(
    field: &dyn VectorField,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
    section: &Section,
) -> Result<(Trajectory, Vec<CrossingEvent>)> {
    if section.point.len() != x0.len() {
        return Err(Error::invalid("section dimension does not match state"));
    }
    let mut events = Vec::new();
    let traj = drive(field, x0, cfg, |step| {
        let s0 = section.value(&step.y0);
        let s1 = section.value(&step.y1);
        if s0 < 0.0 && s1 >= 0.0 {
            let (t, state) = refine_crossing(step, section);
            events.push(CrossingEvent { t_cross: t, state_cross: state, direction: 1 });
        }
    })?;
    Ok((traj, events))
}

/// Integrates and returns states interpolated at the given increasing
/// times (all within `[0, cfg.t_end]`). Fails on divergence or step
/// limit since callers need the complete grid.
pub fn integrate_sampled(
    field: &dyn VectorField,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
    times: &[f64],
) -> Result<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(times.len());
    let mut next = 0usize;
    while next < times.len() && times[next] <= 0.0 {
        out.push(x0.clone());
        next += 1;
    }
    let sampled = std::cell::RefCell::new((out, next));
    let traj = drive(field, x0, cfg, |step| {
        let (out, next) = &mut *sampled.borrow_mut();
        while *next < times.len() && times[*next] <= step.t1 {
            out.push(step.interpolate(times[*next]));
            *next += 1;
        }
    })?;
    if !traj.completed() {
        return Err(Error::Numerical(format!(
            "sampled integration aborted with {:?} at t = {:.6}",
            traj.status,
            traj.last_time()
        )));
    }
    let (mut out, next) = sampled.into_inner();
    if next < times.len() {
        return Err(Error::invalid(
            "sample times must lie within [0, t_end]".to_string(),
        ));
    }
    // Tail samples exactly at t_end may be missed by interpolation
    // windows; they equal the final state.
    while out.len() < times.len() {
        out.push(traj.last_state().clone());
    }
    Ok(out)
}

/// Monodromy matrix of a periodic orbit: co-integrates the base state
/// and the variational system `dX/dt = J(x(t)) X` from `X(0) = I` over
/// one period and returns `X(period)`. The base state is co-stepped so
/// `J` is always evaluated on the exact integrated orbit.
pub fn monodromy(
    field: &dyn VectorField,
    orbit_start: &DVector<f64>,
    period: f64,
    cfg: &SolverConfig,
) -> Result<DMatrix<f64>> {
    let d = field.dim();
    let var = VariationalSystem { field, d };
    let mut y0 = DVector::zeros(d + d * d);
    y0.rows_mut(0, d).copy_from(orbit_start);
    for i in 0..d {
        y0[d + i * d + i] = 1.0; // X(0) = I, column-major
    }
    let mut vcfg = *cfg;
    vcfg.t_end = period;
    // The variational factors can legitimately dwarf the state norm.
    vcfg.divergence_bound = cfg.divergence_bound.max(1e12);
    let traj = integrate(&var, &y0, &vcfg)?;
    if !traj.completed() {
        return Err(Error::Numerical(format!(
            "variational integration aborted with {:?}",
            traj.status
        )));
    }
    let yf = traj.last_state();
    let mut x = DMatrix::zeros(d, d);
    for c in 0..d {
        for r in 0..d {
            x[(r, c)] = yf[d + c * d + r];
        }
    }
    Ok(x)
}

struct VariationalSystem<'a> {
    field: &'a dyn VectorField,
    d: usize,
}

impl VectorField for VariationalSystem<'_> {
    fn dim(&self) -> usize {
        self.d + self.d * self.d
    }

    fn eval_into(&self, state: &[f64], out: &mut [f64]) {
        let d = self.d;
        self.field.eval_into(&state[..d], &mut out[..d]);
        let jac = self.field.jacobian(&state[..d]);
        for c in 0..d {
            let col = &state[d + c * d..d + (c + 1) * d];
            for r in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += jac[(r, k)] * col[k];
                }
                out[d + c * d + r] = acc;
            }
        }
    }
}

/// Core stepping loop; `on_step` sees every accepted step for event
/// detection and dense sampling.
fn drive(
    field: &dyn VectorField,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
    mut on_step: impl FnMut(&StepRecord),
) -> Result<Trajectory> {
    cfg.validate(field.dim() == x0.len())?;

    let mut times = vec![0.0];
    let mut states = vec![x0.clone()];
    if x0.norm() > cfg.divergence_bound {
        return Ok(Trajectory { times, states, status: TrajectoryStatus::Diverged });
    }

    let mut t = 0.0;
    let mut y = x0.clone();
    let mut f = field.eval(y.as_slice());
    let mut h = initial_step(cfg, &y, &f);
    let mut steps = 0usize;
    let mut status = TrajectoryStatus::Completed;

    while t < cfg.t_end {
        if steps >= cfg.max_steps {
            status = TrajectoryStatus::StepLimit;
            break;
        }
        steps += 1;
        let h_try = h.min(cfg.t_end - t);
        if h_try <= 0.0 || t + h_try == t {
            // Remaining gap is below time resolution: done.
            break;
        }

        let (y_new, f_new, h_done, h_next, accepted) = match cfg.method {
            Method::Rk4 { .. } => {
                let (y_new, f_new) = rk4_step(field, &y, &f, h_try);
                (y_new, f_new, h_try, h, true)
            }
            Method::Dopri45 { rtol, atol } => {
                let (y_new, f_new, err) = dopri_step(field, &y, &f, h_try, rtol, atol);
                let err = err.max(1e-30);
                let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                if err <= 1.0 {
                    (y_new, f_new, h_try, h_try * factor, true)
                } else {
                    (y_new, f_new, h_try, h_try * factor, false)
                }
            }
        };
        h = h_next;
        if !accepted {
            continue;
        }

        let record = StepRecord {
            t0: t,
            t1: t + h_done,
            y0: y,
            y1: y_new,
            f0: f,
            f1: f_new,
        };
        on_step(&record);

        t = record.t1;
        y = record.y1;
        f = record.f1;
        times.push(t);
        states.push(y.clone());

        if !y.iter().all(|v| v.is_finite()) || y.norm() > cfg.divergence_bound {
            status = TrajectoryStatus::Diverged;
            break;
        }
    }

    Ok(Trajectory { times, states, status })
}

fn initial_step(cfg: &SolverConfig, y: &DVector<f64>, f: &DVector<f64>) -> f64 {
    match cfg.method {
        Method::Rk4 { h } => h,
        Method::Dopri45 { .. } => {
            let scale = (1.0 + y.norm()) / (1.0 + f.norm());
            (1e-3 * scale).min(cfg.t_end / 10.0).max(1e-10)
        }
    }
}

fn rk4_step(
    field: &dyn VectorField,
    y: &DVector<f64>,
    f0: &DVector<f64>,
    h: f64,
) -> (DVector<f64>, DVector<f64>) {
    let k1 = f0;
    let k2 = field.eval((y + k1 * (h / 2.0)).as_slice());
    let k3 = field.eval((y + &k2 * (h / 2.0)).as_slice());
    let k4 = field.eval((y + &k3 * h).as_slice());
    let y_new = y + (k1 + &k2 * 2.0 + &k3 * 2.0 + &k4) * (h / 6.0);
    let f_new = field.eval(y_new.as_slice());
    (y_new, f_new)
}

// Dormand-Prince 5(4) coefficients (Dormand & Prince 1980).
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand-Prince step; returns the new state, its derivative
/// (FSAL stage), and the scaled error-norm estimate.
fn dopri_step(
    field: &dyn VectorField,
    y: &DVector<f64>,
    f0: &DVector<f64>,
    h: f64,
    rtol: f64,
    atol: f64,
) -> (DVector<f64>, DVector<f64>, f64) {
    let d = y.len();
    let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
    k.push(f0.clone());
    for s in 1..7 {
        let mut ys = y.clone();
        for (j, kj) in k.iter().enumerate() {
            let a = A[s][j];
            if a != 0.0 {
                ys.axpy(h * a, kj, 1.0);
            }
        }
        let _ = C[s];
        k.push(field.eval(ys.as_slice()));
    }
    // Stage 7 is evaluated at the 5th-order solution (FSAL).
    let mut y_new = y.clone();
    for (j, kj) in k.iter().enumerate() {
        if B5[j] != 0.0 {
            y_new.axpy(h * B5[j], kj, 1.0);
        }
    }
    let f_new = k[6].clone();

    let mut err_acc = 0.0;
    for i in 0..d {
        let mut e = 0.0;
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                e += E[j] * kj[i];
            }
        }
        e *= h;
        let scale = atol + rtol * y[i].abs().max(y_new[i].abs());
        let r = e / scale;
        err_acc += r * r;
    }
    let err = (err_acc / d as f64).sqrt();
    (y_new, f_new, err)
}

/// Bisection on the dense interpolant until the section residual is
/// below 1e-10 (or the bracket is exhausted).
fn refine_crossing(step: &StepRecord, section: &Section) -> (f64, DVector<f64>) {
    let mut lo = step.t0;
    let mut hi = step.t1;
    let mut t_mid = hi;
    let mut state = step.y1.clone();
    for _ in 0..200 {
        t_mid = 0.5 * (lo + hi);
        state = step.interpolate(t_mid);
        let s = section.value(&state);
        if s.abs() < 1e-10 {
            return (t_mid, state);
        }
        if s < 0.0 {
            lo = t_mid;
        } else {
            hi = t_mid;
        }
        if hi - lo < f64::EPSILON * (1.0 + hi.abs()) {
            break;
        }
    }
    (t_mid, state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{hopf_field, HopfParams};
    use approx::assert_relative_eq;

    struct ExpDecay;
    impl VectorField for ExpDecay {
        fn dim(&self) -> usize {
            1
        }
        fn eval_into(&self, state: &[f64], out: &mut [f64]) {
            out[0] = -state[0];
        }
    }

    struct Harmonic;
    impl VectorField for Harmonic {
        fn dim(&self) -> usize {
            2
        }
        fn eval_into(&self, state: &[f64], out: &mut [f64]) {
            out[0] = -state[1];
            out[1] = state[0];
        }
    }

    struct Quadratic;
    impl VectorField for Quadratic {
        fn dim(&self) -> usize {
            1
        }
        fn eval_into(&self, state: &[f64], out: &mut [f64]) {
            out[0] = state[0] * state[0];
        }
    }

    #[test]
    fn dopri_hits_exponential_endpoint() {
        let x0 = DVector::from_column_slice(&[1.0]);
        let traj = integrate(&ExpDecay, &x0, &SolverConfig::dopri(1.0)).unwrap();
        assert!(traj.completed());
        assert_relative_eq!(traj.last_state()[0], (-1.0f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn hopf_settles_on_unit_circle() {
        let field = hopf_field(HopfParams::new(1.0, 1.0).unwrap());
        let x0 = DVector::from_column_slice(&[2.0, 0.0]);
        let traj = integrate(&field, &x0, &SolverConfig::dopri(50.0)).unwrap();
        let r = traj.last_state().norm();
        assert_relative_eq!(r, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn rk4_is_fourth_order() {
        // Halving h cuts the endpoint error ~16x on dx/dt = -x.
        let x0 = DVector::from_column_slice(&[1.0]);
        let exact = (-1.0f64).exp();
        let hs = [0.1, 0.05, 0.025, 0.0125];
        let errors: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let traj = integrate(&ExpDecay, &x0, &SolverConfig::rk4(1.0, h)).unwrap();
                (traj.last_state()[0] - exact).abs()
            })
            .collect();
        // Least-squares slope of log(err) against log(h).
        let slope = log_log_slope(&hs, &errors);
        assert!(
            (slope - 4.0).abs() < 0.2,
            "RK4 convergence order {slope:.3}, expected 4 +- 0.2"
        );
    }

    fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
        let n = lx.len() as f64;
        let mx = lx.iter().sum::<f64>() / n;
        let my = ly.iter().sum::<f64>() / n;
        let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
        num / den
    }

    #[test]
    fn adaptive_and_fixed_agree() {
        let x0 = DVector::from_column_slice(&[1.0, 0.0]);
        let a = integrate(&Harmonic, &x0, &SolverConfig::dopri(10.0)).unwrap();
        let b = integrate(&Harmonic, &x0, &SolverConfig::rk4(10.0, 1e-3)).unwrap();
        let diff = (a.last_state() - b.last_state()).norm();
        assert!(diff <= 10.0 * (1e-9 + 1e-11), "endpoint difference {diff:.3e}");
    }

    #[test]
    fn harmonic_energy_drift_stays_small() {
        // 100 periods at default tolerances.
        let x0 = DVector::from_column_slice(&[1.0, 0.0]);
        let t_end = 100.0 * std::f64::consts::TAU;
        let traj = integrate(&Harmonic, &x0, &SolverConfig::dopri(t_end)).unwrap();
        let energy0 = 0.5;
        let drift = traj
            .states
            .iter()
            .map(|s| (0.5 * (s[0] * s[0] + s[1] * s[1]) - energy0).abs())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-6, "energy drift {drift:.3e}");
    }

    #[test]
    fn divergence_is_reported_in_status() {
        let x0 = DVector::from_column_slice(&[2.0]);
        let mut cfg = SolverConfig::dopri(1.0);
        cfg.divergence_bound = 1e6;
        let traj = integrate(&Quadratic, &x0, &cfg).unwrap();
        assert_eq!(traj.status, TrajectoryStatus::Diverged);
        assert!(traj.last_time() < 1.0);
    }

    #[test]
    fn step_limit_is_reported_in_status() {
        let x0 = DVector::from_column_slice(&[1.0]);
        let mut cfg = SolverConfig::rk4(1.0, 1e-4);
        cfg.max_steps = 5;
        let traj = integrate(&ExpDecay, &x0, &cfg).unwrap();
        assert_eq!(traj.status, TrajectoryStatus::StepLimit);
        assert_eq!(traj.states.len(), 6);
    }

    #[test]
    fn zero_section_normal_is_rejected() {
        let err = Section::new(DVector::zeros(2), DVector::zeros(2)).unwrap_err();
        assert!(matches!(err, crate::error::Error::InvalidInput(_)));
    }

    #[test]
    fn section_crossings_on_circular_motion() {
        // (x, y) rotating counterclockwise from (1, 0); upward crossings
        // of the positive x-axis happen at t = 2 pi k.
        let x0 = DVector::from_column_slice(&[1.0, 0.0]);
        let section = Section::new(
            DVector::from_column_slice(&[1.0, 0.0]),
            DVector::from_column_slice(&[0.0, 1.0]),
        )
        .unwrap();
        let (traj, events) =
            integrate_with_section(&Harmonic, &x0, &SolverConfig::dopri(20.0), &section).unwrap();
        assert!(traj.completed());
        assert_eq!(events.len(), 3);
        for (k, ev) in events.iter().enumerate() {
            let expected = std::f64::consts::TAU * (k + 1) as f64;
            assert_relative_eq!(ev.t_cross, expected, epsilon = 1e-8);
            assert!(section.value(&ev.state_cross).abs() < 1e-9);
            assert_eq!(ev.direction, 1);
        }
    }

    #[test]
    fn hopf_intercrossing_intervals_equal_period() {
        let field = hopf_field(HopfParams::new(1.0, 1.0).unwrap());
        // Start on the limit cycle to skip the transient.
        let x0 = DVector::from_column_slice(&[1.0, 0.0]);
        let section = Section::new(
            DVector::from_column_slice(&[1.0, 0.0]),
            DVector::from_column_slice(&[0.0, 1.0]),
        )
        .unwrap();
        let (_, events) =
            integrate_with_section(&field, &x0, &SolverConfig::dopri(40.0), &section).unwrap();
        assert!(events.len() >= 5);
        for pair in events.windows(2) {
            let dt = pair[1].t_cross - pair[0].t_cross;
            assert_relative_eq!(dt, std::f64::consts::TAU, epsilon = 1e-6);
        }
    }

    #[test]
    fn no_crossings_from_confined_trajectory() {
        let x0 = DVector::from_column_slice(&[1.0]);
        let section = Section::new(
            DVector::from_column_slice(&[5.0]),
            DVector::from_column_slice(&[1.0]),
        )
        .unwrap();
        let (_, events) =
            integrate_with_section(&ExpDecay, &x0, &SolverConfig::dopri(5.0), &section).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn sampled_integration_matches_endpoint() {
        let x0 = DVector::from_column_slice(&[1.0]);
        let times = [0.0, 0.25, 0.5, 0.75, 1.0];
        let samples =
            integrate_sampled(&ExpDecay, &x0, &SolverConfig::dopri(1.0), &times).unwrap();
        assert_eq!(samples.len(), times.len());
        for (t, s) in times.iter().zip(&samples) {
            assert_relative_eq!(s[0], (-t).exp(), epsilon = 1e-7);
        }
    }

    #[test]
    fn monodromy_of_constant_linear_system() {
        // dX/dt = -X over ln 2: multipliers {1/2, 1/2}.
        struct MinusIdentity;
        impl VectorField for MinusIdentity {
            fn dim(&self) -> usize {
                2
            }
            fn eval_into(&self, state: &[f64], out: &mut [f64]) {
                out[0] = -state[0];
                out[1] = -state[1];
            }
            fn jacobian(&self, _state: &[f64]) -> DMatrix<f64> {
                -DMatrix::identity(2, 2)
            }
        }
        let start = DVector::from_column_slice(&[1.0, 0.5]);
        let m = monodromy(
            &MinusIdentity,
            &start,
            std::f64::consts::LN_2,
            &SolverConfig::dopri(1.0),
        )
        .unwrap();
        let eigs = m.complex_eigenvalues();
        for e in eigs.iter() {
            assert_relative_eq!(e.re, 0.5, epsilon = 1e-9);
            assert_relative_eq!(e.im, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn integration_is_deterministic() {
        let field = hopf_field(HopfParams::new(1.0, 1.0).unwrap());
        let x0 = DVector::from_column_slice(&[1.7, -0.3]);
        let a = integrate(&field, &x0, &SolverConfig::dopri(7.0)).unwrap();
        let b = integrate(&field, &x0, &SolverConfig::dopri(7.0)).unwrap();
        assert_eq!(a.times, b.times);
        assert_eq!(a.states, b.states);
    }
}
