//! Node vector fields: the abstraction each network node implements,
//! the built-in Andronov-Hopf oscillator in real coordinates, and a
//! generic polynomial field for heterogeneity experiments.
//!
//! All registered models must vanish at the origin; that property is
//! load-bearing for the global stability results this toolkit checks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// An autonomous vector field `x -> f(x)` with a Jacobian.
///
/// Implementations must be pure and reentrant; the default Jacobian is
/// a central finite difference with step `1e-6 * (1 + |x|)`.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;

    fn eval_into(&self, state: &[f64], out: &mut [f64]);

    fn eval(&self, state: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        self.eval_into(state, out.as_mut_slice());
        out
    }

    fn jacobian(&self, state: &[f64]) -> DMatrix<f64> {
        finite_difference_jacobian(self, state)
    }

    /// Model introspection hook; built-in models override it so
    /// analyses can recognize them (e.g. the analytic reduced orbit of
    /// an all-Hopf network).
    fn as_any(&self) -> Option<&dyn std::any::Any> {
        None
    }
}

/// Central finite differences with step `h = 1e-6 * (1 + |x|)`.
pub fn finite_difference_jacobian<F: VectorField + ?Sized>(
    field: &F,
    state: &[f64],
) -> DMatrix<f64> {
    let n = field.dim();
    let norm = state.iter().map(|x| x * x).sum::<f64>().sqrt();
    let h = 1e-6 * (1.0 + norm);
    let mut jac = DMatrix::zeros(n, n);
    let mut plus = state.to_vec();
    let mut minus = state.to_vec();
    let mut f_plus = vec![0.0; n];
    let mut f_minus = vec![0.0; n];
    for j in 0..n {
        plus[j] += h;
        minus[j] -= h;
        field.eval_into(&plus, &mut f_plus);
        field.eval_into(&minus, &mut f_minus);
        for i in 0..n {
            jac[(i, j)] = (f_plus[i] - f_minus[i]) / (2.0 * h);
        }
        plus[j] = state[j];
        minus[j] = state[j];
    }
    jac
}

/// Checks the registration contract: `f(0) = 0`, and the declared
/// Jacobian agrees with central finite differences (1e-4 relative) at a
/// handful of fixed probe states in the unit-ish ball.
pub fn validate_field(field: &dyn VectorField) -> Result<()> {
    let mut violations = Vec::new();
    let n = field.dim();
    let zero = vec![0.0; n];
    let f0 = field.eval(&zero);
    if f0.amax() > 1e-12 {
        violations.push(format!(
            "f(0) must be 0 for every registered model, got |f(0)| = {:.3e}",
            f0.amax()
        ));
    }

    // Deterministic probe states; enough to catch a wrong analytic
    // Jacobian without making registration expensive.
    for k in 0..8u32 {
        let state: Vec<f64> = (0..n)
            .map(|j| 1.5 * ((1.3 * k as f64 + 0.7 * j as f64 + 0.41).sin()))
            .collect();
        let declared = field.jacobian(&state);
        let fd = finite_difference_jacobian(field, &state);
        let scale = 1.0 + declared.amax().max(fd.amax());
        let err = (declared - fd).amax() / scale;
        if err > 1e-4 {
            violations.push(format!(
                "declared Jacobian disagrees with finite differences by {err:.3e} \
                 (relative) at probe state {k}"
            ));
            break;
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInput(violations))
    }
}

/// Complex parameter `mu = mu_r + i mu_i` of one Hopf oscillator
/// (the cubic coefficient is fixed to 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfParams {
    pub mu_r: f64,
    pub mu_i: f64,
}

impl HopfParams {
    pub fn new(mu_r: f64, mu_i: f64) -> Result<Self> {
        if !(mu_r.is_finite() && mu_i.is_finite()) {
            return Err(Error::invalid(format!(
                "Hopf parameters must be finite, got mu = {mu_r} + {mu_i}i"
            )));
        }
        Ok(Self { mu_r, mu_i })
    }
}

/// Andronov-Hopf oscillator `dz/dt = -|z|^2 z + mu z` written over the
/// reals with state `(x, y)`:
///
/// ```text
/// dx = -r^2 x + mu_r x - mu_i y
/// dy = -r^2 y + mu_i x + mu_r y,    r^2 = x^2 + y^2.
/// ```
///
/// For `mu_r > 0` every trajectory except the origin tends to the
/// circular limit cycle of radius `sqrt(mu_r)` and period `2 pi / mu_i`.
#[derive(Debug, Clone)]
pub struct HopfOscillator {
    pub params: HopfParams,
}

pub fn hopf_field(params: HopfParams) -> HopfOscillator {
    HopfOscillator { params }
}

impl VectorField for HopfOscillator {
    fn dim(&self) -> usize {
        2
    }

    fn eval_into(&self, state: &[f64], out: &mut [f64]) {
        let (x, y) = (state[0], state[1]);
        let r2 = x * x + y * y;
        let p = self.params;
        out[0] = -r2 * x + p.mu_r * x - p.mu_i * y;
        out[1] = -r2 * y + p.mu_i * x + p.mu_r * y;
    }

    fn jacobian(&self, state: &[f64]) -> DMatrix<f64> {
        let (x, y) = (state[0], state[1]);
        let p = self.params;
        DMatrix::from_row_slice(
            2,
            2,
            &[
                -(3.0 * x * x + y * y) + p.mu_r,
                -2.0 * x * y - p.mu_i,
                -2.0 * x * y + p.mu_i,
                -(x * x + 3.0 * y * y) + p.mu_r,
            ],
        )
    }

    fn as_any(&self) -> Option<&dyn std::any::Any> {
        Some(self)
    }
}

/// One monomial `coef * prod_k x_k^powers[k]` contributing to output
/// coordinate `out`.
#[derive(Debug, Clone)]
pub struct MonomialTerm {
    pub out: usize,
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// User-definable polynomial vector field for heterogeneity experiments
/// beyond the Hopf oscillator. Registration fails unless every term has
/// total degree >= 1, which guarantees `f(0) = 0`.
#[derive(Debug, Clone)]
pub struct PolynomialField {
    dim: usize,
    terms: Vec<MonomialTerm>,
}

impl PolynomialField {
    pub fn new(dim: usize, terms: Vec<MonomialTerm>) -> Result<Self> {
        let mut violations = Vec::new();
        if dim == 0 {
            violations.push("polynomial field dimension must be positive".into());
        }
        for (k, term) in terms.iter().enumerate() {
            if term.out >= dim {
                violations.push(format!(
                    "term {k}: output index {} out of range for dim {dim}",
                    term.out
                ));
            }
            if term.powers.len() != dim {
                violations.push(format!(
                    "term {k}: expected {dim} exponents, got {}",
                    term.powers.len()
                ));
            }
            if term.powers.iter().sum::<u32>() == 0 {
                violations.push(format!(
                    "term {k}: constant term (all exponents zero) violates f(0) = 0"
                ));
            }
            if !term.coef.is_finite() {
                violations.push(format!("term {k}: coefficient must be finite"));
            }
        }
        if violations.is_empty() {
            Ok(Self { dim, terms })
        } else {
            Err(Error::InvalidInput(violations))
        }
    }

    /// Linear field `x -> A x` as a polynomial model.
    pub fn linear(matrix: &DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        let mut terms = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                if matrix[(i, j)] != 0.0 {
                    let mut powers = vec![0u32; dim];
                    powers[j] = 1;
                    terms.push(MonomialTerm {
                        out: i,
                        coef: matrix[(i, j)],
                        powers,
                    });
                }
            }
        }
        Self::new(dim, terms)
    }
}

impl VectorField for PolynomialField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval_into(&self, state: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for term in &self.terms {
            let mut value = term.coef;
            for (k, &p) in term.powers.iter().enumerate() {
                if p > 0 {
                    value *= state[k].powi(p as i32);
                }
            }
            out[term.out] += value;
        }
    }

    fn jacobian(&self, state: &[f64]) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.dim, self.dim);
        for term in &self.terms {
            for (j, &p) in term.powers.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let mut value = term.coef * p as f64 * state[j].powi(p as i32 - 1);
                for (k, &pk) in term.powers.iter().enumerate() {
                    if k != j && pk > 0 {
                        value *= state[k].powi(pk as i32);
                    }
                }
                jac[(term.out, j)] += value;
            }
        }
        jac
    }
}

/// Reduced Hopf parameter `mu_m = sum_j v_l[j] mu_j`: the v_l-weighted
/// average that drives the emergent oscillator.
pub fn reduced_hopf_params(v_l: &[f64], params: &[HopfParams]) -> Result<HopfParams> {
    let mut violations = Vec::new();
    if v_l.len() != params.len() {
        violations.push(format!(
            "v_l has {} entries but {} Hopf parameter sets were given",
            v_l.len(),
            params.len()
        ));
    }
    let weight_sum: f64 = v_l.iter().sum();
    if (weight_sum - 1.0).abs() > 1e-9 {
        violations.push(format!(
            "weights must sum to 1 (left eigenvector normalization), got {weight_sum}"
        ));
    }
    if !violations.is_empty() {
        return Err(Error::InvalidInput(violations));
    }
    let mu_r = v_l.iter().zip(params).map(|(w, p)| w * p.mu_r).sum();
    let mu_i = v_l.iter().zip(params).map(|(w, p)| w * p.mu_i).sum();
    HopfParams::new(mu_r, mu_i)
}

/// Storage-function derivative of one Hopf node along a sampled
/// trajectory, from the closed form
///
/// ```text
/// dV/dt = -|z|^4 + mu_r |z|^2 + Re(conj(z) u),   V = |z|^2 / 2,
/// ```
///
/// evaluated pointwise (no numerical differentiation). Outside the ball
/// of radius `sqrt(max(mu_r, 0))` the unforced margin is negative,
/// which is the semipassivity signature.
pub fn semipassivity_margin(
    params: HopfParams,
    states: &[[f64; 2]],
    inputs: &[[f64; 2]],
) -> Result<Vec<f64>> {
    if states.len() != inputs.len() {
        return Err(Error::GridMismatch(format!(
            "trajectory has {} samples, input series has {}",
            states.len(),
            inputs.len()
        )));
    }
    Ok(states
        .iter()
        .zip(inputs)
        .map(|(z, u)| {
            let r2 = z[0] * z[0] + z[1] * z[1];
            -r2 * r2 + params.mu_r * r2 + z[0] * u[0] + z[1] * u[1]
        })
        .collect())
}
