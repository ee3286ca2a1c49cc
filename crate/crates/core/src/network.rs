//! The closed-loop network `dx/dt = F(x) - sigma (L (x) I_n) x`, the
//! coordinate change `x <-> (x_m, e_v)`, and the reduced / averaged /
//! synchronization-error dynamics.
//!
//! States are stacked node-major: node `i` occupies slots
//! `[i n, (i+1) n)`. Bar coordinates stack `x_m` first, then the `e_v`
//! blocks in the column order of `V`. Kronecker products are applied
//! blockwise and never materialized, so a coupling evaluation costs
//! `O(N^2 n)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{build_laplacian, check_connectivity, spectral_split};
use crate::graph::{Laplacian, SpectralSplit, WeightedDigraph};
use crate::models::VectorField;

/// Bar-coordinate state: the averaged component `x_m` (length n), the
/// projected synchronization errors `e_v` (length n(N-1)), and the
/// singular-perturbation parameter `epsilon = 1/sigma`.
#[derive(Debug, Clone)]
pub struct BarState {
    pub x_m: DVector<f64>,
    pub e_v: DVector<f64>,
    pub epsilon: f64,
}

impl BarState {
    /// Concatenates `(x_m, e_v)` into one vector of length nN.
    pub fn stacked(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.x_m.len() + self.e_v.len());
        out.rows_mut(0, self.x_m.len()).copy_from(&self.x_m);
        out.rows_mut(self.x_m.len(), self.e_v.len()).copy_from(&self.e_v);
        out
    }
}

/// A heterogeneous network of `N` equal-dimension nodes diffusively
/// coupled over a directed graph with common gain `sigma`.
#[derive(Clone)]
pub struct NetworkSystem {
    nodes: Arc<Vec<Arc<dyn VectorField>>>,
    graph: WeightedDigraph,
    laplacian: Laplacian,
    split: Arc<SpectralSplit>,
    sigma: f64,
    node_dim: usize,
}

impl std::fmt::Debug for NetworkSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NetworkSystem")
            .field("nodes", &self.nodes.len())
            .field("node_dim", &self.node_dim)
            .field("sigma", &self.sigma)
            .finish()
    }
}

impl NetworkSystem {
    /// Assembles the system, verifying node dimensions, connectivity,
    /// `sigma > 0`, and the cached split's identities.
    pub fn new(
        nodes: Vec<Arc<dyn VectorField>>,
        graph: WeightedDigraph,
        sigma: f64,
    ) -> Result<Self> {
        let mut violations = Vec::new();
        if nodes.is_empty() {
            violations.push("network needs at least one node model".into());
        }
        if nodes.len() != graph.node_count() {
            violations.push(format!(
                "graph has {} nodes but {} models were given",
                graph.node_count(),
                nodes.len()
            ));
        }
        let node_dim = nodes.first().map_or(0, |f| f.dim());
        for (i, f) in nodes.iter().enumerate() {
            if f.dim() != node_dim {
                violations.push(format!(
                    "node {i} has dimension {}, expected {node_dim}",
                    f.dim()
                ));
                continue;
            }
            if let Err(Error::InvalidInput(msgs)) = crate::models::validate_field(f.as_ref()) {
                for msg in msgs {
                    violations.push(format!("node {i}: {msg}"));
                }
            }
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            violations.push(format!("coupling strength sigma must be > 0, got {sigma}"));
        }
        if !violations.is_empty() {
            return Err(Error::InvalidInput(violations));
        }
        if !check_connectivity(&graph)? {
            return Err(Error::Disconnected(
                "the network graph has no rooted spanning tree".into(),
            ));
        }

        let laplacian = build_laplacian(&graph);
        let split = spectral_split(&laplacian)?;
        let residual = split.identity_residual(&laplacian);
        if residual > 1e-8 * (1.0 + laplacian.inf_norm()) {
            return Err(Error::Inconsistent(format!(
                "spectral split residual {residual:.3e} too large at construction"
            )));
        }

        Ok(Self {
            nodes: Arc::new(nodes),
            graph,
            laplacian,
            split: Arc::new(split),
            sigma,
            node_dim,
        })
    }

    /// Same network at a different coupling strength.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be > 0, got {sigma}")));
        }
        let mut out = self.clone();
        out.sigma = sigma;
        Ok(out)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_dim(&self) -> usize {
        self.node_dim
    }

    pub fn state_dim(&self) -> usize {
        self.node_dim * self.nodes.len()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn epsilon(&self) -> f64 {
        1.0 / self.sigma
    }

    pub fn graph(&self) -> &WeightedDigraph {
        &self.graph
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.laplacian
    }

    pub fn split(&self) -> &SpectralSplit {
        &self.split
    }

    pub fn nodes(&self) -> &[Arc<dyn VectorField>] {
        &self.nodes
    }

    /// Closed-loop field `F(x) - sigma (L (x) I_n) x`, blockwise.
    pub fn full_field_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.node_dim;
        let big_n = self.nodes.len();
        debug_assert_eq!(x.len(), n * big_n);
        for (i, node) in self.nodes.iter().enumerate() {
            node.eval_into(&x[i * n..(i + 1) * n], &mut out[i * n..(i + 1) * n]);
        }
        let l = self.laplacian.matrix();
        for i in 0..big_n {
            for j in 0..big_n {
                let lij = l[(i, j)];
                if lij != 0.0 {
                    let c = self.sigma * lij;
                    for k in 0..n {
                        out[i * n + k] -= c * x[j * n + k];
                    }
                }
            }
        }
    }

    pub fn full_field(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.state_dim() {
            return Err(Error::invalid(format!(
                "state has length {}, expected {}",
                x.len(),
                self.state_dim()
            )));
        }
        let mut out = DVector::zeros(x.len());
        self.full_field_into(x.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    /// `x_m = (v_l' (x) I_n) x`, `e_v = (V_dag (x) I_n) x`.
    pub fn to_bar(&self, x: &DVector<f64>) -> Result<BarState> {
        if x.len() != self.state_dim() {
            return Err(Error::invalid(format!(
                "state has length {}, expected {}",
                x.len(),
                self.state_dim()
            )));
        }
        let n = self.node_dim;
        let big_n = self.nodes.len();
        let split = &self.split;

        let mut x_m = DVector::zeros(n);
        for i in 0..big_n {
            let w = split.v_l[i];
            for k in 0..n {
                x_m[k] += w * x[i * n + k];
            }
        }
        let mut e_v = DVector::zeros(n * (big_n - 1));
        for r in 0..big_n - 1 {
            for i in 0..big_n {
                let w = split.v_dag[(r, i)];
                if w != 0.0 {
                    for k in 0..n {
                        e_v[r * n + k] += w * x[i * n + k];
                    }
                }
            }
        }
        Ok(BarState {
            x_m,
            e_v,
            epsilon: self.epsilon(),
        })
    }

    /// `x = (1_N (x) I_n) x_m + (V (x) I_n) e_v`.
    pub fn from_bar(&self, bar: &BarState) -> Result<DVector<f64>> {
        let n = self.node_dim;
        let big_n = self.nodes.len();
        if bar.x_m.len() != n || bar.e_v.len() != n * (big_n - 1) {
            return Err(Error::invalid(format!(
                "bar state has dims ({}, {}), expected ({}, {})",
                bar.x_m.len(),
                bar.e_v.len(),
                n,
                n * (big_n - 1)
            )));
        }
        let split = &self.split;
        let mut x = DVector::zeros(n * big_n);
        for i in 0..big_n {
            for k in 0..n {
                x[i * n + k] = bar.x_m[k];
            }
            for r in 0..big_n - 1 {
                let w = split.v[(i, r)];
                if w != 0.0 {
                    for k in 0..n {
                        x[i * n + k] += w * bar.e_v[r * n + k];
                    }
                }
            }
        }
        Ok(x)
    }

    /// Averaged field `F_m(x_m) = sum_i v_l[i] f_i(x_m)`; independent of
    /// `sigma` by construction.
    pub fn reduced_field_into(&self, x_m: &[f64], out: &mut [f64]) {
        let n = self.node_dim;
        out.fill(0.0);
        let mut buf = vec![0.0; n];
        for (i, node) in self.nodes.iter().enumerate() {
            let w = self.split.v_l[i];
            if w != 0.0 {
                node.eval_into(x_m, &mut buf);
                for k in 0..n {
                    out[k] += w * buf[k];
                }
            }
        }
    }

    pub fn reduced_field(&self, x_m: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.node_dim);
        self.reduced_field_into(x_m.as_slice(), out.as_mut_slice());
        out
    }

    /// Jacobian of the averaged field: `sum_i v_l[i] J_i(x_m)`.
    pub fn reduced_jacobian(&self, x_m: &[f64]) -> DMatrix<f64> {
        let n = self.node_dim;
        let mut jac = DMatrix::zeros(n, n);
        for (i, node) in self.nodes.iter().enumerate() {
            let w = self.split.v_l[i];
            if w != 0.0 {
                jac += node.jacobian(x_m) * w;
            }
        }
        jac
    }

    /// Coupling residuals of the averaged and error dynamics:
    ///
    /// ```text
    /// G_m = (v_l' (x) I)[F(1 (x) x_m + (V (x) I) e_v) - F(1 (x) x_m)]
    /// G_e = (V_dag (x) I) F(1 (x) x_m + (V (x) I) e_v)
    /// ```
    ///
    /// `G_m(x_m, 0) = 0`; both are independent of `sigma`.
    pub fn coupling_residuals(&self, bar: &BarState) -> Result<(DVector<f64>, DVector<f64>)> {
        let n = self.node_dim;
        let big_n = self.nodes.len();
        let x_full = self.from_bar(bar)?;

        // F at the true state and at the synchronized state.
        let mut f_full = vec![0.0; n * big_n];
        let mut f_sync = vec![0.0; n * big_n];
        for (i, node) in self.nodes.iter().enumerate() {
            node.eval_into(&x_full.as_slice()[i * n..(i + 1) * n], &mut f_full[i * n..(i + 1) * n]);
            node.eval_into(bar.x_m.as_slice(), &mut f_sync[i * n..(i + 1) * n]);
        }

        let split = &self.split;
        let mut g_m = DVector::zeros(n);
        for i in 0..big_n {
            let w = split.v_l[i];
            if w != 0.0 {
                for k in 0..n {
                    g_m[k] += w * (f_full[i * n + k] - f_sync[i * n + k]);
                }
            }
        }
        let mut g_e = DVector::zeros(n * (big_n - 1));
        for r in 0..big_n - 1 {
            for i in 0..big_n {
                let w = split.v_dag[(r, i)];
                if w != 0.0 {
                    for k in 0..n {
                        g_e[r * n + k] += w * f_full[i * n + k];
                    }
                }
            }
        }
        Ok((g_m, g_e))
    }

    /// Right-hand side of the two-time-scale form in slow time:
    ///
    /// ```text
    /// dx_m/dt = F_m(x_m) + G_m(x_m, e_v)
    /// de_v/dt = -sigma (Lambda (x) I_n) e_v + G_e(x_m, e_v)
    /// ```
    ///
    /// Algebraically identical to transforming `full_field`; kept as an
    /// independent route for cross-validation and boundary-layer runs.
    pub fn singular_form_rhs(&self, bar: &BarState) -> Result<(DVector<f64>, DVector<f64>)> {
        if !bar.epsilon.is_finite() || bar.epsilon <= 0.0 {
            return Err(Error::invalid(format!(
                "epsilon must be > 0, got {}",
                bar.epsilon
            )));
        }
        let (g_m, g_e) = self.coupling_residuals(bar)?;
        let mut dx_m = self.reduced_field(&bar.x_m);
        dx_m += &g_m;

        let mut de_v = self.apply_lambda_kron(&bar.e_v);
        de_v *= -self.sigma;
        de_v += &g_e;
        Ok((dx_m, de_v))
    }

    /// `(Lambda (x) I_n) e`, blockwise.
    pub fn apply_lambda_kron(&self, e: &DVector<f64>) -> DVector<f64> {
        let n = self.node_dim;
        let m = self.nodes.len() - 1;
        let lam = &self.split.lambda;
        let mut out = DVector::zeros(n * m);
        for r in 0..m {
            for c in 0..m {
                let w = lam[(r, c)];
                if w != 0.0 {
                    for k in 0..n {
                        out[r * n + k] += w * e[c * n + k];
                    }
                }
            }
        }
        out
    }

    /// Linearization of the closed loop at the origin:
    /// `A_sigma = blkdiag(J_i(0)) - sigma (L (x) I_n)`.
    pub fn linearization_at_origin(&self) -> DMatrix<f64> {
        self.linearization_at_origin_with_sigma(self.sigma)
    }

    /// Same matrix at an arbitrary gain (sigma = 0 allowed, giving the
    /// decoupled block diagonal).
    pub fn linearization_at_origin_with_sigma(&self, sigma: f64) -> DMatrix<f64> {
        let n = self.node_dim;
        let big_n = self.nodes.len();
        let zero = vec![0.0; n];
        let mut jac = DMatrix::zeros(n * big_n, n * big_n);
        for (i, node) in self.nodes.iter().enumerate() {
            let block = node.jacobian(&zero);
            jac.view_mut((i * n, i * n), (n, n)).copy_from(&block);
        }
        let l = self.laplacian.matrix();
        for i in 0..big_n {
            for j in 0..big_n {
                let lij = l[(i, j)];
                if lij != 0.0 {
                    let c = sigma * lij;
                    for k in 0..n {
                        jac[(i * n + k, j * n + k)] -= c;
                    }
                }
            }
        }
        jac
    }

    /// Jacobian of the full field at an arbitrary stacked state.
    pub fn full_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.node_dim;
        let big_n = self.nodes.len();
        let mut jac = DMatrix::zeros(n * big_n, n * big_n);
        for (i, node) in self.nodes.iter().enumerate() {
            let block = node.jacobian(&x[i * n..(i + 1) * n]);
            jac.view_mut((i * n, i * n), (n, n)).copy_from(&block);
        }
        let l = self.laplacian.matrix();
        for i in 0..big_n {
            for j in 0..big_n {
                let lij = l[(i, j)];
                if lij != 0.0 {
                    let c = self.sigma * lij;
                    for k in 0..n {
                        jac[(i * n + k, j * n + k)] -= c;
                    }
                }
            }
        }
        jac
    }
}

/// The closed-loop network as an autonomous vector field on R^{nN}.
#[derive(Clone)]
pub struct FullField(pub NetworkSystem);

impl VectorField for FullField {
    fn dim(&self) -> usize {
        self.0.state_dim()
    }

    fn eval_into(&self, state: &[f64], out: &mut [f64]) {
        self.0.full_field_into(state, out);
    }

    fn jacobian(&self, state: &[f64]) -> DMatrix<f64> {
        self.0.full_jacobian(state)
    }
}

/// The reduced-order (emergent) dynamics `dx_m/dt = F_m(x_m)`.
#[derive(Clone)]
pub struct ReducedField(pub NetworkSystem);

impl VectorField for ReducedField {
    fn dim(&self) -> usize {
        self.0.node_dim()
    }

    fn eval_into(&self, state: &[f64], out: &mut [f64]) {
        self.0.reduced_field_into(state, out);
    }

    fn jacobian(&self, state: &[f64]) -> DMatrix<f64> {
        self.0.reduced_jacobian(state)
    }
}

/// Boundary-layer dynamics in stretched time: `y' = -(Lambda (x) I_n) y`.
#[derive(Clone)]
pub struct BoundaryLayerField(pub NetworkSystem);

impl VectorField for BoundaryLayerField {
    fn dim(&self) -> usize {
        self.0.node_dim() * (self.0.node_count() - 1)
    }

    fn eval_into(&self, state: &[f64], out: &mut [f64]) {
        let y = DVector::from_column_slice(state);
        let dy = self.0.apply_lambda_kron(&y);
        for (o, v) in out.iter_mut().zip(dy.iter()) {
            *o = -v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{hopf_field, HopfParams, MonomialTerm, PolynomialField};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn expmu_network(sigma: f64) -> NetworkSystem {
        // Two Hopf nodes with mu = +1 and -1, symmetric unit coupling.
        let nodes: Vec<Arc<dyn VectorField>> = vec![
            Arc::new(hopf_field(HopfParams::new(1.0, 0.0).unwrap())),
            Arc::new(hopf_field(HopfParams::new(-1.0, 0.0).unwrap())),
        ];
        let graph = WeightedDigraph::from_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        NetworkSystem::new(nodes, graph, sigma).unwrap()
    }

    fn ring_hopf_network(mus: &[(f64, f64)], sigma: f64) -> NetworkSystem {
        let nodes: Vec<Arc<dyn VectorField>> = mus
            .iter()
            .map(|&(r, i)| Arc::new(hopf_field(HopfParams::new(r, i).unwrap())) as Arc<dyn VectorField>)
            .collect();
        let n = mus.len();
        let edges: Vec<(usize, usize, f64)> = (0..n).map(|i| ((i + 1) % n, i, 1.0)).collect();
        let graph = WeightedDigraph::from_edges(n, &edges).unwrap();
        NetworkSystem::new(nodes, graph, sigma).unwrap()
    }

    #[test]
    fn full_field_vanishes_at_origin() {
        let sys = expmu_network(1.0);
        let x = DVector::zeros(4);
        let f = sys.full_field(&x).unwrap();
        assert_eq!(f.amax(), 0.0);
    }

    #[test]
    fn full_field_coupling_vanishes_when_synchronized() {
        // Identical states: L 1_N = 0 kills the coupling term.
        let sys = ring_hopf_network(&[(1.0, 0.5), (0.5, 1.0), (1.5, 1.5)], 13.0);
        let c = [0.4, -0.7];
        let x = DVector::from_column_slice(&[c[0], c[1], c[0], c[1], c[0], c[1]]);
        let f = sys.full_field(&x).unwrap();
        for (i, node) in sys.nodes().iter().enumerate() {
            let fi = node.eval(&c);
            assert_relative_eq!(f[2 * i], fi[0], epsilon = 1e-14);
            assert_relative_eq!(f[2 * i + 1], fi[1], epsilon = 1e-14);
        }
    }

    #[test]
    fn full_field_matches_dense_kronecker_oracle() {
        // Hand-stacked value at x = (1,0,0,0), sigma = 1:
        // f_1(1,0) = 0, f_2(0,0) = 0, coupling = -(L (x) I_2) x.
        let sys = expmu_network(1.0);
        let x = DVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0]);
        let f = sys.full_field(&x).unwrap();
        let expected = DVector::from_column_slice(&[-1.0, 0.0, 1.0, 0.0]);
        assert!((f.clone() - &expected).amax() < 1e-14);

        // Dense reference: F(x) - sigma (L (x) I_n) x with an explicit
        // Kronecker matrix.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let lk = sys.laplacian().matrix().kronecker(&DMatrix::identity(2, 2));
        for _ in 0..10 {
            let x = DVector::from_fn(4, |_, _| rng.gen_range(-2.0..2.0));
            let mut f_only = DVector::zeros(4);
            for (i, node) in sys.nodes().iter().enumerate() {
                let fi = node.eval(&x.as_slice()[2 * i..2 * i + 2]);
                f_only.rows_mut(2 * i, 2).copy_from(&fi);
            }
            let dense = f_only - &lk * &x * sys.sigma();
            let fast = sys.full_field(&x).unwrap();
            assert!((dense - fast).amax() < 1e-12);
        }
    }

    #[test]
    fn bar_round_trip_is_identity() {
        let sys = ring_hopf_network(&[(1.0, 0.5), (0.5, 1.0), (1.5, 1.5)], 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = DVector::from_fn(6, |_, _| rng.gen_range(-5.0..5.0));
            let bar = sys.to_bar(&x).unwrap();
            let back = sys.from_bar(&bar).unwrap();
            assert!((back - &x).amax() < 1e-12);
        }
    }

    #[test]
    fn synchronized_states_have_zero_error() {
        let sys = ring_hopf_network(&[(1.0, 0.5), (0.5, 1.0), (1.5, 1.5)], 10.0);
        let c = [1.3, -0.2];
        let x = DVector::from_column_slice(&[c[0], c[1], c[0], c[1], c[0], c[1]]);
        let bar = sys.to_bar(&x).unwrap();
        assert_relative_eq!(bar.x_m[0], c[0], epsilon = 1e-12);
        assert_relative_eq!(bar.x_m[1], c[1], epsilon = 1e-12);
        assert!(bar.e_v.amax() < 1e-12);

        // And back: e_v = 0 reproduces the synchronized stack.
        let back = sys.from_bar(&bar).unwrap();
        assert!((back - &x).amax() < 1e-12);
    }

    #[test]
    fn reduced_field_is_hopf_with_averaged_parameter() {
        let mus = [(1.5, 0.5), (1.0, 1.0), (0.5, 1.5)];
        let sys = ring_hopf_network(&mus, 10.0);
        // Directed unit ring: v_l = 1/3 each, so mu_m = (1, 1).
        let params: Vec<HopfParams> = mus
            .iter()
            .map(|&(r, i)| HopfParams::new(r, i).unwrap())
            .collect();
        let v_l: Vec<f64> = sys.split().v_l.iter().copied().collect();
        let mu_m = crate::models::reduced_hopf_params(&v_l, &params).unwrap();
        assert_relative_eq!(mu_m.mu_r, 1.0, epsilon = 1e-12);
        assert_relative_eq!(mu_m.mu_i, 1.0, epsilon = 1e-12);

        let hopf_m = hopf_field(mu_m);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x_m = DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0));
            let lhs = sys.reduced_field(&x_m);
            let rhs = hopf_m.eval(x_m.as_slice());
            assert!((lhs - rhs).amax() < 1e-12);
        }

        // x_m = 0 maps to 0, and sigma does not enter.
        assert_eq!(sys.reduced_field(&DVector::zeros(2)).amax(), 0.0);
        let sys2 = sys.with_sigma(500.0).unwrap();
        let x_m = DVector::from_column_slice(&[0.3, -0.9]);
        assert_eq!(sys.reduced_field(&x_m), sys2.reduced_field(&x_m));
    }

    #[test]
    fn identical_nodes_make_reduced_field_independent_of_weights() {
        // f_i = f for all i: F_m = f regardless of v_l.
        let mus = [(0.8, 1.2); 3];
        let sys = ring_hopf_network(&mus, 5.0);
        let f = hopf_field(HopfParams::new(0.8, 1.2).unwrap());
        let x_m = DVector::from_column_slice(&[0.7, 0.1]);
        assert!((sys.reduced_field(&x_m) - f.eval(x_m.as_slice())).amax() < 1e-13);
    }

    #[test]
    fn residuals_vanish_on_synchronization_subspace() {
        let sys = ring_hopf_network(&[(1.5, 0.5), (1.0, 1.0), (0.5, 1.5)], 10.0);
        let bar = BarState {
            x_m: DVector::from_column_slice(&[0.8, -0.4]),
            e_v: DVector::zeros(4),
            epsilon: 0.1,
        };
        let (g_m, _) = sys.coupling_residuals(&bar).unwrap();
        assert!(g_m.amax() < 1e-13);
    }

    #[test]
    fn linear_identical_nodes_kill_g_m_entirely() {
        // For f_i(x) = A x, G_m = (v_l' V (x) A) e_v = 0 for all e_v.
        let a = DMatrix::from_row_slice(2, 2, &[-0.3, -1.0, 1.0, -0.3]);
        let nodes: Vec<Arc<dyn VectorField>> = (0..3)
            .map(|_| Arc::new(PolynomialField::linear(&a).unwrap()) as Arc<dyn VectorField>)
            .collect();
        let graph =
            WeightedDigraph::from_edges(3, &[(1, 0, 1.0), (2, 1, 2.0), (0, 2, 0.5)]).unwrap();
        let sys = NetworkSystem::new(nodes, graph, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let bar = BarState {
                x_m: DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0)),
                e_v: DVector::from_fn(4, |_, _| rng.gen_range(-2.0..2.0)),
                epsilon: 0.25,
            };
            let (g_m, _) = sys.coupling_residuals(&bar).unwrap();
            assert!(g_m.amax() < 1e-12, "G_m = {:.3e}", g_m.amax());
        }
    }

    #[test]
    fn bar_dynamics_match_transformed_full_field() {
        // Chain-rule consistency: to_bar(full_field(x)) equals the
        // two-time-scale right-hand side at to_bar(x).
        let sys = ring_hopf_network(&[(1.5, 0.5), (1.0, 1.0), (0.5, 1.5)], 37.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let x = DVector::from_fn(6, |_, _| rng.gen_range(-3.0..3.0));
            let bar = sys.to_bar(&x).unwrap();
            let (dx_m, de_v) = sys.singular_form_rhs(&bar).unwrap();

            let f = sys.full_field(&x).unwrap();
            let dbar = sys.to_bar(&f).unwrap();
            assert!(
                (dx_m - &dbar.x_m).amax() < 1e-9,
                "x_m dynamics mismatch"
            );
            assert!(
                (de_v - &dbar.e_v).amax() < 1e-9,
                "e_v dynamics mismatch"
            );
        }
    }

    #[test]
    fn g_m_is_independent_of_sigma() {
        let sys_a = ring_hopf_network(&[(1.5, 0.5), (1.0, 1.0), (0.5, 1.5)], 10.0);
        let sys_b = sys_a.with_sigma(160.0).unwrap();
        let bar = BarState {
            x_m: DVector::from_column_slice(&[0.5, 0.5]),
            e_v: DVector::from_column_slice(&[0.1, -0.2, 0.3, 0.05]),
            epsilon: 0.1,
        };
        let (gm_a, ge_a) = sys_a.coupling_residuals(&bar).unwrap();
        let (gm_b, ge_b) = sys_b.coupling_residuals(&bar).unwrap();
        // Bit-identical: the residuals never touch sigma.
        assert_eq!(gm_a, gm_b);
        assert_eq!(ge_a, ge_b);
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let nodes: Vec<Arc<dyn VectorField>> = vec![
            Arc::new(hopf_field(HopfParams::new(1.0, 0.0).unwrap())),
            Arc::new(
                PolynomialField::new(
                    1,
                    vec![MonomialTerm { out: 0, coef: -1.0, powers: vec![1] }],
                )
                .unwrap(),
            ),
        ];
        let graph = WeightedDigraph::from_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let err = NetworkSystem::new(nodes, graph, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}
