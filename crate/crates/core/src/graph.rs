//! Directed weighted graphs, their Laplacians, and the spectral split
//! that powers every coordinate change in the toolkit.
//!
//! The Laplacian of a connected digraph has a simple zero eigenvalue
//! with right eigenvector `1_N` and a non-negative left eigenvector
//! `v_l` normalized so `v_l' * 1 = 1`. The remaining eigenvalues have
//! positive real part and live on an invariant subspace complementary
//! to `span(1_N)`. We compute a real basis `V` of that subspace from a
//! reordered real Schur form, then solve `V_dag` (and `v_l`) from the
//! inverse of `U = [1_N V]`, so that
//!
//! ```text
//! v_l' V = 0,   V_dag V = I,   V V_dag = I - 1 v_l',   L V = V Lambda.
//! ```
//!
//! The basis is not unique; all consumers rely only on the identities.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eig::{
    block_eigenvalues, diagonal_blocks, eigenvalues_robust, quasi_triangular_eigenvalues,
    schur_robust, sort_complex,
};
use crate::error::{Error, Result};

/// Directed interconnection weights. Entry `(i, j)` is `l_ij`: the
/// weight with which node `i` listens to node `j`.
#[derive(Debug, Clone)]
pub struct WeightedDigraph {
    weights: DMatrix<f64>,
}

impl WeightedDigraph {
    /// Validates non-negativity, zero diagonal, and `N >= 2`. All
    /// violations are reported, not just the first.
    pub fn new(weights: DMatrix<f64>) -> Result<Self> {
        let mut violations = Vec::new();
        if weights.nrows() != weights.ncols() {
            violations.push(format!(
                "weight matrix must be square, got {}x{}",
                weights.nrows(),
                weights.ncols()
            ));
        }
        let n = weights.nrows();
        if n < 2 {
            violations.push(format!("need at least 2 nodes, got {n}"));
        }
        for i in 0..n {
            for j in 0..weights.ncols() {
                let w = weights[(i, j)];
                if i == j && w != 0.0 {
                    violations.push(format!("diagonal entry ({i},{i}) must be 0, got {w}"));
                } else if !w.is_finite() || w < 0.0 {
                    violations.push(format!("weight ({i},{j}) must be finite and >= 0, got {w}"));
                }
            }
        }
        if violations.is_empty() {
            Ok(Self { weights })
        } else {
            Err(Error::InvalidInput(violations))
        }
    }

    pub fn from_rows(n: usize, rows: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(n, n, rows))
    }

    /// Builds a graph from `(i, j, weight)` triplets, 0-indexed.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut violations = Vec::new();
        let mut weights = DMatrix::zeros(n, n);
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                violations.push(format!("edge ({i},{j}) out of range for n = {n}"));
                continue;
            }
            weights[(i, j)] = w;
        }
        if !violations.is_empty() {
            return Err(Error::InvalidInput(violations));
        }
        Self::new(weights)
    }

    pub fn node_count(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// Relabels nodes by `perm` (node `i` becomes node `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::invalid(format!(
                    "perm must be a permutation of 0..{n}"
                )));
            }
            seen[p] = true;
        }
        if perm.len() != n {
            return Err(Error::invalid(format!(
                "perm has {} entries, expected {n}",
                perm.len()
            )));
        }
        let mut w = DMatrix::zeros(n, n);
        for (i, &pi) in perm.iter().enumerate() {
            for (j, &pj) in perm.iter().enumerate() {
                w[(pi, pj)] = self.weights[(i, j)];
            }
        }
        Self::new(w)
    }
}

/// Row-sum-zero Laplacian of a weighted digraph.
#[derive(Debug, Clone)]
pub struct Laplacian {
    matrix: DMatrix<f64>,
}

impl Laplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Max-abs-row-sum norm, used to scale tolerances.
    pub fn inf_norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// All eigenvalues by a dense nonsymmetric eigensolve, sorted by
    /// (re, im).
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let mut eigs = eigenvalues_robust(&self.matrix)?;
        sort_complex(&mut eigs);
        Ok(eigs)
    }
}

/// `L_ii = sum_j l_ij`, `L_ij = -l_ij` for `i != j`.
pub fn build_laplacian(g: &WeightedDigraph) -> Laplacian {
    let n = g.node_count();
    let w = g.weights();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut degree = 0.0;
        for j in 0..n {
            if i != j {
                m[(i, j)] = -w[(i, j)];
                degree += w[(i, j)];
            }
        }
        m[(i, i)] = degree;
    }
    Laplacian { matrix: m }
}

/// True iff the digraph contains a rooted spanning tree: some node
/// reaches all others along directed edges, where edge `j -> i` exists
/// iff `l_ij > 0`. Cross-checked against the algebraic test (simple
/// zero eigenvalue of `L`); a mismatch is an internal error.
pub fn check_connectivity(g: &WeightedDigraph) -> Result<bool> {
    let combinatorial = has_rooted_spanning_tree(g);

    let lap = build_laplacian(g);
    let tol = zero_tol(&lap);
    let zero_count = lap.eigenvalues()?.iter().filter(|l| l.norm() < tol).count();
    let algebraic = zero_count == 1;

    if combinatorial != algebraic {
        return Err(Error::Inconsistent(format!(
            "rooted-spanning-tree test says connected = {combinatorial}, \
             but the Laplacian has {zero_count} zero eigenvalue(s) within {tol:.3e}"
        )));
    }
    Ok(combinatorial)
}

fn has_rooted_spanning_tree(g: &WeightedDigraph) -> bool {
    let n = g.node_count();
    let w = g.weights();
    // out[j] lists the nodes that listen to j.
    let out: Vec<Vec<usize>> = (0..n)
        .map(|j| (0..n).filter(|&i| w[(i, j)] > 0.0).collect())
        .collect();
    'roots: for root in 0..n {
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        let mut count = 1;
        while let Some(j) = stack.pop() {
            for &i in &out[j] {
                if !seen[i] {
                    seen[i] = true;
                    count += 1;
                    stack.push(i);
                }
            }
        }
        if count == n {
            return true;
        }
        continue 'roots;
    }
    false
}

fn zero_tol(lap: &Laplacian) -> f64 {
    1e-9 * (1.0 + lap.inf_norm())
}

/// Real spectral decomposition of a connected-digraph Laplacian:
/// `L = [1_N V] blkdiag(0, Lambda) [v_l'; V_dag]`.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    /// Left eigenvector of the zero eigenvalue, `v_l' 1 = 1`, entries >= 0.
    pub v_l: DVector<f64>,
    /// `N x (N-1)` basis of the invariant subspace of the nonzero spectrum.
    pub v: DMatrix<f64>,
    /// `(N-1) x N` with `V_dag V = I`, `V_dag 1 = 0`.
    pub v_dag: DMatrix<f64>,
    /// Representation of `L` on `span(V)`: `L V = V Lambda` (quasi-triangular).
    pub lambda: DMatrix<f64>,
    /// Smallest real part among the eigenvalues of `Lambda`.
    pub lambda2_real: f64,
}

impl SpectralSplit {
    pub fn n(&self) -> usize {
        self.v_l.len()
    }

    /// Eigenvalues of `Lambda`, read off its quasi-triangular blocks,
    /// sorted by (re, im).
    pub fn lambda_eigenvalues(&self) -> Vec<Complex64> {
        let mut eigs = quasi_triangular_eigenvalues(&self.lambda);
        sort_complex(&mut eigs);
        eigs
    }

    /// Residuals of the five defining identities, in order:
    /// `v_l' 1 - 1`, `v_l' V`, `V_dag V - I`, `V V_dag - (I - 1 v_l')`,
    /// `L V - V Lambda` (all max-abs).
    pub fn identity_residuals(&self, lap: &Laplacian) -> [f64; 5] {
        let n = self.n();
        let ones = DVector::from_element(n, 1.0);
        let projector = DMatrix::identity(n, n) - &ones * self.v_l.transpose();
        [
            (self.v_l.dot(&ones) - 1.0).abs(),
            (self.v_l.transpose() * &self.v).amax(),
            (&self.v_dag * &self.v - DMatrix::identity(n - 1, n - 1)).amax(),
            (&self.v * &self.v_dag - projector).amax(),
            (lap.matrix() * &self.v - &self.v * &self.lambda).amax(),
        ]
    }

    /// Max residual over the five defining identities; used to
    /// re-validate a cached split against its Laplacian.
    pub fn identity_residual(&self, lap: &Laplacian) -> f64 {
        self.identity_residuals(lap)
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Computes the spectral split of a connected-digraph Laplacian.
///
/// Real Schur form of `L` with the (unique) zero eigenvalue reordered
/// into the trailing 1x1 block; the leading `N-1` Schur vectors span
/// the invariant subspace of the nonzero eigenvalues and become `V`.
/// `v_l` and `V_dag` are the rows of `[1_N V]^{-1}`.
pub fn spectral_split(lap: &Laplacian) -> Result<SpectralSplit> {
    let n = lap.dim();
    let tol = zero_tol(lap);

    let (mut q, mut t) = schur_robust(lap.matrix())?;

    // Locate the zero eigenvalue among the diagonal blocks.
    let blocks = diagonal_blocks(&t);
    let mut zero_blocks = Vec::new();
    for &(start, size) in &blocks {
        match size {
            1 => {
                if t[(start, start)].abs() < tol {
                    zero_blocks.push(start);
                }
            }
            _ => {
                // A 2x2 block carries a complex pair; if both members sit
                // inside the zero tolerance the zero eigenvalue cannot be
                // simple.
                let eigs = block_eigenvalues(&t, start, 2);
                if eigs.iter().all(|l| l.norm() < tol) {
                    return Err(Error::Disconnected(format!(
                        "zero eigenvalue of L has multiplicity >= 2 within {tol:.3e}"
                    )));
                }
            }
        }
    }
    if zero_blocks.len() != 1 {
        return Err(Error::Disconnected(format!(
            "found {} zero eigenvalue(s) of L within {tol:.3e}; expected exactly 1",
            zero_blocks.len()
        )));
    }

    // Swap the zero block rightward until it occupies the trailing slot.
    let mut pos = zero_blocks[0];
    while pos < n - 1 {
        let next_size = if pos + 2 < n && t[(pos + 2, pos + 1)].abs() > sub_diag_tol(lap) {
            2
        } else {
            1
        };
        swap_block_right(&mut t, &mut q, pos, next_size)?;
        pos += next_size;
    }

    let v = q.columns(0, n - 1).into_owned();
    let lambda = t.view((0, 0), (n - 1, n - 1)).into_owned();

    // U = [1_N V]; its inverse stacks v_l' over V_dag.
    let mut u = DMatrix::zeros(n, n);
    u.column_mut(0).fill(1.0);
    u.view_mut((0, 1), (n, n - 1)).copy_from(&v);
    let u_inv = u
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Inconsistent("[1_N V] is singular".into()))?;

    let mut v_l = u_inv.row(0).transpose();
    let v_dag = u_inv.rows(1, n - 1).into_owned();

    // Round-off can leave tiny negative entries; clamp and renormalize.
    for x in v_l.iter_mut() {
        if *x < 0.0 && *x > -1e-12 {
            *x = 0.0;
        }
    }
    let s: f64 = v_l.iter().sum();
    v_l /= s;

    let eigs = quasi_triangular_eigenvalues(&lambda);
    let lambda2_real = eigs.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
    if lambda2_real <= 0.0 {
        return Err(Error::Disconnected(format!(
            "Lambda has an eigenvalue with real part {lambda2_real:.3e} <= 0"
        )));
    }

    Ok(SpectralSplit {
        v_l,
        v,
        v_dag,
        lambda,
        lambda2_real,
    })
}

fn sub_diag_tol(lap: &Laplacian) -> f64 {
    1e-11 * (1.0 + lap.inf_norm())
}

/// Swaps the 1x1 block at `pos` with the adjacent block of `next_size`
/// directly below it, updating `t` and the accumulated `q` in place.
///
/// Solves the small Sylvester equation `a x - x B = -C`, so that the
/// columns of `[x; I]` span the invariant subspace of `B`; a QR step
/// turns that into an orthogonal similarity.
fn swap_block_right(
    t: &mut DMatrix<f64>,
    q: &mut DMatrix<f64>,
    pos: usize,
    next_size: usize,
) -> Result<()> {
    let m = 1 + next_size;
    let a = t[(pos, pos)];
    let b = t.view((pos + 1, pos + 1), (next_size, next_size)).into_owned();
    let c = t.view((pos, pos + 1), (1, next_size)).into_owned();

    // x (1 x q) from x (aI - B) = -C  <=>  (aI - B)' x' = -C'.
    let lhs = (DMatrix::identity(next_size, next_size) * a - &b).transpose();
    let rhs = -c.transpose();
    let x = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Inconsistent("Sylvester system singular during Schur reorder".into()))?;

    // Z = [x'; I_q], m x q. Orthonormalize and complete to an m x m basis.
    let mut z = DMatrix::zeros(m, next_size);
    for j in 0..next_size {
        z[(0, j)] = x[(j, 0)];
        z[(1 + j, j)] = 1.0;
    }
    let g = orthonormal_completion(&z)?;

    // Local similarity on rows/cols pos .. pos+m.
    let rows = g.transpose() * t.rows(pos, m).into_owned();
    t.rows_mut(pos, m).copy_from(&rows);
    let cols = t.columns(pos, m).into_owned() * &g;
    t.columns_mut(pos, m).copy_from(&cols);
    let qcols = q.columns(pos, m).into_owned() * &g;
    q.columns_mut(pos, m).copy_from(&qcols);

    // The moved 1x1 block's sub-row is zero in exact arithmetic.
    for j in pos..pos + next_size {
        t[(pos + next_size, j)] = 0.0;
    }
    Ok(())
}

/// Gram-Schmidt: orthonormalizes the columns of `z` (m x k, k < m) and
/// appends an orthonormal completion, returning an m x m orthogonal
/// matrix whose leading k columns span `col(z)`.
fn orthonormal_completion(z: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (m, k) = (z.nrows(), z.ncols());
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m);
    for j in 0..k {
        let mut v = z.column(j).into_owned();
        for u in &basis {
            let p = u.dot(&v);
            v -= u * p;
        }
        let norm = v.norm();
        if norm < 1e-14 {
            return Err(Error::Inconsistent(
                "rank-deficient subspace during Schur reorder".into(),
            ));
        }
        basis.push(v / norm);
    }
    // Complete with the best-conditioned standard basis vectors.
    for e in 0..m {
        if basis.len() == m {
            break;
        }
        let mut v = DVector::zeros(m);
        v[e] = 1.0;
        for u in &basis {
            let p = u.dot(&v);
            v -= u * p;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    if basis.len() != m {
        return Err(Error::Inconsistent(
            "failed to complete orthonormal basis during Schur reorder".into(),
        ));
    }
    let mut g = DMatrix::zeros(m, m);
    for (j, u) in basis.iter().enumerate() {
        g.column_mut(j).copy_from(u);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::complex_multiset_distance;
    use crate::sample::random_connected_digraph;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_node_symmetric() -> WeightedDigraph {
        WeightedDigraph::from_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn laplacian_two_node_symmetric() {
        let lap = build_laplacian(&two_node_symmetric());
        assert_eq!(
            lap.matrix(),
            &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
        );
    }

    #[test]
    fn laplacian_empty_graph_is_zero() {
        let g = WeightedDigraph::from_rows(3, &[0.0; 9]).unwrap();
        let lap = build_laplacian(&g);
        assert_eq!(lap.matrix().amax(), 0.0);
    }

    #[test]
    fn laplacian_asymmetric_by_definition() {
        // Direct construction: row sums zero, off-diagonals negated.
        let g = WeightedDigraph::from_rows(2, &[0.0, 3.0, 1.0, 0.0]).unwrap();
        let lap = build_laplacian(&g);
        assert_eq!(
            lap.matrix(),
            &DMatrix::from_row_slice(2, 2, &[3.0, -3.0, -1.0, 1.0])
        );
    }

    #[test]
    fn digraph_rejects_negative_weight_and_nonzero_diagonal() {
        let err = WeightedDigraph::from_rows(2, &[0.5, -1.0, 1.0, 0.0]).unwrap_err();
        match err {
            Error::InvalidInput(v) => {
                assert_eq!(v.len(), 2);
                assert!(v.iter().any(|m| m.contains("(0,0)")));
                assert!(v.iter().any(|m| m.contains("(0,1)")));
            }
            other => panic!("expected InvalidInput, got {other:?}"),
        }
    }

    #[test]
    fn connectivity_directed_chain() {
        // 1 -> 2 -> 3: node 2 listens to 1 (l_21 > 0), node 3 to 2.
        let g = WeightedDigraph::from_edges(3, &[(1, 0, 1.0), (2, 1, 1.0)]).unwrap();
        assert!(check_connectivity(&g).unwrap());
    }

    #[test]
    fn connectivity_two_isolated_pairs() {
        let g =
            WeightedDigraph::from_edges(4, &[(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)])
                .unwrap();
        assert!(!check_connectivity(&g).unwrap());
    }

    #[test]
    fn connectivity_complete_graph() {
        let n = 5;
        let mut w = DMatrix::from_element(n, n, 1.0);
        w.fill_diagonal(0.0);
        let g = WeightedDigraph::new(w).unwrap();
        assert!(check_connectivity(&g).unwrap());
    }

    #[test]
    fn split_two_node_symmetric() {
        let lap = build_laplacian(&two_node_symmetric());
        let split = spectral_split(&lap).unwrap();
        assert_relative_eq!(split.v_l[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(split.v_l[1], 0.5, epsilon = 1e-12);
        let eigs = split.lambda_eigenvalues();
        assert_eq!(eigs.len(), 1);
        // Hand eigencomputation: trace 2 = 0 + lambda_2.
        assert_relative_eq!(eigs[0].re, 2.0, epsilon = 1e-10);
        assert_relative_eq!(eigs[0].im, 0.0, epsilon = 1e-10);
        assert!(split.identity_residual(&lap) < 1e-10);
    }

    #[test]
    fn split_two_node_asymmetric() {
        // v_l' L = 0 solved by hand: v_l = [0.25, 0.75]; trace gives 4.
        let g = WeightedDigraph::from_rows(2, &[0.0, 3.0, 1.0, 0.0]).unwrap();
        let lap = build_laplacian(&g);
        let split = spectral_split(&lap).unwrap();
        assert_relative_eq!(split.v_l[0], 0.25, epsilon = 1e-12);
        assert_relative_eq!(split.v_l[1], 0.75, epsilon = 1e-12);
        let eigs = split.lambda_eigenvalues();
        assert_relative_eq!(eigs[0].re, 4.0, epsilon = 1e-10);
    }

    #[test]
    fn split_directed_ring_of_three() {
        // Circulant eigenvalues 1 - e^{±2 pi i / 3} = 1.5 ± i sqrt(3)/2.
        let g = WeightedDigraph::from_edges(3, &[(1, 0, 1.0), (2, 1, 1.0), (0, 2, 1.0)]).unwrap();
        let lap = build_laplacian(&g);
        let split = spectral_split(&lap).unwrap();
        let eigs = split.lambda_eigenvalues();
        assert_eq!(eigs.len(), 2);
        let s3 = 3.0_f64.sqrt() / 2.0;
        assert_relative_eq!(eigs[0].re, 1.5, epsilon = 1e-9);
        assert_relative_eq!(eigs[0].im, -s3, epsilon = 1e-9);
        assert_relative_eq!(eigs[1].re, 1.5, epsilon = 1e-9);
        assert_relative_eq!(eigs[1].im, s3, epsilon = 1e-9);
        assert!(split.identity_residual(&lap) < 1e-10);
    }

    #[test]
    fn split_rejects_disconnected() {
        let g =
            WeightedDigraph::from_edges(4, &[(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)])
                .unwrap();
        let lap = build_laplacian(&g);
        match spectral_split(&lap) {
            Err(Error::Disconnected(_)) => {}
            other => panic!("expected Disconnected, got {other:?}"),
        }
    }

    #[test]
    fn split_handles_defective_laplacian() {
        // Directed chain: eigenvalue 1 is defective (one Jordan block).
        let g = WeightedDigraph::from_edges(3, &[(1, 0, 1.0), (2, 1, 1.0)]).unwrap();
        let lap = build_laplacian(&g);
        let split = spectral_split(&lap).unwrap();
        assert!(split.identity_residual(&lap) < 1e-10);
        // The root holds all the weight in v_l.
        assert_relative_eq!(split.v_l[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn split_identities_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_connected_digraph(&mut rng, 12);
            let lap = build_laplacian(&g);
            let split = spectral_split(&lap).unwrap();
            assert!(
                split.identity_residual(&lap) < 1e-9,
                "identity residual too large: {:.3e}",
                split.identity_residual(&lap)
            );
            assert!(split.lambda2_real > 0.0);
            assert!(split.v_l.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn eigenvalue_multiset_and_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let g = random_connected_digraph(&mut rng, 9);
            let lap = build_laplacian(&g);
            let split = spectral_split(&lap).unwrap();

            // eig(L) = {0} u eig(Lambda).
            let mut expected = split.lambda_eigenvalues();
            expected.push(Complex64::new(0.0, 0.0));
            let got = lap.eigenvalues().unwrap();
            assert!(
                complex_multiset_distance(&got, &expected) < 1e-8,
                "eigenvalue multiset mismatch"
            );

            // [1 V] blkdiag(0, Lambda) [v_l'; V_dag] = L.
            let n = lap.dim();
            let recon = &split.v * &split.lambda * &split.v_dag;
            assert!(
                (recon - lap.matrix()).amax() < 1e-8,
                "reconstruction failed for n = {n}"
            );
        }
    }

    #[test]
    fn v_l_is_permutation_equivariant() {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let g = random_connected_digraph(&mut rng, 8);
            let n = g.node_count();
            let lap = build_laplacian(&g);
            let split = spectral_split(&lap).unwrap();

            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let gp = g.permuted(&perm).unwrap();
            let split_p = spectral_split(&build_laplacian(&gp)).unwrap();
            for (i, &pi) in perm.iter().enumerate() {
                assert_relative_eq!(split_p.v_l[pi], split.v_l[i], epsilon = 1e-9);
            }
        }
    }
}
