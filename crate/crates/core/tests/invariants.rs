//! Property tests for the structural invariants that must hold for
//! arbitrary inputs, not just the worked examples.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use syncdyn::graph::{build_laplacian, WeightedDigraph};
use syncdyn::models::{hopf_field, reduced_hopf_params, HopfParams, VectorField};
use syncdyn::network::NetworkSystem;

fn test_network(sigma: f64) -> NetworkSystem {
    let nodes: Vec<Arc<dyn VectorField>> = vec![
        Arc::new(hopf_field(HopfParams::new(1.5, 0.5).unwrap())),
        Arc::new(hopf_field(HopfParams::new(1.0, 1.0).unwrap())),
        Arc::new(hopf_field(HopfParams::new(0.5, 1.5).unwrap())),
    ];
    let graph =
        WeightedDigraph::from_edges(3, &[(1, 0, 1.0), (2, 1, 2.0), (0, 2, 0.5)]).unwrap();
    NetworkSystem::new(nodes, graph, sigma).unwrap()
}

proptest! {
    /// Any non-negative weight matrix with zero diagonal yields a
    /// Laplacian with zero row sums and non-positive off-diagonals.
    #[test]
    fn laplacian_rows_sum_to_zero(weights in proptest::collection::vec(0.0f64..10.0, 16)) {
        let mut w = DMatrix::from_row_slice(4, 4, &weights);
        w.fill_diagonal(0.0);
        let g = WeightedDigraph::new(w).unwrap();
        let lap = build_laplacian(&g);
        let scale = 1.0 + lap.matrix().amax();
        for i in 0..4 {
            let row_sum: f64 = (0..4).map(|j| lap.matrix()[(i, j)]).sum();
            prop_assert!(row_sum.abs() <= 1e-12 * scale);
            prop_assert!(lap.matrix()[(i, i)] >= 0.0);
            for j in 0..4 {
                if i != j {
                    prop_assert!(lap.matrix()[(i, j)] <= 0.0);
                }
            }
        }
    }

    /// Bar-coordinate transform round-trips arbitrary stacked states.
    #[test]
    fn bar_transform_round_trips(state in proptest::collection::vec(-10.0f64..10.0, 6)) {
        let sys = test_network(10.0);
        let x = DVector::from_column_slice(&state);
        let bar = sys.to_bar(&x).unwrap();
        let back = sys.from_bar(&bar).unwrap();
        prop_assert!((back - &x).amax() < 1e-10);
    }

    /// The Hopf field commutes with planar rotations.
    #[test]
    fn hopf_field_is_rotation_equivariant(
        x in -3.0f64..3.0,
        y in -3.0f64..3.0,
        theta in 0.0f64..std::f64::consts::TAU,
        mu_r in -2.0f64..2.0,
        mu_i in -2.0f64..2.0,
    ) {
        let f = hopf_field(HopfParams::new(mu_r, mu_i).unwrap());
        let (c, s) = (theta.cos(), theta.sin());
        let rotated = [c * x - s * y, s * x + c * y];
        let f_rot = f.eval(&rotated);
        let f_raw = f.eval(&[x, y]);
        let rot_f = [c * f_raw[0] - s * f_raw[1], s * f_raw[0] + c * f_raw[1]];
        prop_assert!((f_rot[0] - rot_f[0]).abs() < 1e-12);
        prop_assert!((f_rot[1] - rot_f[1]).abs() < 1e-12);
    }

    /// The reduced Hopf parameter is linear in the node parameters.
    #[test]
    fn reduced_params_are_linear(
        ps in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 3),
        qs in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 3),
        a in -2.0f64..2.0,
    ) {
        let v_l = [0.2, 0.3, 0.5];
        let to_params = |xs: &[(f64, f64)]| -> Vec<HopfParams> {
            xs.iter().map(|&(r, i)| HopfParams::new(r, i).unwrap()).collect()
        };
        let p = to_params(&ps);
        let q = to_params(&qs);
        let combo: Vec<HopfParams> = p
            .iter()
            .zip(&q)
            .map(|(x, y)| HopfParams::new(a * x.mu_r + y.mu_r, a * x.mu_i + y.mu_i).unwrap())
            .collect();
        let mp = reduced_hopf_params(&v_l, &p).unwrap();
        let mq = reduced_hopf_params(&v_l, &q).unwrap();
        let mc = reduced_hopf_params(&v_l, &combo).unwrap();
        prop_assert!((mc.mu_r - (a * mp.mu_r + mq.mu_r)).abs() < 1e-12);
        prop_assert!((mc.mu_i - (a * mp.mu_i + mq.mu_i)).abs() < 1e-12);
    }
}
