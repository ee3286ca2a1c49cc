//! Seeded sampling of initial conditions and random test graphs.
//!
//! Every source of randomness in the toolkit flows through an explicit
//! seed so that runs are reproducible.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::graph::WeightedDigraph;

/// Uniform sample from the closed ball of given radius in `dim`
/// dimensions: gaussian direction, radius `R * u^(1/dim)`.
pub fn random_ball(rng: &mut impl Rng, dim: usize, radius: f64) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| standard_normal(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            let u: f64 = rng.gen_range(0.0..1.0);
            let r = radius * u.powf(1.0 / dim as f64);
            return v * (r / norm);
        }
    }
}

/// Box-Muller; avoids pulling a distributions crate for one density.
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Random connected digraph with 2..=max_n nodes: a random spanning
/// tree rooted at node 0 (guaranteeing connectivity) plus a sprinkle of
/// extra directed edges with weights in (0.1, 2).
pub fn random_connected_digraph(rng: &mut impl Rng, max_n: usize) -> WeightedDigraph {
    let n = rng.gen_range(2..=max_n.max(2));
    let mut w = DMatrix::zeros(n, n);
    // Spanning tree: each node i > 0 listens to some earlier node, so the
    // root reaches everyone.
    for i in 1..n {
        let j = rng.gen_range(0..i);
        w[(i, j)] = rng.gen_range(0.1..2.0);
    }
    let extra = rng.gen_range(0..=n * (n - 1) / 2);
    for _ in 0..extra {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            w[(i, j)] = rng.gen_range(0.1..2.0);
        }
    }
    WeightedDigraph::new(w).expect("construction keeps weights valid")
}
