//! Dense nonsymmetric eigensolves that cannot hang.
//!
//! The QR iteration behind `nalgebra`'s Schur decomposition can stall
//! forever on realifications of complex matrices (each eigenvalue pair
//! appearing twice), and this toolkit produces such matrices constantly
//! (planar oscillator blocks coupled through a Laplacian). All
//! eigensolves therefore run with a hard iteration cap and, on
//! non-convergence, retry under a deterministic random orthogonal
//! similarity: the spectrum is untouched while the iteration's path is
//! reshuffled out of the trap.

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const RETRIES: usize = 24;

/// Real Schur decomposition `M = Q T Q'` with orthogonal `Q` and
/// quasi-upper-triangular `T`.
pub fn schur_robust(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::invalid(format!(
            "Schur decomposition needs a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let max_iter = 100 * n.max(8);
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, max_iter) {
        let (q, t) = s.unpack();
        return Ok((q, t));
    }
    // Fixed seed: retries are deterministic across runs.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1ab1e);
    for attempt in 0..RETRIES {
        let r = random_orthogonal(&mut rng, n);
        let rotated = r.transpose() * m * &r;
        let budget = max_iter * (2 + attempt);
        if let Some(s) = Schur::try_new(rotated, f64::EPSILON, budget) {
            let (q, t) = s.unpack();
            return Ok((&r * q, t));
        }
    }
    Err(Error::Inconsistent(format!(
        "QR iteration failed to converge on a {n}x{n} matrix after {RETRIES} rotated retries"
    )))
}

/// All eigenvalues of a real square matrix, unsorted.
pub fn eigenvalues_robust(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let (_, t) = schur_robust(m)?;
    Ok(quasi_triangular_eigenvalues(&t))
}

fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    g.qr().q()
}

/// Diagonal block layout of a real quasi-triangular matrix as
/// `(start, size)` pairs.
pub fn diagonal_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let scale = 1.0 + t.amax();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].abs() > 1e-11 * scale {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

pub fn block_eigenvalues(t: &DMatrix<f64>, start: usize, size: usize) -> Vec<Complex64> {
    if size == 1 {
        return vec![Complex64::new(t[(start, start)], 0.0)];
    }
    let a = t[(start, start)];
    let b = t[(start, start + 1)];
    let c = t[(start + 1, start)];
    let d = t[(start + 1, start + 1)];
    let mean = 0.5 * (a + d);
    let disc = 0.25 * (a - d) * (a - d) + b * c;
    if disc >= 0.0 {
        let r = disc.sqrt();
        vec![Complex64::new(mean + r, 0.0), Complex64::new(mean - r, 0.0)]
    } else {
        let r = (-disc).sqrt();
        vec![Complex64::new(mean, r), Complex64::new(mean, -r)]
    }
}

/// Eigenvalues of a real quasi-triangular matrix, block by block.
pub fn quasi_triangular_eigenvalues(t: &DMatrix<f64>) -> Vec<Complex64> {
    diagonal_blocks(t)
        .into_iter()
        .flat_map(|(start, size)| block_eigenvalues(t, start, size))
        .collect()
}

pub fn sort_complex(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

/// Max distance between two complex multisets after sorting by (re, im).
pub fn complex_multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have equal size");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    sort_complex(&mut a);
    sort_complex(&mut b);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
