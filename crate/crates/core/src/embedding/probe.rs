//! Monomial coefficients recovered from point evaluations.

use std::sync::LazyLock;

use nalgebra::{DMatrix, DVector, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::least_squares;

const PROBE_SEED: u64 = 0x5eed_0035;

/// 35 fixed points in `[-1, 1]^5`, read as `(q, q', q'', q''', q'''')`.
pub static PROBE_POINTS: LazyLock<Vec<[f64; 5]>> = LazyLock::new(|| {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    (0..35)
        .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
        .collect()
});

fn fit(rows: Vec<Vec<f64>>, values: Vec<f64>) -> (DVector<f64>, f64) {
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let b = DVector::from_vec(values);
    let (x, r) = least_squares(&m, &b);
    (x, r / b.norm().max(f64::MIN_POSITIVE))
}

/// Coefficients of a linear form in the five jet variables, with the relative fit residual.
pub fn expand_linear(f: impl Fn(&[f64; 5]) -> f64) -> ([f64; 5], f64) {
    let values = PROBE_POINTS.iter().map(&f).collect();
    let rows = PROBE_POINTS.iter().map(|p| p.to_vec()).collect();
    let (x, r) = fit(rows, values);
    (std::array::from_fn(|i| x[i]), r)
}

/// Hessian of a quadratic form in `(q, q', q'', q''')`, with the relative fit residual.
pub fn expand_quadratic(f: impl Fn(&[f64; 4]) -> f64) -> (Matrix4<f64>, f64) {
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (i..4).map(move |j| (i, j))).collect();
    let mut rows = Vec::with_capacity(PROBE_POINTS.len());
    let mut values = Vec::with_capacity(PROBE_POINTS.len());
    for p in PROBE_POINTS.iter() {
        let z = [p[0], p[1], p[2], p[3]];
        rows.push(pairs.iter().map(|&(i, j)| z[i] * z[j]).collect());
        values.push(f(&z));
    }
    let (x, r) = fit(rows, values);
    let mut h = Matrix4::zeros();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if i == j {
            h[(i, i)] = 2.0 * x[k];
        } else {
            h[(i, j)] = x[k];
            h[(j, i)] = x[k];
        }
    }
    (h, r)
}
