//! The isometric complex→real maps `x + iy ↦ (x; y)` and
//! `R + iT ↦ [[R, −T], [T, R]]`.

use num_complex::Complex64;

use super::matrix::{ComplexDenseMatrix, ComplexVector, RealMatrix};

pub fn realify_vector(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|c| c.re).chain(z.iter().map(|c| c.im)).collect()
}

/// Inverse of [`realify_vector`]. `x` must have even length.
pub fn complexify_vector(x: &[f64]) -> ComplexVector {
    let n = x.len() / 2;
    (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect()
}

pub fn realify_matrix(b: &ComplexDenseMatrix) -> RealMatrix {
    let (m, n) = b.shape();
    RealMatrix::from_fn(2 * m, 2 * n, |i, j| {
        let z = b[(i % m, j % n)];
        match (i < m, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Orthonormal real basis of the realification of `span(basis)`: each unit
/// complex `z` contributes `real(z)` and `real(iz)`.
pub fn realify_subspace(basis: &[ComplexVector]) -> Vec<Vec<f64>> {
    let i = Complex64::new(0.0, 1.0);
    basis
        .iter()
        .flat_map(|z| {
            let iz: ComplexVector = z.iter().map(|c| c * i).collect();
            [realify_vector(z), realify_vector(&iz)]
        })
        .collect()
}
