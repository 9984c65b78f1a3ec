//! Dense complex eigensolver.
//!
//! Householder reduction to upper Hessenberg form, then a single-shift
//! complex QR iteration (Wilkinson shifts, Givens rotations, deflation on
//! negligible subdiagonals) down to Schur form `A = W T W*`. Eigenvectors
//! come from back-substitution on the triangular factor `T`, with tiny pivots
//! replaced by `ε‖T‖` so defective clusters still yield the vector that
//! minimizes the residual instead of failing.

use num_complex::Complex64;

use super::matrix::{inner, norm2, ComplexDenseMatrix, ComplexVector};
use crate::error::{Error, Result};

const MAX_ITER_PER_EIGENVALUE: usize = 60;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    /// Unit ℓ₂ norm.
    pub vector: ComplexVector,
    /// `‖A v − λ v‖₂`.
    pub residual: f64,
    /// Set when the pair sits in a numerically defective cluster: another
    /// eigenvalue within tolerance whose computed eigenvector is parallel.
    pub defective: bool,
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub pairs: Vec<EigenPair>,
    pub residuals: Vec<f64>,
}

impl EigenResult {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn any_defective(&self) -> bool {
        self.pairs.iter().any(|p| p.defective)
    }
}

/// All `n` eigenpairs of a square matrix.
///
/// `tol` sets the relative width used to group eigenvalues into clusters
/// when flagging defective pairs.
pub fn eigenpairs(a: &ComplexDenseMatrix, tol: f64) -> Result<EigenResult> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "eigenpairs needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::parameter("tol", "must be positive"));
    }
    if !a.is_finite() {
        return Err(Error::validation("matrix", "entries must be finite"));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(EigenResult {
            pairs: Vec::new(),
            residuals: Vec::new(),
        });
    }

    let mut h = Dense::from(a);
    let mut w = Dense::identity(n);
    hessenberg(&mut h, &mut w);
    schur(&mut h, &mut w)?;

    let t = &h;
    let tnorm = t.frobenius().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;

    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t.get(k, k);
        let mut y = vec![Complex64::new(0.0, 0.0); k + 1];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: Complex64 = ((i + 1)..=k).map(|j| t.get(i, j) * y[j]).sum();
            let mut d = t.get(i, i) - lambda;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[i] = -s / d;
            if y[i].norm() > 1e100 {
                for yj in y.iter_mut() {
                    *yj *= 1e-100;
                }
            }
        }
        let mut v: ComplexVector = (0..n)
            .map(|r| (0..=k).map(|j| w.get(r, j) * y[j]).sum())
            .collect();
        let nv = norm2(&v);
        for z in v.iter_mut() {
            *z /= nv;
        }
        let av = a.matvec(&v)?;
        let residual = av
            .iter()
            .zip(&v)
            .map(|(x, vi)| (x - lambda * vi).norm_sqr())
            .sum::<f64>()
            .sqrt();
        pairs.push(EigenPair {
            value: lambda,
            vector: v,
            residual,
            defective: false,
        });
    }

    let cluster = tol.max(f64::EPSILON.sqrt()) * a.frobenius_norm().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in (i + 1)..n {
            if (pairs[i].value - pairs[j].value).norm() <= cluster
                && inner(&pairs[i].vector, &pairs[j].vector).norm() > 0.999
            {
                pairs[i].defective = true;
                pairs[j].defective = true;
            }
        }
    }

    let residuals = pairs.iter().map(|p| p.residual).collect();
    Ok(EigenResult { pairs, residuals })
}

/// Square working matrix, row-major.
struct Dense {
    n: usize,
    data: Vec<Complex64>,
}

impl Dense {
    fn from(a: &ComplexDenseMatrix) -> Self {
        Self {
            n: a.rows(),
            data: a.as_slice().to_vec(),
        }
    }

    fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self { n, data }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.n + j] = z;
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Rows `k`, `k+1` ← G · rows, for columns in `cols`.
    fn rotate_rows(&mut self, k: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
        let n = self.n;
        for j in cols {
            let x = self.data[k * n + j];
            let y = self.data[(k + 1) * n + j];
            self.data[k * n + j] = x * c + s * y;
            self.data[(k + 1) * n + j] = -s.conj() * x + y * c;
        }
    }

    /// Columns `k`, `k+1` ← columns · G*, for rows in `rows`.
    fn rotate_cols(&mut self, k: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
        let n = self.n;
        for i in rows {
            let x = self.data[i * n + k];
            let y = self.data[i * n + k + 1];
            self.data[i * n + k] = x * c + s.conj() * y;
            self.data[i * n + k + 1] = -s * x + y * c;
        }
    }
}

fn hessenberg(h: &mut Dense, w: &mut Dense) {
    let n = h.n;
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| h.get(i, k)).collect();
        let alpha = norm2(&v);
        if alpha == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        v[0] += phase * alpha;
        let vv: f64 = v.iter().map(Complex64::norm_sqr).sum();
        if vv == 0.0 {
            continue;
        }
        let scale = 2.0 / vv;

        // H ← P H, rows k+1.., columns k..
        for j in k..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(l, vl)| vl.conj() * h.get(k + 1 + l, j))
                .sum();
            for (l, vl) in v.iter().enumerate() {
                let cur = h.get(k + 1 + l, j);
                h.set(k + 1 + l, j, cur - vl * s * scale);
            }
        }
        // H ← H P and W ← W P, columns k+1..
        for m in [&mut *h, &mut *w] {
            for i in 0..n {
                let s: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(l, vl)| m.get(i, k + 1 + l) * vl)
                    .sum();
                for (l, vl) in v.iter().enumerate() {
                    let cur = m.get(i, k + 1 + l);
                    m.set(i, k + 1 + l, cur - s * vl.conj() * scale);
                }
            }
        }
        for i in (k + 2)..n {
            h.set(i, k, Complex64::new(0.0, 0.0));
        }
    }
}

/// Complex Givens rotation `(c, s)` with `[c s; -s̄ c] [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

fn schur(h: &mut Dense, w: &mut Dense) -> Result<()> {
    let n = h.n;
    let eps = f64::EPSILON;
    let hnorm = h.frobenius().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut converged = 0usize;

    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h.get(lo, lo - 1).norm();
            let diag = h.get(lo - 1, lo - 1).norm() + h.get(lo, lo).norm();
            let reference = if diag > 0.0 { diag } else { hnorm };
            if sub <= eps * reference {
                h.set(lo, lo - 1, Complex64::new(0.0, 0.0));
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            converged += 1;
            continue;
        }

        iter += 1;
        if iter > MAX_ITER_PER_EIGENVALUE {
            return Err(Error::Numeric {
                message: format!(
                    "shifted QR did not converge ({converged} of {n} eigenvalues deflated)"
                ),
                residual: h.get(hi, hi - 1).norm(),
            });
        }

        let shift = if iter % 10 == 0 {
            // Exceptional shift to break cycles.
            h.get(hi, hi) + Complex64::new(0.75, 0.5) * h.get(hi, hi - 1).norm()
        } else {
            wilkinson(
                h.get(hi - 1, hi - 1),
                h.get(hi - 1, hi),
                h.get(hi, hi - 1),
                h.get(hi, hi),
            )
        };

        for i in lo..=hi {
            let d = h.get(i, i);
            h.set(i, i, d - shift);
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h.get(k, k), h.get(k + 1, k));
            h.rotate_rows(k, c, s, k..n);
            h.set(k + 1, k, Complex64::new(0.0, 0.0));
            rotations.push((k, c, s));
        }
        for &(k, c, s) in &rotations {
            h.rotate_cols(k, c, s, 0..(k + 3).min(hi + 1));
            w.rotate_cols(k, c, s, 0..n);
        }
        for i in lo..=hi {
            let d = h.get(i, i);
            h.set(i, i, d + shift);
        }
    }
    Ok(())
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = d + half + disc;
    let mu2 = d + half - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}
