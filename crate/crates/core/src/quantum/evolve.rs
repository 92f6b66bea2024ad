//! exp(-iHt) for real symmetric H: dense eigendecomposition for small
//! matrices and Chebyshev propagation for sparse ones.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: operator {0}, state {1}")]
    Dimension(usize, usize),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("norm drifted by {0:e}")]
    NormDrift(f64),
}

/// Tolerance on `| ||psi_t|| - ||psi_0|| |` before evolution is declared failed.
pub const NORM_TOLERANCE: f64 = 1e-9;

pub fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_norm(before: f64, psi: &[Complex64]) -> Result<(), EvolveError> {
    let drift = (norm(psi) - before).abs();
    if drift > NORM_TOLERANCE {
        Err(EvolveError::NormDrift(drift))
    } else {
        Ok(())
    }
}

/// Cached eigendecomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct DenseEvolver {
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl DenseEvolver {
    pub fn new(h: &DMatrix<f64>) -> Result<Self, EvolveError> {
        if h.nrows() != h.ncols() {
            return Err(EvolveError::Dimension(h.nrows(), h.ncols()));
        }
        let asym = (h - h.transpose()).amax();
        if asym > 1e-12 {
            return Err(EvolveError::NotHermitian(asym));
        }
        let e = SymmetricEigen::new(h.clone());
        Ok(DenseEvolver { values: e.eigenvalues, vectors: e.eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn evolve(&self, t: f64, psi0: &[Complex64]) -> Result<Vec<Complex64>, EvolveError> {
        let n = self.dim();
        if psi0.len() != n {
            return Err(EvolveError::Dimension(n, psi0.len()));
        }
        if t < 0.0 {
            return Err(EvolveError::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(psi0.to_vec());
        }
        // coefficients in the eigenbasis, phase-rotated
        let mut coef = vec![Complex64::new(0.0, 0.0); n];
        for (m, c) in coef.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for (i, z) in psi0.iter().enumerate() {
                s += z * self.vectors[(i, m)];
            }
            *c = s * Complex64::from_polar(1.0, -self.values[m] * t);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            for (m, c) in coef.iter().enumerate() {
                *o += c * self.vectors[(i, m)];
            }
        }
        check_norm(norm(psi0), &out)?;
        Ok(out)
    }
}

/// Symmetric 0/1 sparse matrix (adjacency of a simple graph).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseSym {
    offsets: Vec<usize>,
    cols: Vec<usize>,
}

impl SparseSym {
    /// From undirected edges on `n` vertices.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut deg = vec![0usize; n];
        for &(u, v) in edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().expect("non-empty") + d);
        }
        let mut fill = offsets.clone();
        let mut cols = vec![0; offsets[n]];
        for &(u, v) in edges {
            cols[fill[u]] = v;
            fill[u] += 1;
            cols[fill[v]] = u;
            fill[v] += 1;
        }
        SparseSym { offsets, cols }
    }

    pub fn dim(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.cols[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.dim()).map(|i| self.row(i).len()).max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for &j in self.row(i) {
                m[(i, j)] += 1.0;
            }
        }
        m
    }

    fn apply(&self, scale: f64, x: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for &j in self.row(i) {
                s += x[j];
            }
            *o = s * scale;
        }
    }
}

/// `J_0(x) .. J_nmax(x)` by Miller's backward recurrence, normalized with
/// `J_0 + 2 sum J_2m = 1`.
pub fn bessel_j(x: f64, nmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = nmax.max(ax.ceil() as usize);
    let mut m = top + 30 + (40.0 * top as f64).sqrt() as usize;
    m += m % 2;
    let mut jp1 = 0.0f64;
    let mut j = 1e-300f64;
    let mut sum = 0.0f64;
    for n in (1..=m).rev() {
        let jm1 = 2.0 * n as f64 / ax * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            sum *= 1e-250;
            for o in out.iter_mut() {
                *o *= 1e-250;
            }
        }
        // j now holds J_{n-1}
        let idx = n - 1;
        if idx <= nmax {
            out[idx] = j;
        }
        if idx % 2 == 0 && idx > 0 {
            sum += 2.0 * j;
        }
    }
    sum += j;
    for (n, o) in out.iter_mut().enumerate() {
        *o /= sum;
        if x < 0.0 && n % 2 == 1 {
            *o = -*o;
        }
    }
    out
}

/// Chebyshev propagation of `psi0` under the adjacency `a`, with spectral
/// bound `bound >= ||a||`.
pub fn chebyshev_evolve(a: &SparseSym, t: f64, psi0: &[Complex64], bound: f64) -> Result<Vec<Complex64>, EvolveError> {
    let n = a.dim();
    if psi0.len() != n {
        return Err(EvolveError::Dimension(n, psi0.len()));
    }
    if t < 0.0 {
        return Err(EvolveError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(psi0.to_vec());
    }
    let x = bound * t;
    let nmax = (x.ceil() as usize) + 40 + (10.0 * x.cbrt()) as usize;
    let j = bessel_j(x, nmax);
    let scale = 1.0 / bound;
    let mut prev = psi0.to_vec();
    let mut cur = vec![Complex64::new(0.0, 0.0); n];
    a.apply(scale, &prev, &mut cur);
    let mut out: Vec<Complex64> = prev.iter().map(|z| z * j[0]).collect();
    let mut phase = Complex64::new(0.0, -1.0); // (-i)^n
    for (o, c) in out.iter_mut().zip(&cur) {
        *o += c * (2.0 * j[1]) * phase;
    }
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    for jn in j.iter().skip(2) {
        a.apply(2.0 * scale, &cur, &mut next);
        for (nx, p) in next.iter_mut().zip(&prev) {
            *nx -= p;
        }
        phase *= Complex64::new(0.0, -1.0);
        let coef = phase * (2.0 * jn);
        for (o, c) in out.iter_mut().zip(&next) {
            *o += c * coef;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    check_norm(norm(psi0), &out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        let j = bessel_j(1.0, 3);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-14);
        let j = bessel_j(10.0, 5);
        assert!((j[1] - 0.043_472_746_168_861_44).abs() < 1e-14);
        assert!((j[5] - (-0.234_061_528_186_793_6)).abs() < 1e-14);
        let j = bessel_j(100.0, 0);
        assert!((j[0] - 0.019_985_850_304_223_12).abs() < 1e-13);
    }

    #[test]
    fn chebyshev_matches_dense_on_a_cycle() {
        let n = 7;
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let a = SparseSym::from_edges(n, &edges);
        let dense = DenseEvolver::new(&a.to_dense()).unwrap();
        let mut psi = vec![Complex64::new(0.0, 0.0); n];
        psi[0] = Complex64::new(1.0, 0.0);
        for t in [0.0, 0.3, 2.0, 17.5] {
            let x = chebyshev_evolve(&a, t, &psi, 2.0).unwrap();
            let y = dense.evolve(t, &psi).unwrap();
            for (p, q) in x.iter().zip(&y) {
                assert!((p - q).norm() < 1e-12, "t={t}");
            }
        }
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(DenseEvolver::new(&m), Err(EvolveError::NotHermitian(_))));
    }
}
