//! A standalone body welded tree (two depth-k binary trees whose leaves are
//! joined by a random alternating cycle) for checking the column reduction
//! against the full adjacency.

use num_complex::Complex64;
use rand::seq::SliceRandom;

use super::column::ColumnWalk;
use super::evolve::{chebyshev_evolve, EvolveError, SparseSym};
use crate::seed;

#[derive(Debug, Clone)]
pub struct WeldedTree {
    pub k: u32,
    pub adj: SparseSym,
    pub entrance: usize,
    pub exit: usize,
    /// Column (distance from the entrance) of every vertex.
    pub column: Vec<usize>,
}

impl WeldedTree {
    /// Heap numbering: tree A uses ids `0..2^{k+1}-1` (heap position h at
    /// h-1), tree B the next block.
    pub fn random(k: u32, seed: u64) -> Self {
        let size = (1usize << (k + 1)) - 1;
        let leaves = 1usize << k;
        let n = 2 * size;
        let mut edges = Vec::with_capacity(n + 2 * leaves);
        for base in [0, size] {
            for h in 2..=size {
                edges.push((base + h / 2 - 1, base + h - 1));
            }
        }
        let mut rng = seed::stream(seed, "welded/perm", 0);
        let mut a: Vec<usize> = (0..leaves).map(|i| leaves - 1 + i).collect();
        let mut b: Vec<usize> = (0..leaves).map(|i| size + leaves - 1 + i).collect();
        a.shuffle(&mut rng);
        b.shuffle(&mut rng);
        // a0 b0 a1 b1 ... a_{L-1} b_{L-1} a0
        for i in 0..leaves {
            edges.push((a[i], b[i]));
            edges.push((b[i], a[(i + 1) % leaves]));
        }
        let adj = SparseSym::from_edges(n, &edges);
        let mut column = vec![0; n];
        for base in [0, size] {
            for h in 1..=size {
                let depth = usize::BITS as usize - 1 - h.leading_zeros() as usize;
                column[base + h - 1] = if base == 0 { depth } else { 2 * k as usize + 1 - depth };
            }
        }
        WeldedTree { k, adj, entrance: 0, exit: size, column }
    }

    pub fn evolve_from_entrance(&self, t: f64) -> Result<Vec<Complex64>, EvolveError> {
        let mut psi = vec![Complex64::new(0.0, 0.0); self.adj.dim()];
        psi[self.entrance] = Complex64::new(1.0, 0.0);
        chebyshev_evolve(&self.adj, t, &psi, self.adj.max_degree() as f64)
    }

    /// Overlap with each normalized column state.
    pub fn project(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let d = 2 * self.k as usize + 2;
        let mut sums = vec![Complex64::new(0.0, 0.0); d];
        let mut sizes = vec![0usize; d];
        for (v, z) in psi.iter().enumerate() {
            sums[self.column[v]] += z;
            sizes[self.column[v]] += 1;
        }
        sums.iter().zip(&sizes).map(|(s, &m)| s / (m as f64).sqrt()).collect()
    }
}

/// Largest column amplitude difference between the reduced and full walks
/// over `points` equally spaced times in `[0, t_max]`, together with the
/// largest weight found outside the column subspace.
pub fn column_full_discrepancy(k: u32, seed: u64, t_max: f64, points: usize) -> Result<(f64, f64), EvolveError> {
    let tree = WeldedTree::random(k, seed);
    let walk = ColumnWalk::new(k);
    let mut worst = 0.0f64;
    let mut leak = 0.0f64;
    for i in 0..points {
        let t = if points > 1 { t_max * i as f64 / (points - 1) as f64 } else { 0.0 };
        let full = tree.evolve_from_entrance(t)?;
        let proj = tree.project(&full);
        let col = walk.amplitudes(t);
        for (a, b) in proj.iter().zip(&col) {
            worst = worst.max((a - b).norm());
        }
        let inside: f64 = proj.iter().map(|z| z.norm_sqr()).sum();
        leak = leak.max((1.0 - inside).abs());
    }
    Ok((worst, leak))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_reads_off_couplings() {
        // <col i| A |col j> on the full welded tree
        for k in 1..=3 {
            let t = WeldedTree::random(k, 3);
            let a = t.adj.to_dense();
            let d = 2 * k as usize + 2;
            let mut cols = vec![vec![0.0; t.adj.dim()]; d];
            for (v, &c) in t.column.iter().enumerate() {
                cols[c][v] = 1.0;
            }
            for c in cols.iter_mut() {
                let n: f64 = c.iter().sum::<f64>().sqrt();
                c.iter_mut().for_each(|x| *x /= n);
            }
            let w = ColumnWalk::new(k);
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for u in 0..t.adj.dim() {
                        for v in 0..t.adj.dim() {
                            s += cols[i][u] * a[(u, v)] * cols[j][v];
                        }
                    }
                    assert!((s - w.matrix()[(i, j)]).abs() < 1e-12, "k={k} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn small_k_agreement() {
        let (d, leak) = column_full_discrepancy(3, 1, 12.0, 20).unwrap();
        assert!(d < 1e-9 && leak < 1e-9, "{d} {leak}");
    }
}
