//! The walk on one body welded tree restricted to uniform layer states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::evolve::{DenseEvolver, EvolveError};

/// Tridiagonal Hamiltonian on the `2k+2` column states.
#[derive(Debug, Clone)]
pub struct ColumnWalk {
    pub k: u32,
    gamma: Vec<f64>,
    evolver: DenseEvolver,
}

impl ColumnWalk {
    pub fn new(k: u32) -> Self {
        assert!(k >= 1, "column walk needs k >= 1");
        let d = 2 * k as usize + 2;
        let gamma: Vec<f64> = (0..d - 1).map(|j| if j == k as usize { 2.0 } else { std::f64::consts::SQRT_2 }).collect();
        let mut h = DMatrix::zeros(d, d);
        for (j, &g) in gamma.iter().enumerate() {
            h[(j, j + 1)] = g;
            h[(j + 1, j)] = g;
        }
        let evolver = DenseEvolver::new(&h).expect("tridiagonal symmetric");
        ColumnWalk { k, gamma, evolver }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len() + 1
    }

    pub fn couplings(&self) -> &[f64] {
        &self.gamma
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut h = DMatrix::zeros(d, d);
        for (j, &g) in self.gamma.iter().enumerate() {
            h[(j, j + 1)] = g;
            h[(j + 1, j)] = g;
        }
        h
    }

    /// Vertices per column: 1, 2, .., 2^k, 2^k, .., 2, 1.
    pub fn column_sizes(&self) -> Vec<u64> {
        let k = self.k as usize;
        (0..self.dim()).map(|j| 1u64 << j.min(2 * k + 1 - j)).collect()
    }

    pub fn entrance(&self) -> Vec<Complex64> {
        let mut psi = vec![Complex64::new(0.0, 0.0); self.dim()];
        psi[0] = Complex64::new(1.0, 0.0);
        psi
    }

    pub fn evolve(&self, t: f64, psi0: &[Complex64]) -> Result<Vec<Complex64>, EvolveError> {
        self.evolver.evolve(t, psi0)
    }

    /// Column amplitudes at time `t` starting from the entrance root.
    pub fn amplitudes(&self, t: f64) -> Vec<Complex64> {
        self.evolve(t, &self.entrance()).expect("normalized start, t >= 0")
    }

    /// `<exit|exp(-iHt)|entrance>`, evaluated directly in the eigenbasis.
    pub fn transfer(&self, from: usize, to: usize, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(if from == to { 1.0 } else { 0.0 }, 0.0);
        }
        let v = self.evolver.eigenvectors();
        let e = self.evolver.eigenvalues();
        let mut s = Complex64::new(0.0, 0.0);
        for m in 0..self.dim() {
            s += Complex64::from_polar(v[(to, m)] * v[(from, m)], -e[m] * t);
        }
        s
    }

    pub fn exit_probability(&self, t: f64) -> f64 {
        self.transfer(0, self.dim() - 1, t).norm_sqr()
    }

    pub fn entrance_probability(&self, t: f64) -> f64 {
        self.transfer(0, 0, t).norm_sqr()
    }

    /// Best exit probability on the grid `0, dt, 2dt, .. <= t_max`. Ties go
    /// to the earliest time.
    pub fn sweep(&self, t_max: f64, dt: f64) -> SweepResult {
        let steps = (t_max / dt + 1e-9).floor() as usize;
        let mut best = SweepResult { t_star: 0.0, p_star: 0.0 };
        for i in 0..=steps {
            let t = i as f64 * dt;
            let p = self.exit_probability(t);
            if p > best.p_star {
                best = SweepResult { t_star: t, p_star: p };
            }
        }
        best
    }

    /// Grid time minimizing `ceil(t) * ceil(1/sqrt(p(t)))`, the walk length
    /// times the amplification repetitions. Ties go to the earliest time.
    pub fn cheapest(&self, t_max: f64, dt: f64) -> SweepResult {
        let steps = (t_max / dt + 1e-9).floor() as usize;
        let mut best = SweepResult { t_star: 0.0, p_star: 0.0 };
        let mut best_cost = f64::INFINITY;
        for i in 1..=steps {
            let t = i as f64 * dt;
            let p = self.exit_probability(t);
            if p <= 0.0 {
                continue;
            }
            let cost = t.ceil() * (1.0 / p.sqrt()).ceil();
            if cost < best_cost {
                best_cost = cost;
                best = SweepResult { t_star: t, p_star: p };
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepResult {
    pub t_star: f64,
    pub p_star: f64,
}

/// Default sweep grid: `t in [0, 50k]`, step 0.05.
pub const SWEEP_DT: f64 = 0.05;

pub fn sweep_t_max(k: u32) -> f64 {
    50.0 * f64::from(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn couplings_and_symmetry() {
        let w = ColumnWalk::new(1);
        let s = std::f64::consts::SQRT_2;
        assert_eq!(w.couplings(), &[s, 2.0, s]);
        let w = ColumnWalk::new(3);
        assert_eq!(w.dim(), 8);
        assert_eq!(w.couplings()[3], 2.0);
        assert_eq!(w.column_sizes(), vec![1, 2, 4, 8, 8, 4, 2, 1]);
        let h = w.matrix();
        let d = w.dim();
        for i in 0..d {
            for j in 0..d {
                assert_eq!(h[(i, j)], h[(d - 1 - i, d - 1 - j)]);
            }
        }
    }

    #[test]
    fn zero_time_and_energy() {
        let w = ColumnWalk::new(4);
        assert_eq!(w.exit_probability(0.0), 0.0);
        let h = w.matrix();
        let energy = |psi: &[Complex64]| {
            let mut e = Complex64::new(0.0, 0.0);
            for i in 0..psi.len() {
                for j in 0..psi.len() {
                    e += psi[i].conj() * h[(i, j)] * psi[j];
                }
            }
            e.re
        };
        let mut psi0 = vec![Complex64::new(0.0, 0.0); w.dim()];
        psi0[0] = Complex64::new(0.6, 0.0);
        psi0[1] = Complex64::new(0.0, 0.8);
        let e0 = energy(&psi0);
        for t in [0.5, 3.0, 40.0] {
            let psi = w.evolve(t, &psi0).unwrap();
            assert!((energy(&psi) - e0).abs() < 1e-9);
            assert!((super::super::evolve::norm(&psi) - 1.0).abs() < 1e-12);
        }
    }
}
