//! Uniform random bijections on `[0, n)`, either materialized or sampled on
//! demand by deferred decisions.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rustc_hash::FxHashMap;

use crate::seed;

pub trait Permutation {
    fn len(&self) -> u64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Image of `x`.
    fn forward(&mut self, x: u64) -> u64;

    /// Preimage of `y`.
    fn inverse(&mut self, y: u64) -> u64;
}

/// A shuffled table and its inverse.
#[derive(Debug, Clone)]
pub struct EagerPerm {
    fwd: Vec<u32>,
    inv: Vec<u32>,
}

impl EagerPerm {
    pub fn new(n: u64, rng: &mut seed::Rng) -> Self {
        let mut fwd: Vec<u32> = (0..n as u32).collect();
        fwd.shuffle(rng);
        let mut inv = vec![0u32; fwd.len()];
        for (x, &y) in fwd.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        EagerPerm { fwd, inv }
    }

    pub fn image(&self, x: usize) -> usize {
        self.fwd[x] as usize
    }

    pub fn preimage(&self, y: usize) -> usize {
        self.inv[y] as usize
    }
}

impl Permutation for EagerPerm {
    fn len(&self) -> u64 {
        self.fwd.len() as u64
    }

    fn forward(&mut self, x: u64) -> u64 {
        u64::from(self.fwd[x as usize])
    }

    fn inverse(&mut self, y: u64) -> u64 {
        u64::from(self.inv[y as usize])
    }
}

/// A uniform bijection revealed one point at a time.
///
/// Every new assignment is uniform over the values still free, so the
/// revealed part is distributed exactly as the corresponding part of a
/// uniformly shuffled table.
#[derive(Debug, Clone)]
pub struct LazyPerm {
    n: u64,
    fwd: FxHashMap<u64, u64>,
    inv: FxHashMap<u64, u64>,
    rng: seed::Rng,
}

impl LazyPerm {
    pub fn new(n: u64, seed: u64) -> Self {
        LazyPerm { n, fwd: FxHashMap::default(), inv: FxHashMap::default(), rng: seed::stream(seed, "lazy-perm", 0) }
    }

    pub fn assigned(&self) -> usize {
        self.fwd.len()
    }

    /// Peek without sampling.
    pub fn known_forward(&self, x: u64) -> Option<u64> {
        self.fwd.get(&x).copied()
    }

    pub fn known_inverse(&self, y: u64) -> Option<u64> {
        self.inv.get(&y).copied()
    }

    fn free_value(rng: &mut seed::Rng, n: u64, taken: &FxHashMap<u64, u64>) -> u64 {
        let used = taken.len() as u64;
        debug_assert!(used < n);
        if used * 2 <= n {
            loop {
                let c = rng.random_range(0..n);
                if !taken.contains_key(&c) {
                    return c;
                }
            }
        }
        // dense regime: pick the r-th free value
        let r = rng.random_range(0..n - used);
        (0..n).filter(|c| !taken.contains_key(c)).nth(r as usize).expect("free value exists")
    }
}

impl Permutation for LazyPerm {
    fn len(&self) -> u64 {
        self.n
    }

    fn forward(&mut self, x: u64) -> u64 {
        if let Some(&y) = self.fwd.get(&x) {
            return y;
        }
        let y = Self::free_value(&mut self.rng, self.n, &self.inv);
        self.fwd.insert(x, y);
        self.inv.insert(y, x);
        y
    }

    fn inverse(&mut self, y: u64) -> u64 {
        if let Some(&x) = self.inv.get(&y) {
            return x;
        }
        let x = Self::free_value(&mut self.rng, self.n, &self.fwd);
        self.fwd.insert(x, y);
        self.inv.insert(y, x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn lazy_perm_is_a_bijection(n in 1u64..40, seed in any::<u64>(), order in proptest::collection::vec((any::<bool>(), 0u64..40), 0..80)) {
            let mut p = LazyPerm::new(n, seed);
            for (fwd, x) in order {
                let x = x % n;
                if fwd {
                    let y = p.forward(x);
                    prop_assert_eq!(p.inverse(y), x);
                } else {
                    let y = p.inverse(x);
                    prop_assert_eq!(p.forward(y), x);
                }
            }
            let mut image: Vec<u64> = (0..n).map(|x| p.forward(x)).collect();
            image.sort_unstable();
            prop_assert_eq!(image, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn lazy_perm_first_image_is_uniform() {
        // frequency of forward(0) over seeds, n = 5
        let mut counts = [0u32; 5];
        for s in 0..20_000 {
            let mut p = LazyPerm::new(5, s);
            p.inverse(3);
            counts[p.forward(0) as usize] += 1;
        }
        for c in counts {
            assert!((3_700..4_300).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn eager_perm_inverts() {
        let mut rng = seed::stream(1, "t", 0);
        let mut p = EagerPerm::new(50, &mut rng);
        for x in 0..50 {
            let y = p.forward(x);
            assert_eq!(p.inverse(y), x);
        }
    }
}
