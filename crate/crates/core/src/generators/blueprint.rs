//! The random choices that define an instance, kept as permutations so the
//! same wiring rules serve both the materialized and the on-demand generator.

use super::layout::{heap_depth, Layout, Node, Part};
use super::{AdviceConvention, ClassCounts, LoopClass, WeldMode};
use crate::graph::EdgeKind;
use crate::perm::{EagerPerm, LazyPerm, Permutation};
use crate::seed;

/// Creates permutations for a given stream.
pub(crate) trait PermSource {
    type P: Permutation;

    fn make(&self, n: u64, role: &str, index: u64) -> Self::P;
}

pub(crate) struct Eager(pub u64);

impl PermSource for Eager {
    type P = EagerPerm;

    fn make(&self, n: u64, role: &str, index: u64) -> EagerPerm {
        EagerPerm::new(n, &mut seed::stream(self.0, role, index))
    }
}

pub(crate) struct Lazy(pub u64);

impl PermSource for Lazy {
    type P = LazyPerm;

    fn make(&self, n: u64, role: &str, index: u64) -> LazyPerm {
        LazyPerm::new(n, seed::derive(self.0, role, index))
    }
}

/// Weld cycle(s) of one pair.
#[derive(Debug, Clone)]
pub(crate) struct PairWeld<P> {
    /// Alternating: position `q` holds left leaf `perms[0](q)` and right leaf
    /// `perms[1](q)`. Self-weld: `perms[s]` orders the cycle of side `s`.
    perms: [P; 2],
    /// Start positions of the alternating sub-cycles; `[0]` for one cycle.
    blocks: Vec<u64>,
}

pub(crate) struct Blueprint<S: PermSource> {
    pub layout: Layout,
    pub mode: WeldMode,
    pub convention: AdviceConvention,
    pub counts: ClassCounts,
    source_weld: S,
    loop_side_seed: u64,
    slots: S::P,
    weld_advice: S::P,
    interior_advice: S::P,
    welds: Vec<Option<PairWeld<S::P>>>,
    block_seed: Option<u64>,
}

impl<S: PermSource> Blueprint<S> {
    /// `shared` drives loops and advice; `weld` drives the weld cycles, so
    /// two variants built from the same `shared` seed differ only in welds.
    pub fn new(
        layout: Layout,
        mode: WeldMode,
        convention: AdviceConvention,
        counts: ClassCounts,
        shared: S,
        weld: S,
        loop_side_seed: u64,
        block_seed: Option<u64>,
    ) -> Self {
        let welds_total = layout.trees() * layout.leaves();
        let interior_total = layout.trees() * layout.interior_per_tree();
        let slots = shared.make(layout.pairs, "gen/slots", 0);
        let weld_advice = shared.make(welds_total, "gen/advice/weld", 0);
        let interior_advice = shared.make(interior_total, "gen/advice/interior", 0);
        let pairs = layout.pairs as usize;
        Blueprint {
            layout,
            mode,
            convention,
            counts,
            source_weld: weld,
            loop_side_seed,
            slots,
            weld_advice,
            interior_advice,
            welds: (0..pairs).map(|_| None).collect(),
            block_seed,
        }
    }

    pub fn slot(&mut self, pair: u64) -> u64 {
        self.slots.forward(pair)
    }

    pub fn class_of_slot(&self, slot: u64) -> LoopClass {
        let c = self.counts;
        if slot < c.one {
            LoopClass::One
        } else if slot < c.one + c.two {
            LoopClass::Two
        } else {
            LoopClass::Zero
        }
    }

    pub fn class(&mut self, pair: u64) -> LoopClass {
        let s = self.slot(pair);
        self.class_of_slot(s)
    }

    /// Root side carrying the loop of a one-loop pair.
    pub fn loop_side(&self, pair: u64) -> u64 {
        u64::from(seed::coin(self.loop_side_seed, pair))
    }

    pub fn root_has_loop(&mut self, pair: u64, side: u64) -> bool {
        match self.class(pair) {
            LoopClass::Zero => false,
            LoopClass::Two => true,
            LoopClass::One => self.loop_side(pair) == side,
        }
    }

    fn pair_weld(&mut self, pair: u64) -> &mut PairWeld<S::P> {
        let n = self.layout.leaves();
        let slot = &mut self.welds[pair as usize];
        if slot.is_none() {
            let perms = [self.source_weld.make(n, "gen/weld", 2 * pair), self.source_weld.make(n, "gen/weld", 2 * pair + 1)];
            let blocks = match self.block_seed {
                Some(bs) => random_blocks(n, &mut seed::stream(bs, "gen/weld-blocks", pair)),
                None => vec![0],
            };
            *slot = Some(PairWeld { perms, blocks });
        }
        slot.as_mut().expect("initialized above")
    }

    /// The two weld-cycle neighbors of leaf `i` on `side` of `pair`.
    pub fn weld_neighbors(&mut self, pair: u64, side: u64, i: u64) -> [u64; 2] {
        let n = self.layout.leaves();
        let mode = self.mode;
        let lay = self.layout;
        let pw = self.pair_weld(pair);
        match mode {
            WeldMode::SelfWeld => {
                let p = &mut pw.perms[side as usize];
                let q = p.inverse(i);
                let a = p.forward((q + n - 1) % n);
                let b = p.forward((q + 1) % n);
                [lay.weld_leaf(pair, side, a), lay.weld_leaf(pair, side, b)]
            }
            WeldMode::Alternating => {
                let q = pw.perms[side as usize].inverse(i);
                let (start, end) = block_of(&pw.blocks, q, n);
                let prev = if q == start { end - 1 } else { q - 1 };
                let next = if q + 1 == end { start } else { q + 1 };
                let other = &mut pw.perms[1 - side as usize];
                // left q touches right q and right q-1; right q touches left q and left q+1
                let (a, b) = if side == 0 { (other.forward(q), other.forward(prev)) } else { (other.forward(q), other.forward(next)) };
                [lay.weld_leaf(pair, 1 - side, a), lay.weld_leaf(pair, 1 - side, b)]
            }
        }
    }

    fn host_offset(&self, class: LoopClass) -> u64 {
        match class {
            LoopClass::One => 0,
            LoopClass::Two | LoopClass::Zero => self.counts.one,
        }
    }

    /// Whether welds are hosted by one-loop pairs (otherwise by even pairs).
    fn welds_in_one_loop(&self) -> bool {
        self.convention == AdviceConvention::OddHosts
    }

    fn host_antenna(&mut self, host_idx: u64, odd: bool) -> u64 {
        let (rank, side, h) = self.layout.antenna_host_decode(host_idx);
        let offset = if odd { 0 } else { self.counts.one };
        let pair = self.slots.inverse(offset + rank);
        self.layout.id(Node { pair, side, part: Part::Antenna(h) })
    }

    /// The advice partner (double edge) of a non-root vertex.
    pub fn advice_partner(&mut self, v: u64) -> Option<u64> {
        let lay = self.layout;
        let node = lay.node(v);
        match node.part {
            Part::Root => None,
            Part::Body(h) => {
                let weld_odd = self.welds_in_one_loop();
                if heap_depth(h) == lay.k {
                    let w = lay.weld_index(v).expect("weld leaf");
                    let idx = self.weld_advice.forward(w);
                    Some(self.host_antenna(idx, weld_odd))
                } else {
                    let i = lay.interior_index(v).expect("interior");
                    let idx = self.interior_advice.forward(i);
                    Some(self.host_antenna(idx, !weld_odd))
                }
            }
            Part::Antenna(h) => {
                let slot = self.slot(node.pair);
                let class = self.class_of_slot(slot);
                let rank = slot - self.host_offset(class);
                let idx = lay.antenna_host_index(rank, node.side, h);
                let hosts_welds = (class == LoopClass::One) == self.welds_in_one_loop();
                if hosts_welds {
                    Some(lay.weld_from_index(self.weld_advice.inverse(idx)))
                } else {
                    Some(lay.interior_from_index(self.interior_advice.inverse(idx)))
                }
            }
        }
    }

    /// Full adjacency of `v` (self-loop excluded) and its loop flag.
    pub fn row(&mut self, v: u64, out: &mut Vec<(u64, EdgeKind)>) -> bool {
        out.clear();
        let lay = self.layout;
        out.extend(lay.tree_neighbors(v).map(|w| (w, EdgeKind::Single)));
        let node = lay.node(v);
        if let Part::Body(h) = node.part {
            if heap_depth(h) == lay.k {
                for w in self.weld_neighbors(node.pair, node.side, h - lay.leaves()) {
                    out.push((w, EdgeKind::Single));
                }
            }
        }
        if let Some(a) = self.advice_partner(v) {
            out.push((a, EdgeKind::Double));
        }
        node.part == Part::Root && self.root_has_loop(node.pair, node.side)
    }
}

fn block_of(blocks: &[u64], q: u64, n: u64) -> (u64, u64) {
    let idx = blocks.partition_point(|&b| b <= q) - 1;
    let end = blocks.get(idx + 1).copied().unwrap_or(n);
    (blocks[idx], end)
}

/// Random composition of `n` into parts of size at least 2, as block starts.
fn random_blocks(n: u64, rng: &mut seed::Rng) -> Vec<u64> {
    use rand::Rng as _;
    let mut starts = vec![0];
    let mut pos = 0;
    while n - pos >= 4 {
        // close the current block here with probability 1/2 once it has 2 positions
        let len = 2 + rng.random_range(0..=(n - pos - 4));
        let len = if rng.random_bool(0.5) { len } else { n - pos };
        if pos + len >= n {
            break;
        }
        pos += len;
        starts.push(pos);
    }
    starts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_have_length_at_least_two() {
        for s in 0..200 {
            let n = 16;
            let b = random_blocks(n, &mut seed::stream(s, "t", 0));
            assert_eq!(b[0], 0);
            let mut ends = b[1..].to_vec();
            ends.push(n);
            for (start, end) in b.iter().zip(ends) {
                assert!(end - start >= 2, "{b:?}");
            }
        }
    }

    #[test]
    fn block_lookup() {
        let b = vec![0, 3, 7];
        assert_eq!(block_of(&b, 0, 10), (0, 3));
        assert_eq!(block_of(&b, 5, 10), (3, 7));
        assert_eq!(block_of(&b, 9, 10), (7, 10));
    }
}
