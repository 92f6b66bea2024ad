//! Role and class counts recomputed from a bare graph, checked against the
//! closed forms.

use serde::Serialize;

use crate::generators::{sample_instance, AdviceConvention, ClassCounts, GenError, InstanceSpec, RoleCensus, Variant};
use crate::graph::{EdgeKind, MultiGraph, VertexRole};

/// Counts read off the graph alone: roles from the tags, weld vertices as
/// body vertices at single-edge distance `k` from the nearest root, and
/// loop classes from the single-edge components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RawCensus {
    pub k: u32,
    pub vertices: u64,
    pub roots: u64,
    pub weld: u64,
    pub interior: u64,
    pub antenna: u64,
    pub loops: u64,
    /// Present when every single-edge component holds exactly one pair
    /// (two roots).
    pub classes: Option<ClassCounts>,
    pub antenna_one_loop: Option<u64>,
    pub antenna_even: Option<u64>,
    /// Weld and interior vertices whose advice edge lands in a pair whose
    /// loop parity marks them as weld vertices.
    pub weld_marked: Option<u64>,
    pub interior_marked: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("census identity `{identity}` failed: expected {expected}, found {found}")]
pub struct CensusMismatch {
    pub identity: &'static str,
    pub expected: u64,
    pub found: u64,
}

pub fn raw_census(g: &MultiGraph, k: u32, convention: AdviceConvention) -> RawCensus {
    let n = g.vertex_count();
    let mut c = RawCensus {
        k,
        vertices: n as u64,
        roots: 0,
        weld: 0,
        interior: 0,
        antenna: 0,
        loops: 0,
        classes: None,
        antenna_one_loop: None,
        antenna_even: None,
        weld_marked: None,
        interior_marked: None,
    };
    // distance from the roots through body vertices
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for v in 0..n {
        match g.role(v) {
            VertexRole::Root => {
                c.roots += 1;
                dist[v] = 0;
                queue.push_back(v);
            }
            VertexRole::Antenna => c.antenna += 1,
            VertexRole::Body => {}
        }
        c.loops += u64::from(g.has_loop(v));
    }
    while let Some(v) = queue.pop_front() {
        for w in g.single_neighbors(v) {
            if g.role(w) == VertexRole::Body && dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let weld: Vec<bool> = (0..n).map(|v| g.role(v) == VertexRole::Body && dist[v] == k).collect();
    for v in 0..n {
        if g.role(v) == VertexRole::Body {
            if weld[v] {
                c.weld += 1;
            } else {
                c.interior += 1;
            }
        }
    }
    // single-edge components and their roots and loops
    let mut comp = vec![u32::MAX; n];
    let mut roots_in = Vec::new();
    let mut loops_in = Vec::new();
    for s in 0..n {
        if comp[s] != u32::MAX {
            continue;
        }
        let id = roots_in.len() as u32;
        let (mut r, mut l) = (0u32, 0u32);
        comp[s] = id;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            r += u32::from(g.role(v) == VertexRole::Root);
            l += u32::from(g.has_loop(v));
            for w in g.single_neighbors(v) {
                if comp[w] == u32::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        roots_in.push(r);
        loops_in.push(l);
    }
    if n > 0 && roots_in.iter().all(|&r| r == 2) {
        let mut classes = ClassCounts { zero: 0, one: 0, two: 0 };
        for &l in &loops_in {
            match l {
                0 => classes.zero += 1,
                1 => classes.one += 1,
                _ => classes.two += 1,
            }
        }
        let (mut one, mut even, mut wm, mut im) = (0, 0, 0, 0);
        for v in 0..n {
            match g.role(v) {
                VertexRole::Antenna if loops_in[comp[v] as usize] == 1 => one += 1,
                VertexRole::Antenna => even += 1,
                VertexRole::Body => {
                    let marked = g.double_neighbors(v).next().is_some_and(|a| convention.marking_for_parity(loops_in[comp[a] as usize]));
                    if marked && weld[v] {
                        wm += 1;
                    } else if !marked && !weld[v] {
                        im += 1;
                    }
                }
                VertexRole::Root => {}
            }
        }
        c.classes = Some(classes);
        c.antenna_one_loop = Some(one);
        c.antenna_even = Some(even);
        c.weld_marked = Some(wm);
        c.interior_marked = Some(im);
    }
    c
}

impl RawCensus {
    /// Compares against the closed forms for `blocks` blocks. Pair-level
    /// identities are checked only when the classes could be read off.
    pub fn check(&self, blocks: u64, convention: AdviceConvention) -> Result<(), CensusMismatch> {
        let f = RoleCensus::closed_form(self.k, blocks, convention);
        let pairs = 2 * blocks * ((1u64 << self.k) - 1);
        let eq = |identity, expected, found| if expected == found { Ok(()) } else { Err(CensusMismatch { identity, expected, found }) };
        eq("candy size", RoleCensus::candy_size(self.k), if pairs == 0 { 0 } else { self.vertices / pairs })?;
        eq("instance size", pairs * RoleCensus::candy_size(self.k), self.vertices)?;
        eq("roots", f.roots, self.roots)?;
        eq("weld", f.weld, self.weld)?;
        eq("interior", f.interior, self.interior)?;
        eq("antenna", f.antenna, self.antenna)?;
        eq("loops", f.loops, self.loops)?;
        if let Some(cl) = self.classes {
            eq("zero-loop pairs", f.classes.zero, cl.zero)?;
            eq("one-loop pairs", f.classes.one, cl.one)?;
            eq("two-loop pairs", f.classes.two, cl.two)?;
            eq("one-loop antenna", f.antenna_one_loop, self.antenna_one_loop.unwrap_or(0))?;
            eq("even antenna", f.antenna_even, self.antenna_even.unwrap_or(0))?;
            let hosts = |welds| if welds == (convention == AdviceConvention::OddHosts) { f.antenna_one_loop } else { f.antenna_even };
            eq("weld/antenna matching", hosts(true), self.weld_marked.unwrap_or(0))?;
            eq("interior/antenna matching", hosts(false), self.interior_marked.unwrap_or(0))?;
        }
        Ok(())
    }
}

/// Edge symmetric difference between a G2 instance and the G1 instance
/// sharing its seed (same loops and advice, different welds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SiblingDifference {
    pub k: u32,
    pub seed: u64,
    pub vertices: u64,
    pub differing_edges: u64,
    pub ratio: f64,
}

fn edge_multiset(g: &MultiGraph) -> Vec<(usize, usize, u8)> {
    let mut e = Vec::new();
    for v in 0..g.vertex_count() {
        if g.has_loop(v) {
            e.push((v, v, 0));
        }
        for (w, kind) in g.neighbors(v) {
            if w > v {
                e.push((v, w, if kind == EdgeKind::Single { 1 } else { 2 }));
            }
        }
    }
    e.sort_unstable();
    e
}

pub fn sibling_difference(k: u32, seed: u64) -> Result<SiblingDifference, GenError> {
    let g1 = sample_instance(InstanceSpec::new(k, Variant::G1, seed))?;
    let g2 = sample_instance(InstanceSpec::new(k, Variant::G2, seed))?;
    let (a, b) = (edge_multiset(g1.graph()), edge_multiset(g2.graph()));
    let (mut i, mut j, mut common) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let differing = (a.len() + b.len()) as u64 - 2 * common;
    let vertices = g1.graph().vertex_count() as u64;
    Ok(SiblingDifference { k, seed, vertices, differing_edges: differing, ratio: differing as f64 / vertices as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_counts_and_sibling_gap() {
        let inst = sample_instance(InstanceSpec::new(3, Variant::G1, 7)).unwrap();
        let c = raw_census(inst.graph(), 3, AdviceConvention::OddHosts);
        assert_eq!((c.roots, c.weld, c.interior, c.antenna, c.vertices), (28, 224, 168, 392, 812));
        c.check(1, AdviceConvention::OddHosts).unwrap();
        let d = sibling_difference(3, 7).unwrap();
        assert_eq!(d.differing_edges, 448);
        assert!((d.ratio - 448.0 / 812.0).abs() < 1e-12);
    }

    #[test]
    fn g2_skips_pair_identities() {
        let inst = sample_instance(InstanceSpec::new(3, Variant::G2, 7)).unwrap();
        let c = raw_census(inst.graph(), 3, AdviceConvention::OddHosts);
        assert_eq!(c.classes, None);
        c.check(1, AdviceConvention::OddHosts).unwrap();
    }

    #[test]
    fn empty_graph_is_all_zero() {
        let c = raw_census(&MultiGraph::empty(), 3, AdviceConvention::OddHosts);
        assert_eq!((c.vertices, c.roots, c.weld, c.antenna, c.loops), (0, 0, 0, 0, 0));
        assert_eq!(c.classes, None);
    }

    #[test]
    fn tampered_graph_names_the_identity() {
        let inst = sample_instance(InstanceSpec::new(2, Variant::G1, 1)).unwrap();
        let mut c = raw_census(inst.graph(), 2, AdviceConvention::OddHosts);
        c.weld -= 1;
        c.interior += 1;
        assert_eq!(c.check(1, AdviceConvention::OddHosts).unwrap_err().identity, "weld");
    }
}
