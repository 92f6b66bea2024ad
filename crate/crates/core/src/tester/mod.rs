//! The classical tester with advice.
//!
//! The tests build on one another: consistency (tree structure via
//! FindRootPath), weld-consistency (marked leaves pair two trees),
//! completeness (the trees are full), advice (double edges point into pairs
//! whose loop parity matches the marking) and the final test.

pub mod walk;

use std::rc::Rc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::advice::AdviceSource;
use crate::generators::AdviceConvention;
use crate::graph::{AdjacencyOracle, Label};
use crate::seed;
pub use walk::{Explorer, Filter, Nbrs, Parent};

/// Why a test rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error, Serialize, Deserialize)]
pub enum Reject {
    #[error("a vertex has more than 4 single-edge neighbors")]
    TooManySingles,
    #[error("filtered degree not in {{1, 3, 4}}")]
    BannedDegree,
    #[error("a second root candidate met during FindParent")]
    SecondRoot,
    #[error("a FindParent walk did not end at a leaf")]
    NoLeaf,
    #[error("non-parent walks have different lengths")]
    LengthMismatch,
    #[error("the longest walk skips the root candidate")]
    RootSkip,
    #[error("FindRootPath did not end at a degree-4 vertex")]
    NoRootFound,
    #[error("root path longer than k")]
    PathTooLong,
    #[error("marked vertex with filtered degree above 1")]
    MarkedNonLeaf,
    #[error("marked vertex on the root path")]
    MarkedOnPath,
    #[error("marked vertex with a root path shorter than k")]
    MarkedShortPath,
    #[error("repeated FindRootPath runs disagree")]
    PathDisagreement,
    #[error("an unmarked branch walk stopped early or met a marked vertex")]
    UnmarkedBranch,
    #[error("marked vertex without exactly 2 marked neighbors")]
    MarkedNeighborCount,
    #[error("marked neighbors disagree on the paired root")]
    WeldPairMismatch,
    #[error("a length-k walk from a root stopped early")]
    WalkTooShort,
    #[error("not exactly 2 of the 4 walk end-points are marked")]
    MarkedEndpointCount,
    #[error("the walk along the root-path edge ends unmarked")]
    BranchEndpointUnmarked,
    #[error("a tree below a root is incomplete")]
    IncompleteTree,
    #[error("vertex has neither exactly one double edge nor the root shape")]
    AdviceStructure,
    #[error("not exactly one endpoint of the double edge is in an unmarked branch")]
    AdviceBranch,
    #[error("loop parity does not match the marking")]
    AdviceParityMismatch,
    #[error("vertex count is not a multiple of the instance size")]
    VertexCountNotMultiple,
    #[error("oracle rejected a label")]
    UnknownLabel,
}

impl Reject {
    pub fn name(self) -> &'static str {
        match self {
            Reject::TooManySingles => "TooManySingles",
            Reject::BannedDegree => "BannedDegree",
            Reject::SecondRoot => "SecondRoot",
            Reject::NoLeaf => "NoLeaf",
            Reject::LengthMismatch => "LengthMismatch",
            Reject::RootSkip => "RootSkip",
            Reject::NoRootFound => "NoRootFound",
            Reject::PathTooLong => "PathTooLong",
            Reject::MarkedNonLeaf => "MarkedNonLeaf",
            Reject::MarkedOnPath => "MarkedOnPath",
            Reject::MarkedShortPath => "MarkedShortPath",
            Reject::PathDisagreement => "PathDisagreement",
            Reject::UnmarkedBranch => "UnmarkedBranch",
            Reject::MarkedNeighborCount => "MarkedNeighborCount",
            Reject::WeldPairMismatch => "WeldPairMismatch",
            Reject::WalkTooShort => "WalkTooShort",
            Reject::MarkedEndpointCount => "MarkedEndpointCount",
            Reject::BranchEndpointUnmarked => "BranchEndpointUnmarked",
            Reject::IncompleteTree => "IncompleteTree",
            Reject::AdviceStructure => "AdviceStructure",
            Reject::AdviceBranch => "AdviceBranch",
            Reject::AdviceParityMismatch => "AdviceParityMismatch",
            Reject::VertexCountNotMultiple => "VertexCountNotMultiple",
            Reject::UnknownLabel => "UnknownLabel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub accept: bool,
    pub reason: Option<Reject>,
    pub queries_used: u64,
    pub advice_queries: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TesterConfig {
    pub k: u32,
    pub eps: f64,
    /// Completeness repetitions: `ceil(c1 * k / eps)`.
    pub c1: f64,
    /// Advice tests in the final test: `ceil(c2 / eps)`.
    pub c2: f64,
    /// Repetitions inside the consistency and weld-consistency tests.
    pub inner_reps: u32,
    /// Reuse consistency and weld-consistency verdicts within one session.
    pub memoize: bool,
    pub convention: AdviceConvention,
}

impl TesterConfig {
    pub fn new(k: u32, eps: f64) -> Self {
        TesterConfig { k, eps, c1: 10.0, c2: 10.0, inner_reps: 100, memoize: true, convention: AdviceConvention::OddHosts }
    }

    pub fn completeness_reps(&self) -> u64 {
        (self.c1 * f64::from(self.k) / self.eps).ceil() as u64
    }

    pub fn advice_tests(&self) -> u64 {
        (self.c2 / self.eps).ceil() as u64
    }

    /// `2 (2^k - 1)(2^(k+3) - 6)`.
    pub fn instance_unit(&self) -> u64 {
        2 * ((1u64 << self.k) - 1) * ((1u64 << (self.k + 3)) - 6)
    }
}

/// Outcome of a completeness test on one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompletenessInfo {
    pub root: Label,
    pub root_pair: Label,
    /// Whether the branch of the root containing the vertex ends in marked
    /// leaves; `None` for the root itself.
    pub branch_marked: Option<bool>,
}

type Res<T> = Result<T, Reject>;

/// One tester session: an oracle, an advice source, the configuration and
/// everything learned so far.
pub struct TestContext<'a> {
    pub cfg: TesterConfig,
    ex: Explorer<'a>,
    advice: &'a dyn AdviceSource,
    consistency_memo: FxHashMap<Label, Res<Rc<[Label]>>>,
    weld_memo: FxHashMap<Label, Res<()>>,
}

impl<'a> TestContext<'a> {
    pub fn new(oracle: &'a dyn AdjacencyOracle, advice: &'a dyn AdviceSource, cfg: TesterConfig, rng: seed::Rng) -> Self {
        TestContext {
            cfg,
            ex: Explorer::new(oracle, Some(advice), cfg.k, rng),
            advice,
            consistency_memo: FxHashMap::default(),
            weld_memo: FxHashMap::default(),
        }
    }

    /// Drop cached answers and memoized verdicts.
    pub fn reset(&mut self) {
        self.ex.clear();
        self.consistency_memo.clear();
        self.weld_memo.clear();
    }

    pub fn explorer(&mut self) -> &mut Explorer<'a> {
        &mut self.ex
    }

    fn verdict<T>(&self, r: &Res<T>, q0: u64, a0: u64) -> Verdict {
        Verdict {
            accept: r.is_ok(),
            reason: r.as_ref().err().copied(),
            queries_used: self.ex.oracle().queries() - q0,
            advice_queries: self.advice.evaluations() - a0,
        }
    }

    fn counters(&self) -> (u64, u64) {
        (self.ex.oracle().queries(), self.advice.evaluations())
    }

    pub fn find_parent(&mut self, v: Label) -> Res<Parent> {
        self.ex.find_parent(v, Filter::Tree)
    }

    pub fn find_root_path(&mut self, v: Label) -> Res<Vec<Label>> {
        self.ex.find_root_path(v, Filter::Tree)
    }

    /// Consistency test; on success returns the consistent root path.
    pub fn consistency(&mut self, v: Label) -> Res<Rc<[Label]>> {
        if self.cfg.memoize {
            if let Some(r) = self.consistency_memo.get(&v) {
                return r.clone();
            }
        }
        let r = self.consistency_uncached(v);
        if self.cfg.memoize {
            self.consistency_memo.insert(v, r.clone());
        }
        r
    }

    fn consistency_uncached(&mut self, v: Label) -> Res<Rc<[Label]>> {
        let k = self.cfg.k as usize;
        let marked = self.ex.marked(v);
        if marked && self.ex.deg(v, Filter::Tree)? > 1 {
            return Err(Reject::MarkedNonLeaf);
        }
        let mut first: Option<Vec<Label>> = None;
        for _ in 0..self.cfg.inner_reps.max(1) {
            let path = self.ex.find_root_path(v, Filter::Tree)?;
            let len = path.len() - 1;
            if len > k {
                return Err(Reject::PathTooLong);
            }
            for &p in &path[1..] {
                if self.ex.marked(p) {
                    return Err(Reject::MarkedOnPath);
                }
            }
            if marked && len < k {
                return Err(Reject::MarkedShortPath);
            }
            match &first {
                None => first = Some(path),
                Some(f) if *f != path => return Err(Reject::PathDisagreement),
                Some(_) => {}
            }
        }
        Ok(first.expect("at least one repetition").into())
    }

    pub fn consistency_test(&mut self, v: Label) -> Verdict {
        let (q0, a0) = self.counters();
        let r = self.consistency(v);
        self.verdict(&r, q0, a0)
    }

    pub fn weld_consistency(&mut self, v: Label) -> Res<()> {
        if self.cfg.memoize {
            if let Some(&r) = self.weld_memo.get(&v) {
                return r;
            }
        }
        let r = self.weld_consistency_uncached(v);
        if self.cfg.memoize {
            self.weld_memo.insert(v, r);
        }
        r
    }

    fn weld_consistency_uncached(&mut self, v: Label) -> Res<()> {
        let k = self.cfg.k as usize;
        let path = self.consistency(v)?;
        if path.len() - 1 < k {
            return Ok(());
        }
        let r = path[k];
        let e_end = path[k - 1];
        let reps = self.cfg.inner_reps.max(1);
        if !self.ex.marked(v) {
            for _ in 0..reps {
                let w = self.ex.walk(r, e_end, k, Filter::Singles)?;
                if w.len() < k + 1 {
                    return Err(Reject::UnmarkedBranch);
                }
                for &x in &w[1..] {
                    if self.ex.marked(x) {
                        return Err(Reject::UnmarkedBranch);
                    }
                }
            }
            return Ok(());
        }
        for _ in 0..reps {
            let marked_nb = self.marked_neighbors(v)?;
            if marked_nb.len() != 2 {
                return Err(Reject::MarkedNeighborCount);
            }
            let r1 = self.root_of(marked_nb[0])?;
            let r2 = self.root_of(marked_nb[1])?;
            if r1 != r2 || r1 == r {
                return Err(Reject::WeldPairMismatch);
            }
            let ends = self.root_walks(r, k)?;
            let marked_ends: Vec<Label> = ends.iter().filter(|&&(_, _, m)| m).map(|&(_, end, _)| end).collect();
            if marked_ends.len() != 2 {
                return Err(Reject::MarkedEndpointCount);
            }
            if !ends.iter().any(|&(first, _, m)| first == e_end && m) {
                return Err(Reject::BranchEndpointUnmarked);
            }
            for end in marked_ends {
                let nb = self.marked_neighbors(end)?;
                if nb.len() != 2 {
                    return Err(Reject::MarkedNeighborCount);
                }
                let y = self.ex.pick(&nb);
                if self.root_of(y)? != r1 {
                    return Err(Reject::WeldPairMismatch);
                }
            }
        }
        Ok(())
    }

    pub fn weld_consistency_test(&mut self, v: Label) -> Verdict {
        let (q0, a0) = self.counters();
        let r = self.weld_consistency(v);
        self.verdict(&r, q0, a0)
    }

    fn root_of(&mut self, v: Label) -> Res<Label> {
        Ok(*self.consistency(v)?.last().expect("non-empty path"))
    }

    fn marked_neighbors(&mut self, v: Label) -> Res<Vec<Label>> {
        let n = self.ex.singles(v)?;
        let mut out = Vec::with_capacity(2);
        for &w in n.as_slice() {
            if self.ex.marked(w) {
                out.push(w);
            }
        }
        Ok(out)
    }

    /// One length-`k` walk from `r` along each single edge:
    /// `(first step, end-point, end-point marked)`.
    fn root_walks(&mut self, r: Label, k: usize) -> Res<Vec<(Label, Label, bool)>> {
        let nb = self.ex.singles(r)?;
        let mut out = Vec::with_capacity(4);
        for &w in nb.as_slice() {
            let path = self.ex.walk(r, w, k, Filter::Singles)?;
            if path.len() < k + 1 {
                return Err(Reject::WalkTooShort);
            }
            let end = path[k];
            out.push((w, end, self.ex.marked(end)));
        }
        Ok(out)
    }

    /// The walks from a root used by the completeness test. Returns the
    /// sampled paths and the end-point markings per first step.
    fn side_test(&mut self, r: Label) -> Res<(Vec<Vec<Label>>, Vec<(Label, Label, bool)>)> {
        let k = self.cfg.k as usize;
        let nb = self.ex.singles(r)?;
        let mut paths = Vec::with_capacity(4);
        let mut ends = Vec::with_capacity(4);
        for &w in nb.as_slice() {
            let path = self.ex.walk(r, w, k, Filter::Singles)?;
            for (t, &x) in path.iter().enumerate().skip(1) {
                let d = self.ex.deg(x, Filter::Singles)?;
                if t < k && d != 3 {
                    // a leaf before depth k, or a vertex of the wrong degree
                    return Err(Reject::IncompleteTree);
                }
            }
            if path.len() < k + 1 {
                return Err(Reject::IncompleteTree);
            }
            let end = path[k];
            let marked = self.ex.marked(end);
            if marked {
                if self.marked_neighbors(end)?.len() != 2 {
                    return Err(Reject::IncompleteTree);
                }
            } else if self.ex.deg(end, Filter::Singles)? != 1 {
                return Err(Reject::IncompleteTree);
            }
            ends.push((w, end, marked));
            paths.push(path);
        }
        if ends.iter().filter(|e| e.2).count() != 2 {
            return Err(Reject::MarkedEndpointCount);
        }
        Ok((paths, ends))
    }

    pub fn completeness(&mut self, v: Label) -> Res<CompletenessInfo> {
        let mut info = None;
        for _ in 0..self.cfg.completeness_reps().max(1) {
            self.weld_consistency(v)?;
            let path = self.consistency(v)?;
            let r = *path.last().expect("non-empty");
            let (paths, ends) = self.side_test(r)?;
            let branch_marked = if path.len() >= 2 {
                let edge = path[path.len() - 2];
                Some(ends.iter().find(|e| e.0 == edge).ok_or(Reject::IncompleteTree)?.2)
            } else {
                None
            };
            let marked_ends: Vec<Label> = ends.iter().filter(|e| e.2).map(|e| e.1).collect();
            let end = self.ex.pick(&marked_ends);
            let nb = self.marked_neighbors(end)?;
            let y = self.ex.pick(&nb);
            let ypath = self.ex.find_root_path(y, Filter::Tree)?;
            let r2 = *ypath.last().expect("non-empty");
            for x in paths.iter().flatten().chain(ypath.iter()) {
                self.weld_consistency(*x)?;
            }
            let (paths2, _) = self.side_test(r2)?;
            for x in paths2.iter().flatten() {
                self.weld_consistency(*x)?;
            }
            info = Some(CompletenessInfo { root: r, root_pair: r2, branch_marked });
        }
        Ok(info.expect("at least one repetition"))
    }

    pub fn completeness_test(&mut self, v: Label) -> Verdict {
        let (q0, a0) = self.counters();
        let r = self.completeness(v);
        self.verdict(&r, q0, a0)
    }

    pub fn advice(&mut self, v: Label) -> Res<()> {
        let iv = self.completeness(v)?;
        let doubles = self.ex.doubles(v)?;
        let singles = self.ex.singles(v)?;
        match doubles.len() {
            0 if singles.len() == 4 => return Ok(()),
            1 => {}
            _ => return Err(Reject::AdviceStructure),
        }
        let u = doubles[0];
        let iu = self.completeness(u)?;
        let unmarked = |i: &CompletenessInfo| i.branch_marked == Some(false);
        // `a` is the endpoint in the unmarked branch, `b` the other one
        let (b, ia) = match (unmarked(&iv), unmarked(&iu)) {
            (true, false) => (u, iv),
            (false, true) => (v, iu),
            _ => return Err(Reject::AdviceBranch),
        };
        let loops = u32::from(self.ex.has_loop(ia.root)?) + u32::from(self.ex.has_loop(ia.root_pair)?);
        if self.cfg.convention.marking_for_parity(loops) != self.ex.marked(b) {
            return Err(Reject::AdviceParityMismatch);
        }
        Ok(())
    }

    pub fn advice_test(&mut self, v: Label) -> Verdict {
        let (q0, a0) = self.counters();
        let r = self.advice(v);
        self.verdict(&r, q0, a0)
    }

    fn final_inner(&mut self) -> Res<()> {
        let n = self.ex.oracle().vertex_count();
        if !n.is_multiple_of(self.cfg.instance_unit()) {
            return Err(Reject::VertexCountNotMultiple);
        }
        for _ in 0..self.cfg.advice_tests() {
            let oracle = self.ex.oracle();
            let Some(v) = oracle.random_vertex(&mut self.ex.rng) else { break };
            self.advice(v)?;
        }
        Ok(())
    }

    /// The final test. Starts a fresh session.
    pub fn final_test(&mut self) -> Verdict {
        self.reset();
        let (q0, a0) = self.counters();
        let r = self.final_inner();
        self.verdict(&r, q0, a0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advice::AdviceMap;
    use crate::generators::{sample_instance, InstanceSpec, Variant};

    #[test]
    fn clean_g1_accepts_with_ground_truth() {
        let inst = sample_instance(InstanceSpec::new(2, Variant::G1, 3)).unwrap();
        let o = inst.oracle();
        let adv = AdviceMap::from_vertex_flags(&o, &inst.weld_flags());
        let mut ctx = TestContext::new(&o, &adv, TesterConfig::new(2, 0.5), seed::stream(0, "t", 0));
        let v = ctx.final_test();
        assert!(v.accept, "{v:?}");
        assert!(v.queries_used > 0);
        assert!(v.advice_queries > 0);
    }

    #[test]
    fn wrong_vertex_count_rejects() {
        let inst = sample_instance(InstanceSpec::new(3, Variant::G1, 3)).unwrap();
        let o = inst.oracle();
        let adv = AdviceMap::new();
        let mut ctx = TestContext::new(&o, &adv, TesterConfig::new(2, 0.5), seed::stream(0, "t", 0));
        assert_eq!(ctx.final_test().reason, Some(Reject::VertexCountNotMultiple));
    }
}
