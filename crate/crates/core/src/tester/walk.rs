//! Cached neighbor access and the non-backtracking walk primitives
//! FindParent and FindRootPath.

use std::rc::Rc;

use rand::Rng as _;
use rustc_hash::FxHashMap;

use super::Reject;
use crate::advice::AdviceSource;
use crate::graph::{AdjacencyOracle, Answer, EdgeKind, Label};
use crate::seed;

/// Which edges a test looks at. Double edges and self-loops are always
/// ignored; `Tree` also drops edges between two marked vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Filter {
    Singles,
    Tree,
}

/// At most four filtered neighbors (more single edges is an immediate reject).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Nbrs {
    len: u8,
    items: [Label; 4],
}

impl Nbrs {
    fn new() -> Self {
        Nbrs { len: 0, items: [Label(0); 4] }
    }

    fn push(&mut self, l: Label) {
        self.items[self.len as usize] = l;
        self.len += 1;
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.items[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parent {
    Root,
    Parent(Label),
}

/// Neighbor lists fetched through the oracle, cached for the lifetime of the
/// explorer so a label is queried at most once.
pub struct Explorer<'a> {
    oracle: &'a dyn AdjacencyOracle,
    advice: Option<&'a dyn AdviceSource>,
    pub k: u32,
    pub rng: seed::Rng,
    answers: FxHashMap<Label, Rc<Answer>>,
    singles: FxHashMap<Label, Nbrs>,
    tree: FxHashMap<Label, Nbrs>,
    marks: FxHashMap<Label, bool>,
    /// FindParent ignores a missing leaf at the end of a walk.
    pub lenient_leaf: bool,
}

impl<'a> Explorer<'a> {
    pub fn new(oracle: &'a dyn AdjacencyOracle, advice: Option<&'a dyn AdviceSource>, k: u32, rng: seed::Rng) -> Self {
        Explorer {
            oracle,
            advice,
            k,
            rng,
            answers: FxHashMap::default(),
            singles: FxHashMap::default(),
            tree: FxHashMap::default(),
            marks: FxHashMap::default(),
            lenient_leaf: false,
        }
    }

    pub fn oracle(&self) -> &'a dyn AdjacencyOracle {
        self.oracle
    }

    /// Forget everything learned so far.
    pub fn clear(&mut self) {
        self.answers.clear();
        self.singles.clear();
        self.tree.clear();
        self.marks.clear();
    }

    pub fn answer(&mut self, l: Label) -> Result<Rc<Answer>, Reject> {
        if let Some(a) = self.answers.get(&l) {
            return Ok(Rc::clone(a));
        }
        let a = Rc::new(self.oracle.query(l).map_err(|_| Reject::UnknownLabel)?);
        self.answers.insert(l, Rc::clone(&a));
        Ok(a)
    }

    pub fn has_loop(&mut self, l: Label) -> Result<bool, Reject> {
        Ok(self.answer(l)?.has_loop)
    }

    pub fn doubles(&mut self, l: Label) -> Result<Vec<Label>, Reject> {
        Ok(self.answer(l)?.doubles().collect())
    }

    pub fn marked(&mut self, l: Label) -> bool {
        let Some(adv) = self.advice else { return false };
        *self.marks.entry(l).or_insert_with(|| adv.mark(l))
    }

    /// Single-edge neighbors, self-loop excluded.
    pub fn singles(&mut self, l: Label) -> Result<Nbrs, Reject> {
        if let Some(&n) = self.singles.get(&l) {
            return Ok(n);
        }
        let a = self.answer(l)?;
        let mut n = Nbrs::new();
        for &(w, kind) in &a.neighbors {
            if kind == EdgeKind::Single && w != l {
                if n.len() == 4 {
                    return Err(Reject::TooManySingles);
                }
                n.push(w);
            }
        }
        self.singles.insert(l, n);
        Ok(n)
    }

    pub fn nbrs(&mut self, l: Label, f: Filter) -> Result<Nbrs, Reject> {
        match f {
            Filter::Singles => self.singles(l),
            Filter::Tree => {
                if let Some(&n) = self.tree.get(&l) {
                    return Ok(n);
                }
                let s = self.singles(l)?;
                let n = if self.marked(l) {
                    let mut out = Nbrs::new();
                    for &w in s.as_slice() {
                        if !self.marked(w) {
                            out.push(w);
                        }
                    }
                    out
                } else {
                    s
                };
                self.tree.insert(l, n);
                Ok(n)
            }
        }
    }

    pub fn deg(&mut self, l: Label, f: Filter) -> Result<usize, Reject> {
        Ok(self.nbrs(l, f)?.len())
    }

    /// Uniform neighbor of `cur` other than `prev`, if any.
    pub fn step(&mut self, prev: Label, cur: Label, f: Filter) -> Result<Option<Label>, Reject> {
        let n = self.nbrs(cur, f)?;
        let mut cand = [Label(0); 4];
        let mut c = 0;
        for &w in n.as_slice() {
            if w != prev {
                cand[c] = w;
                c += 1;
            }
        }
        Ok((c > 0).then(|| cand[self.rng.random_range(0..c)]))
    }

    pub fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.rng.random_range(0..items.len())]
    }

    /// One FindParent call.
    pub fn find_parent(&mut self, v: Label, f: Filter) -> Result<Parent, Reject> {
        let k = self.k as usize;
        let d = self.deg(v, f)?;
        if d == 4 {
            return Ok(Parent::Root);
        }
        if d != 1 && d != 3 {
            return Err(Reject::BannedDegree);
        }
        let adj = self.nbrs(v, f)?;
        let mut root: Option<Label> = None;
        let mut walks: Vec<(usize, Vec<Label>)> = Vec::with_capacity(d);
        for &w in adj.as_slice() {
            let mut path = Vec::with_capacity(2 * k + 1);
            path.push(v);
            path.push(w);
            let mut ell = 2 * k;
            for t in 1..2 * k {
                let pt = path[t];
                let dt = self.deg(pt, f)?;
                if dt == 1 {
                    ell = t;
                    break;
                }
                if dt == 4 {
                    if root.is_none() {
                        root = Some(pt);
                    } else {
                        return Err(Reject::SecondRoot);
                    }
                }
                match self.step(path[t - 1], pt, f)? {
                    Some(next) => path.push(next),
                    None => {
                        ell = t;
                        break;
                    }
                }
            }
            if self.deg(path[ell], f)? > 1 && !self.lenient_leaf {
                return Err(Reject::NoLeaf);
            }
            walks.push((ell, path));
        }
        // longest walk, ties to the smallest label
        let best = (0..walks.len()).max_by(|&a, &b| walks[a].0.cmp(&walks[b].0).then(walks[b].1[1].cmp(&walks[a].1[1]))).expect("degree is 1 or 3");
        let u = walks[best].1[1];
        let mut others = walks.iter().enumerate().filter(|&(i, _)| i != best).map(|(_, w)| w.0);
        if let Some(first) = others.next() {
            if others.any(|l| l != first) {
                return Err(Reject::LengthMismatch);
            }
        }
        if let Some(r) = root {
            let (ell, path) = &walks[best];
            if !path[1..=*ell].contains(&r) {
                return Err(Reject::RootSkip);
            }
        }
        Ok(Parent::Parent(u))
    }

    /// FindRootPath: `(p_0 = v, ..., p_l)` ending at a degree-4 vertex.
    pub fn find_root_path(&mut self, v: Label, f: Filter) -> Result<Vec<Label>, Reject> {
        let k = self.k as usize;
        let mut path = vec![v];
        for _ in 0..k {
            match self.find_parent(*path.last().expect("non-empty"), f)? {
                // the previous vertex has degree 4: it is the root
                Parent::Root => break,
                Parent::Parent(u) => path.push(u),
            }
        }
        if self.deg(*path.last().expect("non-empty"), f)? != 4 {
            return Err(Reject::NoRootFound);
        }
        Ok(path)
    }

    /// Non-backtracking walk of at most `len` steps from `start` whose first
    /// step is `first`. Stops early at a vertex with no continuation.
    pub fn walk(&mut self, start: Label, first: Label, len: usize, f: Filter) -> Result<Vec<Label>, Reject> {
        let mut path = Vec::with_capacity(len + 1);
        path.push(start);
        path.push(first);
        while path.len() <= len {
            let t = path.len() - 1;
            match self.step(path[t - 1], path[t], f)? {
                Some(next) => path.push(next),
                None => break,
            }
        }
        Ok(path)
    }
}
