//! Marking bits handed to the tester.

use std::cell::Cell;

use rustc_hash::FxHashMap;

use crate::graph::{Label, OracleHandle};
use crate::seed;

/// A per-label marking bit. Every evaluation is billed.
pub trait AdviceSource {
    fn mark(&self, label: Label) -> bool;

    /// Evaluations so far.
    fn evaluations(&self) -> u64;
}

/// A fixed map from labels to bits.
#[derive(Debug, Clone, Default)]
pub struct AdviceMap {
    bits: FxHashMap<Label, bool>,
    /// Modeled quantum queries spent producing the map.
    pub modeled_quantum_queries: u64,
    evaluations: Cell<u64>,
}

impl AdviceMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: Label, bit: bool) {
        self.bits.insert(label, bit);
    }

    pub fn get(&self, label: Label) -> Option<bool> {
        self.bits.get(&label).copied()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Labels in ascending order with their bits.
    pub fn sorted(&self) -> Vec<(Label, bool)> {
        let mut v: Vec<(Label, bool)> = self.bits.iter().map(|(&l, &b)| (l, b)).collect();
        v.sort_unstable();
        v
    }

    /// Translate per-vertex flags through an oracle's labeling.
    pub fn from_vertex_flags(oracle: &OracleHandle, flags: &[bool]) -> Self {
        let mut m = AdviceMap::new();
        for (v, &b) in flags.iter().enumerate() {
            m.insert(oracle.label_of(v), b);
        }
        m
    }

    /// Text form: one `<label> <0|1>` line per label, ascending.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.bits.len() * 10);
        for (l, b) in self.sorted() {
            out.push_str(&format!("{l} {}\n", u8::from(b)));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut m = AdviceMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(l), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(format!("line {}: expected `<label> <0|1>`", i + 1));
            };
            let l: u64 = l.parse().map_err(|e| format!("line {}: bad label: {e}", i + 1))?;
            let b = match b {
                "0" => false,
                "1" => true,
                other => return Err(format!("line {}: bit must be 0 or 1, found `{other}`", i + 1)),
            };
            m.insert(Label(l), b);
        }
        Ok(m)
    }
}

impl AdviceSource for AdviceMap {
    /// Labels missing from the map read as 0.
    fn mark(&self, label: Label) -> bool {
        self.evaluations.set(self.evaluations.get() + 1);
        self.get(label).unwrap_or(false)
    }

    fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }
}

/// Adversarial advice families used by the soundness harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    AllZero,
    AllOne,
    /// Independent fair bits derived from the seed.
    Random(u64),
}

#[derive(Debug)]
pub struct CorruptAdvice {
    kind: Corruption,
    evaluations: Cell<u64>,
}

impl CorruptAdvice {
    pub fn new(kind: Corruption) -> Self {
        CorruptAdvice { kind, evaluations: Cell::new(0) }
    }
}

impl AdviceSource for CorruptAdvice {
    fn mark(&self, label: Label) -> bool {
        self.evaluations.set(self.evaluations.get() + 1);
        match self.kind {
            Corruption::AllZero => false,
            Corruption::AllOne => true,
            Corruption::Random(s) => seed::coin(s, label.0),
        }
    }

    fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }
}

/// Another source with every bit flipped, or only the listed labels flipped.
#[derive(Debug)]
pub struct Flipped<'a, A: AdviceSource + ?Sized> {
    inner: &'a A,
    only: Option<Vec<Label>>,
}

impl<'a, A: AdviceSource + ?Sized> Flipped<'a, A> {
    pub fn all(inner: &'a A) -> Self {
        Flipped { inner, only: None }
    }

    pub fn labels(inner: &'a A, labels: Vec<Label>) -> Self {
        Flipped { inner, only: Some(labels) }
    }
}

impl<A: AdviceSource + ?Sized> AdviceSource for Flipped<'_, A> {
    fn mark(&self, label: Label) -> bool {
        let b = self.inner.mark(label);
        match &self.only {
            None => !b,
            Some(ls) if ls.contains(&label) => !b,
            Some(_) => b,
        }
    }

    fn evaluations(&self) -> u64 {
        self.inner.evaluations()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip_and_billing() {
        let mut m = AdviceMap::new();
        m.insert(Label(3), true);
        m.insert(Label(1), false);
        let t = m.to_text();
        assert_eq!(t, "1 0\n3 1\n");
        let back = AdviceMap::from_text(&t).unwrap();
        assert!(back.mark(Label(3)));
        assert!(!back.mark(Label(9)));
        assert_eq!(back.evaluations(), 2);
        assert!(AdviceMap::from_text("1 2\n").is_err());
    }

    #[test]
    fn flipped_views() {
        let mut m = AdviceMap::new();
        m.insert(Label(0), true);
        assert!(!Flipped::all(&m).mark(Label(0)));
        let f = Flipped::labels(&m, vec![Label(1)]);
        assert!(f.mark(Label(0)));
        assert!(f.mark(Label(1)));
    }
}
