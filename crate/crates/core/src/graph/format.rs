//! Versioned text format.
//!
//! ```text
//! weldlab-graph v1 n=<N> k=<K> variant=<g1|g2|yes|custom>
//! <id> role=<body|antenna|root> loop=<0|1> : <nbr>[x2] <nbr> ...
//! ```
//!
//! One line per vertex in id order. Neighbor lists are sorted ascending, a
//! double edge carries the `x2` suffix and a self-loop is written as the
//! vertex's own id.

use std::fmt::Write as _;

use thiserror::Error;

use super::{pack, EdgeKind, GraphError, MultiGraph, VertexRole, DOUBLE_BIT, MAX_DEGREE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariantTag {
    G1,
    G2,
    Yes,
    Custom,
}

impl VariantTag {
    pub fn as_str(self) -> &'static str {
        match self {
            VariantTag::G1 => "g1",
            VariantTag::G2 => "g2",
            VariantTag::Yes => "yes",
            VariantTag::Custom => "custom",
        }
    }
}

impl std::str::FromStr for VariantTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "g1" => Ok(VariantTag::G1),
            "g2" => Ok(VariantTag::G2),
            "yes" => Ok(VariantTag::Yes),
            "custom" => Ok(VariantTag::Custom),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphMeta {
    pub k: u32,
    pub variant: VariantTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub meta: GraphMeta,
    pub graph: MultiGraph,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn perr(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

pub fn serialize(graph: &MultiGraph, meta: GraphMeta) -> String {
    let n = graph.vertex_count();
    let mut out = String::with_capacity(32 + n * 40);
    let _ = writeln!(out, "weldlab-graph v1 n={n} k={} variant={}", meta.k, meta.variant.as_str());
    for v in 0..n {
        let _ = write!(out, "{v} role={} loop={} :", graph.role(v).as_str(), u8::from(graph.has_loop(v)));
        let mut row: Vec<(usize, EdgeKind)> = graph.neighbors(v).collect();
        if graph.has_loop(v) {
            row.push((v, EdgeKind::Single));
        }
        row.sort_unstable();
        for (w, kind) in row {
            match kind {
                EdgeKind::Single => {
                    let _ = write!(out, " {w}");
                }
                EdgeKind::Double => {
                    let _ = write!(out, " {w}x2");
                }
            }
        }
        out.push('\n');
    }
    out
}

fn field<'a>(tok: Option<&'a str>, key: &str, line: usize) -> Result<&'a str, ParseError> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing `{key}=`")))?;
    tok.strip_prefix(key).and_then(|t| t.strip_prefix('=')).ok_or_else(|| perr(line, format!("expected `{key}=...`, found `{tok}`")))
}

pub fn deserialize(text: &str) -> Result<GraphFile, ParseError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("weldlab-graph") {
        return Err(perr(1, "missing `weldlab-graph` magic"));
    }
    if toks.next() != Some("v1") {
        return Err(perr(1, "unsupported version (expected v1)"));
    }
    let n: usize = field(toks.next(), "n", 1)?.parse().map_err(|e| perr(1, format!("bad n: {e}")))?;
    let k: u32 = field(toks.next(), "k", 1)?.parse().map_err(|e| perr(1, format!("bad k: {e}")))?;
    let variant: VariantTag = field(toks.next(), "variant", 1)?.parse().map_err(|e: String| perr(1, e))?;
    if toks.next().is_some() {
        return Err(perr(1, "trailing header tokens"));
    }
    if n >= DOUBLE_BIT as usize {
        return Err(perr(1, "vertex count too large"));
    }

    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0u32);
    let mut entries = Vec::new();
    let mut roles = Vec::with_capacity(n);
    let mut loops = Vec::with_capacity(n);
    for v in 0..n {
        let lineno = v + 2;
        let line = lines.next().ok_or_else(|| perr(lineno, format!("expected {n} vertex lines, file ends early")))?;
        let (head, tail) = line.split_once(':').ok_or_else(|| perr(lineno, "missing `:`"))?;
        let mut h = head.split_whitespace();
        let id: usize = h.next().ok_or_else(|| perr(lineno, "missing vertex id"))?.parse().map_err(|e| perr(lineno, format!("bad vertex id: {e}")))?;
        if id != v {
            return Err(perr(lineno, format!("expected vertex {v}, found {id}")));
        }
        let role: VertexRole = field(h.next(), "role", lineno)?.parse().map_err(|e: String| perr(lineno, e))?;
        let has_loop = match field(h.next(), "loop", lineno)? {
            "0" => false,
            "1" => true,
            other => return Err(perr(lineno, format!("loop must be 0 or 1, found `{other}`"))),
        };
        let mut saw_loop = false;
        let mut degree = usize::from(has_loop);
        for tok in tail.split_whitespace() {
            let (num, kind) = match tok.strip_suffix("x2") {
                Some(num) => (num, EdgeKind::Double),
                None => (tok, EdgeKind::Single),
            };
            let w: usize = num.parse().map_err(|e| perr(lineno, format!("bad neighbor `{tok}`: {e}")))?;
            if w >= n {
                return Err(perr(lineno, format!("neighbor {w} out of range")));
            }
            if w == v {
                if kind == EdgeKind::Double || saw_loop || !has_loop {
                    return Err(perr(lineno, "self-loop entry inconsistent with loop flag"));
                }
                saw_loop = true;
                continue;
            }
            degree += kind.weight();
            entries.push(pack(w, kind));
        }
        if has_loop && !saw_loop {
            return Err(perr(lineno, "loop=1 but own id missing from neighbor list"));
        }
        if degree > MAX_DEGREE {
            return Err(perr(lineno, format!("degree {degree} exceeds bound {MAX_DEGREE}")));
        }
        offsets.push(entries.len() as u32);
        roles.push(role);
        loops.push(has_loop);
    }
    if let Some((i, _)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
        return Err(perr(n + 2 + i, "unexpected trailing content"));
    }
    let graph = MultiGraph::from_rows(offsets, entries, roles, loops).map_err(|e| {
        let line = match &e {
            GraphError::Asymmetric { from, .. } => from + 2,
            GraphError::RootShape { vertex } | GraphError::DegreeBound { vertex, .. } => vertex + 2,
            _ => 1,
        };
        perr(line, e.to_string())
    })?;
    Ok(GraphFile { meta: GraphMeta { k, variant }, graph })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn meta() -> GraphMeta {
        GraphMeta { k: 0, variant: VariantTag::Custom }
    }

    #[test]
    fn empty_graph_is_header_only() {
        let text = serialize(&MultiGraph::empty(), meta());
        assert_eq!(text, "weldlab-graph v1 n=0 k=0 variant=custom\n");
        let back = deserialize(&text).unwrap();
        assert!(back.graph.is_empty());
    }

    #[test]
    fn writes_canonical_lines() {
        let mut b = GraphBuilder::new(3);
        b.add_single(0, 2).add_double(0, 1).set_loop(0, true).set_role(1, VertexRole::Antenna);
        let g = b.build().unwrap();
        let text = serialize(&g, meta());
        assert_eq!(
            text,
            "weldlab-graph v1 n=3 k=0 variant=custom\n\
             0 role=body loop=1 : 0 1x2 2\n\
             1 role=antenna loop=0 : 0x2\n\
             2 role=body loop=0 : 0\n"
        );
        assert_eq!(deserialize(&text).unwrap().graph, g);
    }

    #[test]
    fn rejects_degree_violation_with_line() {
        let mut text = String::from("weldlab-graph v1 n=7 k=0 variant=custom\n0 role=body loop=0 : 1 2 3 4 5 6\n");
        for v in 1..7 {
            text.push_str(&format!("{v} role=body loop=0 : 0\n"));
        }
        let err = deserialize(&text).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("degree 6"));
    }

    #[test]
    fn rejects_asymmetric_lists() {
        let text = "weldlab-graph v1 n=2 k=0 variant=custom\n0 role=body loop=0 : 1\n1 role=body loop=0 :\n";
        let err = deserialize(text).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn rejects_bad_header() {
        assert_eq!(deserialize("weldlab-graph v2 n=0 k=0 variant=g1\n").unwrap_err().line, 1);
        assert_eq!(deserialize("hello\n").unwrap_err().line, 1);
        assert!(deserialize("weldlab-graph v1 n=1 k=0 variant=g1\n").is_err());
    }
}
