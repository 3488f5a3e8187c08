//! Line-oriented text formats for graphs, pattern sets and operation
//! scripts. Tokens are whitespace-separated and `#` starts a comment.
//!
//! ```text
//! graph 2          patterns 2        + 0 1 2
//! v 0              pattern tri       - 0 1
//! v 1              v 0               c 0 1 1
//! e 0 1 2          v 1               +v 9
//!                  v 2               -v 9
//!                  e 0 1 1           q tri
//!                  e 1 2 1
//!                  e 0 2 1
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use crate::graph::{Color, ColoredGraph, VertexId};
use crate::pattern::{Pattern, PlanKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    AddEdge(VertexId, VertexId, Color),
    RemoveEdge(VertexId, VertexId),
    Recolor(VertexId, VertexId, Color),
    AddVertex(VertexId),
    RemoveVertex(VertexId),
    Query(String),
}

impl std::fmt::Display for Op {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Op::AddEdge(u, v, c) => write!(f, "+ {u} {v} {c}"),
            Op::RemoveEdge(u, v) => write!(f, "- {u} {v}"),
            Op::Recolor(u, v, c) => write!(f, "c {u} {v} {c}"),
            Op::AddVertex(v) => write!(f, "+v {v}"),
            Op::RemoveVertex(v) => write!(f, "-v {v}"),
            Op::Query(name) => write!(f, "q {name}"),
        }
    }
}

/// Splits a derived query name `base.sub` or `base.hom` into its base and
/// plan kind.
pub fn derived_name(name: &str) -> Option<(&str, PlanKind)> {
    if let Some(base) = name.strip_suffix(".sub") {
        Some((base, PlanKind::Sub))
    } else {
        name.strip_suffix(".hom").map(|base| (base, PlanKind::Hom))
    }
}

/// Non-empty lines with comments stripped, as (1-based number, tokens).
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn num<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse().or_else(|_| err(line, format!("invalid {what} {tok:?}")))
}

fn arity(line: usize, toks: &[&str], n: usize) -> Result<(), ParseError> {
    if toks.len() != n {
        return err(
            line,
            format!("{:?} expects {} argument(s), found {}", toks[0], n - 1, toks.len() - 1),
        );
    }
    Ok(())
}

pub fn parse_graph(text: &str) -> Result<ColoredGraph, ParseError> {
    let mut g: Option<ColoredGraph> = None;
    for (ln, toks) in lines(text) {
        match (toks[0], &mut g) {
            ("graph", None) => {
                arity(ln, &toks, 2)?;
                let k: Color = num(ln, toks[1], "color count")?;
                if k == 0 {
                    return err(ln, "color count must be at least 1");
                }
                g = Some(ColoredGraph::new(k));
            }
            ("graph", Some(_)) => return err(ln, "duplicate header"),
            (_, None) => return err(ln, "expected header `graph <k>`"),
            ("v", Some(g)) => {
                arity(ln, &toks, 2)?;
                let id = num(ln, toks[1], "vertex id")?;
                g.insert_vertex(id).or_else(|e| err(ln, e.to_string()))?;
            }
            ("e", Some(g)) => {
                arity(ln, &toks, 4)?;
                let u = num(ln, toks[1], "vertex id")?;
                let v = num(ln, toks[2], "vertex id")?;
                let c = num(ln, toks[3], "color")?;
                g.add_edge(u, v, c).or_else(|e| err(ln, e.to_string()))?;
            }
            (other, _) => return err(ln, format!("unknown directive {other:?}")),
        }
    }
    g.ok_or(ParseError {
        line: 0,
        message: "empty graph file".into(),
    })
}

pub fn write_graph(g: &ColoredGraph) -> String {
    let mut s = format!("graph {}\n", g.k());
    for v in g.vertices() {
        writeln!(s, "v {v}").expect("string write");
    }
    for (u, v, c) in g.edges() {
        writeln!(s, "e {u} {v} {c}").expect("string write");
    }
    s
}

/// A parsed pattern file: the optional declared color count and the named
/// patterns in file order. Vertex ids inside a block are relabeled to
/// `0..n` in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    pub k: Option<Color>,
    pub patterns: Vec<(String, Pattern)>,
}

pub fn parse_patterns(text: &str) -> Result<PatternSet, ParseError> {
    struct Block {
        name: String,
        line: usize,
        ids: Vec<u32>,
        edges: Vec<(usize, usize, Color)>,
    }
    fn finish(b: Block) -> Result<(String, Pattern), ParseError> {
        let p = Pattern::from_edges(b.ids.len(), &b.edges).or_else(|e| err(b.line, format!("pattern {}: {e}", b.name)))?;
        Ok((b.name, p))
    }
    let mut k = None;
    let mut out: Vec<(String, Pattern)> = Vec::new();
    let mut cur: Option<Block> = None;
    let mut seen_any = false;
    for (ln, toks) in lines(text) {
        match toks[0] {
            "patterns" => {
                arity(ln, &toks, 2)?;
                if seen_any {
                    return err(ln, "`patterns` header must come first");
                }
                k = Some(num(ln, toks[1], "color count")?);
            }
            "pattern" => {
                arity(ln, &toks, 2)?;
                if let Some(b) = cur.take() {
                    out.push(finish(b)?);
                }
                let name = toks[1].to_string();
                if out.iter().any(|(n, _)| *n == name) {
                    return err(ln, format!("duplicate pattern name {name:?}"));
                }
                cur = Some(Block {
                    name,
                    line: ln,
                    ids: Vec::new(),
                    edges: Vec::new(),
                });
            }
            "v" => {
                arity(ln, &toks, 2)?;
                let Some(b) = cur.as_mut() else {
                    return err(ln, "vertex outside a pattern block");
                };
                let id: u32 = num(ln, toks[1], "vertex id")?;
                if b.ids.contains(&id) {
                    return err(ln, format!("duplicate vertex {id}"));
                }
                b.ids.push(id);
            }
            "e" => {
                arity(ln, &toks, 4)?;
                let Some(b) = cur.as_mut() else {
                    return err(ln, "edge outside a pattern block");
                };
                let idx = |tok: &str| -> Result<usize, ParseError> {
                    let id: u32 = num(ln, tok, "vertex id")?;
                    b.ids
                        .iter()
                        .position(|&x| x == id)
                        .ok_or(ParseError {
                            line: ln,
                            message: format!("unknown vertex {id}"),
                        })
                };
                let u = idx(toks[1])?;
                let v = idx(toks[2])?;
                let c: Color = num(ln, toks[3], "color")?;
                if c == 0 {
                    return err(ln, "edge colors start at 1");
                }
                b.edges.push((u, v, c));
            }
            other => return err(ln, format!("unknown directive {other:?}")),
        }
        seen_any = true;
    }
    if let Some(b) = cur.take() {
        out.push(finish(b)?);
    }
    Ok(PatternSet { k, patterns: out })
}

pub fn parse_ops(text: &str) -> Result<Vec<Op>, ParseError> {
    let mut ops = Vec::new();
    for (ln, toks) in lines(text) {
        let op = match toks[0] {
            "+" => {
                arity(ln, &toks, 4)?;
                Op::AddEdge(num(ln, toks[1], "vertex id")?, num(ln, toks[2], "vertex id")?, num(ln, toks[3], "color")?)
            }
            "-" => {
                arity(ln, &toks, 3)?;
                Op::RemoveEdge(num(ln, toks[1], "vertex id")?, num(ln, toks[2], "vertex id")?)
            }
            "c" => {
                arity(ln, &toks, 4)?;
                Op::Recolor(num(ln, toks[1], "vertex id")?, num(ln, toks[2], "vertex id")?, num(ln, toks[3], "color")?)
            }
            "+v" => {
                arity(ln, &toks, 2)?;
                Op::AddVertex(num(ln, toks[1], "vertex id")?)
            }
            "-v" => {
                arity(ln, &toks, 2)?;
                Op::RemoveVertex(num(ln, toks[1], "vertex id")?)
            }
            "q" => {
                arity(ln, &toks, 2)?;
                Op::Query(toks[1].to_string())
            }
            other => return err(ln, format!("unknown operation {other:?}")),
        };
        ops.push(op);
    }
    Ok(ops)
}

pub fn write_ops(ops: &[Op]) -> String {
    ops.iter().map(|op| format!("{op}\n")).collect()
}
