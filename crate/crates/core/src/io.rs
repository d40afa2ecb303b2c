//! Line-oriented text formats. Blank lines and lines starting with `#` are
//! ignored everywhere.
//!
//! | file        | grammar                                            |
//! |-------------|----------------------------------------------------|
//! | instance    | `tb <n> <m> <s> <t>` then `m` lines `e <u> <v>`    |
//! | protocol    | `o <v>: <c1> <c2> ...`                             |
//! | N3DM        | `n3dm <m> <T> [<lambda>]` then `w ...`, `x ...`, `y ...` |
//! | partition   | `a <i> <w> <x> <y>` (1-based)                      |
//! | assignment  | `v <lit> <lit> ... 0`                              |

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError, Instance, VertexId};
use crate::protocol::{Protocol, ProtocolError};
use crate::reduction_matching::{AlmostInstance, MatchingError, N3dmInstance, Partition, Triple};
use crate::sat::Assignment;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("disconnected graph")]
    Disconnected,
    #[error("vertex id {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("variable {0} unassigned")]
    Unassigned(usize),
    #[error(transparent)]
    Graph(GraphError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

impl From<GraphError> for ParseError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Disconnected => ParseError::Disconnected,
            GraphError::VertexOutOfRange(v) => ParseError::VertexOutOfRange(v),
            other => ParseError::Graph(other),
        }
    }
}

/// Non-comment lines with their 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn numbers<T: std::str::FromStr>(line: usize, fields: &[&str]) -> Result<Vec<T>, ParseError> {
    fields
        .iter()
        .map(|f| f.parse().map_err(|_| syntax(line, format!("bad number `{f}`"))))
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = records(text);
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "missing `tb` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "tb" {
        return Err(syntax(hl, "expected `tb <n> <m> <s> <t>`"));
    }
    let [n, m, s, t]: [usize; 4] = numbers(hl, &fields[1..])?.try_into().expect("four fields");
    let mut graph = Graph::new(n);
    let mut count = 0;
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "e" {
            return Err(syntax(ln, "expected `e <u> <v>`"));
        }
        let [u, v]: [usize; 2] = numbers(ln, &fields[1..])?.try_into().expect("two fields");
        for x in [u, v] {
            if !(1..=n).contains(&x) {
                return Err(ParseError::VertexOutOfRange(x));
            }
        }
        if u >= v {
            return Err(syntax(ln, "edge endpoints must satisfy u < v"));
        }
        graph
            .add_edge(u, v)
            .map_err(|e| syntax(ln, e.to_string()))?;
        count += 1;
    }
    if count != m {
        return Err(syntax(hl, format!("header declares {m} edges, found {count}")));
    }
    Ok(Instance::new(graph, s, t)?)
}

pub fn render_instance(inst: &Instance) -> String {
    let g = inst.graph();
    let mut edges: Vec<(VertexId, VertexId)> =
        g.edges().iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    edges.sort_unstable();
    let mut out = format!(
        "tb {} {} {} {}\n",
        g.order(),
        edges.len(),
        inst.source(),
        inst.deadline()
    );
    for (u, v) in edges {
        let _ = writeln!(out, "e {u} {v}");
    }
    out
}

/// Parses a protocol for a graph of `order` vertices rooted at `source`.
/// Vertices without a line have no children.
pub fn parse_protocol(text: &str, order: usize, source: VertexId) -> Result<Protocol, ParseError> {
    let mut lists = Vec::new();
    let mut listed = vec![false; order + 1];
    for (ln, line) in records(text) {
        let rest = line
            .strip_prefix('o')
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| syntax(ln, "expected `o <v>: <children>`"))?;
        let (head, tail) = rest
            .split_once(':')
            .ok_or_else(|| syntax(ln, "missing `:`"))?;
        let v: VertexId = head
            .trim()
            .parse()
            .map_err(|_| syntax(ln, format!("bad vertex `{}`", head.trim())))?;
        if !(1..=order).contains(&v) {
            return Err(ParseError::VertexOutOfRange(v));
        }
        if std::mem::replace(&mut listed[v], true) {
            return Err(syntax(ln, format!("vertex {v} listed twice")));
        }
        let kids: Vec<VertexId> = numbers(ln, &tail.split_whitespace().collect::<Vec<_>>())?;
        lists.push((v, kids));
    }
    Ok(Protocol::from_children(order, source, lists)?)
}

/// One line per vertex with children, in id order.
pub fn render_protocol(p: &Protocol) -> String {
    let mut out = String::new();
    for (v, kids) in p.child_lists() {
        if kids.is_empty() {
            continue;
        }
        let _ = write!(out, "o {v}:");
        for c in kids {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    out
}

/// An N3DM file holds an exact instance, or an almost instance when the
/// header carries `lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum N3dmFile {
    Exact(N3dmInstance),
    Almost(AlmostInstance),
}

pub fn parse_n3dm(text: &str) -> Result<N3dmFile, ParseError> {
    let mut lines = records(text);
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "missing `n3dm` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if !(3..=4).contains(&fields.len()) || fields[0] != "n3dm" {
        return Err(syntax(hl, "expected `n3dm <m> <T> [<lambda>]`"));
    }
    let head: Vec<usize> = numbers(hl, &fields[1..])?;
    let m = head[0];
    let mut sets: [Option<Vec<usize>>; 3] = [None, None, None];
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let slot = match fields[0] {
            "w" => 0,
            "x" => 1,
            "y" => 2,
            other => return Err(syntax(ln, format!("unknown record `{other}`"))),
        };
        let sizes: Vec<usize> = numbers(ln, &fields[1..])?;
        if sizes.len() != m {
            return Err(syntax(ln, format!("expected {m} sizes, found {}", sizes.len())));
        }
        if sets[slot].replace(sizes).is_some() {
            return Err(syntax(ln, format!("`{}` given twice", fields[0])));
        }
    }
    let [w, x, y] = sets;
    let missing = |c| syntax(hl, format!("missing `{c}` line"));
    let (w, x, y) = (
        w.ok_or_else(|| missing('w'))?,
        x.ok_or_else(|| missing('x'))?,
        y.ok_or_else(|| missing('y'))?,
    );
    Ok(match head.get(2) {
        None => N3dmFile::Exact(N3dmInstance::new(w, x, y, head[1])?),
        Some(&lambda) => N3dmFile::Almost(AlmostInstance::new(w, x, y, head[1], lambda)?),
    })
}

fn render_sets(header: String, w: &[usize], x: &[usize], y: &[usize]) -> String {
    let mut out = header;
    for (tag, sizes) in [('w', w), ('x', x), ('y', y)] {
        out.push(tag);
        for s in sizes {
            let _ = write!(out, " {s}");
        }
        out.push('\n');
    }
    out
}

pub fn render_n3dm(inst: &N3dmInstance) -> String {
    render_sets(
        format!("n3dm {} {}\n", inst.m(), inst.target()),
        inst.w(),
        inst.x(),
        inst.y(),
    )
}

pub fn render_almost(inst: &AlmostInstance) -> String {
    render_sets(
        format!("n3dm {} {} {}\n", inst.m(), inst.target(), inst.lambda()),
        inst.w(),
        inst.x(),
        inst.y(),
    )
}

pub fn parse_partition(text: &str, m: usize) -> Result<Partition, ParseError> {
    let mut triples = Vec::new();
    for (ln, line) in records(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "a" {
            return Err(syntax(ln, "expected `a <i> <w> <x> <y>`"));
        }
        let v: Vec<usize> = numbers(ln, &fields[1..])?;
        if v.contains(&0) {
            return Err(syntax(ln, "indices are 1-based"));
        }
        triples.push(Triple {
            w: v[1] - 1,
            x: v[2] - 1,
            y: v[3] - 1,
        });
    }
    Ok(Partition::new(m, triples)?)
}

pub fn render_partition(p: &Partition) -> String {
    let mut out = String::new();
    for (i, t) in p.triples().iter().enumerate() {
        let _ = writeln!(out, "a {} {} {} {}", i + 1, t.w + 1, t.x + 1, t.y + 1);
    }
    out
}

/// Reads `v` lines of signed literals; every variable `1..=n` must appear
/// exactly once.
pub fn parse_assignment(text: &str, n: usize) -> Result<Assignment, ParseError> {
    let mut values: Vec<Option<bool>> = vec![None; n];
    for (ln, line) in records(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] != "v" {
            return Err(syntax(ln, "expected `v <literals> 0`"));
        }
        for lit in numbers::<i64>(ln, &fields[1..])? {
            if lit == 0 {
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > n {
                return Err(syntax(ln, format!("variable {var} exceeds {n}")));
            }
            if values[var - 1].replace(lit > 0).is_some() {
                return Err(syntax(ln, format!("variable {var} assigned twice")));
            }
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or(ParseError::Unassigned(i + 1)))
        .collect::<Result<Vec<_>, _>>()
        .map(Assignment::new)
}

pub fn render_assignment(a: &Assignment) -> String {
    let mut out = String::from("v");
    for (i, &v) in a.values().iter().enumerate() {
        let lit = i as i64 + 1;
        let _ = write!(out, " {}", if v { lit } else { -lit });
    }
    out.push_str(" 0\n");
    out
}
