//! Text formats: PACE `.gr`, DIMACS, plain edge lists and set-packing files.
//!
//! Vertex ids in files are 1-based for graphs and 0-based for set elements.

use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::oracle::SetPackingInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// `p tw n m` header, then `u v` lines.
    PaceGr,
    /// `p edge n m` header, then `e u v` lines.
    Dimacs,
    /// Bare `u v` lines; `n` is the largest id.
    EdgeList,
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pace" | "gr" | "pace-gr" => Ok(GraphFormat::PaceGr),
            "dimacs" => Ok(GraphFormat::Dimacs),
            "edges" | "edge-list" => Ok(GraphFormat::EdgeList),
            other => Err(format!("unknown graph format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected a header `{0}`")]
    MissingHeader(&'static str),
    #[error("malformed line `{0}`")]
    Malformed(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {0} outside 1..={1}")]
    OutOfRange(usize, usize),
    #[error("header announces {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("header announces {expected} sets, found {found}")]
    SetCount { expected: usize, found: usize },
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn is_comment(line: &str) -> bool {
    line.is_empty() || line.starts_with('#') || line.starts_with('c')
}

fn numbers(line: &str, lineno: usize) -> Result<Vec<usize>, ParseError> {
    line.split_whitespace().map(|t| t.parse().map_err(|_| err(lineno, ParseErrorKind::Malformed(line.to_string())))).collect()
}

/// Guesses the format from the first non-comment line.
pub fn detect_format(text: &str) -> GraphFormat {
    let first = text.lines().map(str::trim).find(|l| !is_comment(l));
    match first.map(|l| l.split_whitespace().take(2).collect::<Vec<_>>()) {
        Some(t) if t == ["p", "tw"] => GraphFormat::PaceGr,
        Some(t) if t.first() == Some(&"p") => GraphFormat::Dimacs,
        _ => GraphFormat::EdgeList,
    }
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = raw.trim();
        if is_comment(line) {
            continue;
        }
        let malformed = || err(lineno, ParseErrorKind::Malformed(line.to_string()));
        if line.starts_with('p') {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let want = match format {
                GraphFormat::PaceGr => "tw",
                GraphFormat::Dimacs => "edge",
                GraphFormat::EdgeList => return Err(malformed()),
            };
            if tokens.len() != 4 || tokens[1] != want || header.is_some() {
                return Err(malformed());
            }
            let n = tokens[2].parse().map_err(|_| malformed())?;
            let m = tokens[3].parse().map_err(|_| malformed())?;
            header = Some((n, m));
            continue;
        }
        let body = match format {
            GraphFormat::Dimacs => line.strip_prefix('e').ok_or_else(malformed)?,
            _ => line,
        };
        if format != GraphFormat::EdgeList && header.is_none() {
            let h = if format == GraphFormat::PaceGr { "p tw n m" } else { "p edge n m" };
            return Err(err(lineno, ParseErrorKind::MissingHeader(h)));
        }
        let ids = numbers(body, lineno)?;
        let [u, v] = ids[..] else { return Err(malformed()) };
        if u == 0 || v == 0 {
            return Err(err(lineno, ParseErrorKind::OutOfRange(0, header.map_or(0, |h| h.0))));
        }
        if u == v {
            return Err(err(lineno, ParseErrorKind::SelfLoop(u)));
        }
        if let Some((n, _)) = header {
            if u > n || v > n {
                return Err(err(lineno, ParseErrorKind::OutOfRange(u.max(v), n)));
            }
        }
        edges.push((u - 1, v - 1, lineno));
    }
    let n = match (format, header) {
        (GraphFormat::EdgeList, _) => edges.iter().map(|e| e.0.max(e.1) + 1).max().unwrap_or(0),
        (_, Some((n, m))) => {
            if edges.len() != m {
                let kind = ParseErrorKind::EdgeCount { expected: m, found: edges.len() };
                return Err(err(last_line, kind));
            }
            n
        }
        (GraphFormat::PaceGr, None) => return Err(err(last_line, ParseErrorKind::MissingHeader("p tw n m"))),
        (_, None) => return Err(err(last_line, ParseErrorKind::MissingHeader("p edge n m"))),
    };
    Graph::from_edges(n, edges.iter().map(|&(u, v, _)| (u, v))).map_err(|e| match e {
        GraphError::SelfLoop(v) => err(last_line, ParseErrorKind::SelfLoop(v + 1)),
        GraphError::OutOfRange { vertex, n } => err(last_line, ParseErrorKind::OutOfRange(vertex + 1, n)),
    })
}

pub fn write_graph(g: &Graph, format: GraphFormat) -> String {
    let mut s = match format {
        GraphFormat::PaceGr => format!("p tw {} {}\n", g.n(), g.m()),
        GraphFormat::Dimacs => format!("p edge {} {}\n", g.n(), g.m()),
        GraphFormat::EdgeList => String::new(),
    };
    for (u, v) in g.edges() {
        if format == GraphFormat::Dimacs {
            s.push_str("e ");
        }
        s.push_str(&format!("{} {}\n", u + 1, v + 1));
    }
    s
}

/// First line `|X| |F| k`, then one line of 0-based elements per set.
pub fn parse_set_packing(text: &str) -> Result<SetPackingInstance, ParseError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim_start().starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| err(1, ParseErrorKind::MissingHeader("|X| |F| k")))?;
    let h = numbers(header.trim(), hline + 1)?;
    let [ground, sets, k] = h[..] else {
        return Err(err(hline + 1, ParseErrorKind::MissingHeader("|X| |F| k")));
    };
    let mut family = Vec::with_capacity(sets);
    for (i, line) in lines {
        if family.len() == sets && line.trim().is_empty() {
            continue;
        }
        let mut set = numbers(line.trim(), i + 1)?;
        if let Some(&bad) = set.iter().find(|&&x| x >= ground) {
            return Err(err(i + 1, ParseErrorKind::OutOfRange(bad, ground.saturating_sub(1))));
        }
        set.sort_unstable();
        set.dedup();
        family.push(set);
    }
    if family.len() != sets {
        let last = text.lines().count();
        return Err(err(last, ParseErrorKind::SetCount { expected: sets, found: family.len() }));
    }
    Ok(SetPackingInstance { ground, family, k })
}

pub fn write_set_packing(inst: &SetPackingInstance) -> String {
    let mut s = format!("{} {} {}\n", inst.ground, inst.family.len(), inst.k);
    for set in &inst.family {
        let items: Vec<String> = set.iter().map(usize::to_string).collect();
        s.push_str(&items.join(" "));
        s.push('\n');
    }
    s
}
