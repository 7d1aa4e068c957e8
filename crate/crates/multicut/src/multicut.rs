//! Solutions: validation, the canonical connected-part form, and conversions.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    VertexTwoCrossing,
    DisconnectedPart,
    EmptyPart,
    TooFewParts,
}

/// Why a vertex-to-part mapping is not a matching multicut.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{kind:?} (witness {witness:?})")]
pub struct Violation {
    pub kind: ViolationKind,
    pub witness: Vec<usize>,
}

impl Violation {
    fn new(kind: ViolationKind, witness: Vec<usize>) -> Self {
        Violation { kind, witness }
    }
}

/// Checks that `part_of` is a matching multicut with at least `ell` non-empty parts.
///
/// Parts are the distinct labels `0..=max`; parts need not be connected.
pub fn validate_multicut(g: &Graph, part_of: &[usize], ell: usize) -> Result<(), Violation> {
    assert_eq!(part_of.len(), g.n(), "part mapping must cover every vertex");
    let parts = part_of.iter().max().map_or(0, |&p| p + 1);
    let mut size = vec![0usize; parts];
    for &p in part_of {
        size[p] += 1;
    }
    if let Some(empty) = size.iter().position(|&s| s == 0) {
        return Err(Violation::new(ViolationKind::EmptyPart, vec![empty]));
    }
    for v in 0..g.n() {
        let outside = g.neighbors(v).iter().filter(|&&w| part_of[w] != part_of[v]).count();
        if outside > 1 {
            return Err(Violation::new(ViolationKind::VertexTwoCrossing, vec![v]));
        }
    }
    if parts < ell {
        return Err(Violation::new(ViolationKind::TooFewParts, vec![parts]));
    }
    Ok(())
}

/// Checks that every part induces a connected subgraph.
pub fn check_connected_parts(g: &Graph, part_of: &[usize]) -> Result<(), Violation> {
    let canonical = canonical_from(g, |u, v| part_of[u] == part_of[v]);
    let labels = part_of.iter().max().map_or(0, |&p| p + 1);
    if canonical.parts == labels {
        return Ok(());
    }
    let mut first = vec![usize::MAX; labels];
    for v in 0..g.n() {
        let p = part_of[v];
        if first[p] == usize::MAX {
            first[p] = canonical.part_of[v];
        } else if first[p] != canonical.part_of[v] {
            return Err(Violation::new(ViolationKind::DisconnectedPart, vec![p]));
        }
    }
    Ok(())
}

/// A matching multicut in canonical form: connected parts numbered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Multicut {
    part_of: Vec<usize>,
    parts: usize,
    cut_edges: Vec<(usize, usize)>,
}

impl Multicut {
    pub fn part_of(&self) -> &[usize] {
        &self.part_of
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    /// Crossing edges `(u, v)` with `u < v`, sorted.
    pub fn cut_edges(&self) -> &[(usize, usize)] {
        &self.cut_edges
    }

    /// Members of each part, in part order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.parts];
        for (v, &p) in self.part_of.iter().enumerate() {
            out[p].push(v);
        }
        out
    }

    /// One `part i: v1 v2 ...` line per part, 1-based.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, part) in self.members().iter().enumerate() {
            let ids: Vec<String> = part.iter().map(|v| (v + 1).to_string()).collect();
            s.push_str(&format!("part {}: {}\n", i + 1, ids.join(" ")));
        }
        s
    }

    /// `{"parts":[[...]],"cut_edges":[[u,v],...]}` with 0-based ids.
    pub fn to_json(&self) -> String {
        let doc = JsonForm { parts: self.members(), cut_edges: self.cut_edges.iter().map(|&(u, v)| [u, v]).collect() };
        serde_json::to_string(&doc).expect("plain data serializes")
    }

    /// Reads the JSON form back, checking it against `g`.
    pub fn from_json(g: &Graph, text: &str) -> Result<Multicut, MulticutParseError> {
        let doc: JsonForm = serde_json::from_str(text)?;
        let mut part_of = vec![usize::MAX; g.n()];
        for (i, part) in doc.parts.iter().enumerate() {
            for &v in part {
                if v >= g.n() || part_of[v] != usize::MAX {
                    return Err(MulticutParseError::BadVertex(v));
                }
                part_of[v] = i;
            }
        }
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(MulticutParseError::BadVertex(v));
        }
        Ok(canonicalize(g, &part_of)?)
    }

    /// Single part holding every vertex; `None` for the empty graph.
    pub fn whole(g: &Graph) -> Option<Multicut> {
        canonicalize(g, &vec![0; g.n()]).ok().filter(|_| g.n() > 0)
    }
}

impl fmt::Display for Multicut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Splits every part into its connected components and renumbers parts by smallest vertex.
pub fn canonicalize(g: &Graph, part_of: &[usize]) -> Result<Multicut, Violation> {
    validate_multicut(g, part_of, 1).or_else(|e| match e.kind {
        // An empty graph has no parts; everything else must validate.
        ViolationKind::TooFewParts if g.n() == 0 => Ok(()),
        _ => Err(e),
    })?;
    Ok(canonical_from(g, |u, v| part_of[u] == part_of[v]))
}

/// Canonical multicut whose parts are the components of `g` after deleting `cut`.
///
/// Edges of `cut` whose endpoints stay connected are dropped from the result.
pub fn max_parts_of_cut(g: &Graph, cut: &[(usize, usize)]) -> Result<Multicut, CutError> {
    let mut saturated = vec![false; g.n()];
    let mut removed = std::collections::HashSet::new();
    for &(u, v) in cut {
        if u >= g.n() || v >= g.n() || !g.has_edge(u, v) {
            return Err(CutError::NotAnEdge(u, v));
        }
        if saturated[u] || saturated[v] {
            return Err(CutError::NotMatching(u, v));
        }
        saturated[u] = true;
        saturated[v] = true;
        removed.insert((u.min(v), u.max(v)));
    }
    Ok(canonical_from(g, |u, v| !removed.contains(&(u.min(v), u.max(v)))))
}

#[derive(Serialize, Deserialize)]
struct JsonForm {
    parts: Vec<Vec<usize>>,
    cut_edges: Vec<[usize; 2]>,
}

#[derive(Debug, Error)]
pub enum MulticutParseError {
    #[error("malformed multicut JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("vertex {0} is missing, repeated or out of range")]
    BadVertex(usize),
    #[error("not a matching multicut: {0}")]
    Invalid(#[from] Violation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),
    #[error("edge ({0}, {1}) shares an endpoint with another cut edge")]
    NotMatching(usize, usize),
}

/// Components of the graph restricted to edges accepted by `keep`.
fn canonical_from(g: &Graph, keep: impl Fn(usize, usize) -> bool) -> Multicut {
    let n = g.n();
    let mut part_of = vec![usize::MAX; n];
    let mut parts = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if part_of[s] != usize::MAX {
            continue;
        }
        part_of[s] = parts;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if part_of[w] == usize::MAX && keep(v, w) {
                    part_of[w] = parts;
                    stack.push(w);
                }
            }
        }
        parts += 1;
    }
    let cut_edges = g.edges().filter(|&(u, v)| part_of[u] != part_of[v]).collect();
    Multicut { part_of, parts, cut_edges }
}

/// Whether `cut` is a valid canonical cut set: a matching of edges that each separate.
pub fn is_canonical_cut(g: &Graph, cut: &[(usize, usize)]) -> bool {
    match max_parts_of_cut(g, cut) {
        Ok(mc) => mc.cut_edges.len() == cut.len(),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_split_reports_two_crossing() {
        let g = Graph::complete(3);
        let err = validate_multicut(&g, &[0, 1, 1], 2).unwrap_err();
        assert_eq!(err.kind, ViolationKind::VertexTwoCrossing);
        assert_eq!(err.witness, vec![0]);
    }

    #[test]
    fn c4_and_p4_splits_validate() {
        assert!(validate_multicut(&Graph::cycle(4), &[0, 0, 1, 1], 2).is_ok());
        assert!(validate_multicut(&Graph::path(4), &[0, 1, 1, 2], 3).is_ok());
    }

    #[test]
    fn empty_and_too_few_parts() {
        let g = Graph::path(3);
        assert_eq!(validate_multicut(&g, &[0, 0, 2], 1).unwrap_err().kind, ViolationKind::EmptyPart);
        assert_eq!(validate_multicut(&g, &[0, 0, 0], 2).unwrap_err().kind, ViolationKind::TooFewParts);
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize(&Graph::complete(3), &[0, 0, 0]).unwrap().parts(), 1);
        let star = Graph::star(3);
        let mc = canonicalize(&star, &[0, 0, 0, 1]).unwrap();
        assert_eq!(mc.parts(), 2);
        assert_eq!(mc.cut_edges(), &[(0, 3)]);
        let two = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let mc = canonicalize(&two, &[0, 0, 0, 0]).unwrap();
        assert_eq!(mc.members(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn canonical_numbering_by_smallest_member() {
        let g = Graph::path(4);
        let mc = canonicalize(&g, &[5, 5, 2, 2].map(|p| if p == 5 { 1 } else { 0 })).unwrap();
        assert_eq!(mc.part_of(), &[0, 0, 1, 1]);
    }

    #[test]
    fn cut_examples() {
        let mc = max_parts_of_cut(&Graph::path(4), &[(1, 2)]).unwrap();
        assert_eq!(mc.members(), vec![vec![0, 1], vec![2, 3]]);
        let mc = max_parts_of_cut(&Graph::cycle(4), &[(0, 1)]).unwrap();
        assert_eq!(mc.parts(), 1);
        assert!(mc.cut_edges().is_empty());
        let mc = max_parts_of_cut(&Graph::cycle(6), &[(0, 1), (2, 3), (4, 5)]).unwrap();
        assert_eq!(mc.parts(), 3);
        assert!(max_parts_of_cut(&Graph::path(3), &[(0, 1), (1, 2)]).is_err());
    }

    #[test]
    fn disconnected_part_is_reported() {
        let g = Graph::path(3);
        let err = check_connected_parts(&g, &[0, 1, 0]).unwrap_err();
        assert_eq!(err.kind, ViolationKind::DisconnectedPart);
        assert!(check_connected_parts(&g, &[0, 0, 1]).is_ok());
    }

    #[test]
    fn output_forms() {
        let mc = max_parts_of_cut(&Graph::path(3), &[(1, 2)]).unwrap();
        assert_eq!(mc.to_text(), "part 1: 1 2\npart 2: 3\n");
        assert_eq!(mc.to_json(), r#"{"parts":[[0,1],[2]],"cut_edges":[[1,2]]}"#);
        let g = Graph::path(3);
        assert_eq!(Multicut::from_json(&g, &mc.to_json()).unwrap(), mc);
    }
}
