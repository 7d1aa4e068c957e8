//! Exact branch-and-reduce search over partial assignments.
//!
//! A [`PartialState`] maps every vertex to a part or leaves it free. Parts are
//! opened in order (vertex 0 seeds part 0, a new part is always the next
//! index), which removes the symmetry between part labels. Stopping rules
//! prune hopeless states, reduction rules extend the assignment where the
//! extension is forced or harmless, and branching rules pick the vertex to
//! branch on. When no branching configuration is left the free vertices are
//! completed in one step and the result is checked; if the check fails the
//! search falls back to branching on the lowest free vertex, so the procedure
//! is exhaustive whatever the configuration analysis misses.
//!
//! Pendant blocks are removed before the search: degree-1 vertices, and more
//! generally small subgraphs hanging off a bridge that cannot be split. The
//! other endpoint of the bridge becomes an *anchor*, and one pendant block per
//! anchor is cut off as an extra part. Some
//! optimal multicut always cuts off such pendants, so the search only visits
//! states in which anchors have no crossing edge: an anchor and all of its
//! neighbours share a part.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::multicut::{canonicalize, Multicut};
use crate::oracle::max_parts;

/// Marker for an unassigned vertex.
pub const FREE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    S1,
    S2,
    S3,
    S4,
    /// Too few free vertices and anchors left to reach the target.
    Capacity,
    /// An anchor would get a crossing edge.
    AnchorConflict,
    /// Free vertex pulled into the part of an adjacent anchor, or a free
    /// anchor pulled into the part of its neighbour.
    AnchorClosure,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    B1,
    B2,
    B3,
    B4,
    #[serde(rename = "B4'")]
    B4Prime,
    B5,
    B6,
    B7,
    B8,
    /// Vertex 0 placed in part 0.
    Seed,
    /// One-step completion of all free vertices.
    Completion,
    /// Plain branch on the lowest free vertex after a failed completion.
    Fallback,
    /// Degree-1 vertices put back after the search.
    Pendant,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::B4Prime => f.write_str("B4'"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// One rule application and the `(vertex, part)` assignments it made.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub rule: Rule,
    pub assignments: Vec<(usize, usize)>,
}

/// Rule applications along the path from the initial state to the result.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleTrace {
    pub events: Vec<TraceEvent>,
}

impl RuleTrace {
    fn push(&mut self, rule: Rule, assignments: Vec<(usize, usize)>) {
        self.events.push(TraceEvent { rule, assignments });
    }

    /// Replays every assignment on `n` free vertices.
    pub fn replay(&self, n: usize) -> Vec<Option<usize>> {
        let mut part = vec![None; n];
        for e in &self.events {
            for &(v, p) in &e.assignments {
                part[v] = Some(p);
            }
        }
        part
    }

    /// One JSON object per event.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            s.push_str(&serde_json::to_string(e).expect("plain data serializes"));
            s.push('\n');
        }
        s
    }
}

/// Parts `A_0..A_{ell-1}` plus the free set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialState {
    assign: Vec<usize>,
    used: usize,
    free: usize,
    ell: usize,
    anchors: Arc<[bool]>,
}

impl PartialState {
    /// All vertices free, no part opened.
    pub fn new(n: usize, ell: usize) -> Self {
        Self::with_anchors(ell, vec![false; n])
    }

    pub fn with_anchors(ell: usize, anchors: Vec<bool>) -> Self {
        let n = anchors.len();
        PartialState { assign: vec![FREE; n], used: 0, free: n, ell, anchors: anchors.into() }
    }

    /// Puts `v` into part `p`. Opening a part is only allowed for `p == used_parts()`.
    pub fn assign(&mut self, v: usize, p: usize) {
        assert_eq!(self.assign[v], FREE, "vertex {v} is already assigned");
        assert!(p <= self.used && p < self.ell, "part {p} cannot be opened");
        if p == self.used {
            self.used += 1;
        }
        self.assign[v] = p;
        self.free -= 1;
    }

    pub fn part(&self, v: usize) -> Option<usize> {
        Some(self.assign[v]).filter(|&p| p != FREE)
    }

    pub fn is_free(&self, v: usize) -> bool {
        self.assign[v] == FREE
    }

    pub fn used_parts(&self) -> usize {
        self.used
    }

    pub fn free_count(&self) -> usize {
        self.free
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Raw assignment with [`FREE`] for unassigned vertices.
    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn is_anchor(&self, v: usize) -> bool {
        self.anchors[v]
    }

    fn crossing_degree(&self, g: &Graph, v: usize) -> usize {
        let p = self.assign[v];
        g.neighbors(v).iter().filter(|&&w| self.assign[w] != FREE && self.assign[w] != p).count()
    }

    fn anchor_count(&self) -> usize {
        self.anchors.iter().filter(|&&a| a).count()
    }
}

/// Distinct parts among the assigned neighbours of `v`, at most three.
fn neighbour_parts(g: &Graph, s: &PartialState, v: usize) -> Vec<usize> {
    let mut parts = Vec::with_capacity(3);
    for &w in g.neighbors(v) {
        let p = s.assign[w];
        if p != FREE && !parts.contains(&p) {
            parts.push(p);
            if parts.len() == 3 {
                break;
            }
        }
    }
    parts.sort_unstable();
    parts
}

fn degree_into(g: &Graph, s: &PartialState, v: usize, p: usize) -> usize {
    g.neighbors(v).iter().filter(|&&w| s.assign[w] == p).count()
}

fn free_neighbours<'a>(g: &'a Graph, s: &'a PartialState, v: usize) -> impl Iterator<Item = usize> + 'a {
    g.neighbors(v).iter().copied().filter(move |&w| s.assign[w] == FREE)
}

/// `Err(rule)` if a stopping rule fires.
pub fn apply_stopping_rules(g: &Graph, s: &PartialState) -> Result<(), Rule> {
    for v in 0..g.n() {
        if !s.is_free(v) {
            continue;
        }
        let parts = neighbour_parts(g, s, v);
        if parts.len() >= 2 {
            let heavy = parts.iter().filter(|&&p| degree_into(g, s, v, p) >= 2).count();
            if heavy >= 2 {
                return Err(Rule::S1);
            }
        }
        if parts.len() >= 3 {
            return Err(Rule::S2);
        }
    }
    for (u, v) in g.edges() {
        let (pu, pv) = (s.assign[u], s.assign[v]);
        if pu != FREE && pv != FREE && pu != pv {
            let common = g.neighbors(u).iter().any(|&w| s.is_free(w) && g.has_edge(v, w));
            if common {
                return Err(Rule::S3);
            }
        }
    }
    for v in 0..g.n() {
        if !s.is_free(v) && s.crossing_degree(g, v) >= 2 {
            return Err(Rule::S4);
        }
    }
    for v in (0..g.n()).filter(|&v| s.is_anchor(v)) {
        let conflict = if s.is_free(v) { neighbour_parts(g, s, v).len() >= 2 } else { s.crossing_degree(g, v) > 0 };
        if conflict {
            return Err(Rule::AnchorConflict);
        }
    }
    Ok(())
}

fn capacity_exhausted(s: &PartialState) -> bool {
    s.used + s.free + s.anchor_count() < s.ell
}

/// Applies reduction rules in priority order until none fires, checking the
/// stopping rules before every application.
pub fn apply_reduction_rules(g: &Graph, s: &mut PartialState, trace: &mut RuleTrace) -> Result<(), Rule> {
    loop {
        apply_stopping_rules(g, s)?;
        let Some((rule, assignments)) = find_reduction(g, s) else {
            return Ok(());
        };
        for &(v, p) in &assignments {
            s.assign(v, p);
        }
        trace.push(rule, assignments);
    }
}

fn find_reduction(g: &Graph, s: &PartialState) -> Option<(Rule, Vec<(usize, usize)>)> {
    let n = g.n();
    for v in (0..n).filter(|&v| s.is_anchor(v)) {
        let pulled: Vec<(usize, usize)> = match s.part(v) {
            Some(p) => free_neighbours(g, s, v).map(|w| (w, p)).collect(),
            None => neighbour_parts(g, s, v).first().map(|&p| vec![(v, p)]).unwrap_or_default(),
        };
        if !pulled.is_empty() {
            return Some((Rule::AnchorClosure, pulled));
        }
    }
    // R1: assigned vertex with two adjacent free neighbours.
    for v in 0..n {
        let p = s.assign[v];
        if p == FREE {
            continue;
        }
        let free: Vec<usize> = free_neighbours(g, s, v).collect();
        for (i, &x) in free.iter().enumerate() {
            if let Some(&y) = free[i + 1..].iter().find(|&&y| g.has_edge(x, y)) {
                return Some((Rule::R1, vec![(x, p), (y, p)]));
            }
        }
    }
    // R2: free vertex with two neighbours in a single part.
    for v in 0..n {
        if s.is_free(v) {
            let parts = neighbour_parts(g, s, v);
            let heavy: Vec<usize> = parts.into_iter().filter(|&p| degree_into(g, s, v, p) >= 2).collect();
            if heavy.len() == 1 {
                return Some((Rule::R2, vec![(v, heavy[0])]));
            }
        }
    }
    // R3: free neighbours of a crossing edge follow their endpoint.
    for (u, v) in g.edges() {
        let (pu, pv) = (s.assign[u], s.assign[v]);
        if pu == FREE || pv == FREE || pu == pv {
            continue;
        }
        let mut out: Vec<(usize, usize)> = free_neighbours(g, s, u).map(|w| (w, pu)).collect();
        out.extend(free_neighbours(g, s, v).map(|w| (w, pv)));
        if !out.is_empty() {
            return Some((Rule::R3, out));
        }
    }
    // R4, R5: free twins of degree two.
    for u in 0..n {
        if !s.is_free(u) || g.degree(u) != 2 || s.is_anchor(u) {
            continue;
        }
        let nu = g.neighbors(u);
        let twin = g.neighbors(nu[0]).iter().copied().find(|&v| v != u && s.is_free(v) && !s.is_anchor(v) && g.neighbors(v) == nu);
        let Some(v) = twin else { continue };
        let (x, y) = (nu[0], nu[1]);
        match (s.part(x), s.part(y)) {
            (Some(px), Some(py)) if px != py => return Some((Rule::R4, vec![(u, px), (v, py)])),
            (Some(px), None) => return Some((Rule::R5, vec![(u, px)])),
            (None, Some(py)) => return Some((Rule::R5, vec![(u, py)])),
            _ => {}
        }
    }
    // R6: free vertex between two parts whose contacts have nothing else free or foreign.
    for v in 0..n {
        if !s.is_free(v) || g.degree(v) != 2 {
            continue;
        }
        let (x, y) = (g.neighbors(v)[0], g.neighbors(v)[1]);
        let (Some(px), Some(py)) = (s.part(x), s.part(y)) else { continue };
        if px == py || s.is_anchor(x) || s.is_anchor(y) {
            continue;
        }
        let closed = |a: usize, p: usize| g.neighbors(a).iter().all(|&w| w == v || s.assign[w] == p);
        if closed(x, px) && closed(y, py) {
            return Some((Rule::R6, vec![(v, px)]));
        }
    }
    // R7: a free path of degree-2 vertices between two parts, once every part is open.
    if s.used == s.ell {
        for u in 0..n {
            if !s.is_free(u) || g.degree(u) != 2 || s.is_anchor(u) {
                continue;
            }
            let side = |v: usize| -> Option<usize> {
                if !s.is_free(v) || g.degree(v) != 2 || s.is_anchor(v) {
                    return None;
                }
                let other = g.neighbors(v).iter().copied().find(|&a| a != u)?;
                s.part(other)
            };
            let (a, b) = (g.neighbors(u)[0], g.neighbors(u)[1]);
            if let (Some(pa), Some(pb)) = (side(a), side(b)) {
                return Some((Rule::R7, vec![(u, pa), (a, pa), (b, pb)]));
            }
        }
    }
    None
}

/// A child of a branching step with the assignments that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Child {
    pub state: PartialState,
    pub assignments: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Branch {
    /// Branch on `vertex`, one child per admissible part.
    Split { rule: Rule, vertex: usize, children: Vec<Child> },
    /// No configuration left: the one-step completion of every free vertex.
    Completion(Child),
}

/// Parts a free vertex may join: the two parts it already touches, or any open
/// part plus the next new one.
fn admissible_parts(g: &Graph, s: &PartialState, v: usize) -> Vec<usize> {
    let parts = neighbour_parts(g, s, v);
    if parts.len() >= 2 {
        return parts;
    }
    let mut out: Vec<usize> = (0..s.used).collect();
    if s.used < s.ell {
        out.push(s.used);
    }
    out
}

/// Puts `v` into `p` and pushes the free neighbours of each new crossing edge
/// to the side of their endpoint.
fn branch_child(g: &Graph, s: &PartialState, v: usize, p: usize) -> Child {
    let mut state = s.clone();
    state.assign(v, p);
    let mut assignments = vec![(v, p)];
    for &a in g.neighbors(v) {
        let pa = state.assign[a];
        if pa == FREE || pa == p {
            continue;
        }
        for (end, part) in [(v, p), (a, pa)] {
            for &w in g.neighbors(end) {
                if state.is_free(w) {
                    state.assign(w, part);
                    assignments.push((w, part));
                }
            }
        }
    }
    Child { state, assignments }
}

/// Free vertices next to an assigned vertex with two or more free neighbours,
/// tagged with that vertex.
struct Contacts {
    /// Per free vertex: `(assigned neighbour, its part)` for neighbours with free degree >= 2.
    heavy: Vec<Vec<(usize, usize)>>,
    parts: Vec<Vec<usize>>,
    free_degree: Vec<usize>,
}

impl Contacts {
    fn new(g: &Graph, s: &PartialState) -> Self {
        let n = g.n();
        let free_degree: Vec<usize> = (0..n).map(|v| free_neighbours(g, s, v).count()).collect();
        let mut heavy = vec![Vec::new(); n];
        for a in 0..n {
            if !s.is_free(a) && free_degree[a] >= 2 {
                for w in free_neighbours(g, s, a) {
                    heavy[w].push((a, s.assign[a]));
                }
            }
        }
        let parts = (0..n).map(|v| if s.is_free(v) { neighbour_parts(g, s, v) } else { Vec::new() }).collect();
        Contacts { heavy, parts, free_degree }
    }

    fn heavy_parts(&self, v: usize) -> Vec<usize> {
        let mut p: Vec<usize> = self.heavy[v].iter().map(|&(_, p)| p).collect();
        p.sort_unstable();
        p.dedup();
        p
    }
}

fn find_configuration(g: &Graph, s: &PartialState) -> Option<(Rule, usize)> {
    let c = Contacts::new(g, s);
    let free: Vec<usize> = (0..g.n()).filter(|&v| s.is_free(v)).collect();
    let fnb = |v: usize| free_neighbours(g, s, v).collect::<Vec<_>>();
    let first = |pred: &dyn Fn(usize) -> bool| free.iter().copied().find(|&v| pred(v));

    let rules: [(Rule, &dyn Fn(usize) -> bool); 9] = [
        (Rule::B1, &|v| {
            let hp = c.heavy_parts(v);
            hp.len() == 1 && c.parts[v] == hp && c.free_degree[v] >= 2
        }),
        (Rule::B2, &|v| {
            let hp = c.heavy_parts(v);
            c.free_degree[v] >= 1 && hp.iter().any(|i| c.parts[v].iter().any(|j| j != i))
        }),
        (Rule::B3, &|v| c.parts[v].len() == 2 && c.free_degree[v] >= 1),
        (Rule::B4, &|v| {
            if !c.parts[v].is_empty() || c.free_degree[v] < 3 {
                return false;
            }
            let nb = fnb(v);
            nb.iter().any(|&x| nb.iter().any(|&y| x != y && c.heavy_parts(x).iter().any(|i| c.heavy_parts(y).iter().any(|j| i != j))))
        }),
        (Rule::B4Prime, &|v| {
            if !c.parts[v].is_empty() || c.free_degree[v] < 3 {
                return false;
            }
            let nb = fnb(v);
            nb.iter()
                .any(|&x| nb.iter().any(|&y| x != y && c.heavy[x].iter().any(|&(a, i)| c.heavy[y].iter().any(|&(b, j)| i == j && a != b))))
        }),
        (Rule::B5, &|v| {
            if c.parts[v].len() != 1 {
                return false;
            }
            let j = c.parts[v][0];
            let nb = fnb(v);
            (0..s.used).filter(|&i| i != j).any(|i| nb.iter().filter(|&&x| c.heavy_parts(x).contains(&i)).count() >= 2)
        }),
        (Rule::B6, &|v| {
            let nb = fnb(v);
            let rich: Vec<usize> = (0..s.used).filter(|&i| nb.iter().filter(|&&x| c.heavy_parts(x) == [i]).count() >= 2).collect();
            rich.len() >= 2
        }),
        (Rule::B7, &|v| c.heavy_parts(v).len() >= 2),
        (Rule::B8, &|v| !c.heavy[v].is_empty() && fnb(v).iter().any(|&x| !c.parts[x].is_empty())),
    ];
    for (rule, pred) in rules.iter() {
        if let Some(v) = first(*pred) {
            return Some((*rule, v));
        }
    }
    None
}

/// Assigns every free vertex at once: free contacts of an assigned vertex with
/// two free neighbours join its part, free vertices with two such contacts in
/// one part follow them, and everything left goes to the last part.
fn completion(g: &Graph, s: &PartialState) -> Child {
    let c = Contacts::new(g, s);
    let n = g.n();
    let mut target = vec![FREE; n];
    for v in 0..n {
        if let Some(&(_, p)) = c.heavy[v].iter().min_by_key(|&&(_, p)| p) {
            target[v] = p;
        }
    }
    let first_pass = target.clone();
    for v in 0..n {
        if s.is_free(v) && first_pass[v] == FREE {
            let mut counts = std::collections::BTreeMap::new();
            for w in free_neighbours(g, s, v) {
                if first_pass[w] != FREE {
                    *counts.entry(first_pass[w]).or_insert(0) += 1;
                }
            }
            if let Some((&p, _)) = counts.iter().find(|(_, &k)| k >= 2) {
                target[v] = p;
            }
        }
    }
    let mut state = s.clone();
    let mut assignments = Vec::new();
    let last = if s.used == s.ell { s.ell - 1 } else { s.used };
    for v in 0..n {
        if state.is_free(v) {
            let p = if target[v] == FREE { last } else { target[v] };
            let p = p.min(state.used);
            state.assign(v, p);
            assignments.push((v, p));
        }
    }
    Child { state, assignments }
}

/// Picks the branching vertex, or completes the state when no configuration applies.
pub fn select_branch(g: &Graph, s: &PartialState) -> Branch {
    match find_configuration(g, s) {
        Some((rule, v)) => {
            let children = admissible_parts(g, s, v).into_iter().map(|p| branch_child(g, s, v, p)).collect();
            Branch::Split { rule, vertex: v, children }
        }
        None => Branch::Completion(completion(g, s)),
    }
}

/// Search counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// States expanded across all searches.
    pub nodes: u64,
    /// Completions that failed and forced a plain branch.
    pub fallbacks: u64,
    pub searches: u64,
}

/// Result of a traced decision run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub witness: Option<Multicut>,
    pub trace: RuleTrace,
    pub stats: SearchStats,
}

/// Largest bridge side tested for indivisibility.
const PENDANT_BLOCK_LIMIT: usize = 12;

/// Sides of bridges, oriented away from vertex 0, that no matching multicut
/// splits, each with the outside endpoint of its bridge. Maximal sides only;
/// a degree-1 vertex is a side of size one.
fn pendant_blocks(g: &Graph) -> Vec<(Vec<usize>, usize)> {
    let n = g.n();
    if n < 3 {
        return Vec::new();
    }
    let mut tin = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut size = vec![1; n];
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![(0usize, 0usize)];
    tin[0] = 0;
    low[0] = 0;
    order.push(0);
    while let Some(top) = stack.last_mut() {
        let v = top.0;
        if let Some(&w) = g.neighbors(v).get(top.1) {
            top.1 += 1;
            if tin[w] == usize::MAX {
                parent[w] = v;
                tin[w] = order.len();
                low[w] = tin[w];
                order.push(w);
                stack.push((w, 0));
            } else if w != parent[v] {
                low[v] = low[v].min(tin[w]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                low[p] = low[p].min(low[v]);
                size[p] += size[v];
            }
        }
    }
    let mut sides: Vec<usize> =
        (1..n).filter(|&c| low[c] > tin[parent[c]] && size[c] <= PENDANT_BLOCK_LIMIT && g.degree(parent[c]) >= 2).collect();
    sides.sort_by_key(|&c| (std::cmp::Reverse(size[c]), c));
    let mut taken = vec![false; n];
    let mut out = Vec::new();
    for c in sides {
        if taken[c] {
            continue;
        }
        let mut block = order[tin[c]..tin[c] + size[c]].to_vec();
        block.sort_unstable();
        if block.len() > 1 && !max_parts(&g.induced(&block).0).is_ok_and(|p| p == 1) {
            continue;
        }
        for &v in &block {
            taken[v] = true;
        }
        out.push((block, parent[c]));
    }
    out.sort();
    out
}

/// Core of a connected graph without its pendant blocks. A pendant block is
/// never split, so it behaves exactly like a single degree-1 vertex.
struct Core {
    g: Graph,
    /// Core id to original id.
    to_orig: Vec<usize>,
    anchors: Vec<bool>,
    /// `(block, anchor)` in original and core ids, sorted by block.
    pendants: Vec<(Vec<usize>, usize)>,
}

impl Core {
    fn new(g: &Graph) -> Core {
        let blocks = pendant_blocks(g);
        let mut in_block = vec![false; g.n()];
        for (block, _) in &blocks {
            for &v in block {
                in_block[v] = true;
            }
        }
        let keep: Vec<usize> = (0..g.n()).filter(|&v| !in_block[v]).collect();
        let (core, to_orig) = g.induced(&keep);
        let mut index = vec![usize::MAX; g.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut anchors = vec![false; core.n()];
        let pendants: Vec<(Vec<usize>, usize)> = blocks
            .into_iter()
            .map(|(block, outside)| {
                anchors[index[outside]] = true;
                (block, index[outside])
            })
            .collect();
        Core { g: core, to_orig, anchors, pendants }
    }

    /// Lifts a complete core assignment to the original graph.
    fn lift(&self, orig: &Graph, s: &PartialState, ell: usize) -> Option<(Multicut, Vec<(usize, usize)>)> {
        let a = s.assignment();
        if (0..self.g.n()).any(|v| s.crossing_degree(&self.g, v) > 1) {
            return None;
        }
        let mut part_of = vec![FREE; orig.n()];
        for (i, &v) in self.to_orig.iter().enumerate() {
            part_of[v] = a[i];
        }
        let mut next = s.used_parts();
        let mut cut_done = vec![false; self.g.n()];
        let mut lifted = Vec::with_capacity(self.pendants.len());
        for (block, w) in &self.pendants {
            let w = *w;
            let p = if !cut_done[w] && s.crossing_degree(&self.g, w) == 0 {
                cut_done[w] = true;
                next += 1;
                next - 1
            } else {
                a[w]
            };
            for &u in block {
                part_of[u] = p;
                lifted.push((u, p));
            }
        }
        let mc = canonicalize(orig, &part_of).ok()?;
        (mc.parts() >= ell).then_some((mc, lifted))
    }
}

struct Search<'a> {
    orig: &'a Graph,
    core: &'a Core,
    ell: usize,
    path: RuleTrace,
    stats: SearchStats,
    /// Shared index of the best subtree with a witness, and ours; we give up
    /// once a lower index has succeeded.
    cancel: Option<(&'a AtomicUsize, usize)>,
}

enum Step {
    Done(Option<Multicut>),
    Split(Rule, Vec<Child>),
}

impl<'a> Search<'a> {
    fn new(orig: &'a Graph, core: &'a Core, ell: usize) -> Self {
        Search { orig, core, ell, path: RuleTrace::default(), stats: SearchStats::default(), cancel: None }
    }

    fn seeded(&mut self) -> PartialState {
        let mut s = PartialState::with_anchors(self.ell, self.core.anchors.clone());
        if self.core.g.n() > 0 {
            s.assign(0, 0);
            self.path.push(Rule::Seed, vec![(0, 0)]);
        }
        s
    }

    fn run(&mut self, s: PartialState) -> Option<Multicut> {
        if let Some((best, me)) = self.cancel {
            if best.load(Ordering::Relaxed) < me {
                return None;
            }
        }
        self.stats.nodes += 1;
        let mark = self.path.events.len();
        let found = self.expand(s);
        if found.is_none() {
            self.path.events.truncate(mark);
        }
        found
    }

    /// Reduces `s` and either settles it or returns its children.
    fn step(&mut self, mut s: PartialState) -> Step {
        let g = &self.core.g;
        if apply_reduction_rules(g, &mut s, &mut self.path).is_err() || capacity_exhausted(&s) {
            return Step::Done(None);
        }
        if s.free_count() == 0 {
            return Step::Done(self.finish(&s));
        }
        match select_branch(g, &s) {
            Branch::Split { rule, children, .. } => Step::Split(rule, children),
            Branch::Completion(done) => {
                self.path.push(Rule::Completion, done.assignments);
                if let Some(m) = self.finish(&done.state) {
                    return Step::Done(Some(m));
                }
                self.path.events.pop();
                self.stats.fallbacks += 1;
                let v = (0..g.n()).find(|&v| s.is_free(v)).expect("state has a free vertex");
                let children = admissible_parts(g, &s, v).into_iter().map(|p| branch_child(g, &s, v, p)).collect();
                Step::Split(Rule::Fallback, children)
            }
        }
    }

    fn expand(&mut self, s: PartialState) -> Option<Multicut> {
        let (rule, children) = match self.step(s) {
            Step::Done(found) => return found,
            Step::Split(rule, children) => (rule, children),
        };
        for child in children {
            self.path.push(rule, child.assignments);
            if let Some(m) = self.run(child.state) {
                return Some(m);
            }
            self.path.events.pop();
        }
        None
    }

    fn finish(&mut self, s: &PartialState) -> Option<Multicut> {
        let (mc, lifted) = self.core.lift(self.orig, s, self.ell)?;
        self.path.push(Rule::Pendant, lifted);
        Some(mc)
    }
}

/// Decision search on a connected graph with `ell >= 2`.
fn solve_connected(g: &Graph, ell: usize, stats: &mut SearchStats) -> (Option<Multicut>, RuleTrace) {
    let core = Core::new(g);
    let mut search = Search::new(g, &core, ell);
    search.stats.searches = 1;
    let s = search.seeded();
    let found = search.run(s);
    stats.nodes += search.stats.nodes;
    stats.fallbacks += search.stats.fallbacks;
    stats.searches += search.stats.searches;
    let mut trace = search.path;
    for e in &mut trace.events {
        if e.rule != Rule::Pendant {
            for a in &mut e.assignments {
                a.0 = core.to_orig[a.0];
            }
        }
    }
    if found.is_none() {
        trace.events.clear();
    }
    (found, trace)
}

/// Witness with at least `ell` parts, or `None`.
pub fn solve_decision(g: &Graph, ell: usize) -> Option<Multicut> {
    solve_decision_traced(g, ell).witness
}

/// [`solve_decision`] with the rule trace of the successful path and search counters.
pub fn solve_decision_traced(g: &Graph, ell: usize) -> Outcome {
    let mut stats = SearchStats::default();
    let mut trace = RuleTrace::default();
    let witness = decide(g, ell, &mut stats, &mut trace);
    if witness.is_none() {
        trace.events.clear();
    }
    Outcome { witness, trace, stats }
}

fn decide(g: &Graph, ell: usize, stats: &mut SearchStats, trace: &mut RuleTrace) -> Option<Multicut> {
    let comps = g.components();
    if ell > g.n() {
        return None;
    }
    if ell <= comps.len() {
        let whole = Multicut::whole(g)?;
        trace.push(Rule::Seed, whole.part_of().iter().copied().enumerate().collect());
        return Some(whole);
    }
    if comps.len() == 1 {
        let (w, t) = solve_connected(g, ell, stats);
        *trace = t;
        return w;
    }
    let mut part_of = vec![0; g.n()];
    let mut total = 0;
    for comp in &comps {
        let (h, map) = g.induced(comp);
        let (p, w, t) = max_connected(&h, stats);
        for e in t.events {
            let assignments = e.assignments.iter().map(|&(v, q)| (map[v], q + total)).collect();
            trace.push(e.rule, assignments);
        }
        for (i, &v) in map.iter().enumerate() {
            part_of[v] = w.part_of()[i] + total;
        }
        total += p;
    }
    if total < ell {
        return None;
    }
    canonicalize(g, &part_of).ok()
}

/// Maximum over a connected graph by increasing targets, jumping past each witness.
fn max_connected(g: &Graph, stats: &mut SearchStats) -> (usize, Multicut, RuleTrace) {
    let mut best = Multicut::whole(g).expect("component is non-empty");
    let mut trace = RuleTrace::default();
    trace.push(Rule::Seed, (0..g.n()).map(|v| (v, 0)).collect());
    loop {
        let (w, t) = solve_connected(g, best.parts() + 1, stats);
        match w {
            Some(w) => {
                best = w;
                trace = t;
            }
            None => return (best.parts(), best, trace),
        }
    }
}

enum Slot {
    Open(PartialState),
    Found(Multicut),
}

/// [`solve_decision`] with `jobs` worker threads. The search tree is unfolded
/// in depth-first order until it has a few subtrees per worker; workers pull
/// subtrees from a shared queue and the witness of the lowest subtree wins, so
/// the answer matches the single-threaded one.
pub fn solve_decision_parallel(g: &Graph, ell: usize, jobs: usize) -> Option<Multicut> {
    if jobs <= 1 || ell <= 1 || ell > g.n() || !g.is_connected() {
        return solve_decision(g, ell);
    }
    let core = Core::new(g);
    let mut search = Search::new(g, &core, ell);
    let mut frontier = vec![Slot::Open(search.seeded())];
    while frontier.len() < 4 * jobs {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        let mut grew = false;
        for slot in frontier {
            match slot {
                Slot::Open(s) => match search.step(s) {
                    Step::Done(Some(m)) => next.push(Slot::Found(m)),
                    Step::Done(None) => {}
                    Step::Split(_, children) => {
                        grew = true;
                        next.extend(children.into_iter().map(|c| Slot::Open(c.state)));
                    }
                },
                found => next.push(found),
            }
        }
        frontier = next;
        if !grew {
            break;
        }
    }
    let best = AtomicUsize::new(usize::MAX);
    let cursor = AtomicUsize::new(0);
    let queue: Vec<Mutex<Option<Slot>>> = frontier.into_iter().map(|s| Mutex::new(Some(s))).collect();
    let results: Vec<Mutex<Option<Multicut>>> = (0..queue.len()).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= queue.len() || best.load(Ordering::Relaxed) < i {
                    break;
                }
                let slot = queue[i].lock().expect("queue lock").take().expect("each slot is taken once");
                let found = match slot {
                    Slot::Found(m) => Some(m),
                    Slot::Open(s) => {
                        let mut worker = Search::new(g, &core, ell);
                        worker.cancel = Some((&best, i));
                        worker.run(s)
                    }
                };
                if let Some(m) = found {
                    *results[i].lock().expect("result lock") = Some(m);
                    best.fetch_min(i, Ordering::Relaxed);
                }
            });
        }
    });
    results.into_iter().find_map(|r| r.into_inner().expect("result lock"))
}

/// [`solve_max`] with each decision run on `jobs` workers.
pub fn solve_max_parallel(g: &Graph, jobs: usize) -> (usize, Multicut) {
    if jobs <= 1 || !g.is_connected() || g.n() == 0 {
        return solve_max(g);
    }
    let mut best = Multicut::whole(g).expect("graph is non-empty");
    while let Some(w) = solve_decision_parallel(g, best.parts() + 1, jobs) {
        best = w;
    }
    (best.parts(), best)
}

/// Largest part count and a witness. The empty graph gives `(0, empty multicut)`.
pub fn solve_max(g: &Graph) -> (usize, Multicut) {
    let (p, w, _) = solve_max_traced(g);
    (p, w)
}

pub fn solve_max_traced(g: &Graph) -> (usize, Multicut, SearchStats) {
    let mut stats = SearchStats::default();
    let mut part_of = vec![0; g.n()];
    let mut total = 0;
    for comp in g.components() {
        let (h, map) = g.induced(&comp);
        let (p, w, _) = max_connected(&h, &mut stats);
        for (i, &v) in map.iter().enumerate() {
            part_of[v] = w.part_of()[i] + total;
        }
        total += p;
    }
    let mc = canonicalize(g, &part_of).expect("union of component witnesses is valid");
    debug_assert_eq!(mc.parts(), total);
    (total, mc, stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(n: usize, ell: usize, parts: &[(usize, usize)]) -> PartialState {
        let mut s = PartialState::new(n, ell);
        for &(v, p) in parts {
            s.assign(v, p);
        }
        s
    }

    #[test]
    fn stopping_rule_examples() {
        // free 0 touching 1,2 in part 0 and 3,4 in part 1
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let s = state(5, 2, &[(1, 0), (2, 0), (3, 1), (4, 1)]);
        assert_eq!(apply_stopping_rules(&g, &s), Err(Rule::S1));
        let g = Graph::star(3);
        let s = state(4, 3, &[(1, 0), (2, 1), (3, 2)]);
        assert_eq!(apply_stopping_rules(&g, &s), Err(Rule::S2));
        assert_eq!(apply_stopping_rules(&Graph::cube(), &PartialState::new(8, 3)), Ok(()));
    }

    #[test]
    fn reduction_examples() {
        let mut s = state(3, 2, &[(0, 0)]);
        let mut trace = RuleTrace::default();
        apply_reduction_rules(&Graph::complete(3), &mut s, &mut trace).unwrap();
        assert_eq!(trace.events[0], TraceEvent { rule: Rule::R1, assignments: vec![(1, 0), (2, 0)] });

        // free 0 with both neighbours in part 2
        let g = Graph::from_edges(5, [(0, 3), (0, 4)]).unwrap();
        let mut s = state(5, 3, &[(1, 0), (2, 1), (3, 2), (4, 2)]);
        let mut trace = RuleTrace::default();
        apply_reduction_rules(&g, &mut s, &mut trace).unwrap();
        assert_eq!(trace.events, vec![TraceEvent { rule: Rule::R2, assignments: vec![(0, 2)] }]);

        let mut s = PartialState::new(3, 2);
        let mut trace = RuleTrace::default();
        apply_reduction_rules(&Graph::path(3), &mut s, &mut trace).unwrap();
        assert!(trace.events.is_empty());
    }

    #[test]
    fn b3_children_keep_the_free_neighbour() {
        // 0 touches part 0 (vertex 1), part 1 (vertex 2) and free vertex 3
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = state(4, 2, &[(1, 0), (2, 1)]);
        let Branch::Split { rule, vertex, children } = select_branch(&g, &s) else { panic!() };
        assert_eq!((rule, vertex, children.len()), (Rule::B3, 0, 2));
        for c in &children {
            assert_eq!(c.state.part(0), c.state.part(3));
        }
    }

    #[test]
    fn decision_examples() {
        assert!(solve_decision(&Graph::complete(3), 2).is_none());
        let w = solve_decision(&Graph::cycle(6), 3).unwrap();
        assert!(w.parts() >= 3);
        assert!(solve_decision(&Graph::path(6), 4).unwrap().parts() >= 4);
        assert!(solve_decision(&Graph::path(6), 5).is_none());
    }

    #[test]
    fn max_examples() {
        assert_eq!(solve_max(&Graph::complete(4)).0, 1);
        let bridge = Graph::complete(3).disjoint_union(&Graph::complete(3));
        let mut bridge = bridge;
        bridge.add_edge(2, 3);
        let (p, w) = solve_max(&bridge);
        assert_eq!(p, 2);
        assert_eq!(w.cut_edges(), &[(2, 3)]);
        assert_eq!(solve_max(&Graph::new(5)).0, 5);
        assert_eq!(solve_max(&Graph::star(4)).0, 2);
    }

    #[test]
    fn trace_replays_to_witness() {
        let g = Graph::cycle(8);
        let out = solve_decision_traced(&g, 4);
        let w = out.witness.unwrap();
        let replay: Vec<usize> = out.trace.replay(8).into_iter().map(Option::unwrap).collect();
        assert_eq!(canonicalize(&g, &replay).unwrap(), w);
    }

    #[test]
    fn parallel_search_matches_sequential() {
        let mut r = crate::random::rng(11);
        for n in 6..=14 {
            for _ in 0..6 {
                let g = crate::random::connected_gnp(n, 0.2, &mut r);
                for ell in 2..=4 {
                    assert_eq!(solve_decision_parallel(&g, ell, 3), solve_decision(&g, ell));
                }
                assert_eq!(solve_max_parallel(&g, 3).0, solve_max(&g).0);
            }
        }
    }
}
