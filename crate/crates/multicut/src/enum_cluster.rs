//! Enumeration for graphs close to a cluster graph.
//!
//! The modulator `U` leaves a disjoint union of cliques. The pipeline runs in
//! five stages:
//!
//! 1. reduction rules shrink the instance and merge parts of `U` that every
//!    multicut keeps together;
//! 2. all labelled partitions of a small core are enumerated;
//! 3. held-out matching clusters are cut off along set packings of their
//!    neighbourhoods;
//! 4. pendant edge clusters add parts until `ell` is reachable;
//! 5. erased vertices are restored, newest first.
//!
//! Every stage extends one partial labelling in place and checks the "at most
//! one foreign neighbour" condition against the original graph, so two
//! different branches never produce the same partition.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::modulator::{Modulator, ModulatorKind};
use crate::multicut::{canonicalize, Multicut};
use crate::oracle::{enumerate_set_packings, SetPackingInstance};

const UNSET: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("modulator does not leave a cluster graph")]
    InvalidModulator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterClass {
    /// Boundary is a matching cut.
    Matching,
    /// Forced into the part of one modulator part.
    Fixed,
    /// Has a vertex with neighbours in two modulator parts.
    Ambiguous,
    /// Edge cluster whose endpoints each see a single modulator part.
    Simple,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    /// Ascending.
    pub vertices: Vec<usize>,
    /// Neighbours in the modulator, ascending.
    pub neighbours: Vec<usize>,
    pub class: ClusterClass,
}

impl Cluster {
    pub fn is_edge(&self) -> bool {
        self.vertices.len() == 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Erasure {
    /// A vertex without modulator neighbours in a large cluster.
    Vertex { vertex: usize, edges: Vec<(usize, usize)> },
    /// A whole cluster.
    Cluster { vertices: Vec<usize>, edges: Vec<(usize, usize)> },
    /// A duplicate pendant edge cluster hanging off `attach`; restored before the others.
    Pendant { vertices: Vec<usize>, attach: usize, edges: Vec<(usize, usize)> },
    /// Edge rewiring inside sets that always share a part.
    Edges { added: Vec<(usize, usize)>, removed: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JournalEntry {
    pub rule: u8,
    pub erasure: Erasure,
}

/// Reduced instance with its bookkeeping.
#[derive(Debug, Clone)]
pub struct ClusterInstance {
    pub original: Graph,
    /// Current graph; erased vertices are isolated.
    pub working: Graph,
    pub alive: Vec<bool>,
    pub in_modulator: Vec<bool>,
    parent: Vec<usize>,
    pub journal: Vec<JournalEntry>,
    /// `(rule, a, b)`: the parts of modulator vertices `a` and `b` were merged.
    pub merges: Vec<(u8, usize, usize)>,
    /// Kept representatives of duplicate matching clusters.
    pub blue: Vec<Vec<usize>>,
}

struct Info {
    vertices: Vec<usize>,
    neighbours: Vec<usize>,
    matching: bool,
    /// `(part, members of the cluster in its forced set)`.
    star: Vec<(usize, Vec<usize>)>,
    ambiguous: bool,
    simple: bool,
}

impl Info {
    fn fixed_in(&self) -> Option<usize> {
        self.star.iter().find(|(_, s)| s.len() == self.vertices.len()).map(|&(p, _)| p)
    }

    fn class(&self) -> ClusterClass {
        if self.matching {
            ClusterClass::Matching
        } else if self.fixed_in().is_some() {
            ClusterClass::Fixed
        } else if self.ambiguous {
            ClusterClass::Ambiguous
        } else if self.vertices.len() == 2 && self.simple {
            ClusterClass::Simple
        } else {
            ClusterClass::Other
        }
    }
}

impl ClusterInstance {
    fn new(g: &Graph, modulator: &Modulator) -> Self {
        let n = g.n();
        ClusterInstance {
            original: g.clone(),
            working: g.clone(),
            alive: vec![true; n],
            in_modulator: modulator.mask(n),
            parent: (0..n).collect(),
            journal: Vec::new(),
            merges: Vec::new(),
            blue: Vec::new(),
        }
    }

    /// Representative of the modulator part holding `u`.
    pub fn part(&self, mut u: usize) -> usize {
        while self.parent[u] != u {
            u = self.parent[u];
        }
        u
    }

    /// Modulator parts, each ascending, ordered by smallest vertex.
    pub fn mono_parts(&self) -> Vec<Vec<usize>> {
        let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
        for u in (0..self.alive.len()).filter(|&u| self.in_modulator[u]) {
            by_root.entry(self.part(u)).or_default().push(u);
        }
        let mut parts: Vec<Vec<usize>> = by_root.into_values().collect();
        parts.sort();
        parts
    }

    pub fn modulator_size(&self) -> usize {
        self.in_modulator.iter().filter(|&&b| b).count()
    }

    fn merge(&mut self, rule: u8, a: usize, b: usize) {
        let (ra, rb) = (self.part(a), self.part(b));
        self.parent[ra.max(rb)] = ra.min(rb);
        self.merges.push((rule, a, b));
    }

    fn u_neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.working.neighbors(v).iter().copied().filter(|&w| self.in_modulator[w])
    }

    fn raw_clusters(&self) -> Vec<Vec<usize>> {
        let n = self.alive.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || !self.alive[s] || self.in_modulator[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in self.working.neighbors(v) {
                    if !seen[w] && !self.in_modulator[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    fn analyse(&self) -> Vec<Info> {
        self.raw_clusters()
            .into_iter()
            .map(|vertices| {
                let mut neighbours: Vec<usize> = vertices.iter().flat_map(|&v| self.u_neighbours(v)).collect();
                neighbours.sort_unstable();
                let repeated = neighbours.windows(2).any(|w| w[0] == w[1]);
                neighbours.dedup();
                let matching = !repeated && vertices.iter().all(|&v| self.u_neighbours(v).count() <= 1);
                let mut per_vertex: Vec<HashMap<usize, usize>> = Vec::with_capacity(vertices.len());
                for &v in &vertices {
                    let mut counts = HashMap::new();
                    for w in self.u_neighbours(v) {
                        *counts.entry(self.part(w)).or_insert(0) += 1;
                    }
                    per_vertex.push(counts);
                }
                let mut parts: Vec<usize> = neighbours.iter().map(|&w| self.part(w)).collect();
                parts.sort_unstable();
                parts.dedup();
                let mut star = Vec::new();
                for &p in &parts {
                    let two = |c: &HashMap<usize, usize>| c.get(&p).copied().unwrap_or(0) >= 2;
                    let any_two = per_vertex.iter().any(two);
                    let grabbed = neighbours.iter().any(|&w| {
                        self.part(w) == p && self.working.neighbors(w).iter().filter(|x| vertices.binary_search(x).is_ok()).count() >= 2
                    });
                    let members: Vec<usize> = if grabbed || (vertices.len() >= 3 && any_two) {
                        vertices.clone()
                    } else {
                        vertices.iter().zip(&per_vertex).filter(|(_, c)| two(c)).map(|(&v, _)| v).collect()
                    };
                    if !members.is_empty() {
                        star.push((p, members));
                    }
                }
                let ambiguous = per_vertex.iter().any(|c| c.len() >= 2);
                let simple = per_vertex.iter().all(|c| c.len() <= 1);
                Info { vertices, neighbours, matching, star, ambiguous, simple }
            })
            .collect()
    }

    /// Current clusters of the working graph with their classification.
    pub fn clusters(&self) -> Vec<Cluster> {
        self.analyse().into_iter().map(|i| Cluster { class: i.class(), vertices: i.vertices, neighbours: i.neighbours }).collect()
    }

    fn erase(&mut self, vertices: &[usize]) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for &v in vertices {
            for &w in self.working.neighbors(v) {
                if vertices.binary_search(&w).is_err() || v < w {
                    edges.push((v.min(w), v.max(w)));
                }
            }
        }
        for &v in vertices {
            self.working.isolate(v);
            self.alive[v] = false;
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Applies the first applicable rule; `false` at the fixed point.
    fn step(&mut self) -> bool {
        let infos = self.analyse();
        let us: Vec<usize> = (0..self.alive.len()).filter(|&u| self.in_modulator[u]).collect();

        // 1: a vertex forced towards two parts
        for info in &infos {
            for &v in &info.vertices {
                let parts: Vec<usize> = info.star.iter().filter(|(_, s)| s.contains(&v)).map(|&(p, _)| p).collect();
                if parts.len() >= 2 {
                    self.merge(1, parts[0], parts[1]);
                    return true;
                }
            }
        }
        // 2: three common neighbours of two parts
        for (i, &a) in us.iter().enumerate() {
            for &b in &us[i + 1..] {
                if self.part(a) != self.part(b) {
                    let common = self.working.neighbors(a).iter().filter(|&&x| self.working.has_edge(x, b)).count();
                    if common >= 3 {
                        self.merge(2, a, b);
                        return true;
                    }
                }
            }
        }
        // 3: two clusters forced into the same part become one clique
        let mut fixed_by_part: HashMap<usize, Vec<usize>> = HashMap::new();
        for (ci, info) in infos.iter().enumerate() {
            for (p, s) in &info.star {
                if s.len() == info.vertices.len() {
                    fixed_by_part.entry(*p).or_default().push(ci);
                }
            }
        }
        let mut keys: Vec<usize> = fixed_by_part.keys().copied().collect();
        keys.sort_unstable();
        for p in keys {
            let list = &fixed_by_part[&p];
            if list.len() >= 2 {
                let (c1, c2) = (&infos[list[0]].vertices, &infos[list[1]].vertices);
                let mut added = Vec::new();
                for &x in c1 {
                    for &y in c2 {
                        if self.working.add_edge(x, y) {
                            added.push((x.min(y), x.max(y)));
                        }
                    }
                }
                self.journal.push(JournalEntry { rule: 3, erasure: Erasure::Edges { added, removed: Vec::new() } });
                return true;
            }
        }
        // 4: a modulator-free vertex of a large cluster
        let lonely = infos
            .iter()
            .filter(|i| i.vertices.len() > 3)
            .flat_map(|i| i.vertices.iter().copied())
            .filter(|&v| self.u_neighbours(v).next().is_none())
            .min();
        if let Some(v) = lonely {
            let edges = self.erase(&[v]);
            self.journal.push(JournalEntry { rule: 4, erasure: Erasure::Vertex { vertex: v, edges } });
            return true;
        }
        // 5: rewire a forced cluster to a minimal attachment
        for info in infos.iter().filter(|i| i.vertices.len() >= 3) {
            let Some(p) = info.fixed_in() else { continue };
            let part: Vec<usize> = us.iter().copied().filter(|&u| self.part(u) == p).collect();
            let c = &info.vertices;
            let mut target = vec![(part[0], c[0]), (part[0], c[1])];
            if part.len() == 2 {
                target.push((part[1], c[2]));
            }
            let working = &self.working;
            let current: Vec<(usize, usize)> =
                part.iter().flat_map(|&u| c.iter().filter(move |&&v| working.has_edge(u, v)).map(move |&v| (u, v))).collect();
            let mut want = target.clone();
            want.sort_unstable();
            let clique_missing: Vec<(usize, usize)> = if part.len() > 2 {
                part.iter()
                    .enumerate()
                    .flat_map(|(i, &a)| part[i + 1..].iter().map(move |&b| (a, b)))
                    .filter(|&(a, b)| !working.has_edge(a, b))
                    .collect()
            } else {
                Vec::new()
            };
            if current == want && clique_missing.is_empty() {
                continue;
            }
            let mut removed = Vec::new();
            let mut added = Vec::new();
            for &(u, v) in &current {
                if !want.contains(&(u, v)) {
                    self.working.remove_edge(u, v);
                    removed.push((u.min(v), u.max(v)));
                }
            }
            for &(u, v) in &want {
                if self.working.add_edge(u, v) {
                    added.push((u.min(v), u.max(v)));
                }
            }
            for (a, b) in clique_missing {
                self.working.add_edge(a, b);
                added.push((a, b));
            }
            self.journal.push(JournalEntry { rule: 5, erasure: Erasure::Edges { added, removed } });
            return true;
        }
        // 6: simple edge clusters that are not matching clusters
        if let Some(info) = infos.iter().find(|i| i.vertices.len() == 2 && i.simple && !i.matching) {
            let vertices = info.vertices.clone();
            let edges = self.erase(&vertices);
            self.journal.push(JournalEntry { rule: 6, erasure: Erasure::Cluster { vertices, edges } });
            return true;
        }
        // 7: three large clusters sharing neighbours in two parts
        for (i, &a) in us.iter().enumerate() {
            for &b in &us[i + 1..] {
                if self.part(a) == self.part(b) {
                    continue;
                }
                let shared = infos
                    .iter()
                    .filter(|c| c.vertices.len() >= 3 && c.neighbours.binary_search(&a).is_ok() && c.neighbours.binary_search(&b).is_ok())
                    .count();
                if shared >= 3 {
                    self.merge(7, a, b);
                    return true;
                }
            }
        }
        // 8 and 9: duplicate matching clusters
        let mut groups: HashMap<(usize, &[usize]), Vec<usize>> = HashMap::new();
        for (ci, info) in infos.iter().enumerate() {
            if info.matching && !info.neighbours.is_empty() {
                groups.entry((info.vertices.len(), &info.neighbours)).or_default().push(ci);
            }
        }
        let mut keys: Vec<(usize, &[usize])> = groups.keys().copied().collect();
        keys.sort();
        for key in keys {
            let list = &groups[&key];
            let two_two = key.0 == 2 && key.1.len() == 2;
            let keep = if two_two { 2 } else { 1 };
            if list.len() <= keep {
                continue;
            }
            let rule = if two_two { 9 } else { 8 };
            let kept = infos[list[0]].vertices.clone();
            if rule == 8 && !self.blue.contains(&kept) {
                self.blue.push(kept);
            }
            let vertices = infos[list[keep]].vertices.clone();
            let edges = self.erase(&vertices);
            let erasure = if key.0 == 2 && key.1.len() == 1 {
                Erasure::Pendant { vertices, attach: key.1[0], edges }
            } else {
                Erasure::Cluster { vertices, edges }
            };
            self.journal.push(JournalEntry { rule, erasure });
            return true;
        }
        false
    }

    /// Undoes the journal on the working graph; equals the original graph.
    pub fn replay_journal(&self) -> Graph {
        let mut g = self.working.clone();
        for entry in self.journal.iter().rev() {
            match &entry.erasure {
                Erasure::Edges { added, removed } => {
                    for &(u, v) in added {
                        g.remove_edge(u, v);
                    }
                    for &(u, v) in removed {
                        g.add_edge(u, v);
                    }
                }
                Erasure::Vertex { edges, .. } | Erasure::Cluster { edges, .. } | Erasure::Pendant { edges, .. } => {
                    for &(u, v) in edges {
                        g.add_edge(u, v);
                    }
                }
            }
        }
        g
    }
}

/// Applies the reduction rules in numeric order, restarting after every change.
pub fn reduce_cluster_instance(g: &Graph, modulator: &Modulator) -> Result<ClusterInstance, ClusterError> {
    let as_cluster = Modulator::new(ModulatorKind::Cluster, modulator.vertices.clone());
    if !as_cluster.is_valid_for(g) {
        return Err(ClusterError::InvalidModulator);
    }
    let mut inst = ClusterInstance::new(g, modulator);
    while inst.step() {}
    check_structure(&inst);
    Ok(inst)
}

fn check_structure(inst: &ClusterInstance) {
    let u = inst.modulator_size();
    let pairs = u * u.saturating_sub(1) / 2;
    let infos = inst.analyse();
    for info in &infos {
        assert!(info.vertices.len() <= u + 3, "reduced cluster larger than the modulator bound");
    }
    let spanning = infos.iter().filter(|i| i.matching && i.neighbours.iter().any(|&w| inst.part(w) != inst.part(i.neighbours[0]))).count();
    assert!(spanning <= 4 * pairs, "too many matching clusters across two modulator parts");
}

/// Partial assignment of part labels with crossing counts in the original graph.
#[derive(Debug, Clone)]
pub struct Labelling {
    label: Vec<usize>,
    cross: Vec<u8>,
    size: Vec<usize>,
    count: usize,
}

impl Labelling {
    pub fn new(n: usize) -> Self {
        Labelling { label: vec![UNSET; n], cross: vec![0; n], size: Vec::new(), count: 0 }
    }

    pub fn label(&self, v: usize) -> Option<usize> {
        Some(self.label[v]).filter(|&l| l != UNSET)
    }

    /// Labels in use; fresh labels are always `parts()`.
    pub fn parts(&self) -> usize {
        self.count
    }

    /// Whether `v` already has a neighbour with another label.
    pub fn is_saturated(&self, v: usize) -> bool {
        self.cross[v] > 0
    }

    pub fn is_complete(&self) -> bool {
        self.label.iter().all(|&l| l != UNSET)
    }

    /// Labels `v` with `l <= parts()`; refuses if a vertex would get a second foreign neighbour.
    pub fn assign(&mut self, g: &Graph, v: usize, l: usize) -> bool {
        debug_assert!(self.label[v] == UNSET && l <= self.count);
        let foreign: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| self.label[w] != UNSET && self.label[w] != l).collect();
        if foreign.len() > 1 || (foreign.len() == 1 && (self.cross[v] > 0 || self.cross[foreign[0]] > 0)) {
            return false;
        }
        if let Some(&w) = foreign.first() {
            self.cross[v] += 1;
            self.cross[w] += 1;
        }
        self.label[v] = l;
        if l == self.count {
            self.count += 1;
            self.size.push(0);
        }
        self.size[l] += 1;
        true
    }

    pub fn unassign(&mut self, g: &Graph, v: usize) {
        let l = self.label[v];
        debug_assert!(l != UNSET);
        for &w in g.neighbors(v) {
            if self.label[w] != UNSET && self.label[w] != l {
                self.cross[v] -= 1;
                self.cross[w] -= 1;
            }
        }
        self.label[v] = UNSET;
        self.size[l] -= 1;
        while self.count > 0 && self.size[self.count - 1] == 0 {
            self.count -= 1;
            self.size.pop();
        }
    }

    /// Whether every label class induces a connected subgraph of `g`.
    pub fn parts_connected(&self, g: &Graph) -> bool {
        let n = self.label.len();
        let mut dsu: Vec<usize> = (0..n).collect();
        fn find(d: &mut [usize], mut x: usize) -> usize {
            while d[x] != x {
                d[x] = d[d[x]];
                x = d[x];
            }
            x
        }
        let mut comps = n;
        for (u, v) in g.edges() {
            if self.label[u] == self.label[v] {
                let (a, b) = (find(&mut dsu, u), find(&mut dsu, v));
                if a != b {
                    dsu[a] = b;
                    comps -= 1;
                }
            }
        }
        comps == self.count
    }

    pub fn to_multicut(&self, g: &Graph) -> Multicut {
        canonicalize(g, &self.label).expect("complete labelling validates")
    }
}

type Sink<'s> = &'s mut dyn FnMut(&mut Labelling) -> ControlFlow<()>;

/// A held-out matching cluster with its neighbourhood inside one modulator part.
#[derive(Debug, Clone)]
struct Held {
    vertices: Vec<usize>,
    neighbours: Vec<usize>,
    /// For pendant edge clusters: the endpoint adjacent to the modulator.
    anchor: Option<usize>,
}

/// Stage plan derived from a reduced instance.
pub struct Pipeline<'a> {
    inst: &'a ClusterInstance,
    core: Vec<usize>,
    in_core: Vec<bool>,
    held: Vec<Held>,
    /// Erased duplicates per held pendant cluster index.
    duplicates: Vec<(usize, Vec<usize>)>,
    detached: Vec<Vec<usize>>,
    /// Erased vertex sets, newest first, with the number of parts each can add.
    restore: Vec<(Vec<usize>, usize)>,
    core_links: Vec<Vec<usize>>,
    stats: PipelineStats,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PipelineStats {
    pub core_size: usize,
    pub held_out: usize,
    pub pendant_duplicates: usize,
    pub detached: usize,
    pub restored_sets: usize,
}

impl<'a> Pipeline<'a> {
    pub fn new(inst: &'a ClusterInstance) -> Self {
        let g = &inst.original;
        let n = g.n();
        let mut in_core = vec![false; n];
        let mut held = Vec::new();
        let mut detached = Vec::new();
        for info in inst.analyse() {
            let mono = info.neighbours.iter().all(|&w| inst.part(w) == inst.part(info.neighbours[0]));
            if info.matching && info.neighbours.is_empty() {
                detached.push(info.vertices);
            } else if info.matching && mono {
                let anchor = (info.vertices.len() == 2 && info.neighbours.len() == 1)
                    .then(|| *info.vertices.iter().find(|&&v| inst.working.has_edge(v, info.neighbours[0])).unwrap());
                held.push(Held { vertices: info.vertices, neighbours: info.neighbours, anchor });
            } else {
                for v in info.vertices {
                    in_core[v] = true;
                }
            }
        }
        for u in 0..n {
            if inst.in_modulator[u] {
                in_core[u] = true;
            }
        }
        let core: Vec<usize> = (0..n).filter(|&v| in_core[v]).collect();
        let u = inst.modulator_size();
        let bound = u + (u + 3) * (u + 6 * u * u.saturating_sub(1) / 2);
        assert!(core.len() <= bound, "core of {} vertices exceeds the cubic bound {bound}", core.len());

        let mut duplicates = Vec::new();
        let mut restore = Vec::new();
        for entry in inst.journal.iter().rev() {
            match &entry.erasure {
                Erasure::Pendant { vertices, attach, .. } => {
                    let h = held
                        .iter()
                        .position(|h| h.anchor.is_some() && h.neighbours == [*attach])
                        .expect("pendant duplicate keeps its representative");
                    duplicates.push((h, vertices.clone()));
                }
                Erasure::Vertex { vertex, .. } => restore.push((vec![*vertex], 0)),
                Erasure::Cluster { vertices, .. } => restore.push((vertices.clone(), 1)),
                Erasure::Edges { .. } => {}
            }
        }

        // non-core components reachable from each core vertex
        let mut comp = vec![UNSET; n];
        let mut next = 0;
        for s in 0..n {
            if in_core[s] || comp[s] != UNSET {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in g.neighbors(v) {
                    if !in_core[w] && comp[w] == UNSET {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        let core_links = core
            .iter()
            .map(|&v| {
                let mut c: Vec<usize> = g.neighbors(v).iter().filter(|&&w| !in_core[w]).map(|&w| comp[w]).collect();
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        let stats = PipelineStats {
            core_size: core.len(),
            held_out: held.len(),
            pendant_duplicates: duplicates.len(),
            detached: detached.len(),
            restored_sets: restore.len(),
        };
        Pipeline { inst, core, in_core, held, duplicates, detached, restore, core_links, stats }
    }

    pub fn stats(&self) -> &PipelineStats {
        &self.stats
    }

    fn g(&self) -> &'a Graph {
        &self.inst.original
    }

    /// Every labelling of the core with each modulator part under one label,
    /// whose classes can still become connected through non-core vertices.
    pub fn enumerate_core(&self, sink: Sink<'_>) -> ControlFlow<()> {
        let mut lab = Labelling::new(self.g().n());
        self.core_dfs(&mut lab, 0, sink)
    }

    fn core_dfs(&self, lab: &mut Labelling, i: usize, sink: Sink<'_>) -> ControlFlow<()> {
        let g = self.g();
        if i == self.core.len() {
            return if self.core_may_connect(lab) { sink(lab) } else { ControlFlow::Continue(()) };
        }
        let v = self.core[i];
        let forced = if self.inst.in_modulator[v] {
            let p = self.inst.part(v);
            self.core[..i].iter().find(|&&w| self.inst.in_modulator[w] && self.inst.part(w) == p).map(|&w| lab.label[w])
        } else {
            None
        };
        let options: Vec<usize> = match forced {
            Some(l) => vec![l],
            None => (0..=lab.parts()).collect(),
        };
        for l in options {
            if lab.assign(g, v, l) {
                self.core_dfs(lab, i + 1, sink)?;
                lab.unassign(g, v);
            }
        }
        ControlFlow::Continue(())
    }

    fn core_may_connect(&self, lab: &Labelling) -> bool {
        let g = self.g();
        let k = self.core.len();
        let mut dsu: Vec<usize> = (0..k).collect();
        fn find(d: &mut [usize], mut x: usize) -> usize {
            while d[x] != x {
                d[x] = d[d[x]];
                x = d[x];
            }
            x
        }
        let index: HashMap<usize, usize> = self.core.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut via: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, &v) in self.core.iter().enumerate() {
            for &w in g.neighbors(v) {
                if self.in_core[w] && lab.label[w] == lab.label[v] {
                    let (a, b) = (find(&mut dsu, i), find(&mut dsu, index[&w]));
                    dsu[a] = b;
                }
            }
            for &c in &self.core_links[i] {
                match via.get(&(lab.label[v], c)) {
                    Some(&j) => {
                        let (a, b) = (find(&mut dsu, i), find(&mut dsu, j));
                        dsu[a] = b;
                    }
                    None => {
                        via.insert((lab.label[v], c), i);
                    }
                }
            }
        }
        let mut root_of = vec![UNSET; lab.parts()];
        for i in 0..k {
            let l = lab.label[self.core[i]];
            let r = find(&mut dsu, i);
            if root_of[l] == UNSET {
                root_of[l] = r;
            } else if root_of[l] != r {
                return false;
            }
        }
        true
    }

    /// Cuts off every set packing of unsaturated held-out neighbourhoods; the
    /// remaining held-out clusters join their neighbours, except pendant edge
    /// clusters, which are left for the next stage.
    pub fn extend_with_matching_clusters(
        &self,
        lab: &mut Labelling,
        sink: &mut dyn FnMut(&mut Labelling, &[bool]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let g = self.g();
        let us: Vec<usize> = (0..g.n()).filter(|&u| self.inst.in_modulator[u]).collect();
        let slot = |u: usize| us.binary_search(&u).unwrap();
        let open: Vec<usize> = (0..self.held.len()).filter(|&h| self.held[h].neighbours.iter().all(|&w| !lab.is_saturated(w))).collect();
        let family = open.iter().map(|&h| self.held[h].neighbours.iter().map(|&w| slot(w)).collect()).collect();
        let packing_inst = SetPackingInstance::new(us.len(), family, 0);
        for packing in enumerate_set_packings(&packing_inst, 0) {
            let mut separated = vec![false; self.held.len()];
            for &i in &packing {
                separated[open[i]] = true;
            }
            let mut done: Vec<usize> = Vec::new();
            let mut ok = true;
            'outer: for (h, held) in self.held.iter().enumerate() {
                if !separated[h] && held.anchor.is_some() {
                    continue;
                }
                let l = if separated[h] { lab.parts() } else { lab.label[held.neighbours[0]] };
                for &v in &held.vertices {
                    if !lab.assign(g, v, l) {
                        ok = false;
                        break 'outer;
                    }
                    done.push(v);
                }
            }
            let flow = if ok { sink(lab, &separated) } else { ControlFlow::Continue(()) };
            for &v in done.iter().rev() {
                lab.unassign(g, v);
            }
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn journal_bonus(&self, from: usize) -> usize {
        self.restore[from..].iter().map(|&(_, gain)| gain).sum()
    }

    /// Places pendant edge clusters and detached clusters; prunes when even
    /// every remaining option cannot reach `ell` parts.
    pub fn extend_with_pendant_clusters(&self, lab: &mut Labelling, separated: &[bool], ell: usize, sink: Sink<'_>) -> ControlFlow<()> {
        let mut items: Vec<(Vec<usize>, Option<usize>, usize)> = Vec::new();
        for (h, held) in self.held.iter().enumerate() {
            if let (Some(a), false) = (held.anchor, separated[h]) {
                items.push((held.vertices.clone(), Some(a), 1));
            }
        }
        for (_, vertices) in &self.duplicates {
            items.push((vertices.clone(), None, 1));
        }
        for c in &self.detached {
            items.push((c.clone(), None, if c.len() == 2 { 2 } else { 1 }));
        }
        self.pendant_step(lab, &items, 0, ell, sink)
    }

    fn pendant_step(
        &self,
        lab: &mut Labelling,
        items: &[(Vec<usize>, Option<usize>, usize)],
        i: usize,
        ell: usize,
        sink: Sink<'_>,
    ) -> ControlFlow<()> {
        let reachable = lab.parts() + items[i..].iter().map(|it| it.2).sum::<usize>() + self.journal_bonus(0);
        if reachable < ell {
            return ControlFlow::Continue(());
        }
        if i == items.len() {
            return sink(lab);
        }
        let g = self.g();
        let (vertices, anchor, _) = &items[i];
        match anchor {
            // a pendant representative that was not cut off keeps its anchor with the modulator
            Some(a) => {
                let w = g.neighbors(*a).iter().copied().find(|&w| self.inst.in_modulator[w]).unwrap();
                if !lab.assign(g, *a, lab.label[w]) {
                    return ControlFlow::Continue(());
                }
                let rest: Vec<usize> = vertices.iter().copied().filter(|v| v != a).collect();
                let flow = place(g, lab, &rest, &mut |lab| self.pendant_step(lab, items, i + 1, ell, sink));
                lab.unassign(g, *a);
                flow
            }
            None => place(g, lab, vertices, &mut |lab| self.pendant_step(lab, items, i + 1, ell, sink)),
        }
    }

    /// Restores erased vertex sets newest first in every valid way and emits
    /// complete labellings with connected parts and at least `ell` of them.
    pub fn lift(&self, lab: &mut Labelling, ell: usize, sink: Sink<'_>) -> ControlFlow<()> {
        self.lift_step(lab, 0, ell, sink)
    }

    fn lift_step(&self, lab: &mut Labelling, i: usize, ell: usize, sink: Sink<'_>) -> ControlFlow<()> {
        if lab.parts() + self.journal_bonus(i) < ell {
            return ControlFlow::Continue(());
        }
        if i == self.restore.len() {
            debug_assert!(lab.is_complete());
            if lab.parts_connected(self.g()) {
                return sink(lab);
            }
            return ControlFlow::Continue(());
        }
        place(self.g(), lab, &self.restore[i].0, &mut |lab| self.lift_step(lab, i + 1, ell, sink))
    }

    /// All stages composed.
    pub fn run(&self, ell: usize, sink: Sink<'_>) -> ControlFlow<()> {
        self.enumerate_core(&mut |lab| {
            self.extend_with_matching_clusters(lab, &mut |lab, separated| {
                self.extend_with_pendant_clusters(lab, separated, ell, &mut |lab| self.lift(lab, ell, sink))
            })
        })
    }
}

/// Every way to label `vertices`: labels of already labelled neighbours,
/// labels opened while placing them, or a fresh one.
fn place(g: &Graph, lab: &mut Labelling, vertices: &[usize], sink: Sink<'_>) -> ControlFlow<()> {
    let mut near: Vec<usize> = vertices.iter().flat_map(|&v| g.neighbors(v).iter().filter_map(|&w| lab.label(w))).collect();
    near.sort_unstable();
    near.dedup();
    let base = lab.parts();
    place_from(g, lab, vertices, &near, base, sink)
}

fn place_from(g: &Graph, lab: &mut Labelling, vertices: &[usize], near: &[usize], base: usize, sink: Sink<'_>) -> ControlFlow<()> {
    let Some((&v, rest)) = vertices.split_first() else { return sink(lab) };
    let options: Vec<usize> = near.iter().copied().chain(base..=lab.parts()).collect();
    for l in options {
        if lab.assign(g, v, l) {
            place_from(g, lab, rest, near, base, sink)?;
            lab.unassign(g, v);
        }
    }
    ControlFlow::Continue(())
}

/// Streams every matching multicut of `g` with at least `ell` parts; stops early if the sink breaks.
pub fn enumerate_cluster_with(
    g: &Graph,
    modulator: &Modulator,
    ell: usize,
    sink: &mut dyn FnMut(Multicut) -> ControlFlow<()>,
) -> Result<PipelineStats, ClusterError> {
    let inst = reduce_cluster_instance(g, modulator)?;
    let pipe = Pipeline::new(&inst);
    if ell <= g.n() {
        let _ = pipe.run(ell, &mut |lab| sink(lab.to_multicut(g)));
    }
    Ok(pipe.stats().clone())
}

pub fn enumerate_cluster(g: &Graph, modulator: &Modulator, ell: usize) -> Result<Vec<Multicut>, ClusterError> {
    let mut out = Vec::new();
    enumerate_cluster_with(g, modulator, ell, &mut |m| {
        out.push(m);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Gaps between consecutive emissions, starting from the call and ending after the last one.
pub fn emission_delays(g: &Graph, modulator: &Modulator, ell: usize) -> Result<(usize, Vec<Duration>), ClusterError> {
    let start = Instant::now();
    let mut last = start;
    let mut delays = Vec::new();
    let mut count = 0;
    enumerate_cluster_with(g, modulator, ell, &mut |_| {
        let now = Instant::now();
        delays.push(now - last);
        last = now;
        count += 1;
        ControlFlow::Continue(())
    })?;
    delays.push(last.elapsed());
    Ok((count, delays))
}
