//! Greedy modulator approximations and class recognition.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulatorKind {
    /// Removal leaves an edgeless graph.
    VertexCover,
    /// Removal leaves a disjoint union of cliques.
    Cluster,
    /// Removal leaves a complete multipartite graph.
    CoCluster,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modulator {
    pub kind: ModulatorKind,
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
}

impl Modulator {
    pub fn new(kind: ModulatorKind, mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Modulator { kind, vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Membership mask over the vertices of an `n`-vertex graph.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.vertices {
            mask[v] = true;
        }
        mask
    }

    /// Whether deleting the modulator leaves the claimed class.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        if self.vertices.iter().any(|&v| v >= g.n()) {
            return false;
        }
        let rest: Vec<usize> = (0..g.n()).filter(|&v| !self.contains(v)).collect();
        let (h, _) = g.induced(&rest);
        match self.kind {
            ModulatorKind::VertexCover => h.m() == 0,
            ModulatorKind::Cluster => is_cluster_graph(&h),
            ModulatorKind::CoCluster => is_cocluster_graph(&h),
        }
    }
}

/// Every component is a clique.
pub fn is_cluster_graph(g: &Graph) -> bool {
    g.components().iter().all(|c| c.iter().all(|&v| g.degree(v) == c.len() - 1))
}

/// Non-adjacency is an equivalence relation (the complement is a cluster graph).
pub fn is_cocluster_graph(g: &Graph) -> bool {
    let n = g.n();
    (0..n).all(|v| {
        let class: Vec<usize> = (0..n).filter(|&w| w != v && !g.has_edge(v, w)).collect();
        class.iter().all(|&a| class.iter().all(|&b| a == b || !g.has_edge(a, b)))
    })
}

/// Endpoints of a maximal matching chosen by lexicographic edge scan.
pub fn approx_vertex_cover(g: &Graph) -> Modulator {
    let mut taken = vec![false; g.n()];
    let mut cover = Vec::new();
    for (u, v) in g.edges() {
        if !taken[u] && !taken[v] {
            taken[u] = true;
            taken[v] = true;
            cover.push(u);
            cover.push(v);
        }
    }
    Modulator::new(ModulatorKind::VertexCover, cover)
}

/// All vertices of a maximal family of disjoint induced `P3`s (center-first scan).
pub fn approx_cluster_modulator(g: &Graph) -> Modulator {
    let mut taken = vec![false; g.n()];
    let mut out = Vec::new();
    for b in 0..g.n() {
        'center: while !taken[b] {
            let nb: Vec<usize> = g.neighbors(b).iter().copied().filter(|&w| !taken[w]).collect();
            for (i, &a) in nb.iter().enumerate() {
                for &c in &nb[i + 1..] {
                    if !g.has_edge(a, c) {
                        for x in [a, b, c] {
                            taken[x] = true;
                            out.push(x);
                        }
                        continue 'center;
                    }
                }
            }
            break;
        }
    }
    Modulator::new(ModulatorKind::Cluster, out)
}

/// All vertices of a maximal family of disjoint induced co-`P3`s
/// (one edge plus a vertex adjacent to neither end), scanned by the lone vertex.
pub fn approx_cocluster_modulator(g: &Graph) -> Modulator {
    let mut taken = vec![false; g.n()];
    let mut out = Vec::new();
    for b in 0..g.n() {
        'lone: while !taken[b] {
            for a in 0..g.n() {
                if a == b || taken[a] || g.has_edge(a, b) {
                    continue;
                }
                for &c in g.neighbors(a) {
                    if c > a && c != b && !taken[c] && !g.has_edge(b, c) {
                        for x in [a, b, c] {
                            taken[x] = true;
                            out.push(x);
                        }
                        continue 'lone;
                    }
                }
            }
            break;
        }
    }
    Modulator::new(ModulatorKind::CoCluster, out)
}
