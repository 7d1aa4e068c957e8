//! Brute-force reference answers for small inputs.
//!
//! Multicuts are enumerated through their cut sets: every canonical multicut is
//! determined by a matching `M` of triangle-free edges in which each edge still
//! separates its endpoints in `G - M`.

use thiserror::Error;

use crate::graph::Graph;
use crate::multicut::{max_parts_of_cut, Multicut};

/// Environment variable that raises or lowers the multicut size guard.
pub const LIMIT_VAR: &str = "MULTICUT_ORACLE_LIMIT";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("oracle refuses a graph on {n} vertices (limit {limit}; set {LIMIT_VAR} to override)")]
pub struct TooLarge {
    pub n: usize,
    pub limit: usize,
}

/// Size guards for the exhaustive routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub multicut_limit: usize,
    pub mis_limit: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        let env = std::env::var(LIMIT_VAR).ok().and_then(|s| s.parse().ok());
        Oracle { multicut_limit: env.unwrap_or(12), mis_limit: env.map_or(20, |l: usize| l.max(20)) }
    }
}

impl Oracle {
    /// No size guards at all.
    pub fn unbounded() -> Self {
        Oracle { multicut_limit: usize::MAX, mis_limit: usize::MAX }
    }

    fn guard(n: usize, limit: usize) -> Result<(), TooLarge> {
        if n > limit {
            Err(TooLarge { n, limit })
        } else {
            Ok(())
        }
    }

    /// Every canonical multicut with at least `ell` parts, sorted by `part_of`.
    pub fn enumerate_all_multicuts(&self, g: &Graph, ell: usize) -> Result<Vec<Multicut>, TooLarge> {
        Self::guard(g.n(), self.multicut_limit)?;
        let mut out = Vec::new();
        for_each_cut(g, |cut, parts| {
            if parts >= ell {
                out.push(max_parts_of_cut(g, cut).expect("cut is a matching of edges"));
            }
        });
        out.sort_unstable_by(|a, b| a.part_of().cmp(b.part_of()));
        Ok(out)
    }

    /// Largest part count of any matching multicut; 0 for the empty graph.
    pub fn max_parts(&self, g: &Graph) -> Result<usize, TooLarge> {
        Self::guard(g.n(), self.multicut_limit)?;
        let mut best = 0;
        for_each_cut(g, |_, parts| best = best.max(parts));
        Ok(best)
    }

    /// Independence number.
    pub fn max_independent_set(&self, g: &Graph) -> Result<usize, TooLarge> {
        Self::guard(g.n(), self.mis_limit.min(128))?;
        let adj: Vec<u128> = (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u128, |m, &w| m | 1 << w)).collect();
        let all = if g.n() == 128 { u128::MAX } else { (1u128 << g.n()) - 1 };
        Ok(mis(&adj, all))
    }
}

pub fn enumerate_all_multicuts(g: &Graph, ell: usize) -> Result<Vec<Multicut>, TooLarge> {
    Oracle::default().enumerate_all_multicuts(g, ell)
}

pub fn max_parts(g: &Graph) -> Result<usize, TooLarge> {
    Oracle::default().max_parts(g)
}

pub fn max_independent_set(g: &Graph) -> Result<usize, TooLarge> {
    Oracle::default().max_independent_set(g)
}

/// Calls `visit(cut, parts)` once per canonical cut set.
fn for_each_cut(g: &Graph, mut visit: impl FnMut(&[(usize, usize)], usize)) {
    let edges: Vec<(usize, usize)> = g.edges().filter(|&(u, v)| !g.in_triangle(u, v)).collect();
    let mut taken = vec![false; g.n()];
    let mut cut = Vec::new();
    let mut dsu = Dsu::new(g.n());
    let mut search = CutSearch { g, edges: &edges, taken: &mut taken, cut: &mut cut, dsu: &mut dsu };
    search.run(0, &mut visit);
}

struct CutSearch<'a> {
    g: &'a Graph,
    edges: &'a [(usize, usize)],
    taken: &'a mut Vec<bool>,
    cut: &'a mut Vec<(usize, usize)>,
    dsu: &'a mut Dsu,
}

impl CutSearch<'_> {
    fn run(&mut self, i: usize, visit: &mut impl FnMut(&[(usize, usize)], usize)) {
        if i == self.edges.len() {
            if let Some(parts) = self.separating_parts() {
                visit(self.cut, parts);
            }
            return;
        }
        self.run(i + 1, visit);
        let (u, v) = self.edges[i];
        if !self.taken[u] && !self.taken[v] {
            self.taken[u] = true;
            self.taken[v] = true;
            self.cut.push((u, v));
            self.run(i + 1, visit);
            self.cut.pop();
            self.taken[u] = false;
            self.taken[v] = false;
        }
    }

    /// Component count of `G - cut` if every cut edge separates.
    fn separating_parts(&mut self) -> Option<usize> {
        let g = self.g;
        self.dsu.reset();
        let mut parts = g.n();
        for (u, v) in g.edges() {
            let in_cut = self.taken[u] && self.taken[v] && self.cut.contains(&(u, v));
            if !in_cut && self.dsu.union(u, v) {
                parts -= 1;
            }
        }
        let separating = self.cut.iter().all(|&(u, v)| self.dsu.find(u) != self.dsu.find(v));
        separating.then_some(parts)
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

fn mis(adj: &[u128], set: u128) -> usize {
    if set == 0 {
        return 0;
    }
    let mut best_v = usize::MAX;
    let mut best_deg = 0;
    let mut rest = set;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & set).count_ones();
        if d <= 1 {
            return 1 + mis(adj, set & !(adj[v] | 1 << v));
        }
        if best_v == usize::MAX || d > best_deg {
            best_v = v;
            best_deg = d;
        }
    }
    let v = best_v;
    let with = 1 + mis(adj, set & !(adj[v] | 1 << v));
    let without = mis(adj, set & !(1 << v));
    with.max(without)
}

/// Ground set `0..ground`, a family of subsets (duplicates allowed) and a target size.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetPackingInstance {
    pub ground: usize,
    pub family: Vec<Vec<usize>>,
    pub k: usize,
}

impl SetPackingInstance {
    pub fn new(ground: usize, family: Vec<Vec<usize>>, k: usize) -> Self {
        let family = family
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                assert!(s.iter().all(|&x| x < ground), "set element outside the ground set");
                s
            })
            .collect();
        SetPackingInstance { ground, family, k }
    }

    /// Whether the sets at `indices` are pairwise disjoint.
    pub fn is_packing(&self, indices: &[usize]) -> bool {
        let mut seen = vec![false; self.ground];
        indices.iter().all(|&i| self.family[i].iter().all(|&x| !std::mem::replace(&mut seen[x], true)))
    }

    /// Whether some packing has at least `k` sets.
    pub fn is_yes(&self) -> bool {
        enumerate_set_packings(self, self.k).next().is_some()
    }

    pub fn max_packing(&self) -> usize {
        enumerate_set_packings(self, 0).map(|p| p.len()).max().unwrap_or(0)
    }
}

/// Every packing of at least `min_size` sets, as ascending index lists, in
/// depth-first order over ascending indices (`[]`, `[0]`, `[0, 1]`, `[1]`, ...).
pub fn enumerate_set_packings(inst: &SetPackingInstance, min_size: usize) -> SetPackings<'_> {
    SetPackings { inst, min_size, chosen: Vec::new(), used: vec![false; inst.ground], cursor: 0, pending: true }
}

/// Pull-based packing stream from [`enumerate_set_packings`].
#[derive(Debug, Clone)]
pub struct SetPackings<'a> {
    inst: &'a SetPackingInstance,
    min_size: usize,
    chosen: Vec<usize>,
    used: Vec<bool>,
    cursor: usize,
    pending: bool,
}

impl SetPackings<'_> {
    fn fits(&self, i: usize) -> bool {
        self.inst.family[i].iter().all(|&x| !self.used[x])
    }

    fn mark(&mut self, i: usize, value: bool) {
        for &x in &self.inst.family[i] {
            self.used[x] = value;
        }
    }
}

impl Iterator for SetPackings<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let total = self.inst.family.len();
        loop {
            if self.pending {
                self.pending = false;
                if self.chosen.len() >= self.min_size {
                    debug_assert!(self.inst.is_packing(&self.chosen));
                    return Some(self.chosen.clone());
                }
            }
            let mut child = None;
            for i in self.cursor..total {
                if self.chosen.len() + (total - i) < self.min_size {
                    break;
                }
                if self.fits(i) {
                    child = Some(i);
                    break;
                }
            }
            match child {
                Some(i) => {
                    self.mark(i, true);
                    self.chosen.push(i);
                    self.cursor = i + 1;
                    self.pending = true;
                }
                None => {
                    let j = self.chosen.pop()?;
                    self.mark(j, false);
                    self.cursor = j + 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts_lists(list: &[Multicut]) -> Vec<Vec<Vec<usize>>> {
        list.iter().map(Multicut::members).collect()
    }

    #[test]
    fn small_enumerations() {
        assert!(enumerate_all_multicuts(&Graph::complete(3), 2).unwrap().is_empty());
        let p3 = enumerate_all_multicuts(&Graph::path(3), 2).unwrap();
        assert_eq!(parts_lists(&p3), vec![vec![vec![0, 1], vec![2]], vec![vec![0], vec![1, 2]]]);
        let c4 = enumerate_all_multicuts(&Graph::cycle(4), 2).unwrap();
        let cuts: Vec<_> = c4.iter().map(|m| m.cut_edges().to_vec()).collect();
        assert_eq!(cuts, vec![vec![(0, 3), (1, 2)], vec![(0, 1), (2, 3)]]);
    }

    #[test]
    fn max_parts_examples() {
        assert_eq!(max_parts(&Graph::complete(4)).unwrap(), 1);
        assert_eq!(max_parts(&Graph::path(6)).unwrap(), 4);
        assert_eq!(max_parts(&Graph::cycle(6)).unwrap(), 3);
        assert_eq!(max_parts(&Graph::new(0)).unwrap(), 0);
    }

    #[test]
    fn mis_examples() {
        assert_eq!(max_independent_set(&Graph::complete(4)).unwrap(), 1);
        assert_eq!(max_independent_set(&Graph::cycle(5)).unwrap(), 2);
        assert_eq!(max_independent_set(&Graph::cube()).unwrap(), 4);
    }

    #[test]
    fn size_guard() {
        let o = Oracle { multicut_limit: 4, mis_limit: 4 };
        assert_eq!(o.max_parts(&Graph::path(5)), Err(TooLarge { n: 5, limit: 4 }));
        assert!(o.max_independent_set(&Graph::path(4)).is_ok());
    }

    #[test]
    fn set_packing_examples() {
        let inst = SetPackingInstance::new(2, vec![vec![0], vec![1], vec![0, 1]], 0);
        let all: Vec<_> = enumerate_set_packings(&inst, 0).collect();
        assert_eq!(all, vec![vec![], vec![0], vec![0, 1], vec![1], vec![2]]);
        let dup = SetPackingInstance::new(1, vec![vec![0], vec![0]], 2);
        assert_eq!(enumerate_set_packings(&dup, 2).count(), 0);
        let pair = SetPackingInstance::new(2, vec![vec![0], vec![1]], 2);
        assert_eq!(enumerate_set_packings(&pair, 2).collect::<Vec<_>>(), vec![vec![0, 1]]);
    }

    #[test]
    fn empty_sets_pack_with_everything() {
        let inst = SetPackingInstance::new(1, vec![vec![], vec![0], vec![]], 3);
        assert!(inst.is_yes());
        assert_eq!(inst.max_packing(), 3);
    }
}
