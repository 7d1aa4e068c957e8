//! Constructive multicuts for graphs of maximum degree three.
//!
//! A connected subcubic graph with many degree-1 vertices, with mostly
//! degree-2 vertices, or with many vertex-disjoint cycles has a matching
//! multicut with many parts, and each case below builds one. Otherwise the
//! graph is small relative to `ell` and is returned unchanged as a kernel.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::Graph;
use crate::multicut::{max_parts_of_cut, Multicut};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubcubicError {
    #[error("vertex {0} has degree {1}, more than 3")]
    DegreeTooHigh(usize, usize),
    #[error("vertex {0} has degree {1}, less than 2")]
    DegreeTooLow(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("kernel on {n} vertices exceeds the size bound {bound}")]
    KernelTooLarge { n: usize, bound: f64 },
    #[error("cycle packing is not a family of disjoint cycles")]
    BadPacking,
}

fn check_subcubic(g: &Graph) -> Result<(), SubcubicError> {
    match (0..g.n()).find(|&v| g.degree(v) > 3) {
        Some(v) => Err(SubcubicError::DegreeTooHigh(v, g.degree(v))),
        None => Ok(()),
    }
}

fn check_connected_subcubic(g: &Graph) -> Result<(), SubcubicError> {
    check_subcubic(g)?;
    if g.is_connected() {
        Ok(())
    } else {
        Err(SubcubicError::Disconnected)
    }
}

/// Greedy matching on pendant edges, used when at least `3 * ell` vertices have degree 1.
pub fn multicut_from_degree_one(g: &Graph, ell: usize) -> Result<Option<Multicut>, SubcubicError> {
    check_connected_subcubic(g)?;
    let leaves: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) == 1).collect();
    if leaves.len() < 3 * ell {
        return Ok(None);
    }
    let mut taken = vec![false; g.n()];
    let mut cut = Vec::new();
    for &u in &leaves {
        let w = g.neighbors(u)[0];
        if !taken[u] && !taken[w] {
            taken[u] = true;
            taken[w] = true;
            cut.push((u.min(w), u.max(w)));
        }
    }
    Ok(Some(max_parts_of_cut(g, &cut).expect("greedy pendant edges form a matching")))
}

/// Middle edges `uv` of induced paths `u'-u-v-v'` with `deg(u) = deg(v) = 2`.
pub fn subdivided_edges(g: &Graph) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for (u, v) in g.edges() {
        if g.degree(u) != 2 || g.degree(v) != 2 {
            continue;
        }
        let other = |a: usize, b: usize| g.neighbors(a).iter().copied().find(|&x| x != b).unwrap();
        let (up, vp) = (other(u, v), other(v, u));
        if up != vp {
            out.push([up, u, v, vp]);
        }
    }
    out
}

/// Greedy disjoint subdivided edges, used when `n >= 21 ell` and at least 90% of
/// the vertices have degree 2.
pub fn multicut_from_subdivided_edges(g: &Graph, ell: usize) -> Result<Option<Multicut>, SubcubicError> {
    check_connected_subcubic(g)?;
    let n = g.n();
    let deg2 = (0..n).filter(|&v| g.degree(v) == 2).count();
    if n < 21 * ell || 10 * deg2 < 9 * n {
        return Ok(None);
    }
    let mut marked = vec![false; n];
    let mut cut = Vec::new();
    for [up, u, v, vp] in subdivided_edges(g) {
        if [up, u, v, vp].iter().all(|&x| !marked[x]) {
            for x in [up, u, v, vp] {
                marked[x] = true;
            }
            cut.push((up.min(u), up.max(u)));
            cut.push((v.min(vp), v.max(vp)));
        }
    }
    let mc = max_parts_of_cut(g, &cut).expect("disjoint subdivided edges give a matching");
    Ok(Some(mc))
}

/// Vertex-disjoint vertex sets, each inducing a cycle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CyclePacking {
    /// Each cycle in traversal order.
    pub cycles: Vec<Vec<usize>>,
}

impl CyclePacking {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Disjointness and that each set induces a cycle in `g`.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        let mut seen = vec![false; g.n()];
        self.cycles.iter().all(|c| {
            c.len() >= 3 && c.iter().all(|&v| v < g.n() && !std::mem::replace(&mut seen[v], true)) && {
                let (h, _) = g.induced(c);
                h.is_connected() && (0..h.n()).all(|v| h.degree(v) == 2)
            }
        })
    }
}

/// Vertices left after repeatedly deleting vertices of degree at most one.
pub fn strip_low_degree(g: &Graph) -> Vec<usize> {
    let mut alive = vec![true; g.n()];
    let mut degree: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut queue: VecDeque<usize> = (0..g.n()).filter(|&v| degree[v] <= 1).collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in g.neighbors(v) {
            if alive[w] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    queue.push_back(w);
                }
            }
        }
    }
    (0..g.n()).filter(|&v| alive[v]).collect()
}

/// Working graph for cycle extraction: vertices die, edges never appear.
struct Shrinking<'a> {
    g: &'a Graph,
    alive: Vec<bool>,
    degree: Vec<usize>,
    stamp: Vec<u32>,
    depth: Vec<usize>,
    parent: Vec<usize>,
    round: u32,
}

impl<'a> Shrinking<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.n();
        Shrinking {
            g,
            alive: vec![true; n],
            degree: (0..n).map(|v| g.degree(v)).collect(),
            stamp: vec![0; n],
            depth: vec![0; n],
            parent: vec![usize::MAX; n],
            round: 0,
        }
    }

    fn kill(&mut self, v: usize) {
        if !self.alive[v] {
            return;
        }
        self.alive[v] = false;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &w in self.g.neighbors(x) {
                if self.alive[w] {
                    self.degree[w] -= 1;
                    if self.degree[w] <= 1 {
                        self.alive[w] = false;
                        stack.push(w);
                    }
                }
            }
        }
    }

    /// A cycle of length at most `limit` reachable within `limit / 2` steps of `v`.
    fn short_cycle(&mut self, v: usize, limit: usize) -> Option<Vec<usize>> {
        self.round += 1;
        let round = self.round;
        let reach = limit / 2;
        self.stamp[v] = round;
        self.depth[v] = 0;
        self.parent[v] = usize::MAX;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for &y in self.g.neighbors(x) {
                if !self.alive[y] || y == self.parent[x] {
                    continue;
                }
                if self.stamp[y] == round {
                    if self.depth[x] + self.depth[y] < limit {
                        return Some(self.close(x, y));
                    }
                } else if self.depth[x] < reach {
                    self.stamp[y] = round;
                    self.depth[y] = self.depth[x] + 1;
                    self.parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        None
    }

    fn close(&self, x: usize, y: usize) -> Vec<usize> {
        let (mut a, mut b) = (x, y);
        let mut left = vec![a];
        let mut right = vec![b];
        while a != b {
            if self.depth[a] >= self.depth[b] {
                a = self.parent[a];
                left.push(a);
            } else {
                b = self.parent[b];
                right.push(b);
            }
        }
        right.pop();
        left.extend(right.into_iter().rev());
        left
    }
}

/// Greedy packing by repeatedly removing a shortest remaining cycle and then
/// every vertex whose degree drops below two.
pub fn find_disjoint_cycles(g: &Graph) -> Result<CyclePacking, SubcubicError> {
    check_subcubic(g)?;
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) < 2) {
        return Err(SubcubicError::DegreeTooLow(v, g.degree(v)));
    }
    let mut h = Shrinking::new(g);
    let mut cycles = Vec::new();
    let mut remaining = g.n();
    let mut limit = 3;
    while remaining > 0 && limit <= g.n() {
        for v in 0..g.n() {
            while h.alive[v] {
                let Some(c) = h.short_cycle(v, limit) else { break };
                for &x in &c {
                    h.kill(x);
                }
                cycles.push(c);
            }
        }
        remaining = h.alive.iter().filter(|&&a| a).count();
        limit += 1;
    }
    Ok(CyclePacking { cycles })
}

/// Closed second neighbourhood `N[N[S]]`.
pub fn second_neighbourhood(g: &Graph, set: &[usize]) -> Vec<usize> {
    let mut dist = vec![u8::MAX; g.n()];
    let mut queue = VecDeque::new();
    for &v in set {
        dist[v] = 0;
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        if dist[v] == 2 {
            continue;
        }
        for &w in g.neighbors(v) {
            if dist[w] == u8::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    (0..g.n()).filter(|&v| dist[v] != u8::MAX).collect()
}

/// Grows each cycle by outside vertices with two neighbours in it, until stable.
/// Vertices already in another set are left alone so the sets stay disjoint.
pub fn absorb(g: &Graph, packing: &CyclePacking) -> Vec<Vec<usize>> {
    let mut owner = vec![usize::MAX; g.n()];
    for (i, c) in packing.cycles.iter().enumerate() {
        for &v in c {
            owner[v] = i;
        }
    }
    let mut sets: Vec<Vec<usize>> = packing.cycles.clone();
    for (i, set) in sets.iter_mut().enumerate() {
        let mut changed = true;
        while changed {
            changed = false;
            let mut frontier: Vec<usize> = set.iter().flat_map(|&v| g.neighbors(v).iter().copied()).collect();
            frontier.sort_unstable();
            frontier.dedup();
            for w in frontier {
                if owner[w] == usize::MAX && g.neighbors(w).iter().filter(|&&x| owner[x] == i).count() >= 2 {
                    owner[w] = i;
                    set.push(w);
                    changed = true;
                }
            }
        }
        set.sort_unstable();
    }
    sets
}

/// Cuts the boundary of well-separated small cycles. `g` must have minimum
/// degree two; the result may have fewer than `ell` parts, in which case `None`.
pub fn multicut_from_cycles(g: &Graph, packing: &CyclePacking, ell: usize) -> Result<Option<Multicut>, SubcubicError> {
    check_subcubic(g)?;
    if !packing.is_valid_for(g) {
        return Err(SubcubicError::BadPacking);
    }
    let mut sets = absorb(g, packing);
    sets.sort_by_key(|s| (s.len(), s[0]));
    let half = sets.len().div_ceil(2);
    let mut marked = vec![false; g.n()];
    let mut member = vec![false; g.n()];
    let mut cut = Vec::new();
    for set in &sets[..half] {
        if set.iter().any(|&v| marked[v]) {
            continue;
        }
        for &v in set {
            member[v] = true;
        }
        for &v in set {
            for &w in g.neighbors(v) {
                if !member[w] {
                    cut.push((v.min(w), v.max(w)));
                }
            }
        }
        let ball = second_neighbourhood(g, set);
        assert!(ball.len() <= 10 * set.len(), "second neighbourhood exceeds ten times the set");
        for v in ball {
            marked[v] = true;
        }
    }
    match max_parts_of_cut(g, &cut) {
        Ok(mc) if mc.parts() >= ell => Ok(Some(mc)),
        Ok(_) => Ok(None),
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelOutcome {
    Solved(Multicut),
    /// No construction applied; the instance is returned as it was.
    Kernel {
        graph: Graph,
        ell: usize,
        bound: f64,
    },
}

/// Size below which an unsolved instance must fall: `1e6 * ell * log2(ell)^2`.
pub fn kernel_bound(ell: usize) -> f64 {
    let l = ell as f64;
    1e6 * l * l.log2().powi(2)
}

/// Tries the constructions in turn on a connected subcubic graph.
pub fn construct_connected(g: &Graph, ell: usize) -> Result<Option<Multicut>, SubcubicError> {
    check_connected_subcubic(g)?;
    if ell <= 1 {
        return Ok(Multicut::whole(g));
    }
    let enough = |m: Option<Multicut>| m.filter(|m| m.parts() >= ell);
    if let Some(m) = enough(multicut_from_degree_one(g, ell)?) {
        return Ok(Some(m));
    }
    if let Some(m) = enough(multicut_from_subdivided_edges(g, ell)?) {
        return Ok(Some(m));
    }
    let core = strip_low_degree(g);
    if core.is_empty() {
        return Ok(None);
    }
    let (h, map) = g.induced(&core);
    if h.is_connected() {
        if let Some(m) = enough(multicut_from_subdivided_edges(&h, ell)?) {
            return Ok(Some(lift_core_cut(g, &map, &m)));
        }
    }
    let packing = find_disjoint_cycles(&h)?;
    match multicut_from_cycles(&h, &packing, ell)? {
        Some(m) => Ok(enough(Some(lift_core_cut(g, &map, &m)))),
        None => Ok(None),
    }
}

/// Cuts the same edges in the full graph; stripped trees follow their attachment.
fn lift_core_cut(g: &Graph, map: &[usize], m: &Multicut) -> Multicut {
    let cut: Vec<(usize, usize)> = m.cut_edges().iter().map(|&(u, v)| (map[u].min(map[v]), map[u].max(map[v]))).collect();
    max_parts_of_cut(g, &cut).expect("core matching stays a matching")
}

/// Solves `(g, ell)` by construction or returns it unchanged as a kernel.
pub fn kernelize_subcubic(g: &Graph, ell: usize) -> Result<KernelOutcome, SubcubicError> {
    check_subcubic(g)?;
    let comps = g.components();
    if g.n() > 0 && ell <= comps.len() {
        return Ok(KernelOutcome::Solved(Multicut::whole(g).expect("non-empty graph")));
    }
    let extra = comps.len().saturating_sub(1);
    for comp in &comps {
        let (h, map) = g.induced(comp);
        if let Some(m) = construct_connected(&h, ell - extra)? {
            let mut part_of = vec![usize::MAX; g.n()];
            for (i, &v) in map.iter().enumerate() {
                part_of[v] = m.part_of()[i];
            }
            let mut next = m.parts();
            for other in comps.iter().filter(|c| *c != comp) {
                for &v in other {
                    part_of[v] = next;
                }
                next += 1;
            }
            let mc = crate::multicut::canonicalize(g, &part_of).expect("component witnesses combine");
            return Ok(KernelOutcome::Solved(mc));
        }
    }
    let bound = kernel_bound(ell);
    if (g.n() as f64) >= bound {
        return Err(SubcubicError::KernelTooLarge { n: g.n(), bound });
    }
    Ok(KernelOutcome::Kernel { graph: g.clone(), ell, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{cubic, rng};

    fn caterpillar(spine: usize) -> Graph {
        // spine 0..spine, one leaf per spine vertex
        let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
        edges.extend((0..spine).map(|i| (i, spine + i)));
        Graph::from_edges(2 * spine, edges).unwrap()
    }

    #[test]
    fn degree_one_examples() {
        let star = multicut_from_degree_one(&Graph::star(3), 1).unwrap().unwrap();
        assert_eq!(star.cut_edges().len(), 1);
        assert!(matches!(multicut_from_degree_one(&Graph::star(6), 1), Err(SubcubicError::DegreeTooHigh(0, 6))));
        let cat = caterpillar(9);
        assert!(cat.max_degree() <= 3);
        let m = multicut_from_degree_one(&cat, 3).unwrap().unwrap();
        assert!(m.parts() >= 3);
        crate::validate_multicut(&cat, m.part_of(), 3).unwrap();
    }

    #[test]
    fn subdivided_edge_examples() {
        let m = multicut_from_subdivided_edges(&Graph::path(84), 4).unwrap().unwrap();
        assert!(m.parts() >= 4);
        assert!(multicut_from_subdivided_edges(&Graph::cycle(21), 1).unwrap().is_some());
        assert!(multicut_from_subdivided_edges(&Graph::cube(), 1).unwrap().is_none());
    }

    #[test]
    fn cycle_examples() {
        assert_eq!(find_disjoint_cycles(&Graph::cycle(6)).unwrap().len(), 1);
        let mut g = Graph::complete(3).disjoint_union(&Graph::path(2)).disjoint_union(&Graph::complete(3));
        g.add_edge(2, 3);
        g.add_edge(4, 5);
        assert_eq!(find_disjoint_cycles(&g).unwrap().len(), 2);
        let q = cubic(64, &mut rng(3));
        let p = find_disjoint_cycles(&q).unwrap();
        assert!(p.is_valid_for(&q));
        assert!(p.len() >= 2);
    }

    #[test]
    fn triangles_in_a_row_collide() {
        // three triangles, consecutive ones joined by an edge
        let mut g = Graph::complete(3).disjoint_union(&Graph::complete(3)).disjoint_union(&Graph::complete(3));
        g.add_edge(2, 3);
        g.add_edge(5, 6);
        g.add_edge(0, 8);
        let p = find_disjoint_cycles(&g).unwrap();
        assert_eq!(p.len(), 3);
        assert!(multicut_from_cycles(&g, &p, 3).unwrap().is_none());
        assert!(multicut_from_cycles(&g, &p, 1).unwrap().is_some());
    }

    #[test]
    fn kernelize_examples() {
        assert!(matches!(kernelize_subcubic(&Graph::cube(), 1).unwrap(), KernelOutcome::Solved(_)));
        assert!(matches!(kernelize_subcubic(&Graph::complete(4), 2).unwrap(), KernelOutcome::Kernel { .. }));
        let KernelOutcome::Solved(m) = kernelize_subcubic(&Graph::path(100), 4).unwrap() else { panic!() };
        crate::validate_multicut(&Graph::path(100), m.part_of(), 4).unwrap();
    }

    #[test]
    fn second_neighbourhood_bound() {
        let q = cubic(40, &mut rng(9));
        for v in 0..40 {
            assert!(second_neighbourhood(&q, &[v]).len() <= 10);
        }
    }
}
