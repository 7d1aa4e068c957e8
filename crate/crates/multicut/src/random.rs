//! Seeded random graph families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// Deterministic generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// `G(n, p)` plus a random spanning tree, so the result is connected.
pub fn connected_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = gnp(n, p, rng);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        g.add_edge(order[i], order[j]);
    }
    g
}

/// Uniform-ish random cubic graph by pairing stubs; retries until simple and connected.
pub fn cubic<R: Rng>(n: usize, rng: &mut R) -> Graph {
    assert!(n >= 4 && n % 2 == 0, "cubic graphs need an even order of at least 4");
    loop {
        if let Some(g) = regular_attempt(n, 3, rng) {
            if g.is_connected() {
                return g;
            }
        }
    }
}

fn regular_attempt<R: Rng>(n: usize, d: usize, rng: &mut R) -> Option<Graph> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    stubs.shuffle(rng);
    let mut g = Graph::new(n);
    for pair in stubs.chunks(2) {
        let (u, v) = (pair[0], pair[1]);
        if u == v || !g.add_edge(u, v) {
            return None;
        }
    }
    Some(g)
}

/// Connected graph of maximum degree 3: a random spanning tree of degree at
/// most 3 plus random extra edges between vertices with spare degree.
pub fn subcubic<R: Rng>(n: usize, extra: usize, rng: &mut R) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| g.degree(u) < 3).collect();
        let u = open[rng.gen_range(0..open.len())];
        g.add_edge(u, v);
    }
    for _ in 0..extra * 4 {
        if g.m() >= n - 1 + extra {
            break;
        }
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && g.degree(u) < 3 && g.degree(v) < 3 {
            g.add_edge(u, v);
        }
    }
    g
}

/// Random `k`-tree on `n >= k + 1` vertices: a `(k+1)`-clique, then each new
/// vertex joins a random existing `k`-clique.
pub fn k_tree<R: Rng>(n: usize, k: usize, rng: &mut R) -> Graph {
    assert!(n > k, "a k-tree needs more than k vertices");
    let mut g = Graph::new(n);
    for u in 0..=k {
        for v in u + 1..=k {
            g.add_edge(u, v);
        }
    }
    let mut cliques: Vec<Vec<usize>> = (0..=k).map(|skip| (0..=k).filter(|&v| v != skip).collect()).collect();
    for v in k + 1..n {
        let base = cliques[rng.gen_range(0..cliques.len())].clone();
        for &u in &base {
            g.add_edge(u, v);
        }
        for skip in 0..k {
            let mut c: Vec<usize> = base.iter().copied().enumerate().filter(|&(i, _)| i != skip).map(|(_, u)| u).collect();
            c.push(v);
            cliques.push(c);
        }
    }
    g
}

/// Disjoint cliques with sizes in `sizes`, plus `modulator` extra vertices
/// joined to random vertices with probability `p`. The modulator is the tail
/// `n - modulator..n`.
pub fn cluster_with_modulator<R: Rng>(sizes: &[usize], modulator: usize, p: f64, rng: &mut R) -> Graph {
    let body: usize = sizes.iter().sum();
    let n = body + modulator;
    let mut g = Graph::new(n);
    let mut start = 0;
    for &s in sizes {
        for u in start..start + s {
            for v in u + 1..start + s {
                g.add_edge(u, v);
            }
        }
        start += s;
    }
    for x in body..n {
        for v in 0..x {
            if rng.gen_bool(p) {
                g.add_edge(x, v);
            }
        }
    }
    g
}

/// Complete multipartite graph with the given class sizes plus `modulator`
/// random extra vertices at the tail.
pub fn cocluster_with_modulator<R: Rng>(classes: &[usize], modulator: usize, p: f64, rng: &mut R) -> Graph {
    let body: usize = classes.iter().sum();
    let n = body + modulator;
    let mut class = Vec::with_capacity(body);
    for (i, &s) in classes.iter().enumerate() {
        class.extend(std::iter::repeat(i).take(s));
    }
    let mut g = Graph::new(n);
    for u in 0..body {
        for v in u + 1..body {
            if class[u] != class[v] {
                g.add_edge(u, v);
            }
        }
    }
    for x in body..n {
        for v in 0..x {
            if rng.gen_bool(p) {
                g.add_edge(x, v);
            }
        }
    }
    g
}

/// Independent set of `n - cover` vertices and a cover at the tail, with
/// cover-to-everything edges at probability `p`.
pub fn with_vertex_cover<R: Rng>(n: usize, cover: usize, p: f64, rng: &mut R) -> Graph {
    cluster_with_modulator(&vec![1; n - cover], cover, p, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulator::{is_cluster_graph, is_cocluster_graph};

    #[test]
    fn families_have_their_shape() {
        let mut r = rng(7);
        let g = cubic(10, &mut r);
        assert!((0..10).all(|v| g.degree(v) == 3));
        let s = subcubic(30, 5, &mut r);
        assert!(s.is_connected() && s.max_degree() <= 3);
        let t = k_tree(12, 3, &mut r);
        assert_eq!(t.m(), 6 + 3 * 8);
        assert!(connected_gnp(9, 0.1, &mut r).is_connected());
        let c = cluster_with_modulator(&[3, 2, 4], 2, 0.5, &mut r);
        assert!(is_cluster_graph(&c.induced(&(0..9).collect::<Vec<_>>()).0));
        let cc = cocluster_with_modulator(&[2, 3], 2, 0.5, &mut r);
        assert!(is_cocluster_graph(&cc.induced(&(0..5).collect::<Vec<_>>()).0));
    }

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(gnp(12, 0.3, &mut rng(1)), gnp(12, 0.3, &mut rng(1)));
    }
}
