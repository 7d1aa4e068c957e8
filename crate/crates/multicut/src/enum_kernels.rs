//! Enumeration kernels for the vertex cover and co-cluster parameters.
//!
//! A compressor shrinks the graph to a kernel whose size depends only on the
//! modulator; a lifter turns each kernel solution back into every solution of
//! the original graph it stands for. Lifted streams of distinct kernel
//! solutions are disjoint and together cover all multicuts of the input.

use thiserror::Error;

use crate::graph::Graph;
use crate::modulator::{Modulator, ModulatorKind};
use crate::multicut::{canonicalize, max_parts_of_cut, Multicut};
use crate::oracle::{Oracle, TooLarge};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("modulator is not a valid {0:?} modulator for the graph")]
    InvalidModulator(ModulatorKind),
    #[error("modulator of kind {0:?} has no enumeration kernel")]
    UnsupportedKind(ModulatorKind),
    #[error("kernel solution does not lift: {0}")]
    BadKernelSolution(String),
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
}

/// Pendant edges `x - leaf` at one cover vertex, leaves ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendantGroup {
    pub centre: usize,
    pub leaves: Vec<usize>,
}

impl PendantGroup {
    /// The leaf kept in the kernel.
    pub fn representative(&self) -> usize {
        self.leaves[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcKernel {
    pub graph: Graph,
    /// Kernel vertex to original vertex, ascending.
    pub map: Vec<usize>,
    /// Marked vertices outside the cover.
    pub marked: Vec<usize>,
    pub groups: Vec<PendantGroup>,
}

impl VcKernel {
    /// `2|X| + 3 * C(|X|, 2)`.
    pub fn size_bound(cover: usize) -> usize {
        2 * cover + 3 * cover * cover.saturating_sub(1) / 2
    }
}

/// Marks one pendant neighbour per cover vertex and up to three common
/// neighbours of degree at least two per cover pair, then keeps the cover and
/// the marked vertices. Isolated vertices outside the cover are left out.
pub fn compress_vc(g: &Graph, cover: &Modulator) -> Result<VcKernel, KernelError> {
    let n = g.n();
    let in_cover = cover.mask(n);
    if cover.vertices.iter().any(|&x| x >= n) || g.edges().any(|(u, v)| !in_cover[u] && !in_cover[v]) {
        return Err(KernelError::InvalidModulator(ModulatorKind::VertexCover));
    }
    let mut marked = vec![false; n];
    let mut groups = Vec::new();
    for &x in &cover.vertices {
        let leaves: Vec<usize> = g.neighbors(x).iter().copied().filter(|&w| !in_cover[w] && g.degree(w) == 1).collect();
        if let Some(&first) = leaves.iter().min() {
            marked[first] = true;
            let mut leaves = leaves;
            leaves.sort_unstable();
            groups.push(PendantGroup { centre: x, leaves });
        }
    }
    let xs = &cover.vertices;
    for (i, &x) in xs.iter().enumerate() {
        for &y in &xs[i + 1..] {
            let mut common: Vec<usize> =
                g.neighbors(x).iter().copied().filter(|&w| !in_cover[w] && g.degree(w) >= 2 && g.has_edge(w, y)).collect();
            common.sort_unstable();
            for &w in common.iter().take(3) {
                marked[w] = true;
            }
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| in_cover[v] || marked[v]).collect();
    let (graph, map) = g.induced(&keep);
    assert!(graph.n() <= VcKernel::size_bound(xs.len()), "vertex cover kernel exceeds its size bound");
    Ok(VcKernel { graph, map, marked: (0..n).filter(|&v| marked[v]).collect(), groups })
}

/// A cut up to swapping which pendant edge of a group is cut.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquivalenceClass {
    /// Cut edges that are not pendant edges at a cover vertex.
    pub base: Vec<(usize, usize)>,
    /// Centres whose pendant group has a cut edge, ascending.
    pub cut_groups: Vec<usize>,
}

/// Class of a cut of the original graph, given the kernel it was compressed to.
pub fn equivalence_class(kern: &VcKernel, cut: &[(usize, usize)]) -> EquivalenceClass {
    let mut base = Vec::new();
    let mut cut_groups = Vec::new();
    for &(u, v) in cut {
        let group = kern.groups.iter().find(|grp| {
            (grp.centre == u && grp.leaves.binary_search(&v).is_ok()) || (grp.centre == v && grp.leaves.binary_search(&u).is_ok())
        });
        match group {
            Some(grp) => cut_groups.push(grp.centre),
            None => base.push((u.min(v), u.max(v))),
        }
    }
    base.sort_unstable();
    cut_groups.sort_unstable();
    EquivalenceClass { base, cut_groups }
}

/// Streams every multicut of `g` equivalent to the kernel solution `sol`.
pub fn lift_vc<'a>(g: &'a Graph, kern: &'a VcKernel, sol: &Multicut) -> Result<VcLift<'a>, KernelError> {
    let mut fixed = Vec::new();
    let mut swaps = Vec::new();
    for &(a, b) in sol.cut_edges() {
        let (u, v) = (kern.map[a], kern.map[b]);
        let group = kern.groups.iter().find(|grp| {
            let r = grp.representative();
            (grp.centre == u && r == v) || (grp.centre == v && r == u)
        });
        match group {
            Some(grp) => swaps.push(grp),
            None => fixed.push((u.min(v), u.max(v))),
        }
    }
    let lift = VcLift { g, fixed, swaps, odometer: None, done: false };
    let first = lift.current_cut();
    match max_parts_of_cut(g, &first) {
        Ok(mc) if mc.cut_edges().len() == first.len() => Ok(lift),
        _ => Err(KernelError::BadKernelSolution(sol.to_text())),
    }
}

/// Odometer over the pendant groups with a cut edge, ascending leaf per group.
pub struct VcLift<'a> {
    g: &'a Graph,
    fixed: Vec<(usize, usize)>,
    swaps: Vec<&'a PendantGroup>,
    odometer: Option<Vec<usize>>,
    done: bool,
}

impl VcLift<'_> {
    fn current_cut(&self) -> Vec<(usize, usize)> {
        let mut cut = self.fixed.clone();
        for (i, grp) in self.swaps.iter().enumerate() {
            let leaf = grp.leaves[self.odometer.as_ref().map_or(0, |o| o[i])];
            cut.push((grp.centre.min(leaf), grp.centre.max(leaf)));
        }
        cut
    }

    /// Number of cuts the stream yields in total.
    pub fn class_size(&self) -> usize {
        self.swaps.iter().map(|grp| grp.leaves.len()).product()
    }
}

impl Iterator for VcLift<'_> {
    type Item = Multicut;

    fn next(&mut self) -> Option<Multicut> {
        if self.done {
            return None;
        }
        match &mut self.odometer {
            None => self.odometer = Some(vec![0; self.swaps.len()]),
            Some(o) => {
                let mut i = o.len();
                loop {
                    if i == 0 {
                        self.done = true;
                        return None;
                    }
                    i -= 1;
                    o[i] += 1;
                    if o[i] < self.swaps[i].leaves.len() {
                        break;
                    }
                    o[i] = 0;
                }
            }
        }
        let cut = self.current_cut();
        let mc = max_parts_of_cut(self.g, &cut).expect("pendant swap keeps a matching");
        debug_assert_eq!(mc.cut_edges().len(), cut.len());
        Some(mc)
    }
}

/// Result of compressing against a co-cluster modulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoclusterOutcome {
    /// Same multicut edge sets as the input, on the surviving vertices.
    Reduced(CoclusterKernel),
    /// Too few large classes; the modulator plus the small class covers every edge.
    DelegateToVc(Modulator),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoclusterKernel {
    pub graph: Graph,
    pub ell: usize,
    /// Kernel vertex to original vertex, ascending.
    pub map: Vec<usize>,
    /// Original vertices deleted by the reduction; all sit in the unsplittable block.
    pub removed: Vec<usize>,
    /// Modulator left after vertices moved into the block.
    pub modulator: Vec<usize>,
    pub three_or_more_classes: bool,
}

impl CoclusterKernel {
    /// Maps a kernel solution to the original graph: deleted vertices join the block.
    pub fn lift(&self, g: &Graph, sol: &Multicut) -> Result<Multicut, KernelError> {
        let mut part_of = vec![usize::MAX; g.n()];
        for (i, &v) in self.map.iter().enumerate() {
            part_of[v] = sol.part_of()[i];
        }
        if !self.removed.is_empty() {
            let anchor = self.map.iter().position(|v| !self.modulator.contains(v)).expect("block keeps at least one vertex");
            for &v in &self.removed {
                part_of[v] = sol.part_of()[anchor];
            }
        }
        canonicalize(g, &part_of).ok().filter(|mc| mc.parts() == sol.parts()).ok_or_else(|| KernelError::BadKernelSolution(sol.to_text()))
    }
}

/// Classes of the complete multipartite graph on `rest`, each ascending, by smallest vertex.
fn classes(g: &Graph, rest: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &v in rest {
        match out.iter_mut().find(|c| !g.has_edge(c[0], v)) {
            Some(c) => c.push(v),
            None => out.push(vec![v]),
        }
    }
    out
}

/// Reduces against a co-cluster modulator, or hands over a vertex cover when
/// the remainder has fewer than two large classes.
pub fn compress_cocluster(g: &Graph, modulator: &Modulator, ell: usize) -> Result<CoclusterOutcome, KernelError> {
    let n = g.n();
    let as_cocluster = Modulator::new(ModulatorKind::CoCluster, modulator.vertices.clone());
    if !as_cocluster.is_valid_for(g) {
        return Err(KernelError::InvalidModulator(ModulatorKind::CoCluster));
    }
    let k = modulator.len();
    let mut h = g.clone();
    let mut in_s = modulator.mask(n);
    let mut alive = vec![true; n];
    let rest = |in_s: &[bool], alive: &[bool]| -> Vec<usize> { (0..n).filter(|&v| alive[v] && !in_s[v]).collect() };

    let cls = classes(&h, &rest(&in_s, &alive));
    let sizes = |cls: &[Vec<usize>]| {
        let mut s: Vec<usize> = cls.iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    };
    let many = cls.len() >= 3;
    let two_large = cls.len() == 2 && {
        let s = sizes(&cls);
        s[0] >= 2 && s[1] >= 3
    };
    if !many && !two_large {
        let mut cover = modulator.vertices.clone();
        if cls.len() == 2 {
            cover.extend(cls.iter().min_by_key(|c| (c.len(), c[0])).unwrap());
        }
        return Ok(CoclusterOutcome::DelegateToVc(Modulator::new(ModulatorKind::VertexCover, cover)));
    }

    loop {
        let outside = rest(&in_s, &alive);
        let cls = classes(&h, &outside);
        let joiner = (0..n).find(|&u| alive[u] && in_s[u] && h.neighbors(u).iter().filter(|&&w| alive[w] && !in_s[w]).count() >= 2);
        if let Some(u) = joiner {
            if many {
                for &z in &outside {
                    h.add_edge(u, z);
                }
            } else {
                let small = cls.iter().min_by_key(|c| (c.len(), c[0])).unwrap().clone();
                for &z in &outside {
                    h.remove_edge(u, z);
                }
                for z in small {
                    h.add_edge(u, z);
                }
            }
            in_s[u] = false;
            continue;
        }
        let removable = outside.iter().copied().find(|&u| {
            if h.neighbors(u).iter().any(|&w| alive[w] && in_s[w]) {
                return false;
            }
            let mut s: Vec<usize> = cls.iter().map(|c| c.len() - usize::from(c.contains(&u))).filter(|&s| s > 0).collect();
            s.sort_unstable();
            if many {
                s.len() >= 3
            } else {
                s.len() == 2 && s[0] >= 2 && s[1] >= 3
            }
        });
        match removable {
            Some(u) => {
                alive[u] = false;
                h.isolate(u);
            }
            None => break,
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let (graph, map) = h.induced(&keep);
    let slack = if many { 3 } else { 5 };
    assert!(graph.n() <= 2 * k + slack, "co-cluster kernel exceeds its size bound");
    Ok(CoclusterOutcome::Reduced(CoclusterKernel {
        graph,
        ell,
        map,
        removed: (0..n).filter(|&v| !alive[v]).collect(),
        modulator: (0..n).filter(|&v| alive[v] && in_s[v]).collect(),
        three_or_more_classes: many,
    }))
}

/// Every multicut of `g` with at least `ell` parts, via a kernel for the modulator.
/// The kernel is solved with `oracle`; its size limit applies to the kernel only.
pub fn enumerate_via_kernel(g: &Graph, modulator: &Modulator, ell: usize, oracle: &Oracle) -> Result<Vec<Multicut>, KernelError> {
    match modulator.kind {
        ModulatorKind::VertexCover => enumerate_vc(g, modulator, ell, oracle),
        ModulatorKind::CoCluster => match compress_cocluster(g, modulator, ell)? {
            CoclusterOutcome::DelegateToVc(cover) => enumerate_vc(g, &cover, ell, oracle),
            CoclusterOutcome::Reduced(kern) => {
                let sols = oracle.enumerate_all_multicuts(&kern.graph, ell)?;
                sols.iter().map(|s| kern.lift(g, s)).collect()
            }
        },
        kind => Err(KernelError::UnsupportedKind(kind)),
    }
}

fn enumerate_vc(g: &Graph, cover: &Modulator, ell: usize, oracle: &Oracle) -> Result<Vec<Multicut>, KernelError> {
    let kern = compress_vc(g, cover)?;
    let mut out = Vec::new();
    if kern.graph.n() == 0 {
        out.extend(canonicalize(g, &(0..g.n()).collect::<Vec<_>>()).ok().filter(|m| m.parts() >= ell && g.n() > 0));
        return Ok(out);
    }
    for sol in oracle.enumerate_all_multicuts(&kern.graph, 1)? {
        out.extend(lift_vc(g, &kern, &sol)?.filter(|m| m.parts() >= ell));
    }
    Ok(out)
}
