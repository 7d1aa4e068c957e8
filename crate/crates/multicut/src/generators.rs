//! Instance compilers for the hardness constructions, each carrying the maps
//! that translate solutions between source and target.
//!
//! * [`reduce_is_to_mmc`]: independent set on cubic graphs to matching multicut
//!   on subcubic (or cubic) graphs.
//! * [`cross_compose_set_packing`]: many set-packing instances into one whose
//!   ground set is logarithmic in the number of inputs.
//! * [`reduce_set_packing_to_mmc`]: set packing to matching multicut with a
//!   small cluster-deletion modulator.

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::multicut::{canonicalize, Multicut, Violation};
use crate::oracle::{enumerate_set_packings, Oracle, SetPackingInstance, TooLarge};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("vertex {0} has degree {1}; the source graph must be cubic")]
    NotCubic(usize, usize),
    #[error("target {k} exceeds the {n} source vertices")]
    TargetTooLarge { k: usize, n: usize },
    #[error("vertices {0} and {1} are adjacent")]
    NotIndependent(usize, usize),
    #[error("no instances to compose")]
    NoInstances,
    #[error("instance {index} has ground set {ground} and target {k}, expected {expected_ground} and {expected_k}")]
    Heterogeneous { index: usize, ground: usize, k: usize, expected_ground: usize, expected_k: usize },
    #[error("the sets at {0:?} are not a packing")]
    NotAPacking(Vec<usize>),
    #[error("packing has {0} sets, fewer than the target {1}")]
    PackingTooSmall(usize, usize),
    #[error("composed packing picks {0} selector sets")]
    SelectorCount(usize),
    #[error("ground set has {0} elements; at least 3 are needed")]
    GroundTooSmall(usize),
    #[error(transparent)]
    Invalid(#[from] Violation),
}

/// Whether the target graph keeps the degree-1 pendant vertices or replaces
/// each with a cubic five-vertex unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Subcubic,
    Cubic,
}

/// Five-vertex graph without a matching cut. Local vertex 1 is the only one of
/// degree 2 and is where the unit attaches.
pub const PENDANT_UNIT_EDGES: [(usize, usize); 7] = [(0, 1), (0, 3), (2, 3), (1, 2), (4, 2), (4, 3), (4, 0)];
const PENDANT_UNIT_ATTACH: usize = 1;
const PENDANT_UNIT_SIZE: usize = 5;

pub fn pendant_unit() -> Graph {
    Graph::from_edges(PENDANT_UNIT_SIZE, PENDANT_UNIT_EDGES).expect("fixed edge list")
}

/// Vertices built for one source edge `(u, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeGadget {
    pub edge: (usize, usize),
    /// Triangle vertices of `u` and `v` wired to `middle`.
    pub attach: (usize, usize),
    /// Adjacent to both attachment points and to `hub`.
    pub middle: usize,
    /// Adjacent to `middle`, `ring_low` and the hub pendant.
    pub hub: usize,
    /// Ring vertex next to `hub`; linked to the next gadget's `ring_high`.
    pub ring_low: usize,
    /// Ring vertex carrying the ring pendant; linked to the previous gadget's `ring_low`.
    pub ring_high: usize,
    pub ring_pendant: Vec<usize>,
    pub hub_pendant: Vec<usize>,
}

/// Target of the independent-set reduction together with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsReduction {
    #[serde(skip)]
    pub source: Graph,
    pub k: usize,
    #[serde(skip)]
    pub graph: Graph,
    pub ell: usize,
    pub variant: Variant,
    /// Triangle of each source vertex.
    pub triangles: Vec<[usize; 3]>,
    /// One gadget per source edge, in lexicographic edge order.
    pub gadgets: Vec<EdgeGadget>,
}

/// Builds `(H, 2m + k + 1)` from a cubic graph: a triangle per vertex, an edge
/// gadget per edge, and the gadgets' ring vertices closed into one cycle.
pub fn reduce_is_to_mmc(g: &Graph, k: usize, variant: Variant) -> Result<IsReduction, ReductionError> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) != 3) {
        return Err(ReductionError::NotCubic(v, g.degree(v)));
    }
    if k > g.n() {
        return Err(ReductionError::TargetTooLarge { k, n: g.n() });
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let m = edges.len();
    let unit = match variant {
        Variant::Subcubic => 1,
        Variant::Cubic => PENDANT_UNIT_SIZE,
    };
    let total = 3 * g.n() + m * (4 + 2 * unit);
    let mut h = Graph::new(total);
    let triangles: Vec<[usize; 3]> = (0..g.n()).map(|u| [3 * u, 3 * u + 1, 3 * u + 2]).collect();
    for t in &triangles {
        h.add_edge(t[0], t[1]);
        h.add_edge(t[1], t[2]);
        h.add_edge(t[0], t[2]);
    }
    // Each triangle vertex serves one incident edge, in edge order.
    let mut used = vec![0usize; g.n()];
    let mut next = 3 * g.n();
    let mut take = |count: usize| {
        let start = next;
        next += count;
        (start..start + count).collect::<Vec<usize>>()
    };
    let mut gadgets = Vec::with_capacity(m);
    for &(u, v) in &edges {
        let attach = (triangles[u][used[u]], triangles[v][used[v]]);
        used[u] += 1;
        used[v] += 1;
        let core = take(4);
        let (middle, hub, ring_low, ring_high) = (core[0], core[1], core[2], core[3]);
        let ring_pendant = take(unit);
        let hub_pendant = take(unit);
        h.add_edge(attach.0, middle);
        h.add_edge(attach.1, middle);
        h.add_edge(middle, hub);
        h.add_edge(hub, ring_low);
        h.add_edge(ring_low, ring_high);
        attach_unit(&mut h, &ring_pendant, ring_high);
        attach_unit(&mut h, &hub_pendant, hub);
        gadgets.push(EdgeGadget { edge: (u, v), attach, middle, hub, ring_low, ring_high, ring_pendant, hub_pendant });
    }
    for i in 0..m {
        h.add_edge(gadgets[i].ring_low, gadgets[(i + 1) % m].ring_high);
    }
    assert_eq!(next, total);
    match variant {
        Variant::Subcubic => assert!(h.max_degree() <= 3, "target graph is not subcubic"),
        Variant::Cubic => assert!((0..h.n()).all(|v| h.degree(v) == 3), "target graph is not cubic"),
    }
    Ok(IsReduction { source: g.clone(), k, graph: h, ell: 2 * m + k + 1, variant, triangles, gadgets })
}

fn attach_unit(h: &mut Graph, unit: &[usize], to: usize) {
    if unit.len() == 1 {
        h.add_edge(unit[0], to);
        return;
    }
    for &(a, b) in &PENDANT_UNIT_EDGES {
        h.add_edge(unit[a], unit[b]);
    }
    h.add_edge(unit[PENDANT_UNIT_ATTACH], to);
}

impl IsReduction {
    /// Multicut isolating every pendant unit and the triangles of `set`, with
    /// everything else in one part.
    pub fn forward(&self, set: &[usize]) -> Result<Multicut, ReductionError> {
        for (i, &a) in set.iter().enumerate() {
            if a >= self.source.n() {
                return Err(ReductionError::TargetTooLarge { k: a, n: self.source.n() });
            }
            if let Some(&b) = set[i + 1..].iter().find(|&&b| b == a || self.source.has_edge(a, b)) {
                return Err(ReductionError::NotIndependent(a, b));
            }
        }
        let mut part_of = vec![0; self.graph.n()];
        let mut label = 1;
        for gadget in &self.gadgets {
            for unit in [&gadget.ring_pendant, &gadget.hub_pendant] {
                for &x in unit {
                    part_of[x] = label;
                }
                label += 1;
            }
        }
        for &u in set {
            for &x in &self.triangles[u] {
                part_of[x] = label;
            }
            label += 1;
        }
        Ok(canonicalize(&self.graph, &part_of)?)
    }

    /// Source vertices whose triangle is a part on its own. Always independent.
    pub fn backward(&self, mc: &Multicut) -> Vec<usize> {
        let part_of = mc.part_of();
        let mut size = vec![0usize; mc.parts()];
        for &p in part_of {
            size[p] += 1;
        }
        (0..self.source.n())
            .filter(|&u| {
                let t = self.triangles[u];
                let p = part_of[t[0]];
                size[p] == 3 && t.iter().all(|&x| part_of[x] == p)
            })
            .collect()
    }
}

/// Where a set of the composed family came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOrigin {
    /// Selector of the (padded) instance index.
    Selector(usize),
    /// Copy of `set` from `instance` placed in `slot` (1-based).
    Packing { instance: usize, set: usize, slot: usize },
}

/// Composed set-packing instance with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Composition {
    #[serde(skip)]
    pub instance: SetPackingInstance,
    /// Number of inputs before padding.
    pub inputs: usize,
    /// Bits per index, so the padded count is `2^bits`.
    pub bits: usize,
    pub source_ground: usize,
    pub source_k: usize,
    pub origin: Vec<SetOrigin>,
}

impl Composition {
    pub fn padded(&self) -> usize {
        1 << self.bits
    }

    /// Slot element `j` in `0..=r`; slot 0 is shared by all selectors.
    pub fn slot_element(&self, j: usize) -> usize {
        self.source_ground + j
    }

    /// Element recording that bit `i` (0 = least significant) of the index in
    /// slot `j` (1-based) equals `value`.
    pub fn bit_element(&self, i: usize, j: usize, value: bool) -> usize {
        self.source_ground + self.source_k + 1 + 2 * (self.bits * (j - 1) + i) + usize::from(!value)
    }

    fn index_bits(&self, a: usize, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.bits).map(move |i| self.bit_element(i, j, a >> i & 1 == 1))
    }

    fn original(&self, a: usize) -> usize {
        if a < self.inputs {
            a
        } else {
            0
        }
    }

    fn family_index(&self, origin: SetOrigin) -> usize {
        self.origin.iter().position(|&o| o == origin).expect("origin is in the family")
    }

    /// Composed packing for a packing of input `a`: the selector of `a` plus one
    /// slotted copy per source set. Surplus source sets beyond the target are dropped.
    pub fn forward(&self, a: usize, packing: &[usize]) -> Result<Vec<usize>, ReductionError> {
        if packing.len() < self.source_k {
            return Err(ReductionError::PackingTooSmall(packing.len(), self.source_k));
        }
        let mut out = vec![self.family_index(SetOrigin::Selector(a))];
        for (slot, &set) in packing.iter().take(self.source_k).enumerate() {
            out.push(self.family_index(SetOrigin::Packing { instance: a, set, slot: slot + 1 }));
        }
        out.sort_unstable();
        if !self.instance.is_packing(&out) {
            return Err(ReductionError::NotAPacking(packing.to_vec()));
        }
        Ok(out)
    }

    /// Input index (before padding) and its packing read off a composed packing.
    pub fn backward(&self, packing: &[usize]) -> Result<(usize, Vec<usize>), ReductionError> {
        if !self.instance.is_packing(packing) {
            return Err(ReductionError::NotAPacking(packing.to_vec()));
        }
        let selectors: Vec<usize> = packing
            .iter()
            .filter_map(|&f| match self.origin[f] {
                SetOrigin::Selector(a) => Some(a),
                SetOrigin::Packing { .. } => None,
            })
            .collect();
        let [a] = selectors[..] else {
            return Err(ReductionError::SelectorCount(selectors.len()));
        };
        let mut sets: Vec<usize> = packing
            .iter()
            .filter_map(|&f| match self.origin[f] {
                SetOrigin::Packing { instance, set, .. } => {
                    assert_eq!(instance, a, "a packing set disjoint from the selector belongs to its instance");
                    Some(set)
                }
                SetOrigin::Selector(_) => None,
            })
            .collect();
        sets.sort_unstable();
        Ok((self.original(a), sets))
    }
}

/// Composes instances sharing ground set and target into one whose target is
/// met exactly when some input's is.
pub fn cross_compose_set_packing(instances: &[SetPackingInstance]) -> Result<Composition, ReductionError> {
    let first = instances.first().ok_or(ReductionError::NoInstances)?;
    let (n, r) = (first.ground, first.k);
    for (index, inst) in instances.iter().enumerate() {
        if inst.ground != n || inst.k != r {
            return Err(ReductionError::Heterogeneous { index, ground: inst.ground, k: inst.k, expected_ground: n, expected_k: r });
        }
    }
    let t = instances.len();
    let bits = (t.next_power_of_two().trailing_zeros() as usize).max(1);
    let ground = n + (r + 1) + 2 * r * bits;
    let mut comp = Composition {
        instance: SetPackingInstance::new(ground, Vec::new(), r + 1),
        inputs: t,
        bits,
        source_ground: n,
        source_k: r,
        origin: Vec::new(),
    };
    let padded = comp.padded();
    let mask = padded - 1;
    let mut family = Vec::new();
    for a in 0..padded {
        let mut set = vec![comp.slot_element(0)];
        for j in 1..=r {
            set.extend(comp.index_bits(mask ^ a, j));
        }
        family.push(set);
        comp.origin.push(SetOrigin::Selector(a));
    }
    for a in 0..padded {
        for (i, c) in instances[comp.original(a)].family.iter().enumerate() {
            for j in 1..=r {
                let mut set = c.clone();
                set.extend(comp.index_bits(a, j));
                set.push(comp.slot_element(j));
                family.push(set);
                comp.origin.push(SetOrigin::Packing { instance: a, set: i, slot: j });
            }
        }
    }
    comp.instance = SetPackingInstance::new(ground, family, r + 1);
    for (set, origin) in comp.instance.family.iter().zip(&comp.origin) {
        match *origin {
            SetOrigin::Selector(_) => assert_eq!(set.len(), 1 + r * bits),
            SetOrigin::Packing { instance, set: i, .. } => {
                assert_eq!(set.len(), instances[comp.original(instance)].family[i].len() + bits + 1)
            }
        }
    }
    Ok(comp)
}

/// Target of the set-packing reduction with the vertex ranges of each gadget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpReduction {
    #[serde(skip)]
    pub source: SetPackingInstance,
    #[serde(skip)]
    pub graph: Graph,
    pub ell: usize,
    /// Clique vertex of each ground element.
    pub elements: Vec<usize>,
    /// Clique of each family set; its first `|C|` vertices are matched to `C`.
    pub cliques: Vec<Vec<usize>>,
}

/// Clique on the ground set, a clique of `max(|C|, 3)` vertices per set matched
/// into its elements, and `ell = k + 1`. The ground clique is a modulator to a
/// cluster graph.
pub fn reduce_set_packing_to_mmc(inst: &SetPackingInstance) -> Result<SpReduction, ReductionError> {
    let x = inst.ground;
    if x < 3 {
        return Err(ReductionError::GroundTooSmall(x));
    }
    let total = x + inst.family.iter().map(|c| c.len().max(3)).sum::<usize>();
    let mut g = Graph::new(total);
    for a in 0..x {
        for b in a + 1..x {
            g.add_edge(a, b);
        }
    }
    let mut next = x;
    let mut cliques = Vec::with_capacity(inst.family.len());
    for c in &inst.family {
        let vs: Vec<usize> = (next..next + c.len().max(3)).collect();
        next += vs.len();
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                g.add_edge(a, b);
            }
        }
        for (&v, &e) in vs.iter().zip(c) {
            g.add_edge(v, e);
        }
        cliques.push(vs);
    }
    Ok(SpReduction { source: inst.clone(), graph: g, ell: inst.k + 1, elements: (0..x).collect(), cliques })
}

impl SpReduction {
    /// Multicut isolating the cliques of the packed sets.
    pub fn forward(&self, packing: &[usize]) -> Result<Multicut, ReductionError> {
        if !self.source.is_packing(packing) {
            return Err(ReductionError::NotAPacking(packing.to_vec()));
        }
        let mut part_of = vec![0; self.graph.n()];
        for (label, &i) in packing.iter().enumerate() {
            for &v in &self.cliques[i] {
                part_of[v] = label + 1;
            }
        }
        Ok(canonicalize(&self.graph, &part_of)?)
    }

    /// Sets whose clique is a part on its own. Always a packing.
    pub fn backward(&self, mc: &Multicut) -> Vec<usize> {
        let part_of = mc.part_of();
        let mut size = vec![0usize; mc.parts()];
        for &p in part_of {
            size[p] += 1;
        }
        (0..self.cliques.len())
            .filter(|&i| {
                let c = &self.cliques[i];
                let p = part_of[c[0]];
                size[p] == c.len() && c.iter().all(|&v| part_of[v] == p)
            })
            .collect()
    }
}

/// Outcome of checking one reduction instance.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct VerifyReport {
    pub source_yes: bool,
    pub target_yes: bool,
    /// Source solutions pushed through both maps.
    pub round_trips: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.source_yes == self.target_yes && self.failures.is_empty()
    }

    fn finish(mut self) -> Self {
        if self.source_yes != self.target_yes {
            self.failures.insert(0, format!("source says {} but target says {}", self.source_yes, self.target_yes));
        }
        self
    }
}

/// Independent sets of `g` with at least `k` vertices, each ascending.
pub fn independent_sets(g: &Graph, k: usize) -> Vec<Vec<usize>> {
    fn grow(g: &Graph, k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() >= k {
            out.push(cur.clone());
        }
        for v in from..g.n() {
            if cur.iter().all(|&u| !g.has_edge(u, v)) {
                cur.push(v);
                grow(g, k, v + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(g, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Checks the independent-set reduction. `decide` answers the target decision
/// problem; the source side uses the exhaustive independence number.
pub fn verify_is_reduction(
    red: &IsReduction,
    oracle: &Oracle,
    decide: impl Fn(&Graph, usize) -> Option<Multicut>,
) -> Result<VerifyReport, TooLarge> {
    let mut report = VerifyReport { source_yes: oracle.max_independent_set(&red.source)? >= red.k, ..VerifyReport::default() };
    let witness = decide(&red.graph, red.ell);
    report.target_yes = witness.is_some();
    if let Some(mc) = witness {
        let set = red.backward(&mc);
        if set.len() < red.k {
            report.failures.push(format!("target witness maps back to {set:?}, fewer than {}", red.k));
        }
    }
    for set in independent_sets(&red.source, red.k) {
        report.round_trips += 1;
        match red.forward(&set) {
            Ok(mc) if mc.parts() >= red.ell => {
                let back = red.backward(&mc);
                if back != set {
                    report.failures.push(format!("{set:?} maps back to {back:?}"));
                }
            }
            Ok(mc) => report.failures.push(format!("{set:?} maps to only {} parts", mc.parts())),
            Err(e) => report.failures.push(format!("{set:?}: {e}")),
        }
    }
    Ok(report.finish())
}

/// Checks OR-semantics and the certificate maps of a composition.
pub fn verify_composition(inputs: &[SetPackingInstance], comp: &Composition) -> VerifyReport {
    let mut report = VerifyReport {
        source_yes: inputs.iter().any(SetPackingInstance::is_yes),
        target_yes: comp.instance.is_yes(),
        ..VerifyReport::default()
    };
    if let Some(p) = enumerate_set_packings(&comp.instance, comp.instance.k).next() {
        match comp.backward(&p) {
            Ok((a, sets)) if inputs[a].is_packing(&sets) && sets.len() >= inputs[a].k => {}
            Ok((a, sets)) => report.failures.push(format!("composed witness maps to {sets:?} in input {a}")),
            Err(e) => report.failures.push(format!("composed witness {p:?}: {e}")),
        }
    }
    for a in 0..comp.padded() {
        for p in enumerate_set_packings(&inputs[comp.original(a)], comp.source_k) {
            report.round_trips += 1;
            let expected: Vec<usize> = {
                let mut head = p[..comp.source_k].to_vec();
                head.sort_unstable();
                head
            };
            match comp.forward(a, &p).and_then(|q| comp.backward(&q)) {
                Ok((b, sets)) if b == comp.original(a) && sets == expected => {}
                Ok(other) => report.failures.push(format!("input {a} packing {p:?} maps back to {other:?}")),
                Err(e) => report.failures.push(format!("input {a} packing {p:?}: {e}")),
            }
        }
    }
    report.finish()
}

/// Checks the set-packing reduction with the exhaustive oracles on both sides.
pub fn verify_sp_reduction(red: &SpReduction, oracle: &Oracle) -> Result<VerifyReport, TooLarge> {
    let mut report =
        VerifyReport { source_yes: red.source.is_yes(), target_yes: oracle.max_parts(&red.graph)? >= red.ell, ..VerifyReport::default() };
    for p in enumerate_set_packings(&red.source, red.source.k) {
        report.round_trips += 1;
        match red.forward(&p) {
            Ok(mc) if mc.parts() >= red.ell => {
                let back = red.backward(&mc);
                if back != p {
                    report.failures.push(format!("{p:?} maps back to {back:?}"));
                }
            }
            Ok(mc) => report.failures.push(format!("{p:?} maps to only {} parts", mc.parts())),
            Err(e) => report.failures.push(format!("{p:?}: {e}")),
        }
    }
    if report.target_yes {
        if let Some(mc) = oracle.enumerate_all_multicuts(&red.graph, red.ell)?.first() {
            let back = red.backward(mc);
            if back.len() < red.source.k || !red.source.is_packing(&back) {
                report.failures.push(format!("target witness maps back to {back:?}"));
            }
        }
    }
    Ok(report.finish())
}

/// Every cubic graph on `n` vertices up to isomorphism. Exhaustive over
/// labelled graphs, so only practical for `n <= 8`.
pub fn cubic_graphs(n: usize) -> Vec<Graph> {
    fn fill(g: &mut Graph, n: usize, out: &mut Vec<Graph>) {
        let Some(v) = (0..n).find(|&v| g.degree(v) < 3) else {
            if g.is_connected() && !out.iter().any(|h| isomorphic(g, h)) {
                out.push(g.clone());
            }
            return;
        };
        let from = g.neighbors(v).iter().copied().filter(|&w| w > v).max().unwrap_or(v);
        for w in from + 1..n {
            if g.degree(w) < 3 && !g.has_edge(v, w) {
                g.add_edge(v, w);
                fill(g, n, out);
                g.remove_edge(v, w);
            }
        }
    }
    let mut out = Vec::new();
    if n >= 4 && n % 2 == 0 {
        fill(&mut Graph::new(n), n, &mut out);
    }
    out
}

/// Backtracking isomorphism test for small graphs.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    fn extend(a: &Graph, b: &Graph, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let v = map.len();
        if v == a.n() {
            return true;
        }
        for w in 0..b.n() {
            if used[w] || a.degree(v) != b.degree(w) {
                continue;
            }
            if (0..v).all(|u| a.has_edge(u, v) == b.has_edge(map[u], w)) {
                map.push(w);
                used[w] = true;
                if extend(a, b, map, used) {
                    return true;
                }
                map.pop();
                used[w] = false;
            }
        }
        false
    }
    let degrees = |g: &Graph| {
        let mut d: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
        d.sort_unstable();
        d
    };
    a.n() == b.n() && a.m() == b.m() && degrees(a) == degrees(b) && extend(a, b, &mut Vec::new(), &mut vec![false; b.n()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multicut::validate_multicut;

    #[test]
    fn gadget_units_are_indivisible() {
        assert_eq!(Oracle::default().max_parts(&pendant_unit()).unwrap(), 1);
        assert_eq!(Oracle::default().max_parts(&Graph::complete(3)).unwrap(), 1);
    }

    #[test]
    fn k4_reduction_shape() {
        let red = reduce_is_to_mmc(&Graph::complete(4), 1, Variant::Subcubic).unwrap();
        assert_eq!(red.ell, 14);
        assert_eq!(red.graph.n(), 12 + 6 * 6);
        assert!(red.graph.max_degree() <= 3);
        let mc = red.forward(&[0]).unwrap();
        assert_eq!(mc.parts(), 14);
        validate_multicut(&red.graph, mc.part_of(), 14).unwrap();
        assert_eq!(red.backward(&mc), vec![0]);
        assert!(red.forward(&[0, 1]).is_err());
    }

    #[test]
    fn cube_reduction_and_cubic_variant() {
        let red = reduce_is_to_mmc(&Graph::cube(), 4, Variant::Subcubic).unwrap();
        assert_eq!(red.ell, 29);
        let best = independent_sets(&Graph::cube(), 4);
        assert_eq!(best.len(), 2);
        for set in &best {
            let mc = red.forward(set).unwrap();
            assert_eq!(mc.parts(), 29);
            assert_eq!(&red.backward(&mc), set);
        }
        let cubic = reduce_is_to_mmc(&Graph::cube(), 4, Variant::Cubic).unwrap();
        assert!((0..cubic.graph.n()).all(|v| cubic.graph.degree(v) == 3));
        let mc = cubic.forward(&best[0]).unwrap();
        assert_eq!(mc.parts(), 29);
    }

    #[test]
    fn rejects_non_cubic_sources() {
        assert_eq!(reduce_is_to_mmc(&Graph::cycle(5), 1, Variant::Subcubic), Err(ReductionError::NotCubic(0, 2)));
        assert!(reduce_is_to_mmc(&Graph::complete(4), 5, Variant::Subcubic).is_err());
    }

    #[test]
    fn composition_sizes_and_selectors() {
        let a = SetPackingInstance::new(3, vec![vec![0], vec![1, 2], vec![0, 2]], 2);
        let b = SetPackingInstance::new(3, vec![vec![0, 1], vec![1, 2]], 2);
        let c = SetPackingInstance::new(3, vec![vec![2]], 2);
        let comp = cross_compose_set_packing(&[a, b, c]).unwrap();
        assert_eq!(comp.bits, 2);
        assert_eq!(comp.instance.ground, 3 + 3 + 2 * 2 * 2);
        assert_eq!(comp.instance.k, 3);
        let s0 = comp.slot_element(0);
        for (f, set) in comp.instance.family.iter().enumerate() {
            if let SetOrigin::Selector(a) = comp.origin[f] {
                assert!(set.contains(&s0));
                for (g, other) in comp.instance.family.iter().enumerate() {
                    if let SetOrigin::Packing { instance, .. } = comp.origin[g] {
                        let disjoint = comp.instance.is_packing(&[f, g]);
                        assert_eq!(disjoint, instance == a, "selector {a} vs {other:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn composition_or_semantics() {
        let yes = SetPackingInstance::new(2, vec![vec![0]], 1);
        let no = SetPackingInstance::new(2, vec![], 1);
        let comp = cross_compose_set_packing(std::slice::from_ref(&yes)).unwrap();
        assert_eq!(comp.padded(), 2);
        assert!(comp.instance.is_yes());
        assert!(!cross_compose_set_packing(std::slice::from_ref(&no)).unwrap().instance.is_yes());
        let comp = cross_compose_set_packing(&[no.clone(), yes.clone()]).unwrap();
        let p = enumerate_set_packings(&comp.instance, 2).next().unwrap();
        assert_eq!(comp.backward(&p).unwrap(), (1, vec![0]));
        let report = verify_composition(&[no, yes], &comp);
        assert!(report.passed(), "{report:?}");
        assert!(cross_compose_set_packing(&[]).is_err());
        let other = SetPackingInstance::new(3, vec![], 1);
        assert!(matches!(
            cross_compose_set_packing(&[other, SetPackingInstance::new(2, vec![], 1)]),
            Err(ReductionError::Heterogeneous { index: 1, .. })
        ));
    }

    #[test]
    fn set_packing_reduction_examples() {
        let oracle = Oracle::default();
        let yes = SetPackingInstance::new(3, vec![vec![0], vec![1, 2]], 2);
        let red = reduce_set_packing_to_mmc(&yes).unwrap();
        assert_eq!((red.graph.n(), red.ell), (9, 3));
        assert!(oracle.max_parts(&red.graph).unwrap() >= 3);
        assert_eq!(red.backward(&red.forward(&[0, 1]).unwrap()), vec![0, 1]);
        assert!(verify_sp_reduction(&red, &oracle).unwrap().passed());

        let no = SetPackingInstance::new(3, vec![vec![0, 1], vec![1, 2]], 2);
        let red = reduce_set_packing_to_mmc(&no).unwrap();
        assert!(oracle.max_parts(&red.graph).unwrap() < 3);
        assert!(verify_sp_reduction(&red, &oracle).unwrap().passed());

        let trivial = SetPackingInstance::new(3, vec![vec![0]], 0);
        let red = reduce_set_packing_to_mmc(&trivial).unwrap();
        assert_eq!(red.ell, 1);
        assert!(verify_sp_reduction(&red, &oracle).unwrap().passed());
        assert!(reduce_set_packing_to_mmc(&SetPackingInstance::new(2, vec![], 1)).is_err());
    }

    #[test]
    fn small_cubic_graphs() {
        assert_eq!(cubic_graphs(4).len(), 1);
        assert_eq!(cubic_graphs(6).len(), 2);
        assert_eq!(cubic_graphs(8).len(), 5);
    }
}
