//! Maximum part count by dynamic programming over a nice tree decomposition.
//!
//! A table entry is keyed by the partition of the bag (each bag vertex mapped
//! to the smallest bag vertex of its part) and by the number of crossing
//! neighbours each bag vertex already has inside the processed subgraph (0 or
//! 1). Its value is the largest number of parts of a valid partition of the
//! processed subgraph with that trace on the bag. Missing keys are invalid.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::BuildHasherDefault;

use thiserror::Error;

use crate::graph::Graph;
use crate::multicut::{canonicalize, Multicut};

/// Value of an invalid state. Absorbing under `+` and `max` via [`Table::get`].
pub const NEG_INF: i64 = i64::MIN;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Bags as sorted vertex lists.
    pub bags: Vec<Vec<usize>>,
    /// Tree edges between bag indices.
    pub tree: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TdError {
    #[error("line {0}: {1}")]
    Format(usize, String),
    #[error("edge ({0}, {1}) lies in no bag")]
    UncoveredEdge(usize, usize),
    #[error("vertex {0} lies in no bag")]
    MissingVertex(usize),
    #[error("bags holding vertex {0} are not connected in the tree")]
    DisconnectedVertex(usize),
    #[error("bag graph is not a tree")]
    NotATree,
    #[error("vertex {0} out of range")]
    OutOfRange(usize),
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Checks the tree shape, vertex and edge coverage, and connectivity of each vertex's bags.
    pub fn validate(&self, g: &Graph) -> Result<(), TdError> {
        let k = self.bags.len();
        if k == 0 || self.tree.len() != k - 1 || self.tree.iter().any(|&(a, b)| a >= k || b >= k) {
            return Err(TdError::NotATree);
        }
        let adj = self.adjacency();
        let bag_graph = Graph::from_edges(k, self.tree.iter().copied()).map_err(|_| TdError::NotATree)?;
        if !bag_graph.is_connected() || bag_graph.m() != k - 1 {
            return Err(TdError::NotATree);
        }
        let mut holders = vec![Vec::new(); g.n()];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= g.n() {
                    return Err(TdError::OutOfRange(v));
                }
                holders[v].push(i);
            }
        }
        for (v, h) in holders.iter().enumerate() {
            if h.is_empty() {
                return Err(TdError::MissingVertex(v));
            }
            let mut seen = vec![false; k];
            let mut stack = vec![h[0]];
            seen[h[0]] = true;
            let mut reached = 1;
            while let Some(b) = stack.pop() {
                for &c in &adj[b] {
                    if !seen[c] && self.bags[c].binary_search(&v).is_ok() {
                        seen[c] = true;
                        reached += 1;
                        stack.push(c);
                    }
                }
            }
            if reached != h.len() {
                return Err(TdError::DisconnectedVertex(v));
            }
        }
        for (u, v) in g.edges() {
            if !holders[u].iter().any(|&b| self.bags[b].binary_search(&v).is_ok()) {
                return Err(TdError::UncoveredEdge(u, v));
            }
        }
        Ok(())
    }

    /// PACE `.td` text with 1-based bag and vertex ids.
    pub fn to_pace(&self, n: usize) -> String {
        let mut s = format!("s td {} {} {}\n", self.bags.len(), self.width() + 1, n);
        for (i, bag) in self.bags.iter().enumerate() {
            s.push_str(&format!("b {}", i + 1));
            for v in bag {
                s.push_str(&format!(" {}", v + 1));
            }
            s.push('\n');
        }
        for &(a, b) in &self.tree {
            s.push_str(&format!("{} {}\n", a + 1, b + 1));
        }
        s
    }
}

/// Reads a PACE `.td` file and validates it against `g`.
pub fn parse_td(text: &str, g: &Graph) -> Result<TreeDecomposition, TdError> {
    let mut bags: Option<Vec<Option<Vec<usize>>>> = None;
    let mut tree = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('c') || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| TdError::Format(lineno, msg.to_string());
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let nums = |from: usize| -> Result<Vec<usize>, TdError> {
            tokens[from..].iter().map(|t| t.parse::<usize>().map_err(|_| bad("expected a number"))).collect()
        };
        match tokens[0] {
            "s" => {
                if tokens.len() != 5 || tokens[1] != "td" || bags.is_some() {
                    return Err(bad("expected `s td bags width+1 n`"));
                }
                let h = nums(2)?;
                if h[2] != g.n() {
                    return Err(bad("vertex count differs from the graph"));
                }
                bags = Some(vec![None; h[0]]);
            }
            "b" => {
                let bags = bags.as_mut().ok_or_else(|| bad("bag before header"))?;
                let ids = nums(1)?;
                let idx = ids.first().copied().filter(|&b| b >= 1 && b <= bags.len()).ok_or_else(|| bad("bad bag id"))?;
                let mut bag = Vec::with_capacity(ids.len() - 1);
                for &v in &ids[1..] {
                    if v == 0 || v > g.n() {
                        return Err(TdError::OutOfRange(v));
                    }
                    bag.push(v - 1);
                }
                bag.sort_unstable();
                bag.dedup();
                if bags[idx - 1].replace(bag).is_some() {
                    return Err(bad("bag listed twice"));
                }
            }
            _ => {
                let count = bags.as_ref().ok_or_else(|| bad("edge before header"))?.len();
                let ids = nums(0)?;
                match ids[..] {
                    [a, b] if (1..=count).contains(&a) && (1..=count).contains(&b) => tree.push((a - 1, b - 1)),
                    _ => return Err(bad("expected a tree edge")),
                }
            }
        }
    }
    let bags = bags.ok_or_else(|| TdError::Format(0, "missing header".into()))?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| TdError::Format(0, format!("bag {} missing", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    let td = TreeDecomposition { bags, tree };
    td.validate(g)?;
    Ok(td)
}

/// Min-fill elimination ordering, ties broken by vertex id.
pub fn heuristic_decomposition(g: &Graph) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition { bags: vec![Vec::new()], tree: Vec::new() };
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let common = |adj: &[BTreeSet<usize>], a: usize, b: usize| -> Vec<usize> {
        let (small, large) = if adj[a].len() <= adj[b].len() { (a, b) } else { (b, a) };
        adj[small].iter().copied().filter(|x| adj[large].contains(x)).collect()
    };
    // Fill of x: non-adjacent pairs in N(x), i.e. C(deg, 2) minus triangles at x.
    let mut fill: Vec<usize> = (0..n).map(|v| adj[v].len() * adj[v].len().saturating_sub(1) / 2).collect();
    for (a, b) in g.edges() {
        for x in common(&adj, a, b) {
            fill[x] -= 1;
        }
    }
    let mut keys: Vec<(usize, usize, usize)> = (0..n).map(|v| (fill[v], adj[v].len(), v)).collect();
    let mut queue: BTreeSet<(usize, usize, usize)> = keys.iter().copied().collect();
    let mut dirty = BTreeSet::new();
    let mut position = vec![0; n];
    let mut later: Vec<Vec<usize>> = vec![Vec::new(); n];
    for step in 0..n {
        let (_, _, v) = queue.pop_first().expect("one vertex per step");
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if adj[a].contains(&b) {
                    continue;
                }
                let shared = common(&adj, a, b);
                for &x in &shared {
                    fill[x] -= 1;
                    dirty.insert(x);
                }
                fill[a] += adj[a].len() - shared.len();
                fill[b] += adj[b].len() - shared.len();
                adj[a].insert(b);
                adj[b].insert(a);
                dirty.extend([a, b]);
            }
        }
        // N(v) is now a clique, so a neighbour loses exactly its pairs (v, y) with y outside N[v].
        for &a in &nb {
            fill[a] -= adj[a].len() - nb.len();
            adj[a].remove(&v);
            dirty.insert(a);
        }
        for x in std::mem::take(&mut dirty) {
            if x != v && queue.remove(&keys[x]) {
                keys[x] = (fill[x], adj[x].len(), x);
                queue.insert(keys[x]);
            }
        }
        position[v] = step;
        later[v] = nb;
    }
    let mut bags = Vec::with_capacity(n);
    let mut tree = Vec::new();
    let mut roots = Vec::new();
    for v in 0..n {
        let mut bag = later[v].clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        match later[v].iter().copied().min_by_key(|&w| position[w]) {
            Some(parent) => tree.push((v, parent)),
            None => roots.push(v),
        }
    }
    for pair in roots.windows(2) {
        tree.push((pair[0], pair[1]));
    }
    TreeDecomposition { bags, tree }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted bag.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Nice tree decomposition. Children always have smaller ids than their parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
}

impl NiceTreeDecomposition {
    pub fn width(&self) -> usize {
        self.nodes.iter().map(|t| t.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Local shape conditions of every node.
    pub fn is_nice(&self) -> bool {
        self.nodes[self.root].bag.is_empty()
            && self.nodes.iter().enumerate().all(|(i, t)| {
                t.children.iter().all(|&c| c < i)
                    && match t.kind {
                        NodeKind::Leaf => t.children.is_empty() && t.bag.is_empty(),
                        NodeKind::Introduce(v) => {
                            t.children.len() == 1 && {
                                let mut b = self.nodes[t.children[0]].bag.clone();
                                b.push(v);
                                b.sort_unstable();
                                b == t.bag && self.nodes[t.children[0]].bag.binary_search(&v).is_err()
                            }
                        }
                        NodeKind::Forget(v) => {
                            t.children.len() == 1 && {
                                let child = &self.nodes[t.children[0]].bag;
                                child.len() == t.bag.len() + 1
                                    && child.binary_search(&v).is_ok()
                                    && child.iter().filter(|&&w| w != v).eq(t.bag.iter())
                            }
                        }
                        NodeKind::Join => t.children.len() == 2 && t.children.iter().all(|&c| self.nodes[c].bag == t.bag),
                    }
            })
    }

    /// Plain decomposition with the same bags and tree.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|t| t.bag.clone()).collect();
        let tree = self.nodes.iter().enumerate().flat_map(|(i, t)| t.children.iter().map(move |&c| (i, c))).collect();
        let td = TreeDecomposition { bags, tree };
        // Re-root at our root by moving it to index 0.
        reroot(td, self.root)
    }
}

fn reroot(mut td: TreeDecomposition, root: usize) -> TreeDecomposition {
    if root == 0 {
        return td;
    }
    td.bags.swap(0, root);
    let fix = |x: usize| {
        if x == 0 {
            root
        } else if x == root {
            0
        } else {
            x
        }
    };
    for e in &mut td.tree {
        *e = (fix(e.0), fix(e.1));
    }
    td
}

/// Expands a valid decomposition rooted at bag 0 into nice form: introduce and
/// forget chains between neighbouring bags, binary joins, empty leaves and root.
pub fn nicify(td: &TreeDecomposition) -> NiceTreeDecomposition {
    let k = td.bags.len();
    let adj = td.adjacency();
    let mut parent = vec![usize::MAX; k];
    let mut order = Vec::with_capacity(k);
    let mut stack = vec![0];
    let mut seen = vec![false; k];
    seen[0] = true;
    while let Some(t) = stack.pop() {
        order.push(t);
        for &c in adj[t].iter().rev() {
            if !seen[c] {
                seen[c] = true;
                parent[c] = t;
                stack.push(c);
            }
        }
    }
    let mut children = vec![Vec::new(); k];
    for &t in &order[1..] {
        children[parent[t]].push(t);
    }
    for c in &mut children {
        c.sort_unstable();
    }
    let mut nodes: Vec<NiceNode> = Vec::new();
    let mut top = vec![usize::MAX; k];
    for &t in order.iter().rev() {
        let bag = &td.bags[t];
        let mut heads = Vec::new();
        for &c in &children[t] {
            heads.push(transition(&mut nodes, top[c], bag));
        }
        top[t] = match heads.len() {
            0 => {
                let leaf = push(&mut nodes, NodeKind::Leaf, Vec::new(), Vec::new());
                transition(&mut nodes, leaf, bag)
            }
            _ => {
                let mut acc = heads[0];
                for &h in &heads[1..] {
                    acc = push(&mut nodes, NodeKind::Join, bag.clone(), vec![acc, h]);
                }
                acc
            }
        };
    }
    let root = transition(&mut nodes, top[0], &[]);
    NiceTreeDecomposition { nodes, root }
}

fn push(nodes: &mut Vec<NiceNode>, kind: NodeKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
    nodes.push(NiceNode { kind, bag, children });
    nodes.len() - 1
}

/// Forgets then introduces vertices on top of `from` until the bag equals `to`.
fn transition(nodes: &mut Vec<NiceNode>, from: usize, to: &[usize]) -> usize {
    let mut cur = from;
    let start = nodes[from].bag.clone();
    for &v in start.iter().filter(|v| to.binary_search(v).is_err()) {
        let bag: Vec<usize> = nodes[cur].bag.iter().copied().filter(|&w| w != v).collect();
        cur = push(nodes, NodeKind::Forget(v), bag, vec![cur]);
    }
    for &v in to.iter().filter(|v| start.binary_search(v).is_err()) {
        let mut bag = nodes[cur].bag.clone();
        let pos = bag.binary_search(&v).unwrap_err();
        bag.insert(pos, v);
        cur = push(nodes, NodeKind::Introduce(v), bag, vec![cur]);
    }
    cur
}

/// Partition and crossing counts of the bag, both indexed by bag position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DpKey {
    /// Smallest bag vertex in the same part.
    pub rep: Vec<usize>,
    /// Crossing neighbours inside the processed subgraph, 0 or 1.
    pub ext: Vec<u8>,
}

/// Table entries under a fixed hash seed, so runs are reproducible.
pub type Entries = HashMap<DpKey, i64, BuildHasherDefault<DefaultHasher>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub bag: Vec<usize>,
    pub entries: Entries,
}

impl Table {
    pub fn leaf() -> Table {
        let mut entries = Entries::default();
        entries.insert(DpKey { rep: Vec::new(), ext: Vec::new() }, 0);
        Table { bag: Vec::new(), entries }
    }

    pub fn get(&self, key: &DpKey) -> i64 {
        self.entries.get(key).copied().unwrap_or(NEG_INF)
    }

    fn offer(&mut self, key: DpKey, value: i64) {
        debug_assert!(key_is_sound(&self.bag, &key), "malformed key {key:?} on bag {:?}", self.bag);
        let slot = self.entries.entry(key).or_insert(NEG_INF);
        *slot = (*slot).max(value);
    }

    /// Largest value over all keys.
    pub fn best(&self) -> i64 {
        self.entries.values().copied().max().unwrap_or(NEG_INF)
    }
}

fn key_is_sound(bag: &[usize], key: &DpKey) -> bool {
    key.rep.len() == bag.len()
        && key.ext.len() == bag.len()
        && key.ext.iter().all(|&e| e <= 1)
        && key.rep.iter().enumerate().all(|(i, &r)| r <= bag[i] && bag.binary_search(&r).map_or(false, |j| key.rep[j] == r))
}

/// Keys reachable by placing `v` next to `key`: `None` opens a new part,
/// `Some(r)` joins the part represented by bag vertex `r`.
fn introduce_options(g: &Graph, bag: &[usize], v: usize, key: &DpKey) -> Vec<(Option<usize>, DpKey)> {
    let pos = bag.binary_search(&v).expect_err("introduced vertex already in bag");
    let neighbours: Vec<usize> = (0..bag.len()).filter(|&i| g.has_edge(v, bag[i])).collect();
    let mut reps: Vec<usize> = key.rep.clone();
    reps.sort_unstable();
    reps.dedup();
    let mut out = Vec::with_capacity(reps.len() + 1);
    for choice in std::iter::once(None).chain(reps.into_iter().map(Some)) {
        let mut ext = key.ext.clone();
        let mut crossings = 0u8;
        let mut ok = true;
        for &i in &neighbours {
            if choice != Some(key.rep[i]) {
                crossings += 1;
                ext[i] += 1;
                ok &= ext[i] <= 1;
            }
        }
        if !ok || crossings > 1 {
            continue;
        }
        let mut rep = key.rep.clone();
        let own = match choice {
            None => v,
            Some(r) if v < r => {
                for x in rep.iter_mut().filter(|x| **x == r) {
                    *x = v;
                }
                v
            }
            Some(r) => r,
        };
        rep.insert(pos, own);
        ext.insert(pos, crossings);
        out.push((choice, DpKey { rep, ext }));
    }
    out
}

pub fn transfer_introduce(g: &Graph, child: &Table, v: usize) -> Table {
    let pos = child.bag.binary_search(&v).expect_err("introduced vertex already in bag");
    let mut bag = child.bag.clone();
    bag.insert(pos, v);
    let mut out = Table { bag, entries: Entries::default() };
    for (key, &value) in &child.entries {
        for (choice, next) in introduce_options(g, &child.bag, v, key) {
            out.offer(next, value + i64::from(choice.is_none()));
        }
    }
    out
}

/// Crossing neighbours of each bag vertex inside the bag under `rep`.
fn bag_crossings(g: &Graph, bag: &[usize], rep: &[usize]) -> Vec<u8> {
    (0..bag.len()).map(|i| (0..bag.len()).filter(|&j| rep[i] != rep[j] && g.has_edge(bag[i], bag[j])).count() as u8).collect()
}

pub fn transfer_join(g: &Graph, left: &Table, right: &Table) -> Table {
    assert_eq!(left.bag, right.bag, "join children must share their bag");
    let bag = left.bag.clone();
    let mut by_rep: HashMap<&[usize], Vec<(&[u8], i64)>> = HashMap::new();
    for (key, &value) in &right.entries {
        by_rep.entry(&key.rep).or_default().push((&key.ext, value));
    }
    let mut out = Table { bag: bag.clone(), entries: Entries::default() };
    for (key, &v1) in &left.entries {
        let Some(partners) = by_rep.get(key.rep.as_slice()) else { continue };
        for &(ext2, v2) in partners {
            if let Some((next, shared)) = join_key(g, &bag, key, ext2) {
                out.offer(next, v1 + v2 - shared);
            }
        }
    }
    out
}

fn forget_key(bag: &[usize], pos: usize, key: &DpKey) -> DpKey {
    let v = bag[pos];
    let mut rep = key.rep.clone();
    let mut ext = key.ext.clone();
    rep.remove(pos);
    ext.remove(pos);
    if key.rep[pos] == v {
        if let Some(&heir) = (0..bag.len()).filter(|&i| i != pos && key.rep[i] == v).map(|i| &bag[i]).next() {
            for r in rep.iter_mut().filter(|r| **r == v) {
                *r = heir;
            }
        }
    }
    DpKey { rep, ext }
}

pub fn transfer_forget(child: &Table, v: usize) -> Table {
    let pos = child.bag.binary_search(&v).expect("forgotten vertex is in the bag");
    let mut bag = child.bag.clone();
    bag.remove(pos);
    let mut out = Table { bag, entries: Entries::default() };
    for (key, &value) in &child.entries {
        out.offer(forget_key(&child.bag, pos, key), value);
    }
    out
}

fn join_key(g: &Graph, bag: &[usize], left: &DpKey, right_ext: &[u8]) -> Option<(DpKey, i64)> {
    let inside = bag_crossings(g, bag, &left.rep);
    let mut ext = Vec::with_capacity(bag.len());
    for i in 0..bag.len() {
        let e = i16::from(left.ext[i]) + i16::from(right_ext[i]) - i16::from(inside[i]);
        if !(0..=1).contains(&e) {
            return None;
        }
        ext.push(e as u8);
    }
    let mut parts = left.rep.clone();
    parts.sort_unstable();
    parts.dedup();
    Some((DpKey { rep: left.rep.clone(), ext }, parts.len() as i64))
}

/// Statistics of a DP run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DpStats {
    pub nodes: usize,
    pub max_table: usize,
}

/// Largest part count of a matching multicut of `g`, computed over `ntd`.
pub fn max_parts_tw(g: &Graph, ntd: &NiceTreeDecomposition) -> usize {
    max_parts_tw_with_stats(g, ntd).0
}

pub fn max_parts_tw_with_stats(g: &Graph, ntd: &NiceTreeDecomposition) -> (usize, DpStats) {
    let (tables, stats) = run_tables(g, ntd, false);
    let root = tables[ntd.root].as_ref().expect("root table");
    (root.get(&DpKey { rep: Vec::new(), ext: Vec::new() }).max(0) as usize, stats)
}

/// Bottom-up pass. With `keep` every table survives for a traceback; otherwise
/// child tables are dropped as soon as their parent is built.
fn run_tables(g: &Graph, ntd: &NiceTreeDecomposition, keep: bool) -> (Vec<Option<Table>>, DpStats) {
    let mut tables: Vec<Option<Table>> = vec![None; ntd.nodes.len()];
    let mut stats = DpStats { nodes: ntd.nodes.len(), max_table: 0 };
    for (i, node) in ntd.nodes.iter().enumerate() {
        let table = {
            let child = |c: usize| tables[c].as_ref().expect("child table computed first");
            match node.kind {
                NodeKind::Leaf => Table::leaf(),
                NodeKind::Introduce(v) => transfer_introduce(g, child(node.children[0]), v),
                NodeKind::Forget(v) => transfer_forget(child(node.children[0]), v),
                NodeKind::Join => transfer_join(g, child(node.children[0]), child(node.children[1])),
            }
        };
        if !keep {
            for &c in &node.children {
                tables[c] = None;
            }
        }
        let b = table.bag.len() as u32;
        let bound = (table.bag.len().max(1) as u128).saturating_pow(b).saturating_mul(1u128 << b.min(100));
        assert!(table.entries.len() as u128 <= bound, "table exceeds its size bound");
        stats.max_table = stats.max_table.max(table.entries.len());
        tables[i] = Some(table);
    }
    (tables, stats)
}

/// Optimal multicut recovered by walking the tables back down from the root.
/// `None` only for the empty graph.
pub fn max_parts_tw_witness(g: &Graph, ntd: &NiceTreeDecomposition) -> Option<Multicut> {
    if g.n() == 0 {
        return None;
    }
    let (tables, _) = run_tables(g, ntd, true);
    let table = |t: usize| tables[t].as_ref().expect("table kept");
    let mut group: Vec<usize> = (0..g.n()).collect();
    fn find(group: &mut [usize], mut x: usize) -> usize {
        while group[x] != x {
            group[x] = group[group[x]];
            x = group[x];
        }
        x
    }
    let root_key = DpKey { rep: Vec::new(), ext: Vec::new() };
    let mut stack = vec![(ntd.root, root_key.clone(), table(ntd.root).get(&root_key))];
    while let Some((t, key, value)) = stack.pop() {
        let node = &ntd.nodes[t];
        match node.kind {
            NodeKind::Leaf => {}
            NodeKind::Introduce(v) => {
                let c = node.children[0];
                let child = table(c);
                let (choice, ckey, cvalue) = child
                    .entries
                    .iter()
                    .find_map(|(ck, &cv)| {
                        introduce_options(g, &child.bag, v, ck)
                            .into_iter()
                            .find(|(choice, next)| *next == key && cv + i64::from(choice.is_none()) == value)
                            .map(|(choice, _)| (choice, ck.clone(), cv))
                    })
                    .expect("introduce entry has a predecessor");
                if let Some(r) = choice {
                    let (a, b) = (find(&mut group, v), find(&mut group, r));
                    group[a] = b;
                }
                stack.push((c, ckey, cvalue));
            }
            NodeKind::Forget(v) => {
                let c = node.children[0];
                let child = table(c);
                let pos = child.bag.binary_search(&v).expect("forgotten vertex is in the bag");
                let (ckey, &cvalue) = child
                    .entries
                    .iter()
                    .find(|(ck, &cv)| cv == value && forget_key(&child.bag, pos, ck) == key)
                    .expect("forget entry has a predecessor");
                stack.push((c, ckey.clone(), cvalue));
            }
            NodeKind::Join => {
                let (l, r) = (table(node.children[0]), table(node.children[1]));
                let found = l.entries.iter().filter(|(lk, _)| lk.rep == key.rep).find_map(|(lk, &lv)| {
                    r.entries.iter().filter(|(rk, _)| rk.rep == key.rep).find_map(|(rk, &rv)| {
                        let (next, shared) = join_key(g, &node.bag, lk, &rk.ext)?;
                        (next == key && lv + rv - shared == value).then(|| (lk.clone(), lv, rk.clone(), rv))
                    })
                });
                let (lk, lv, rk, rv) = found.expect("join entry has a predecessor");
                stack.push((node.children[0], lk, lv));
                stack.push((node.children[1], rk, rv));
            }
        }
    }
    let mut label = vec![usize::MAX; g.n()];
    let mut next = 0;
    let part_of: Vec<usize> = (0..g.n())
        .map(|v| {
            let root = find(&mut group, v);
            if label[root] == usize::MAX {
                label[root] = next;
                next += 1;
            }
            label[root]
        })
        .collect();
    let mc = canonicalize(g, &part_of).expect("traceback yields a matching multicut");
    Some(mc)
}

/// [`max_parts_tw`] over the min-fill decomposition.
pub fn max_parts_heuristic(g: &Graph) -> usize {
    max_parts_tw(g, &nicify(&heuristic_decomposition(g)))
}
