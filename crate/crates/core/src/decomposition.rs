//! Tree-decompositions: validation, fill, greedy construction, uncontraction
//! and minimalization.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::bitset::VertexSet;
use crate::error::{DecompositionError, GraphError};
use crate::graph::{Contractor, Graph};
use crate::pmc::{self, BtOptions, CardinalityWeight, PmcSet};

/// A tree whose nodes are bags. Node `i` carries `bags[i]`.
#[derive(Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<VertexSet>,
    edges: Vec<(usize, usize)>,
}

impl fmt::Debug for TreeDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreeDecomposition")
            .field("bags", &self.bags)
            .field("edges", &self.edges)
            .finish()
    }
}

/// First failed condition found by [`validate`], with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BagOutsideGraph { bag: usize, vertex: usize },
    NotATree,
    VertexUncovered(usize),
    EdgeUncovered(usize, usize),
    DisconnectedOccurrence(usize),
    DuplicateBags(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BagOutsideGraph { bag, vertex } => {
                write!(f, "bag {bag} contains unknown vertex {vertex}")
            }
            Violation::NotATree => write!(f, "tree edges do not form a tree"),
            Violation::VertexUncovered(v) => write!(f, "vertex {v} is in no bag"),
            Violation::EdgeUncovered(u, v) => write!(f, "edge {{{u}, {v}}} is in no bag"),
            Violation::DisconnectedOccurrence(v) => {
                write!(
                    f,
                    "bags containing vertex {v} are not connected in the tree"
                )
            }
            Violation::DuplicateBags(i, j) => write!(f, "bags {i} and {j} are equal"),
        }
    }
}

impl TreeDecomposition {
    pub fn new(
        bags: Vec<VertexSet>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, DecompositionError> {
        if bags.is_empty() {
            return Err(DecompositionError::Empty);
        }
        if let Some(&(a, b)) = edges
            .iter()
            .find(|&&(a, b)| a >= bags.len() || b >= bags.len())
        {
            return Err(DecompositionError::BadTreeEdge(a, b));
        }
        Ok(TreeDecomposition { bags, edges })
    }

    pub fn single(bag: VertexSet) -> Self {
        TreeDecomposition {
            bags: vec![bag],
            edges: Vec::new(),
        }
    }

    pub fn bags(&self) -> &[VertexSet] {
        &self.bags
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.max_bag().saturating_sub(1)
    }

    pub fn max_bag(&self) -> usize {
        self.bags.iter().map(VertexSet::len).max().unwrap_or(0)
    }

    pub fn bag_set(&self) -> PmcSet {
        PmcSet::from_sets(self.bags.iter().cloned())
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Index of some bag containing `s`.
    pub fn bag_containing(&self, s: &VertexSet) -> Option<usize> {
        self.bags.iter().position(|b| s.is_subset(b))
    }

    /// Relabels every bag through `f`, keeping the tree.
    pub fn map_bags(&self, f: impl Fn(&VertexSet) -> VertexSet) -> TreeDecomposition {
        TreeDecomposition {
            bags: self.bags.iter().map(f).collect(),
            edges: self.edges.clone(),
        }
    }

    /// Joins `other` to `self` by a tree edge between `at_self` and `at_other`.
    pub fn attach(&mut self, other: &TreeDecomposition, at_self: usize, at_other: usize) {
        let off = self.bags.len();
        self.bags.extend(other.bags.iter().cloned());
        self.edges
            .extend(other.edges.iter().map(|&(a, b)| (a + off, b + off)));
        self.edges.push((at_self, at_other + off));
    }

    /// Merges equal bags until all bags are distinct. Adjacent equal bags
    /// are contracted first; a remaining duplicate is folded into its
    /// neighbour towards its twin, whose bag is necessarily a superset.
    pub fn normalized(&self) -> TreeDecomposition {
        let mut bags: Vec<Option<VertexSet>> = self.bags.iter().cloned().map(Some).collect();
        let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); bags.len()];
        for &(a, b) in &self.edges {
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let merge = |bags: &mut Vec<Option<VertexSet>>,
                     adj: &mut Vec<HashSet<usize>>,
                     gone: usize,
                     keep: usize| {
            let nbrs: Vec<usize> = adj[gone].drain().collect();
            for x in nbrs {
                adj[x].remove(&gone);
                if x != keep {
                    adj[x].insert(keep);
                    adj[keep].insert(x);
                }
            }
            bags[gone] = None;
        };
        loop {
            let mut pair = None;
            'outer: for i in 0..bags.len() {
                if let Some(bi) = &bags[i] {
                    for &j in &adj[i] {
                        if bags[j].as_ref() == Some(bi) {
                            pair = Some((i, j));
                            break 'outer;
                        }
                    }
                }
            }
            if let Some((i, j)) = pair {
                merge(&mut bags, &mut adj, i, j);
                continue;
            }
            let mut seen: HashMap<&VertexSet, usize> = HashMap::new();
            let mut twin = None;
            for (i, b) in bags.iter().enumerate() {
                if let Some(b) = b {
                    if let Some(&j) = seen.get(b) {
                        twin = Some((j, i));
                        break;
                    }
                    seen.insert(b, i);
                }
            }
            let Some((i, j)) = twin else { break };
            let next = first_step_on_path(&adj, i, j).expect("tree is connected");
            merge(&mut bags, &mut adj, i, next);
        }
        let mut new_id = vec![usize::MAX; bags.len()];
        let mut out_bags = Vec::new();
        for (i, b) in bags.iter().enumerate() {
            if let Some(b) = b {
                new_id[i] = out_bags.len();
                out_bags.push(b.clone());
            }
        }
        let mut out_edges = Vec::new();
        for (i, nb) in adj.iter().enumerate() {
            for &j in nb {
                if i < j && bags[i].is_some() && bags[j].is_some() {
                    out_edges.push((new_id[i], new_id[j]));
                }
            }
        }
        out_edges.sort_unstable();
        TreeDecomposition {
            bags: out_bags,
            edges: out_edges,
        }
    }
}

fn first_step_on_path(adj: &[HashSet<usize>], from: usize, to: usize) -> Option<usize> {
    let mut prev = vec![usize::MAX; adj.len()];
    prev[from] = from;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut cur = to;
            while prev[cur] != from {
                cur = prev[cur];
            }
            return Some(cur);
        }
        for &y in &adj[x] {
            if prev[y] == usize::MAX {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

/// Checks the tree-decomposition conditions of `t` against `g`, plus the
/// distinct-bags convention.
pub fn validate(g: &Graph, t: &TreeDecomposition) -> Result<(), Violation> {
    let n = g.n();
    for (i, b) in t.bags.iter().enumerate() {
        if let Some(v) = b.iter().find(|&v| v >= n) {
            return Err(Violation::BagOutsideGraph { bag: i, vertex: v });
        }
        if b.word_len() != n.div_ceil(64) {
            return Err(Violation::BagOutsideGraph {
                bag: i,
                vertex: b.last().unwrap_or(0),
            });
        }
    }
    let nb = t.bags.len();
    if nb == 0 || t.edges.len() + 1 != nb {
        return Err(Violation::NotATree);
    }
    let adj = t.adjacency();
    let mut seen = vec![false; nb];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    if count != nb {
        return Err(Violation::NotATree);
    }
    let mut covered = g.empty_set();
    for b in &t.bags {
        covered.union_with(b);
    }
    if let Some(v) = g.vertices().difference(&covered).first() {
        return Err(Violation::VertexUncovered(v));
    }
    for (u, v) in g.edges() {
        if !t.bags.iter().any(|b| b.contains(u) && b.contains(v)) {
            return Err(Violation::EdgeUncovered(u, v));
        }
    }
    for v in 0..n {
        let holders: Vec<usize> = (0..nb).filter(|&i| t.bags[i].contains(v)).collect();
        let mut seen = vec![false; nb];
        let mut stack = vec![holders[0]];
        seen[holders[0]] = true;
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] && t.bags[y].contains(v) {
                    seen[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != holders.len() {
            return Err(Violation::DisconnectedOccurrence(v));
        }
    }
    let mut index: HashMap<&VertexSet, usize> = HashMap::new();
    for (i, b) in t.bags.iter().enumerate() {
        if let Some(&j) = index.get(b) {
            return Err(Violation::DuplicateBags(j, i));
        }
        index.insert(b, i);
    }
    Ok(())
}

/// `g` with every bag of `t` filled into a clique.
pub fn fill(g: &Graph, t: &TreeDecomposition) -> Result<Graph, DecompositionError> {
    validate(g, t).map_err(DecompositionError::Invalid)?;
    Ok(g.with_cliques(t.bags.iter()))
}

/// A chordal supergraph of a base graph on the same vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    graph: Graph,
}

impl Triangulation {
    pub fn of(base: &Graph, t: &TreeDecomposition) -> Result<Self, DecompositionError> {
        Ok(Triangulation {
            graph: fill(base, t)?,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn is_chordal(&self) -> bool {
        is_chordal(&self.graph)
    }
}

/// Maximum cardinality search; the reverse of the returned order is a
/// perfect elimination order whenever the graph is chordal.
fn mcs_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut done = g.empty_set();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !done.contains(v))
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .unwrap();
        done.insert(v);
        order.push(v);
        for w in g.neighbors(v).iter() {
            if !done.contains(w) {
                weight[w] += 1;
            }
        }
    }
    order
}

/// Perfect elimination order of a chordal graph, `None` otherwise.
pub fn perfect_elimination_order(g: &Graph) -> Option<Vec<usize>> {
    let mut peo = mcs_order(g);
    peo.reverse();
    let n = g.n();
    let mut pos = vec![0; n];
    for (i, &v) in peo.iter().enumerate() {
        pos[v] = i;
    }
    for &v in &peo {
        let later: Vec<usize> = g.neighbors(v).iter().filter(|&w| pos[w] > pos[v]).collect();
        if let Some(&u) = later.iter().min_by_key(|&&w| pos[w]) {
            for &w in &later {
                if w != u && !g.adjacent(u, w) {
                    return None;
                }
            }
        }
    }
    Some(peo)
}

pub fn is_chordal(g: &Graph) -> bool {
    perfect_elimination_order(g).is_some()
}

/// Maximal cliques of a chordal graph.
pub fn maximal_cliques(h: &Graph) -> Vec<VertexSet> {
    let peo = perfect_elimination_order(h).expect("graph must be chordal");
    let n = h.n();
    let mut pos = vec![0; n];
    for (i, &v) in peo.iter().enumerate() {
        pos[v] = i;
    }
    let cands: Vec<VertexSet> = peo
        .iter()
        .map(|&v| {
            let mut c = h.empty_set();
            c.insert(v);
            for w in h.neighbors(v).iter().filter(|&w| pos[w] > pos[v]) {
                c.insert(w);
            }
            c
        })
        .collect();
    let mut out: Vec<VertexSet> = Vec::new();
    for (i, c) in cands.iter().enumerate() {
        let dominated = cands
            .iter()
            .enumerate()
            .any(|(j, d)| j != i && c.is_subset(d) && (c != d || j < i));
        if !dominated {
            out.push(c.clone());
        }
    }
    out.sort();
    out
}

/// A clique tree of chordal `h`: maximal cliques joined by a maximum-weight
/// spanning tree of the clique intersection graph.
pub fn clique_tree(h: &Graph) -> TreeDecomposition {
    let cliques = maximal_cliques(h);
    let k = cliques.len();
    let mut in_tree = vec![false; k];
    let mut best = vec![(0usize, usize::MAX); k];
    let mut edges = Vec::with_capacity(k.saturating_sub(1));
    in_tree[0] = true;
    for j in 1..k {
        best[j] = (cliques[0].intersection_len(&cliques[j]), 0);
    }
    for _ in 1..k {
        let j = (0..k)
            .filter(|&j| !in_tree[j])
            .max_by(|&a, &b| best[a].0.cmp(&best[b].0).then(b.cmp(&a)))
            .unwrap();
        in_tree[j] = true;
        edges.push((best[j].1.min(j), best[j].1.max(j)));
        for x in 0..k {
            if !in_tree[x] {
                let w = cliques[j].intersection_len(&cliques[x]);
                if w > best[x].0 || best[x].1 == usize::MAX {
                    best[x] = (w, j);
                }
            }
        }
    }
    TreeDecomposition {
        bags: cliques,
        edges,
    }
}

/// Removes fill edges of the triangulation `h` of `g` one at a time while
/// chordality is kept, until the triangulation is minimal. A fill edge can
/// go exactly when the common neighbourhood of its ends is a clique.
pub fn minimal_triangulation(g: &Graph, h: &Graph) -> Graph {
    let mut h = h.clone();
    loop {
        let mut changed = false;
        for (u, v) in h.edges() {
            if g.adjacent(u, v) {
                continue;
            }
            let common = h.neighbors(u).intersection(h.neighbors(v));
            if h.is_clique(&common) {
                h.remove_edge(u, v);
                changed = true;
            }
        }
        if !changed {
            return h;
        }
    }
}

/// A minimal tree-decomposition whose fill is contained in `fill(g, t)`.
pub fn minimalize(
    g: &Graph,
    t: &TreeDecomposition,
) -> Result<TreeDecomposition, DecompositionError> {
    let h = fill(g, t)?;
    Ok(clique_tree(&minimal_triangulation(g, &h)))
}

/// Min-fill elimination; ties go to smaller degree, then smaller id.
pub fn min_fill_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut work = g.clone();
    let mut alive = g.vertices();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = alive
            .iter()
            .min_by_key(|&v| {
                let nb = work.neighbors(v).intersection(&alive);
                (work.missing_pairs(&nb), nb.len(), v)
            })
            .unwrap();
        let nb = work.neighbors(v).intersection(&alive);
        work.fill_clique(&nb);
        alive.remove(v);
        order.push(v);
    }
    order
}

/// The triangulation produced by eliminating vertices in `order`.
pub fn elimination_fill(g: &Graph, order: &[usize]) -> Graph {
    let mut h = g.clone();
    let mut alive = g.vertices();
    for &v in order {
        let nb = h.neighbors(v).intersection(&alive);
        h.fill_clique(&nb);
        alive.remove(v);
    }
    h
}

/// Greedy upper bound: min-fill elimination followed by minimalization.
pub fn greedy_td(g: &Graph) -> Result<TreeDecomposition, DecompositionError> {
    if g.n() == 0 {
        return Err(GraphError::Empty.into());
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    let h = elimination_fill(g, &min_fill_order(g));
    Ok(clique_tree(&minimal_triangulation(g, &h)))
}

/// Replaces every bag `X` of a decomposition of `G / gamma` by
/// `gamma^-1(X)`, merging bags that become equal.
pub fn uncontract_td(
    t: &TreeDecomposition,
    gamma: &Contractor,
) -> Result<TreeDecomposition, DecompositionError> {
    let m = gamma.len();
    if let Some(b) = t
        .bags
        .iter()
        .find(|b| b.word_len() != m.div_ceil(64) || b.last().is_some_and(|v| v >= m))
    {
        return Err(GraphError::UniverseMismatch {
            expected: m,
            actual: b.last().map_or(0, |v| v + 1),
        }
        .into());
    }
    Ok(t.map_bags(|b| gamma.preimage(b)).normalized())
}

/// Minimal separators of `g` that are cliques of `fill(g, t)`.
pub fn admissible_separators(
    g: &Graph,
    t: &TreeDecomposition,
) -> Result<Vec<VertexSet>, DecompositionError> {
    let f = fill(g, t)?;
    let mut out = HashSet::new();
    for clique in maximal_cliques(&f) {
        let vs = clique.to_vec();
        if vs.len() > SUBSET_ENUM_MAX_CLIQUE {
            // fall back to full enumeration, filtered by admissibility
            let all = pmc::minimal_separators(g, None);
            return Ok(all
                .separators
                .into_iter()
                .filter(|s| f.is_clique(s))
                .collect());
        }
        for mask in 1u64..(1 << vs.len()) {
            let s = subset(g.n(), &vs, mask);
            if pmc::is_minimal_separator(g, &s) {
                out.insert(s);
            }
        }
    }
    let mut out: Vec<_> = out.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Largest clique of the fill whose subsets are enumerated as PMC
/// candidates by [`minimalize_optimally`].
pub const SUBSET_ENUM_MAX_CLIQUE: usize = 20;
const SUBSET_ENUM_BUDGET: u64 = 1 << 21;

fn subset(n: usize, vs: &[usize], mask: u64) -> VertexSet {
    let mut s = VertexSet::new(n);
    for (i, &v) in vs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            s.insert(v);
        }
    }
    s
}

/// PMCs of `g` that are cliques of `f`; `None` past the enumeration budget.
pub(crate) fn pmcs_inside_cliques(g: &Graph, f: &Graph) -> Option<PmcSet> {
    let cliques = maximal_cliques(f);
    let total: u64 = cliques
        .iter()
        .map(|c| {
            if c.len() >= 63 {
                u64::MAX
            } else {
                1u64 << c.len()
            }
        })
        .fold(0u64, |a, b| a.saturating_add(b));
    if total > SUBSET_ENUM_BUDGET || cliques.iter().any(|c| c.len() > SUBSET_ENUM_MAX_CLIQUE) {
        return None;
    }
    let mut found = HashSet::new();
    for clique in &cliques {
        let vs = clique.to_vec();
        for mask in 1u64..(1 << vs.len()) {
            let s = subset(g.n(), &vs, mask);
            if !found.contains(&s) && pmc::is_pmc(g, &s) {
                found.insert(s);
            }
        }
    }
    Some(PmcSet::from_sets(found))
}

/// Among the minimal triangulations of `g` inside `fill(g, t)`, returns a
/// clique tree of one with the smallest maximum clique. Every such
/// triangulation's maximal cliques are PMCs of `g` that are cliques of the
/// fill, so BT dynamic programming over that family finds the optimum.
pub fn minimalize_optimally(
    g: &Graph,
    t: &TreeDecomposition,
) -> Result<TreeDecomposition, DecompositionError> {
    let f = fill(g, t)?;
    if !g.is_connected() {
        return Ok(clique_tree(&minimal_triangulation(g, &f)));
    }
    let Some(pi) = pmcs_inside_cliques(g, &f) else {
        log::debug!("minimalize_optimally: candidate budget exceeded, using minimalize");
        return Ok(clique_tree(&minimal_triangulation(g, &f)));
    };
    let res = pmc::bt_dp(g, &pi, &CardinalityWeight, BtOptions::single());
    let best = res
        .decompositions
        .into_iter()
        .next()
        .expect("the minimal triangulations of the fill are admitted");
    let h = g.with_cliques(best.bags.iter());
    Ok(clique_tree(&minimal_triangulation(g, &h)))
}
