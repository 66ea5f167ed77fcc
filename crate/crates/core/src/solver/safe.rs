//! Lower bounds, safe separators and rooted clique contractions.

use std::collections::{HashSet, VecDeque};

use crate::bitset::VertexSet;
use crate::decomposition::{greedy_td, TreeDecomposition};
use crate::error::SolveError;
use crate::graph::{Contractor, Graph};
use crate::pmc::{is_minimal_separator, is_pmc, PmcSet};

/// Size of a greedily grown clique, minus one.
pub fn clique_lower_bound(g: &Graph) -> usize {
    let mut best = 0;
    for v in 0..g.n() {
        let mut clique = VertexSet::singleton(g.n(), v);
        let mut cand = g.neighbors(v).clone();
        while let Some(w) = cand
            .iter()
            .max_by_key(|&w| (g.neighbors(w).intersection_len(&cand), std::cmp::Reverse(w)))
        {
            clique.insert(w);
            cand.intersect_with(g.neighbors(w));
        }
        best = best.max(clique.len() - 1);
    }
    best
}

/// Minor-min-width: contract a minimum-degree vertex into its
/// minimum-degree neighbour, recording the largest minimum degree seen.
pub fn minor_min_width(g: &Graph) -> usize {
    let mut adj: Vec<VertexSet> = (0..g.n()).map(|v| g.neighbors(v).clone()).collect();
    let mut alive = g.vertices();
    let mut best = 0;
    while alive.len() > 1 {
        let v = alive.iter().min_by_key(|&v| (adj[v].len(), v)).unwrap();
        best = best.max(adj[v].len());
        if let Some(u) = adj[v].iter().min_by_key(|&u| (adj[u].len(), u)) {
            let nv = adj[v].without(u);
            for w in nv.iter() {
                adj[w].remove(v);
                adj[w].insert(u);
            }
            adj[u].union_with(&nv);
            adj[u].remove(v);
        }
        adj[v].clear();
        alive.remove(v);
    }
    best
}

pub fn lower_bound(g: &Graph) -> usize {
    clique_lower_bound(g).max(minor_min_width(g))
}

pub fn is_almost_clique(g: &Graph, s: &VertexSet) -> bool {
    g.is_clique(s) || s.iter().any(|v| g.is_clique(&s.without(v)))
}

/// Grows vertex-disjoint trees rooted on `s` inside `side` so that
/// contracting each tree into its root turns `s` into a clique. Pairs for
/// which `realized(x, y)` holds need no connection. Every vertex of `side`
/// ends in some tree. Returns the root of each vertex (`usize::MAX` outside
/// `side ∪ s`), or `None` if the greedy search fails within `budget`.
pub fn rooted_clique_contraction(
    g: &Graph,
    side: &VertexSet,
    s: &VertexSet,
    realized: &dyn Fn(usize, usize) -> bool,
    budget: usize,
) -> Option<Vec<usize>> {
    let n = g.n();
    let mut owner = vec![usize::MAX; n];
    let mut parts: Vec<VertexSet> = vec![VertexSet::new(n); n];
    for x in s.iter() {
        owner[x] = x;
        parts[x].insert(x);
    }
    let mut free = side.clone();
    let members: Vec<usize> = s.iter().collect();
    let mut pairs = Vec::new();
    let mut miss = vec![0usize; n];
    for (i, &x) in members.iter().enumerate() {
        for &y in &members[i + 1..] {
            if !g.adjacent(x, y) && !realized(x, y) {
                pairs.push((x, y));
                miss[x] += 1;
                miss[y] += 1;
            }
        }
    }
    for p in pairs.iter_mut() {
        if (miss[p.1], std::cmp::Reverse(p.1)) > (miss[p.0], std::cmp::Reverse(p.0)) {
            *p = (p.1, p.0);
        }
    }
    pairs.sort_by_key(|&(x, y)| (std::cmp::Reverse(miss[x]), x, y));
    let mut work = 0usize;
    for &(x, y) in &pairs {
        let touching = |parts: &[VertexSet], a: usize, b: usize| {
            g.neighborhood(&parts[a]).intersects(&parts[b])
        };
        if touching(&parts, x, y) {
            continue;
        }
        let mut done = false;
        for (a, b) in [(x, y), (y, x)] {
            let target = g.neighborhood(&parts[b]);
            let mut prev = vec![usize::MAX; n];
            let mut queue = VecDeque::new();
            for z in g.neighborhood(&parts[a]).intersection(&free).iter() {
                prev[z] = z;
                queue.push_back(z);
            }
            let mut hit = None;
            while let Some(z) = queue.pop_front() {
                work += 1;
                if work > budget {
                    return None;
                }
                if target.contains(z) {
                    hit = Some(z);
                    break;
                }
                for w in g.neighbors(z).intersection(&free).iter() {
                    if prev[w] == usize::MAX {
                        prev[w] = z;
                        queue.push_back(w);
                    }
                }
            }
            if let Some(mut z) = hit {
                loop {
                    owner[z] = a;
                    parts[a].insert(z);
                    free.remove(z);
                    if prev[z] == z {
                        break;
                    }
                    z = prev[z];
                }
                done = true;
                break;
            }
        }
        if !done {
            return None;
        }
    }
    // remaining side vertices join an adjacent tree
    loop {
        let mut changed = false;
        for z in free.clone().iter() {
            if let Some(r) = g.neighbors(z).iter().find(|&w| owner[w] != usize::MAX) {
                let root = owner[r];
                owner[z] = root;
                parts[root].insert(z);
                free.remove(z);
                changed = true;
            }
        }
        if free.is_empty() {
            break;
        }
        if !changed {
            return None;
        }
    }
    Some(owner)
}

/// `G[C ∪ S] ∪ K(S)` on local ids, with the local-to-global map.
pub fn side_graph(g: &Graph, c: &VertexSet, s: &VertexSet) -> (Graph, Vec<usize>) {
    let (mut q, ids) = g.induced(&c.union(s));
    let mut local = q.empty_set();
    for (i, &v) in ids.iter().enumerate() {
        if s.contains(v) {
            local.insert(i);
        }
    }
    q.fill_clique(&local);
    (q, ids)
}

const ROOTED_BUDGET: usize = 100_000;

/// The second sufficient condition for `S = N(C)`: the side graph has a
/// decomposition of width at most `bound` (found greedily) and `C` can be
/// contracted onto `S` making it a clique. Returns the owner map and the
/// side decomposition on local ids.
pub fn condition_two(
    g: &Graph,
    c: &VertexSet,
    s: &VertexSet,
    bound: usize,
) -> Option<(Vec<usize>, TreeDecomposition, Vec<usize>)> {
    let (q, ids) = side_graph(g, c, s);
    let td = greedy_td(&q).ok()?;
    if td.width() > bound {
        return None;
    }
    let owner = rooted_clique_contraction(g, c, s, &|_, _| false, ROOTED_BUDGET)?;
    Some((owner, td, ids))
}

/// A tree-decomposition of `G` whose edges carry exactly the safe
/// separators found, together with one subproblem per bag.
#[derive(Clone, Debug)]
pub struct SafeSeparatorDecomposition {
    pub bags: Vec<VertexSet>,
    pub edges: Vec<(usize, usize)>,
    pub separators: Vec<VertexSet>,
    pub subproblems: Vec<Subproblem>,
}

#[derive(Clone, Debug)]
pub struct Subproblem {
    /// `G[X]` with the neighbourhood of every component of `G \ X` filled.
    pub graph: Graph,
    /// Local vertex `i` is vertex `vertices[i]` of `G`.
    pub vertices: Vec<usize>,
    /// A contractor of `G` onto `graph`, when one was found.
    pub lift: Option<Contractor>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }
}

pub fn is_safe(g: &Graph, s: &VertexSet, lb: usize) -> bool {
    if !is_minimal_separator(g, s) {
        return false;
    }
    if is_almost_clique(g, s) {
        return true;
    }
    g.full_components(s)
        .iter()
        .any(|c| condition_two(g, c, s, lb).is_some())
}

/// Splits a connected `g` along safe minimal separators of a minimal
/// triangulation.
pub fn preprocess_safe_separators(g: &Graph) -> Result<SafeSeparatorDecomposition, SolveError> {
    let t = greedy_td(g)?;
    let lb = lower_bound(g);
    let nb = t.len();
    let mut dsu = Dsu((0..nb).collect());
    let mut safe_edges = Vec::new();
    for &(a, b) in t.tree_edges() {
        let s = t.bags()[a].intersection(&t.bags()[b]);
        if is_safe(g, &s, lb) {
            safe_edges.push((a, b, s));
        } else {
            let (ra, rb) = (dsu.find(a), dsu.find(b));
            dsu.0[ra] = rb;
        }
    }
    let mut group_of = vec![usize::MAX; nb];
    let mut bags: Vec<VertexSet> = Vec::new();
    for i in 0..nb {
        let r = dsu.find(i);
        if group_of[r] == usize::MAX {
            group_of[r] = bags.len();
            bags.push(g.empty_set());
        }
        group_of[i] = group_of[r];
        bags[group_of[i]].union_with(&t.bags()[i]);
    }
    let mut edges = Vec::new();
    let mut separators = Vec::new();
    for (a, b, s) in safe_edges {
        edges.push((group_of[a], group_of[b]));
        separators.push(s);
    }
    let subproblems = bags.iter().map(|x| subproblem(g, x)).collect();
    Ok(SafeSeparatorDecomposition {
        bags,
        edges,
        separators,
        subproblems,
    })
}

fn subproblem(g: &Graph, x: &VertexSet) -> Subproblem {
    let (mut p, ids) = g.induced(x);
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in ids.iter().enumerate() {
        local[v] = i;
    }
    let mut comps = g.components_without(x);
    comps.sort_by_key(|d| std::cmp::Reverse((g.neighborhood(d).len(), d.len())));
    let mut realized: HashSet<(usize, usize)> = HashSet::new();
    let mut owner = vec![usize::MAX; g.n()];
    for v in x.iter() {
        owner[v] = v;
    }
    let mut ok = true;
    for d in &comps {
        let nd = g.neighborhood(d);
        let mut lc = p.empty_set();
        for v in nd.iter() {
            lc.insert(local[v]);
        }
        p.fill_clique(&lc);
        if !ok {
            continue;
        }
        let seen = |a: usize, b: usize| realized.contains(&(a.min(b), a.max(b)));
        match rooted_clique_contraction(g, d, &nd, &seen, ROOTED_BUDGET) {
            Some(o) => {
                for v in d.iter() {
                    owner[v] = o[v];
                }
                for a in nd.iter() {
                    for b in nd.iter().filter(|&b| b > a) {
                        realized.insert((a, b));
                    }
                }
            }
            None => ok = false,
        }
    }
    let lift = ok.then(|| {
        let mut parts: Vec<VertexSet> = ids
            .iter()
            .map(|&v| VertexSet::singleton(g.n(), v))
            .collect();
        for v in 0..g.n() {
            if !x.contains(v) {
                parts[local[owner[v]]].insert(v);
            }
        }
        Contractor::from_parts(g, parts).ok()
    });
    let lift = lift
        .flatten()
        .filter(|c| g.contract(c).is_ok_and(|h| h == p));
    Subproblem {
        graph: p,
        vertices: ids,
        lift,
    }
}

impl SafeSeparatorDecomposition {
    /// Glues decompositions of the subproblems (on local ids) along the
    /// safe separators into a decomposition of `g`.
    pub fn reassemble(&self, g: &Graph, parts: &[TreeDecomposition]) -> TreeDecomposition {
        let global: Vec<TreeDecomposition> = parts
            .iter()
            .zip(&self.subproblems)
            .map(|(t, sp)| {
                t.map_bags(|b| {
                    let mut out = g.empty_set();
                    for v in b.iter() {
                        out.insert(sp.vertices[v]);
                    }
                    out
                })
            })
            .collect();
        let mut offsets = Vec::new();
        let mut whole = global[0].clone();
        offsets.push(0);
        let mut placed = vec![false; global.len()];
        placed[0] = true;
        // attach in BFS order over the decomposition tree
        let mut queue = VecDeque::from([0usize]);
        let mut adj = vec![Vec::new(); global.len()];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        offsets.resize(global.len(), 0);
        while let Some(a) = queue.pop_front() {
            for &(b, ei) in &adj[a] {
                if placed[b] {
                    continue;
                }
                let s = &self.separators[ei];
                let ia = global[a]
                    .bag_containing(s)
                    .expect("safe separator is a clique");
                let ib = global[b]
                    .bag_containing(s)
                    .expect("safe separator is a clique");
                offsets[b] = whole.len();
                whole.attach(&global[b], offsets[a] + ia, ib);
                placed[b] = true;
                queue.push_back(b);
            }
        }
        whole.normalized()
    }
}

/// A width-preserving contraction of `G` found through the second
/// condition, with what is needed to lift PMC certificates back.
#[derive(Clone, Debug)]
pub struct SafeContraction {
    pub gamma: Contractor,
    /// PMCs of `G` inside `C ∪ S` from the side decomposition.
    pub side_pmcs: PmcSet,
    /// For each vertex of `G / γ`, its root vertex in `G`.
    pub roots: Vec<usize>,
    pub component: VertexSet,
    pub separator: VertexSet,
}

/// Searches the separators of a greedy decomposition for a connected `C`
/// whose side graph has width at most `bound` and contracts onto `N(C)`.
pub fn find_safe_contractor(g: &Graph, bound: usize) -> Option<SafeContraction> {
    let t = greedy_td(g).ok()?;
    let mut tried = HashSet::new();
    let mut cands = Vec::new();
    for &(a, b) in t.tree_edges() {
        let s = t.bags()[a].intersection(&t.bags()[b]);
        if !tried.insert(s.clone()) || !is_minimal_separator(g, &s) {
            continue;
        }
        for c in g.full_components(&s) {
            cands.push((c, s.clone()));
        }
    }
    cands.sort_by_key(|(c, _)| std::cmp::Reverse(c.len()));
    for (c, s) in cands {
        let Some((owner, td, ids)) = condition_two(g, &c, &s, bound) else {
            continue;
        };
        let mut parts = Vec::new();
        let mut roots = Vec::new();
        let mut index = vec![usize::MAX; g.n()];
        for v in 0..g.n() {
            if !c.contains(v) {
                index[v] = parts.len();
                parts.push(VertexSet::singleton(g.n(), v));
                roots.push(v);
            }
        }
        for v in c.iter() {
            parts[index[owner[v]]].insert(v);
        }
        let Ok(gamma) = Contractor::from_parts(g, parts) else {
            continue;
        };
        let side_pmcs = PmcSet::from_sets(td.bags().iter().map(|b| {
            let mut out = g.empty_set();
            for v in b.iter() {
                out.insert(ids[v]);
            }
            out
        }));
        if !side_pmcs.iter().all(|x| is_pmc(g, x)) {
            continue;
        }
        return Some(SafeContraction {
            gamma,
            side_pmcs,
            roots,
            component: c,
            separator: s,
        });
    }
    None
}

/// Maps PMCs of `G / γ'` back to `G` through the roots and adds the side
/// PMCs.
pub fn stitch_certificate(
    pi: &PmcSet,
    sc: &SafeContraction,
    g: &Graph,
) -> Result<PmcSet, SolveError> {
    let mut out = sc.side_pmcs.clone();
    for x in pi {
        let mut y = g.empty_set();
        for w in x.iter() {
            y.insert(sc.roots[w]);
        }
        if !is_pmc(g, &y) {
            return Err(SolveError::Invariant(format!(
                "stitched set {:?} is not a PMC",
                y.to_vec()
            )));
        }
        out.insert(y);
    }
    Ok(out)
}
