//! Test support: exhaustive and random graph generators, named graphs, and
//! brute-force oracles that share no code with the solver beyond [`Graph`].

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rtw_core::Graph;

/// Adjacency rows as bitmasks, for graphs on at most 32 vertices.
pub fn masks(g: &Graph) -> Vec<u32> {
    assert!(g.n() <= 32);
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u32, |a, u| a | 1 << u))
        .collect()
}

fn from_rows(rows: &[u32]) -> Graph {
    let n = rows.len();
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rows[u] >> v & 1 == 1 {
                e.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &e).unwrap()
}

fn code(rows: &[u32], perm: &[usize]) -> u64 {
    // perm[i] = old vertex placed at position i
    let n = rows.len();
    let mut c = 0u64;
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if rows[perm[i]] >> perm[j] & 1 == 1 {
                c |= 1 << bit;
            }
            bit += 1;
        }
    }
    c
}

/// Canonical code: least edge code over labellings that order vertices by
/// (degree, neighbour degree multiset). The refinement is invariant under
/// isomorphism, so equal codes mean isomorphic graphs.
fn canonical(rows: &[u32]) -> u64 {
    let n = rows.len();
    let deg: Vec<u32> = rows.iter().map(|r| r.count_ones()).collect();
    let key = |v: usize| {
        let mut nd: Vec<u32> = (0..n)
            .filter(|&u| rows[v] >> u & 1 == 1)
            .map(|u| deg[u])
            .collect();
        nd.sort_unstable();
        (deg[v], nd)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| key(v));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if key(c[0]) == key(v) => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    fn go(classes: &[Vec<usize>], ci: usize, perm: &mut Vec<usize>, rows: &[u32], best: &mut u64) {
        if ci == classes.len() {
            *best = (*best).min(code(rows, perm));
            return;
        }
        let mut used = vec![false; classes[ci].len()];
        permute(classes, ci, &mut used, perm, rows, best);
    }
    fn permute(
        classes: &[Vec<usize>],
        ci: usize,
        used: &mut [bool],
        perm: &mut Vec<usize>,
        rows: &[u32],
        best: &mut u64,
    ) {
        if used.iter().all(|&u| u) {
            go(classes, ci + 1, perm, rows, best);
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                perm.push(classes[ci][i]);
                permute(classes, ci, used, perm, rows, best);
                perm.pop();
                used[i] = false;
            }
        }
    }
    let mut best = u64::MAX;
    go(&classes, 0, &mut Vec::with_capacity(n), rows, &mut best);
    best
}

fn extend_all(prev: &[Vec<u32>], n: usize, connected: bool) -> Vec<Vec<u32>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for rows in prev {
        let first = usize::from(connected);
        for nb in first as u32..1u32 << (n - 1) {
            let mut r = rows.clone();
            for (u, row) in r.iter_mut().enumerate() {
                if nb >> u & 1 == 1 {
                    *row |= 1 << (n - 1);
                }
            }
            r.push(nb);
            if seen.insert(canonical(&r)) {
                out.push(r);
            }
        }
    }
    out
}

fn family(n: usize, connected: bool) -> Vec<Graph> {
    assert!((1..=8).contains(&n));
    let mut level: Vec<Vec<u32>> = vec![vec![0]];
    for k in 2..=n {
        level = extend_all(&level, k, connected);
    }
    level.iter().map(|r| from_rows(r)).collect()
}

/// Connected graphs on `n` vertices, one per isomorphism class. Every
/// connected graph has a vertex whose removal leaves it connected, so
/// extending connected graphs by one attached vertex reaches all of them.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    family(n, true)
}

/// All graphs on `n` vertices, one per isomorphism class.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    family(n, false)
}

/// A connected graph with `n` vertices and `m` edges: a random tree plus
/// uniformly chosen extra edges, on shuffled labels.
pub fn random_connected(rng: &mut impl Rng, n: usize, m: usize) -> Graph {
    assert!(n >= 1 && m + 1 >= n && m <= n * (n - 1) / 2);
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut e = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        e.insert(canon(label[u], label[v]));
    }
    while e.len() < m {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            e.insert(canon(u, v));
        }
    }
    let e: Vec<_> = e.into_iter().collect();
    Graph::from_edges(n, &e).unwrap()
}

fn canon(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

pub fn path(n: usize) -> Graph {
    let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &e).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &e).unwrap()
}

pub fn grid(r: usize, c: usize) -> Graph {
    let mut e = Vec::new();
    for i in 0..r {
        for j in 0..c {
            let v = i * c + j;
            if j + 1 < c {
                e.push((v, v + 1));
            }
            if i + 1 < r {
                e.push((v, v + c));
            }
        }
    }
    Graph::from_edges(r * c, &e).unwrap()
}

pub fn petersen() -> Graph {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(10, &e).unwrap()
}

/// Treewidth by dynamic programming over vertex sets eliminated first:
/// `TW(S) = min over v in S of max(TW(S - v), |Q(S - v, v)|)` where
/// `Q(S, v)` are the vertices outside `S + v` reachable from `v` through `S`.
pub fn treewidth(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 20, "oracle is exponential");
    if n == 0 {
        return 0;
    }
    let adj = masks(g);
    let full = (1u32 << n) - 1;
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut stack = vec![v];
        let mut out = 0u32;
        while let Some(x) = stack.pop() {
            let mut nb = adj[x] & !seen;
            while nb != 0 {
                let y = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                seen |= 1 << y;
                if s >> y & 1 == 1 {
                    stack.push(y);
                } else {
                    out |= 1 << y;
                }
            }
        }
        out.count_ones()
    };
    let mut tw = vec![u32::MAX; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = u32::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let cand = tw[prev as usize].max(q(prev, v));
            best = best.min(cand);
        }
        tw[s as usize] = best;
    }
    // the last vertex eliminated contributes |Q| = 0, so TW(V) is the width
    tw[full as usize] as usize
}

fn elimination_fill(adj: &[u32], order: &[usize]) -> Vec<u32> {
    let mut h = adj.to_vec();
    let mut gone = 0u32;
    for &v in order {
        let nb = h[v] & !gone;
        let mut rest = nb;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            h[u] |= nb & !(1 << u);
        }
        gone |= 1 << v;
    }
    h
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            p.swap(j, k - 1);
        }
    }
    heap(n, &mut p, &mut out);
    out
}

/// Every minimal triangulation of `g`, as adjacency rows. Every minimal
/// triangulation is the fill of some elimination ordering, so these are the
/// inclusion-minimal fills over all orders.
pub fn minimal_triangulations(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.n();
    assert!(n <= 8);
    let adj = masks(g);
    let fills: BTreeSet<Vec<u32>> = permutations(n)
        .iter()
        .map(|o| elimination_fill(&adj, o))
        .collect();
    let sub = |a: &[u32], b: &[u32]| a.iter().zip(b).all(|(x, y)| x & !y == 0);
    fills
        .iter()
        .filter(|f| !fills.iter().any(|o| o != *f && sub(o, f)))
        .cloned()
        .collect()
}

/// Maximal cliques of a graph given by adjacency rows, by subset search.
pub fn maximal_cliques(rows: &[u32]) -> Vec<u32> {
    let n = rows.len();
    let is_clique = |s: u32| {
        (0..n)
            .filter(|&v| s >> v & 1 == 1)
            .all(|v| s & !(1 << v) & !rows[v] == 0)
    };
    (1u32..1 << n)
        .filter(|&s| is_clique(s) && (0..n).all(|v| s >> v & 1 == 1 || !is_clique(s | 1 << v)))
        .collect()
}

/// Potential maximal cliques: maximal cliques of minimal triangulations.
pub fn pmcs_by_triangulations(g: &Graph) -> BTreeSet<u32> {
    minimal_triangulations(g)
        .iter()
        .flat_map(|h| maximal_cliques(h))
        .collect()
}
