//! Exponential reference algorithms for small graphs.

use std::time::Instant;

use crate::bitset::VertexSet;
use crate::graph::Graph;

pub const ORACLE_MAX_N: usize = 24;

fn q_size(g: &Graph, s: u32, v: usize) -> usize {
    // vertices outside s ∪ {v} reachable from v through s
    let n = g.n();
    let mut seen: u32 = 1 << v;
    let mut stack = vec![v];
    let mut count = 0;
    while let Some(x) = stack.pop() {
        for y in g.neighbors(x).iter() {
            if seen >> y & 1 == 1 {
                continue;
            }
            seen |= 1 << y;
            if s >> y & 1 == 1 {
                stack.push(y);
            } else {
                count += 1;
            }
        }
    }
    debug_assert!(n <= 32);
    count
}

/// Treewidth by dynamic programming over elimination prefixes.
/// Returns `None` for graphs above [`ORACLE_MAX_N`] vertices.
pub fn treewidth(g: &Graph) -> Option<usize> {
    let n = g.n();
    if n > ORACLE_MAX_N {
        return None;
    }
    if n == 0 {
        return Some(0);
    }
    let full: u32 = if n == 32 { !0 } else { (1u32 << n) - 1 };
    let mut tw = vec![u8::MAX; 1usize << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let here = tw[prev as usize].max(q_size(g, prev, v) as u8);
            best = best.min(here);
        }
        tw[s as usize] = best;
    }
    Some(tw[full as usize] as usize)
}

/// Result of [`elimination_order_at_most`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderSearch {
    /// An elimination order of width at most `k`.
    Found(Vec<usize>),
    Infeasible,
    TooLarge,
    Expired,
}

/// Depth-first search over elimination prefixes whose eliminations all stay
/// within width `k`; each prefix set is visited once. Stops as soon as at
/// most `k + 1` vertices remain.
pub fn elimination_order_at_most(g: &Graph, k: usize, deadline: Option<Instant>) -> OrderSearch {
    let n = g.n();
    if n > ORACLE_MAX_N {
        return OrderSearch::TooLarge;
    }
    let full: u32 = (1u32 << n) - 1;
    let mut visited = vec![0u64; (1usize << n).div_ceil(64)];
    visited[0] |= 1;
    // (prefix, vertices not yet tried from it)
    let mut stack: Vec<(u32, u32)> = vec![(0, full)];
    let mut steps = 0u64;
    while let Some(&mut (s, ref mut rest)) = stack.last_mut() {
        if n - s.count_ones() as usize <= k + 1 {
            let mut order: Vec<usize> = stack
                .windows(2)
                .map(|w| (w[1].0 ^ w[0].0).trailing_zeros() as usize)
                .collect();
            order.extend((0..n).filter(|&v| s >> v & 1 == 0));
            return OrderSearch::Found(order);
        }
        if *rest == 0 {
            stack.pop();
            continue;
        }
        let v = rest.trailing_zeros() as usize;
        *rest &= *rest - 1;
        steps += 1;
        if steps.is_multiple_of(4096) && deadline.is_some_and(|d| Instant::now() >= d) {
            return OrderSearch::Expired;
        }
        let next = s | 1 << v;
        let (w, b) = (next as usize / 64, next as usize % 64);
        if visited[w] >> b & 1 == 1 || q_size(g, s, v) > k {
            continue;
        }
        visited[w] |= 1 << b;
        stack.push((next, full & !next));
    }
    OrderSearch::Infeasible
}

/// Decides `tw(g) <= k` with [`elimination_order_at_most`]; `None` above
/// [`ORACLE_MAX_N`] vertices.
pub fn treewidth_at_most(g: &Graph, k: usize) -> Option<bool> {
    match elimination_order_at_most(g, k, None) {
        OrderSearch::Found(_) => Some(true),
        OrderSearch::Infeasible => Some(false),
        OrderSearch::TooLarge | OrderSearch::Expired => None,
    }
}

/// Every subset of `V(g)`, as vertex sets. Intended for tiny graphs.
pub fn subsets(n: usize) -> impl Iterator<Item = VertexSet> {
    (0u64..(1u64 << n)).map(move |mask| {
        let mut s = VertexSet::new(n);
        for v in 0..n {
            if mask >> v & 1 == 1 {
                s.insert(v);
            }
        }
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decision_agrees_with_value() {
        let petersen = {
            let mut e = Vec::new();
            for i in 0..5 {
                e.push((i, (i + 1) % 5));
                e.push((i, i + 5));
                e.push((5 + i, 5 + (i + 2) % 5));
            }
            Graph::from_edges(10, &e).unwrap()
        };
        for g in [petersen, Graph::complete(5), Graph::new(4)] {
            let tw = treewidth(&g).unwrap();
            for k in 0..g.n() {
                assert_eq!(treewidth_at_most(&g, k), Some(tw <= k), "k={k}");
                if let OrderSearch::Found(order) = elimination_order_at_most(&g, k, None) {
                    let mut sorted = order.clone();
                    sorted.sort_unstable();
                    assert_eq!(sorted, (0..g.n()).collect::<Vec<_>>());
                    let h = crate::decomposition::elimination_fill(&g, &order);
                    let width = crate::decomposition::clique_tree(&h).width();
                    assert!(width <= k, "order of width {width} for k={k}");
                }
            }
        }
    }

    #[test]
    fn known_values() {
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        assert_eq!(treewidth(&c5), Some(2));
        assert_eq!(treewidth(&Graph::complete(6)), Some(5));
        assert_eq!(treewidth(&Graph::new(3)), Some(0));
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(treewidth(&p), Some(1));
    }
}
