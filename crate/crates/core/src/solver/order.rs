//! Edge ordering by relative deficiency.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, Graph};

/// `defic_G(u, v)`: non-adjacent pairs of `N(v) \ {u}`, which is the
/// deficiency of `G[N[v]]` with `u` and `v` merged.
pub fn deficiency(g: &Graph, u: usize, v: usize) -> usize {
    g.missing_pairs(&g.neighbors(v).without(u))
}

/// The value of edge `{u, v}` as an exact fraction `(num, den)`.
pub fn edge_value(g: &Graph, u: usize, v: usize) -> (usize, usize) {
    let a = (deficiency(g, u, v), g.degree(v));
    let b = (deficiency(g, v, u), g.degree(u));
    if frac_cmp(a, b) == Ordering::Greater {
        b
    } else {
        a
    }
}

fn frac_cmp(a: (usize, usize), b: (usize, usize)) -> Ordering {
    (a.0 * b.1).cmp(&(b.0 * a.1))
}

/// Edges by non-decreasing value; edges whose contraction is known to keep
/// the width (value 0) come first. Ties keep canonical edge order.
pub fn order_edges(g: &Graph) -> Vec<Edge> {
    let mut keyed: Vec<(Edge, (usize, usize))> = g
        .edges()
        .into_iter()
        .map(|(u, v)| ((u, v), edge_value(g, u, v)))
        .collect();
    keyed.sort_by(|x, y| frac_cmp(x.1, y.1).then(x.0.cmp(&y.0)));
    keyed.into_iter().map(|(e, _)| e).collect()
}

/// As [`order_edges`], with runs of equal value shuffled when a seed is given.
pub fn order_edges_seeded(g: &Graph, seed: Option<u64>) -> Vec<Edge> {
    let mut order = order_edges(g);
    let Some(seed) = seed else { return order };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut i = 0;
    while i < order.len() {
        let v = edge_value(g, order[i].0, order[i].1);
        let mut j = i + 1;
        while j < order.len()
            && frac_cmp(edge_value(g, order[j].0, order[j].1), v) == Ordering::Equal
        {
            j += 1;
        }
        order[i..j].shuffle(&mut rng);
        i = j;
    }
    order
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &e).unwrap()
    }

    #[test]
    fn seeded_order_only_permutes_ties() {
        let g = petersen();
        let base = order_edges(&g);
        let a = order_edges_seeded(&g, Some(3));
        assert_eq!(order_edges_seeded(&g, None), base);
        assert_eq!(a, order_edges_seeded(&g, Some(3)));
        let mut x = a.clone();
        x.sort();
        let mut y = base.clone();
        y.sort();
        assert_eq!(x, y);
        for (e, f) in a.iter().zip(&base) {
            assert_eq!(edge_value(&g, e.0, e.1), edge_value(&g, f.0, f.1));
        }
    }

    #[test]
    fn cycle_and_complete_are_zero() {
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        for (u, v) in c4.edges() {
            assert_eq!(edge_value(&c4, u, v).0, 0);
        }
        let k4 = Graph::complete(4);
        for (u, v) in k4.edges() {
            assert_eq!(edge_value(&k4, u, v).0, 0);
        }
        assert_eq!(order_edges(&k4), k4.edges());
    }

    #[test]
    fn petersen_value() {
        let p = petersen();
        for (u, v) in p.edges() {
            assert_eq!(deficiency(&p, u, v), 1);
            assert_eq!(edge_value(&p, u, v), (1, 3));
        }
    }

    #[test]
    fn zero_edges_first() {
        // pendant edge (3,4) has value 0; triangle-free square edges do not
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (0, 2), (1, 4)])
            .unwrap();
        let order = order_edges(&g);
        let vals: Vec<_> = order.iter().map(|&(u, v)| edge_value(&g, u, v)).collect();
        for w in vals.windows(2) {
            assert_ne!(frac_cmp(w[0], w[1]), Ordering::Greater);
        }
    }
}
