//! Simple undirected graphs over dense vertex ids `0..n`, plus contractors.
//!
//! Vertex ids are zero-based in memory; the text formats in [`crate::io`]
//! shift them to the one-based PACE convention.

use crate::bitset::VertexSet;
use crate::error::GraphError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<VertexSet>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// Canonical edge: `(u, v)` with `u < v`.
pub type Edge = (usize, usize);

pub fn canonical_edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            m: 0,
            adj: vec![VertexSet::new(n); n],
        }
    }

    /// Builds a simple graph, rejecting loops, repeated edges and bad ids.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::UnknownVertex(u));
            }
            if v >= n {
                return Err(GraphError::UnknownVertex(v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if g.adjacent(u, v) {
                let (a, b) = canonical_edge(u, v);
                return Err(GraphError::DuplicateEdge(a, b));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Adds `{u, v}` if absent. Panics on a self-loop.
    pub(crate) fn add_edge(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "self-loop");
        if self.adj[u].insert(v) {
            self.adj[v].insert(u);
            self.m += 1;
        }
    }

    /// Turns `set` into a clique.
    pub fn fill_clique(&mut self, set: &VertexSet) {
        let vs = set.to_vec();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                self.add_edge(u, v);
            }
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if self.adj[u].remove(v) {
            self.adj[v].remove(u);
            self.m -= 1;
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        g.fill_clique(&VertexSet::full(n));
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::new(self.n)
    }

    /// Edges in canonical lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for v in self.adj[u].iter().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    /// Builds a set over this graph's universe, validating ids.
    pub fn set_of(&self, vs: &[usize]) -> Result<VertexSet, GraphError> {
        let mut s = self.empty_set();
        for &v in vs {
            if v >= self.n {
                return Err(GraphError::UnknownVertex(v));
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn check_set(&self, u: &VertexSet) -> Result<(), GraphError> {
        if u.word_len() != self.n.div_ceil(64) {
            return Err(GraphError::UniverseMismatch {
                expected: self.n,
                actual: u.capacity(),
            });
        }
        match u.last() {
            Some(v) if v >= self.n => Err(GraphError::UnknownVertex(v)),
            _ => Ok(()),
        }
    }

    /// Open neighborhood `N(U)`.
    pub fn neighborhood(&self, u: &VertexSet) -> VertexSet {
        let mut out = self.empty_set();
        for v in u {
            out.union_with(&self.adj[v]);
        }
        out.difference_with(u);
        out
    }

    /// Closed neighborhood `N[U]`.
    pub fn closed_neighborhood(&self, u: &VertexSet) -> VertexSet {
        let mut out = u.clone();
        for v in u {
            out.union_with(&self.adj[v]);
        }
        out
    }

    /// The component of `G[within]` containing `start`.
    pub fn component_of(&self, start: usize, within: &VertexSet) -> VertexSet {
        let mut comp = VertexSet::singleton(self.n, start);
        let mut frontier = comp.clone();
        loop {
            let mut next = self.empty_set();
            for v in &frontier {
                next.union_with(&self.adj[v]);
            }
            next.intersect_with(within);
            next.difference_with(&comp);
            if next.is_empty() {
                return comp;
            }
            comp.union_with(&next);
            frontier = next;
        }
    }

    /// Connected components of `G[u]`, ordered by smallest member.
    pub fn components(&self, u: &VertexSet) -> Vec<VertexSet> {
        let mut rest = u.clone();
        let mut out = Vec::new();
        while let Some(v) = rest.first() {
            let c = self.component_of(v, &rest);
            rest.difference_with(&c);
            out.push(c);
        }
        out
    }

    /// Components of `G \ s`.
    pub fn components_without(&self, s: &VertexSet) -> Vec<VertexSet> {
        self.components(&self.vertices().difference(s))
    }

    /// Components `C` of `G \ s` with `N(C) = s`.
    pub fn full_components(&self, s: &VertexSet) -> Vec<VertexSet> {
        self.components_without(s)
            .into_iter()
            .filter(|c| &self.neighborhood(c) == s)
            .collect()
    }

    pub fn is_connected_set(&self, u: &VertexSet) -> bool {
        match u.first() {
            None => true,
            Some(v) => &self.component_of(v, u) == u,
        }
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_set(&self.vertices())
    }

    pub fn is_clique(&self, u: &VertexSet) -> bool {
        u.iter().all(|v| {
            let mut rest = u.without(v);
            rest.difference_with(&self.adj[v]);
            rest.is_empty()
        })
    }

    /// Number of non-adjacent pairs inside `u`.
    pub fn missing_pairs(&self, u: &VertexSet) -> usize {
        let k = u.len();
        let inside: usize = u.iter().map(|v| self.adj[v].intersection_len(u)).sum();
        k * k.saturating_sub(1) / 2 - inside / 2
    }

    /// `G[u]` renumbered to `0..|u|`, with the map from new to old ids.
    pub fn induced(&self, u: &VertexSet) -> (Graph, Vec<usize>) {
        let old: Vec<usize> = u.to_vec();
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &v) in old.iter().enumerate() {
            new_id[v] = i;
        }
        let mut g = Graph::new(old.len());
        for (i, &v) in old.iter().enumerate() {
            for w in self.adj[v].iter() {
                let j = new_id[w];
                if j != usize::MAX && j > i {
                    g.add_edge(i, j);
                }
            }
        }
        (g, old)
    }

    /// `G` with every set in `cliques` filled.
    pub fn with_cliques<'a>(&self, cliques: impl IntoIterator<Item = &'a VertexSet>) -> Graph {
        let mut g = self.clone();
        for c in cliques {
            g.fill_clique(c);
        }
        g
    }

    /// `G / gamma`, on vertex ids `0..gamma.len()`.
    pub fn contract(&self, gamma: &Contractor) -> Result<Graph, GraphError> {
        if gamma.source_len() != self.n {
            return Err(GraphError::UniverseMismatch {
                expected: self.n,
                actual: gamma.source_len(),
            });
        }
        for (i, p) in gamma.parts.iter().enumerate() {
            if !self.is_connected_set(p) {
                return Err(GraphError::InvalidContractor(format!(
                    "part {i} {p:?} is not connected"
                )));
            }
        }
        Ok(self.contract_unchecked(gamma))
    }

    pub(crate) fn contract_unchecked(&self, gamma: &Contractor) -> Graph {
        let mut h = Graph::new(gamma.len());
        for (u, v) in self.edges() {
            let (a, b) = (gamma.map[u], gamma.map[v]);
            if a != b {
                h.add_edge(a, b);
            }
        }
        h
    }

    /// `G / e` together with the contractor merging the ends of `e`.
    pub fn contract_edge(&self, u: usize, v: usize) -> Result<(Graph, Contractor), GraphError> {
        if u >= self.n {
            return Err(GraphError::UnknownVertex(u));
        }
        if v >= self.n {
            return Err(GraphError::UnknownVertex(v));
        }
        if !self.adjacent(u, v) {
            return Err(GraphError::NotAnEdge(u, v));
        }
        let gamma = Contractor::merge_pair(self.n, u, v);
        let h = self.contract_unchecked(&gamma);
        Ok((h, gamma))
    }

    /// Exact equality of vertex count and adjacency.
    pub fn same_as(&self, other: &Graph) -> bool {
        self == other
    }
}

/// A partition of `V(G)` into connected parts; part `i` becomes vertex `i`
/// of the contracted graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Contractor {
    map: Vec<usize>,
    parts: Vec<VertexSet>,
}

impl std::fmt::Debug for Contractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.parts.iter()).finish()
    }
}

impl Contractor {
    pub fn identity(n: usize) -> Self {
        Contractor {
            map: (0..n).collect(),
            parts: (0..n).map(|v| VertexSet::singleton(n, v)).collect(),
        }
    }

    /// Validates `parts` against `g`: nonempty, disjoint, covering, connected.
    pub fn from_parts(g: &Graph, parts: Vec<VertexSet>) -> Result<Self, GraphError> {
        let n = g.n();
        let mut map = vec![usize::MAX; n];
        for (i, p) in parts.iter().enumerate() {
            g.check_set(p)?;
            if p.is_empty() {
                return Err(GraphError::InvalidContractor(format!("part {i} is empty")));
            }
            for v in p {
                if map[v] != usize::MAX {
                    return Err(GraphError::InvalidContractor(format!(
                        "vertex {v} lies in parts {} and {i}",
                        map[v]
                    )));
                }
                map[v] = i;
            }
            if !g.is_connected_set(p) {
                return Err(GraphError::InvalidContractor(format!(
                    "part {i} {p:?} is not connected"
                )));
            }
        }
        if let Some(v) = map.iter().position(|&x| x == usize::MAX) {
            return Err(GraphError::InvalidContractor(format!(
                "vertex {v} is not covered"
            )));
        }
        Ok(Contractor { map, parts })
    }

    /// Parts given as a vertex map, no connectivity check.
    pub(crate) fn from_map_unchecked(map: Vec<usize>, parts_len: usize) -> Self {
        let n = map.len();
        let mut parts = vec![VertexSet::new(n); parts_len];
        for (v, &p) in map.iter().enumerate() {
            parts[p].insert(v);
        }
        Contractor { map, parts }
    }

    /// Merges `u` and `v`; parts are numbered by their smallest member.
    pub(crate) fn merge_pair(n: usize, u: usize, v: usize) -> Self {
        let (a, b) = canonical_edge(u, v);
        let map: Vec<usize> = (0..n)
            .map(|x| match x.cmp(&b) {
                std::cmp::Ordering::Less => x,
                std::cmp::Ordering::Equal => a,
                std::cmp::Ordering::Greater => x - 1,
            })
            .collect();
        Contractor::from_map_unchecked(map, n - 1)
    }

    /// Number of parts, i.e. vertices of the contracted graph.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of vertices of the source graph.
    pub fn source_len(&self) -> usize {
        self.map.len()
    }

    /// `gamma(v)`.
    pub fn map(&self, v: usize) -> usize {
        self.map[v]
    }

    /// `gamma^-1(w)`.
    pub fn part(&self, w: usize) -> &VertexSet {
        &self.parts[w]
    }

    pub fn parts(&self) -> &[VertexSet] {
        &self.parts
    }

    /// `gamma(U)` over the contracted universe.
    pub fn image(&self, u: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.len());
        for v in u {
            out.insert(self.map[v]);
        }
        out
    }

    /// `gamma^-1(U)` over the source universe.
    pub fn preimage(&self, u: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.source_len());
        for w in u {
            out.union_with(&self.parts[w]);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.len() == self.source_len()
    }

    /// The contractor of `G` equal to contracting by `self` and then by
    /// `inner`, a contractor of `G / self`.
    pub fn compose(&self, inner: &Contractor) -> Result<Contractor, GraphError> {
        if inner.source_len() != self.len() {
            return Err(GraphError::UniverseMismatch {
                expected: self.len(),
                actual: inner.source_len(),
            });
        }
        let map = self.map.iter().map(|&x| inner.map[x]).collect();
        Ok(Contractor::from_map_unchecked(map, inner.len()))
    }

    /// Given `coarse`, a contractor of the same source whose every part is a
    /// union of parts of `self`, returns the contractor `delta` of the graph
    /// `G / self` with `self.compose(delta) == coarse`.
    pub fn quotient(&self, coarse: &Contractor) -> Option<Contractor> {
        if coarse.source_len() != self.source_len() {
            return None;
        }
        let mut map = vec![usize::MAX; self.len()];
        for v in 0..self.source_len() {
            let (f, c) = (self.map[v], coarse.map[v]);
            if map[f] == usize::MAX {
                map[f] = c;
            } else if map[f] != c {
                return None;
            }
        }
        Some(Contractor::from_map_unchecked(map, coarse.len()))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn set(g: &Graph, vs: &[usize]) -> VertexSet {
        g.set_of(vs).unwrap()
    }

    #[test]
    fn neighborhood_examples() {
        let c4 = cycle(4);
        assert_eq!(c4.neighborhood(&set(&c4, &[0])), set(&c4, &[1, 3]));
        let k4 = Graph::complete(4);
        assert_eq!(k4.neighborhood(&set(&k4, &[0, 1])), set(&k4, &[2, 3]));
        let p3 = path(3);
        assert_eq!(p3.neighborhood(&set(&p3, &[0, 2])), set(&p3, &[1]));
    }

    #[test]
    fn unknown_vertex_is_rejected() {
        let p3 = path(3);
        assert_eq!(p3.set_of(&[3]), Err(GraphError::UnknownVertex(3)));
        assert_eq!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(GraphError::UnknownVertex(2))
        );
    }

    #[test]
    fn components_examples() {
        let c4 = cycle(4);
        assert_eq!(
            c4.components(&set(&c4, &[1, 3])),
            vec![set(&c4, &[1]), set(&c4, &[3])]
        );
        let k4 = Graph::complete(4);
        assert_eq!(
            k4.components(&set(&k4, &[1, 2, 3])),
            vec![set(&k4, &[1, 2, 3])]
        );
        let p5 = path(5);
        assert_eq!(
            p5.components(&set(&p5, &[0, 1, 3, 4])),
            vec![set(&p5, &[0, 1]), set(&p5, &[3, 4])]
        );
    }

    #[test]
    fn contract_examples() {
        let c4 = cycle(4);
        let gamma =
            Contractor::from_parts(&c4, vec![set(&c4, &[0, 1]), set(&c4, &[2]), set(&c4, &[3])])
                .unwrap();
        assert_eq!(c4.contract(&gamma).unwrap(), Graph::complete(3));
        let k4 = Graph::complete(4);
        let gamma =
            Contractor::from_parts(&k4, vec![set(&k4, &[0, 1]), set(&k4, &[2]), set(&k4, &[3])])
                .unwrap();
        assert_eq!(k4.contract(&gamma).unwrap(), Graph::complete(3));
        assert_eq!(c4.contract(&Contractor::identity(4)).unwrap(), c4);
    }

    #[test]
    fn disconnected_part_is_rejected() {
        let c4 = cycle(4);
        let err =
            Contractor::from_parts(&c4, vec![set(&c4, &[0, 2]), set(&c4, &[1]), set(&c4, &[3])]);
        assert!(matches!(err, Err(GraphError::InvalidContractor(_))));
        let sneaky = Contractor::from_map_unchecked(vec![0, 1, 0, 2], 3);
        assert!(matches!(
            c4.contract(&sneaky),
            Err(GraphError::InvalidContractor(_))
        ));
    }

    #[test]
    fn contract_edge_examples() {
        let (h, gamma) = path(3).contract_edge(0, 1).unwrap();
        assert_eq!(h, path(2));
        assert_eq!(gamma.part(0).to_vec(), vec![0, 1]);
        let (h, _) = cycle(4).contract_edge(0, 1).unwrap();
        assert_eq!(h, Graph::complete(3));
        let c5 = cycle(5);
        for (u, v) in c5.edges() {
            let (h, _) = c5.contract_edge(u, v).unwrap();
            assert_eq!(h.n(), 4);
            assert_eq!(h.m(), 4);
            assert!((0..4).all(|x| h.degree(x) == 2));
        }
        assert_eq!(c5.contract_edge(0, 2), Err(GraphError::NotAnEdge(0, 2)));
    }

    #[test]
    fn compose_examples() {
        let c5 = cycle(5);
        let gamma = Contractor::merge_pair(5, 0, 1);
        let id = Contractor::identity(5);
        assert_eq!(id.compose(&gamma).unwrap(), gamma);

        // merge {0,1}, then the image of {0,1} (vertex 0) with 2 (now vertex 1)
        let (h, outer) = c5.contract_edge(0, 1).unwrap();
        let (_, inner) = h.contract_edge(0, 1).unwrap();
        let both = outer.compose(&inner).unwrap();
        assert_eq!(both.part(0).to_vec(), vec![0, 1, 2]);
        assert_eq!(c5.contract(&both).unwrap(), cycle(3));

        let k4 = Graph::complete(4);
        let (h, a) = k4.contract_edge(0, 1).unwrap();
        let (_, b) = h.contract_edge(0, 1).unwrap();
        let ab = a.compose(&b).unwrap();
        let mut sizes: Vec<usize> = ab.parts().iter().map(|p| p.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3]);

        assert!(matches!(
            a.compose(&Contractor::identity(4)),
            Err(GraphError::UniverseMismatch { .. })
        ));
    }

    #[test]
    fn is_clique_examples() {
        let k4 = Graph::complete(4);
        assert!(k4.is_clique(&set(&k4, &[0, 1, 2])));
        let c4 = cycle(4);
        assert!(!c4.is_clique(&set(&c4, &[0, 1, 2])));
        assert!(c4.is_clique(&c4.empty_set()));
        assert!(c4.is_clique(&set(&c4, &[2])));
    }

    #[test]
    fn quotient_recovers_inner() {
        let c5 = cycle(5);
        let (h, outer) = c5.contract_edge(1, 2).unwrap();
        let (_, inner) = h.contract_edge(1, 2).unwrap();
        let both = outer.compose(&inner).unwrap();
        assert_eq!(outer.quotient(&both).unwrap(), inner);
        assert!(both.quotient(&outer).is_none());
    }
}
