//! Minimal separators, potential maximal cliques, blocks and the weighted
//! Bouchitté–Todinca dynamic programme over an arbitrary PMC family.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::rc::Rc;

use crate::bitset::VertexSet;
use crate::decomposition::TreeDecomposition;
use crate::error::PmcError;
use crate::graph::Graph;

/// An integer weight or infinity. `Infinite` compares above every finite
/// value and is never used in arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Width {
    Finite(i64),
    Infinite,
}

impl Width {
    pub fn finite(self) -> Option<i64> {
        match self {
            Width::Finite(x) => Some(x),
            Width::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Width::Finite(_))
    }

    pub fn at_most(self, k: i64) -> bool {
        matches!(self, Width::Finite(x) if x <= k)
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Width::Finite(x) => write!(f, "{x}"),
            Width::Infinite => write!(f, "inf"),
        }
    }
}

/// A deduplicated family of vertex sets, kept sorted.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct PmcSet {
    sets: Vec<VertexSet>,
}

impl fmt::Debug for PmcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sets.iter()).finish()
    }
}

impl PmcSet {
    pub fn new() -> Self {
        PmcSet::default()
    }

    /// Builds the family without testing membership.
    pub fn from_sets(sets: impl IntoIterator<Item = VertexSet>) -> Self {
        let mut sets: Vec<VertexSet> = sets.into_iter().collect();
        sets.sort();
        sets.dedup();
        PmcSet { sets }
    }

    /// Builds the family, rejecting any member that is not a PMC of `g`.
    pub fn checked(g: &Graph, sets: impl IntoIterator<Item = VertexSet>) -> Result<Self, PmcError> {
        let out = PmcSet::from_sets(sets);
        for s in &out.sets {
            g.check_set(s)?;
            if !is_pmc(g, s) {
                return Err(PmcError::NotPmc(s.to_vec()));
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VertexSet> {
        self.sets.iter()
    }

    pub fn as_slice(&self) -> &[VertexSet] {
        &self.sets
    }

    pub fn contains(&self, s: &VertexSet) -> bool {
        self.sets.binary_search(s).is_ok()
    }

    pub fn insert(&mut self, s: VertexSet) -> bool {
        match self.sets.binary_search(&s) {
            Ok(_) => false,
            Err(i) => {
                self.sets.insert(i, s);
                true
            }
        }
    }

    /// Adds every member of `other`; returns how many were new.
    pub fn extend(&mut self, other: &PmcSet) -> usize {
        let before = self.sets.len();
        self.sets.extend(other.sets.iter().cloned());
        self.sets.sort();
        self.sets.dedup();
        self.sets.len() - before
    }

    pub fn union(&self, other: &PmcSet) -> PmcSet {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&VertexSet) -> bool) -> PmcSet {
        PmcSet {
            sets: self.sets.iter().filter(|s| keep(s)).cloned().collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&VertexSet) -> VertexSet) -> PmcSet {
        PmcSet::from_sets(self.sets.iter().map(f))
    }
}

impl<'a> IntoIterator for &'a PmcSet {
    type Item = &'a VertexSet;
    type IntoIter = std::slice::Iter<'a, VertexSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.sets.iter()
    }
}

/// A connected vertex set whose neighbourhood is a minimal separator, or
/// the whole vertex set with empty separator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub component: VertexSet,
    pub separator: VertexSet,
}

impl Block {
    pub fn new(g: &Graph, component: VertexSet) -> Self {
        let separator = g.neighborhood(&component);
        Block {
            component,
            separator,
        }
    }

    pub fn whole(g: &Graph) -> Self {
        Block {
            component: g.vertices(),
            separator: g.empty_set(),
        }
    }

    /// Checks connectivity and the separator condition.
    pub fn is_block(&self, g: &Graph) -> bool {
        if self.component.is_empty() || !g.is_connected_set(&self.component) {
            return false;
        }
        if g.neighborhood(&self.component) != self.separator {
            return false;
        }
        if self.separator.is_empty() {
            self.component == g.vertices()
        } else {
            is_minimal_separator(g, &self.separator)
        }
    }

    /// `B ∪ N(B)`.
    pub fn closure(&self) -> VertexSet {
        self.component.union(&self.separator)
    }
}

pub fn is_minimal_separator(g: &Graph, s: &VertexSet) -> bool {
    if s.is_empty() || s.len() >= g.n() {
        return false;
    }
    g.full_components(s).len() >= 2
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorEnumeration {
    pub separators: Vec<VertexSet>,
    pub truncated: bool,
}

pub const DEFAULT_SEPARATOR_CAP: usize = 2_000_000;

/// All minimal separators, by closing the seeds `N(C)` for components `C`
/// of `G \ N[v]` under `S -> N(C)` for components `C` of `G \ (S ∪ N(x))`.
pub fn minimal_separators(g: &Graph, cap: Option<usize>) -> SeparatorEnumeration {
    let cap = cap.unwrap_or(DEFAULT_SEPARATOR_CAP);
    let mut seen: HashSet<VertexSet> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut truncated = false;
    let push = |s: VertexSet, seen: &mut HashSet<VertexSet>, queue: &mut VecDeque<VertexSet>| {
        if s.is_empty() || seen.contains(&s) {
            return true;
        }
        if seen.len() >= cap {
            return false;
        }
        seen.insert(s.clone());
        queue.push_back(s);
        true
    };
    'seed: for v in 0..g.n() {
        let closed = g.closed_neighborhood(&VertexSet::singleton(g.n(), v));
        for c in g.components_without(&closed) {
            if !push(g.neighborhood(&c), &mut seen, &mut queue) {
                truncated = true;
                break 'seed;
            }
        }
    }
    'grow: while let Some(s) = queue.pop_front() {
        for x in s.iter() {
            let removed = s.union(g.neighbors(x));
            for c in g.components_without(&removed) {
                if !push(g.neighborhood(&c), &mut seen, &mut queue) {
                    truncated = true;
                    break 'grow;
                }
            }
        }
    }
    let mut separators: Vec<VertexSet> = seen.into_iter().collect();
    separators.sort();
    SeparatorEnumeration {
        separators,
        truncated,
    }
}

/// Local PMC test: no full component, and every non-adjacent pair of `x`
/// is jointly seen by some component of `G \ x`.
pub fn is_pmc(g: &Graph, x: &VertexSet) -> bool {
    if x.is_empty() {
        return false;
    }
    let comps = g.components_without(x);
    let seps: Vec<VertexSet> = comps.iter().map(|c| g.neighborhood(c)).collect();
    if seps.iter().any(|s| s == x) {
        return false;
    }
    for u in x.iter() {
        let mut reach = g.neighbors(u).intersection(x);
        reach.insert(u);
        for s in &seps {
            if s.contains(u) {
                reach.union_with(s);
            }
        }
        if reach != *x {
            return false;
        }
    }
    true
}

pub const ALL_PMCS_MAX_N: usize = 20;

/// Exact `Π(G)` by testing every vertex subset. Refuses large graphs.
pub fn all_pmcs(g: &Graph) -> Result<PmcSet, PmcError> {
    let n = g.n();
    if n > ALL_PMCS_MAX_N {
        return Err(PmcError::TooLarge {
            n,
            cap: ALL_PMCS_MAX_N,
        });
    }
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let mut s = VertexSet::new(n);
        for v in 0..n {
            if mask >> v & 1 == 1 {
                s.insert(v);
            }
        }
        if is_pmc(g, &s) {
            out.push(s);
        }
    }
    Ok(PmcSet::from_sets(out))
}

/// Members `X` of `pi` with `N(B) ⊆ X ⊆ B ∪ N(B)`, excluding `N(B)` itself.
pub fn caps(pi: &PmcSet, b: &Block) -> Vec<VertexSet> {
    let closure = b.closure();
    pi.iter()
        .filter(|x| b.separator.is_subset(x) && x.is_subset(&closure) && **x != b.separator)
        .cloned()
        .collect()
}

/// Weight of a bag in the generalised recurrence.
pub trait BagWeight {
    fn weight(&self, bag: &VertexSet) -> i64;
}

/// `|X| - 1`, the ordinary width.
#[derive(Clone, Copy, Debug, Default)]
pub struct CardinalityWeight;

impl BagWeight for CardinalityWeight {
    fn weight(&self, bag: &VertexSet) -> i64 {
        bag.len() as i64 - 1
    }
}

impl<F: Fn(&VertexSet) -> i64> BagWeight for F {
    fn weight(&self, bag: &VertexSet) -> i64 {
        self(bag)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BtOptions {
    /// How many distinct optimal decompositions to trace back.
    pub max_solutions: usize,
    /// Caps heavier than this are ignored.
    pub max_weight: Option<i64>,
}

pub const DEFAULT_MAX_SOLUTIONS: usize = 16;

impl Default for BtOptions {
    fn default() -> Self {
        BtOptions {
            max_solutions: DEFAULT_MAX_SOLUTIONS,
            max_weight: None,
        }
    }
}

impl BtOptions {
    pub fn single() -> Self {
        BtOptions {
            max_solutions: 1,
            max_weight: None,
        }
    }

    pub fn with_solutions(max_solutions: usize) -> Self {
        BtOptions {
            max_solutions,
            max_weight: None,
        }
    }

    pub fn bounded(mut self, max_weight: i64) -> Self {
        self.max_weight = Some(max_weight);
        self
    }
}

struct CapEdge {
    pmc: usize,
    children: Vec<usize>,
}

struct Tables {
    pmcs: Vec<VertexSet>,
    weights: Vec<i64>,
    blocks: Vec<VertexSet>,
    index: HashMap<VertexSet, usize>,
    caps: Vec<Vec<CapEdge>>,
    values: Vec<Width>,
    root: usize,
}

impl Tables {
    fn block_id(&mut self, comp: VertexSet) -> usize {
        if let Some(&i) = self.index.get(&comp) {
            return i;
        }
        let i = self.blocks.len();
        self.index.insert(comp.clone(), i);
        self.blocks.push(comp);
        self.caps.push(Vec::new());
        i
    }

    fn build(g: &Graph, pi: &PmcSet, w: &dyn BagWeight, opts: &BtOptions) -> Tables {
        let mut t = Tables {
            pmcs: Vec::new(),
            weights: Vec::new(),
            blocks: Vec::new(),
            index: HashMap::new(),
            caps: Vec::new(),
            values: Vec::new(),
            root: 0,
        };
        t.root = t.block_id(g.vertices());
        for x in pi.iter() {
            let wx = w.weight(x);
            if opts.max_weight.is_some_and(|m| wx > m) {
                continue;
            }
            let p = t.pmcs.len();
            t.pmcs.push(x.clone());
            t.weights.push(wx);
            let comps = g.components_without(x);
            let ids: Vec<usize> = comps.iter().map(|c| t.block_id(c.clone())).collect();
            let root = t.root;
            t.caps[root].push(CapEdge {
                pmc: p,
                children: ids.clone(),
            });
            for (ci, c) in comps.iter().enumerate() {
                let sep = g.neighborhood(c);
                let rest = x.difference(&sep);
                let Some(r) = rest.first() else { continue };
                let outside = g.vertices().difference(&sep);
                let b = g.component_of(r, &outside);
                if !rest.is_subset(&b) || g.neighborhood(&b) != sep {
                    continue;
                }
                let children: Vec<usize> = comps
                    .iter()
                    .enumerate()
                    .filter(|&(di, d)| di != ci && d.is_subset(&b))
                    .map(|(di, _)| ids[di])
                    .collect();
                let bid = t.block_id(b);
                t.caps[bid].push(CapEdge { pmc: p, children });
            }
        }
        let mut order: Vec<usize> = (0..t.blocks.len()).collect();
        order.sort_by_key(|&i| t.blocks[i].len());
        t.values = vec![Width::Infinite; t.blocks.len()];
        for &b in &order {
            let mut best = Width::Infinite;
            for cap in &t.caps[b] {
                let mut v = Width::Finite(t.weights[cap.pmc]);
                for &c in &cap.children {
                    v = v.max(t.values[c]);
                }
                best = best.min(v);
            }
            t.values[b] = best;
        }
        t
    }

    fn cap_ok(&self, cap: &CapEdge, target: i64) -> bool {
        self.weights[cap.pmc] <= target
            && cap.children.iter().all(|&c| self.values[c].at_most(target))
    }

    fn reachable(&self, target: i64) -> Vec<bool> {
        let mut used = vec![false; self.pmcs.len()];
        if !self.values[self.root].at_most(target) {
            return used;
        }
        let mut seen = vec![false; self.blocks.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(b) = stack.pop() {
            for cap in &self.caps[b] {
                if self.cap_ok(cap, target) {
                    used[cap.pmc] = true;
                    for &c in &cap.children {
                        if !seen[c] {
                            seen[c] = true;
                            stack.push(c);
                        }
                    }
                }
            }
        }
        used
    }

    fn solutions(
        &self,
        b: usize,
        target: i64,
        limit: usize,
        memo: &mut HashMap<usize, Rc<Vec<Partial>>>,
    ) -> Rc<Vec<Partial>> {
        if let Some(r) = memo.get(&b) {
            return r.clone();
        }
        let mut good: Vec<&CapEdge> = self.caps[b]
            .iter()
            .filter(|c| self.cap_ok(c, target))
            .collect();
        good.sort_by_key(|c| (self.weights[c.pmc], c.pmc));
        let mut out: Vec<Partial> = Vec::new();
        for cap in good {
            if out.len() >= limit {
                break;
            }
            let mut acc = vec![Partial {
                nodes: vec![cap.pmc],
                edges: Vec::new(),
            }];
            for &c in &cap.children {
                let subs = self.solutions(c, target, limit, memo);
                let mut next = Vec::new();
                'prod: for a in &acc {
                    for s in subs.iter() {
                        let mut m = a.clone();
                        let off = m.nodes.len();
                        m.nodes.extend(s.nodes.iter().copied());
                        m.edges
                            .extend(s.edges.iter().map(|&(x, y)| (x + off, y + off)));
                        m.edges.push((0, off));
                        next.push(m);
                        if next.len() >= limit {
                            break 'prod;
                        }
                    }
                }
                acc = next;
            }
            out.extend(acc);
        }
        out.truncate(limit);
        let r = Rc::new(out);
        memo.insert(b, r.clone());
        r
    }
}

#[derive(Clone)]
struct Partial {
    nodes: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

/// Outcome of the dynamic programme.
pub struct BtResult {
    pub value: Width,
    /// Distinct decompositions of weighted width exactly `value`, fewest
    /// maximum-weight even bags first.
    pub decompositions: Vec<TreeDecomposition>,
    tables: Tables,
}

impl fmt::Debug for BtResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BtResult")
            .field("value", &self.value)
            .field("decompositions", &self.decompositions.len())
            .field("blocks", &self.tables.blocks.len())
            .finish()
    }
}

impl BtResult {
    /// Best weight of a partial decomposition of the block with this
    /// component; `None` if the block was never reached.
    pub fn block_value(&self, component: &VertexSet) -> Option<Width> {
        self.tables
            .index
            .get(component)
            .map(|&i| self.tables.values[i])
    }

    /// All blocks reached by the programme with their values.
    pub fn block_values(&self) -> impl Iterator<Item = (&VertexSet, Width)> {
        self.tables
            .blocks
            .iter()
            .zip(self.tables.values.iter().copied())
    }

    /// Caps that occur in some decomposition of weighted width at most
    /// `target`.
    pub fn useful(&self, target: i64) -> PmcSet {
        let used = self.tables.reachable(target);
        PmcSet::from_sets(
            self.tables
                .pmcs
                .iter()
                .zip(used)
                .filter(|(_, u)| *u)
                .map(|(x, _)| x.clone()),
        )
    }
}

/// Evaluates the block recurrence bottom-up, with `|X| - 1` generalised to
/// `w(X)`, and traces back up to `opts.max_solutions` optimal
/// decompositions. `g` must be connected.
pub fn bt_dp(g: &Graph, pi: &PmcSet, w: &dyn BagWeight, opts: BtOptions) -> BtResult {
    let tables = Tables::build(g, pi, w, &opts);
    let value = tables.values[tables.root];
    let mut decompositions = Vec::new();
    if let Width::Finite(target) = value {
        let mut memo = HashMap::new();
        let limit = opts.max_solutions.max(1);
        let sols = tables.solutions(tables.root, target, limit, &mut memo);
        let mut seen = HashSet::new();
        let mut ranked = Vec::new();
        for s in sols.iter() {
            let mut key: Vec<usize> = s.nodes.clone();
            key.sort_unstable();
            if !seen.insert(key) {
                continue;
            }
            let even_max = s
                .nodes
                .iter()
                .filter(|&&p| tables.weights[p] == target && target % 2 == 0)
                .count();
            let bags = s.nodes.iter().map(|&p| tables.pmcs[p].clone()).collect();
            let td =
                TreeDecomposition::new(bags, s.edges.clone()).expect("traceback builds a tree");
            ranked.push((even_max, td));
        }
        ranked.sort_by_key(|(e, _)| *e);
        decompositions = ranked.into_iter().map(|(_, t)| t).collect();
    }
    BtResult {
        value,
        decompositions,
        tables,
    }
}

/// `tw_Π(G)` under the cardinality weight.
pub fn tw_pi(g: &Graph, pi: &PmcSet) -> Width {
    bt_dp(g, pi, &CardinalityWeight, BtOptions::single()).value
}
