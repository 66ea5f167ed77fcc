//! Heuristic positive-instance-driven search for a fixed graph and target
//! width `k`.
//!
//! The state keeps the small feasible blocks found so far together with
//! the PMC family `Π(s)` from which their partial decompositions can be
//! rebuilt by the block recurrence.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::time::Instant;

use crate::bitset::VertexSet;
use crate::error::SolveError;
use crate::graph::Graph;
use crate::pmc::{
    bt_dp, is_minimal_separator, is_pmc, Block, BtOptions, CardinalityWeight, PmcSet, Width,
};

const DEADLINE_STRIDE: u64 = 256;

/// A block is small when another full component of its separator is
/// larger in size-then-lexicographic order.
pub fn is_small(g: &Graph, b: &Block) -> bool {
    if b.separator.is_empty() {
        return false;
    }
    g.full_components(&b.separator)
        .iter()
        .any(|c| *c != b.component && c.cmp_size_lex(&b.component) == Ordering::Greater)
}

enum Stop {
    Budget,
    Timeout,
}

struct Entry {
    block: usize,
    key: VertexSet,
    largest_first: bool,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        let o = self.key.cmp_size_lex(&other.key);
        if self.largest_first {
            o
        } else {
            o.reverse()
        }
    }
}

pub struct HpidState {
    g: Graph,
    k: usize,
    pi: PmcSet,
    feasible: Vec<Block>,
    known: HashSet<VertexSet>,
    whole_feasible: bool,
    width: Width,
    steps: u64,
    deadline: Option<Instant>,
}

impl HpidState {
    pub fn new(g: &Graph, k: usize) -> Self {
        HpidState {
            g: g.clone(),
            k,
            pi: PmcSet::new(),
            feasible: Vec::new(),
            known: HashSet::new(),
            whole_feasible: false,
            width: Width::Infinite,
            steps: 0,
            deadline: None,
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.g
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `tw_{Π(s)}(G)`.
    pub fn width(&self) -> Width {
        self.width
    }

    pub fn pmcs(&self) -> &PmcSet {
        &self.pi
    }

    pub fn feasible_blocks(&self) -> &[Block] {
        &self.feasible
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn refresh(&mut self) {
        self.width = if self.pi.is_empty() {
            Width::Infinite
        } else {
            bt_dp(&self.g, &self.pi, &CardinalityWeight, BtOptions::single()).value
        };
    }

    fn add_block(&mut self, b: Block) -> Option<usize> {
        if self.known.contains(&b.component) {
            return None;
        }
        self.known.insert(b.component.clone());
        self.feasible.push(b);
        Some(self.feasible.len() - 1)
    }

    /// Adds `pi` to `Π(s)` and records every small block the enlarged family
    /// proves feasible.
    pub fn import(&mut self, pi: &PmcSet) -> Result<(), SolveError> {
        if pi.is_empty() {
            return Ok(());
        }
        for x in pi {
            self.g.check_set(x)?;
            if !is_pmc(&self.g, x) {
                return Err(crate::error::PmcError::NotPmc(x.to_vec()).into());
            }
        }
        self.pi.extend(pi);
        let res = bt_dp(&self.g, &self.pi, &CardinalityWeight, BtOptions::single());
        self.width = res.value;
        let k = self.k as i64;
        let whole = self.g.vertices();
        let mut fresh = Vec::new();
        for (comp, v) in res.block_values() {
            if !v.at_most(k) {
                continue;
            }
            if *comp == whole {
                self.whole_feasible = true;
                continue;
            }
            let b = Block::new(&self.g, comp.clone());
            if is_small(&self.g, &b) && is_minimal_separator(&self.g, &b.separator) {
                fresh.push(b);
            }
        }
        for b in fresh {
            self.add_block(b);
        }
        Ok(())
    }

    /// PMCs used by some decomposition of width at most `width()`.
    pub fn useful_pmcs(&self) -> Result<PmcSet, SolveError> {
        let Width::Finite(w) = self.width else {
            return Err(SolveError::InfiniteWidth);
        };
        Ok(bt_dp(&self.g, &self.pi, &CardinalityWeight, BtOptions::single()).useful(w))
    }

    /// Runs the backtrack search rooted at `b`, which must be a stored
    /// feasible block. Returns the new feasible blocks found.
    pub fn search_new_feasible(&mut self, b: &Block) -> Result<Vec<Block>, SolveError> {
        let Some(idx) = self.feasible.iter().position(|x| x == b) else {
            return Err(SolveError::UnknownBlock);
        };
        let mut budget = u64::MAX;
        let mut found = Vec::new();
        if let Err(Stop::Timeout) = self.search(idx, &mut budget, &mut found) {
            return Err(SolveError::Timeout);
        }
        self.refresh();
        Ok(found
            .into_iter()
            .map(|i| self.feasible[i].clone())
            .collect())
    }

    fn tick(&mut self, budget: &mut u64) -> Result<(), Stop> {
        if *budget == 0 {
            return Err(Stop::Budget);
        }
        *budget -= 1;
        self.steps += 1;
        if self.steps.is_multiple_of(DEADLINE_STRIDE) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(Stop::Timeout);
                }
            }
        }
        Ok(())
    }

    /// Records `inner` as feasible via cap `x` if it qualifies.
    fn accept(&mut self, inner: &VertexSet, x: &VertexSet, found: &mut Vec<usize>) {
        if *inner == self.g.vertices() {
            if !self.whole_feasible {
                self.whole_feasible = true;
                self.pi.insert(x.clone());
            }
            return;
        }
        if self.known.contains(inner) {
            return;
        }
        let b = Block::new(&self.g, inner.clone());
        if !is_minimal_separator(&self.g, &b.separator) || !is_small(&self.g, &b) {
            return;
        }
        self.pi.insert(x.clone());
        if let Some(i) = self.add_block(b) {
            found.push(i);
        }
    }

    fn check_cap(&self, inner: &VertexSet, a: &VertexSet, nin: &VertexSet) -> Option<VertexSet> {
        if a.is_empty() || a.len() + nin.len() > self.k + 1 {
            return None;
        }
        let x = a.union(nin);
        debug_assert!(nin.is_empty() == (*inner == self.g.vertices()));
        is_pmc(&self.g, &x).then_some(x)
    }

    fn search(
        &mut self,
        root: usize,
        budget: &mut u64,
        found: &mut Vec<usize>,
    ) -> Result<(), Stop> {
        let g = self.g.clone();
        let top = self.feasible[root].component.clone();
        let cands: Vec<VertexSet> = self
            .feasible
            .iter()
            .filter(|b| b.component.cmp_size_lex(&top) == Ordering::Less)
            .map(|b| b.component.clone())
            .collect();
        let limit = self.k + 1;
        let mut seen: HashSet<(VertexSet, VertexSet)> = HashSet::new();
        let mut stack = vec![(top.clone(), g.empty_set())];
        seen.insert((top, g.empty_set()));
        while let Some((u, a)) = stack.pop() {
            self.tick(budget)?;
            let inner = u.union(&a);
            let nin = g.neighborhood(&inner);
            let nu = g.neighborhood(&u);
            let open: Vec<&VertexSet> = cands
                .iter()
                .filter(|c| c.is_disjoint(&inner) && c.is_disjoint(&nu))
                .collect();
            let mut absorbable = g.empty_set();
            for c in &open {
                absorbable.union_with(c);
            }
            if a.len() + nin.difference(&absorbable).len() > limit {
                continue;
            }
            if let Some(x) = self.check_cap(&inner, &a, &nin) {
                self.accept(&inner, &x, found);
            }
            for v in nin.iter().filter(|_| a.len() < limit) {
                let a2 = a.with(v);
                let key = (u.clone(), a2);
                if !seen.contains(&key) {
                    seen.insert(key.clone());
                    stack.push(key);
                }
            }
            let na = g.neighborhood(&a);
            for c in open {
                if c.intersects(&na) {
                    let key = (u.union(c), a.clone());
                    if !seen.contains(&key) {
                        seen.insert(key.clone());
                        stack.push(key);
                    }
                }
            }
        }
        Ok(())
    }

    /// Blocks whose cap has no children: connected `A` with `A ∪ N(A)` a
    /// PMC of size at most `k + 1`.
    fn generate_leaves(&mut self, budget: &mut u64, found: &mut Vec<usize>) -> Result<(), Stop> {
        let g = self.g.clone();
        let limit = self.k + 1;
        for v in 0..g.n() {
            let mut seen: HashSet<VertexSet> = HashSet::new();
            let start = VertexSet::singleton(g.n(), v);
            seen.insert(start.clone());
            let mut stack = vec![start];
            while let Some(a) = stack.pop() {
                self.tick(budget)?;
                let na = g.neighborhood(&a);
                if a.len() + na.len() > limit {
                    continue;
                }
                if let Some(x) = self.check_cap(&a, &a, &na) {
                    self.accept(&a, &x, found);
                }
                for w in na.iter().filter(|&w| w > v) {
                    let a2 = a.with(w);
                    if !seen.contains(&a2) {
                        seen.insert(a2.clone());
                        stack.push(a2);
                    }
                }
            }
        }
        Ok(())
    }

    fn run_queue(
        &mut self,
        largest_first: bool,
        budget: &mut u64,
        found: &mut Vec<usize>,
    ) -> Result<(), Stop> {
        let mut heap: BinaryHeap<Entry> = (0..self.feasible.len())
            .map(|i| Entry {
                block: i,
                key: self.feasible[i].component.clone(),
                largest_first,
            })
            .collect();
        while let Some(e) = heap.pop() {
            if self.whole_feasible && largest_first {
                break;
            }
            let before = found.len();
            let r = self.search(e.block, budget, found);
            for &i in &found[before..] {
                heap.push(Entry {
                    block: i,
                    key: self.feasible[i].component.clone(),
                    largest_first,
                });
            }
            r?;
        }
        Ok(())
    }

    /// Searches from the largest blocks first until `budget` steps are used.
    pub fn improve(&mut self, budget: u64) -> Result<(), SolveError> {
        if budget == 0 {
            return Ok(());
        }
        let mut left = budget;
        let mut found = Vec::new();
        let before = self.pi.len();
        let r = self.run_queue(true, &mut left, &mut found);
        if self.pi.len() != before {
            self.refresh();
        }
        match r {
            Err(Stop::Timeout) => Err(SolveError::Timeout),
            _ => Ok(()),
        }
    }

    /// Generates every small feasible block, smallest first, and `V(G)` if
    /// it is feasible. Afterwards `width() <= k` exactly when `tw(G) <= k`.
    pub fn finish(&mut self) -> Result<bool, SolveError> {
        let mut left = u64::MAX;
        let mut found = Vec::new();
        let r = self
            .generate_leaves(&mut left, &mut found)
            .and_then(|_| self.run_queue(false, &mut left, &mut found));
        self.refresh();
        match r {
            Err(Stop::Timeout) => Err(SolveError::Timeout),
            _ => Ok(self.width.at_most(self.k as i64)),
        }
    }
}
