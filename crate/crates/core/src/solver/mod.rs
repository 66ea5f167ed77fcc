//! The certifying solver: main iteration, recursive decision procedure,
//! safe separators, suppressed edges and certificate checking.

mod order;
mod safe;
mod verify;

pub use order::{deficiency, edge_value, order_edges, order_edges_seeded};
pub use safe::{
    clique_lower_bound, condition_two, find_safe_contractor, is_almost_clique, is_safe,
    lower_bound, minor_min_width, preprocess_safe_separators, rooted_clique_contraction,
    side_graph, stitch_certificate, SafeContraction, SafeSeparatorDecomposition, Subproblem,
};
pub use verify::{decide_treewidth_at_most, exact_treewidth, verify_certificate, VerifyFailure};

use std::time::Instant;

use crate::bitset::VertexSet;
use crate::bridge::{contract_pmcs, uncontract_pmcs};
use crate::decomposition::{
    clique_tree, elimination_fill, greedy_td, minimal_triangulation, TreeDecomposition,
};
use crate::error::{GraphError, SolveError};
use crate::graph::{Contractor, Graph};
use crate::hpid::HpidState;
use crate::oracle::{self, OrderSearch};
use crate::pmc::{bt_dp, BtOptions, CardinalityWeight, PmcSet, DEFAULT_MAX_SOLUTIONS};

pub const DEFAULT_UNIT_BUDGET: u64 = 1000;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Search steps granted per edge index in the recursive procedure.
    pub unit_budget: u64,
    /// Decompositions traced back by the PMC transfer procedures.
    pub max_solutions: usize,
    pub safe_separators: bool,
    pub deadline: Option<Instant>,
    /// Shuffle edges of equal value; `None` keeps the canonical order.
    pub seed: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            unit_budget: DEFAULT_UNIT_BUDGET,
            max_solutions: DEFAULT_MAX_SOLUTIONS,
            safe_separators: true,
            deadline: None,
            seed: None,
        }
    }
}

/// An optimal tree-decomposition and a minimal contraction of the same
/// width, with the contractor witnessing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub width: usize,
    pub decomposition: TreeDecomposition,
    pub obstruction: Graph,
    pub witness: Contractor,
}

/// Answer of the recursive procedure for target width `k`.
#[derive(Clone, Debug)]
pub enum RtwOutcome {
    /// `tw_Π(G) <= k` for the returned family.
    Yes(PmcSet),
    /// A contraction of `G` of width `k + 1` all of whose edge contractions
    /// have width at most `k`.
    No {
        obstruction: Graph,
        witness: Contractor,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub rtw_calls: u64,
    pub suppressed_edges: u64,
    pub safe_contractions: u64,
    pub uncontractions: u64,
    /// Uncontractions after which the state already had width at most `k`.
    pub width_preserved: u64,
    pub hpid_steps: u64,
}

struct YesRecord {
    ends: (usize, usize),
    contracted: Graph,
    gamma: Contractor,
    theta: PmcSet,
}

struct Frame {
    from_top: Contractor,
    yes: Vec<YesRecord>,
}

/// Records of edges already proved contractible to width `k`, one frame
/// per active recursive call.
#[derive(Default)]
pub struct SuppressionLedger {
    frames: Vec<Frame>,
}

impl SuppressionLedger {
    /// A certificate family for `G / e` if `e` is suppressed by an ancestor
    /// pair. `to_g` maps the top graph onto `G`.
    fn lookup(
        &self,
        to_g: &Contractor,
        gamma_e: &Contractor,
        max_solutions: usize,
    ) -> Option<PmcSet> {
        let to_ge = to_g.compose(gamma_e).ok()?;
        for f in &self.frames {
            for r in &f.yes {
                let ru = f.from_top.part(r.ends.0).first()?;
                let rv = f.from_top.part(r.ends.1).first()?;
                if to_ge.map(ru) != to_ge.map(rv) {
                    continue;
                }
                let to_parent_e = f.from_top.compose(&r.gamma).ok()?;
                let Some(delta) = to_parent_e.quotient(&to_ge) else {
                    continue;
                };
                if let Ok(theta) = contract_pmcs(&r.theta, &r.contracted, &delta, max_solutions) {
                    return Some(theta);
                }
            }
        }
        None
    }
}

pub struct Solver {
    cfg: SolverConfig,
    ledger: SuppressionLedger,
    pub stats: SolveStats,
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Self {
        Solver {
            cfg,
            ledger: SuppressionLedger::default(),
            stats: SolveStats::default(),
        }
    }

    fn check_deadline(&self) -> Result<(), SolveError> {
        match self.cfg.deadline {
            Some(d) if Instant::now() >= d => Err(SolveError::Timeout),
            _ => Ok(()),
        }
    }

    /// Decides `tw(g) <= k` given `pi` with `tw_pi(g) <= k + 1`.
    pub fn rtw(&mut self, g: &Graph, k: usize, pi: &PmcSet) -> Result<RtwOutcome, SolveError> {
        self.ledger = SuppressionLedger::default();
        let top = Contractor::identity(g.n());
        self.rtw_inner(g, k, pi, &top)
    }

    fn rtw_inner(
        &mut self,
        g: &Graph,
        k: usize,
        pi: &PmcSet,
        to_g: &Contractor,
    ) -> Result<RtwOutcome, SolveError> {
        self.check_deadline()?;
        self.stats.rtw_calls += 1;
        let mut s = HpidState::new(g, k).with_deadline(self.cfg.deadline);
        s.import(pi)?;
        if s.width().at_most(k as i64) {
            return Ok(RtwOutcome::Yes(s.useful_pmcs()?));
        }
        if self.cfg.safe_separators && g.n() > k + 1 {
            let bound = lower_bound(g).max(k);
            if let Some(sc) = find_safe_contractor(g, bound) {
                self.stats.safe_contractions += 1;
                let p = g.contract(&sc.gamma)?;
                let theta = contract_pmcs(&s.useful_pmcs()?, g, &sc.gamma, self.cfg.max_solutions)?;
                let to_p = to_g.compose(&sc.gamma)?;
                match self.rtw_inner(&p, k, &theta, &to_p)? {
                    RtwOutcome::No {
                        obstruction,
                        witness,
                    } => {
                        return Ok(RtwOutcome::No {
                            obstruction,
                            witness: sc.gamma.compose(&witness)?,
                        })
                    }
                    RtwOutcome::Yes(pi_p) => {
                        if let Ok(st) = stitch_certificate(&pi_p, &sc, g) {
                            s.import(&st)?;
                            if s.width().at_most(k as i64) {
                                return Ok(RtwOutcome::Yes(s.useful_pmcs()?));
                            }
                        }
                        log::warn!("safe contraction stitch did not certify width {k}");
                    }
                }
            }
        }
        self.ledger.frames.push(Frame {
            from_top: to_g.clone(),
            yes: Vec::new(),
        });
        let r = self.edge_loop(g, k, &mut s, to_g);
        self.ledger.frames.pop();
        self.stats.hpid_steps += s.steps();
        r
    }

    fn edge_loop(
        &mut self,
        g: &Graph,
        k: usize,
        s: &mut HpidState,
        to_g: &Contractor,
    ) -> Result<RtwOutcome, SolveError> {
        for (i, (u, v)) in order_edges_seeded(g, self.cfg.seed).into_iter().enumerate() {
            self.check_deadline()?;
            let (h, gamma) = g.contract_edge(u, v)?;
            let theta_yes = match self.ledger.lookup(to_g, &gamma, self.cfg.max_solutions) {
                Some(theta) => {
                    self.stats.suppressed_edges += 1;
                    #[cfg(test)]
                    assert!(
                        crate::pmc::tw_pi(&h, &theta).at_most(k as i64),
                        "ledger supplied PMCs above the bound for {{{u}, {v}}}"
                    );
                    theta
                }
                None => {
                    let useful = s.useful_pmcs()?;
                    let theta = contract_pmcs(&useful, g, &gamma, self.cfg.max_solutions)?;
                    let to_h = to_g.compose(&gamma)?;
                    match self.rtw_inner(&h, k, &theta, &to_h)? {
                        RtwOutcome::No {
                            obstruction,
                            witness,
                        } => {
                            return Ok(RtwOutcome::No {
                                obstruction,
                                witness: gamma.compose(&witness)?,
                            });
                        }
                        RtwOutcome::Yes(theta) => theta,
                    }
                }
            };
            let back = uncontract_pmcs(&theta_yes, g, &gamma, self.cfg.max_solutions)?;
            if let Some(f) = self.ledger.frames.last_mut() {
                f.yes.push(YesRecord {
                    ends: (u, v),
                    contracted: h,
                    gamma,
                    theta: theta_yes,
                });
            }
            s.import(&back)?;
            self.stats.uncontractions += 1;
            if s.width().at_most(k as i64) {
                self.stats.width_preserved += 1;
                return Ok(RtwOutcome::Yes(s.useful_pmcs()?));
            }
            s.improve(self.cfg.unit_budget.saturating_mul(i as u64 + 1))?;
            if s.width().at_most(k as i64) {
                return Ok(RtwOutcome::Yes(s.useful_pmcs()?));
            }
        }
        if self.finish(g, k, s)? {
            return Ok(RtwOutcome::Yes(s.useful_pmcs()?));
        }
        Ok(RtwOutcome::No {
            obstruction: g.clone(),
            witness: Contractor::identity(g.n()),
        })
    }

    /// Exact decision once every edge has been tried. Small graphs go to the
    /// prefix search, whose order is minimalized into PMCs for `s`; larger
    /// ones run the HPID completion.
    fn finish(&mut self, g: &Graph, k: usize, s: &mut HpidState) -> Result<bool, SolveError> {
        match oracle::elimination_order_at_most(g, k, self.cfg.deadline) {
            OrderSearch::Infeasible => Ok(false),
            OrderSearch::Expired => Err(SolveError::Timeout),
            OrderSearch::TooLarge => s.finish(),
            OrderSearch::Found(order) => {
                let h = minimal_triangulation(g, &elimination_fill(g, &order));
                s.import(&clique_tree(&h).bag_set())?;
                if !s.width().at_most(k as i64) {
                    return Err(SolveError::Invariant("prefix order above the bound".into()));
                }
                Ok(true)
            }
        }
    }

    /// Main iteration on a connected graph.
    fn solve_connected_plain(&mut self, g: &Graph) -> Result<Certificate, SolveError> {
        if g.n() == 1 {
            return Ok(Certificate {
                width: 0,
                decomposition: TreeDecomposition::single(g.vertices()),
                obstruction: g.clone(),
                witness: Contractor::identity(1),
            });
        }
        let t = greedy_td(g)?;
        let mut k = t.width();
        let mut pi = t.bag_set();
        loop {
            self.check_deadline()?;
            log::debug!("n={} m={}: testing width {}", g.n(), g.m(), k - 1);
            match self.rtw(g, k - 1, &pi)? {
                RtwOutcome::Yes(next) => {
                    k -= 1;
                    pi = next;
                }
                RtwOutcome::No {
                    obstruction,
                    witness,
                } => {
                    let res = bt_dp(g, &pi, &CardinalityWeight, BtOptions::single());
                    let decomposition =
                        res.decompositions.into_iter().next().ok_or_else(|| {
                            SolveError::Invariant("certificate family lost".into())
                        })?;
                    return Ok(Certificate {
                        width: k,
                        decomposition,
                        obstruction,
                        witness,
                    });
                }
            }
        }
    }

    fn solve_connected(&mut self, g: &Graph) -> Result<Certificate, SolveError> {
        if !self.cfg.safe_separators || g.n() <= 2 {
            return self.solve_connected_plain(g);
        }
        let d = preprocess_safe_separators(g)?;
        if d.subproblems.len() <= 1 {
            return self.solve_connected_plain(g);
        }
        let mut certs = Vec::new();
        for sp in &d.subproblems {
            certs.push(self.solve_any(&sp.graph)?);
        }
        let width = certs.iter().map(|c| c.width).max().unwrap_or(0);
        let lifted = certs
            .iter()
            .zip(&d.subproblems)
            .filter(|(c, _)| c.width == width)
            .find_map(|(c, sp)| Some((c, sp.lift.as_ref()?)));
        let Some((c, lift)) = lifted else {
            log::debug!("no liftable widest subproblem, solving whole graph");
            return self.solve_connected_plain(g);
        };
        let witness = lift.compose(&c.witness)?;
        let tds: Vec<TreeDecomposition> = certs.iter().map(|c| c.decomposition.clone()).collect();
        Ok(Certificate {
            width,
            decomposition: d.reassemble(g, &tds),
            obstruction: c.obstruction.clone(),
            witness,
        })
    }

    /// Solves every component and joins the results.
    pub fn solve_any(&mut self, g: &Graph) -> Result<Certificate, SolveError> {
        if g.n() == 0 {
            return Err(GraphError::Empty.into());
        }
        let comps = g.components(&g.vertices());
        if comps.len() == 1 {
            return self.solve_connected(g);
        }
        let mut results = Vec::new();
        for c in &comps {
            let (sub, ids) = g.induced(c);
            results.push((self.solve_connected(&sub)?, ids));
        }
        let widest = (0..results.len())
            .max_by_key(|&i| (results[i].0.width, std::cmp::Reverse(i)))
            .unwrap();
        let lift = |b: &VertexSet, ids: &[usize]| {
            let mut out = g.empty_set();
            for v in b.iter() {
                out.insert(ids[v]);
            }
            out
        };
        let mut td: Option<TreeDecomposition> = None;
        for (c, ids) in &results {
            let part = c.decomposition.map_bags(|b| lift(b, ids));
            match td.as_mut() {
                None => td = Some(part),
                Some(t) => t.attach(&part, 0, 0),
            }
        }
        // obstruction: the widest component's, plus one vertex per other component
        let (wc, wids) = &results[widest];
        let mut parts: Vec<VertexSet> = wc.witness.parts().iter().map(|p| lift(p, wids)).collect();
        let mut obstruction_edges = wc.obstruction.edges();
        for (i, c) in comps.iter().enumerate() {
            if i != widest {
                parts.push(c.clone());
            }
        }
        obstruction_edges.sort_unstable();
        let obstruction = Graph::from_edges(parts.len(), &obstruction_edges)?;
        let witness = Contractor::from_parts(g, parts)?;
        Ok(Certificate {
            width: wc.width,
            decomposition: td.expect("at least two components").normalized(),
            obstruction,
            witness,
        })
    }
}

/// Treewidth of `g` with a certificate, under the default configuration.
pub fn compute_treewidth(g: &Graph) -> Result<Certificate, SolveError> {
    compute_treewidth_with(g, &SolverConfig::default())
}

pub fn compute_treewidth_with(g: &Graph, cfg: &SolverConfig) -> Result<Certificate, SolveError> {
    Solver::new(cfg.clone()).solve_any(g)
}

/// The decision procedure alone, for a fresh ledger.
pub fn rtw(g: &Graph, k: usize, pi: &PmcSet) -> Result<RtwOutcome, SolveError> {
    Solver::new(SolverConfig::default()).rtw(g, k, pi)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::decomposition::validate;
    use crate::pmc::all_pmcs;

    pub(crate) fn grid(r: usize, c: usize) -> Graph {
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

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn check(g: &Graph, expect: usize) -> Certificate {
        for safe in [true, false] {
            let cfg = SolverConfig {
                safe_separators: safe,
                ..SolverConfig::default()
            };
            let c = compute_treewidth_with(g, &cfg).unwrap();
            assert_eq!(c.width, expect, "{g:?} safe={safe}");
            assert_eq!(validate(g, &c.decomposition), Ok(()));
            assert_eq!(verify_certificate(g, &c), Ok(()), "{g:?} safe={safe}");
        }
        compute_treewidth(g).unwrap()
    }

    #[test]
    fn small_named() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let c = check(&p3, 1);
        assert_eq!(c.obstruction, Graph::complete(2));
        let c = check(&cycle(5), 2);
        assert_eq!(c.obstruction, Graph::complete(3));
        let c = check(&Graph::complete(4), 3);
        assert_eq!(c.obstruction, Graph::complete(4));
        check(&grid(3, 3), 3);
        check(&Graph::new(1), 0);
    }

    #[test]
    fn suppressed_edges_are_certified() {
        // the assertion on ledger output runs inside the solver
        let mut total = 0;
        for g in [
            grid(4, 4),
            grid(3, 5),
            crate::solver::order::tests::petersen(),
        ] {
            let mut s = Solver::new(SolverConfig {
                safe_separators: false,
                ..SolverConfig::default()
            });
            let c = s.solve_any(&g).unwrap();
            assert_eq!(verify_certificate(&g, &c), Ok(()));
            total += s.stats.suppressed_edges;
        }
        assert!(total > 0);
    }

    #[test]
    fn rtw_examples() {
        let c4 = cycle(4);
        let pi = all_pmcs(&c4).unwrap();
        assert!(matches!(rtw(&c4, 2, &pi).unwrap(), RtwOutcome::Yes(_)));
        match rtw(&c4, 1, &pi).unwrap() {
            RtwOutcome::No {
                obstruction,
                witness,
            } => {
                assert_eq!(obstruction, Graph::complete(3));
                assert_eq!(c4.contract(&witness).unwrap(), obstruction);
            }
            RtwOutcome::Yes(_) => panic!("tw(C4) = 2"),
        }
        let k2 = Graph::complete(2);
        match rtw(&k2, 0, &PmcSet::from_sets([k2.vertices()])).unwrap() {
            RtwOutcome::No { obstruction, .. } => assert_eq!(obstruction, k2),
            RtwOutcome::Yes(_) => panic!("tw(K2) = 1"),
        }
    }

    #[test]
    fn disconnected_inputs() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        let c = check(&g, 2);
        assert_eq!(c.obstruction.n(), 3 + 2);
        assert_eq!(c.obstruction.m(), 3);
        assert!(compute_treewidth(&Graph::new(0)).is_err());
    }

    #[test]
    fn timeout_is_reported() {
        let cfg = SolverConfig {
            deadline: Some(Instant::now()),
            ..SolverConfig::default()
        };
        assert_eq!(
            compute_treewidth_with(&grid(4, 4), &cfg),
            Err(SolveError::Timeout)
        );
    }
}
