//! Property tests over small random graphs, checked against brute force.

use proptest::prelude::*;
use proptest::test_runner::Config;
use rtw_core::bridge::{contract_pmcs, uncontract_pmcs, UncontractWeight};
use rtw_core::decomposition::{
    clique_tree, elimination_fill, fill, greedy_td, is_chordal, minimalize, minimalize_optimally,
    uncontract_td, validate,
};
use rtw_core::hpid::{is_small, HpidState};
use rtw_core::io::{
    canonical_form, emit_certificate, emit_gr, emit_td, parse_certificate, parse_gr, parse_td,
};
use rtw_core::pmc::{all_pmcs, bt_dp, is_pmc, tw_pi, Block, BtOptions, CardinalityWeight, PmcSet};
use rtw_core::solver::preprocess_safe_separators;
use rtw_core::{compute_treewidth, verify_certificate, Contractor, Graph, VertexSet, Width};
use rtw_testkit as kit;

fn build(n: usize, bits: &[bool], parents: Option<&[usize]>) -> Graph {
    let mut e = Vec::new();
    let mut i = 0;
    for u in 0..n {
        for v in u + 1..n {
            if bits[i] {
                e.push((u, v));
            }
            i += 1;
        }
    }
    if let Some(p) = parents {
        for v in 1..n {
            let u = p[v - 1] % v;
            if !e.contains(&(u, v)) {
                e.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &e).unwrap()
}

fn arb_graph(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(any::<bool>(), n * (n - 1) / 2),
            )
        })
        .prop_map(|(n, bits)| build(n, &bits, None))
}

fn arb_connected(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(prop::bool::weighted(0.35), n * (n - 1) / 2),
                prop::collection::vec(any::<usize>(), n.saturating_sub(1)),
            )
        })
        .prop_map(|(n, bits, p)| build(n, &bits, Some(&p)))
}

/// A graph with a random elimination order of it.
fn with_order(g: impl Strategy<Value = Graph>) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    g.prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn subset(n: usize, mask: u32) -> VertexSet {
    let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    VertexSet::from_slice(n, &vs)
}

fn contained(a: &Graph, b: &Graph) -> bool {
    a.edges().iter().all(|&(u, v)| b.adjacent(u, v))
}

proptest! {
    #![proptest_config(Config { cases: 200, ..Config::default() })]

    #[test]
    fn contract_edge_matches_explicit_parts(g in arb_graph(2, 8)) {
        for (u, v) in g.edges() {
            let (h, gamma) = g.contract_edge(u, v).unwrap();
            let parts: Vec<VertexSet> = (0..g.n())
                .filter(|&x| x != v)
                .map(|x| if x == u { VertexSet::from_slice(g.n(), &[u, v]) } else { VertexSet::singleton(g.n(), x) })
                .collect();
            let explicit = Contractor::from_parts(&g, parts).unwrap();
            prop_assert_eq!(&gamma, &explicit);
            prop_assert_eq!(h, g.contract(&explicit).unwrap());
        }
    }

    #[test]
    fn contracted_edges_come_from_edges(g in arb_connected(2, 8), picks in prop::collection::vec(any::<usize>(), 0..5)) {
        let mut gamma = Contractor::identity(g.n());
        let mut h = g.clone();
        for p in picks {
            let edges = h.edges();
            if edges.is_empty() {
                break;
            }
            let (u, v) = edges[p % edges.len()];
            let (next, step) = h.contract_edge(u, v).unwrap();
            gamma = gamma.compose(&step).unwrap();
            h = next;
        }
        prop_assert_eq!(&g.contract(&gamma).unwrap(), &h);
        for (a, b) in h.edges() {
            let pa = gamma.part(a);
            prop_assert!(pa.iter().any(|x| g.neighbors(x).intersects(gamma.part(b))));
        }
    }

    #[test]
    fn components_and_neighbourhoods(g in arb_graph(1, 8), mask in any::<u32>()) {
        let comps = g.components(&g.vertices());
        prop_assert_eq!(comps.len() == 1, g.is_connected());
        let u = subset(g.n(), mask);
        prop_assert!(g.neighborhood(&u).is_disjoint(&u));
    }

    #[test]
    fn decompositions_are_valid((g, order) in with_order(arb_connected(1, 8))) {
        let t = greedy_td(&g).unwrap();
        prop_assert_eq!(validate(&g, &t), Ok(()));
        prop_assert!(t.width() >= kit::treewidth(&g));
        let t = clique_tree(&elimination_fill(&g, &order));
        prop_assert_eq!(validate(&g, &t), Ok(()));
        prop_assert_eq!(validate(&g, &t.normalized()), Ok(()));
        prop_assert_eq!(t.normalized().width(), t.width());
        let m = minimalize(&g, &t).unwrap();
        prop_assert_eq!(validate(&g, &m), Ok(()));
        prop_assert!(m.width() <= t.width());
        let fm = fill(&g, &m).unwrap();
        prop_assert!(is_chordal(&fm));
        prop_assert!(contained(&fm, &fill(&g, &t).unwrap()));
        let o = minimalize_optimally(&g, &t).unwrap();
        prop_assert_eq!(validate(&g, &o), Ok(()));
        prop_assert!(o.width() <= m.width());
    }

    #[test]
    fn minimalize_optimally_is_best_inside_fill((g, order) in with_order(arb_connected(1, 7))) {
        let t = clique_tree(&elimination_fill(&g, &order));
        let f = kit::masks(&fill(&g, &t).unwrap());
        let best = kit::minimal_triangulations(&g)
            .iter()
            .filter(|h| h.iter().zip(&f).all(|(a, b)| a & !b == 0))
            .map(|h| kit::maximal_cliques(h).iter().map(|c| c.count_ones()).max().unwrap() as usize - 1)
            .min()
            .unwrap();
        prop_assert_eq!(minimalize_optimally(&g, &t).unwrap().width(), best);
    }

    #[test]
    fn uncontracted_decompositions_are_valid((g, order) in with_order(arb_connected(2, 7)), pick in any::<usize>()) {
        let edges = g.edges();
        let (u, v) = edges[pick % edges.len()];
        let (h, gamma) = g.contract_edge(u, v).unwrap();
        let order: Vec<usize> = order.into_iter().filter(|&x| x < h.n()).collect();
        let t = clique_tree(&elimination_fill(&h, &order));
        let back = uncontract_td(&t, &gamma).unwrap();
        prop_assert_eq!(validate(&g, &back), Ok(()));
    }

    #[test]
    fn all_pmcs_give_treewidth(g in arb_graph(1, 7)) {
        let pi = all_pmcs(&g).unwrap();
        prop_assert_eq!(tw_pi(&g, &pi), Width::Finite(kit::treewidth(&g) as i64));
    }

    #[test]
    fn bt_dp_monotone_and_exact(g in arb_connected(1, 7), keep in any::<u64>()) {
        let all = all_pmcs(&g).unwrap();
        let some = PmcSet::from_sets(all.iter().enumerate().filter(|(i, _)| keep >> (i % 64) & 1 == 1).map(|(_, x)| x.clone()));
        let full = bt_dp(&g, &all, &CardinalityWeight, BtOptions::default());
        let part = bt_dp(&g, &some, &CardinalityWeight, BtOptions::default());
        prop_assert!(full.value <= part.value);
        prop_assert_eq!(part.value, tw_pi(&g, &some));
        for r in [&full, &part] {
            for t in &r.decompositions {
                prop_assert_eq!(validate(&g, t), Ok(()));
                prop_assert_eq!(Width::Finite(t.width() as i64), r.value);
            }
        }
    }

    #[test]
    fn pmc_test_matches_triangulations(g in arb_graph(7, 7)) {
        let oracle = kit::pmcs_by_triangulations(&g);
        for mask in 1u32..1 << 7 {
            prop_assert_eq!(is_pmc(&g, &subset(7, mask)), oracle.contains(&mask), "{:b}", mask);
        }
    }

    #[test]
    fn io_round_trips(g in arb_connected(1, 10)) {
        prop_assert_eq!(parse_gr(&emit_gr(&g)).unwrap(), g.clone());
        let c = compute_treewidth(&g).unwrap();
        let td = parse_td(&emit_td(&g, &c.decomposition).unwrap()).unwrap();
        prop_assert_eq!(canonical_form(&td.decomposition), canonical_form(&c.decomposition));
        let back = parse_certificate(&emit_certificate(&g, &c).unwrap()).unwrap().into_certificate(&g).unwrap();
        prop_assert_eq!(back, c);
    }
}

proptest! {
    #![proptest_config(Config { cases: 64, ..Config::default() })]

    #[test]
    fn finish_is_exact_on_eight_vertices(g in arb_connected(8, 8)) {
        let tw = kit::treewidth(&g);
        for k in 0..8 {
            prop_assert_eq!(HpidState::new(&g, k).finish().unwrap(), tw <= k, "k={}", k);
        }
    }

    #[test]
    fn hpid_width_only_improves(g in arb_connected(4, 9), k in 1usize..5, budgets in prop::collection::vec(1u64..400, 1..6)) {
        let mut s = HpidState::new(&g, k);
        s.import(&greedy_td(&g).unwrap().bag_set()).unwrap();
        let mut width = s.width();
        for b in budgets {
            let before = s.steps();
            s.improve(b).unwrap();
            prop_assert!(s.steps() - before <= b);
            prop_assert!(s.width() <= width);
            width = s.width();
            if let Some(w) = width.finite() {
                let r = bt_dp(&g, s.pmcs(), &CardinalityWeight, BtOptions::single());
                prop_assert_eq!(r.value, width);
                prop_assert_eq!(r.decompositions[0].width() as i64, w);
                prop_assert_eq!(validate(&g, &r.decompositions[0]), Ok(()));
            }
        }
        s.finish().unwrap();
        let whole = Block::whole(&g);
        for b in s.feasible_blocks() {
            prop_assert!(*b == whole || is_small(&g, b), "{:?}", b);
        }
    }

    #[test]
    fn bridges_respect_widths(g in arb_connected(2, 7)) {
        let pi = all_pmcs(&g).unwrap();
        let tw_g = tw_pi(&g, &pi);
        for (u, v) in g.edges() {
            let (h, gamma) = g.contract_edge(u, v).unwrap();
            let theta = contract_pmcs(&pi, &g, &gamma, 16).unwrap();
            prop_assert!(theta.iter().all(|x| is_pmc(&h, x)));
            prop_assert!(tw_pi(&h, &theta) <= tw_g);
            let pi_h = all_pmcs(&h).unwrap();
            let back = uncontract_pmcs(&pi_h, &g, &gamma, 16).unwrap();
            prop_assert!(back.iter().all(|x| is_pmc(&g, x)));
            let (a, b) = (tw_pi(&g, &back).finite().unwrap(), tw_pi(&h, &pi_h).finite().unwrap());
            prop_assert!(a <= b + 1);
        }
    }

    #[test]
    fn solver_matches_oracle(g in arb_connected(1, 9)) {
        let c = compute_treewidth(&g).unwrap();
        prop_assert_eq!(c.width, kit::treewidth(&g));
        prop_assert_eq!(&g.contract(&c.witness).unwrap(), &c.obstruction);
        prop_assert_eq!(verify_certificate(&g, &c), Ok(()));
    }

    #[test]
    fn disconnected_inputs_solve(g in arb_graph(1, 8)) {
        let c = compute_treewidth(&g).unwrap();
        prop_assert_eq!(c.width, kit::treewidth(&g));
        prop_assert_eq!(verify_certificate(&g, &c), Ok(()));
    }

    #[test]
    fn safe_separators_keep_treewidth(g in arb_connected(2, 8)) {
        let d = preprocess_safe_separators(&g).unwrap();
        let widest = d.subproblems.iter().map(|sp| kit::treewidth(&sp.graph)).max().unwrap();
        let seps = d.separators.iter().map(|s| s.len().saturating_sub(1)).max().unwrap_or(0);
        prop_assert_eq!(widest.max(seps), kit::treewidth(&g));
    }

    #[test]
    fn contraction_changes_width_by_at_most_one(g in arb_connected(2, 8)) {
        let tw = kit::treewidth(&g);
        for (u, v) in g.edges() {
            let (h, _) = g.contract_edge(u, v).unwrap();
            let th = kit::treewidth(&h);
            prop_assert!(th <= tw && tw <= th + 1);
        }
    }
}

/// An even-weight bag `U` of an optimal decomposition of `G / e` whose
/// preimage is a PMC of `G` survives optimal minimalization of the
/// uncontraction.
#[test]
fn even_bags_survive_minimalization() {
    let mut checked = 0;
    for n in 2..=6 {
        for g in kit::connected_graphs(n) {
            for (u, v) in g.edges() {
                let (h, gamma) = g.contract_edge(u, v).unwrap();
                let w = UncontractWeight {
                    gamma: &gamma,
                    target: &g,
                };
                let r = bt_dp(&h, &all_pmcs(&h).unwrap(), &w, BtOptions::default());
                for t in &r.decompositions {
                    let m = minimalize_optimally(&g, &uncontract_td(t, &gamma).unwrap()).unwrap();
                    for bag in t.bags() {
                        let pre = gamma.preimage(bag);
                        if is_pmc(&g, &pre) {
                            assert!(
                                m.bags().contains(&pre),
                                "{:?} / {u}{v}: {pre:?} lost",
                                g.edges()
                            );
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 0);
}
