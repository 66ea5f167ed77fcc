//! Moving PMC families between a graph and its contractions.

use crate::bitset::VertexSet;
use crate::decomposition::{minimalize_optimally, TreeDecomposition};
use crate::error::PmcError;
use crate::graph::{Contractor, Graph};
use crate::pmc::{bt_dp, is_pmc, BagWeight, BtOptions, PmcSet, Width};

/// `2|γ⁻¹(U)|` when the preimage is a PMC of `G`, one less otherwise.
pub struct UncontractWeight<'a> {
    pub gamma: &'a Contractor,
    pub target: &'a Graph,
}

impl BagWeight for UncontractWeight<'_> {
    fn weight(&self, bag: &VertexSet) -> i64 {
        let pre = self.gamma.preimage(bag);
        let c = 2 * pre.len() as i64;
        if is_pmc(self.target, &pre) {
            c
        } else {
            c - 1
        }
    }
}

/// `2|γ(U)|` when the image is a PMC of `G / γ`, one less otherwise.
pub struct ContractWeight<'a> {
    pub gamma: &'a Contractor,
    pub contracted: &'a Graph,
}

impl BagWeight for ContractWeight<'_> {
    fn weight(&self, bag: &VertexSet) -> i64 {
        let img = self.gamma.image(bag);
        let c = 2 * img.len() as i64;
        if is_pmc(self.contracted, &img) {
            c
        } else {
            c - 1
        }
    }
}

/// `γ(T)`: every bag mapped through `γ`, equal bags merged.
pub fn image_td(t: &TreeDecomposition, gamma: &Contractor) -> TreeDecomposition {
    t.map_bags(|b| gamma.image(b)).normalized()
}

/// PMCs of `G` from PMCs of `G / γ`: optimal decompositions under
/// [`UncontractWeight`] are uncontracted and minimalized optimally.
/// The result admits a decomposition of `G` of width at most
/// `tw_pi(G / γ) + 1`.
pub fn uncontract_pmcs(
    pi: &PmcSet,
    g: &Graph,
    gamma: &Contractor,
    max_solutions: usize,
) -> Result<PmcSet, PmcError> {
    let h = g.contract(gamma)?;
    let w = UncontractWeight { gamma, target: g };
    let res = bt_dp(&h, pi, &w, BtOptions::with_solutions(max_solutions));
    if res.value == Width::Infinite {
        return Err(PmcError::Infeasible);
    }
    let mut out = PmcSet::new();
    for t in &res.decompositions {
        let u = crate::decomposition::uncontract_td(t, gamma)?;
        let m = minimalize_optimally(g, &u)?;
        out.extend(&m.bag_set());
    }
    Ok(out)
}

/// PMCs of `G / γ` from PMCs of `G`, through image decompositions under
/// [`ContractWeight`]. The result admits width at most `tw_pi(G)`.
pub fn contract_pmcs(
    pi: &PmcSet,
    g: &Graph,
    gamma: &Contractor,
    max_solutions: usize,
) -> Result<PmcSet, PmcError> {
    let h = g.contract(gamma)?;
    let w = ContractWeight {
        gamma,
        contracted: &h,
    };
    let res = bt_dp(g, pi, &w, BtOptions::with_solutions(max_solutions));
    if res.value == Width::Infinite {
        return Err(PmcError::Infeasible);
    }
    let mut out = PmcSet::new();
    for t in &res.decompositions {
        let m = minimalize_optimally(&h, &image_td(t, gamma))?;
        out.extend(&m.bag_set());
    }
    Ok(out)
}
