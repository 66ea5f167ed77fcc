//! Independent re-checking of certificates.

use thiserror::Error;

use super::safe::lower_bound;
use super::Certificate;
use crate::decomposition::{greedy_td, validate, Violation};
use crate::error::SolveError;
use crate::graph::Graph;
use crate::hpid::HpidState;
use crate::oracle;

/// Exact decision of `tw(g) <= k`, component by component. A greedy
/// decomposition or a contraction lower bound settles most cases; the rest
/// go to the prefix search for small components and to HPID otherwise.
pub fn decide_treewidth_at_most(g: &Graph, k: usize) -> Result<bool, SolveError> {
    for c in g.components(&g.vertices()) {
        if c.len() <= k + 1 {
            continue;
        }
        let (sub, _) = g.induced(&c);
        if greedy_td(&sub).is_ok_and(|t| t.width() <= k) {
            continue;
        }
        if lower_bound(&sub) > k {
            return Ok(false);
        }
        let exact = match oracle::treewidth_at_most(&sub, k) {
            Some(b) => b,
            None => HpidState::new(&sub, k).finish()?,
        };
        if !exact {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact treewidth by deciding increasing widths.
pub fn exact_treewidth(g: &Graph) -> Result<usize, SolveError> {
    let mut k = 0;
    while !decide_treewidth_at_most(g, k)? {
        k += 1;
    }
    Ok(k)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyFailure {
    #[error("decomposition invalid: {0}")]
    InvalidDecomposition(Violation),
    #[error("decomposition has width {actual}, certificate claims {claimed}")]
    WidthMismatch { claimed: usize, actual: usize },
    #[error("witness is not a contractor of the graph: {0}")]
    WitnessInvalid(String),
    #[error("contracting by the witness does not give the obstruction")]
    ObstructionMismatch,
    #[error("obstruction has treewidth {actual}, certificate claims {claimed}")]
    ObstructionWidth { claimed: usize, actual: String },
    #[error("obstruction is not minimal: contracting {{{0}, {1}}} keeps the width")]
    NotMinimal(usize, usize),
    #[error("verification aborted: {0}")]
    Aborted(String),
}

/// Checks, independently of how `c` was produced: the decomposition is
/// valid with the claimed width; the witness contracts `g` to the
/// obstruction; the obstruction has exactly the claimed treewidth; and
/// every single-edge contraction of the obstruction has smaller width.
pub fn verify_certificate(g: &Graph, c: &Certificate) -> Result<(), VerifyFailure> {
    validate(g, &c.decomposition).map_err(VerifyFailure::InvalidDecomposition)?;
    if c.decomposition.width() != c.width {
        return Err(VerifyFailure::WidthMismatch {
            claimed: c.width,
            actual: c.decomposition.width(),
        });
    }
    let h = g
        .contract(&c.witness)
        .map_err(|e| VerifyFailure::WitnessInvalid(e.to_string()))?;
    if h != c.obstruction {
        return Err(VerifyFailure::ObstructionMismatch);
    }
    let abort = |e: SolveError| VerifyFailure::Aborted(e.to_string());
    let w = c.width;
    let start = std::time::Instant::now();
    let fits = decide_treewidth_at_most(&h, w).map_err(abort)?;
    log::debug!("upper check: {:?}", start.elapsed());
    let below = w > 0 && decide_treewidth_at_most(&h, w - 1).map_err(abort)?;
    log::debug!("lower check: {:?}", start.elapsed());
    if !fits || below {
        let actual = exact_treewidth(&h).map_err(abort)?;
        return Err(VerifyFailure::ObstructionWidth {
            claimed: w,
            actual: actual.to_string(),
        });
    }
    for (u, v) in h.edges() {
        let (he, _) = h.contract_edge(u, v).expect("edge of h");
        let start = std::time::Instant::now();
        let ok = decide_treewidth_at_most(&he, w - 1).map_err(abort)?;
        log::debug!("minimality of {{{u}, {v}}}: {:?}", start.elapsed());
        if !ok {
            return Err(VerifyFailure::NotMinimal(u, v));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::TreeDecomposition;
    use crate::graph::Contractor;
    use crate::VertexSet;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn c5_cert() -> Certificate {
        let g = cycle(5);
        let s = |v: &[usize]| VertexSet::from_slice(5, v);
        let td = TreeDecomposition::new(
            vec![s(&[0, 1, 2]), s(&[0, 2, 3]), s(&[0, 3, 4])],
            vec![(0, 1), (1, 2)],
        )
        .unwrap();
        let witness = Contractor::from_parts(&g, vec![s(&[0, 1, 2]), s(&[3]), s(&[4])]).unwrap();
        Certificate {
            width: 2,
            decomposition: td,
            obstruction: Graph::complete(3),
            witness,
        }
    }

    #[test]
    fn accepts_c5() {
        assert_eq!(verify_certificate(&cycle(5), &c5_cert()), Ok(()));
    }

    #[test]
    fn rejects_tampering() {
        let g = cycle(5);
        let mut c = c5_cert();
        c.width = 3;
        assert!(matches!(
            verify_certificate(&g, &c),
            Err(VerifyFailure::WidthMismatch { .. })
        ));

        let mut c = c5_cert();
        c.decomposition = TreeDecomposition::single(g.vertices());
        c.width = 4;
        assert!(matches!(
            verify_certificate(&g, &c),
            Err(VerifyFailure::ObstructionWidth { .. })
        ));

        // C4 as the obstruction for C5: contracting any edge keeps width 2
        let mut c = c5_cert();
        let s = |v: &[usize]| VertexSet::from_slice(5, v);
        c.witness =
            Contractor::from_parts(&g, vec![s(&[0, 1]), s(&[2]), s(&[3]), s(&[4])]).unwrap();
        c.obstruction = cycle(4);
        assert!(matches!(
            verify_certificate(&g, &c),
            Err(VerifyFailure::NotMinimal(..))
        ));

        let mut c = c5_cert();
        c.obstruction = Graph::complete(2);
        assert_eq!(
            verify_certificate(&g, &c),
            Err(VerifyFailure::ObstructionMismatch)
        );
    }

    #[test]
    fn exact_small() {
        assert_eq!(exact_treewidth(&cycle(6)).unwrap(), 2);
        assert_eq!(exact_treewidth(&Graph::new(3)).unwrap(), 0);
        assert!(decide_treewidth_at_most(&Graph::complete(4), 3).unwrap());
    }
}
