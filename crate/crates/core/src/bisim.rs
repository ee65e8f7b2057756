//! Strong bisimilarity by signature refinement, and the two routes to
//! stateless bisimilarity: refinement over the with-data step function, and
//! currying followed by strong bisimilarity.

use std::collections::HashMap;

use thiserror::Error;

use crate::curry::{build_curried_lts, close_labels, curry, ClosedTss};
use crate::term::{Term, TermError};
use crate::tss::{build_lts, Bounds, CurriedLabel, Lts, StepError, Tss};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error("inconclusive: exploration stopped at {states} states / {edges} edges")]
    Inconclusive { states: usize, edges: usize },
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("{0}")]
    Term(#[from] TermError),
}

/// Block assignment of the coarsest stable partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub block_of: Vec<usize>,
    pub blocks: usize,
}

impl Partition {
    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    /// States grouped by block, blocks in order of their first member.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.blocks];
        for (s, &b) in self.block_of.iter().enumerate() {
            out[b].push(s);
        }
        out
    }
}

/// Computes the coarsest partition in which related states have identical
/// sets of `(label, target block)` pairs.
pub fn coarsest_partition(lts: &Lts) -> Partition {
    let n = lts.states.len();
    let mut label_ids: HashMap<&CurriedLabel, usize> = HashMap::new();
    let edges: Vec<(usize, usize, usize)> = lts
        .edges
        .iter()
        .map(|e| {
            let next = label_ids.len();
            let l = *label_ids.entry(&e.label).or_insert(next);
            (e.src, l, e.dst)
        })
        .collect();

    let mut block_of = vec![0usize; n];
    let mut blocks = usize::from(n > 0);
    loop {
        let mut sigs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for &(s, l, d) in &edges {
            sigs[s].push((l, block_of[d]));
        }
        let mut ids: HashMap<(usize, Vec<(usize, usize)>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for (s, mut sig) in sigs.into_iter().enumerate() {
            sig.sort_unstable();
            sig.dedup();
            let fresh = ids.len();
            next[s] = *ids.entry((block_of[s], sig)).or_insert(fresh);
        }
        let count = ids.len();
        block_of = next;
        if count == blocks {
            return Partition { block_of, blocks };
        }
        blocks = count;
    }
}

fn conclude(lts: &Lts, p: &Term, q: &Term) -> Result<bool, BisimError> {
    if lts.truncated {
        return Err(BisimError::Inconclusive {
            states: lts.states.len(),
            edges: lts.edges.len(),
        });
    }
    let part = coarsest_partition(lts);
    let (Some(i), Some(j)) = (lts.index_of(p), lts.index_of(q)) else {
        unreachable!("roots are always explored");
    };
    Ok(part.same_block(i, j))
}

fn check_roots(sig: &crate::term::Signature, p: &Term, q: &Term) -> Result<(), BisimError> {
    sig.check_closed_process(p)?;
    sig.check_closed_process(q)?;
    Ok(())
}

/// Strong bisimilarity over a closed-label system; labels are full triples.
pub fn strong_bisim(tss: &ClosedTss, p: &Term, q: &Term, bounds: Bounds) -> Result<bool, BisimError> {
    check_roots(&tss.sig, p, q)?;
    let lts = build_curried_lts(tss, &[p.clone(), q.clone()], bounds)?;
    conclude(&lts, p, q)
}

/// Stateless bisimilarity computed directly on the with-data system: every
/// challenge `(p, d) -l-> (p', d')` is quantified over all carrier values `d`.
pub fn stateless_bisim_direct(tss: &Tss, p: &Term, q: &Term, bounds: Bounds) -> Result<bool, BisimError> {
    check_roots(&tss.sig, p, q)?;
    let lts = build_lts(tss, &[p.clone(), q.clone()], bounds)?;
    conclude(&lts, p, q)
}

/// Stateless bisimilarity via currying, label closure and strong bisimilarity.
pub fn stateless_via_curry(tss: &Tss, p: &Term, q: &Term, bounds: Bounds) -> Result<bool, BisimError> {
    let closed = close_labels(&curry(tss))?;
    strong_bisim(&closed, p, q, bounds)
}

/// Bisimulation classes of everything reachable from `roots`, as terms.
pub fn witness_classes(lts: &Lts) -> Vec<Vec<Term>> {
    coarsest_partition(lts)
        .classes()
        .into_iter()
        .map(|c| c.into_iter().map(|s| lts.states[s].clone()).collect())
        .collect()
}

/// Reusable strong-bisimilarity oracle over one closed-label system.
///
/// The closed system is computed once; each query explores a fresh joint LTS.
pub struct StrongOracle {
    pub closed: ClosedTss,
    pub bounds: Bounds,
}

impl StrongOracle {
    pub fn new(closed: ClosedTss, bounds: Bounds) -> Self {
        StrongOracle { closed, bounds }
    }

    pub fn from_curried(tss: &Tss, bounds: Bounds) -> Result<Self, BisimError> {
        Ok(StrongOracle::new(close_labels(tss)?, bounds))
    }

    pub fn equivalent(&self, p: &Term, q: &Term) -> Result<bool, BisimError> {
        strong_bisim(&self.closed, p, q, self.bounds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tss::Edge;

    fn lts(n: usize, edges: &[(usize, &str, usize)]) -> Lts {
        let states = (0..n).map(|i| Term::constant(&format!("s{i:02}"))).collect();
        let mut edges: Vec<Edge> = edges
            .iter()
            .map(|&(s, a, d)| Edge {
                src: s,
                label: CurriedLabel::new("d", a, "d"),
                dst: d,
            })
            .collect();
        edges.sort();
        Lts {
            states,
            edges,
            roots: vec![0],
            truncated: false,
        }
    }

    #[test]
    fn branching_difference_is_detected() {
        // a.(b + c) vs a.b + a.c
        let l = lts(
            8,
            &[(0, "a", 1), (1, "b", 2), (1, "c", 2), (3, "a", 4), (3, "a", 5), (4, "b", 6), (5, "c", 7)],
        );
        let p = coarsest_partition(&l);
        assert!(!p.same_block(0, 3));
        assert!(p.same_block(2, 6));
        assert!(p.same_block(6, 7));
    }

    #[test]
    fn duplicated_branches_collapse() {
        // a.0 vs a.0 + a.0
        let l = lts(4, &[(0, "a", 1), (2, "a", 3), (2, "a", 1)]);
        let p = coarsest_partition(&l);
        assert!(p.same_block(0, 2));
        assert_eq!(p.blocks, 2);
    }

    #[test]
    fn truncated_lts_is_inconclusive() {
        let mut l = lts(2, &[(0, "a", 1)]);
        l.truncated = true;
        assert!(matches!(
            conclude(&l, &l.states[0].clone(), &l.states[1].clone()),
            Err(BisimError::Inconclusive { .. })
        ));
    }
}
