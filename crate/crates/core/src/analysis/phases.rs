//! k-phase and x-block decomposition of request sequences.

use std::ops::Range;

use serde::Serialize;

use crate::engine::{simulate, Algorithm, CacheConfig, EngineError, SimulationTrace};
use crate::graph::RequestSequence;

/// Greedy partition into k-phases: phase 0 is empty, and each later phase is
/// the maximal following segment with at most k distinct pages. The empty
/// phase 0 is not materialized; `boundaries[i]` starts phase i+1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhasePartition {
    pub k: usize,
    pub sequence_len: usize,
    /// Start index of each (nonempty) phase, in order.
    pub boundaries: Vec<usize>,
    /// Distinct page count per phase.
    pub per_phase_distinct: Vec<usize>,
}

impl PhasePartition {
    pub fn phase_count(&self) -> usize {
        self.boundaries.len()
    }

    pub fn phase_range(&self, i: usize) -> Range<usize> {
        let start = self.boundaries[i];
        let end = self
            .boundaries
            .get(i + 1)
            .copied()
            .unwrap_or(self.sequence_len);
        start..end
    }

    /// Phases with exactly k distinct pages that are followed by at least
    /// one more request. This is the b of the minimum-cost bound.
    pub fn complete_count(&self) -> usize {
        (0..self.phase_count())
            .filter(|&i| {
                self.per_phase_distinct[i] == self.k && self.phase_range(i).end < self.sequence_len
            })
            .count()
    }

    /// Phases with exactly k distinct pages, whether or not anything follows.
    /// This is the b of the conservative-algorithm upper bound bk + k - 1.
    pub fn full_phase_count(&self) -> usize {
        self.per_phase_distinct
            .iter()
            .filter(|&&d| d == self.k)
            .count()
    }

    /// Index of the phase containing request `index`.
    pub fn phase_of(&self, index: usize) -> usize {
        match self.boundaries.binary_search(&index) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }
}

/// Decomposes a sequence into k-phases.
pub fn k_phases(seq: &RequestSequence, k: usize) -> PhasePartition {
    assert!(k >= 1, "k-phases need k >= 1");
    let pages = seq.as_slice();
    let mut boundaries = Vec::new();
    let mut per_phase_distinct = Vec::new();
    let mut i = 0;
    while i < pages.len() {
        boundaries.push(i);
        let mut distinct: Vec<crate::graph::PageId> = Vec::with_capacity(k);
        let mut j = i;
        while j < pages.len() {
            if !distinct.contains(&pages[j]) {
                if distinct.len() == k {
                    break;
                }
                distinct.push(pages[j]);
            }
            j += 1;
        }
        per_phase_distinct.push(distinct.len());
        i = j;
    }
    PhasePartition {
        k,
        sequence_len: pages.len(),
        boundaries,
        per_phase_distinct,
    }
}

/// Fault count per phase for an existing trace.
pub fn per_phase_faults(trace: &SimulationTrace, partition: &PhasePartition) -> Vec<usize> {
    let mut counts = vec![0usize; partition.phase_count()];
    for o in &trace.outcomes {
        if o.is_fault() {
            counts[partition.phase_of(o.index)] += 1;
        }
    }
    counts
}

/// Partition into x-blocks with respect to a reference algorithm: each block
/// is the maximal following segment on which the reference faults at most x
/// times. Complete blocks are exactly those with x faults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockPartition {
    pub algorithm: Algorithm,
    pub x: usize,
    pub sequence_len: usize,
    pub boundaries: Vec<usize>,
    pub per_block_faults: Vec<usize>,
}

impl BlockPartition {
    pub fn block_count(&self) -> usize {
        self.boundaries.len()
    }

    pub fn block_range(&self, i: usize) -> Range<usize> {
        let start = self.boundaries[i];
        let end = self
            .boundaries
            .get(i + 1)
            .copied()
            .unwrap_or(self.sequence_len);
        start..end
    }

    pub fn complete_count(&self) -> usize {
        self.per_block_faults
            .iter()
            .filter(|&&f| f == self.x)
            .count()
    }
}

/// Runs the reference algorithm once over the whole sequence and cuts blocks
/// greedily: a block ends just before the fault that would be its (x+1)-st.
pub fn x_blocks(
    seq: &RequestSequence,
    algorithm: Algorithm,
    x: usize,
    cfg: &CacheConfig,
) -> Result<BlockPartition, EngineError> {
    assert!(x >= 1, "x-blocks need x >= 1");
    let trace = simulate(algorithm, seq, cfg)?;
    let mut boundaries = Vec::new();
    let mut per_block_faults = Vec::new();
    let mut current_faults = 0usize;
    for o in &trace.outcomes {
        if o.index == 0 {
            boundaries.push(0);
        }
        if o.is_fault() && current_faults == x {
            boundaries.push(o.index);
            per_block_faults.push(current_faults);
            current_faults = 0;
        }
        current_faults += o.is_fault() as usize;
    }
    if !seq.is_empty() {
        per_block_faults.push(current_faults);
    }
    Ok(BlockPartition {
        algorithm,
        x,
        sequence_len: seq.len(),
        boundaries,
        per_block_faults,
    })
}

/// Minimum faults of any algorithm on b complete k-phases (or k-blocks of a
/// conservative or marking algorithm): b + k - 1.
pub fn min_cost_lower_bound(b: usize, k: usize) -> usize {
    b + k - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{AccessGraph, GraphClass};

    fn seq(pages: &[u32]) -> RequestSequence {
        RequestSequence::from_pages(pages.iter().copied())
    }

    #[test]
    fn phases_zigzag() {
        let p = k_phases(&seq(&[1, 2, 3, 4, 3, 2]), 3);
        assert_eq!(p.boundaries, vec![0, 3]);
        assert_eq!(p.per_phase_distinct, vec![3, 3]);
        // The final phase has k distinct pages but nothing follows it.
        assert_eq!(p.complete_count(), 1);
        assert_eq!(p.full_phase_count(), 2);
    }

    #[test]
    fn phases_single_page() {
        let p = k_phases(&seq(&[1, 1, 1]), 2);
        assert_eq!(p.boundaries, vec![0]);
        assert_eq!(p.per_phase_distinct, vec![1]);
        assert_eq!(p.complete_count(), 0);
    }

    #[test]
    fn phases_three_way_split() {
        let p = k_phases(&seq(&[1, 2, 1, 3, 1, 2]), 2);
        assert_eq!(p.boundaries, vec![0, 3, 5]);
        assert_eq!(p.per_phase_distinct, vec![2, 2, 1]);
        assert_eq!(p.complete_count(), 2);
        assert_eq!(p.phase_of(0), 0);
        assert_eq!(p.phase_of(3), 1);
        assert_eq!(p.phase_of(5), 2);
    }

    #[test]
    fn empty_sequence_has_no_phases() {
        let p = k_phases(&seq(&[]), 3);
        assert_eq!(p.phase_count(), 0);
        assert_eq!(p.complete_count(), 0);
    }

    #[test]
    fn per_phase_fault_attribution() {
        let g = AccessGraph::new(GraphClass::Path, 4).unwrap();
        let cfg = CacheConfig::new(3, &g);
        let s = seq(&[1, 2, 3, 4, 3, 2]);
        let t = simulate(Algorithm::Lru, &s, &cfg).unwrap();
        let p = k_phases(&s, 3);
        assert_eq!(per_phase_faults(&t, &p), vec![3, 1]);
    }

    #[test]
    fn one_blocks_split_every_fault() {
        let g = AccessGraph::new(GraphClass::Complete, 2).unwrap();
        let cfg = CacheConfig::new(2, &g);
        let b = x_blocks(&seq(&[1, 2]), Algorithm::Lru, 1, &cfg).unwrap();
        assert_eq!(b.boundaries, vec![0, 1]);
        assert_eq!(b.per_block_faults, vec![1, 1]);
        assert_eq!(b.complete_count(), 2);
    }

    #[test]
    fn k_blocks_have_k_faults() {
        let g = AccessGraph::new(GraphClass::Path, 4).unwrap();
        let cfg = CacheConfig::new(3, &g);
        // FIFO faults 8 times on the doubled zigzag; k-blocks carry 3 faults
        // each except the tail.
        let s = seq(&[1, 2, 3, 4, 3, 2, 1, 2, 3, 4, 3, 2]);
        let b = x_blocks(&s, Algorithm::Fifo, 3, &cfg).unwrap();
        assert_eq!(b.per_block_faults.iter().sum::<usize>(), 8);
        for (i, &f) in b.per_block_faults.iter().enumerate() {
            if i + 1 < b.per_block_faults.len() {
                assert_eq!(f, 3);
            }
        }
        // Blocks are maximal: each inner boundary sits on a fault request.
        let t = simulate(Algorithm::Fifo, &s, &cfg).unwrap();
        for &start in &b.boundaries[1..] {
            assert!(t.outcomes[start].is_fault());
        }
    }

    #[test]
    fn min_cost_examples() {
        assert_eq!(min_cost_lower_bound(5, 3), 7);
        assert_eq!(min_cost_lower_bound(1, 4), 4);
        assert_eq!(min_cost_lower_bound(2, 2), 3);
    }
}
