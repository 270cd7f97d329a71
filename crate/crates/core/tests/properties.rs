//! Property tests for the structural invariants of graphs, engines, and
//! families. The heavier seeded statistical checks live in the acceptance
//! suite; these are the shrinkable versions.

use proptest::prelude::*;

use pagesim::analysis::{exhaustive_minmax, k_phases, SearchBudget};
use pagesim::engine::fault_count;
use pagesim::families::{FamilyId, FamilySpec};
use pagesim::graph::{AccessGraph, GraphClass, PageId, RequestSequence};
use pagesim::{simulate, Algorithm, CacheConfig};

fn graph_strategy() -> impl Strategy<Value = AccessGraph> {
    (0..4usize, 3..=9u32).prop_map(|(class_ix, n)| {
        let class = [
            GraphClass::Path,
            GraphClass::Star,
            GraphClass::Cycle,
            GraphClass::Complete,
        ][class_ix];
        AccessGraph::new(class, n).unwrap()
    })
}

/// A graph together with a walk respecting it, built from a start vertex and
/// neighbor choices.
fn walk_strategy() -> impl Strategy<Value = (AccessGraph, RequestSequence)> {
    (
        graph_strategy(),
        any::<u32>(),
        proptest::collection::vec(any::<u32>(), 0..40),
    )
        .prop_map(|(g, start, choices)| {
            let mut v = PageId(start % g.n_vertices() + 1);
            let mut pages = vec![v];
            for c in choices {
                let nbrs = g.neighbors(v);
                let pick = c as usize % (nbrs.len() + 1);
                v = if pick == nbrs.len() { v } else { nbrs[pick] };
                pages.push(v);
            }
            (g, RequestSequence::new(pages))
        })
}

proptest! {
    #[test]
    fn respects_is_reversal_invariant((g, seq) in walk_strategy()) {
        prop_assert!(g.respects(&seq));
        prop_assert!(g.respects(&seq.reversed()));
    }

    #[test]
    fn simulation_is_deterministic((g, seq) in walk_strategy(), k in 1..=6usize) {
        for alg in Algorithm::ALL {
            let cfg = CacheConfig::new(k, &g);
            let a = simulate(alg, &seq, &cfg).unwrap();
            let b = simulate(alg, &seq, &cfg).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.total_faults, a.outcomes.iter().filter(|o| o.is_fault()).count());
        }
    }

    #[test]
    fn resident_set_never_exceeds_k((g, seq) in walk_strategy(), k in 1..=6usize) {
        // Evictions only happen on faults with a full cache, one page for
        // LRU/FIFO/FAR and k pages for FWF.
        for alg in Algorithm::ALL {
            let cfg = CacheConfig::new(k, &g);
            let trace = simulate(alg, &seq, &cfg).unwrap();
            let mut resident = std::collections::BTreeSet::new();
            for o in &trace.outcomes {
                for v in &o.evicted {
                    prop_assert!(resident.remove(v), "evicted page was not resident");
                }
                if !o.evicted.is_empty() {
                    prop_assert!(o.is_fault());
                    if alg == Algorithm::Fwf {
                        prop_assert_eq!(o.evicted.len() + resident.len(), k);
                    } else {
                        prop_assert_eq!(o.evicted.len(), 1);
                    }
                }
                resident.insert(o.page);
                prop_assert!(resident.len() <= k);
            }
        }
    }

    #[test]
    fn fwf_dominates_everything((g, seq) in walk_strategy(), k in 1..=6usize) {
        let cfg = CacheConfig::new(k, &g);
        let fwf = fault_count(Algorithm::Fwf, &seq, &cfg).unwrap();
        for alg in [Algorithm::Lru, Algorithm::Fifo, Algorithm::Far] {
            prop_assert!(fault_count(alg, &seq, &cfg).unwrap() <= fwf);
        }
    }

    #[test]
    fn conservative_bounds_hold((g, seq) in walk_strategy(), k in 2..=6usize) {
        let cfg = CacheConfig::new(k, &g);
        let phases = k_phases(&seq, k);
        let b = phases.complete_count();
        let b_full = phases.full_phase_count();
        for alg in Algorithm::ALL {
            let f = fault_count(alg, &seq, &cfg).unwrap();
            if b >= 1 {
                prop_assert!(f >= b + k - 1, "{} faults {} < {}", alg, f, b + k - 1);
            }
        }
        let lru = fault_count(Algorithm::Lru, &seq, &cfg).unwrap();
        prop_assert!(lru < b_full * k + k);
    }

    #[test]
    fn conservative_windows_cap_faults((g, seq) in walk_strategy(), k in 2..=5usize) {
        // LRU and FIFO fault at most k times on any window with at most k
        // distinct pages; the sequences are short enough to check every
        // window start directly.
        let cfg = CacheConfig::new(k, &g);
        let pages = seq.as_slice();
        for alg in [Algorithm::Lru, Algorithm::Fifo] {
            let trace = simulate(alg, &seq, &cfg).unwrap();
            for start in 0..pages.len() {
                let mut distinct = std::collections::BTreeSet::new();
                let mut faults_in_window = 0;
                for (i, p) in pages.iter().enumerate().skip(start) {
                    distinct.insert(*p);
                    if distinct.len() > k {
                        break;
                    }
                    faults_in_window += trace.outcomes[i].is_fault() as usize;
                    prop_assert!(faults_in_window <= k, "{} window from {}", alg, start);
                }
            }
        }
    }

    #[test]
    fn family_sequences_respect_their_graphs(
        id_ix in 0..FamilyId::ALL.len(),
        k in 3..=6usize,
        n in 0..=4usize,
        r in 1..=3u32,
    ) {
        let id = FamilyId::ALL[id_ix];
        let mut spec = FamilySpec::new(id, k, n);
        if id.takes_r() {
            spec = spec.with_r(r.min(k as u32 - 1));
        }
        if let Ok(inst) = spec.expand() {
            prop_assert!(inst.graph.respects(&inst.sequence));
            prop_assert_eq!(inst.prediction.length, inst.sequence.len());
            let prefix = spec_prefix(spec);
            prop_assert_eq!(
                &inst.sequence.as_slice()[..inst.prefix_len.min(inst.sequence.len())],
                prefix.as_slice()
            );
        }
    }

    #[test]
    fn graph_json_round_trips(g in graph_strategy()) {
        let js = serde_json::to_string(&g).unwrap();
        let back: AccessGraph = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn minmax_symmetry_small(n in 1..=5usize, k in 2..=3usize) {
        let g = AccessGraph::new(GraphClass::Cycle, 4).unwrap();
        let budget = SearchBudget::default();
        let ab = exhaustive_minmax(Algorithm::Fifo, Algorithm::Lru, &g, k, n, budget).unwrap();
        let ba = exhaustive_minmax(Algorithm::Lru, Algorithm::Fifo, &g, k, n, budget).unwrap();
        prop_assert_eq!(ab.max_diff, -ba.min_diff);
        prop_assert_eq!(ab.min_diff, -ba.max_diff);
    }
}

/// The n = 0 expansion: the family's priming prefix.
fn spec_prefix(mut spec: FamilySpec) -> RequestSequence {
    spec.n = 0;
    match spec.expand() {
        Ok(inst) => inst.sequence,
        // Families without an n = 0 form (loop, turn) have an empty prefix.
        Err(_) => RequestSequence::default(),
    }
}
