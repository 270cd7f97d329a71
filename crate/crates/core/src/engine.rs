//! Step-by-step simulation of LRU, FIFO, FWF, and FAR.
//!
//! All four policies are demand paging: pages are brought in only on faults,
//! and evictions happen only on a fault with a full cache. The cache starts
//! empty, so the first k distinct pages fault without evicting anything.
//!
//! FAR is the one policy that consults the access graph. It is a marking
//! algorithm: every requested page is marked, and on a fault with every
//! resident page marked it first unmarks them all (this is exactly a k-phase
//! boundary). The victim is the unmarked resident page whose hop distance to
//! the nearest marked page is maximal, counting the incoming request as
//! marked; ties go to the least recently used candidate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AccessGraph, PageId, RequestSequence};

/// The paging policies under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "LRU")]
    Lru,
    #[serde(rename = "FIFO")]
    Fifo,
    #[serde(rename = "FWF")]
    Fwf,
    #[serde(rename = "FAR")]
    Far,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Lru,
        Algorithm::Fifo,
        Algorithm::Fwf,
        Algorithm::Far,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Lru => "LRU",
            Algorithm::Fifo => "FIFO",
            Algorithm::Fwf => "FWF",
            Algorithm::Far => "FAR",
        }
    }

    /// Marking algorithms never evict a page already requested in the
    /// current k-phase.
    pub fn is_marking(self) -> bool {
        matches!(self, Algorithm::Lru | Algorithm::Fwf | Algorithm::Far)
    }

    /// Conservative algorithms fault at most k times on any window with at
    /// most k distinct pages.
    pub fn is_conservative(self) -> bool {
        matches!(self, Algorithm::Lru | Algorithm::Fifo)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, EngineError> {
        match s.to_ascii_uppercase().as_str() {
            "LRU" => Ok(Algorithm::Lru),
            "FIFO" => Ok(Algorithm::Fifo),
            "FWF" => Ok(Algorithm::Fwf),
            "FAR" => Ok(Algorithm::Far),
            other => Err(EngineError::UnknownAlgorithm(other.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("unknown algorithm `{0}` (expected LRU, FIFO, FWF, or FAR)")]
    UnknownAlgorithm(String),
    #[error("page {page} outside 1..={n}")]
    InvalidPage { page: PageId, n: u32 },
}

/// Cache size plus the access graph (FAR needs it; carried for all).
///
/// The interesting regime is k < N; the engine still operates when k ≥ N,
/// every page eventually becoming a hit.
#[derive(Debug, Clone, Copy)]
pub struct CacheConfig<'g> {
    pub k: usize,
    pub graph: &'g AccessGraph,
}

impl<'g> CacheConfig<'g> {
    pub fn new(k: usize, graph: &'g AccessGraph) -> Self {
        CacheConfig { k, graph }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Hit,
    Fault,
}

/// What one request did: hit or fault, and which pages left the cache.
/// `evicted` is empty on hits and on faults with a non-full cache, a single
/// page for LRU/FIFO/FAR, and all k resident pages on an FWF flush.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    #[serde(rename = "i")]
    pub index: usize,
    pub page: PageId,
    pub kind: StepKind,
    pub evicted: Vec<PageId>,
}

impl StepOutcome {
    pub fn is_fault(&self) -> bool {
        self.kind == StepKind::Fault
    }
}

/// Membership flags over pages 1..=N with a running count.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PageFlags {
    bits: Vec<bool>,
    count: usize,
}

impl PageFlags {
    fn new(n: u32) -> Self {
        PageFlags {
            bits: vec![false; n as usize + 1],
            count: 0,
        }
    }

    fn contains(&self, p: PageId) -> bool {
        self.bits[p.index()]
    }

    fn insert(&mut self, p: PageId) {
        if !self.bits[p.index()] {
            self.bits[p.index()] = true;
            self.count += 1;
        }
    }

    fn remove(&mut self, p: PageId) {
        if self.bits[p.index()] {
            self.bits[p.index()] = false;
            self.count -= 1;
        }
    }

    fn clear(&mut self) {
        self.bits.fill(false);
        self.count = 0;
    }

    fn len(&self) -> usize {
        self.count
    }

    fn iter(&self) -> impl Iterator<Item = PageId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| PageId(i as u32))
    }
}

/// One algorithm's cache: the resident set plus whatever policy metadata the
/// algorithm needs (recency order, arrival order, mark set).
///
/// A pure value; [`step`](Self::step) mutates in place and the state can be
/// cloned cheaply, so search code can snapshot and restore freely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineState {
    algorithm: Algorithm,
    k: usize,
    resident: PageFlags,
    /// Resident pages, least recently used first (LRU order, FAR tie-break).
    recency: Vec<PageId>,
    /// Resident pages, oldest arrival first (FIFO order); hits don't touch it.
    arrival: Vec<PageId>,
    /// Marked pages (FWF, FAR); always a subset of `resident`.
    marks: PageFlags,
    next_index: usize,
}

impl EngineState {
    pub fn new(algorithm: Algorithm, cfg: &CacheConfig) -> Self {
        assert!(cfg.k >= 1, "cache size k must be at least 1");
        let n = cfg.graph.n_vertices();
        EngineState {
            algorithm,
            k: cfg.k,
            resident: PageFlags::new(n),
            recency: Vec::with_capacity(cfg.k),
            arrival: Vec::with_capacity(cfg.k),
            marks: PageFlags::new(n),
            next_index: 0,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn resident_pages(&self) -> Vec<PageId> {
        self.resident.iter().collect()
    }

    pub fn marked_pages(&self) -> Vec<PageId> {
        self.marks.iter().collect()
    }

    pub fn is_resident(&self, p: PageId) -> bool {
        self.resident.contains(p)
    }

    fn touch(&mut self, p: PageId) {
        if let Some(pos) = self.recency.iter().position(|&q| q == p) {
            self.recency.remove(pos);
        }
        self.recency.push(p);
    }

    /// Serves one request, returning what happened.
    pub fn step(&mut self, page: PageId, cfg: &CacheConfig) -> Result<StepOutcome, EngineError> {
        if !cfg.graph.contains(page) {
            return Err(EngineError::InvalidPage {
                page,
                n: cfg.graph.n_vertices(),
            });
        }
        let index = self.next_index;
        self.next_index += 1;

        if self.resident.contains(page) {
            match self.algorithm {
                Algorithm::Lru => self.touch(page),
                Algorithm::Fifo => {}
                Algorithm::Fwf => {
                    self.marks.insert(page);
                }
                Algorithm::Far => {
                    self.touch(page);
                    self.marks.insert(page);
                }
            }
            return Ok(StepOutcome {
                index,
                page,
                kind: StepKind::Hit,
                evicted: Vec::new(),
            });
        }

        let full = self.resident.len() >= self.k;
        let mut evicted = Vec::new();
        match self.algorithm {
            Algorithm::Fwf => {
                if full {
                    // Flush: all k resident pages leave and all marks clear.
                    evicted = self.resident.iter().collect();
                    self.resident.clear();
                    self.marks.clear();
                }
                self.resident.insert(page);
                self.marks.insert(page);
            }
            Algorithm::Fifo => {
                if full {
                    let victim = self.arrival.remove(0);
                    self.resident.remove(victim);
                    evicted.push(victim);
                }
                self.resident.insert(page);
                self.arrival.push(page);
            }
            Algorithm::Lru => {
                if full {
                    let victim = self.recency.remove(0);
                    self.resident.remove(victim);
                    evicted.push(victim);
                }
                self.resident.insert(page);
                self.recency.push(page);
            }
            Algorithm::Far => {
                // A fault with every resident page marked is a phase
                // boundary: unmark everything. Only applies once the cache
                // is full, so the initial fill stays inside the first phase.
                if full && self.marks.len() == self.resident.len() {
                    self.marks.clear();
                }
                if full {
                    let victim = self.far_victim(page, cfg.graph);
                    let pos = self.recency.iter().position(|&q| q == victim).unwrap();
                    self.recency.remove(pos);
                    self.resident.remove(victim);
                    evicted.push(victim);
                }
                self.resident.insert(page);
                self.recency.push(page);
                self.marks.insert(page);
            }
        }
        Ok(StepOutcome {
            index,
            page,
            kind: StepKind::Fault,
            evicted,
        })
    }

    /// FAR's victim: the unmarked resident page farthest from the marked set,
    /// where the incoming request already counts as marked. Unreachable
    /// candidates rank above every finite distance. Scanning the recency list
    /// oldest-first with a strict `>` makes ties fall to the LRU page.
    fn far_victim(&self, incoming: PageId, graph: &AccessGraph) -> PageId {
        let mut sources: Vec<PageId> = self.marks.iter().collect();
        sources.push(incoming);
        let dist = graph.distances_to_nearest(&sources);
        let mut best: Option<(u64, PageId)> = None;
        for &cand in &self.recency {
            if self.marks.contains(cand) {
                continue;
            }
            let rank = dist[cand.index()].map_or(u64::MAX, u64::from);
            if best.is_none_or(|(b, _)| rank > b) {
                best = Some((rank, cand));
            }
        }
        best.expect("a full cache of k >= 1 pages cannot be fully marked here")
            .1
    }
}

/// Hop distance from an unmarked page to the nearest marked page, the value
/// FAR maximizes when evicting. `None` means no marked page is reachable,
/// which FAR ranks above every finite distance.
pub fn far_distance(page: PageId, marked: &[PageId], graph: &AccessGraph) -> Option<u32> {
    let dist = graph.distances_to_nearest(marked);
    dist[page.index()]
}

/// Everything one simulation run produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationTrace {
    pub algorithm: Algorithm,
    pub outcomes: Vec<StepOutcome>,
    pub total_faults: usize,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Indices of the faulting requests.
    pub fn fault_indices(&self) -> Vec<usize> {
        self.outcomes
            .iter()
            .filter(|o| o.is_fault())
            .map(|o| o.index)
            .collect()
    }

    /// One JSON object per step, newline separated.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            s.push_str(&serde_json::to_string(o).expect("trace serializes"));
            s.push('\n');
        }
        s
    }
}

/// Folds [`EngineState::step`] over a sequence from an empty cache.
///
/// Does not check that the sequence respects the graph; callers that want
/// that run [`AccessGraph::check_respects`] first. Out-of-range pages are
/// still rejected.
pub fn simulate(
    algorithm: Algorithm,
    seq: &RequestSequence,
    cfg: &CacheConfig,
) -> Result<SimulationTrace, EngineError> {
    let mut state = EngineState::new(algorithm, cfg);
    let mut outcomes = Vec::with_capacity(seq.len());
    let mut total_faults = 0;
    for &p in seq.iter() {
        let o = state.step(p, cfg)?;
        total_faults += o.is_fault() as usize;
        outcomes.push(o);
    }
    Ok(SimulationTrace {
        algorithm,
        outcomes,
        total_faults,
    })
}

/// Fault counts only, for the common case where the trace is not needed.
pub fn fault_count(
    algorithm: Algorithm,
    seq: &RequestSequence,
    cfg: &CacheConfig,
) -> Result<usize, EngineError> {
    let mut state = EngineState::new(algorithm, cfg);
    let mut total = 0;
    for &p in seq.iter() {
        total += state.step(p, cfg)?.is_fault() as usize;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphClass;

    fn seq(pages: &[u32]) -> RequestSequence {
        RequestSequence::from_pages(pages.iter().copied())
    }

    fn run(alg: Algorithm, pages: &[u32], k: usize, g: &AccessGraph) -> SimulationTrace {
        simulate(alg, &seq(pages), &CacheConfig::new(k, g)).unwrap()
    }

    #[test]
    fn lru_evicts_least_recent() {
        let g = AccessGraph::new(GraphClass::Complete, 3).unwrap();
        let t = run(Algorithm::Lru, &[1, 2, 3], 2, &g);
        assert_eq!(t.total_faults, 3);
        assert_eq!(t.outcomes[2].evicted, vec![PageId(1)]);
    }

    #[test]
    fn fifo_ignores_hits() {
        // Request 1 again (hit), then 3: FIFO still evicts 1, the oldest arrival.
        let g = AccessGraph::new(GraphClass::Complete, 3).unwrap();
        let t = run(Algorithm::Fifo, &[1, 2, 1, 3], 2, &g);
        assert_eq!(t.outcomes[2].kind, StepKind::Hit);
        assert_eq!(t.outcomes[3].evicted, vec![PageId(1)]);

        let t = run(Algorithm::Lru, &[1, 2, 1, 3], 2, &g);
        assert_eq!(t.outcomes[3].evicted, vec![PageId(2)]);
    }

    #[test]
    fn fwf_flushes_whole_cache() {
        let g = AccessGraph::new(GraphClass::Complete, 4).unwrap();
        let t = run(Algorithm::Fwf, &[1, 2, 3, 4], 3, &g);
        assert_eq!(t.outcomes[3].evicted, vec![PageId(1), PageId(2), PageId(3)]);
        assert_eq!(t.total_faults, 4);
    }

    #[test]
    fn evictions_only_on_full_cache_faults() {
        let g = AccessGraph::new(GraphClass::Complete, 5).unwrap();
        for alg in Algorithm::ALL {
            let t = run(alg, &[1, 2, 3], 4, &g);
            assert!(t.outcomes.iter().all(|o| o.evicted.is_empty()), "{alg}");
        }
    }

    #[test]
    fn far_phase_start_evicts_middle_of_unmarked_segment() {
        // Cycle(8), k=7: the fault on page 8 starts a new phase; all of 1..7
        // is unmarked and FAR evicts its midpoint, page 4.
        let g = AccessGraph::new(GraphClass::Cycle, 8).unwrap();
        let t = run(Algorithm::Far, &[1, 2, 3, 4, 5, 6, 7, 8], 7, &g);
        assert_eq!(t.outcomes[7].evicted, vec![PageId(4)]);
    }

    #[test]
    fn far_distance_examples() {
        let c5 = AccessGraph::new(GraphClass::Cycle, 5).unwrap();
        assert_eq!(far_distance(PageId(3), &[PageId(1)], &c5), Some(2));

        let p4 = AccessGraph::new(GraphClass::Path, 4).unwrap();
        assert_eq!(far_distance(PageId(4), &[PageId(2)], &p4), Some(2));

        // Star: with the center marked every leaf sits at distance 1.
        let s4 = AccessGraph::new(GraphClass::Star, 4).unwrap();
        for leaf in 1..=3 {
            assert_eq!(far_distance(PageId(leaf), &[PageId(4)], &s4), Some(1));
        }

        let disconnected = AccessGraph::custom(4, &[(1, 2)]).unwrap();
        assert_eq!(far_distance(PageId(3), &[PageId(1)], &disconnected), None);
    }

    #[test]
    fn far_unreachable_candidates_evicted_first() {
        // 1-2 form one component, 3-4 another. After 1,2,3 the cache is
        // full; requesting 4 marks {3,4}; candidates 1 and 2 are unreachable
        // from the marked set, so one of them goes, by LRU order page 1.
        let g = AccessGraph::custom(4, &[(1, 2), (3, 4)]).unwrap();
        let mut st = EngineState::new(Algorithm::Far, &CacheConfig::new(3, &g));
        let cfg = CacheConfig::new(3, &g);
        for p in [1, 2, 3] {
            st.step(PageId(p), &cfg).unwrap();
        }
        let o = st.step(PageId(4), &cfg).unwrap();
        assert_eq!(o.evicted, vec![PageId(1)]);
    }

    #[test]
    fn path_zigzag_counts_match_known_values() {
        // I = <1,2,3,4,3,2> twice on path(4) with k=3.
        let g = AccessGraph::new(GraphClass::Path, 4).unwrap();
        let i2 = [1, 2, 3, 4, 3, 2, 1, 2, 3, 4, 3, 2];
        assert_eq!(run(Algorithm::Lru, &i2, 3, &g).total_faults, 6);
        assert_eq!(run(Algorithm::Far, &i2, 3, &g).total_faults, 6);
        assert_eq!(run(Algorithm::Fwf, &i2, 3, &g).total_faults, 12);
        assert_eq!(run(Algorithm::Fifo, &i2, 3, &g).total_faults, 8);
    }

    #[test]
    fn fifo_lru_separation_on_k3() {
        let g = AccessGraph::new(GraphClass::Complete, 3).unwrap();
        assert_eq!(
            run(Algorithm::Fifo, &[1, 2, 1, 3, 1, 2], 2, &g).total_faults,
            5
        );
        assert_eq!(
            run(Algorithm::Lru, &[1, 2, 1, 3, 1, 2], 2, &g).total_faults,
            4
        );
    }

    #[test]
    fn oversized_cache_never_evicts() {
        let g = AccessGraph::new(GraphClass::Cycle, 4).unwrap();
        let t = run(Algorithm::Far, &[1, 2, 3, 4, 1, 2, 3, 4], 6, &g);
        assert_eq!(t.total_faults, 4);
        assert!(t.outcomes.iter().all(|o| o.evicted.is_empty()));
    }

    #[test]
    fn invalid_page_rejected() {
        let g = AccessGraph::new(GraphClass::Path, 3).unwrap();
        let err = simulate(Algorithm::Lru, &seq(&[1, 2, 7]), &CacheConfig::new(2, &g));
        assert_eq!(
            err.unwrap_err(),
            EngineError::InvalidPage {
                page: PageId(7),
                n: 3
            }
        );
    }

    #[test]
    fn trace_json_lines_shape() {
        let g = AccessGraph::new(GraphClass::Path, 3).unwrap();
        let t = run(Algorithm::Lru, &[1, 2], 2, &g);
        let jsonl = t.to_json_lines();
        let lines: Vec<&str> = jsonl.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], r#"{"i":0,"page":1,"kind":"fault","evicted":[]}"#);
    }

    #[test]
    fn algorithm_parsing() {
        assert_eq!("lru".parse::<Algorithm>().unwrap(), Algorithm::Lru);
        assert_eq!("FAR".parse::<Algorithm>().unwrap(), Algorithm::Far);
        assert!("opt".parse::<Algorithm>().is_err());
    }
}
