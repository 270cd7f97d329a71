//! Adversarial request-sequence families with closed-form predicted costs.
//!
//! Each family expands to a concrete sequence plus the predicted fault count
//! per algorithm where a closed form is known. Predictions are exact counts,
//! not asymptotics, and `validate-families` checks them against simulation.
//! Four predictions are known not to match exact simulation; see the README's
//! "known model discrepancies" section. They are kept as stated so the
//! validator surfaces them rather than hiding them.
//!
//! Conventions: star families place the center at vertex N (leaves keep the
//! labels 1..N-1); cycle families index pages modulo N, normalizing into
//! 1..=N before emitting; row matrices are emitted row-major, top to bottom.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::cycle_model::{floor_log2, CycleFaultModel};
use crate::engine::{fault_count, Algorithm, CacheConfig};
use crate::graph::{AccessGraph, GraphClass, RequestSequence};

pub type Rat = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyId {
    /// `<1..k, k+1, k..2>^n` on path(k+1).
    PathZigzag,
    /// Priming prefix R, then `<k+1,k,..,1,2,..,k>^(h*n)` on path(k+1);
    /// separates FWF from FIFO. Even k inserts one request to k after R.
    FwfFifoPath,
    /// `<P, J^n>` with J = (k-1) identical descending leaf blocks on a star.
    StarMin,
    /// `<P, B^n>` with B a k-row zigzag leaf matrix on a star.
    StarMax,
    /// `<P, (B1, B2)^n>` alternating 1-free and k-free blocks on a star.
    StarFwfLru,
    /// `<P, B^n>` with B a k-row matrix whose i-th row is i-free, on a star.
    StarFwfFifo,
    /// `<P, B^n>` descending around cycle(k+r) in R rows of k.
    CycleRows,
    /// `<S_0..S_n>` shifted zigzags on cycle(N).
    CycleShiftZigzag,
    /// `<1..N>^n`: plain loops around cycle(N).
    CycleLoop,
    /// `<1..N, N-1..2>^n`: loop out and turn back, on cycle(N).
    CycleTurn,
}

impl FamilyId {
    pub const ALL: [FamilyId; 10] = [
        FamilyId::PathZigzag,
        FamilyId::FwfFifoPath,
        FamilyId::StarMin,
        FamilyId::StarMax,
        FamilyId::StarFwfLru,
        FamilyId::StarFwfFifo,
        FamilyId::CycleRows,
        FamilyId::CycleShiftZigzag,
        FamilyId::CycleLoop,
        FamilyId::CycleTurn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::PathZigzag => "path_zigzag",
            FamilyId::FwfFifoPath => "fwf_fifo_path",
            FamilyId::StarMin => "star_min",
            FamilyId::StarMax => "star_max",
            FamilyId::StarFwfLru => "star_fwf_lru",
            FamilyId::StarFwfFifo => "star_fwf_fifo",
            FamilyId::CycleRows => "cycle_rows",
            FamilyId::CycleShiftZigzag => "cycle_shift_zigzag",
            FamilyId::CycleLoop => "cycle_loop",
            FamilyId::CycleTurn => "cycle_turn",
        }
    }

    pub fn graph_class(self) -> GraphClass {
        match self {
            FamilyId::PathZigzag | FamilyId::FwfFifoPath => GraphClass::Path,
            FamilyId::StarMin
            | FamilyId::StarMax
            | FamilyId::StarFwfLru
            | FamilyId::StarFwfFifo => GraphClass::Star,
            _ => GraphClass::Cycle,
        }
    }

    /// Does this family take an `r` parameter (with N = k + r)?
    pub fn takes_r(self) -> bool {
        self == FamilyId::CycleRows
    }

    /// The algorithm pair whose fault difference the family was built to
    /// stretch; used as the default for difference-ratio curves.
    pub fn ratio_pair(self) -> (Algorithm, Algorithm) {
        match self {
            FamilyId::PathZigzag
            | FamilyId::StarMin
            | FamilyId::StarMax
            | FamilyId::CycleRows
            | FamilyId::CycleShiftZigzag => (Algorithm::Fifo, Algorithm::Lru),
            FamilyId::FwfFifoPath | FamilyId::StarFwfFifo => (Algorithm::Fwf, Algorithm::Fifo),
            FamilyId::StarFwfLru => (Algorithm::Fwf, Algorithm::Lru),
            FamilyId::CycleLoop | FamilyId::CycleTurn => (Algorithm::Lru, Algorithm::Far),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, FamilyError> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("{family}: {reason}")]
    BadParams { family: FamilyId, reason: String },
}

fn bad(family: FamilyId, reason: impl Into<String>) -> FamilyError {
    FamilyError::BadParams {
        family,
        reason: reason.into(),
    }
}

/// Parameters selecting one member of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub id: FamilyId,
    /// Cache size.
    pub k: usize,
    /// Repetition count; `n = 0` yields the priming prefix alone.
    pub n: usize,
    /// Vertex count, for families where it is free (cycle families; for
    /// path/star families it defaults to k+1 and only widens the graph).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_vertices: Option<u32>,
    /// Cycle surplus r = N - k (cycle_rows only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
}

impl FamilySpec {
    pub fn new(id: FamilyId, k: usize, n: usize) -> Self {
        FamilySpec {
            id,
            k,
            n,
            n_vertices: None,
            r: None,
        }
    }

    pub fn with_n_vertices(mut self, n_vertices: u32) -> Self {
        self.n_vertices = Some(n_vertices);
        self
    }

    pub fn with_r(mut self, r: u32) -> Self {
        self.r = Some(r);
        self
    }
}

/// Exact predicted fault counts for the algorithms with known closed forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyPrediction {
    pub length: usize,
    pub predicted_faults: BTreeMap<Algorithm, u64>,
    /// Where the numbers come from, e.g. the closed form used.
    pub source: String,
}

/// A family member made concrete: graph, sequence, and predictions.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyInstance {
    pub spec: FamilySpec,
    pub graph: AccessGraph,
    pub sequence: RequestSequence,
    pub prediction: FamilyPrediction,
    /// Length of the priming prefix (the part emitted when n = 0).
    pub prefix_len: usize,
}

impl FamilySpec {
    /// Builds the concrete sequence, its graph, and the predicted costs.
    pub fn expand(&self) -> Result<FamilyInstance, FamilyError> {
        match self.id {
            FamilyId::PathZigzag => self.expand_path_zigzag(),
            FamilyId::FwfFifoPath => self.expand_fwf_fifo_path(),
            FamilyId::StarMin => self.expand_star_min(),
            FamilyId::StarMax => self.expand_star_max(),
            FamilyId::StarFwfLru => self.expand_star_fwf_lru(),
            FamilyId::StarFwfFifo => self.expand_star_fwf_fifo(),
            FamilyId::CycleRows => self.expand_cycle_rows(),
            FamilyId::CycleShiftZigzag => self.expand_cycle_shift_zigzag(),
            FamilyId::CycleLoop => self.expand_cycle_loop(),
            FamilyId::CycleTurn => self.expand_cycle_turn(),
        }
    }

    /// The asymptotic fault-difference ratio this family converges to for
    /// the given ordered pair, where one is known.
    pub fn stated_limit(&self, pair: (Algorithm, Algorithm)) -> Option<Rat> {
        use Algorithm::*;
        if let Some(v) = self.stated_limit_directed(pair) {
            return Some(v);
        }
        // Reversed pairs converge to the negated ratio.
        if let Some(v) = self.stated_limit_directed((pair.1, pair.0)) {
            return Some(-v);
        }
        // FAR and LRU coincide on paths and stars, so limits transfer.
        let far_as_lru = |a: Algorithm| if a == Far { Lru } else { a };
        let on_path_or_star = matches!(self.id.graph_class(), GraphClass::Path | GraphClass::Star);
        if on_path_or_star && (pair.0 == Far || pair.1 == Far) {
            let alias = (far_as_lru(pair.0), far_as_lru(pair.1));
            if alias != pair {
                if alias.0 == alias.1 {
                    return Some(Rat::from_integer(0));
                }
                return self.stated_limit(alias);
            }
        }
        None
    }

    fn stated_limit_directed(&self, pair: (Algorithm, Algorithm)) -> Option<Rat> {
        use Algorithm::*;
        let k = self.k as i64;
        match (self.id, pair) {
            (FamilyId::PathZigzag, (Fifo, Lru)) => Some(Rat::new(k - 1, 2 * k)),
            (FamilyId::PathZigzag, (Fwf, Lru)) => Some(Rat::new(k - 1, k)),
            (FamilyId::PathZigzag, (Fwf, Fifo)) => {
                // FWF faults on all 2kn requests, FIFO on (k+1)n of them.
                Some(Rat::new(2 * k - (k + 1), 2 * k))
            }
            (FamilyId::FwfFifoPath, (Fwf, Fifo)) => {
                let h = (k + 1) / 2;
                Some(Rat::new(2 * k * h - (k + 1), 2 * k * h))
            }
            (FamilyId::StarMin, (Fifo, Lru)) => {
                Some(Rat::new(-1, 2) + Rat::new(k + 1, 2 * k * (k - 1)))
            }
            (FamilyId::StarMax, (Fifo, Lru)) => Some(Rat::new(k - 1, 4 * k - 6)),
            (FamilyId::StarFwfLru, (Fwf, Lru)) => Some(Rat::new(1, 2)),
            (FamilyId::StarFwfFifo, (Fwf, Fifo)) => Some(Rat::new(1, 2)),
            (FamilyId::CycleRows, (Fifo, Lru)) => {
                let r = self.r? as i64;
                Some(Rat::new(-(k - r), k))
            }
            (FamilyId::CycleShiftZigzag, (Fifo, Lru)) => Some(Rat::new(k - 1, 2 * k - 1)),
            (FamilyId::CycleLoop, (Lru, Far))
            | (FamilyId::CycleLoop, (Fifo, Far))
            | (FamilyId::CycleLoop, (Fwf, Far)) => {
                let n = self.n_vertices? as usize;
                let model = CycleFaultModel::new(n as u32, self.k).ok()?;
                Some(Rat::from_integer(1) - Rat::new(model.x_r as i64, k))
            }
            (FamilyId::CycleTurn, (Lru, Far)) => {
                let n = self.n_vertices? as i64;
                let model = CycleFaultModel::new(n as u32, self.k).ok()?;
                let per_phase = model.turning_phase_faults() as i64;
                let r = n - k;
                Some(Rat::new(r - per_phase, n - 1))
            }
            _ => None,
        }
    }

    // ---- shared helpers -------------------------------------------------

    fn graph_n(&self, default: u32, min: u32, family: FamilyId) -> Result<u32, FamilyError> {
        let n = self.n_vertices.unwrap_or(default);
        if n < min {
            return Err(bad(family, format!("needs N >= {min}, got {n}")));
        }
        Ok(n)
    }

    fn require_k(&self, min: usize, family: FamilyId) -> Result<(), FamilyError> {
        if self.k < min {
            return Err(bad(family, format!("needs k >= {min}, got {}", self.k)));
        }
        Ok(())
    }

    fn instance(
        &self,
        graph: AccessGraph,
        pages: Vec<u32>,
        prefix_len: usize,
        predicted: BTreeMap<Algorithm, u64>,
        source: &str,
    ) -> FamilyInstance {
        let sequence = RequestSequence::from_pages(pages);
        debug_assert!(graph.respects(&sequence));
        FamilyInstance {
            spec: *self,
            prediction: FamilyPrediction {
                length: sequence.len(),
                predicted_faults: predicted,
                source: source.to_string(),
            },
            graph,
            sequence,
            prefix_len,
        }
    }

    // ---- path families --------------------------------------------------

    fn expand_path_zigzag(&self) -> Result<FamilyInstance, FamilyError> {
        self.require_k(2, FamilyId::PathZigzag)?;
        let k = self.k as u32;
        let n_vertices = self.graph_n(k + 1, k + 1, FamilyId::PathZigzag)?;
        let graph = AccessGraph::new(GraphClass::Path, n_vertices).unwrap();

        let mut unit: Vec<u32> = (1..=k + 1).collect();
        unit.extend((2..=k).rev());
        let pages: Vec<u32> = std::iter::repeat_with(|| unit.iter().copied())
            .take(self.n)
            .flatten()
            .collect();

        let (k64, n64) = (self.k as u64, self.n as u64);
        let mut predicted = BTreeMap::new();
        if self.n == 0 {
            for alg in Algorithm::ALL {
                predicted.insert(alg, 0);
            }
        } else {
            predicted.insert(Algorithm::Lru, 2 * n64 + k64 - 1);
            predicted.insert(Algorithm::Far, 2 * n64 + k64 - 1);
            predicted.insert(Algorithm::Fwf, 2 * k64 * n64);
            predicted.insert(Algorithm::Fifo, (k64 + 1) * n64);
        }
        Ok(self.instance(
            graph,
            pages,
            0,
            predicted,
            "closed forms: LRU=FAR=2n+k-1, FWF=2kn, FIFO=(k+1)n",
        ))
    }

    fn expand_fwf_fifo_path(&self) -> Result<FamilyInstance, FamilyError> {
        self.require_k(3, FamilyId::FwfFifoPath)?;
        let k = self.k as u32;
        let n_vertices = self.graph_n(k + 1, k + 1, FamilyId::FwfFifoPath)?;
        let graph = AccessGraph::new(GraphClass::Path, n_vertices).unwrap();
        let h = self.k.div_ceil(2);

        // R primes FIFO's arrival order: start at h, then widening sweeps
        // S_i = <h+i, ..., h-i, ..., h+i>.
        let h32 = h as u32;
        let mut pages: Vec<u32> = vec![h32];
        for i in 1..h32 {
            pages.extend((h32 - i..=h32 + i).rev());
            pages.extend(h32 - i + 1..=h32 + i);
        }
        if self.k.is_multiple_of(2) {
            pages.push(k); // k hasn't been requested yet when k is even
        }
        let prefix_len = pages.len();

        let mut unit: Vec<u32> = (1..=k + 1).rev().collect();
        unit.extend(2..=k);
        for _ in 0..self.n * h {
            pages.extend(unit.iter().copied());
        }

        // The prefix costs the same for FWF and FIFO; measure it and add the
        // closed forms for the repeated part on top.
        let prefix = RequestSequence::from_pages(pages[..prefix_len].iter().copied());
        let cfg = CacheConfig::new(self.k, &graph);
        let fwf_prefix = fault_count(Algorithm::Fwf, &prefix, &cfg).unwrap() as u64;
        let fifo_prefix = fault_count(Algorithm::Fifo, &prefix, &cfg).unwrap() as u64;

        let (k64, n64, h64) = (self.k as u64, self.n as u64, h as u64);
        let mut predicted = BTreeMap::new();
        predicted.insert(Algorithm::Fwf, fwf_prefix + 2 * k64 * h64 * n64);
        predicted.insert(Algorithm::Fifo, fifo_prefix + (k64 + 1) * n64);

        Ok(self.instance(
            graph,
            pages,
            prefix_len,
            predicted,
            "closed forms on the repeated part: FWF=2khn, FIFO=(k+1)n; prefix measured",
        ))
    }

    // ---- star families --------------------------------------------------

    /// Star graph with the center at vertex N; sequences use leaves 1..=k.
    fn star_graph(&self, family: FamilyId) -> Result<(AccessGraph, u32), FamilyError> {
        self.require_k(3, family)?;
        let k = self.k as u32;
        let n_vertices = self.graph_n(k + 1, k + 1, family)?;
        let graph = AccessGraph::new(GraphClass::Star, n_vertices).unwrap();
        Ok((graph, n_vertices)) // center = n_vertices
    }

    /// `<x1, s, x2, s, ...>`: every leaf visit returns to the center.
    fn leaf_walk(leaves: impl IntoIterator<Item = u32>, s: u32, out: &mut Vec<u32>) {
        for leaf in leaves {
            out.push(leaf);
            out.push(s);
        }
    }

    fn expand_star_min(&self) -> Result<FamilyInstance, FamilyError> {
        let (graph, s) = self.star_graph(FamilyId::StarMin)?;
        let k = self.k as u32;

        // P sweeps the leaves 1..k-1 up and back down (excluding k).
        let mut pages = Vec::new();
        Self::leaf_walk((1..k).chain((1..k - 1).rev()), s, &mut pages);
        let prefix_len = pages.len();
        // J = k-1 identical blocks <k, s, k-1, s, ..., 1, s>.
        for _ in 0..self.n * (self.k - 1) {
            Self::leaf_walk((1..=k).rev(), s, &mut pages);
        }

        let (k64, n64) = (self.k as u64, self.n as u64);
        let mut predicted = BTreeMap::new();
        if self.n == 0 {
            for alg in Algorithm::ALL {
                predicted.insert(alg, k64);
            }
        } else {
            predicted.insert(Algorithm::Lru, k64 + (k64 - 1) * k64 * n64);
            predicted.insert(Algorithm::Fifo, k64 + (k64 + 1) * n64);
        }
        Ok(self.instance(
            graph,
            pages,
            prefix_len,
            predicted,
            "closed forms: LRU=k+(k-1)kn, FIFO=k+(k+1)n",
        ))
    }

    /// Leaf label arithmetic modulo the k leaves (1..=k).
    fn leaf(v: i64, k: i64) -> u32 {
        (v - 1).rem_euclid(k) as u32 + 1
    }

    fn expand_star_max(&self) -> Result<FamilyInstance, FamilyError> {
        let (graph, s) = self.star_graph(FamilyId::StarMax)?;
        let k = self.k as i64;

        let mut pages = Vec::new();
        Self::leaf_walk(1..self.k as u32, s, &mut pages);
        let prefix_len = pages.len();

        // B has one row per leaf m = k..1: walk down m+k-2, ..., m+1, m and
        // back up to m+k-2, center after every leaf. LRU faults once per row
        // (at the turning leaf m); FIFO chases the whole row.
        for _ in 0..self.n {
            for m in (1..=k).rev() {
                let down = (0..k - 1).map(|j| Self::leaf(m + k - 2 - j, k));
                let up = (1..=k - 2).map(|j| Self::leaf(m + j, k));
                Self::leaf_walk(down.chain(up), s, &mut pages);
            }
        }

        let (k64, n64) = (self.k as u64, self.n as u64);
        let mut predicted = BTreeMap::new();
        if self.n == 0 {
            for alg in Algorithm::ALL {
                predicted.insert(alg, k64);
            }
        } else {
            predicted.insert(Algorithm::Lru, k64 + k64 * n64);
            // Known discrepancy: exact simulation gives k + (k^2-1)n.
            predicted.insert(Algorithm::Fifo, k64 + k64 * k64 * n64);
        }
        Ok(self.instance(
            graph,
            pages,
            prefix_len,
            predicted,
            "closed forms: LRU=k+kn, FIFO=k+k^2*n (FIFO known to simulate as k+(k^2-1)n)",
        ))
    }

    fn expand_star_fwf_lru(&self) -> Result<FamilyInstance, FamilyError> {
        let (graph, s) = self.star_graph(FamilyId::StarFwfLru)?;
        let k = self.k as u32;

        let mut pages = Vec::new();
        Self::leaf_walk(1..k, s, &mut pages);
        let prefix_len = pages.len();
        for _ in 0..self.n {
            Self::leaf_walk((2..=k).rev(), s, &mut pages); // B1: 1-free
            Self::leaf_walk(1..k, s, &mut pages); // B2: k-free
        }

        let (k64, n64) = (self.k as u64, self.n as u64);
        let mut predicted = BTreeMap::new();
        if self.n == 0 {
            for alg in Algorithm::ALL {
                predicted.insert(alg, k64);
            }
        } else {
            predicted.insert(Algorithm::Lru, 2 * n64 + k64);
            predicted.insert(Algorithm::Fwf, 2 * k64 * n64 + k64);
        }
        Ok(self.instance(
            graph,
            pages,
            prefix_len,
            predicted,
            "closed forms: LRU=2n+k, FWF=2kn+k",
        ))
    }

    fn expand_star_fwf_fifo(&self) -> Result<FamilyInstance, FamilyError> {
        let (graph, s) = self.star_graph(FamilyId::StarFwfFifo)?;
        let k = self.k as i64;

        let mut pages = Vec::new();
        Self::leaf_walk(1..self.k as u32, s, &mut pages);
        let prefix_len = pages.len();
        // Row i is i-free: the k-1 other leaves in descending cyclic order
        // starting at i-1 (row 1 starts at k).
        for _ in 0..self.n {
            for i in 1..=k {
                let row = (0..k - 1).map(|j| Self::leaf(i - 1 - j, k));
                Self::leaf_walk(row, s, &mut pages);
            }
        }

        let (k64, n64) = (self.k as u64, self.n as u64);
        let mut predicted = BTreeMap::new();
        if self.n == 0 {
            for alg in Algorithm::ALL {
                predicted.insert(alg, k64);
            }
        } else {
            // Known discrepancy: exact simulation gives (k+1)n + k, and no
            // ordering of i-free rows can reach kn + k (the center page must
            // age out of FIFO's queue once per block).
            predicted.insert(Algorithm::Fifo, k64 * n64 + k64);
            predicted.insert(Algorithm::Fwf, k64 * k64 * n64 + k64);
        }
        Ok(self.instance(
            graph,
            pages,
            prefix_len,
            predicted,
            "closed forms: FIFO=kn+k, FWF=k^2*n+k (FIFO known to simulate as (k+1)n+k)",
        ))
    }

    // ---- cycle families -------------------------------------------------

    fn cycle_page(v: i64, n: i64) -> u32 {
        (v - 1).rem_euclid(n) as u32 + 1
    }

    fn expand_cycle_rows(&self) -> Result<FamilyInstance, FamilyError> {
        let id = FamilyId::CycleRows;
        self.require_k(2, id)?;
        let r = self.r.ok_or_else(|| bad(id, "needs r (with N = k + r)"))? as usize;
        if r < 1 || r > self.k - 1 {
            return Err(bad(
                id,
                format!("needs 1 <= r <= k-1, got r={r}, k={}", self.k),
            ));
        }
        let n_vertices = (self.k + r) as u32;
        if let Some(nv) = self.n_vertices {
            if nv != n_vertices {
                return Err(bad(
                    id,
                    format!("N must equal k+r = {n_vertices}, got {nv}"),
                ));
            }
        }
        let graph = AccessGraph::new(GraphClass::Cycle, n_vertices).unwrap();
        let rows = n_vertices as usize / n_vertices.gcd(&(r as u32)) as usize; // R = lcm(N,r)/r

        let nn = n_vertices as i64;
        let mut pages: Vec<u32> = (1..=n_vertices).collect();
        pages.extend(1..r as u32);
        let prefix_len = pages.len();
        // B: row i is the descending k-run ending the turn, starting at i*r.
        for _ in 0..self.n {
            for i in 1..=rows as i64 {
                for j in 0..self.k as i64 {
                    pages.push(Self::cycle_page(i * r as i64 - j, nn));
                }
            }
        }

        let (k64, n64, r64, big_n, rows64) = (
            self.k as u64,
            self.n as u64,
            r as u64,
            n_vertices as u64,
            rows as u64,
        );
        let mut predicted = BTreeMap::new();
        if self.n == 0 {
            predicted.insert(Algorithm::Lru, big_n + r64 - 1);
            predicted.insert(Algorithm::Fifo, big_n + r64 - 1);
        } else {
            // FIFO's closed form is exact iff r divides N; FWF tracks LRU up
            // to a warm-up constant. Both kept as stated for the validator.
            predicted.insert(Algorithm::Fifo, big_n + r64 * rows64 * n64);
            predicted.insert(Algorithm::Lru, big_n + r64 - k64 + k64 * rows64 * n64);
            predicted.insert(Algorithm::Fwf, big_n + r64 - k64 + k64 * rows64 * n64);
        }
        Ok(self.instance(
            graph,
            pages,
            prefix_len,
            predicted,
            "closed forms: FIFO=N+rRn (exact iff r|N), LRU=N+r-k+kRn, FWF stated equal to LRU",
        ))
    }

    fn expand_cycle_shift_zigzag(&self) -> Result<FamilyInstance, FamilyError> {
        let id = FamilyId::CycleShiftZigzag;
        self.require_k(2, id)?;
        let k = self.k as i64;
        let n_vertices = self.graph_n(self.k as u32 + 1, self.k as u32 + 1, id)?;
        let graph = AccessGraph::new(GraphClass::Cycle, n_vertices).unwrap();
        let nn = n_vertices as i64;

        // S_i = <i+k, ..., i+1, i+2, ..., i+k>, reduced modulo N.
        let mut pages = Vec::new();
        for i in 0..=self.n as i64 {
            for j in 0..k - 1 {
                pages.push(Self::cycle_page(i + k - j, nn));
            }
            for j in 1..=k {
                pages.push(Self::cycle_page(i + j, nn));
            }
        }
        let prefix_len = (2 * self.k - 1).min(pages.len());

        let (k64, n64) = (self.k as u64, self.n as u64);
        let mut predicted = BTreeMap::new();
        predicted.insert(Algorithm::Lru, k64 + n64);
        predicted.insert(Algorithm::Fifo, k64 + k64 * n64);
        Ok(self.instance(
            graph,
            pages,
            prefix_len,
            predicted,
            "closed forms: LRU=k+n, FIFO=k+kn",
        ))
    }

    fn expand_cycle_loop(&self) -> Result<FamilyInstance, FamilyError> {
        let id = FamilyId::CycleLoop;
        let n_vertices = self.graph_n(self.k as u32 + 1, 3, id)?;
        if self.n == 0 {
            return Err(bad(id, "needs n >= 1"));
        }
        let graph = AccessGraph::new(GraphClass::Cycle, n_vertices).unwrap();
        let mut pages = Vec::with_capacity(n_vertices as usize * self.n);
        for _ in 0..self.n {
            pages.extend(1..=n_vertices);
        }

        let mut predicted = BTreeMap::new();
        if self.k < n_vertices as usize {
            // Going around without turning defeats every non-graph policy.
            let total = n_vertices as u64 * self.n as u64;
            for alg in [Algorithm::Lru, Algorithm::Fifo, Algorithm::Fwf] {
                predicted.insert(alg, total);
            }
        }
        Ok(self.instance(
            graph,
            pages,
            0,
            predicted,
            "closed forms: LRU=FIFO=FWF=Nn; FAR per complete phase after the first = X_r",
        ))
    }

    fn expand_cycle_turn(&self) -> Result<FamilyInstance, FamilyError> {
        let id = FamilyId::CycleTurn;
        self.require_k(2, id)?;
        let n_vertices = self.graph_n(self.k as u32 + 1, 3, id)?;
        let (k, nn) = (self.k, n_vertices as usize);
        if !(k < nn && nn < 2 * k) {
            return Err(bad(
                id,
                format!("needs k+1 <= N <= 2k-1, got N={nn}, k={k}"),
            ));
        }
        if self.n == 0 {
            return Err(bad(id, "needs n >= 1"));
        }
        let graph = AccessGraph::new(GraphClass::Cycle, n_vertices).unwrap();
        let mut pages = Vec::with_capacity(2 * (nn - 1) * self.n);
        for _ in 0..self.n {
            pages.extend(1..=n_vertices);
            pages.extend((2..n_vertices).rev());
        }

        let r = (nn - k) as u64;
        let mut predicted = BTreeMap::new();
        predicted.insert(Algorithm::Lru, 2 * self.n as u64 * r + k as u64 - 1);
        Ok(self.instance(
            graph,
            pages,
            0,
            predicted,
            "closed form: LRU=2nr+k-1; FAR per complete middle phase = r*x^+y^",
        ))
    }
}

/// x^ = floor(log2(N^/r)) and y^ = floor(N^/2^x^) - r, the turning-sequence
/// per-phase fault parameters, with N^ = N for even N and N-1 otherwise.
pub fn turning_parameters(n_vertices: u32, k: usize) -> Option<(u32, u64)> {
    let r = (n_vertices as i64) - (k as i64);
    if r < 1 || r > k as i64 - 1 {
        return None;
    }
    let n_hat = if n_vertices.is_multiple_of(2) {
        n_vertices as u64
    } else {
        n_vertices as u64 - 1
    };
    let x_hat = floor_log2(n_hat / r as u64);
    let y_hat = (n_hat >> x_hat) - r as u64;
    Some((x_hat, y_hat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::simulate;
    use crate::graph::PageId;

    fn expand(id: FamilyId, k: usize, n: usize) -> FamilyInstance {
        FamilySpec::new(id, k, n).expand().unwrap()
    }

    fn faults(inst: &FamilyInstance, alg: Algorithm) -> u64 {
        let cfg = CacheConfig::new(inst.spec.k, &inst.graph);
        simulate(alg, &inst.sequence, &cfg).unwrap().total_faults as u64
    }

    #[test]
    fn path_zigzag_small_cases() {
        let inst = expand(FamilyId::PathZigzag, 2, 1);
        assert_eq!(inst.sequence, RequestSequence::from_pages([1, 2, 3, 2]));
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Lru], 3);

        let inst = expand(FamilyId::PathZigzag, 3, 0);
        assert!(inst.sequence.is_empty());

        let inst = expand(FamilyId::PathZigzag, 3, 2);
        assert_eq!(inst.prediction.length, 12);
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Lru], 6);
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Fwf], 12);
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Fifo], 8);
        for alg in Algorithm::ALL {
            if let Some(&want) = inst.prediction.predicted_faults.get(&alg) {
                assert_eq!(faults(&inst, alg), want, "{alg}");
            }
        }
    }

    #[test]
    fn fwf_fifo_path_structure() {
        // k=3: h=2, R=<2,3,2,1,2,3>, unit J repeated h*n times.
        let inst = expand(FamilyId::FwfFifoPath, 3, 1);
        let expected: Vec<u32> = vec![2, 3, 2, 1, 2, 3, 4, 3, 2, 1, 2, 3, 4, 3, 2, 1, 2, 3];
        assert_eq!(inst.sequence, RequestSequence::from_pages(expected));
        assert_eq!(inst.prefix_len, 6);

        // FIFO faults k+1 = 4 times on the repeated part.
        let fifo_total = faults(&inst, Algorithm::Fifo);
        let prefix = FamilySpec::new(FamilyId::FwfFifoPath, 3, 0)
            .expand()
            .unwrap();
        assert_eq!(fifo_total - faults(&prefix, Algorithm::Fifo), 4);
        assert_eq!(
            inst.prediction.predicted_faults[&Algorithm::Fifo],
            fifo_total
        );

        // Even k squeezes in the missing request to k after the prefix.
        let inst = expand(FamilyId::FwfFifoPath, 4, 1);
        assert_eq!(inst.sequence.as_slice()[inst.prefix_len - 1], PageId(4));
        assert_eq!(
            faults(&inst, Algorithm::Fwf),
            inst.prediction.predicted_faults[&Algorithm::Fwf]
        );
    }

    #[test]
    fn fwf_fifo_path_fwf_counts() {
        // FWF faults on every request of the repeated part: 2khn = 24 at k=3, n=2.
        let inst = expand(FamilyId::FwfFifoPath, 3, 2);
        let prefix = FamilySpec::new(FamilyId::FwfFifoPath, 3, 0)
            .expand()
            .unwrap();
        assert_eq!(
            faults(&inst, Algorithm::Fwf) - faults(&prefix, Algorithm::Fwf),
            24
        );
    }

    #[test]
    fn star_min_example() {
        let inst = expand(FamilyId::StarMin, 3, 1);
        assert_eq!(inst.prediction.length, 18);
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Lru], 9);
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Fifo], 7);
        assert_eq!(faults(&inst, Algorithm::Lru), 9);
        assert_eq!(faults(&inst, Algorithm::Fifo), 7);

        assert_eq!(
            expand(FamilyId::StarMin, 4, 2).prediction.predicted_faults[&Algorithm::Lru],
            28
        );

        // n=0: prefix only, LRU and FIFO agree.
        let p = expand(FamilyId::StarMin, 3, 0);
        assert_eq!(faults(&p, Algorithm::Lru), faults(&p, Algorithm::Fifo));
    }

    #[test]
    fn star_max_counts() {
        let inst = expand(FamilyId::StarMax, 3, 1);
        assert_eq!(inst.prediction.length, 22);
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Lru], 6);
        assert_eq!(faults(&inst, Algorithm::Lru), 6);
        // The FIFO prediction is the stated closed form; exact simulation
        // comes out one fault short per block (11 here, not 12).
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Fifo], 12);
        assert_eq!(faults(&inst, Algorithm::Fifo), 11);
    }

    #[test]
    fn star_max_simulated_fifo_is_k2_minus_1_per_block() {
        for k in 3..=6usize {
            for n in 1..=3usize {
                let inst = expand(FamilyId::StarMax, k, n);
                assert_eq!(
                    faults(&inst, Algorithm::Fifo) as usize,
                    k + (k * k - 1) * n,
                    "k={k} n={n}"
                );
                assert_eq!(faults(&inst, Algorithm::Lru) as usize, k + k * n);
            }
        }
    }

    #[test]
    fn star_fwf_fifo_simulated_fifo_is_k_plus_1_per_block() {
        for k in 3..=6usize {
            for n in 1..=3usize {
                let inst = expand(FamilyId::StarFwfFifo, k, n);
                assert_eq!(
                    faults(&inst, Algorithm::Fifo) as usize,
                    (k + 1) * n + k,
                    "k={k} n={n}"
                );
                assert_eq!(faults(&inst, Algorithm::Fwf) as usize, k * k * n + k);
            }
        }
    }

    #[test]
    fn cycle_rows_fwf_offset_is_constant_in_n() {
        // FWF tracks LRU's count up to a warm-up constant that depends only
        // on (k, r), not on n.
        for k in 3..=6usize {
            for r in 1..k as u32 {
                let offset_at = |n: usize| {
                    let inst = FamilySpec::new(FamilyId::CycleRows, k, n)
                        .with_r(r)
                        .expand()
                        .unwrap();
                    faults(&inst, Algorithm::Fwf) as i64 - faults(&inst, Algorithm::Lru) as i64
                };
                let c = offset_at(1);
                assert!(c >= 0, "k={k} r={r}");
                for n in 2..=4 {
                    assert_eq!(offset_at(n), c, "k={k} r={r} n={n}");
                }
            }
        }
    }

    #[test]
    fn star_fwf_lru_example() {
        let inst = expand(FamilyId::StarFwfLru, 3, 1);
        assert_eq!(inst.prediction.length, 12);
        assert_eq!(faults(&inst, Algorithm::Lru), 5);
        assert_eq!(faults(&inst, Algorithm::Fwf), 9);
        let p = expand(FamilyId::StarFwfLru, 3, 0);
        assert_eq!(faults(&p, Algorithm::Lru), 3);
        assert_eq!(faults(&p, Algorithm::Fwf), 3);
    }

    #[test]
    fn star_fwf_fifo_counts() {
        let inst = expand(FamilyId::StarFwfFifo, 3, 1);
        assert_eq!(faults(&inst, Algorithm::Fwf), 12);
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Fwf], 12);
        // Stated FIFO form is kn+k = 6; exact simulation gives (k+1)n+k = 7.
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Fifo], 6);
        assert_eq!(faults(&inst, Algorithm::Fifo), 7);

        // Row structure: i-th row is i-free.
        let k = 5usize;
        let inst = expand(FamilyId::StarFwfFifo, k, 1);
        let body = &inst.sequence.as_slice()[inst.prefix_len..];
        let row_len = 2 * (k - 1);
        for (i, row) in body.chunks(row_len).enumerate() {
            let missing = PageId((i + 1) as u32);
            assert!(
                !row.contains(&missing),
                "row {} contains {}",
                i + 1,
                missing
            );
        }
    }

    #[test]
    fn cycle_rows_example() {
        let inst = FamilySpec::new(FamilyId::CycleRows, 3, 1)
            .with_r(2)
            .expand()
            .unwrap();
        assert_eq!(inst.graph.n_vertices(), 5);
        assert_eq!(inst.prediction.length, 21); // N+r-1+kRn with R=5
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Lru], 19);
        assert_eq!(faults(&inst, Algorithm::Lru), 19);
        // Stated FIFO form 15 only binds when r | N; here r=2, N=5.
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Fifo], 15);
        assert_eq!(faults(&inst, Algorithm::Fifo), 18);

        let inst = FamilySpec::new(FamilyId::CycleRows, 3, 1)
            .with_r(1)
            .expand()
            .unwrap();
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Fifo], 8);
        assert_eq!(faults(&inst, Algorithm::Fifo), 8);
        assert_eq!(faults(&inst, Algorithm::Lru), 14);
    }

    #[test]
    fn cycle_rows_fifo_exact_iff_r_divides_n() {
        for k in 2..=6usize {
            for r in 1..k {
                let n_vertices = k + r;
                let inst = FamilySpec::new(FamilyId::CycleRows, k, 2)
                    .with_r(r as u32)
                    .expand()
                    .unwrap();
                let matches = faults(&inst, Algorithm::Fifo)
                    == inst.prediction.predicted_faults[&Algorithm::Fifo];
                assert_eq!(matches, n_vertices % r == 0, "k={k} r={r}");
            }
        }
    }

    #[test]
    fn cycle_shift_zigzag_examples() {
        let inst = FamilySpec::new(FamilyId::CycleShiftZigzag, 3, 2)
            .with_n_vertices(4)
            .expand()
            .unwrap();
        assert_eq!(inst.prediction.length, 15);
        assert_eq!(faults(&inst, Algorithm::Lru), 5);
        assert_eq!(faults(&inst, Algorithm::Fifo), 9);

        let inst = FamilySpec::new(FamilyId::CycleShiftZigzag, 2, 1)
            .with_n_vertices(3)
            .expand()
            .unwrap();
        assert_eq!(faults(&inst, Algorithm::Lru), 3);
        assert_eq!(faults(&inst, Algorithm::Fifo), 4);

        let inst = FamilySpec::new(FamilyId::CycleShiftZigzag, 3, 0)
            .with_n_vertices(4)
            .expand()
            .unwrap();
        assert_eq!(faults(&inst, Algorithm::Lru), 3);
    }

    #[test]
    fn cycle_loop_examples() {
        let inst = FamilySpec::new(FamilyId::CycleLoop, 3, 2)
            .with_n_vertices(4)
            .expand()
            .unwrap();
        assert_eq!(faults(&inst, Algorithm::Lru), 8); // every request faults

        let inst = FamilySpec::new(FamilyId::CycleLoop, 3, 1)
            .with_n_vertices(5)
            .expand()
            .unwrap();
        assert_eq!(inst.sequence, RequestSequence::from_pages([1, 2, 3, 4, 5]));
    }

    #[test]
    fn cycle_turn_examples() {
        let inst = FamilySpec::new(FamilyId::CycleTurn, 3, 2)
            .with_n_vertices(4)
            .expand()
            .unwrap();
        assert_eq!(inst.prediction.length, 12);
        assert_eq!(inst.prediction.predicted_faults[&Algorithm::Lru], 6);
        assert_eq!(faults(&inst, Algorithm::Lru), 6);

        // N^ uses N-1 when N is odd.
        assert_eq!(turning_parameters(8, 7), Some((3, 0)));
        assert_eq!(turning_parameters(5, 4), Some((2, 0))); // N^=4: x^=2, y^=4/4-1=0
    }

    #[test]
    fn cycle_turn_has_two_phase_changes_per_iteration() {
        for n in 1..=5usize {
            let inst = FamilySpec::new(FamilyId::CycleTurn, 3, n)
                .with_n_vertices(4)
                .expand()
                .unwrap();
            let phases = crate::analysis::k_phases(&inst.sequence, 3);
            assert_eq!(phases.phase_count(), 2 * n, "n={n}");
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(FamilySpec::new(FamilyId::PathZigzag, 1, 1)
            .expand()
            .is_err());
        assert!(FamilySpec::new(FamilyId::StarMin, 2, 1).expand().is_err());
        assert!(FamilySpec::new(FamilyId::CycleRows, 3, 1).expand().is_err()); // r missing
        assert!(FamilySpec::new(FamilyId::CycleRows, 3, 1)
            .with_r(3)
            .expand()
            .is_err()); // r > k-1
        assert!(FamilySpec::new(FamilyId::CycleTurn, 3, 1)
            .with_n_vertices(6)
            .expand()
            .is_err()); // N > 2k-1
        assert!("no_such_family".parse::<FamilyId>().is_err());
    }

    #[test]
    fn every_family_respects_its_graph() {
        for id in FamilyId::ALL {
            for k in 3..=5usize {
                for n in 0..=3usize {
                    let mut spec = FamilySpec::new(id, k, n);
                    if id.takes_r() {
                        spec = spec.with_r(1);
                    }
                    if matches!(id, FamilyId::CycleLoop | FamilyId::CycleTurn) && n == 0 {
                        continue;
                    }
                    let inst = match spec.expand() {
                        Ok(i) => i,
                        Err(_) => continue,
                    };
                    assert!(
                        inst.graph.respects(&inst.sequence),
                        "{id} k={k} n={n} violates its graph"
                    );
                    assert_eq!(inst.prediction.length, inst.sequence.len());
                }
            }
        }
    }

    #[test]
    fn stated_limits() {
        let spec = FamilySpec::new(FamilyId::PathZigzag, 3, 1);
        assert_eq!(
            spec.stated_limit((Algorithm::Fifo, Algorithm::Lru)),
            Some(Rat::new(1, 3))
        );
        // Reversal negates.
        assert_eq!(
            spec.stated_limit((Algorithm::Lru, Algorithm::Fifo)),
            Some(Rat::new(-1, 3))
        );
        // FAR aliases to LRU on paths.
        assert_eq!(
            spec.stated_limit((Algorithm::Fifo, Algorithm::Far)),
            Some(Rat::new(1, 3))
        );
        let spec = FamilySpec::new(FamilyId::StarMax, 3, 1);
        assert_eq!(
            spec.stated_limit((Algorithm::Fifo, Algorithm::Lru)),
            Some(Rat::new(1, 3))
        );
        // Even-k FWF/FIFO separation levels off at 1-(k+1)/k^2.
        let spec = FamilySpec::new(FamilyId::FwfFifoPath, 4, 1);
        assert_eq!(
            spec.stated_limit((Algorithm::Fwf, Algorithm::Fifo)),
            Some(Rat::new(11, 16))
        );
        let spec = FamilySpec::new(FamilyId::FwfFifoPath, 3, 1);
        assert_eq!(
            spec.stated_limit((Algorithm::Fwf, Algorithm::Fifo)),
            Some(Rat::new(2, 3))
        );
    }
}
