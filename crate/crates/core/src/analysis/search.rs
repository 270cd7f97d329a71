//! Exhaustive min/max of A(I) - B(I) over all graph-respecting sequences.
//!
//! The search walks the tree of graph walks depth-first, carrying both
//! engines' states incrementally so no prefix is ever re-simulated. The cost
//! is counted exactly up front; over-budget requests are refused outright
//! rather than silently sampled.

use serde::Serialize;
use thiserror::Error;

use crate::engine::{Algorithm, CacheConfig, EngineState};
use crate::graph::{AccessGraph, PageId, RequestSequence};

/// Cap on total simulation steps (one step = one request fed to one engine).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget(pub u64);

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget(100_000_000)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("search needs n >= 1")]
    EmptyLength,
    #[error("exhaustive search needs {required} simulation steps, over the budget of {budget}")]
    BudgetExceeded { required: u64, budget: u64 },
}

/// Exact extremes of A(I) - B(I) over all length-n sequences respecting G,
/// with one witness sequence per extreme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinMaxResult {
    pub n: usize,
    pub min_diff: i64,
    pub max_diff: i64,
    pub min_witness: RequestSequence,
    pub max_witness: RequestSequence,
    pub sequences_examined: u64,
}

/// Total engine steps needed: two per node of the walk tree.
pub fn required_steps(graph: &AccessGraph, n: usize) -> u64 {
    let nv = graph.n_vertices() as usize;
    // walks[v] = number of length-d walks ending at v
    let mut walks = vec![1u128; nv + 1];
    walks[0] = 0;
    let mut nodes: u128 = nv as u128;
    for _ in 2..=n {
        let mut next = vec![0u128; nv + 1];
        for v in 1..=nv {
            let mut total = walks[v]; // self-transition
            for &u in graph.neighbors(PageId(v as u32)) {
                total += walks[u.index()];
            }
            next[v] = total;
        }
        walks = next;
        nodes += walks.iter().sum::<u128>();
    }
    if n == 0 {
        return 0;
    }
    (nodes * 2).min(u64::MAX as u128) as u64
}

/// Exhaustive search. The first request ranges over all pages; each later
/// request over the closed neighborhood of its predecessor.
pub fn exhaustive_minmax(
    a: Algorithm,
    b: Algorithm,
    graph: &AccessGraph,
    k: usize,
    n: usize,
    budget: SearchBudget,
) -> Result<MinMaxResult, SearchError> {
    if n == 0 {
        return Err(SearchError::EmptyLength);
    }
    let required = required_steps(graph, n);
    if required > budget.0 {
        return Err(SearchError::BudgetExceeded {
            required,
            budget: budget.0,
        });
    }

    let cfg = CacheConfig::new(k, graph);
    let mut best_min: Option<(i64, Vec<PageId>)> = None;
    let mut best_max: Option<(i64, Vec<PageId>)> = None;
    let mut path: Vec<PageId> = Vec::with_capacity(n);
    let mut examined = 0u64;

    struct Dfs<'a> {
        cfg: CacheConfig<'a>,
        graph: &'a AccessGraph,
        n: usize,
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        ctx: &Dfs,
        state_a: &EngineState,
        state_b: &EngineState,
        diff: i64,
        path: &mut Vec<PageId>,
        best_min: &mut Option<(i64, Vec<PageId>)>,
        best_max: &mut Option<(i64, Vec<PageId>)>,
        examined: &mut u64,
    ) {
        if path.len() == ctx.n {
            *examined += 1;
            if best_min.as_ref().is_none_or(|(m, _)| diff < *m) {
                *best_min = Some((diff, path.clone()));
            }
            if best_max.as_ref().is_none_or(|(m, _)| diff > *m) {
                *best_max = Some((diff, path.clone()));
            }
            return;
        }
        let candidates: Vec<PageId> = match path.last() {
            None => (1..=ctx.graph.n_vertices()).map(PageId).collect(),
            Some(&last) => {
                let mut c: Vec<PageId> = ctx.graph.neighbors(last).to_vec();
                c.push(last);
                c.sort_unstable();
                c
            }
        };
        for page in candidates {
            let mut na = state_a.clone();
            let mut nb = state_b.clone();
            let fa = na.step(page, &ctx.cfg).expect("in-range page").is_fault() as i64;
            let fb = nb.step(page, &ctx.cfg).expect("in-range page").is_fault() as i64;
            path.push(page);
            recurse(
                ctx,
                &na,
                &nb,
                diff + fa - fb,
                path,
                best_min,
                best_max,
                examined,
            );
            path.pop();
        }
    }

    let ctx = Dfs { cfg, graph, n };
    recurse(
        &ctx,
        &EngineState::new(a, &cfg),
        &EngineState::new(b, &cfg),
        0,
        &mut path,
        &mut best_min,
        &mut best_max,
        &mut examined,
    );

    let (min_diff, min_witness) = best_min.expect("n >= 1 yields at least one walk");
    let (max_diff, max_witness) = best_max.expect("n >= 1 yields at least one walk");
    Ok(MinMaxResult {
        n,
        min_diff,
        max_diff,
        min_witness: RequestSequence::new(min_witness),
        max_witness: RequestSequence::new(max_witness),
        sequences_examined: examined,
    })
}
