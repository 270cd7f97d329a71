//! Analytic relative-interval bounds, kept as exact rationals.
//!
//! The relative interval of an ordered pair (A, B) on a graph class is the
//! asymptotic range of (A(I) - B(I)) / |I| over sequences respecting the
//! graph. For some pairs the interval is known exactly; for others only an
//! inner interval (contained in it) and an outer interval (containing it)
//! are known. Equality rows carry inner == outer, so no information is lost.

use std::fmt;

use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::Serialize;

use super::cycle_model::{floor_log2, CycleFaultModel};
use super::AnalysisError;
use crate::engine::Algorithm;
use crate::graph::GraphClass;

pub type Rat = Ratio<i64>;

/// A closed interval with exact rational endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalBounds {
    pub lo: Rat,
    pub hi: Rat,
}

impl IntervalBounds {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        IntervalBounds { lo, hi }
    }

    pub fn contains(&self, other: &IntervalBounds) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn negated(&self) -> IntervalBounds {
        IntervalBounds {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

pub fn rat_string(r: Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for IntervalBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rat_string(self.lo), rat_string(self.hi))
    }
}

impl Serialize for IntervalBounds {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut s = ser.serialize_struct("IntervalBounds", 4)?;
        s.serialize_field("lo", &rat_string(self.lo))?;
        s.serialize_field("hi", &rat_string(self.hi))?;
        s.serialize_field("lo_approx", &rat_f64(self.lo))?;
        s.serialize_field("hi_approx", &rat_f64(self.hi))?;
        s.end()
    }
}

/// Inner and outer analytic bounds on a relative interval.
/// `inner ⊆ I ⊆ outer`; equality results have `inner == outer`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnalyticInterval {
    pub inner: Option<IntervalBounds>,
    pub outer: Option<IntervalBounds>,
}

impl AnalyticInterval {
    fn exact(lo: Rat, hi: Rat) -> Self {
        let b = IntervalBounds::new(lo, hi);
        AnalyticInterval {
            inner: Some(b),
            outer: Some(b),
        }
    }

    fn between(inner: IntervalBounds, outer: IntervalBounds) -> Self {
        debug_assert!(outer.contains(&inner));
        AnalyticInterval {
            inner: Some(inner),
            outer: Some(outer),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.inner.is_some() && self.inner == self.outer
    }

    /// Bounds for the reversed pair: I(B, A) = -I(A, B) mirrored.
    pub fn reversed(&self) -> Self {
        AnalyticInterval {
            inner: self.inner.map(|b| b.negated()),
            outer: self.outer.map(|b| b.negated()),
        }
    }
}

fn general_fwf_row(k: i64) -> AnalyticInterval {
    // FWF versus any conservative or marking algorithm: dominated, with the
    // general upper bound 1 - 1/k attained on any graph containing a
    // (k+1)-path.
    AnalyticInterval::exact(Rat::from_integer(0), Rat::new(k - 1, k))
}

fn fwf_fifo_row(k: i64) -> AnalyticInterval {
    AnalyticInterval::between(
        IntervalBounds::new(Rat::from_integer(0), Rat::new(k * k - k - 1, k * k)),
        IntervalBounds::new(Rat::from_integer(0), Rat::new(k - 1, k)),
    )
}

fn complete_fifo_lru(k: i64) -> AnalyticInterval {
    AnalyticInterval::exact(Rat::new(1 - k, k), Rat::new(1, 2) - Rat::new(1, 4 * k - 2))
}

/// Analytic bounds for the ordered pair (a, b) on the given graph class.
/// Cycle rows involving FAR need the vertex count; star and path rows treat
/// FAR as LRU, which it mimics there.
pub fn analytic_interval(
    a: Algorithm,
    b: Algorithm,
    class: GraphClass,
    k: usize,
    n_vertices: Option<u32>,
) -> Result<AnalyticInterval, AnalysisError> {
    if k < 2 {
        return Err(AnalysisError::KTooSmall(k));
    }
    if a == b {
        return Ok(AnalyticInterval::exact(
            Rat::from_integer(0),
            Rat::from_integer(0),
        ));
    }
    if let Some(direct) = directed_row(a, b, class, k, n_vertices)? {
        return Ok(direct);
    }
    if let Some(rev) = directed_row(b, a, class, k, n_vertices)? {
        return Ok(rev.reversed());
    }
    Err(AnalysisError::UnsupportedPair { a, b, class })
}

fn directed_row(
    a: Algorithm,
    b: Algorithm,
    class: GraphClass,
    k: usize,
    n_vertices: Option<u32>,
) -> Result<Option<AnalyticInterval>, AnalysisError> {
    use Algorithm::*;
    let ki = k as i64;
    let row = match (class, a, b) {
        (GraphClass::Complete, Fifo, Lru) => Some(complete_fifo_lru(ki)),
        (GraphClass::Complete, Fwf, Lru) | (GraphClass::Complete, Fwf, Far) => {
            Some(general_fwf_row(ki))
        }
        (GraphClass::Complete, Fwf, Fifo) => Some(fwf_fifo_row(ki)),

        (GraphClass::Path, Fifo, Lru) | (GraphClass::Path, Fifo, Far) => Some(
            AnalyticInterval::exact(Rat::from_integer(0), Rat::new(1, 2) - Rat::new(1, 2 * ki)),
        ),
        (GraphClass::Path, Fwf, Lru) | (GraphClass::Path, Fwf, Far) => Some(general_fwf_row(ki)),
        (GraphClass::Path, Fwf, Fifo) => Some(fwf_fifo_row(ki)),
        (GraphClass::Path, Far, Lru) => Some(AnalyticInterval::exact(
            Rat::from_integer(0),
            Rat::from_integer(0),
        )),

        (GraphClass::Star, Fifo, Lru) | (GraphClass::Star, Fifo, Far) => {
            let min_lb = Rat::new(-1, 2) + Rat::new(1, 2 * (ki - 1));
            let min_ub = min_lb + Rat::new(1, 2 * ki * (ki - 1));
            let hi = Rat::new(1, 4) + Rat::new(1, 8 * ki - 12);
            Some(AnalyticInterval::between(
                IntervalBounds::new(min_ub, hi),
                IntervalBounds::new(min_lb, hi),
            ))
        }
        (GraphClass::Star, Fwf, Lru)
        | (GraphClass::Star, Fwf, Fifo)
        | (GraphClass::Star, Fwf, Far) => Some(AnalyticInterval::exact(
            Rat::from_integer(0),
            Rat::new(1, 2),
        )),
        (GraphClass::Star, Far, Lru) => Some(AnalyticInterval::exact(
            Rat::from_integer(0),
            Rat::from_integer(0),
        )),

        (GraphClass::Cycle, Fifo, Lru) => {
            let n = n_vertices.ok_or(AnalysisError::CycleNeedsN)?;
            let r = n as i64 - ki;
            let outer = complete_fifo_lru(ki).outer.unwrap();
            let inner = (1..ki).contains(&r).then(|| {
                IntervalBounds::new(
                    Rat::new(r - ki, ki),
                    Rat::new(1, 2) - Rat::new(1, 4 * ki - 2),
                )
            });
            Some(AnalyticInterval {
                inner,
                outer: Some(outer),
            })
        }
        (GraphClass::Cycle, Fwf, Lru) => Some(general_fwf_row(ki)),
        (GraphClass::Cycle, Fwf, Fifo) => Some(fwf_fifo_row(ki)),
        (GraphClass::Cycle, Lru, Far)
        | (GraphClass::Cycle, Fifo, Far)
        | (GraphClass::Cycle, Fwf, Far) => {
            let n = n_vertices.ok_or(AnalysisError::CycleNeedsN)?;
            let model = CycleFaultModel::new(n, k)?;
            let x_r = model.x_r as i64;
            let hi_inner = Rat::from_integer(1) - Rat::new(x_r, ki);
            let lo_inner = match a {
                Lru => {
                    let x_hat = floor_log2(model.n_hat as u64 / model.r as u64) as i64;
                    Rat::new(-(model.r as i64) * (x_hat - 1), n as i64 - 1)
                }
                Fifo => Rat::new(-(x_r - model.r as i64), ki),
                _ => Rat::from_integer(0),
            };
            let lo_outer = if a == Fwf {
                Rat::from_integer(0)
            } else {
                Rat::new(-(x_r - 1), ki)
            };
            Some(AnalyticInterval::between(
                IntervalBounds::new(lo_inner, hi_inner),
                IntervalBounds::new(lo_outer, Rat::new(ki - 1, ki)),
            ))
        }
        _ => None,
    };
    Ok(row)
}

/// One row of the summary table of analytic bounds.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub graph_class: GraphClass,
    pub pair: (Algorithm, Algorithm),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_vertices: Option<u32>,
    pub interval: AnalyticInterval,
}

/// Every supported analytic row at cache size k. Cycle rows that need a
/// vertex count are included only when `cycle_n` is given and in range.
pub fn table_rows(k: usize, cycle_n: Option<u32>) -> Vec<TableRow> {
    use Algorithm::*;
    let mut rows = Vec::new();
    let combos: [(GraphClass, &[(Algorithm, Algorithm)]); 4] = [
        (
            GraphClass::Complete,
            &[(Fifo, Lru), (Fwf, Lru), (Fwf, Far), (Fwf, Fifo)],
        ),
        (
            GraphClass::Path,
            &[
                (Fifo, Lru),
                (Fifo, Far),
                (Fwf, Lru),
                (Fwf, Far),
                (Fwf, Fifo),
                (Far, Lru),
            ],
        ),
        (
            GraphClass::Star,
            &[
                (Fifo, Lru),
                (Fifo, Far),
                (Fwf, Lru),
                (Fwf, Fifo),
                (Fwf, Far),
                (Far, Lru),
            ],
        ),
        (
            GraphClass::Cycle,
            &[
                (Fifo, Lru),
                (Fwf, Lru),
                (Fwf, Fifo),
                (Lru, Far),
                (Fifo, Far),
                (Fwf, Far),
            ],
        ),
    ];
    for (class, pairs) in combos {
        for &(a, b) in pairs {
            let n = (class == GraphClass::Cycle).then_some(cycle_n).flatten();
            if class == GraphClass::Cycle && n.is_none() {
                continue;
            }
            if let Ok(interval) = analytic_interval(a, b, class, k, n) {
                rows.push(TableRow {
                    graph_class: class,
                    pair: (a, b),
                    n_vertices: n,
                    interval,
                });
            }
        }
    }
    rows
}
