//! FAR's per-phase fault model on cycle graphs.
//!
//! On a cycle with N = k + r vertices (1 <= r <= k-1), FAR evicts the
//! midpoint of the current unmarked segment, so within one k-phase the
//! faults arrive in batches of r while the unmarked segment halves. A phase
//! in which the requests keep moving the same way around the cycle incurs
//! exactly
//!
//! ```text
//! X_r = r(x - 1) + ceil(N / 2^x),   x = floor(log2(N / r))
//! ```
//!
//! faults, and no phase after the first can exceed X_r. If the sequence
//! turns back after the first batch, the halving recurrence shifts and a
//! complete middle phase incurs r*x^ + y^ faults with x^ = floor(log2(N^/r)),
//! y^ = floor(N^/2^x^) - r, where N^ is N rounded down to even.

use serde::Serialize;

use super::AnalysisError;

/// Largest x with 2^x <= q. Requires q >= 1.
pub fn floor_log2(q: u64) -> u32 {
    assert!(q >= 1, "floor_log2 needs q >= 1");
    63 - q.leading_zeros()
}

/// One batch of faults inside a phase: the unmarked-segment length when the
/// batch starts, the hop distance to the page evicted first, and how many
/// faults the batch contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Batch {
    /// d_i: unmarked segment length after the batch's first page is marked.
    pub segment: u64,
    /// D_i: distance to the first eviction of the batch.
    pub evict_distance: u64,
    pub faults: u64,
}

/// The closed-form fault model for FAR on a cycle of N = k + r vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleFaultModel {
    pub n_vertices: u32,
    pub k: usize,
    pub r: u32,
    /// x = floor(log2(N/r)).
    pub x: u32,
    /// y = ceil(N/2^x) - r, the last batch of a non-turning phase.
    pub y: u64,
    /// Faults per complete non-turning phase after the first.
    pub x_r: u64,
    /// N rounded down to even.
    pub n_hat: u32,
    /// x^ = floor(log2(N^/r)).
    pub x_hat: u32,
    /// y^ = floor(N^/2^x^) - r, the last batch of a turning phase.
    pub y_hat: u64,
    /// Batch table for a phase that keeps moving one way around the cycle.
    pub whole_cycle_batches: Vec<Batch>,
    /// Batch table for a phase in which the sequence turns back once.
    pub turning_batches: Vec<Batch>,
}

impl CycleFaultModel {
    pub fn new(n_vertices: u32, k: usize) -> Result<Self, AnalysisError> {
        let r64 = n_vertices as i64 - k as i64;
        if r64 < 1 || r64 > k as i64 - 1 {
            return Err(AnalysisError::SurplusOutOfRange { n: n_vertices, k });
        }
        let r = r64 as u64;
        let n = n_vertices as u64;

        let x = floor_log2(n / r);
        let y = n.div_ceil(1 << x) - r;
        let x_r = r * (x as u64 - 1) + n.div_ceil(1 << x);

        let n_hat = n & !1;
        let x_hat = floor_log2(n_hat / r);
        let y_hat = (n_hat >> x_hat) - r;

        // Non-turning: d_1 = N-1, D_i = ceil(d_i/2), d_{i+1} = floor(d_i/2);
        // the last batch starts once d_i + 1 <= 2r and contributes d_i+1-r
        // faults. If that would be zero, the previous batch was the last.
        let mut whole_cycle_batches = Vec::new();
        let mut d = n - 1;
        while d + 1 > 2 * r {
            whole_cycle_batches.push(Batch {
                segment: d,
                evict_distance: d.div_ceil(2),
                faults: r,
            });
            d /= 2;
        }
        if d + 1 > r {
            whole_cycle_batches.push(Batch {
                segment: d,
                evict_distance: d.div_ceil(2),
                faults: d + 1 - r,
            });
        }

        // Turning: d_2 = D_1 - 1, and from the second batch on an even
        // segment evicts the farther midpoint: D_i = d_i/2 + 1, so
        // d_{i+1} = floor((d_i - 1)/2).
        let mut turning_batches = Vec::new();
        let mut d = n - 1;
        turning_batches.push(Batch {
            segment: d,
            evict_distance: d.div_ceil(2),
            faults: r,
        });
        d = d.div_ceil(2) - 1;
        while d + 1 > 2 * r {
            let evict_distance = if d % 2 == 1 { d.div_ceil(2) } else { d / 2 + 1 };
            turning_batches.push(Batch {
                segment: d,
                evict_distance,
                faults: r,
            });
            d = (d - 1) / 2;
        }
        if d + 1 > r {
            let evict_distance = if d % 2 == 1 { d.div_ceil(2) } else { d / 2 + 1 };
            turning_batches.push(Batch {
                segment: d,
                evict_distance,
                faults: d + 1 - r,
            });
        }

        Ok(CycleFaultModel {
            n_vertices,
            k,
            r: r as u32,
            x,
            y,
            x_r,
            n_hat: n_hat as u32,
            x_hat,
            y_hat,
            whole_cycle_batches,
            turning_batches,
        })
    }

    /// Faults per complete middle phase of a turning sequence: r*x^ + y^.
    pub fn turning_phase_faults(&self) -> u64 {
        self.r as u64 * self.x_hat as u64 + self.y_hat
    }
}
