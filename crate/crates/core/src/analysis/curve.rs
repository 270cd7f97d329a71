//! Finite-n fault-difference ratios along a family, for convergence checks
//! and plotting.

use serde::Serialize;

use crate::engine::{fault_count, Algorithm, CacheConfig};
use crate::families::{FamilyError, FamilySpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n: usize,
    pub len: usize,
    pub faults_a: u64,
    pub faults_b: u64,
    pub diff: i64,
    pub ratio: f64,
}

/// (A(I_n) - B(I_n)) / |I_n| for each n in `n_list`, on the family selected
/// by `base` (whose own n is ignored).
pub fn diff_ratio_curve(
    pair: (Algorithm, Algorithm),
    base: &FamilySpec,
    n_list: &[usize],
) -> Result<Vec<CurvePoint>, FamilyError> {
    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut spec = *base;
        spec.n = n;
        let inst = spec.expand()?;
        let cfg = CacheConfig::new(spec.k, &inst.graph);
        let a = fault_count(pair.0, &inst.sequence, &cfg).expect("family sequence valid") as u64;
        let b = fault_count(pair.1, &inst.sequence, &cfg).expect("family sequence valid") as u64;
        let len = inst.sequence.len();
        let diff = a as i64 - b as i64;
        points.push(CurvePoint {
            n,
            len,
            faults_a: a,
            faults_b: b,
            diff,
            ratio: if len == 0 {
                0.0
            } else {
                diff as f64 / len as f64
            },
        });
    }
    Ok(points)
}
