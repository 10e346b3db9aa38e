// Negated float comparisons are deliberate: NaN has to fail these checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};

use super::{ChainParameters, IndexedCorner};
use crate::error::{Error, Result};
use crate::point_set::{fraction, volume, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessSide {
    /// `m/n - vol([0,w]) > ε` at the inner box.
    #[serde(rename = "overfull-inner")]
    OverfullInner,
    /// `vol([0,z]) - m/n > ε` at the outer box.
    #[serde(rename = "underfull-outer")]
    UnderfullOuter,
}

/// Two nested lattice boxes holding the same `m` points while their volumes
/// differ by more than `2ε`, so one of them violates `D* <= ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationWitness {
    #[serde(rename = "outer_counters")]
    pub outer: IndexedCorner,
    #[serde(rename = "inner_counters")]
    pub inner: IndexedCorner,
    pub shared_count: usize,
    pub side: WitnessSide,
    /// `|m/n - vol|` at the box named by `side`.
    pub excess: f64,
}

impl ViolationWitness {
    /// Corner of the box whose local discrepancy exceeds `ε`.
    pub fn violating_corner(&self, params: &ChainParameters) -> Vec<f64> {
        match self.side {
            WitnessSide::OverfullInner => self.inner.realize(params),
            WitnessSide::UnderfullOuter => self.outer.realize(params),
        }
    }
}

/// Builds the witness for an all-bad step from `outer` to `inner`.
///
/// Both boxes must hold the same closed count `m`. Of the two margins
/// `vol(z) - m/n` and `m/n - vol(w)` the larger is reported; it exceeds `ε`
/// whenever the parameters passed validation, and anything else is reported
/// as [`Error::SoundnessViolation`].
pub fn extract_witness(
    points: &PointSet,
    params: &ChainParameters,
    outer: &IndexedCorner,
    inner: &IndexedCorner,
) -> Result<ViolationWitness> {
    outer.validate(params)?;
    inner.validate(params)?;
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let bumped =
        outer
            .counters
            .iter()
            .zip(&inner.counters)
            .try_fold(0usize, |acc, (&a, &b)| match b.checked_sub(a) {
                Some(0) => Some(acc),
                Some(1) => Some(acc + 1),
                _ => None,
            });
    if !matches!(bumped, Some(c) if c > 0) {
        return Err(Error::Precondition(
            "inner corner must bump a nonempty set of outer counters by one".into(),
        ));
    }

    let z = outer.realize(params);
    let w = inner.realize(params);
    let n = points.len();
    let m = points.count_closed_at(&z);
    let m_inner = points.count_closed_at(&w);
    if m != m_inner {
        return Err(Error::SoundnessViolation(format!(
            "outer box holds {m} points but inner box holds {m_inner}"
        )));
    }

    let under = volume(&z) - fraction(m, n);
    let over = fraction(m, n) - volume(&w);
    let (side, excess) = if under > over {
        (WitnessSide::UnderfullOuter, under)
    } else {
        (WitnessSide::OverfullInner, over)
    };
    if !(excess > params.epsilon()) {
        return Err(Error::SoundnessViolation(format!(
            "neither margin exceeds epsilon = {}: underfull {under}, overfull {over}",
            params.epsilon()
        )));
    }
    Ok(ViolationWitness {
        outer: outer.clone(),
        inner: inner.clone(),
        shared_count: m,
        side,
        excess,
    })
}
