//! Constructive adversary for the hypothesis `D*(X) <= ε`.
//!
//! Starting from the unit cube, the box `[0, y]` is shrunk one lattice step
//! at a time, where `y_j = 1 - a_j·h` with integer counters `a_j` and step
//! `h = βε/d`. Each shrink must uncover at least one point of `X`, and the
//! uncovering slabs are disjoint because the boxes are nested, so a chain of
//! `k` steps proves `n >= k`.
//!
//! A step fails only when every eligible counter (`a_j < A_max`) is *bad*:
//! bumping it alone uncovers nothing. Then bumping all of them together
//! also uncovers nothing, while the volume drops by at least
//! `(1 - 1/d)^d · ‖z - w‖₁ >= (1 - 1/d)^d · βε/2 > 2ε`. One of the two boxes
//! then has local discrepancy above `ε`, which is returned as a
//! [`ViolationWitness`]. Otherwise the chain runs until fewer than `d/2`
//! counters remain eligible, which takes at least `⌊d/2⌋·A_max` steps.

mod serial;
mod verify;
mod witness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_set::{in_closed_box, PointSet};

pub use serial::{CertificateRecord, ParamsRecord, StepRecord};
pub use verify::{verify_certificate, verify_witness, Verification};
pub use witness::{extract_witness, ViolationWitness, WitnessSide};

pub const DEFAULT_BETA: f64 = 20.0;

/// `(1 - 1/d)^d`, the lower bound on the volume of any box containing
/// `[0, 1 - 1/d]^d`.
pub fn inner_volume_factor(dim: usize) -> f64 {
    let base = 1.0 - 1.0 / dim as f64;
    match i32::try_from(dim) {
        Ok(d) => base.powi(d),
        Err(_) => base.powf(dim as f64),
    }
}

/// Validated parameters of the chain lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParameters {
    dim: usize,
    epsilon: f64,
    beta: f64,
    step: f64,
    a_max: u64,
}

impl ChainParameters {
    /// Checks `d >= 2`, `ε > 0` and `(β/2)(1 - 1/d)^d > 2`, then derives
    /// `h = βε/d` and `A_max = ⌊1/(βε)⌋`.
    pub fn new(dim: usize, epsilon: f64, beta: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::NonpositiveEpsilon(epsilon));
        }
        let margin = beta / 2.0 * inner_volume_factor(dim);
        if !(margin > 2.0 && beta.is_finite()) {
            return Err(Error::UnsoundBeta { beta, dim, margin });
        }

        let product = beta * epsilon;
        let step = product / dim as f64;
        let raw = (1.0 / product).floor();
        if raw > (1u64 << 52) as f64 {
            return Err(Error::Precondition(format!(
                "epsilon = {epsilon} is too small: 1/(beta*epsilon) exceeds 2^52"
            )));
        }
        let mut a_max = raw as u64;
        // Rounding in `1/product` may overshoot by one; the lattice must stay
        // inside [1 - 1/d, 1] in floating point as well.
        let floor_coord = 1.0 - 1.0 / dim as f64;
        while a_max > 0 && (a_max as f64 * product > 1.0 || 1.0 - a_max as f64 * step < floor_coord)
        {
            a_max -= 1;
        }
        Ok(Self {
            dim,
            epsilon,
            beta,
            step,
            a_max,
        })
    }

    pub fn with_default_beta(dim: usize, epsilon: f64) -> Result<Self> {
        Self::new(dim, epsilon, DEFAULT_BETA)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `h = βε/d`
    pub fn step(&self) -> f64 {
        self.step
    }

    /// `A_max = ⌊1/(βε)⌋`
    pub fn a_max(&self) -> u64 {
        self.a_max
    }

    /// `(β/2)(1 - 1/d)^d`; always above 2 for validated parameters.
    pub fn soundness_margin(&self) -> f64 {
        self.beta / 2.0 * inner_volume_factor(self.dim)
    }

    /// `y_j = 1 - a_j·h`, always recomputed from the integer counter.
    pub fn coordinate(&self, counter: u64) -> f64 {
        1.0 - counter as f64 * self.step
    }

    /// `⌊d/2⌋ · A_max`, the minimum length of any completed chain.
    pub fn guaranteed_chain_length(&self) -> u64 {
        (self.dim as u64 / 2).saturating_mul(self.a_max)
    }

    fn is_exhausted(&self, eligible: usize) -> bool {
        // "at least d/2 eligible indices", compared over the reals
        2 * eligible < self.dim
    }
}

/// Integer counters `a` encoding the corner `y_j = 1 - a_j·h`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexedCorner {
    pub counters: Vec<u64>,
}

impl IndexedCorner {
    pub fn origin(dim: usize) -> Self {
        Self {
            counters: vec![0; dim],
        }
    }

    pub fn new(counters: Vec<u64>) -> Self {
        Self { counters }
    }

    pub fn dim(&self) -> usize {
        self.counters.len()
    }

    pub fn validate(&self, params: &ChainParameters) -> Result<()> {
        if self.dim() != params.dim {
            return Err(Error::InvalidCorner(format!(
                "corner has {} counters, parameters have d = {}",
                self.dim(),
                params.dim
            )));
        }
        if let Some((j, a)) = self
            .counters
            .iter()
            .enumerate()
            .find(|(_, &a)| a > params.a_max)
        {
            return Err(Error::InvalidCorner(format!(
                "counter {j} is {a}, above A_max = {}",
                params.a_max
            )));
        }
        Ok(())
    }

    pub fn realize(&self, params: &ChainParameters) -> Vec<f64> {
        self.counters
            .iter()
            .map(|&a| params.coordinate(a))
            .collect()
    }

    /// Indices `j` with `a_j <= A_max - 1`.
    pub fn eligible(&self, params: &ChainParameters) -> Vec<usize> {
        self.counters
            .iter()
            .enumerate()
            .filter(|(_, &a)| a < params.a_max)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn incremented(&self, index: usize) -> Self {
        let mut next = self.clone();
        next.counters[index] += 1;
        next
    }

    pub fn incremented_all(&self, indices: &[usize]) -> Self {
        let mut next = self.clone();
        for &j in indices {
            next.counters[j] += 1;
        }
        next
    }
}

/// `(1 - 1/d)^d · ‖z - w‖₁`, a lower bound for `vol([0,z]) - vol([0,w])`
/// whenever `z >= w >= 1 - 1/d` coordinate-wise.
pub fn lemma1_gap_bound(z: &[f64], w: &[f64]) -> Result<f64> {
    if z.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            found: w.len(),
        });
    }
    let d = z.len();
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let floor = 1.0 - 1.0 / d as f64;
    for (j, (&zj, &wj)) in z.iter().zip(w).enumerate() {
        if !(wj <= zj && zj <= 1.0) {
            return Err(Error::Precondition(format!(
                "axis {j}: need w <= z <= 1, got w = {wj}, z = {zj}"
            )));
        }
        if wj < floor {
            return Err(Error::Precondition(format!(
                "axis {j}: w = {wj} is below 1 - 1/d = {floor}"
            )));
        }
    }
    let l1: f64 = z.iter().zip(w).map(|(a, b)| a - b).sum();
    Ok(inner_volume_factor(d) * l1)
}

/// [`lemma1_gap_bound`] on two lattice corners.
pub fn lemma1_gap_bound_indexed(
    params: &ChainParameters,
    z: &IndexedCorner,
    w: &IndexedCorner,
) -> Result<f64> {
    z.validate(params)?;
    w.validate(params)?;
    lemma1_gap_bound(&z.realize(params), &w.realize(params))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    /// Bumping `index` alone uncovered `captured_point`.
    Advance {
        index: usize,
        corner: IndexedCorner,
        captured_point: usize,
    },
    /// Every eligible index is bad; `corner` bumps all of them at once.
    AllBad {
        bad_indices: Vec<usize>,
        corner: IndexedCorner,
    },
    /// Fewer than `d/2` eligible indices remain.
    Exhausted,
}

/// One shrink step from `corner`.
///
/// Eligible indices are tried in increasing order and the first one whose
/// bump lowers the closed count is taken; the captured point is the lowest
/// point index in the uncovered slab.
pub fn chain_step(
    points: &PointSet,
    params: &ChainParameters,
    corner: &IndexedCorner,
) -> Result<StepOutcome> {
    corner.validate(params)?;
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if points.dim() != params.dim {
        return Err(Error::DimensionMismatch {
            expected: params.dim,
            found: points.dim(),
        });
    }

    let eligible = corner.eligible(params);
    if params.is_exhausted(eligible.len()) {
        return Ok(StepOutcome::Exhausted);
    }

    let y = corner.realize(params);
    let before = points.count_closed_at(&y);
    let mut shrunk = y.clone();
    for &j in &eligible {
        shrunk[j] = params.coordinate(corner.counters[j] + 1);
        let after = points.count_closed_at(&shrunk);
        if after < before {
            let captured_point = points
                .iter()
                .position(|p| in_closed_box(p, &y) && !in_closed_box(p, &shrunk))
                .expect("closed count dropped, so the slab holds a point");
            return Ok(StepOutcome::Advance {
                index: j,
                corner: corner.incremented(j),
                captured_point,
            });
        }
        shrunk[j] = y[j];
    }

    Ok(StepOutcome::AllBad {
        corner: corner.incremented_all(&eligible),
        bad_indices: eligible,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub corner_before: IndexedCorner,
    pub incremented_index: usize,
    pub corner_after: IndexedCorner,
    pub captured_point_index: usize,
}

/// Nested chain `[0,1]^d = [0,y_0] ⊃ … ⊃ [0,y_k]` with one captured point
/// per step.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainCertificate {
    pub params: ChainParameters,
    pub steps: Vec<ChainStep>,
    pub k: usize,
    pub terminal_corner: IndexedCorner,
}

impl ChainCertificate {
    pub fn captured_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|s| s.captured_point_index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChainResult {
    Certificate(ChainCertificate),
    Refuted {
        witness: ViolationWitness,
        partial_chain: Vec<ChainStep>,
    },
}

impl ChainResult {
    pub fn is_certificate(&self) -> bool {
        matches!(self, ChainResult::Certificate(_))
    }

    pub fn certificate(&self) -> Option<&ChainCertificate> {
        match self {
            ChainResult::Certificate(c) => Some(c),
            ChainResult::Refuted { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&ViolationWitness> {
        match self {
            ChainResult::Certificate(_) => None,
            ChainResult::Refuted { witness, .. } => Some(witness),
        }
    }
}

/// Iterates [`chain_step`] from the unit cube until the chain is exhausted
/// (certificate) or a step is all-bad (refutation).
pub fn run_chain(points: &PointSet, params: &ChainParameters) -> Result<ChainResult> {
    let mut corner = IndexedCorner::origin(params.dim);
    let mut steps = Vec::new();
    loop {
        match chain_step(points, params, &corner)? {
            StepOutcome::Advance {
                index,
                corner: next,
                captured_point,
            } => {
                steps.push(ChainStep {
                    corner_before: corner,
                    incremented_index: index,
                    corner_after: next.clone(),
                    captured_point_index: captured_point,
                });
                corner = next;
            }
            StepOutcome::AllBad { corner: inner, .. } => {
                let witness = extract_witness(points, params, &corner, &inner)?;
                return Ok(ChainResult::Refuted {
                    witness,
                    partial_chain: steps,
                });
            }
            StepOutcome::Exhausted => {
                return Ok(ChainResult::Certificate(ChainCertificate {
                    params: *params,
                    k: steps.len(),
                    steps,
                    terminal_corner: corner,
                }));
            }
        }
    }
}

/// Validates `(d, ε, β)` against the point set and runs the chain.
pub fn certify(points: &PointSet, epsilon: f64, beta: f64) -> Result<ChainResult> {
    let params = ChainParameters::new(points.dim(), epsilon, beta)?;
    run_chain(points, &params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(dim: usize, pts: &[&[f64]]) -> PointSet {
        PointSet::new(dim, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn parameter_validation() {
        let p = ChainParameters::new(2, 0.01, 20.0).unwrap();
        assert_eq!(p.step(), 0.1);
        assert_eq!(p.a_max(), 5);
        assert!(matches!(
            ChainParameters::new(2, 0.01, 16.0),
            Err(Error::UnsoundBeta { margin, .. }) if margin == 2.0
        ));
        assert!(matches!(
            ChainParameters::new(1, 0.01, 20.0),
            Err(Error::DimensionTooSmall(1))
        ));
        assert!(matches!(
            ChainParameters::new(3, 0.0, 20.0),
            Err(Error::NonpositiveEpsilon(_))
        ));
        assert!(ChainParameters::new(3, -1.0, 20.0).is_err());
        assert!(ChainParameters::new(3, f64::NAN, 20.0).is_err());
        assert!(ChainParameters::new(3, 0.01, f64::NAN).is_err());
        assert!(ChainParameters::new(3, 0.01, f64::INFINITY).is_err());
    }

    #[test]
    fn guaranteed_lengths() {
        let g = |d, e| {
            ChainParameters::new(d, e, 20.0)
                .unwrap()
                .guaranteed_chain_length()
        };
        assert_eq!(g(10, 0.01), 25);
        assert_eq!(g(2, 0.05), 1);
        assert_eq!(g(3, 0.004), 12);
    }

    #[test]
    fn lattice_stays_above_the_inner_cube() {
        for d in 2..=40 {
            for &eps in &[
                0.1,
                0.05,
                0.02,
                0.01,
                0.005,
                0.004,
                0.003,
                0.001,
                1.0 / 60.0,
                1.0 / 3.0 / 20.0,
            ] {
                for &beta in &[16.5, 20.0, 24.0, 37.7] {
                    let Ok(p) = ChainParameters::new(d, eps, beta) else {
                        continue;
                    };
                    assert!(p.a_max() as f64 * p.beta() * p.epsilon() <= 1.0);
                    assert!(p.coordinate(p.a_max()) >= 1.0 - 1.0 / d as f64);
                    assert!((1.0 / (beta * eps)).floor() as u64 - p.a_max() <= 1);
                }
            }
        }
    }

    #[test]
    fn large_epsilon_gives_an_empty_lattice() {
        let p = ChainParameters::new(4, 0.06, 20.0).unwrap();
        assert_eq!(p.a_max(), 0);
        let x = set(4, &[&[0.5; 4]]);
        let result = run_chain(&x, &p).unwrap();
        let cert = result.certificate().unwrap();
        assert_eq!(cert.k, 0);
        assert_eq!(p.guaranteed_chain_length(), 0);
    }

    #[test]
    fn gap_bound_examples() {
        assert_eq!(lemma1_gap_bound(&[1.0, 1.0], &[0.5, 0.5]).unwrap(), 0.25);
        assert_eq!(lemma1_gap_bound(&[0.8, 0.9], &[0.8, 0.9]).unwrap(), 0.0);
        assert!(lemma1_gap_bound(&[1.0, 1.0], &[0.4, 1.0]).is_err());
        assert!(lemma1_gap_bound(&[0.6, 1.0], &[0.7, 1.0]).is_err());
        assert!(lemma1_gap_bound(&[1.0], &[1.0, 1.0]).is_err());

        let p = ChainParameters::new(2, 0.01, 20.0).unwrap();
        let z = IndexedCorner::new(vec![0, 0]);
        let w = IndexedCorner::new(vec![1, 1]);
        let bound = lemma1_gap_bound_indexed(&p, &z, &w).unwrap();
        assert!((bound - 0.25 * 0.2).abs() < 1e-15);
        assert!(lemma1_gap_bound_indexed(&p, &z, &IndexedCorner::new(vec![6, 0])).is_err());
    }

    #[test]
    fn all_bad_at_the_origin_for_a_central_point() {
        let p = ChainParameters::new(2, 0.01, 20.0).unwrap();
        let x = set(2, &[&[0.5, 0.5]]);
        let outcome = chain_step(&x, &p, &IndexedCorner::origin(2)).unwrap();
        assert_eq!(
            outcome,
            StepOutcome::AllBad {
                bad_indices: vec![0, 1],
                corner: IndexedCorner::new(vec![1, 1]),
            }
        );
    }

    #[test]
    fn advance_captures_the_uncovered_point() {
        let p = ChainParameters::new(2, 0.01, 20.0).unwrap();
        let x = set(2, &[&[0.2, 0.3], &[0.95, 0.5], &[0.97, 0.1]]);
        let outcome = chain_step(&x, &p, &IndexedCorner::origin(2)).unwrap();
        assert_eq!(
            outcome,
            StepOutcome::Advance {
                index: 0,
                corner: IndexedCorner::new(vec![1, 0]),
                captured_point: 1,
            }
        );
    }

    #[test]
    fn full_counters_are_exhausted() {
        let p = ChainParameters::new(3, 0.01, 20.0).unwrap();
        let x = set(3, &[&[0.5; 3]]);
        let top = IndexedCorner::new(vec![5, 5, 5]);
        assert_eq!(chain_step(&x, &p, &top).unwrap(), StepOutcome::Exhausted);
        // d = 3: one eligible index is fewer than 3/2
        let one_left = IndexedCorner::new(vec![5, 2, 5]);
        assert_eq!(
            chain_step(&x, &p, &one_left).unwrap(),
            StepOutcome::Exhausted
        );
    }

    #[test]
    fn step_errors() {
        let p = ChainParameters::new(2, 0.01, 20.0).unwrap();
        let x = set(2, &[&[0.5, 0.5]]);
        assert!(matches!(
            chain_step(&x, &p, &IndexedCorner::new(vec![6, 0])),
            Err(Error::InvalidCorner(_))
        ));
        assert!(matches!(
            chain_step(&x, &p, &IndexedCorner::new(vec![0, 0, 0])),
            Err(Error::InvalidCorner(_))
        ));
        let empty = PointSet::new(2, vec![]).unwrap();
        assert!(matches!(
            chain_step(&empty, &p, &IndexedCorner::origin(2)),
            Err(Error::EmptyPointSet)
        ));
        let x3 = set(3, &[&[0.5; 3]]);
        assert!(chain_step(&x3, &p, &IndexedCorner::origin(2)).is_err());
    }

    #[test]
    fn single_point_is_refuted_at_the_first_step() {
        let x = set(2, &[&[0.5, 0.5]]);
        let result = certify(&x, 0.01, 20.0).unwrap();
        let ChainResult::Refuted {
            witness,
            partial_chain,
        } = result
        else {
            panic!("expected a refutation");
        };
        assert!(partial_chain.is_empty());
        assert_eq!(witness.side, WitnessSide::OverfullInner);
        assert_eq!(witness.excess, 1.0 - 0.9 * 0.9);
        assert!((witness.excess - 0.19).abs() < 1e-12);
    }

    #[test]
    fn chain_on_a_fine_grid_is_certified() {
        // 40 x 40 midpoint grid: star discrepancy below 0.05
        let m = 40;
        let pts: Vec<Vec<f64>> = (0..m * m)
            .map(|k| {
                vec![
                    (2 * (k % m) + 1) as f64 / (2 * m) as f64,
                    (2 * (k / m) + 1) as f64 / (2 * m) as f64,
                ]
            })
            .collect();
        let x = PointSet::new(2, pts).unwrap();
        let p = ChainParameters::new(2, 0.05, 20.0).unwrap();
        let cert = run_chain(&x, &p).unwrap();
        let cert = cert.certificate().expect("certificate");
        assert!(cert.k as u64 >= p.guaranteed_chain_length());
        assert!(verify_certificate(&x, cert).is_valid());
    }
}
