//! Exact and sampled evaluation of the star discrepancy
//!
//! ```text
//! D*(X) = sup_y | #{x in [0,y]} / n - vol([0,y]) |
//! ```
//!
//! The supremum is realized on the critical grid `Γ_0 × … × Γ_{d-1}`, where
//! `Γ_j` holds the distinct `j`-th coordinates of the points plus `1`. At a
//! grid corner two quantities are evaluated:
//!
//! * overfill `closed(y)/n - vol(y)`, with the closed-box count, and
//! * underfill `vol(y) - open(y)/n`, with the open-box count, which is the
//!   limit of closed boxes approaching `y` from below.
//!
//! The exact routine enumerates all axes but the last recursively, filtering
//! the candidate points as it goes, and sweeps the last axis with two cursors
//! over points pre-sorted along it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_set::{fraction, volume, PointSet};

pub const DEFAULT_MAX_CORNERS: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `closed(y)/n - vol(y)`
    Overfill,
    /// `vol(y) - open(y)/n`
    Underfill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub argmax_corner: Vec<f64>,
    pub side: Side,
    pub method: Method,
    pub n: usize,
    pub d: usize,
}

impl DiscrepancyResult {
    /// Evaluates the recorded side at the recorded corner. For a result
    /// produced by this module this equals `value` bit for bit.
    pub fn reevaluate(&self, points: &PointSet) -> f64 {
        two_sided_at(points, &self.argmax_corner, self.side)
    }
}

pub(crate) fn two_sided_at(points: &PointSet, corner: &[f64], side: Side) -> f64 {
    let n = points.len();
    match side {
        Side::Overfill => fraction(points.count_closed_at(corner), n) - volume(corner),
        Side::Underfill => volume(corner) - fraction(points.count_open_at(corner), n),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    /// Largest critical grid (number of corners) that will be enumerated.
    pub max_corners: u64,
    /// `None` uses the global rayon pool, `Some(1)` runs on the calling
    /// thread, `Some(k)` builds a dedicated pool of `k` workers.
    pub threads: Option<usize>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            max_corners: DEFAULT_MAX_CORNERS,
            threads: None,
        }
    }
}

/// Sorted distinct coordinates per axis, with `1` appended when absent.
pub fn critical_grid(points: &PointSet) -> Vec<Vec<f64>> {
    (0..points.dim())
        .map(|axis| {
            let mut values: Vec<f64> = points.iter().map(|p| p[axis]).collect();
            values.push(1.0);
            values.sort_by(f64::total_cmp);
            values.dedup_by(|a, b| a == b);
            values
        })
        .collect()
}

pub fn grid_size(grid: &[Vec<f64>]) -> u128 {
    grid.iter()
        .fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128))
}

#[derive(Debug, Clone)]
struct Best {
    value: f64,
    corner: Vec<f64>,
    side: Side,
}

impl Best {
    /// Larger value wins; equal values go to the lexicographically smaller
    /// corner.
    fn beats(&self, other: &Best) -> bool {
        match self.value.total_cmp(&other.value) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => lex_less(&self.corner, &other.corner),
        }
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

fn pick(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(a), Some(b)) => Some(if b.beats(&a) { b } else { a }),
    }
}

struct Sweep<'a> {
    points: &'a PointSet,
    grid: &'a [Vec<f64>],
    n: usize,
    last: usize,
}

impl Sweep<'_> {
    fn coord(&self, index: u32, axis: usize) -> f64 {
        self.points.point(index as usize)[axis]
    }

    /// Visits every corner extending `prefix` in lexicographic order.
    /// `closed`/`open` are the points passing the closed/open test on the
    /// axes fixed so far, kept sorted by their last coordinate.
    fn search(
        &self,
        prefix: &mut Vec<f64>,
        prefix_volume: f64,
        closed: &[u32],
        open: &[u32],
        best: &mut Option<Best>,
    ) {
        let axis = prefix.len();
        if axis == self.last {
            self.sweep_last(prefix, prefix_volume, closed, open, best);
            return;
        }
        for &g in &self.grid[axis] {
            let closed_next: Vec<u32> = closed
                .iter()
                .copied()
                .filter(|&i| self.coord(i, axis) <= g)
                .collect();
            let open_next: Vec<u32> = open
                .iter()
                .copied()
                .filter(|&i| self.coord(i, axis) < g)
                .collect();
            prefix.push(g);
            self.search(prefix, prefix_volume * g, &closed_next, &open_next, best);
            prefix.pop();
        }
    }

    fn sweep_last(
        &self,
        prefix: &[f64],
        prefix_volume: f64,
        closed: &[u32],
        open: &[u32],
        best: &mut Option<Best>,
    ) {
        let (mut c, mut o) = (0, 0);
        for &g in &self.grid[self.last] {
            while c < closed.len() && self.coord(closed[c], self.last) <= g {
                c += 1;
            }
            while o < open.len() && self.coord(open[o], self.last) < g {
                o += 1;
            }
            let vol = prefix_volume * g;
            let over = fraction(c, self.n) - vol;
            let under = vol - fraction(o, self.n);
            let current = best.as_ref().map_or(f64::NEG_INFINITY, |b| b.value);
            let (value, side) = if under > over {
                (under, Side::Underfill)
            } else {
                (over, Side::Overfill)
            };
            if value > current {
                let mut corner = prefix.to_vec();
                corner.push(g);
                *best = Some(Best {
                    value,
                    corner,
                    side,
                });
            }
        }
    }

    fn sorted_by_last(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.n as u32).collect();
        order.sort_by(|&a, &b| {
            self.coord(a, self.last)
                .total_cmp(&self.coord(b, self.last))
                .then(a.cmp(&b))
        });
        order
    }

    fn run_partition(&self, all: &[u32], first: f64) -> Option<Best> {
        let closed: Vec<u32> = all
            .iter()
            .copied()
            .filter(|&i| self.coord(i, 0) <= first)
            .collect();
        let open: Vec<u32> = all
            .iter()
            .copied()
            .filter(|&i| self.coord(i, 0) < first)
            .collect();
        let mut prefix = vec![first];
        let mut best = None;
        self.search(&mut prefix, first, &closed, &open, &mut best);
        best
    }
}

/// Exact star discrepancy by enumeration of the critical grid.
///
/// Ties in value resolve to the lexicographically smallest corner, and at a
/// single corner overfill wins over an equal underfill; the result does not
/// depend on the thread count.
pub fn star_discrepancy_exact(
    points: &PointSet,
    options: &ExactOptions,
) -> Result<DiscrepancyResult> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let grid = critical_grid(points);
    let corners = grid_size(&grid);
    if corners > options.max_corners as u128 {
        return Err(Error::GridTooLarge {
            corners,
            cap: options.max_corners,
        });
    }
    let d = points.dim();
    let sweep = Sweep {
        points,
        grid: &grid,
        n: points.len(),
        last: d - 1,
    };
    let all = sweep.sorted_by_last();

    let best = if d == 1 || options.threads == Some(1) {
        let mut best = None;
        sweep.search(&mut Vec::with_capacity(d), 1.0, &all, &all, &mut best);
        best
    } else {
        let job = || {
            grid[0]
                .par_iter()
                .map(|&first| sweep.run_partition(&all, first))
                .reduce(|| None, pick)
        };
        match options.threads {
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
                .install(job),
            None => job(),
        }
    };

    let best = best.expect("critical grid is never empty");
    Ok(DiscrepancyResult {
        value: best.value,
        argmax_corner: best.corner,
        side: best.side,
        method: Method::Exact,
        n: points.len(),
        d,
    })
}

/// Lower bound on the star discrepancy from `trials` random critical-grid
/// corners (each coordinate drawn uniformly from `Γ_j`).
///
/// When `trials` is at least the size of the critical grid the whole grid
/// is enumerated instead, so the result equals the exact value.
pub fn star_discrepancy_sampled(
    points: &PointSet,
    trials: u64,
    seed: u64,
) -> Result<DiscrepancyResult> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let grid = critical_grid(points);
    if grid_size(&grid) <= trials as u128 {
        let exact = star_discrepancy_exact(
            points,
            &ExactOptions {
                max_corners: trials,
                threads: Some(1),
            },
        )?;
        return Ok(DiscrepancyResult {
            method: Method::Sampled,
            ..exact
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Best> = None;
    let mut corner = vec![0.0; points.dim()];
    for _ in 0..trials {
        for (y, axis) in corner.iter_mut().zip(&grid) {
            *y = axis[rng.random_range(0..axis.len())];
        }
        for side in [Side::Overfill, Side::Underfill] {
            let candidate = Best {
                value: two_sided_at(points, &corner, side),
                corner: corner.clone(),
                side,
            };
            if best.as_ref().is_none_or(|b| candidate.beats(b)) {
                best = Some(candidate);
            }
        }
    }
    let best = best.expect("trials > 0");
    Ok(DiscrepancyResult {
        value: best.value,
        argmax_corner: best.corner,
        side: best.side,
        method: Method::Sampled,
        n: points.len(),
        d: points.dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Naive oracle: own grid construction, odometer enumeration and a full
    /// recount of both sides at every corner.
    fn brute_force(points: &PointSet) -> f64 {
        let d = points.dim();
        let n = points.len() as f64;
        let axes: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                let mut v = vec![1.0];
                for p in points.iter() {
                    if !v.contains(&p[j]) {
                        v.push(p[j]);
                    }
                }
                v
            })
            .collect();
        let mut idx = vec![0usize; d];
        let mut best: f64 = 0.0;
        loop {
            let y: Vec<f64> = idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect();
            let mut vol = 1.0;
            for v in &y {
                vol *= v;
            }
            let mut closed = 0;
            let mut open = 0;
            for p in points.iter() {
                let mut c = true;
                let mut o = true;
                for j in 0..d {
                    c &= p[j] <= y[j];
                    o &= p[j] < y[j];
                }
                closed += c as usize;
                open += o as usize;
            }
            best = best.max(closed as f64 / n - vol).max(vol - open as f64 / n);

            let mut k = 0;
            loop {
                if k == d {
                    return best;
                }
                idx[k] += 1;
                if idx[k] < axes[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    fn set(dim: usize, pts: &[&[f64]]) -> PointSet {
        PointSet::new(dim, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn exact(points: &PointSet) -> DiscrepancyResult {
        star_discrepancy_exact(points, &ExactOptions::default()).unwrap()
    }

    #[test]
    fn single_point_in_the_middle() {
        let x = set(2, &[&[0.5, 0.5]]);
        let r = exact(&x);
        assert_eq!(brute_force(&x), 0.75);
        assert_eq!(r.value, 0.75);
        assert_eq!(r.argmax_corner, vec![0.5, 0.5]);
        assert_eq!(r.side, Side::Overfill);
    }

    #[test]
    fn midpoint_pair() {
        let x = set(1, &[&[0.25], &[0.75]]);
        assert_eq!(brute_force(&x), 0.25);
        assert_eq!(exact(&x).value, 0.25);
    }

    #[test]
    fn point_at_one_needs_the_open_count() {
        let x = set(1, &[&[1.0]]);
        assert_eq!(brute_force(&x), 1.0);
        let r = exact(&x);
        assert_eq!(r.value, 1.0);
        assert_eq!(r.argmax_corner, vec![1.0]);
        assert_eq!(r.side, Side::Underfill);
    }

    #[test]
    fn midpoint_sets_in_one_dimension() {
        for m in 1..=16usize {
            let pts: Vec<Vec<f64>> = (1..=m)
                .map(|i| vec![(2 * i - 1) as f64 / (2 * m) as f64])
                .collect();
            let x = PointSet::new(1, pts).unwrap();
            let expected = 1.0 / (2 * m) as f64;
            let value = exact(&x).value;
            assert_eq!(value, brute_force(&x), "m = {m}");
            // the stored midpoints are exact only when m is a power of two
            if m.is_power_of_two() {
                assert_eq!(value, expected, "m = {m}");
            } else {
                assert!((value - expected).abs() <= 4.0 * f64::EPSILON, "m = {m}");
            }
        }
    }

    #[test]
    fn errors() {
        let empty = PointSet::new(2, vec![]).unwrap();
        assert!(matches!(
            star_discrepancy_exact(&empty, &ExactOptions::default()),
            Err(Error::EmptyPointSet)
        ));
        let x = set(2, &[&[0.1, 0.2], &[0.3, 0.4], &[0.5, 0.6]]);
        let tight = ExactOptions {
            max_corners: 15,
            threads: None,
        };
        assert!(matches!(
            star_discrepancy_exact(&x, &tight),
            Err(Error::GridTooLarge {
                corners: 16,
                cap: 15
            })
        ));
        assert!(matches!(
            star_discrepancy_sampled(&x, 0, 1),
            Err(Error::ZeroTrials)
        ));
    }

    #[test]
    fn sampled_examples() {
        let x = set(2, &[&[0.5, 0.5]]);
        let r = star_discrepancy_sampled(&x, 10_000, 7).unwrap();
        assert!(r.value > 0.0 && r.value <= 0.75);
        assert_eq!(r.method, Method::Sampled);

        let ones = set(3, &[&[1.0, 1.0, 1.0]]);
        let r = star_discrepancy_sampled(&ones, 1, 3).unwrap();
        assert!(r.value > 0.0 && r.value <= 1.0);
    }

    #[test]
    fn sampling_without_covering_the_grid_is_seeded() {
        let pts: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![((i * 7) % 30) as f64 / 30.0, ((i * 11) % 31) as f64 / 31.0])
            .collect();
        let x = PointSet::new(2, pts).unwrap();
        let a = star_discrepancy_sampled(&x, 50, 42).unwrap();
        let b = star_discrepancy_sampled(&x, 50, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.value <= exact(&x).value);
        assert_eq!(a.reevaluate(&x), a.value);
    }

    fn small_sets() -> impl Strategy<Value = PointSet> {
        (1usize..=3, 1usize..=8).prop_flat_map(|(d, n)| {
            // a coarse lattice of coordinates makes ties and duplicates common
            prop::collection::vec(
                prop::collection::vec(
                    prop_oneof![(0u32..=8).prop_map(|k| k as f64 / 8.0), 0.0f64..=1.0],
                    d,
                ),
                n,
            )
            .prop_map(move |pts| PointSet::new(d, pts).unwrap())
        })
    }

    proptest! {
        #[test]
        fn exact_matches_brute_force(x in small_sets()) {
            let r = exact(&x);
            prop_assert!((r.value - brute_force(&x)).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&r.value));
            prop_assert_eq!(r.reevaluate(&x), r.value);
        }

        #[test]
        fn thread_count_does_not_change_the_result(x in small_sets()) {
            let serial = star_discrepancy_exact(&x, &ExactOptions { threads: Some(1), ..Default::default() }).unwrap();
            let pooled = star_discrepancy_exact(&x, &ExactOptions { threads: Some(3), ..Default::default() }).unwrap();
            prop_assert_eq!(serial, pooled);
        }

        #[test]
        fn sampled_never_exceeds_exact(x in small_sets(), trials in 1u64..40, seed in any::<u64>()) {
            let s = star_discrepancy_sampled(&x, trials, seed).unwrap();
            prop_assert!(s.value <= exact(&x).value);
            prop_assert_eq!(s.reevaluate(&x), s.value);
        }

        #[test]
        fn duplicating_a_point_moves_the_value_by_at_most_one_over_n(x in small_sets(), which in any::<prop::sample::Index>()) {
            let before = exact(&x).value;
            let p = x.point(which.index(x.len())).to_vec();
            let after = exact(&x.with_point(&p).unwrap()).value;
            prop_assert!((after - before).abs() <= 1.0 / x.len() as f64);
        }
    }
}
