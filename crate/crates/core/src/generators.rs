//! Test point sets: seeded uniform random, Halton, Hammersley and midpoint
//! grids.
//!
//! The random generator is ChaCha8 (`rand_chacha`), seeded through
//! `SeedableRng::seed_from_u64`, with each coordinate taken as
//! `(next_u64() >> 11) · 2^-53`. Both the stream and the conversion are
//! fixed, so a seed names the same point set on every platform.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_set::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Random,
    Halton,
    Hammersley,
    Grid,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Random => "random",
            GeneratorKind::Halton => "halton",
            GeneratorKind::Hammersley => "hammersley",
            GeneratorKind::Grid => "grid",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "random" => Ok(GeneratorKind::Random),
            "halton" => Ok(GeneratorKind::Halton),
            "hammersley" => Ok(GeneratorKind::Hammersley),
            "grid" => Ok(GeneratorKind::Grid),
            other => Err(Error::InvalidSpec(format!(
                "unknown generator kind {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
    /// Radical-inverse bases; empty means the first `dim` primes.
    pub bases: Vec<u64>,
    /// Grid only; `n` must equal `points_per_axis^dim`.
    pub points_per_axis: Option<usize>,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, dim: usize) -> Self {
        Self {
            kind,
            n,
            dim,
            seed: 0,
            bases: Vec::new(),
            points_per_axis: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_bases(mut self, bases: Vec<u64>) -> Self {
        self.bases = bases;
        self
    }

    /// A midpoint grid with `m^dim` points.
    pub fn grid(points_per_axis: usize, dim: usize) -> Self {
        let n = u32::try_from(dim)
            .ok()
            .and_then(|d| points_per_axis.checked_pow(d))
            .unwrap_or(usize::MAX);
        Self {
            points_per_axis: Some(points_per_axis),
            ..Self::new(GeneratorKind::Grid, n, dim)
        }
    }

    /// One-line description, used as the CSV comment header.
    pub fn describe(&self) -> String {
        let mut s = format!("kind={} n={} d={}", self.kind, self.n, self.dim);
        match self.kind {
            GeneratorKind::Random => s.push_str(&format!(" seed={}", self.seed)),
            GeneratorKind::Halton | GeneratorKind::Hammersley => {
                let bases: Vec<String> = self.resolved_bases().iter().map(u64::to_string).collect();
                s.push_str(&format!(" bases={}", bases.join(":")));
            }
            GeneratorKind::Grid => {
                if let Some(m) = self.points_per_axis {
                    s.push_str(&format!(" points_per_axis={m}"));
                }
            }
        }
        s
    }

    fn resolved_bases(&self) -> Vec<u64> {
        if self.bases.is_empty() {
            first_primes(self.dim)
        } else {
            self.bases.clone()
        }
    }

    fn grid_side(&self) -> Result<usize> {
        let m = match self.points_per_axis {
            Some(m) => m,
            None => integer_root(self.n, self.dim).ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "grid needs n to be a perfect {}-th power, got n = {}",
                    self.dim, self.n
                ))
            })?,
        };
        let total = u32::try_from(self.dim).ok().and_then(|d| m.checked_pow(d));
        if m == 0 || total != Some(self.n) {
            return Err(Error::InvalidSpec(format!(
                "grid with {m} points per axis in d = {} does not have n = {} points",
                self.dim, self.n
            )));
        }
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be at least 1".into()));
        }
        if self.dim == 0 {
            return Err(Error::InvalidSpec("d must be at least 1".into()));
        }
        match self.kind {
            GeneratorKind::Random => {}
            GeneratorKind::Halton | GeneratorKind::Hammersley => {
                let bases = self.resolved_bases();
                if bases.len() != self.dim {
                    return Err(Error::InvalidSpec(format!(
                        "{} bases given for d = {}",
                        bases.len(),
                        self.dim
                    )));
                }
                for (i, &b) in bases.iter().enumerate() {
                    if !is_prime(b) {
                        return Err(Error::InvalidSpec(format!("base {b} is not prime")));
                    }
                    if bases[..i].contains(&b) {
                        return Err(Error::InvalidSpec(format!("base {b} repeated")));
                    }
                }
            }
            GeneratorKind::Grid => {
                self.grid_side()?;
            }
        }
        Ok(())
    }
}

/// Builds the point set described by `spec`. All coordinates lie in `[0,1)`.
pub fn generate(spec: &GeneratorSpec) -> Result<PointSet> {
    spec.validate()?;
    let (n, d) = (spec.n, spec.dim);
    let mut coords = Vec::with_capacity(n * d);
    match spec.kind {
        GeneratorKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            coords.extend((0..n * d).map(|_| unit_f64(rng.next_u64())));
        }
        GeneratorKind::Halton => {
            let bases = spec.resolved_bases();
            for i in 0..n as u64 {
                coords.extend(bases.iter().map(|&b| radical_inverse(i + 1, b)));
            }
        }
        GeneratorKind::Hammersley => {
            // (i/n, φ_{b_1}(i), …, φ_{b_{d-1}}(i)) for i = 0..n
            let bases = spec.resolved_bases();
            for i in 0..n as u64 {
                coords.push(i as f64 / n as f64);
                coords.extend(bases[..d - 1].iter().map(|&b| radical_inverse(i, b)));
            }
        }
        GeneratorKind::Grid => {
            let m = spec.grid_side()?;
            let mut idx = vec![0usize; d];
            for _ in 0..n {
                coords.extend(idx.iter().map(|&i| (2 * i + 1) as f64 / (2 * m) as f64));
                for slot in idx.iter_mut().rev() {
                    *slot += 1;
                    if *slot < m {
                        break;
                    }
                    *slot = 0;
                }
            }
        }
    }
    PointSet::from_flat(d, coords)
}

fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Digit reversal of `i` in base `base` about the radix point.
///
/// Digits are accumulated as an integer fraction and divided once, so the
/// result is the correctly rounded value while the denominator fits in 53
/// bits.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut numerator: u128 = 0;
    let mut denominator: u128 = 1;
    while i > 0 {
        numerator = numerator * base as u128 + (i % base) as u128;
        denominator *= base as u128;
        i /= base;
    }
    numerator as f64 / denominator as f64
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    (2..)
        .take_while(|q| q * q <= p)
        .all(|q| !p.is_multiple_of(q))
}

pub fn first_primes(count: usize) -> Vec<u64> {
    (2..).filter(|&p| is_prime(p)).take(count).collect()
}

fn integer_root(n: usize, d: usize) -> Option<usize> {
    let guess = (n as f64).powf(1.0 / d as f64).round() as usize;
    let d32 = u32::try_from(d).ok()?;
    (guess.saturating_sub(1)..=guess + 1).find(|m| m.checked_pow(d32) == Some(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::{star_discrepancy_exact, ExactOptions};

    #[test]
    fn halton_base_two() {
        let x =
            generate(&GeneratorSpec::new(GeneratorKind::Halton, 3, 1).with_bases(vec![2])).unwrap();
        assert_eq!(x.as_flat(), &[0.5, 0.25, 0.75]);
    }

    #[test]
    fn halton_default_bases() {
        let x = generate(&GeneratorSpec::new(GeneratorKind::Halton, 4, 2)).unwrap();
        assert_eq!(x.point(0), &[0.5, 1.0 / 3.0]);
        assert_eq!(x.point(1), &[0.25, 2.0 / 3.0]);
        assert_eq!(x.point(3), &[1.0 / 8.0, 4.0 / 9.0]);
    }

    #[test]
    fn hammersley_first_axis_is_regular() {
        let x = generate(&GeneratorSpec::new(GeneratorKind::Hammersley, 4, 2)).unwrap();
        assert_eq!(x.as_flat(), &[0.0, 0.0, 0.25, 0.5, 0.5, 0.25, 0.75, 0.75]);
    }

    #[test]
    fn grid_midpoints() {
        let x = generate(&GeneratorSpec::grid(2, 1)).unwrap();
        assert_eq!(x.as_flat(), &[0.25, 0.75]);
        let x = generate(&GeneratorSpec::new(GeneratorKind::Grid, 4, 2)).unwrap();
        assert_eq!(
            x.as_flat(),
            &[0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75, 0.75]
        );
        assert!(generate(&GeneratorSpec::new(GeneratorKind::Grid, 5, 2)).is_err());
    }

    #[test]
    fn random_is_reproducible() {
        let spec = GeneratorSpec::new(GeneratorKind::Random, 50, 3).with_seed(11);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = generate(&spec.clone().with_seed(12)).unwrap();
        assert_ne!(generate(&spec).unwrap(), other);
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&GeneratorSpec::new(GeneratorKind::Random, 0, 2)).is_err());
        assert!(generate(&GeneratorSpec::new(GeneratorKind::Random, 3, 0)).is_err());
        let h = GeneratorSpec::new(GeneratorKind::Halton, 3, 2);
        assert!(generate(&h.clone().with_bases(vec![2, 4])).is_err());
        assert!(generate(&h.clone().with_bases(vec![3, 3])).is_err());
        assert!(generate(&h.with_bases(vec![2])).is_err());
        assert!("sobol".parse::<GeneratorKind>().is_err());
    }

    #[test]
    fn coordinates_are_in_the_half_open_cube() {
        for kind in [
            GeneratorKind::Random,
            GeneratorKind::Halton,
            GeneratorKind::Hammersley,
        ] {
            let x = generate(&GeneratorSpec::new(kind, 500, 4).with_seed(3)).unwrap();
            assert!(
                x.as_flat().iter().all(|&c| (0.0..1.0).contains(&c)),
                "{kind}"
            );
        }
        let x = generate(&GeneratorSpec::grid(5, 3)).unwrap();
        assert!(x.as_flat().iter().all(|&c| (0.0..1.0).contains(&c)));
    }

    #[test]
    fn midpoint_grid_discrepancy_in_one_dimension() {
        for m in 1..=16 {
            let x = generate(&GeneratorSpec::grid(m, 1)).unwrap();
            let r = star_discrepancy_exact(&x, &ExactOptions::default()).unwrap();
            let expected = 1.0 / (2 * m) as f64;
            if m.is_power_of_two() {
                assert_eq!(r.value, expected, "m = {m}");
            } else {
                assert!((r.value - expected).abs() <= 4.0 * f64::EPSILON, "m = {m}");
            }
        }
    }

    #[test]
    fn longer_halton_prefix_is_more_uniform() {
        let d = |n| {
            let x = generate(&GeneratorSpec::new(GeneratorKind::Halton, n, 2)).unwrap();
            star_discrepancy_exact(&x, &ExactOptions::default())
                .unwrap()
                .value
        };
        assert!(d(256) < d(16));
    }

    #[test]
    fn primes() {
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
        assert!(!is_prime(1));
        assert_eq!(integer_root(1000, 3), Some(10));
        assert_eq!(integer_root(1001, 3), None);
    }
}
