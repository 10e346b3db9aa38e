//! Independent re-checking of certificates and witnesses.
//!
//! Everything here is recomputed from the point set with the closed-box
//! membership test; nothing from the chain construction is reused, so an
//! accepted certificate does not rely on `run_chain` being correct.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::HashSet;
use std::fmt;

use super::{ChainCertificate, ChainParameters, ViolationWitness, WitnessSide};
use crate::point_set::{in_closed_box, PointSet};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verification {
    pub failures: Vec<String>,
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, message: impl Into<String>) {
        self.failures.push(message.into());
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        writeln!(f, "{} failed check(s):", self.failures.len())?;
        for failure in &self.failures {
            writeln!(f, "  - {failure}")?;
        }
        Ok(())
    }
}

struct Lattice {
    dim: usize,
    epsilon: f64,
    beta: f64,
    step: f64,
    a_max: u64,
}

impl Lattice {
    fn of(params: &ChainParameters) -> Self {
        Self {
            dim: params.dim(),
            epsilon: params.epsilon(),
            beta: params.beta(),
            step: params.beta() * params.epsilon() / params.dim() as f64,
            a_max: params.a_max(),
        }
    }

    fn corner(&self, counters: &[u64]) -> Vec<f64> {
        counters
            .iter()
            .map(|&a| 1.0 - a as f64 * self.step)
            .collect()
    }

    fn admissible(&self, a: u64) -> bool {
        a as f64 * self.beta * self.epsilon <= 1.0
            && 1.0 - a as f64 * self.step >= 1.0 - 1.0 / self.dim as f64
    }

    fn check(&self, out: &mut Verification) {
        if self.dim < 2 {
            out.fail(format!("d = {} is below 2", self.dim));
            return;
        }
        if !(self.epsilon > 0.0) {
            out.fail(format!("epsilon = {} is not positive", self.epsilon));
        }
        let factor = (1.0 - 1.0 / self.dim as f64).powf(self.dim as f64);
        if !(self.beta / 2.0 * factor > 2.0) {
            out.fail(format!(
                "beta = {} fails (beta/2)(1-1/d)^d > 2 at d = {}",
                self.beta, self.dim
            ));
        }
        if !self.admissible(self.a_max) {
            out.fail(format!("a_max = {} leaves the lattice range", self.a_max));
        }
        let floor = (1.0 / (self.beta * self.epsilon)).floor();
        if self.admissible(self.a_max + 1) && ((self.a_max + 1) as f64) <= floor {
            out.fail(format!("a_max = {} is not maximal", self.a_max));
        }
    }
}

/// Re-checks every structural and counting claim of `cert` against `points`.
pub fn verify_certificate(points: &PointSet, cert: &ChainCertificate) -> Verification {
    let mut out = Verification::default();
    let lattice = Lattice::of(&cert.params);
    lattice.check(&mut out);
    let d = lattice.dim;
    if points.dim() != d {
        out.fail(format!(
            "point set has d = {}, certificate has d = {d}",
            points.dim()
        ));
        return out;
    }
    let n = points.len();

    if cert.k != cert.steps.len() {
        out.fail(format!(
            "k = {} but the chain has {} steps",
            cert.k,
            cert.steps.len()
        ));
    }

    let mut expected = vec![0u64; d];
    let mut seen = HashSet::new();
    for (i, step) in cert.steps.iter().enumerate() {
        let before = &step.corner_before.counters;
        let after = &step.corner_after.counters;
        if *before != expected {
            out.fail(format!(
                "step {i}: corner_before {before:?} does not continue the chain at {expected:?}"
            ));
        }
        if before.len() != d || after.len() != d {
            out.fail(format!("step {i}: corner has the wrong number of counters"));
            expected = after.clone();
            continue;
        }
        if step.incremented_index >= d {
            out.fail(format!(
                "step {i}: index {} is outside 0..{d}",
                step.incremented_index
            ));
        }
        let changed: Vec<usize> = (0..d).filter(|&j| before[j] != after[j]).collect();
        let single_bump = changed.len() == 1
            && changed[0] == step.incremented_index
            && after[changed[0]] == before[changed[0]] + 1;
        if !single_bump {
            out.fail(format!(
                "step {i}: does not raise exactly counter {} by one (changed {changed:?})",
                step.incremented_index
            ));
        }
        if let Some(a) = after.iter().find(|&&a| a > lattice.a_max) {
            out.fail(format!(
                "step {i}: counter {a} exceeds a_max = {}",
                lattice.a_max
            ));
        }

        let p = step.captured_point_index;
        if p >= n {
            out.fail(format!(
                "step {i}: captured point {p} does not exist (n = {n})"
            ));
        } else {
            let outer = lattice.corner(before);
            let inner = lattice.corner(after);
            let x = points.point(p);
            if !in_closed_box(x, &outer) {
                out.fail(format!(
                    "step {i}: point {p} is not in the box before the step"
                ));
            }
            if in_closed_box(x, &inner) {
                out.fail(format!(
                    "step {i}: point {p} is still in the box after the step"
                ));
            }
            if !seen.insert(p) {
                out.fail(format!("step {i}: point {p} was already captured"));
            }
        }
        expected = after.clone();
    }

    let terminal = &cert.terminal_corner.counters;
    if *terminal != expected {
        out.fail(format!(
            "terminal counters {terminal:?} differ from the end of the chain {expected:?}"
        ));
    }
    if terminal.len() == d {
        if let Some(a) = terminal.iter().find(|&&a| a > lattice.a_max) {
            out.fail(format!(
                "terminal counter {a} exceeds a_max = {}",
                lattice.a_max
            ));
        }
        let eligible = terminal.iter().filter(|&&a| a < lattice.a_max).count();
        if 2 * eligible >= d {
            out.fail(format!(
                "chain stopped early: {eligible} of {d} counters can still be raised"
            ));
        }
    }

    let guaranteed = (d as u64 / 2) * lattice.a_max;
    if (cert.steps.len() as u64) < guaranteed {
        out.fail(format!(
            "chain length {} is below the guaranteed length {guaranteed}",
            cert.steps.len()
        ));
    }
    if cert.steps.len() > n {
        out.fail(format!("chain length {} exceeds n = {n}", cert.steps.len()));
    }
    out
}

/// Recounts a witness: equal closed counts at both corners, a volume gap
/// above `2ε`, and a local discrepancy above `ε` at the cited box that
/// matches the recorded excess exactly.
pub fn verify_witness(
    points: &PointSet,
    params: &ChainParameters,
    witness: &ViolationWitness,
) -> Verification {
    let mut out = Verification::default();
    let lattice = Lattice::of(params);
    lattice.check(&mut out);
    let d = lattice.dim;
    let (outer, inner) = (&witness.outer.counters, &witness.inner.counters);
    if points.dim() != d || outer.len() != d || inner.len() != d {
        out.fail("dimension mismatch between points, parameters and witness");
        return out;
    }
    if points.is_empty() {
        out.fail("empty point set");
        return out;
    }
    for (name, c) in [("outer", outer), ("inner", inner)] {
        if c.iter().any(|&a| a > lattice.a_max) {
            out.fail(format!("{name} counters exceed a_max = {}", lattice.a_max));
        }
    }
    if outer.iter().zip(inner).any(|(a, b)| b < a) {
        out.fail("inner box is not contained in the outer box");
    }

    let z = lattice.corner(outer);
    let w = lattice.corner(inner);
    let count = |y: &[f64]| points.iter().filter(|x| in_closed_box(x, y)).count();
    let (mz, mw) = (count(&z), count(&w));
    if mz != witness.shared_count || mw != witness.shared_count {
        out.fail(format!(
            "recorded shared count {} but the boxes hold {mz} and {mw} points",
            witness.shared_count
        ));
    }

    let vol = |y: &[f64]| y.iter().product::<f64>();
    let (vz, vw) = (vol(&z), vol(&w));
    if !(vz - vw > 2.0 * lattice.epsilon) {
        out.fail(format!("volume gap {} is not above 2*epsilon", vz - vw));
    }
    let fraction = mz as f64 / points.len() as f64;
    let excess = match witness.side {
        WitnessSide::UnderfullOuter => vz - fraction,
        WitnessSide::OverfullInner => fraction - vw,
    };
    if !(excess > lattice.epsilon) {
        out.fail(format!("local discrepancy {excess} is not above epsilon"));
    }
    if excess != witness.excess {
        out.fail(format!(
            "recorded excess {} but recount gives {excess}",
            witness.excess
        ));
    }
    out
}
