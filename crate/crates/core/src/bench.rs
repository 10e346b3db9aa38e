//! Brackets the inverse star discrepancy `N*(d, ε)` for small `d`.
//!
//! A row compares the chain lower bound `⌊d/2⌋·⌊1/(βε)⌋` with the smallest
//! cardinality any of the tried generators needs to reach `D* <= ε`, and
//! lists the probabilistic upper bounds `c·d/ε²` for `c = 10` (Aistleitner)
//! and `c = 2.4968` (Gnewuch, Pasing and Weiß) as reference curves.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{run_chain, verify_certificate, ChainParameters, ChainResult};
use crate::discrepancy::{star_discrepancy_exact, ExactOptions};
use crate::error::{Error, Result};
use crate::generators::{generate, GeneratorKind, GeneratorSpec};

pub const AISTLEITNER_CONSTANT: f64 = 10.0;
pub const GPW_CONSTANT: f64 = 2.4968;

/// `c·d/ε²`, evaluated as `c·d/ε/ε` so that decimal inputs such as
/// `ε = 0.1` give round numbers.
pub fn upper_reference(constant: f64, d: usize, epsilon: f64) -> f64 {
    constant * d as f64 / epsilon / epsilon
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub d: usize,
    pub epsilon: f64,
    pub beta: f64,
    pub lower_bound_chain: u64,
    pub upper_ref_aistleitner: f64,
    pub upper_ref_gpw: f64,
    pub best_n_found: Option<usize>,
    pub generator_of_best: Option<String>,
    pub certified: bool,
    /// Some `(generator, n)` cell was skipped because its critical grid
    /// exceeded the cap.
    pub cap_exceeded: bool,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub d: usize,
    pub epsilon: f64,
    pub beta: f64,
    /// Templates; `n` and `dim` are overwritten per cell.
    pub generators: Vec<GeneratorSpec>,
    pub n_grid: Vec<usize>,
    pub exact: ExactOptions,
}

impl BenchConfig {
    pub fn new(d: usize, epsilon: f64, kinds: &[GeneratorKind], n_grid: Vec<usize>) -> Self {
        Self {
            d,
            epsilon,
            beta: crate::adversary::DEFAULT_BETA,
            generators: kinds.iter().map(|&k| GeneratorSpec::new(k, 1, d)).collect(),
            n_grid,
            exact: ExactOptions::default(),
        }
    }
}

enum Cell {
    Value(f64),
    /// `n` is not representable by the generator (grid sizes).
    Skipped,
    CapExceeded,
}

fn evaluate_cell(
    template: &GeneratorSpec,
    d: usize,
    n: usize,
    exact: &ExactOptions,
) -> Result<Cell> {
    let mut spec = template.clone();
    spec.n = n;
    spec.dim = d;
    if spec.kind == GeneratorKind::Grid {
        spec.points_per_axis = None;
    }
    let points = match generate(&spec) {
        Ok(p) => p,
        Err(Error::InvalidSpec(_)) if spec.kind == GeneratorKind::Grid => return Ok(Cell::Skipped),
        Err(e) => return Err(e),
    };
    match star_discrepancy_exact(&points, exact) {
        Ok(r) => Ok(Cell::Value(r.value)),
        Err(Error::GridTooLarge { .. }) => Ok(Cell::CapExceeded),
        Err(e) => Err(e),
    }
}

/// Evaluates every `(generator, n)` cell, keeps the smallest `n` with exact
/// `D* <= ε` (earlier generators win ties) and runs the chain on that set.
///
/// `certified` is set only when the chain returns a certificate that also
/// passes [`verify_certificate`].
pub fn bench_inverse_discrepancy(config: &BenchConfig) -> Result<BenchRow> {
    let params = ChainParameters::new(config.d, config.epsilon, config.beta)?;
    let cells: Vec<(usize, usize)> = (0..config.generators.len())
        .flat_map(|g| config.n_grid.iter().map(move |&n| (g, n)))
        .collect();
    let exact = ExactOptions {
        threads: None,
        ..config.exact
    };
    let run = || {
        cells
            .par_iter()
            .map(|&(g, n)| evaluate_cell(&config.generators[g], config.d, n, &exact))
            .collect::<Result<Vec<Cell>>>()
    };
    let results = match config.exact.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let mut cap_exceeded = false;
    let mut best: Option<(usize, usize)> = None;
    for (&(g, n), cell) in cells.iter().zip(&results) {
        match cell {
            Cell::CapExceeded => cap_exceeded = true,
            Cell::Value(v) if *v <= config.epsilon && best.is_none_or(|(_, bn)| n < bn) => {
                best = Some((g, n));
            }
            _ => {}
        }
    }

    let certified = match best {
        Some((g, n)) => {
            let mut spec = config.generators[g].clone();
            spec.n = n;
            spec.dim = config.d;
            spec.points_per_axis = None;
            let points = generate(&spec)?;
            match run_chain(&points, &params)? {
                ChainResult::Certificate(cert) => verify_certificate(&points, &cert).is_valid(),
                ChainResult::Refuted { .. } => false,
            }
        }
        None => false,
    };

    Ok(BenchRow {
        d: config.d,
        epsilon: config.epsilon,
        beta: config.beta,
        lower_bound_chain: params.guaranteed_chain_length(),
        upper_ref_aistleitner: upper_reference(AISTLEITNER_CONSTANT, config.d, config.epsilon),
        upper_ref_gpw: upper_reference(GPW_CONSTANT, config.d, config.epsilon),
        best_n_found: best.map(|(_, n)| n),
        generator_of_best: best.map(|(g, _)| config.generators[g].kind.name().to_string()),
        certified,
        cap_exceeded,
    })
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[BenchRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}
