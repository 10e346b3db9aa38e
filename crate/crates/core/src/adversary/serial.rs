//! JSON form of chain certificates.
//!
//! Corners are stored as integer counters only. Loading replays the step
//! indices from the origin to rebuild the in-memory corners without judging
//! them; rejecting a bad chain is the verifier's job.

use serde::{Deserialize, Serialize};

use super::{ChainCertificate, ChainParameters, ChainStep, IndexedCorner};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub d: usize,
    pub epsilon: f64,
    pub beta: f64,
    pub a_max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub captured_point: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub params: ParamsRecord,
    pub steps: Vec<StepRecord>,
    pub k: usize,
    pub terminal_counters: Vec<u64>,
}

impl From<&ChainCertificate> for CertificateRecord {
    fn from(cert: &ChainCertificate) -> Self {
        Self {
            params: ParamsRecord {
                d: cert.params.dim(),
                epsilon: cert.params.epsilon(),
                beta: cert.params.beta(),
                a_max: cert.params.a_max(),
            },
            steps: cert
                .steps
                .iter()
                .map(|s| StepRecord {
                    index: s.incremented_index,
                    captured_point: s.captured_point_index,
                })
                .collect(),
            k: cert.k,
            terminal_counters: cert.terminal_corner.counters.clone(),
        }
    }
}

impl TryFrom<CertificateRecord> for ChainCertificate {
    type Error = Error;

    /// Fails only if the parameters do not validate or disagree with the
    /// recorded `a_max`. Step indices outside `0..d` are kept and leave the
    /// corner unchanged, so the verifier sees the defect.
    fn try_from(record: CertificateRecord) -> Result<Self> {
        let p = &record.params;
        let params = ChainParameters::new(p.d, p.epsilon, p.beta)?;
        if params.a_max() != p.a_max {
            return Err(Error::Precondition(format!(
                "recorded a_max = {} but the parameters give {}",
                p.a_max,
                params.a_max()
            )));
        }
        let mut corner = IndexedCorner::origin(p.d);
        let mut steps = Vec::with_capacity(record.steps.len());
        for s in &record.steps {
            let mut next = corner.clone();
            if let Some(a) = next.counters.get_mut(s.index) {
                *a += 1;
            }
            steps.push(ChainStep {
                corner_before: corner,
                incremented_index: s.index,
                corner_after: next.clone(),
                captured_point_index: s.captured_point,
            });
            corner = next;
        }
        Ok(ChainCertificate {
            params,
            steps,
            k: record.k,
            terminal_corner: IndexedCorner::new(record.terminal_counters),
        })
    }
}

impl ChainCertificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CertificateRecord::from(
            self,
        ))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: CertificateRecord = serde_json::from_str(text)?;
        record.try_into()
    }
}
