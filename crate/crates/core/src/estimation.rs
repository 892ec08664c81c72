// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

//! Finite-shot sampling of syndrome distributions and error metrics.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::channel::{chi_from_kraus, Channel, ProcessMatrix};
use crate::code::StabilizerCode;
use crate::dense::{hermitian_eigenvalues, NumericPolicy};
use crate::error::{QeccdError, Result};
use crate::protocol::{reconstruct, residuals, simulate_plan, MeasurementRecord, Outcomes, Plan, Reconstruction};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingPolicy {
    pub shots_per_configuration: u64,
    pub seed: u64,
}

impl SamplingPolicy {
    pub fn new(shots_per_configuration: u64, seed: u64) -> Result<Self> {
        if shots_per_configuration == 0 {
            return Err(QeccdError::NonPositiveShots);
        }
        Ok(SamplingPolicy {
            shots_per_configuration,
            seed,
        })
    }

    /// Generator for one configuration; streams are independent of the order
    /// in which configurations are sampled.
    fn rng(&self, config: usize) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(config as u64);
        rng
    }
}

/// Multinomial draw from an exact record.
///
/// Probabilities down to `-policy.probability_dust` are clamped to zero. If
/// the probabilities sum to less than one the deficit goes to the
/// `undetected` bin.
pub fn sample_record(
    exact: &MeasurementRecord,
    sampling: &SamplingPolicy,
    policy: &NumericPolicy,
) -> Result<MeasurementRecord> {
    let Outcomes::Exact(probs) = &exact.outcomes else {
        return Err(QeccdError::Validation("only exact records can be sampled".into()));
    };
    if sampling.shots_per_configuration == 0 {
        return Err(QeccdError::NonPositiveShots);
    }
    let mut clamped = Vec::with_capacity(probs.len());
    for (_, p) in probs {
        if *p < -policy.probability_dust || !p.is_finite() {
            return Err(QeccdError::NegativeProbability(*p));
        }
        clamped.push(p.max(0.0));
    }
    let total: f64 = clamped.iter().sum();
    if total > 1.0 + policy.algebraic {
        return Err(QeccdError::Validation(format!("probabilities sum to {total}")));
    }

    let mut rng = sampling.rng(exact.config);
    let mut remaining = sampling.shots_per_configuration;
    // probability mass not yet assigned, including the undetected bin
    let mut mass = 1.0f64.max(total);
    let mut counts = Vec::with_capacity(probs.len());
    for ((syndrome, _), p) in probs.iter().zip(&clamped) {
        let count = if remaining == 0 || *p == 0.0 {
            0
        } else if *p >= mass {
            remaining
        } else {
            Binomial::new(remaining, p / mass)
                .map_err(|e| QeccdError::Validation(e.to_string()))?
                .sample(&mut rng)
        };
        counts.push((*syndrome, count));
        remaining -= count;
        mass -= p;
    }
    Ok(MeasurementRecord {
        config: exact.config,
        outcomes: Outcomes::Sampled {
            counts,
            undetected: remaining,
            shots: sampling.shots_per_configuration,
        },
    })
}

pub fn sample_records(
    exact: &[MeasurementRecord],
    sampling: &SamplingPolicy,
    policy: &NumericPolicy,
) -> Result<Vec<MeasurementRecord>> {
    exact.par_iter().map(|r| sample_record(r, sampling, policy)).collect()
}

/// Distance between an estimated and a reference process matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Frobenius norm of the difference.
    pub frobenius_error: f64,
    /// Largest entrywise modulus of the difference.
    pub max_entry_error: f64,
    /// `|Tr χ_est − Tr χ_ref|`.
    pub trace_defect: f64,
    /// Smallest eigenvalue of the Hermitian part of the estimate.
    pub min_eigenvalue: f64,
}

pub fn compare(estimate: &ProcessMatrix, oracle: &ProcessMatrix) -> Result<ErrorReport> {
    if estimate.d2() != oracle.d2() {
        return Err(QeccdError::DimensionMismatch {
            expected: oracle.d2(),
            actual: estimate.d2(),
        });
    }
    let diff = estimate.entries() - oracle.entries();
    Ok(ErrorReport {
        frobenius_error: diff.norm(),
        max_entry_error: diff.iter().map(|z| z.norm()).fold(0.0, f64::max),
        trace_defect: (estimate.trace() - oracle.trace()).abs(),
        min_eigenvalue: hermitian_eigenvalues(estimate.entries())[0],
    })
}

/// How syndrome statistics are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Sampled(SamplingPolicy),
}

/// Everything produced by one characterization run.
#[derive(Debug, Clone)]
pub struct Characterization {
    pub reconstruction: Reconstruction,
    pub records: Vec<MeasurementRecord>,
    pub residuals: Vec<f64>,
    pub oracle: ProcessMatrix,
    pub error_report: ErrorReport,
}

/// Simulates the plan against a known channel, reconstructs χ and compares
/// it with the channel's own process matrix.
pub fn characterize(
    code: &StabilizerCode,
    beta: &[Complex64],
    channel: &Channel,
    plan: &Plan,
    mode: Mode,
    policy: &NumericPolicy,
) -> Result<Characterization> {
    let exact = simulate_plan(code, beta, channel, plan, policy)?;
    let records = match mode {
        Mode::Exact => exact,
        Mode::Sampled(sampling) => sample_records(&exact, &sampling, policy)?,
    };
    let reconstruction = reconstruct(plan, &records, code.error_basis(), policy)?;
    let residuals = residuals(plan, &records, &reconstruction.chi)?;
    let oracle = chi_from_kraus(channel, code.error_basis())?;
    let error_report = compare(&reconstruction.chi, &oracle)?;
    Ok(Characterization {
        reconstruction,
        records,
        residuals,
        oracle,
        error_report,
    })
}
