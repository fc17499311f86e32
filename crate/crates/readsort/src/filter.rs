//! Recursive similarity filter: for each selected reference in rank order,
//! train and freeze an ensemble on that reference alone, score every
//! remaining read, split filtered/unfiltered, and recurse on the unfiltered
//! set. The resulting sort plan concatenates the per-reference groups and the
//! final residual.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fastq::FastqRecord;
use crate::model::{EnsembleConfig, ModelEnsemble, ALPHABET_BITS};

#[derive(Debug, Clone, Copy)]
pub struct FilterThresholds {
    pub t1: f64,
    /// Normalized bits-per-symbol threshold for read scores.
    pub t2: f64,
}

impl Default for FilterThresholds {
    fn default() -> Self {
        FilterThresholds { t1: 50.0, t2: 0.5 }
    }
}

/// The permutation from original read order to sorted order, with the
/// per-reference group structure that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortPlan {
    /// (reference id, original 0-based read indices), in pass order.
    /// Indices within each group ascend.
    pub groups: Vec<(String, Vec<u32>)>,
    /// Reads left unfiltered after the last pass, ascending.
    pub residual: Vec<u32>,
}

impl SortPlan {
    /// Identity plan: no groups, all reads residual.
    pub fn identity(n: usize) -> Self {
        SortPlan {
            groups: Vec::new(),
            residual: (0..n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(|(_, g)| g.len()).sum::<usize>() + self.residual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Concatenation of all group index lists plus the residual:
    /// `permutation()[k]` is the original index of the k-th sorted read.
    pub fn permutation(&self) -> Vec<u32> {
        let mut perm = Vec::with_capacity(self.len());
        for (_, group) in &self.groups {
            perm.extend_from_slice(group);
        }
        perm.extend_from_slice(&self.residual);
        perm
    }

    /// Checks that the plan covers 0..n-1 exactly once.
    pub fn validate(&self, n: usize) -> Result<()> {
        let perm = self.permutation();
        validate_permutation(&perm, n)
    }
}

pub fn validate_permutation(perm: &[u32], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPlan(format!(
            "plan length {} != record count {}",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &i in perm {
        let i = i as usize;
        if i >= n || seen[i] {
            return Err(Error::InvalidPlan(format!(
                "index {i} out of range or repeated"
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Normalized read score R = C(y||x) / (|y| log2 4) under a frozen
/// single-reference ensemble.
pub fn read_score(y: &[u8], ref_model: &ModelEnsemble) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::EmptyRead);
    }
    let bits = ref_model.code_length(y)?;
    Ok(bits / (y.len() as f64 * ALPHABET_BITS))
}

/// Trains a fresh ensemble on one reference sequence and freezes it.
pub fn train_reference_model(
    ref_syms: &[u8],
    config: &EnsembleConfig,
) -> Result<ModelEnsemble> {
    let mut ensemble = ModelEnsemble::new(config);
    ensemble.train(ref_syms)?;
    ensemble.freeze();
    Ok(ensemble)
}

/// One filter pass: scores every read against the reference and splits at
/// R <= t2 (inclusive). Both halves keep ascending original order. Reads with
/// empty sequences are never filtered.
pub fn filter_pass(
    reads: &[(u32, &[u8])],
    ref_syms: &[u8],
    t2: f64,
    config: &EnsembleConfig,
) -> Result<(Vec<u32>, Vec<u32>)> {
    let model = train_reference_model(ref_syms, config)?;
    let scores: Vec<f64> = reads
        .par_iter()
        .map(|(_, syms)| {
            if syms.is_empty() {
                Ok(f64::INFINITY)
            } else {
                read_score(syms, &model)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut filtered = Vec::new();
    let mut unfiltered = Vec::new();
    for ((idx, _), score) in reads.iter().zip(scores) {
        if score <= t2 {
            filtered.push(*idx);
        } else {
            unfiltered.push(*idx);
        }
    }
    Ok((filtered, unfiltered))
}

/// Runs filter passes over the selected references in rank order, recursing
/// on each pass's unfiltered remainder. Terminates when references are
/// exhausted or no unfiltered reads remain.
pub fn recursive_filter(
    read_syms: &[Vec<u8>],
    selected_refs: &[(String, Vec<u8>)],
    t2: f64,
    config: &EnsembleConfig,
) -> Result<SortPlan> {
    let mut remaining: Vec<u32> = (0..read_syms.len() as u32).collect();
    let mut groups = Vec::new();
    for (id, ref_syms) in selected_refs {
        if remaining.is_empty() {
            break;
        }
        let indexed: Vec<(u32, &[u8])> = remaining
            .iter()
            .map(|&i| (i, read_syms[i as usize].as_slice()))
            .collect();
        let (filtered, unfiltered) = filter_pass(&indexed, ref_syms, t2, config)?;
        groups.push((id.clone(), filtered));
        remaining = unfiltered;
    }
    Ok(SortPlan {
        groups,
        residual: remaining,
    })
}

/// Reorders whole records by the plan's permutation: output[k] is the record
/// at original index permutation()[k].
pub fn apply_plan(records: &[FastqRecord], plan: &SortPlan) -> Result<Vec<FastqRecord>> {
    let perm = plan.permutation();
    apply_permutation(records, &perm)
}

pub fn apply_permutation(records: &[FastqRecord], perm: &[u32]) -> Result<Vec<FastqRecord>> {
    validate_permutation(perm, records.len())?;
    Ok(perm
        .iter()
        .map(|&i| records[i as usize].clone())
        .collect())
}
