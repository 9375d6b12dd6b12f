//! Word error rate from a minimum-edit-distance alignment with unit costs.

use crate::error::{Error, Result};

/// Counts from aligning a hypothesis against a reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WerAlignment {
    /// Reference tokens replaced by different hypothesis tokens.
    pub substitutions: usize,
    /// Reference tokens absent from the hypothesis.
    pub deletions: usize,
    /// Hypothesis tokens with no reference counterpart.
    pub insertions: usize,
    /// Reference length the rate is normalized by.
    pub reference_len: usize,
}

impl WerAlignment {
    /// Total edit operations.
    pub fn edits(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }

    /// (S + D + I) / |reference|.
    pub fn rate(&self) -> f64 {
        self.edits() as f64 / self.reference_len as f64
    }
}

/// Align `hypothesis` against `reference` and count substitutions,
/// deletions, and insertions. Ties in the backtrace prefer a substitution
/// over an insert+delete pair.
pub fn wer<R: AsRef<str>, H: AsRef<str>>(reference: &[R], hypothesis: &[H]) -> Result<WerAlignment> {
    if reference.is_empty() {
        return Err(Error::contract("reference transcript must be non-empty"));
    }
    let r = reference.len();
    let h = hypothesis.len();

    // cost[i][j]: edit distance between reference[..i] and hypothesis[..j].
    let mut cost = vec![vec![0usize; h + 1]; r + 1];
    for (i, row) in cost.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=h {
        cost[0][j] = j;
    }
    for i in 1..=r {
        for j in 1..=h {
            let hit = reference[i - 1].as_ref() == hypothesis[j - 1].as_ref();
            let diag = cost[i - 1][j - 1] + usize::from(!hit);
            let del = cost[i - 1][j] + 1;
            let ins = cost[i][j - 1] + 1;
            cost[i][j] = diag.min(del).min(ins);
        }
    }

    let mut substitutions = 0;
    let mut deletions = 0;
    let mut insertions = 0;
    let (mut i, mut j) = (r, h);
    while i > 0 || j > 0 {
        let here = cost[i][j];
        if i > 0 && j > 0 {
            let hit = reference[i - 1].as_ref() == hypothesis[j - 1].as_ref();
            if cost[i - 1][j - 1] + usize::from(!hit) == here {
                if !hit {
                    substitutions += 1;
                }
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && cost[i - 1][j] + 1 == here {
            deletions += 1;
            i -= 1;
        } else {
            insertions += 1;
            j -= 1;
        }
    }

    Ok(WerAlignment {
        substitutions,
        deletions,
        insertions,
        reference_len: r,
    })
}

/// Pool alignments over a corpus: total edits over total reference length.
pub fn corpus_wer(alignments: &[WerAlignment]) -> Result<f64> {
    if alignments.is_empty() {
        return Err(Error::contract("no alignments to pool"));
    }
    let edits: usize = alignments.iter().map(WerAlignment::edits).sum();
    let len: usize = alignments.iter().map(|a| a.reference_len).sum();
    Ok(edits as f64 / len as f64)
}
