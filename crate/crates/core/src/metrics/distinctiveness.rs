//! Voice distinctiveness: speaker similarity matrices, their diagonal
//! dominance, and the gain of voice distinctiveness in dB.

use crate::anonymizer::SpeakerEmbedding;
use crate::corpus::EmbeddingCorpus;
use crate::error::{Error, Result};

/// Floor applied to diagonal dominance so the dB ratio stays total when a
/// matrix degenerates to a constant.
const DOMINANCE_FLOOR: f64 = 1e-12;

/// Mean pairwise cosine similarity between (and within) speakers.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    speaker_ids: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    /// Wrap a precomputed square matrix.
    pub fn new(speaker_ids: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if speaker_ids.len() < 2 {
            return Err(Error::contract("similarity matrix needs at least 2 speakers"));
        }
        if values.len() != speaker_ids.len()
            || values.iter().any(|row| row.len() != speaker_ids.len())
        {
            return Err(Error::contract(format!(
                "matrix must be square with side {}",
                speaker_ids.len()
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::contract("matrix entries must be finite"));
        }
        Ok(Self {
            speaker_ids,
            values,
        })
    }

    /// Speaker ids indexing the rows/columns.
    pub fn speaker_ids(&self) -> &[String] {
        &self.speaker_ids
    }

    /// The matrix values, row-major.
    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Matrix side length.
    pub fn len(&self) -> usize {
        self.speaker_ids.len()
    }

    /// Always false: construction requires at least 2 speakers.
    pub fn is_empty(&self) -> bool {
        false
    }
}

fn cosine(a: &SpeakerEmbedding, b: &SpeakerEmbedding) -> f64 {
    let dot: f64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum();
    dot / (a.norm() * b.norm())
}

/// Build the speaker similarity matrix of a corpus: entry (i, j) is the
/// mean cosine over utterance pairs of speakers i and j, excluding
/// self-pairs on the diagonal.
pub fn similarity_matrix(corpus: &EmbeddingCorpus) -> Result<SimilarityMatrix> {
    let speakers = corpus.speakers();
    if speakers.len() < 2 {
        return Err(Error::contract(format!(
            "similarity matrix needs at least 2 speakers, corpus has {}",
            speakers.len()
        )));
    }
    for s in &speakers {
        let n = corpus.speaker_records(s).len();
        if n < 2 {
            return Err(Error::contract(format!(
                "speaker {s} has {n} utterance(s); the diagonal needs at least 2"
            )));
        }
    }
    for rec in corpus.records() {
        if rec.embedding.norm() == 0.0 {
            return Err(Error::contract(format!(
                "utterance {} has a zero embedding; cosine is undefined",
                rec.utterance
            )));
        }
    }

    let n = speakers.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        let ui = corpus.speaker_records(speakers[i]);
        // Diagonal: unordered distinct pairs within the speaker.
        let mut sum = 0.0;
        let mut count = 0usize;
        for a in 0..ui.len() {
            for b in (a + 1)..ui.len() {
                sum += cosine(&ui[a].embedding, &ui[b].embedding);
                count += 1;
            }
        }
        values[i][i] = sum / count as f64;
        // Off-diagonal: all cross pairs, mirrored for bitwise symmetry.
        for j in (i + 1)..n {
            let uj = corpus.speaker_records(speakers[j]);
            let mut sum = 0.0;
            for a in &ui {
                for b in &uj {
                    sum += cosine(&a.embedding, &b.embedding);
                }
            }
            let mean = sum / (ui.len() * uj.len()) as f64;
            values[i][j] = mean;
            values[j][i] = mean;
        }
    }
    SimilarityMatrix::new(speakers.into_iter().map(str::to_string).collect(), values)
}

/// Diagonal dominance: |mean(diagonal) − mean(off-diagonal)|.
pub fn diagonal_dominance(m: &SimilarityMatrix) -> f64 {
    let n = m.len();
    let diag: f64 = (0..n).map(|i| m.values[i][i]).sum::<f64>() / n as f64;
    let off_sum: f64 = m
        .values
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v)
                .sum::<f64>()
        })
        .sum();
    let off = off_sum / (n * (n - 1)) as f64;
    (diag - off).abs()
}

/// Gain of voice distinctiveness in dB with its degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GvdResult {
    /// 10·log10 of the dominance ratio anonymized/original.
    pub db: f64,
    /// True when either dominance hit the floor, i.e. a matrix had no
    /// diagonal structure left and the ratio saturated.
    pub degenerate: bool,
}

/// 10·log10(D_diag(anonymized) / D_diag(original)), with both dominances
/// floored at 1e-12. 0 dB means distinctiveness is fully preserved.
pub fn gain_of_voice_distinctiveness(
    original: &SimilarityMatrix,
    anonymized: &SimilarityMatrix,
) -> Result<GvdResult> {
    if original.speaker_ids != anonymized.speaker_ids {
        return Err(Error::contract(
            "matrices must cover the same speakers in the same order",
        ));
    }
    let d_orig = diagonal_dominance(original);
    let d_anon = diagonal_dominance(anonymized);
    let degenerate = d_orig < DOMINANCE_FLOOR || d_anon < DOMINANCE_FLOOR;
    // A difference of logs keeps swapping the arguments an exact negation.
    let db = 10.0
        * (d_anon.max(DOMINANCE_FLOOR).log10() - d_orig.max(DOMINANCE_FLOOR).log10());
    Ok(GvdResult { db, degenerate })
}
