//! Synthetic end-to-end harness: seeded speaker/utterance embeddings,
//! cosine trial scoring, and the anonymization sweep report.
//!
//! The attack simulated is the lazy-informed shape: the attacker enrolls on
//! anonymized speech, so enrollment and test sides of the anonymized view
//! are both anonymized. Utterance-level noise is re-applied on top of each
//! anonymized identity so the anonymized error rate is neither 0 nor
//! trivially 0.5.

use indexmap::IndexMap;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::anonymizer::{anonymized_embedding, AnonymizationConfig, SpeakerEmbedding, SpeakerLut};
use crate::corpus::{CorpusRecord, EmbeddingCorpus};
use crate::error::{Error, Result};
use crate::metrics::{
    eer, gain_of_voice_distinctiveness, similarity_matrix, ScoreSet, TrialRecord,
};
use crate::rng::derive_rng;
use crate::textio::fmt_f64;

/// Shape and seed of a synthetic corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Speaker count.
    pub n_speakers: usize,
    /// Utterances per speaker; at least 2 so enrollment can exclude the
    /// test utterance.
    pub utts_per_speaker: usize,
    /// Embedding dimension.
    pub dim: usize,
    /// RMS norm of the whole per-utterance perturbation around a speaker
    /// center; components are i.i.d. normal with std `noise / sqrt(dim)`.
    pub within_speaker_noise: f64,
    /// Seed for all generation in this simulation.
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_speakers: 40,
            utts_per_speaker: 10,
            dim: 64,
            within_speaker_noise: 0.3,
            seed: 0,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.n_speakers == 0 {
            return Err(Error::contract("n_speakers must be positive"));
        }
        if self.utts_per_speaker < 2 {
            return Err(Error::contract("utts_per_speaker must be at least 2"));
        }
        if self.dim == 0 {
            return Err(Error::contract("dim must be positive"));
        }
        if !(self.within_speaker_noise.is_finite() && self.within_speaker_noise >= 0.0) {
            return Err(Error::contract("within_speaker_noise must be non-negative"));
        }
        Ok(())
    }
}

/// Per-component std that gives the whole perturbation vector an RMS norm
/// of `noise` regardless of dimension, keeping the noise scale comparable
/// to the unit-norm centers it perturbs.
fn component_noise_std(noise: f64, dim: usize) -> f64 {
    noise / (dim as f64).sqrt()
}

fn normalized(mut values: Vec<f64>) -> Result<Vec<f64>> {
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::contract("cannot normalize a zero vector"));
    }
    for v in &mut values {
        *v /= norm;
    }
    Ok(values)
}

fn speaker_id(i: usize) -> String {
    format!("s{:04}", i + 1)
}

/// Generate the original view: speaker centers drawn i.i.d. on the unit
/// sphere, utterances as re-normalized noisy copies of their center.
pub fn generate_corpus(cfg: &SimConfig) -> Result<EmbeddingCorpus> {
    cfg.validate()?;
    let mut rng = derive_rng(cfg.seed, &["corpus"]);
    let std = component_noise_std(cfg.within_speaker_noise, cfg.dim);
    let mut records = Vec::with_capacity(cfg.n_speakers * cfg.utts_per_speaker);
    for i in 0..cfg.n_speakers {
        let speaker = speaker_id(i);
        let raw: Vec<f64> = (0..cfg.dim).map(|_| rng.sample(StandardNormal)).collect();
        let center = normalized(raw)?;
        for j in 0..cfg.utts_per_speaker {
            // Noise is always drawn so corpora differing only in the noise
            // level share their centers and draws.
            let noisy: Vec<f64> = center
                .iter()
                .map(|c| {
                    let g: f64 = rng.sample(StandardNormal);
                    c + std * g
                })
                .collect();
            records.push(CorpusRecord {
                speaker: speaker.clone(),
                utterance: format!("{speaker}u{:03}", j + 1),
                embedding: SpeakerEmbedding::new(normalized(noisy)?)?,
            });
        }
    }
    EmbeddingCorpus::new(cfg.dim, records)
}

/// Map a corpus to its anonymized view: every utterance of a speaker is
/// re-centered on that speaker's single anonymized identity, with fresh
/// seeded per-utterance noise of the same std re-applied.
pub fn anonymize_corpus(
    corpus: &EmbeddingCorpus,
    lut: &SpeakerLut,
    sim: &SimConfig,
    cfg: &AnonymizationConfig,
) -> Result<EmbeddingCorpus> {
    sim.validate()?;
    let mut identities: IndexMap<String, SpeakerEmbedding> = IndexMap::new();
    for speaker in corpus.speakers() {
        let identity = anonymized_embedding(lut, speaker, cfg)?;
        identities.insert(speaker.to_string(), identity);
    }
    let out_dim = identities
        .values()
        .next()
        .map(SpeakerEmbedding::dim)
        .unwrap_or(corpus.dim());
    let selection = cfg.selection_seed.to_string();
    // The identity space may be wider (concat mode doubles the dimension);
    // scale so the perturbation norm matches the original view's.
    let std = component_noise_std(sim.within_speaker_noise, out_dim);
    let mut records = Vec::with_capacity(corpus.len());
    for rec in corpus.records() {
        let identity = &identities[rec.speaker.as_str()];
        let mut rng = derive_rng(
            sim.seed,
            &["anon-noise", &selection, &rec.speaker, &rec.utterance],
        );
        let noisy: Vec<f64> = identity
            .values()
            .iter()
            .map(|v| {
                let g: f64 = rng.sample(StandardNormal);
                v + std * g
            })
            .collect();
        records.push(CorpusRecord {
            speaker: rec.speaker.clone(),
            utterance: rec.utterance.clone(),
            embedding: SpeakerEmbedding::new(normalized(noisy)?)?,
        });
    }
    EmbeddingCorpus::new(out_dim, records)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Score trials against a corpus view. The enrollment model is the mean of
/// the enrollment speaker's utterance vectors, excluding the test utterance
/// when it belongs to that speaker; the score is its cosine against the
/// test vector.
pub fn score_trials(corpus: &EmbeddingCorpus, trials: &[TrialRecord]) -> Result<ScoreSet> {
    let mut genuine = Vec::new();
    let mut impostor = Vec::new();
    for trial in trials {
        let Some(test) = corpus.utterance(&trial.utterance) else {
            return Err(Error::contract(format!(
                "unknown test utterance {}",
                trial.utterance
            )));
        };
        let enrolled = corpus.speaker_records(&trial.enroll);
        if enrolled.is_empty() {
            return Err(Error::contract(format!(
                "unknown enrollment speaker {}",
                trial.enroll
            )));
        }
        let mut model = vec![0.0; corpus.dim()];
        let mut count = 0usize;
        for rec in enrolled {
            if rec.utterance == trial.utterance {
                continue;
            }
            for (m, v) in model.iter_mut().zip(rec.embedding.values()) {
                *m += v;
            }
            count += 1;
        }
        if count == 0 {
            return Err(Error::contract(format!(
                "speaker {} has no enrollment utterances besides the test utterance {}",
                trial.enroll, trial.utterance
            )));
        }
        for m in &mut model {
            *m /= count as f64;
        }
        let score = cosine(&model, test.embedding.values());
        if !score.is_finite() {
            return Err(Error::contract(format!(
                "degenerate score for trial {} {}",
                trial.enroll, trial.utterance
            )));
        }
        if trial.target {
            genuine.push(score);
        } else {
            impostor.push(score);
        }
    }
    ScoreSet::new(genuine, impostor)
}

/// The exhaustive trial list of a corpus: every speaker against every
/// utterance, labeled target when the utterance belongs to the speaker.
pub fn full_trial_list(corpus: &EmbeddingCorpus) -> Vec<TrialRecord> {
    let mut trials = Vec::new();
    for speaker in corpus.speakers() {
        for rec in corpus.records() {
            trials.push(TrialRecord {
                enroll: speaker.to_string(),
                utterance: rec.utterance.clone(),
                target: rec.speaker == speaker,
            });
        }
    }
    trials
}

/// One condition of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    /// 1-based condition index.
    pub condition: usize,
    /// Pseudo-speaker weight of this condition.
    pub w_pseudo: f64,
    /// Averaged-embedding weight of this condition.
    pub w_avg: f64,
    /// Equal error rate of the original view, as a fraction.
    pub eer_orig: f64,
    /// Equal error rate of the anonymized view, as a fraction.
    pub eer_anon: f64,
    /// Gain of voice distinctiveness, dB.
    pub gvd_db: f64,
}

/// Results of a full sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    /// One row per condition, in input order.
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    /// Render the report table. Error rates are printed in percent with
    /// `precision` decimals.
    pub fn to_text(&self, precision: usize) -> String {
        let mut out = String::from(
            "# attack model: lazy-informed (enrollment and test sides both anonymized)\n",
        );
        out.push_str("condition w_pseudo w_avg eer_orig eer_anon gvd_db\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{} {} {} {:.p$} {:.p$} {:.p$}\n",
                row.condition,
                fmt_f64(row.w_pseudo),
                fmt_f64(row.w_avg),
                100.0 * row.eer_orig,
                100.0 * row.eer_anon,
                row.gvd_db,
                p = precision
            ));
        }
        out
    }
}

/// Run the sweep: one shared original view, then per condition the
/// anonymized view's equal error rate and distinctiveness gain.
pub fn run_experiment(
    sim: &SimConfig,
    lut_seed: u64,
    conditions: &[AnonymizationConfig],
) -> Result<ExperimentReport> {
    if conditions.is_empty() {
        return Err(Error::contract("need at least one condition"));
    }
    let corpus = generate_corpus(sim)?;
    let speakers: Vec<String> = corpus.speakers().iter().map(|s| s.to_string()).collect();
    let lut = SpeakerLut::build(&speakers, sim.dim, lut_seed)?;
    let trials = full_trial_list(&corpus);
    let eer_orig = eer(&score_trials(&corpus, &trials)?).eer;
    let m_orig = similarity_matrix(&corpus)?;

    let mut rows = Vec::with_capacity(conditions.len());
    for (i, cfg) in conditions.iter().enumerate() {
        let anon = anonymize_corpus(&corpus, &lut, sim, cfg)?;
        let eer_anon = eer(&score_trials(&anon, &trials)?).eer;
        let m_anon = similarity_matrix(&anon)?;
        let gvd = gain_of_voice_distinctiveness(&m_orig, &m_anon)?;
        rows.push(ExperimentRow {
            condition: i + 1,
            w_pseudo: cfg.w_pseudo,
            w_avg: cfg.w_avg,
            eer_orig,
            eer_anon,
            gvd_db: gvd.db,
        });
    }
    Ok(ExperimentReport { rows })
}
