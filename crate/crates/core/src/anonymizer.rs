//! Speaker look-up table and embedding-level anonymization.
//!
//! A [`SpeakerLut`] holds one randomly initialized embedding per real
//! speaker plus a single reserved pseudo-speaker row. Anonymization maps a
//! source speaker to a weighted combination of the pseudo embedding and the
//! mean of `k` real-speaker embeddings drawn by a selection stream keyed on
//! `(selection_seed, source speaker id)` — so a given speaker always maps to
//! the same pseudo identity, distinct speakers map to distinct identities,
//! and the pseudo row itself is never part of the average.
//!
//! Two combination modes exist: weighted concatenation (doubles the
//! dimension; the default) and weighted sum.

use std::path::Path;

use indexmap::IndexMap;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::derive_rng;
use crate::textio::{atomic_write, fmt_f64_row, numbered_lines, parse_f64, parse_u64, parse_usize};

/// Identifier of the reserved pseudo-speaker row in every table.
pub const PSEUDO_SPEAKER_ID: &str = "__pseudo__";

/// A fixed-dimension embedding with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerEmbedding {
    values: Vec<f64>,
}

impl SpeakerEmbedding {
    /// Wrap a vector, rejecting empty or non-finite input.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::contract("embedding dimension must be positive"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("embedding entries must be finite"));
        }
        Ok(Self { values })
    }

    /// The embedding coordinates.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Ordered speaker-id → embedding table with one reserved pseudo row.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerLut {
    dim: usize,
    init_seed: u64,
    entries: IndexMap<String, SpeakerEmbedding>,
}

fn validate_speaker_id(id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::contract("speaker id must not be empty"));
    }
    if id.chars().any(char::is_whitespace) {
        return Err(Error::contract(format!(
            "speaker id {id:?} must not contain whitespace"
        )));
    }
    Ok(())
}

fn draw_row(init_seed: u64, id: &str, dim: usize) -> SpeakerEmbedding {
    let mut rng = derive_rng(init_seed, &["lut-row", id]);
    let values = (0..dim)
        .map(|_| rand::Rng::sample(&mut rng, StandardNormal))
        .collect();
    SpeakerEmbedding { values }
}

impl SpeakerLut {
    /// Build a table with one standard-normal row per speaker plus the
    /// pseudo row, all derived from `init_seed`. Rebuilding with the same
    /// inputs is bit-identical.
    pub fn build<S: AsRef<str>>(speaker_ids: &[S], dim: usize, init_seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::contract("embedding dimension must be positive"));
        }
        if speaker_ids.is_empty() {
            return Err(Error::contract("speaker list must not be empty"));
        }
        let mut entries = IndexMap::with_capacity(speaker_ids.len() + 1);
        for id in speaker_ids {
            let id = id.as_ref();
            validate_speaker_id(id)?;
            if id == PSEUDO_SPEAKER_ID {
                return Err(Error::contract(format!(
                    "speaker id {PSEUDO_SPEAKER_ID:?} is reserved"
                )));
            }
            if entries
                .insert(id.to_string(), draw_row(init_seed, id, dim))
                .is_some()
            {
                return Err(Error::contract(format!("duplicate speaker id {id:?}")));
            }
        }
        entries.insert(
            PSEUDO_SPEAKER_ID.to_string(),
            draw_row(init_seed, PSEUDO_SPEAKER_ID, dim),
        );
        Ok(Self {
            dim,
            init_seed,
            entries,
        })
    }

    /// Embedding dimension of every row.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Seed the rows were derived from.
    pub fn init_seed(&self) -> u64 {
        self.init_seed
    }

    /// Total number of rows, pseudo included.
    pub fn row_count(&self) -> usize {
        self.entries.len()
    }

    /// Number of real speakers (rows minus the pseudo row).
    pub fn real_count(&self) -> usize {
        self.entries.len() - 1
    }

    /// Real speaker ids in table order.
    pub fn real_ids(&self) -> impl Iterator<Item = &str> {
        self.entries
            .keys()
            .map(String::as_str)
            .filter(|id| *id != PSEUDO_SPEAKER_ID)
    }

    /// Look up any row, including the pseudo row.
    pub fn embedding(&self, id: &str) -> Option<&SpeakerEmbedding> {
        self.entries.get(id)
    }

    /// The reserved pseudo-speaker embedding.
    pub fn pseudo(&self) -> &SpeakerEmbedding {
        &self.entries[PSEUDO_SPEAKER_ID]
    }

    /// Whether `id` names a real speaker in this table.
    pub fn contains_real(&self, id: &str) -> bool {
        id != PSEUDO_SPEAKER_ID && self.entries.contains_key(id)
    }

    /// Serialize to the table text format: a `dim <D> seed <S>` header
    /// followed by one `<id> <v1> .. <vD>` line per row in table order.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {} seed {}\n", self.dim, self.init_seed);
        for (id, emb) in &self.entries {
            out.push_str(id);
            out.push(' ');
            out.push_str(&fmt_f64_row(&emb.values));
            out.push('\n');
        }
        out
    }

    /// Parse the text format produced by [`SpeakerLut::to_text`]. `path` is
    /// used only to label errors.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut lines = numbered_lines(text);
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::format(path, 1, "empty file, expected dim/seed header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (dim, init_seed) = match fields.as_slice() {
            ["dim", d, "seed", s] => (parse_usize(d, path, 1)?, parse_u64(s, path, 1)?),
            _ => {
                return Err(Error::format(
                    path,
                    1,
                    format!("expected header `dim <D> seed <S>`, found {header:?}"),
                ))
            }
        };
        if dim == 0 {
            return Err(Error::format(path, 1, "dimension must be positive"));
        }
        let mut entries = IndexMap::new();
        let mut last_line = 1;
        for (no, line) in lines {
            last_line = no;
            let mut tokens = line.split_whitespace();
            let id = tokens
                .next()
                .ok_or_else(|| Error::format(path, no, "blank line in table body"))?;
            let mut values = Vec::with_capacity(dim);
            for tok in tokens {
                values.push(parse_f64(tok, path, no)?);
            }
            if values.len() != dim {
                return Err(Error::format(
                    path,
                    no,
                    format!("expected {dim} values for {id:?}, found {}", values.len()),
                ));
            }
            if entries
                .insert(id.to_string(), SpeakerEmbedding { values })
                .is_some()
            {
                return Err(Error::format(path, no, format!("duplicate speaker id {id:?}")));
            }
        }
        if !entries.contains_key(PSEUDO_SPEAKER_ID) {
            return Err(Error::format(
                path,
                last_line,
                format!("table has no reserved {PSEUDO_SPEAKER_ID:?} row"),
            ));
        }
        if entries.len() < 2 {
            return Err(Error::format(path, last_line, "table has no real speakers"));
        }
        Ok(Self {
            dim,
            init_seed,
            entries,
        })
    }

    /// Read a table from disk.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Write the table to disk atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        atomic_write(path, &self.to_text())?;
        Ok(())
    }
}

/// How the pseudo embedding and the averaged embedding are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineMode {
    /// `[w_pseudo * pseudo ; w_avg * avg]` — output has twice the table
    /// dimension. The default.
    WeightedConcat,
    /// `w_pseudo * pseudo + w_avg * avg` — output keeps the table dimension.
    WeightedSum,
}

impl CombineMode {
    /// Canonical config-file spelling.
    pub fn as_str(self) -> &'static str {
        match self {
            CombineMode::WeightedConcat => "weighted-concat",
            CombineMode::WeightedSum => "weighted-sum",
        }
    }
}

impl std::str::FromStr for CombineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted-concat" => Ok(CombineMode::WeightedConcat),
            "weighted-sum" => Ok(CombineMode::WeightedSum),
            other => Err(Error::contract(format!(
                "unknown mode {other:?}, expected weighted-concat or weighted-sum"
            ))),
        }
    }
}

impl std::fmt::Display for CombineMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters of one anonymization condition.
#[derive(Debug, Clone)]
pub struct AnonymizationConfig {
    /// Number of real speakers averaged per source speaker.
    pub k: usize,
    /// Weight of the pseudo embedding.
    pub w_pseudo: f64,
    /// Weight of the averaged embedding; must complement `w_pseudo` to 1.
    pub w_avg: f64,
    /// Combination mode.
    pub mode: CombineMode,
    /// Seed of the per-speaker selection streams.
    pub selection_seed: u64,
}

impl Default for AnonymizationConfig {
    fn default() -> Self {
        Self {
            k: 10,
            w_pseudo: 0.6,
            w_avg: 0.4,
            mode: CombineMode::WeightedConcat,
            selection_seed: 0,
        }
    }
}

impl AnonymizationConfig {
    /// Check the condition against a table it will be applied to.
    pub fn validate(&self, lut: &SpeakerLut) -> Result<()> {
        if self.k == 0 {
            return Err(Error::contract("k must be at least 1"));
        }
        if self.k > lut.real_count() {
            return Err(Error::contract(format!(
                "k ({}) exceeds real speaker count ({})",
                self.k,
                lut.real_count()
            )));
        }
        if !self.w_pseudo.is_finite() || !self.w_avg.is_finite() {
            return Err(Error::contract("weights must be finite"));
        }
        if self.w_pseudo < 0.0 || self.w_avg < 0.0 {
            return Err(Error::contract("weights must be non-negative"));
        }
        let sum = self.w_pseudo + self.w_avg;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::contract(format!(
                "w_pseudo + w_avg must equal 1, got {sum}"
            )));
        }
        Ok(())
    }
}

/// The real speakers averaged for `source` under `cfg`, in table order.
///
/// The draw is keyed on `(selection_seed, source)` only, so it is stable for
/// a given speaker across runs and never includes the pseudo row.
pub fn selected_speakers<'a>(
    lut: &'a SpeakerLut,
    source: &str,
    cfg: &AnonymizationConfig,
) -> Result<Vec<&'a str>> {
    cfg.validate(lut)?;
    if !lut.contains_real(source) {
        return Err(Error::contract(format!(
            "unknown source speaker {source:?}"
        )));
    }
    let real: Vec<&str> = lut.real_ids().collect();
    let mut rng = derive_rng(cfg.selection_seed, &["selection", source]);
    let mut picked = rand::seq::index::sample(&mut rng, real.len(), cfg.k).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| real[i]).collect())
}

/// Mean of the embeddings selected by [`selected_speakers`], summed in table
/// order so that `k = real_count` reproduces the global mean exactly.
pub fn averaged_embedding(
    lut: &SpeakerLut,
    source: &str,
    cfg: &AnonymizationConfig,
) -> Result<SpeakerEmbedding> {
    let ids = selected_speakers(lut, source, cfg)?;
    let mut sum = vec![0.0; lut.dim()];
    for id in &ids {
        for (acc, v) in sum.iter_mut().zip(lut.entries[*id].values()) {
            *acc += v;
        }
    }
    let k = cfg.k as f64;
    for v in &mut sum {
        *v /= k;
    }
    Ok(SpeakerEmbedding { values: sum })
}

/// The anonymized identity of `source`: pseudo and averaged embeddings
/// combined according to `cfg.mode`.
pub fn anonymized_embedding(
    lut: &SpeakerLut,
    source: &str,
    cfg: &AnonymizationConfig,
) -> Result<SpeakerEmbedding> {
    let avg = averaged_embedding(lut, source, cfg)?;
    let pseudo = lut.pseudo();
    let values = match cfg.mode {
        CombineMode::WeightedConcat => {
            let mut out = Vec::with_capacity(2 * lut.dim());
            out.extend(pseudo.values().iter().map(|v| cfg.w_pseudo * v));
            out.extend(avg.values().iter().map(|v| cfg.w_avg * v));
            out
        }
        CombineMode::WeightedSum => pseudo
            .values()
            .iter()
            .zip(avg.values())
            .map(|(p, a)| cfg.w_pseudo * p + cfg.w_avg * a)
            .collect(),
    };
    Ok(SpeakerEmbedding { values })
}
