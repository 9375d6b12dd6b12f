//! Run configuration: a flat `key = value` text format covering every
//! tunable of the simulator, anonymizer, pitch extractor, and metric
//! commands. Unknown keys are rejected with their line number so typos
//! cannot silently fall back to defaults.

use std::path::Path;

use indexmap::IndexSet;

use crate::anonymizer::CombineMode;
use crate::error::{Error, Result};
use crate::textio::{fmt_f64, numbered_lines, parse_f64, parse_u64, parse_usize};

/// `1 − w`, snapped to 12 decimals so a derived weight prints as the decimal
/// a user would write: the complement of 0.8 is 0.2, not 0.19999999999999996.
pub fn complement_weight(w: f64) -> f64 {
    format!("{:.12}", 1.0 - w).parse().unwrap_or(1.0 - w)
}

/// Every run parameter with its default. Command-line flags override file
/// values; the fully resolved set is logged before a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Simulated speaker count.
    pub n_speakers: usize,
    /// Utterances generated per speaker (≥ 2 so enrollment can exclude the
    /// test utterance).
    pub utts_per_speaker: usize,
    /// Embedding dimension.
    pub dim: usize,
    /// Std of the per-utterance perturbation around each speaker center.
    pub within_speaker_noise: f64,
    /// Master seed for corpus generation and anonymization noise.
    pub seed: u64,
    /// Seed for drawing look-up-table rows.
    pub lut_seed: u64,
    /// How many real speakers are averaged per anonymized identity.
    pub k: usize,
    /// Weight of the pseudo-speaker embedding.
    pub w_pseudo: f64,
    /// Weight of the averaged embedding.
    pub w_avg: f64,
    /// How pseudo and averaged parts are combined.
    pub mode: CombineMode,
    /// Seed keying the per-speaker selection of averaged speakers.
    pub selection_seed: u64,
    /// Pseudo-speaker weights of the experiment sweep; each condition uses
    /// w_avg = 1 − w_pseudo.
    pub conditions: Vec<f64>,
    /// Pitch search floor, Hz.
    pub yin_f_min_hz: f64,
    /// Pitch search ceiling, Hz.
    pub yin_f_max_hz: f64,
    /// Voicing threshold on the normalized difference.
    pub yin_threshold: f64,
    /// Analysis hop, seconds.
    pub hop_s: f64,
    /// Analysis window, samples.
    pub window: usize,
    /// Yingram grid resolution.
    pub bins_per_semitone: usize,
    /// Yingram grid floor, Hz.
    pub yingram_f_min_hz: f64,
    /// Yingram grid ceiling, Hz.
    pub yingram_f_max_hz: f64,
    /// Minimum acceptable mean pitch correlation.
    pub rho_f0_min: f64,
    /// Decimal places for printed metric values.
    pub precision: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_speakers: 40,
            utts_per_speaker: 10,
            dim: 64,
            within_speaker_noise: 0.3,
            seed: 0,
            lut_seed: 0,
            k: 10,
            w_pseudo: 0.6,
            w_avg: 0.4,
            mode: CombineMode::WeightedConcat,
            selection_seed: 0,
            conditions: vec![0.6, 0.8, 0.9, 0.95],
            yin_f_min_hz: 55.0,
            yin_f_max_hz: 760.0,
            yin_threshold: 0.15,
            hop_s: 0.0125,
            window: 1024,
            bins_per_semitone: 1,
            yingram_f_min_hz: 10.77,
            yingram_f_max_hz: 768.40,
            rho_f0_min: 0.3,
            precision: 2,
        }
    }
}

impl RunConfig {
    /// Parse a `key = value` file over the defaults. Blank lines and lines
    /// starting with `#` are skipped. Setting `w_pseudo` without `w_avg`
    /// derives `w_avg = 1 − w_pseudo`.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: IndexSet<String> = IndexSet::new();
        for (no, line) in numbered_lines(text) {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(Error::format(
                    path,
                    no,
                    format!("expected `key = value`, found {trimmed:?}"),
                ));
            };
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::format(path, no, format!("duplicate key {key}")));
            }
            cfg.set(key, value, path, no)?;
        }
        if seen.contains("w_pseudo") && !seen.contains("w_avg") {
            cfg.w_avg = complement_weight(cfg.w_pseudo);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str, path: &str, no: usize) -> Result<()> {
        match key {
            "n_speakers" => self.n_speakers = parse_usize(value, path, no)?,
            "utts_per_speaker" => self.utts_per_speaker = parse_usize(value, path, no)?,
            "dim" => self.dim = parse_usize(value, path, no)?,
            "within_speaker_noise" => self.within_speaker_noise = parse_f64(value, path, no)?,
            "seed" => self.seed = parse_u64(value, path, no)?,
            "lut_seed" => self.lut_seed = parse_u64(value, path, no)?,
            "k" => self.k = parse_usize(value, path, no)?,
            "w_pseudo" => self.w_pseudo = parse_f64(value, path, no)?,
            "w_avg" => self.w_avg = parse_f64(value, path, no)?,
            "mode" => {
                self.mode = value
                    .parse()
                    .map_err(|e: Error| Error::format(path, no, e.to_string()))?
            }
            "selection_seed" => self.selection_seed = parse_u64(value, path, no)?,
            "conditions" => {
                let mut list = Vec::new();
                for part in value.split(',') {
                    list.push(parse_f64(part.trim(), path, no)?);
                }
                self.conditions = list;
            }
            "yin_f_min_hz" => self.yin_f_min_hz = parse_f64(value, path, no)?,
            "yin_f_max_hz" => self.yin_f_max_hz = parse_f64(value, path, no)?,
            "yin_threshold" => self.yin_threshold = parse_f64(value, path, no)?,
            "hop_s" => self.hop_s = parse_f64(value, path, no)?,
            "window" => self.window = parse_usize(value, path, no)?,
            "bins_per_semitone" => self.bins_per_semitone = parse_usize(value, path, no)?,
            "yingram_f_min_hz" => self.yingram_f_min_hz = parse_f64(value, path, no)?,
            "yingram_f_max_hz" => self.yingram_f_max_hz = parse_f64(value, path, no)?,
            "rho_f0_min" => self.rho_f0_min = parse_f64(value, path, no)?,
            "precision" => self.precision = parse_usize(value, path, no)?,
            other => {
                return Err(Error::format(path, no, format!("unknown key {other}")));
            }
        }
        Ok(())
    }

    /// Check cross-field invariants that parsing alone cannot.
    pub fn validate(&self) -> Result<()> {
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
        if self.k == 0 {
            return Err(Error::contract("k must be at least 1"));
        }
        for (name, w) in [("w_pseudo", self.w_pseudo), ("w_avg", self.w_avg)] {
            if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
                return Err(Error::contract(format!("{name} must lie in [0, 1], got {w}")));
            }
        }
        if (self.w_pseudo + self.w_avg - 1.0).abs() > 1e-12 {
            return Err(Error::contract(format!(
                "w_pseudo + w_avg must equal 1, got {}",
                self.w_pseudo + self.w_avg
            )));
        }
        if self.conditions.is_empty() {
            return Err(Error::contract("conditions must list at least one w_pseudo"));
        }
        for w in &self.conditions {
            if !(w.is_finite() && (0.0..=1.0).contains(w)) {
                return Err(Error::contract(format!(
                    "condition w_pseudo must lie in [0, 1], got {w}"
                )));
            }
        }
        for (name, lo, hi) in [
            ("yin", self.yin_f_min_hz, self.yin_f_max_hz),
            ("yingram", self.yingram_f_min_hz, self.yingram_f_max_hz),
        ] {
            if !(lo.is_finite() && lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(Error::contract(format!(
                    "{name} frequency range must satisfy 0 < f_min < f_max, got [{lo}, {hi}]"
                )));
            }
        }
        if !(self.yin_threshold.is_finite() && self.yin_threshold > 0.0) {
            return Err(Error::contract("yin_threshold must be positive"));
        }
        if !(self.hop_s.is_finite() && self.hop_s > 0.0) {
            return Err(Error::contract("hop_s must be a positive duration"));
        }
        if self.window < 4 {
            return Err(Error::contract("window must hold at least 4 samples"));
        }
        if self.bins_per_semitone == 0 {
            return Err(Error::contract("bins_per_semitone must be at least 1"));
        }
        if !((-1.0..=1.0).contains(&self.rho_f0_min)) {
            return Err(Error::contract("rho_f0_min must lie in [-1, 1]"));
        }
        if self.precision > 17 {
            return Err(Error::contract("precision beyond 17 digits is meaningless"));
        }
        Ok(())
    }

    /// Read and parse a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// The fully resolved configuration, one `key = value` line per field,
    /// in a fixed order suitable for logging.
    pub fn resolved_lines(&self) -> Vec<String> {
        let conditions = self
            .conditions
            .iter()
            .map(|w| fmt_f64(*w))
            .collect::<Vec<_>>()
            .join(",");
        vec![
            format!("n_speakers = {}", self.n_speakers),
            format!("utts_per_speaker = {}", self.utts_per_speaker),
            format!("dim = {}", self.dim),
            format!("within_speaker_noise = {}", fmt_f64(self.within_speaker_noise)),
            format!("seed = {}", self.seed),
            format!("lut_seed = {}", self.lut_seed),
            format!("k = {}", self.k),
            format!("w_pseudo = {}", fmt_f64(self.w_pseudo)),
            format!("w_avg = {}", fmt_f64(self.w_avg)),
            format!("mode = {}", self.mode),
            format!("selection_seed = {}", self.selection_seed),
            format!("conditions = {conditions}"),
            format!("yin_f_min_hz = {}", fmt_f64(self.yin_f_min_hz)),
            format!("yin_f_max_hz = {}", fmt_f64(self.yin_f_max_hz)),
            format!("yin_threshold = {}", fmt_f64(self.yin_threshold)),
            format!("hop_s = {}", fmt_f64(self.hop_s)),
            format!("window = {}", self.window),
            format!("bins_per_semitone = {}", self.bins_per_semitone),
            format!("yingram_f_min_hz = {}", fmt_f64(self.yingram_f_min_hz)),
            format!("yingram_f_max_hz = {}", fmt_f64(self.yingram_f_max_hz)),
            format!("rho_f0_min = {}", fmt_f64(self.rho_f0_min)),
            format!("precision = {}", self.precision),
        ]
    }
}
