//! Command-line front end over the `voxveil` library.
//!
//! Every subcommand is a thin adapter: it parses the documented text
//! formats, calls the corresponding library function, and prints or writes
//! the result. Effective parameters come from built-in defaults, overridden
//! by a `--config` file, overridden by explicit flags; the fully resolved
//! configuration is logged to stderr on every run so stdout stays
//! machine-readable.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use voxveil::anonymizer::{anonymized_embedding, AnonymizationConfig, CombineMode, SpeakerLut};
use voxveil::config::{complement_weight, RunConfig};
use voxveil::corpus::{EmbeddingCorpus, EmbeddingTable};
use voxveil::metrics::{
    corpus_wer, eer, gain_of_voice_distinctiveness, operating_points, parse_scores,
    parse_subset_results, parse_transcripts, parse_trials, pitch_correlation, score_set,
    similarity_matrix, weighted_average, wer, PitchCorrelationResult,
};
use voxveil::pitch::{parse_wav, yin_f0, yingram, AudioBuffer, PitchTrack, YinConfig, YingramConfig};
use voxveil::simulator::{run_experiment, SimConfig};
use voxveil::textio::{atomic_write, fmt_f64};
use voxveil::Error;

/// Speaker anonymization over embedding tables, plus the pitch,
/// verification, intelligibility, and distinctiveness metrics used to
/// evaluate it. All randomness flows from explicit seeds.
#[derive(Debug, Parser)]
#[command(name = "voxveil", version, propagate_version = true)]
struct Cli {
    /// Configuration file of `key = value` lines; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Simulation seed; overrides the `seed` configuration key.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file. Required by subcommands that produce a file; metric and
    /// simulate subcommands additionally copy their stdout here when given.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Decimal places of printed metric values (truncated, not rounded).
    #[arg(long, global = true)]
    precision: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Speaker look-up table operations.
    #[command(subcommand)]
    Lut(LutCommand),
    /// Anonymize speakers of a look-up table into an embedding table.
    Anonymize(AnonymizeArgs),
    /// Pitch analysis of WAV audio.
    #[command(subcommand)]
    Pitch(PitchCommand),
    /// Extract a Yingram matrix from WAV audio.
    Yingram(YingramArgs),
    /// Evaluation metrics over score, trial, transcript, track, and corpus
    /// files.
    #[command(subcommand)]
    Metric(MetricCommand),
    /// Generate a synthetic corpus and sweep anonymization conditions.
    Simulate,
}

#[derive(Debug, Subcommand)]
enum LutCommand {
    /// Initialize a table with seeded random rows for the listed speakers.
    Build(LutBuildArgs),
}

#[derive(Debug, Args)]
struct LutBuildArgs {
    /// File of whitespace-separated speaker ids.
    #[arg(long, value_name = "FILE")]
    speakers: PathBuf,

    /// Embedding dimension; overrides the `dim` configuration key.
    #[arg(long)]
    dim: Option<usize>,

    /// Row seed; overrides the `lut_seed` configuration key.
    #[arg(long)]
    lut_seed: Option<u64>,
}

#[derive(Debug, Args)]
struct AnonymizeArgs {
    /// Look-up table file.
    #[arg(long, value_name = "FILE")]
    lut: PathBuf,

    /// File of whitespace-separated speaker ids to anonymize; defaults to
    /// every real speaker in the table.
    #[arg(long, value_name = "FILE")]
    speakers: Option<PathBuf>,

    /// Speakers averaged per source; overrides the `k` configuration key.
    #[arg(long)]
    k: Option<usize>,

    /// Pseudo-embedding weight; unless --w-avg is also given, the averaged
    /// weight becomes 1 - w_pseudo.
    #[arg(long)]
    w_pseudo: Option<f64>,

    /// Averaged-embedding weight.
    #[arg(long)]
    w_avg: Option<f64>,

    /// Combination mode: weighted-concat or weighted-sum.
    #[arg(long)]
    mode: Option<CombineMode>,

    /// Seed of the per-speaker selection streams; overrides the
    /// `selection_seed` configuration key.
    #[arg(long)]
    selection_seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum PitchCommand {
    /// Track F0 over time with the YIN estimator.
    Extract(PitchExtractArgs),
}

#[derive(Debug, Args)]
struct PitchExtractArgs {
    /// Mono 16-bit PCM WAV file.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,

    /// Lowest F0 searched, Hz; overrides `yin_f_min_hz`.
    #[arg(long)]
    f_min_hz: Option<f64>,

    /// Highest F0 searched, Hz; overrides `yin_f_max_hz`.
    #[arg(long)]
    f_max_hz: Option<f64>,

    /// Voicing threshold on the normalized difference; overrides
    /// `yin_threshold`.
    #[arg(long)]
    threshold: Option<f64>,

    /// Hop between frame starts, seconds; overrides `hop_s`.
    #[arg(long)]
    hop_s: Option<f64>,

    /// Analysis window, samples; overrides `window`.
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Debug, Args)]
struct YingramArgs {
    /// Mono 16-bit PCM WAV file.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,

    /// Semitone resolution of the bin grid; overrides `bins_per_semitone`.
    #[arg(long)]
    bins_per_semitone: Option<usize>,

    /// Grid floor, Hz; overrides `yingram_f_min_hz`.
    #[arg(long)]
    f_min_hz: Option<f64>,

    /// Grid ceiling, Hz; overrides `yingram_f_max_hz`.
    #[arg(long)]
    f_max_hz: Option<f64>,

    /// Analysis window, samples; overrides `window`.
    #[arg(long)]
    window: Option<usize>,

    /// Hop between frame starts, seconds; overrides `hop_s`.
    #[arg(long)]
    hop_s: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum MetricCommand {
    /// Equal error rate of verification scores against labeled trials,
    /// printed as a percentage.
    Eer(EerArgs),
    /// Word error rate of hypothesis transcripts against references,
    /// printed as a percentage.
    Wer(WerArgs),
    /// Per-utterance and mean Pearson pitch correlation between paired
    /// track directories.
    RhoF0(RhoF0Args),
    /// Gain of voice distinctiveness between two embedding corpora, in dB.
    Gvd(GvdArgs),
    /// Weighted average of per-subset results.
    WeightedAvg(WeightedAvgArgs),
}

#[derive(Debug, Args)]
struct EerArgs {
    /// Score file: `<enroll> <utterance> <score>` lines.
    #[arg(long, value_name = "FILE")]
    scores: PathBuf,

    /// Trial file: `<enroll> <utterance> target|nontarget` lines.
    #[arg(long, value_name = "FILE")]
    trials: PathBuf,

    /// Also write every operating point as `<threshold> <far> <frr>` lines.
    #[arg(long, value_name = "FILE")]
    points: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WerArgs {
    /// Reference transcripts: `<utt_id> <token>...` lines.
    #[arg(long, value_name = "FILE")]
    reference: PathBuf,

    /// Hypothesis transcripts in the same format, paired by utterance id.
    #[arg(long, value_name = "FILE")]
    hypothesis: PathBuf,
}

#[derive(Debug, Args)]
struct RhoF0Args {
    /// Directory of original pitch-track files.
    #[arg(long, value_name = "DIR")]
    original: PathBuf,

    /// Directory of anonymized pitch-track files with matching names.
    #[arg(long, value_name = "DIR")]
    anonymized: PathBuf,
}

#[derive(Debug, Args)]
struct GvdArgs {
    /// Original embedding corpus.
    #[arg(long, value_name = "FILE")]
    original: PathBuf,

    /// Anonymized embedding corpus over the same speakers.
    #[arg(long, value_name = "FILE")]
    anonymized: PathBuf,
}

#[derive(Debug, Args)]
struct WeightedAvgArgs {
    /// Subset results: `<dataset> <gender> <weight> <value>` lines.
    #[arg(long, value_name = "FILE")]
    results: PathBuf,
}

/// Failures of a run, split by who is at fault for the exit code.
#[derive(Debug)]
enum CliError {
    /// The invocation itself was wrong (e.g. a missing --output).
    Usage(String),
    /// The library rejected an input or could not complete the operation.
    Lib(Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            // Usage mistakes share clap's exit code; contract violations get
            // their own so scripts can tell bad files from bad parameters.
            CliError::Usage(_) => 2,
            CliError::Lib(Error::Contract(_)) => 3,
            CliError::Lib(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Lib(err) => write!(f, "{err}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Lib(err)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Lib(Error::Io(err))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::parse(&load_text(path)?, &label(path))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(precision) = cli.precision {
        cfg.precision = precision;
    }
    apply_overrides(&mut cfg, &cli.command);
    cfg.validate()?;
    for line in cfg.resolved_lines() {
        eprintln!("config: {line}");
    }
    match &cli.command {
        Command::Lut(LutCommand::Build(args)) => lut_build(cli, &cfg, args),
        Command::Anonymize(args) => anonymize(cli, &cfg, args),
        Command::Pitch(PitchCommand::Extract(args)) => pitch_extract(cli, &cfg, args),
        Command::Yingram(args) => yingram_extract(cli, &cfg, args),
        Command::Metric(MetricCommand::Eer(args)) => metric_eer(cli, &cfg, args),
        Command::Metric(MetricCommand::Wer(args)) => metric_wer(cli, &cfg, args),
        Command::Metric(MetricCommand::RhoF0(args)) => metric_rho_f0(cli, &cfg, args),
        Command::Metric(MetricCommand::Gvd(args)) => metric_gvd(cli, &cfg, args),
        Command::Metric(MetricCommand::WeightedAvg(args)) => metric_weighted_avg(cli, &cfg, args),
        Command::Simulate => simulate(cli, &cfg),
    }
}

/// Fold subcommand flags into the configuration so the logged values are the
/// effective ones.
fn apply_overrides(cfg: &mut RunConfig, command: &Command) {
    match command {
        Command::Lut(LutCommand::Build(a)) => {
            if let Some(dim) = a.dim {
                cfg.dim = dim;
            }
            if let Some(seed) = a.lut_seed {
                cfg.lut_seed = seed;
            }
        }
        Command::Anonymize(a) => {
            if let Some(k) = a.k {
                cfg.k = k;
            }
            if let Some(w) = a.w_pseudo {
                cfg.w_pseudo = w;
                if a.w_avg.is_none() {
                    cfg.w_avg = complement_weight(w);
                }
            }
            if let Some(w) = a.w_avg {
                cfg.w_avg = w;
            }
            if let Some(mode) = a.mode {
                cfg.mode = mode;
            }
            if let Some(seed) = a.selection_seed {
                cfg.selection_seed = seed;
            }
        }
        Command::Pitch(PitchCommand::Extract(a)) => {
            if let Some(v) = a.f_min_hz {
                cfg.yin_f_min_hz = v;
            }
            if let Some(v) = a.f_max_hz {
                cfg.yin_f_max_hz = v;
            }
            if let Some(v) = a.threshold {
                cfg.yin_threshold = v;
            }
            if let Some(v) = a.hop_s {
                cfg.hop_s = v;
            }
            if let Some(v) = a.window {
                cfg.window = v;
            }
        }
        Command::Yingram(a) => {
            if let Some(v) = a.bins_per_semitone {
                cfg.bins_per_semitone = v;
            }
            if let Some(v) = a.f_min_hz {
                cfg.yingram_f_min_hz = v;
            }
            if let Some(v) = a.f_max_hz {
                cfg.yingram_f_max_hz = v;
            }
            if let Some(v) = a.window {
                cfg.window = v;
            }
            if let Some(v) = a.hop_s {
                cfg.hop_s = v;
            }
        }
        Command::Metric(_) | Command::Simulate => {}
    }
}

fn require_output<'a>(cli: &'a Cli, what: &str) -> Result<&'a Path, CliError> {
    cli.output
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("--output is required to write the {what}")))
}

/// Print to stdout and, when --output was given, write the same text there.
fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    print!("{text}");
    if let Some(path) = &cli.output {
        atomic_write(path, text)?;
    }
    Ok(())
}

/// `value` with `precision` decimals, truncated toward zero. Rendering with
/// six guard digits first keeps binary representation error from pulling an
/// exact decimal across the truncation boundary.
fn fmt_trunc(value: f64, precision: usize) -> String {
    let rendered = format!("{value:.guard$}", guard = precision + 6);
    let (head, tail) = rendered.split_once('.').expect("fixed-point rendering");
    let mut out = if precision == 0 {
        head.to_string()
    } else {
        format!("{head}.{}", &tail[..precision])
    };
    if out.starts_with('-') && out[1..].chars().all(|c| c == '0' || c == '.') {
        out.remove(0);
    }
    out
}

/// Prefix I/O failures with the offending path, which `std::fs` omits.
fn with_path(path: &Path, err: std::io::Error) -> CliError {
    CliError::Lib(Error::Io(std::io::Error::new(
        err.kind(),
        format!("{}: {err}", path.display()),
    )))
}

fn load_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| with_path(path, e))
}

fn load_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| with_path(path, e))
}

fn label(path: &Path) -> String {
    path.display().to_string()
}

fn read_id_list(path: &Path) -> Result<Vec<String>, CliError> {
    let text = load_text(path)?;
    Ok(text.split_whitespace().map(str::to_string).collect())
}

fn warn_clipped(path: &Path, audio: &AudioBuffer) {
    if audio.clipped() > 0 {
        eprintln!(
            "warning: {}: {} sample(s) clipped to [-1, 1]",
            path.display(),
            audio.clipped()
        );
    }
}

fn anonymization_config(cfg: &RunConfig) -> AnonymizationConfig {
    AnonymizationConfig {
        k: cfg.k,
        w_pseudo: cfg.w_pseudo,
        w_avg: cfg.w_avg,
        mode: cfg.mode,
        selection_seed: cfg.selection_seed,
    }
}

fn lut_build(cli: &Cli, cfg: &RunConfig, args: &LutBuildArgs) -> Result<(), CliError> {
    let out = require_output(cli, "look-up table")?;
    let ids = read_id_list(&args.speakers)?;
    let lut = SpeakerLut::build(&ids, cfg.dim, cfg.lut_seed)?;
    lut.save(out)?;
    Ok(())
}

fn anonymize(cli: &Cli, cfg: &RunConfig, args: &AnonymizeArgs) -> Result<(), CliError> {
    let out = require_output(cli, "embedding table")?;
    let lut = SpeakerLut::parse(&load_text(&args.lut)?, &label(&args.lut))?;
    let ids: Vec<String> = match &args.speakers {
        Some(path) => read_id_list(path)?,
        None => lut.real_ids().map(str::to_string).collect(),
    };
    let acfg = anonymization_config(cfg);
    let dim = match acfg.mode {
        CombineMode::WeightedConcat => 2 * lut.dim(),
        CombineMode::WeightedSum => lut.dim(),
    };
    let mut rows = Vec::with_capacity(ids.len());
    for id in ids {
        let embedding = anonymized_embedding(&lut, &id, &acfg)?;
        rows.push((id, embedding));
    }
    let table = EmbeddingTable::new(dim, rows)?;
    table.save(out)?;
    Ok(())
}

fn yin_config(cfg: &RunConfig) -> YinConfig {
    YinConfig {
        f_min_hz: cfg.yin_f_min_hz,
        f_max_hz: cfg.yin_f_max_hz,
        threshold: cfg.yin_threshold,
        hop_s: cfg.hop_s,
        window: cfg.window,
    }
}

fn pitch_extract(cli: &Cli, cfg: &RunConfig, args: &PitchExtractArgs) -> Result<(), CliError> {
    let out = require_output(cli, "pitch track")?;
    let audio = parse_wav(&load_bytes(&args.input)?, &label(&args.input))?;
    warn_clipped(&args.input, &audio);
    let track = yin_f0(&audio, &yin_config(cfg))?;
    track.save(out)?;
    Ok(())
}

fn yingram_config(cfg: &RunConfig) -> YingramConfig {
    YingramConfig {
        bins_per_semitone: cfg.bins_per_semitone,
        f_min_hz: cfg.yingram_f_min_hz,
        f_max_hz: cfg.yingram_f_max_hz,
        window: cfg.window,
        hop_s: cfg.hop_s,
    }
}

fn yingram_extract(cli: &Cli, cfg: &RunConfig, args: &YingramArgs) -> Result<(), CliError> {
    let out = require_output(cli, "Yingram matrix")?;
    let audio = parse_wav(&load_bytes(&args.input)?, &label(&args.input))?;
    warn_clipped(&args.input, &audio);
    let gram = yingram(&audio, &yingram_config(cfg))?;
    gram.save(out)?;
    Ok(())
}

fn metric_eer(cli: &Cli, cfg: &RunConfig, args: &EerArgs) -> Result<(), CliError> {
    let scores = parse_scores(&load_text(&args.scores)?, &label(&args.scores))?;
    let trials = parse_trials(&load_text(&args.trials)?, &label(&args.trials))?;
    let set = score_set(&scores, &trials)?;
    if let Some(path) = &args.points {
        let mut text = String::new();
        for p in operating_points(&set) {
            let _ = writeln!(
                text,
                "{} {} {}",
                fmt_f64(p.threshold),
                fmt_f64(p.far),
                fmt_f64(p.frr)
            );
        }
        atomic_write(path, &text)?;
    }
    let result = eer(&set);
    if result.degenerate {
        eprintln!("warning: all scores are identical; the EER is 0.5 by convention");
    }
    emit(cli, &format!("{}\n", fmt_trunc(result.eer * 100.0, cfg.precision)))
}

fn metric_wer(cli: &Cli, cfg: &RunConfig, args: &WerArgs) -> Result<(), CliError> {
    let references = parse_transcripts(&load_text(&args.reference)?, &label(&args.reference))?;
    let hypotheses = parse_transcripts(&load_text(&args.hypothesis)?, &label(&args.hypothesis))?;
    let by_utt: HashMap<&str, &[String]> = hypotheses
        .iter()
        .map(|t| (t.utt_id.as_str(), t.tokens.as_slice()))
        .collect();
    let referenced: HashSet<&str> = references.iter().map(|t| t.utt_id.as_str()).collect();
    for hyp in &hypotheses {
        if !referenced.contains(hyp.utt_id.as_str()) {
            eprintln!(
                "warning: hypothesis {} has no reference transcript; ignored",
                hyp.utt_id
            );
        }
    }
    let mut alignments = Vec::with_capacity(references.len());
    for reference in &references {
        let hyp = by_utt.get(reference.utt_id.as_str()).ok_or_else(|| {
            Error::contract(format!("no hypothesis for utterance {}", reference.utt_id))
        })?;
        alignments.push(wer(&reference.tokens, hyp)?);
    }
    let rate = corpus_wer(&alignments)?;
    emit(cli, &format!("{}\n", fmt_trunc(rate * 100.0, cfg.precision)))
}

/// Regular files of a directory as (file name, path), sorted by name.
fn track_files(dir: &Path) -> Result<Vec<(String, PathBuf)>, CliError> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| with_path(dir, e))? {
        let entry = entry.map_err(|e| with_path(dir, e))?;
        let path = entry.path();
        if path.is_file() {
            files.push((entry.file_name().to_string_lossy().into_owned(), path));
        }
    }
    files.sort();
    Ok(files)
}

fn metric_rho_f0(cli: &Cli, cfg: &RunConfig, args: &RhoF0Args) -> Result<(), CliError> {
    let originals = track_files(&args.original)?;
    let anonymized = track_files(&args.anonymized)?;
    let by_name: HashMap<&str, &PathBuf> = anonymized
        .iter()
        .map(|(name, path)| (name.as_str(), path))
        .collect();
    let original_names: HashSet<&str> = originals.iter().map(|(n, _)| n.as_str()).collect();
    for (name, _) in &anonymized {
        if !original_names.contains(name.as_str()) {
            return Err(Error::contract(format!("no original track for {name}")).into());
        }
    }
    let mut outcomes = Vec::with_capacity(originals.len());
    for (name, path) in &originals {
        let anon_path = by_name
            .get(name.as_str())
            .ok_or_else(|| Error::contract(format!("no anonymized track for {name}")))?;
        let original = PitchTrack::parse(&load_text(path)?, &label(path))?;
        let anonymized = PitchTrack::parse(&load_text(anon_path)?, &label(anon_path))?;
        let utt = Path::new(name)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| name.clone());
        outcomes.push((utt, pitch_correlation(&original, &anonymized)));
    }
    let result = PitchCorrelationResult::from_pairs(outcomes);
    for utt in result.undefined() {
        eprintln!("warning: utterance {utt} has no defined correlation; excluded from the mean");
    }
    let mut text = String::new();
    for (utt, rho) in result.per_utterance() {
        let _ = writeln!(text, "{utt} {}", fmt_trunc(*rho, cfg.precision));
    }
    let mean = result
        .mean()
        .ok_or_else(|| Error::contract("no utterance pair has a defined pitch correlation"))?;
    let _ = writeln!(text, "mean {}", fmt_trunc(mean, cfg.precision));
    emit(cli, &text)
}

fn metric_gvd(cli: &Cli, cfg: &RunConfig, args: &GvdArgs) -> Result<(), CliError> {
    let original = EmbeddingCorpus::parse(&load_text(&args.original)?, &label(&args.original))?;
    let anonymized =
        EmbeddingCorpus::parse(&load_text(&args.anonymized)?, &label(&args.anonymized))?;
    let m_orig = similarity_matrix(&original)?;
    let m_anon = similarity_matrix(&anonymized)?;
    let gain = gain_of_voice_distinctiveness(&m_orig, &m_anon)?;
    if gain.degenerate {
        eprintln!("warning: a similarity matrix has no diagonal structure; the ratio saturated at the floor");
    }
    emit(cli, &format!("{}\n", fmt_trunc(gain.db, cfg.precision)))
}

fn metric_weighted_avg(cli: &Cli, cfg: &RunConfig, args: &WeightedAvgArgs) -> Result<(), CliError> {
    let results = parse_subset_results(&load_text(&args.results)?, &label(&args.results))?;
    let average = weighted_average(&results)?;
    emit(cli, &format!("{}\n", fmt_trunc(average, cfg.precision)))
}

fn simulate(cli: &Cli, cfg: &RunConfig) -> Result<(), CliError> {
    let sim = SimConfig {
        n_speakers: cfg.n_speakers,
        utts_per_speaker: cfg.utts_per_speaker,
        dim: cfg.dim,
        within_speaker_noise: cfg.within_speaker_noise,
        seed: cfg.seed,
    };
    let conditions: Vec<AnonymizationConfig> = cfg
        .conditions
        .iter()
        .map(|&w_pseudo| AnonymizationConfig {
            k: cfg.k,
            w_pseudo,
            w_avg: complement_weight(w_pseudo),
            mode: cfg.mode,
            selection_seed: cfg.selection_seed,
        })
        .collect();
    let report = run_experiment(&sim, cfg.lut_seed, &conditions)?;
    emit(cli, &report.to_text(cfg.precision))
}
