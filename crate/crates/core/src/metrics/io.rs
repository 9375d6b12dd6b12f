//! Line-oriented file formats consumed by the metric commands: scores,
//! trial labels, per-subset results, and transcripts.

use indexmap::IndexMap;

use super::eer::ScoreSet;
use super::weighted::SubsetResult;
use crate::error::{Error, Result};
use crate::textio::{fmt_f64, numbered_lines, parse_f64};

/// One scored trial: `<enroll_id> <test_utt_id> <score>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    /// Enrollment speaker id.
    pub enroll: String,
    /// Test utterance id.
    pub utterance: String,
    /// Verification score; higher means more same-speaker evidence.
    pub score: f64,
}

/// One labeled trial: `<enroll_id> <test_utt_id> target|nontarget`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    /// Enrollment speaker id.
    pub enroll: String,
    /// Test utterance id.
    pub utterance: String,
    /// True for same-speaker (target) trials.
    pub target: bool,
}

/// One transcript line: `<utt_id> <token> <token> …`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    /// Utterance id.
    pub utt_id: String,
    /// Whitespace-delimited tokens; may be empty.
    pub tokens: Vec<String>,
}

/// Parse a score file, rejecting duplicate (enroll, utterance) pairs.
pub fn parse_scores(text: &str, path: &str) -> Result<Vec<ScoreRecord>> {
    let mut records = Vec::new();
    let mut seen: IndexMap<(String, String), usize> = IndexMap::new();
    for (no, line) in numbered_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [enroll, utt, score] = fields.as_slice() else {
            return Err(Error::format(
                path,
                no,
                format!("expected `<enroll> <utt> <score>`, found {} fields", fields.len()),
            ));
        };
        let key = (enroll.to_string(), utt.to_string());
        if let Some(first) = seen.insert(key, no) {
            return Err(Error::format(
                path,
                no,
                format!("duplicate trial {enroll} {utt} (first seen on line {first})"),
            ));
        }
        records.push(ScoreRecord {
            enroll: enroll.to_string(),
            utterance: utt.to_string(),
            score: parse_f64(score, path, no)?,
        });
    }
    Ok(records)
}

/// Serialize scores, one `<enroll> <utt> <score>` line each.
pub fn scores_to_text(records: &[ScoreRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!("{} {} {}\n", r.enroll, r.utterance, fmt_f64(r.score)));
    }
    out
}

/// Parse a trial file, rejecting duplicate (enroll, utterance) pairs.
pub fn parse_trials(text: &str, path: &str) -> Result<Vec<TrialRecord>> {
    let mut records = Vec::new();
    let mut seen: IndexMap<(String, String), usize> = IndexMap::new();
    for (no, line) in numbered_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [enroll, utt, label] = fields.as_slice() else {
            return Err(Error::format(
                path,
                no,
                format!(
                    "expected `<enroll> <utt> target|nontarget`, found {} fields",
                    fields.len()
                ),
            ));
        };
        let target = match *label {
            "target" => true,
            "nontarget" => false,
            other => {
                return Err(Error::format(
                    path,
                    no,
                    format!("expected label `target` or `nontarget`, found {other:?}"),
                ))
            }
        };
        let key = (enroll.to_string(), utt.to_string());
        if let Some(first) = seen.insert(key, no) {
            return Err(Error::format(
                path,
                no,
                format!("duplicate trial {enroll} {utt} (first seen on line {first})"),
            ));
        }
        records.push(TrialRecord {
            enroll: enroll.to_string(),
            utterance: utt.to_string(),
            target,
        });
    }
    Ok(records)
}

/// Serialize trials, one `<enroll> <utt> target|nontarget` line each.
pub fn trials_to_text(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let label = if r.target { "target" } else { "nontarget" };
        out.push_str(&format!("{} {} {}\n", r.enroll, r.utterance, label));
    }
    out
}

/// Join scores with trial labels into genuine/impostor lists, in trial
/// order. Every trial must have exactly one score.
pub fn score_set(scores: &[ScoreRecord], trials: &[TrialRecord]) -> Result<ScoreSet> {
    let mut by_key: IndexMap<(&str, &str), f64> = IndexMap::new();
    for s in scores {
        by_key.insert((s.enroll.as_str(), s.utterance.as_str()), s.score);
    }
    let mut genuine = Vec::new();
    let mut impostor = Vec::new();
    for t in trials {
        let Some(score) = by_key.get(&(t.enroll.as_str(), t.utterance.as_str())) else {
            return Err(Error::contract(format!(
                "no score for trial {} {}",
                t.enroll, t.utterance
            )));
        };
        if t.target {
            genuine.push(*score);
        } else {
            impostor.push(*score);
        }
    }
    ScoreSet::new(genuine, impostor)
}

/// Parse transcripts, one utterance per line, rejecting duplicate ids.
pub fn parse_transcripts(text: &str, path: &str) -> Result<Vec<Transcript>> {
    let mut records = Vec::new();
    let mut seen: IndexMap<String, usize> = IndexMap::new();
    for (no, line) in numbered_lines(text) {
        let mut fields = line.split_whitespace();
        let Some(utt_id) = fields.next() else {
            continue; // blank line
        };
        if let Some(first) = seen.insert(utt_id.to_string(), no) {
            return Err(Error::format(
                path,
                no,
                format!("duplicate utterance id {utt_id} (first seen on line {first})"),
            ));
        }
        records.push(Transcript {
            utt_id: utt_id.to_string(),
            tokens: fields.map(str::to_string).collect(),
        });
    }
    Ok(records)
}

/// Serialize transcripts, one `<utt_id> <tokens…>` line each.
pub fn transcripts_to_text(records: &[Transcript]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.utt_id);
        for tok in &r.tokens {
            out.push(' ');
            out.push_str(tok);
        }
        out.push('\n');
    }
    out
}

/// Parse per-subset results: `<dataset> <gender> <weight> <value>` lines.
pub fn parse_subset_results(text: &str, path: &str) -> Result<Vec<SubsetResult>> {
    let mut records = Vec::new();
    for (no, line) in numbered_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [dataset, gender, weight, value] = fields.as_slice() else {
            return Err(Error::format(
                path,
                no,
                format!(
                    "expected `<dataset> <gender> <weight> <value>`, found {} fields",
                    fields.len()
                ),
            ));
        };
        records.push(SubsetResult {
            dataset: dataset.to_string(),
            gender: gender.to_string(),
            weight: parse_f64(weight, path, no)?,
            value: parse_f64(value, path, no)?,
        });
    }
    Ok(records)
}

/// Serialize subset results, one `<dataset> <gender> <weight> <value>`
/// line each.
pub fn subset_results_to_text(records: &[SubsetResult]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "{} {} {} {}\n",
            r.dataset,
            r.gender,
            fmt_f64(r.weight),
            fmt_f64(r.value)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::eer::eer;
    use super::*;

    #[test]
    fn scores_round_trip_byte_identically() {
        let text = "spk1 utt1 0.9\nspk1 utt2 -0.125\nspk2 utt1 0\n";
        let records = parse_scores(text, "s.txt").unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(scores_to_text(&records), text);
    }

    #[test]
    fn score_parsing_diagnoses_errors() {
        let err = parse_scores("a u\n", "s").unwrap_err();
        assert_eq!(err.to_string(), "s:1: expected `<enroll> <utt> <score>`, found 2 fields");
        let err = parse_scores("a u 0.1\na u 0.2\n", "s").unwrap_err();
        assert_eq!(err.to_string(), "s:2: duplicate trial a u (first seen on line 1)");
        assert!(parse_scores("a u inf\n", "s").is_err());
    }

    #[test]
    fn trials_round_trip_byte_identically() {
        let text = "spk1 utt1 target\nspk1 utt2 nontarget\n";
        let records = parse_trials(text, "t.txt").unwrap();
        assert!(records[0].target);
        assert!(!records[1].target);
        assert_eq!(trials_to_text(&records), text);

        let err = parse_trials("a u yes\n", "t").unwrap_err();
        assert_eq!(
            err.to_string(),
            "t:1: expected label `target` or `nontarget`, found \"yes\""
        );
    }

    #[test]
    fn score_set_joins_scores_with_labels() {
        let scores = parse_scores("a u1 0.9\na u2 0.2\nb u1 0.4\n", "s").unwrap();
        let trials = parse_trials("a u1 target\na u2 nontarget\nb u1 nontarget\n", "t").unwrap();
        let set = score_set(&scores, &trials).unwrap();
        assert_eq!(set.genuine(), &[0.9]);
        assert_eq!(set.impostor(), &[0.2, 0.4]);
        assert_eq!(eer(&set).eer, 0.0);

        let missing = parse_trials("a u1 target\nz u9 nontarget\n", "t").unwrap();
        let err = score_set(&scores, &missing).unwrap_err();
        assert_eq!(err.to_string(), "no score for trial z u9");
    }

    #[test]
    fn transcripts_round_trip_and_allow_empty_token_lists() {
        let text = "utt1 the cat sat\nutt2\nutt3 hello\n";
        let records = parse_transcripts(text, "tr.txt").unwrap();
        assert_eq!(records[0].tokens.len(), 3);
        assert!(records[1].tokens.is_empty());
        assert_eq!(transcripts_to_text(&records), text);

        let err = parse_transcripts("u1 a\nu1 b\n", "tr").unwrap_err();
        assert_eq!(err.to_string(), "tr:2: duplicate utterance id u1 (first seen on line 1)");
    }

    #[test]
    fn subset_results_round_trip() {
        let text = "libri f 0.25 16.61\nlibri m 0.25 10.69\nvctk f 0.5 23.1\n";
        let records = parse_subset_results(text, "w.txt").unwrap();
        assert_eq!(records[2].weight, 0.5);
        assert_eq!(subset_results_to_text(&records), text);

        let err = parse_subset_results("libri f 0.25\n", "w").unwrap_err();
        assert_eq!(
            err.to_string(),
            "w:1: expected `<dataset> <gender> <weight> <value>`, found 3 fields"
        );
    }
}
