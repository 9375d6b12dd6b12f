//! Embedding corpora: per-utterance vectors labeled with speaker and
//! utterance ids, plus the flat id→vector table the anonymizer emits.

use std::path::Path;

use indexmap::IndexMap;

use crate::anonymizer::SpeakerEmbedding;
use crate::error::{Error, Result};
use crate::textio::{atomic_write, fmt_f64_row, numbered_lines, parse_f64, parse_usize};

/// One utterance: its speaker, its globally unique id, and its embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRecord {
    /// Speaker the utterance belongs to.
    pub speaker: String,
    /// Corpus-wide unique utterance id.
    pub utterance: String,
    /// The utterance-level embedding.
    pub embedding: SpeakerEmbedding,
}

/// An ordered collection of utterance embeddings sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingCorpus {
    dim: usize,
    records: Vec<CorpusRecord>,
    by_speaker: IndexMap<String, Vec<usize>>,
    by_utterance: IndexMap<String, usize>,
}

impl EmbeddingCorpus {
    /// Assemble a corpus, checking dimensions and utterance-id uniqueness.
    pub fn new(dim: usize, records: Vec<CorpusRecord>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::contract("embedding dimension must be positive"));
        }
        let mut by_speaker: IndexMap<String, Vec<usize>> = IndexMap::new();
        let mut by_utterance = IndexMap::new();
        for (i, rec) in records.iter().enumerate() {
            if rec.speaker.is_empty() || rec.utterance.is_empty() {
                return Err(Error::contract("speaker and utterance ids must be non-empty"));
            }
            if rec.embedding.dim() != dim {
                return Err(Error::contract(format!(
                    "utterance {} has dimension {}, corpus declares {}",
                    rec.utterance,
                    rec.embedding.dim(),
                    dim
                )));
            }
            if by_utterance.insert(rec.utterance.clone(), i).is_some() {
                return Err(Error::contract(format!(
                    "duplicate utterance id {}",
                    rec.utterance
                )));
            }
            by_speaker.entry(rec.speaker.clone()).or_default().push(i);
        }
        Ok(Self {
            dim,
            records,
            by_speaker,
            by_utterance,
        })
    }

    /// Declared embedding dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All records, in file/insertion order.
    pub fn records(&self) -> &[CorpusRecord] {
        &self.records
    }

    /// Number of utterances.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// True when the corpus holds no utterances.
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Speaker ids in first-seen order.
    pub fn speakers(&self) -> Vec<&str> {
        self.by_speaker.keys().map(String::as_str).collect()
    }

    /// All records of one speaker, or an empty slice-equivalent.
    pub fn speaker_records(&self, speaker: &str) -> Vec<&CorpusRecord> {
        self.by_speaker
            .get(speaker)
            .map(|idx| idx.iter().map(|&i| &self.records[i]).collect())
            .unwrap_or_default()
    }

    /// Look an utterance up by id.
    pub fn utterance(&self, utt_id: &str) -> Option<&CorpusRecord> {
        self.by_utterance.get(utt_id).map(|&i| &self.records[i])
    }

    /// Serialize: `dim <D>` header, then `<speaker> <utt> <v1> … <vD>` rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for rec in &self.records {
            out.push_str(&rec.speaker);
            out.push(' ');
            out.push_str(&rec.utterance);
            out.push(' ');
            out.push_str(&fmt_f64_row(rec.embedding.values()));
            out.push('\n');
        }
        out
    }

    /// Parse the format produced by [`EmbeddingCorpus::to_text`].
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut lines = numbered_lines(text);
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::format(path, 1, "empty file, expected `dim <D>` header"))?;
        let dim = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["dim", d] => parse_usize(d, path, 1)?,
            _ => {
                return Err(Error::format(
                    path,
                    1,
                    format!("expected header `dim <D>`, found {header:?}"),
                ))
            }
        };
        if dim == 0 {
            return Err(Error::format(path, 1, "dimension must be positive"));
        }
        let mut records = Vec::new();
        let mut seen_utts: IndexMap<String, usize> = IndexMap::new();
        for (no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != dim + 2 {
                return Err(Error::format(
                    path,
                    no,
                    format!(
                        "expected `<speaker> <utt> <{dim} values>` ({} fields), found {}",
                        dim + 2,
                        fields.len()
                    ),
                ));
            }
            let utterance = fields[1].to_string();
            if let Some(first) = seen_utts.insert(utterance.clone(), no) {
                return Err(Error::format(
                    path,
                    no,
                    format!("duplicate utterance id {utterance} (first seen on line {first})"),
                ));
            }
            let mut values = Vec::with_capacity(dim);
            for tok in &fields[2..] {
                values.push(parse_f64(tok, path, no)?);
            }
            let embedding = SpeakerEmbedding::new(values)
                .map_err(|e| Error::format(path, no, e.to_string()))?;
            records.push(CorpusRecord {
                speaker: fields[0].to_string(),
                utterance,
                embedding,
            });
        }
        Self::new(dim, records)
    }

    /// Read a corpus from disk.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Write the corpus to disk atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        atomic_write(path, &self.to_text())?;
        Ok(())
    }
}

/// A flat id→embedding table, the output shape of identity anonymization.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    rows: IndexMap<String, SpeakerEmbedding>,
}

impl EmbeddingTable {
    /// Assemble a table, checking the shared dimension and id uniqueness.
    pub fn new(dim: usize, rows: Vec<(String, SpeakerEmbedding)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::contract("embedding dimension must be positive"));
        }
        let mut map = IndexMap::new();
        for (id, emb) in rows {
            if id.is_empty() {
                return Err(Error::contract("ids must be non-empty"));
            }
            if emb.dim() != dim {
                return Err(Error::contract(format!(
                    "row {} has dimension {}, table declares {}",
                    id,
                    emb.dim(),
                    dim
                )));
            }
            if map.insert(id.clone(), emb).is_some() {
                return Err(Error::contract(format!("duplicate id {id}")));
            }
        }
        Ok(Self { dim, rows: map })
    }

    /// Shared embedding dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// True when the table has no rows.
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Ids in insertion order.
    pub fn ids(&self) -> Vec<&str> {
        self.rows.keys().map(String::as_str).collect()
    }

    /// Look a row up by id.
    pub fn get(&self, id: &str) -> Option<&SpeakerEmbedding> {
        self.rows.get(id)
    }

    /// Serialize: `dim <D>` header, then `<id> <v1> … <vD>` rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for (id, emb) in &self.rows {
            out.push_str(id);
            out.push(' ');
            out.push_str(&fmt_f64_row(emb.values()));
            out.push('\n');
        }
        out
    }

    /// Parse the format produced by [`EmbeddingTable::to_text`].
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut lines = numbered_lines(text);
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::format(path, 1, "empty file, expected `dim <D>` header"))?;
        let dim = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["dim", d] => parse_usize(d, path, 1)?,
            _ => {
                return Err(Error::format(
                    path,
                    1,
                    format!("expected header `dim <D>`, found {header:?}"),
                ))
            }
        };
        if dim == 0 {
            return Err(Error::format(path, 1, "dimension must be positive"));
        }
        let mut rows = Vec::new();
        let mut seen: IndexMap<String, usize> = IndexMap::new();
        for (no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != dim + 1 {
                return Err(Error::format(
                    path,
                    no,
                    format!("expected id plus {dim} values, found {} fields", fields.len()),
                ));
            }
            let id = fields[0].to_string();
            if let Some(first) = seen.insert(id.clone(), no) {
                return Err(Error::format(
                    path,
                    no,
                    format!("duplicate id {id} (first seen on line {first})"),
                ));
            }
            let mut values = Vec::with_capacity(dim);
            for tok in &fields[1..] {
                values.push(parse_f64(tok, path, no)?);
            }
            let embedding = SpeakerEmbedding::new(values)
                .map_err(|e| Error::format(path, no, e.to_string()))?;
            rows.push((id, embedding));
        }
        Self::new(dim, rows)
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

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(speaker: &str, utt: &str, values: &[f64]) -> CorpusRecord {
        CorpusRecord {
            speaker: speaker.into(),
            utterance: utt.into(),
            embedding: SpeakerEmbedding::new(values.to_vec()).unwrap(),
        }
    }

    fn sample_corpus() -> EmbeddingCorpus {
        EmbeddingCorpus::new(
            2,
            vec![
                rec("alice", "a1", &[1.0, 0.0]),
                rec("alice", "a2", &[0.5, -0.25]),
                rec("bob", "b1", &[0.0, 1.5]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn groups_records_by_speaker_in_first_seen_order() {
        let corpus = sample_corpus();
        assert_eq!(corpus.speakers(), vec!["alice", "bob"]);
        assert_eq!(corpus.speaker_records("alice").len(), 2);
        assert_eq!(corpus.speaker_records("bob").len(), 1);
        assert!(corpus.speaker_records("carol").is_empty());
        assert_eq!(corpus.utterance("b1").unwrap().speaker, "bob");
        assert!(corpus.utterance("zz").is_none());
    }

    #[test]
    fn rejects_inconsistent_records() {
        let err = EmbeddingCorpus::new(
            2,
            vec![rec("a", "u1", &[1.0, 2.0]), rec("a", "u1", &[3.0, 4.0])],
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "duplicate utterance id u1");

        let err = EmbeddingCorpus::new(2, vec![rec("a", "u1", &[1.0])]).unwrap_err();
        assert!(err.to_string().contains("dimension 1"));

        assert!(EmbeddingCorpus::new(0, vec![]).is_err());
    }

    #[test]
    fn corpus_round_trips_byte_identically() {
        let corpus = sample_corpus();
        let text = corpus.to_text();
        assert_eq!(text, "dim 2\nalice a1 1 0\nalice a2 0.5 -0.25\nbob b1 0 1.5\n");
        let parsed = EmbeddingCorpus::parse(&text, "c.txt").unwrap();
        assert_eq!(parsed.to_text(), text);
        assert_eq!(parsed, corpus);
    }

    #[test]
    fn corpus_parse_diagnoses_malformed_files() {
        let err = EmbeddingCorpus::parse("", "c").unwrap_err();
        assert_eq!(err.to_string(), "c:1: empty file, expected `dim <D>` header");

        let err = EmbeddingCorpus::parse("dim 2\na u1 1\n", "c").unwrap_err();
        assert_eq!(
            err.to_string(),
            "c:2: expected `<speaker> <utt> <2 values>` (4 fields), found 3"
        );

        let err = EmbeddingCorpus::parse("dim 2\na u1 1 2\nb u1 3 4\n", "c").unwrap_err();
        assert_eq!(
            err.to_string(),
            "c:3: duplicate utterance id u1 (first seen on line 2)"
        );

        let err = EmbeddingCorpus::parse("dim 2\na u1 1 nan\n", "c").unwrap_err();
        assert!(err.to_string().starts_with("c:2:"));
    }

    #[test]
    fn corpus_save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.txt");
        let corpus = sample_corpus();
        corpus.save(&path).unwrap();
        assert_eq!(EmbeddingCorpus::load(&path).unwrap(), corpus);
    }

    #[test]
    fn table_round_trips_and_validates() {
        let table = EmbeddingTable::new(
            2,
            vec![
                ("alice".into(), SpeakerEmbedding::new(vec![1.0, 2.0]).unwrap()),
                ("bob".into(), SpeakerEmbedding::new(vec![-0.5, 0.125]).unwrap()),
            ],
        )
        .unwrap();
        let text = table.to_text();
        assert_eq!(text, "dim 2\nalice 1 2\nbob -0.5 0.125\n");
        let parsed = EmbeddingTable::parse(&text, "t.txt").unwrap();
        assert_eq!(parsed, table);
        assert_eq!(parsed.ids(), vec!["alice", "bob"]);
        assert_eq!(parsed.get("bob").unwrap().values(), &[-0.5, 0.125]);

        let err = EmbeddingTable::parse("dim 2\na 1 2\na 3 4\n", "t").unwrap_err();
        assert_eq!(err.to_string(), "t:3: duplicate id a (first seen on line 2)");
        let err = EmbeddingTable::parse("dim 2\na 1\n", "t").unwrap_err();
        assert_eq!(err.to_string(), "t:2: expected id plus 2 values, found 2 fields");
    }

    #[test]
    fn table_save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.txt");
        let table = EmbeddingTable::new(
            1,
            vec![("x".into(), SpeakerEmbedding::new(vec![0.25]).unwrap())],
        )
        .unwrap();
        table.save(&path).unwrap();
        assert_eq!(EmbeddingTable::load(&path).unwrap(), table);
    }

    #[cfg(not(miri))]
    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn any_corpus_round_trips(
                rows in proptest::collection::vec(
                    (0usize..4, proptest::collection::vec(-1e6f64..1e6, 3)),
                    1..20,
                )
            ) {
                let records: Vec<CorpusRecord> = rows
                    .iter()
                    .enumerate()
                    .map(|(i, (spk, values))| rec(&format!("s{spk}"), &format!("u{i}"), values))
                    .collect();
                let corpus = EmbeddingCorpus::new(3, records).unwrap();
                let text = corpus.to_text();
                let parsed = EmbeddingCorpus::parse(&text, "p").unwrap();
                prop_assert_eq!(parsed.to_text(), text);
                prop_assert_eq!(parsed, corpus);
            }
        }
    }
}
