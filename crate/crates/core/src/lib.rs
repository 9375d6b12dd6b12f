//! Embedding-level speaker anonymization with a voice-privacy evaluation
//! toolkit.
//!
//! The crate has three layers:
//!
//! * [`anonymizer`] — the speaker look-up table (random speaker embeddings
//!   plus one reserved pseudo speaker) and the weighted pseudo/average
//!   combination that produces an anonymized identity per source speaker.
//! * [`pitch`] — a YIN pitch tracker and the Yingram lag-spectrogram used to
//!   inspect intonation preservation.
//! * [`metrics`] and [`simulator`] — equal error rate, word error rate, F0
//!   correlation and voice-distinctiveness gain, plus a synthetic-embedding
//!   corpus generator for exercising the whole pipeline without audio or
//!   trained models.
//!
//! Everything is deterministic: all randomness flows from explicit seeds, and
//! every file format round-trips byte-identically through its parser and
//! serializer.

#![warn(missing_docs)]

pub mod anonymizer;
pub mod config;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod pitch;
pub mod rng;
pub mod simulator;
pub mod textio;

pub use error::{Error, Result};
