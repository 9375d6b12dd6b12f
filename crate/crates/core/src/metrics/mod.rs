//! Evaluation metrics: equal error rate, word error rate, pitch-contour
//! correlation, voice-distinctiveness gain, and weighted subset averaging,
//! plus the line-oriented score/trial/transcript file formats they consume.

mod correlation;
mod distinctiveness;
mod eer;
mod io;
mod weighted;
mod wer;

pub use correlation::{pitch_correlation, PitchCorrelationResult};
pub use distinctiveness::{
    diagonal_dominance, gain_of_voice_distinctiveness, similarity_matrix, GvdResult,
    SimilarityMatrix,
};
pub use eer::{eer, operating_points, EerResult, OperatingPoint, ScoreSet};
pub use io::{
    parse_scores, parse_subset_results, parse_transcripts, parse_trials, score_set,
    scores_to_text, subset_results_to_text, transcripts_to_text, trials_to_text, ScoreRecord,
    Transcript, TrialRecord,
};
pub use weighted::{weighted_average, SubsetResult};
pub use wer::{corpus_wer, wer, WerAlignment};
