//! Equal error rate over genuine/impostor score sets.
//!
//! Acceptance rule: a trial is accepted when its score is at or above the
//! threshold. Sweeping the threshold over the unique score values yields a
//! staircase of (FAR, FRR) operating points; the EER is read off where
//! FAR − FRR changes sign, linearly interpolating between the two adjacent
//! points. Because the computation only ever sees counts, the result is
//! bit-identical under any strictly increasing transform of the scores.

use crate::error::{Error, Result};

/// Genuine (same-speaker) and impostor (different-speaker) trial scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    genuine: Vec<f64>,
    impostor: Vec<f64>,
}

impl ScoreSet {
    /// Validate and wrap two score lists. Both must be non-empty and finite.
    pub fn new(genuine: Vec<f64>, impostor: Vec<f64>) -> Result<Self> {
        if genuine.is_empty() || impostor.is_empty() {
            return Err(Error::contract(
                "need at least one genuine and one impostor score",
            ));
        }
        for (label, scores) in [("genuine", &genuine), ("impostor", &impostor)] {
            if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
                return Err(Error::contract(format!("non-finite {label} score {bad}")));
            }
        }
        Ok(Self { genuine, impostor })
    }

    /// Same-speaker trial scores.
    pub fn genuine(&self) -> &[f64] {
        &self.genuine
    }

    /// Different-speaker trial scores.
    pub fn impostor(&self) -> &[f64] {
        &self.impostor
    }
}

/// One threshold of the sweep with its error rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Threshold; accept when score ≥ threshold. The final point uses
    /// infinity (reject everything).
    pub threshold: f64,
    /// False acceptance rate: impostor scores at or above the threshold.
    pub far: f64,
    /// False rejection rate: genuine scores below the threshold.
    pub frr: f64,
}

/// The equal error rate and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EerResult {
    /// The rate where FAR = FRR, as a fraction in [0, 1].
    pub eer: f64,
    /// True when every score is identical, where the sweep has no interior
    /// points and the EER is 0.5 by convention.
    pub degenerate: bool,
}

/// All operating points in threshold order, from accept-everything
/// (FAR 1, FRR 0) to reject-everything (FAR 0, FRR 1).
pub fn operating_points(set: &ScoreSet) -> Vec<OperatingPoint> {
    let mut genuine = set.genuine.clone();
    let mut impostor = set.impostor.clone();
    genuine.sort_by(f64::total_cmp);
    impostor.sort_by(f64::total_cmp);

    let mut thresholds: Vec<f64> = genuine.iter().chain(&impostor).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let n_gen = genuine.len() as f64;
    let n_imp = impostor.len() as f64;
    let mut points: Vec<OperatingPoint> = thresholds
        .into_iter()
        .map(|t| {
            let rejected = genuine.partition_point(|s| *s < t);
            let accepted = impostor.len() - impostor.partition_point(|s| *s < t);
            OperatingPoint {
                threshold: t,
                far: accepted as f64 / n_imp,
                frr: rejected as f64 / n_gen,
            }
        })
        .collect();
    points.push(OperatingPoint {
        threshold: f64::INFINITY,
        far: 0.0,
        frr: 1.0,
    });
    points
}

/// Equal error rate of a score set.
pub fn eer(set: &ScoreSet) -> EerResult {
    let points = operating_points(set);
    let degenerate = points.len() == 2;

    let mut prev = points[0];
    for p in &points[1..] {
        let diff = p.far - p.frr;
        if diff <= 0.0 {
            let eer = if diff == 0.0 {
                p.far
            } else {
                let prev_diff = prev.far - prev.frr;
                let alpha = prev_diff / (prev_diff - diff);
                prev.far + alpha * (p.far - prev.far)
            };
            return EerResult { eer, degenerate };
        }
        prev = *p;
    }
    unreachable!("the reject-everything sentinel has FAR - FRR = -1");
}
