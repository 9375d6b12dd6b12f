//! Weighted averaging of per-subset results into a single headline number.

use crate::error::{Error, Result};

/// One evaluation subset: a dataset/gender cell with its weight and value.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetResult {
    /// Dataset the subset belongs to.
    pub dataset: String,
    /// Gender partition of the subset.
    pub gender: String,
    /// Contribution to the overall average, in [0, 1].
    pub weight: f64,
    /// The subset's metric value (EER or WER, in percent).
    pub value: f64,
}

/// Σ weightᵢ·valueᵢ, accumulated in input order. Weights must be in [0, 1]
/// and sum to 1 within 1e-9.
pub fn weighted_average(results: &[SubsetResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::contract("no subset results to average"));
    }
    for r in results {
        if !(r.weight.is_finite() && (0.0..=1.0).contains(&r.weight)) {
            return Err(Error::contract(format!(
                "weight {} of subset {} {} is outside [0, 1]",
                r.weight, r.dataset, r.gender
            )));
        }
        if !r.value.is_finite() {
            return Err(Error::contract(format!(
                "value of subset {} {} is not finite",
                r.dataset, r.gender
            )));
        }
    }
    let sum: f64 = results.iter().map(|r| r.weight).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::contract(format!(
            "subset weights sum to {sum}, expected 1"
        )));
    }
    Ok(results.iter().map(|r| r.weight * r.value).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subsets(weights: &[f64], values: &[f64]) -> Vec<SubsetResult> {
        weights
            .iter()
            .zip(values)
            .enumerate()
            .map(|(i, (w, v))| SubsetResult {
                dataset: format!("d{}", i / 2),
                gender: if i % 2 == 0 { "f" } else { "m" }.into(),
                weight: *w,
                value: *v,
            })
            .collect()
    }

    const TABLE_WEIGHTS: [f64; 6] = [0.25, 0.25, 0.20, 0.20, 0.05, 0.05];

    #[test]
    fn published_test_set_averages() {
        // Per-subset EERs of the strongest and weakest anonymization
        // settings, against their published weighted averages.
        let high = subsets(
            &TABLE_WEIGHTS,
            &[22.08, 19.15, 40.64, 38.81, 40.46, 38.70],
        );
        assert!((weighted_average(&high).unwrap() - 30.15).abs() <= 0.01);

        let low = subsets(
            &TABLE_WEIGHTS,
            &[16.61, 10.69, 23.10, 23.19, 23.99, 23.16],
        );
        assert!((weighted_average(&low).unwrap() - 18.44).abs() <= 0.01);
    }

    #[test]
    fn equal_values_average_to_that_value() {
        let s = subsets(&TABLE_WEIGHTS, &[7.25; 6]);
        assert!((weighted_average(&s).unwrap() - 7.25).abs() < 1e-12);
    }

    #[test]
    fn order_is_fixed_for_reproducibility() {
        let a = subsets(&TABLE_WEIGHTS, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(
            weighted_average(&a).unwrap(),
            0.25 * 1.0 + 0.25 * 2.0 + 0.20 * 3.0 + 0.20 * 4.0 + 0.05 * 5.0 + 0.05 * 6.0
        );
    }

    #[test]
    fn rejects_bad_weights() {
        let err = weighted_average(&subsets(&[0.5, 0.4], &[1.0, 2.0])).unwrap_err();
        assert_eq!(err.to_string(), "subset weights sum to 0.9, expected 1");

        assert!(weighted_average(&subsets(&[1.5, -0.5], &[1.0, 2.0])).is_err());
        assert!(weighted_average(&[]).is_err());
        assert!(weighted_average(&subsets(&[1.0], &[f64::NAN])).is_err());
    }
}
