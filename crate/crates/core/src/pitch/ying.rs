//! Yingram: the cumulative-mean-normalized difference curve sampled on a
//! log-spaced frequency grid.
//!
//! Bin `m` sits at `f(m) = f_min * 2^(m / (12 * bins_per_semitone))`; its
//! value is the CMNDF linearly interpolated at the fractional lag
//! `sample_rate / f(m)`. Low-frequency bins whose lag would exceed half the
//! analysis window cannot be computed at the given sample rate; they are
//! clamped away and reported, and the stored `f_min` becomes the first
//! computable bin's frequency.

use std::path::Path;

use super::{cmndf, difference_function, frame_starts, AudioBuffer};
use crate::error::{Error, Result};
use crate::textio::{atomic_write, fmt_f64, fmt_f64_row, numbered_lines, parse_f64, parse_usize};

/// Parameters of Yingram extraction.
#[derive(Debug, Clone)]
pub struct YingramConfig {
    /// Frequency-grid resolution. 1 gives semitone-spaced bins (~74 over
    /// the default range); 80 reproduces the dense research-grade grid.
    pub bins_per_semitone: usize,
    /// Lower edge of the frequency grid, Hz.
    pub f_min_hz: f64,
    /// Upper bound of the frequency grid, Hz.
    pub f_max_hz: f64,
    /// Analysis window, samples.
    pub window: usize,
    /// Hop between frame starts, seconds.
    pub hop_s: f64,
}

impl Default for YingramConfig {
    fn default() -> Self {
        Self {
            bins_per_semitone: 1,
            f_min_hz: 10.77,
            f_max_hz: 768.40,
            window: 1024,
            hop_s: 0.0125,
        }
    }
}

/// A frames-by-bins matrix of normalized difference values.
#[derive(Debug, Clone, PartialEq)]
pub struct Yingram {
    bins_per_semitone: usize,
    f_min_hz: f64,
    f_max_hz: f64,
    clamped_low_bins: usize,
    rows: Vec<Vec<f64>>,
    bins: usize,
}

impl Yingram {
    /// Number of bins per frame.
    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Grid resolution in bins per semitone.
    pub fn bins_per_semitone(&self) -> usize {
        self.bins_per_semitone
    }

    /// Frequency of bin 0 (after any low-end clamping), Hz.
    pub fn f_min_hz(&self) -> f64 {
        self.f_min_hz
    }

    /// Configured upper bound of the grid, Hz.
    pub fn f_max_hz(&self) -> f64 {
        self.f_max_hz
    }

    /// How many low-frequency bins of the requested grid were not
    /// computable at the audio's sample rate. Zero for parsed files.
    pub fn clamped_low_bins(&self) -> usize {
        self.clamped_low_bins
    }

    /// Center frequency of bin `m`.
    pub fn bin_frequency(&self, m: usize) -> f64 {
        bin_frequency(self.f_min_hz, self.bins_per_semitone, m)
    }

    /// One row of bin values per analysis frame.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Serialize: `bins <B> bins_per_semitone <n> fmin <v> fmax <v>` header,
    /// then one row of `B` values per frame.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "bins {} bins_per_semitone {} fmin {} fmax {}\n",
            self.bins,
            self.bins_per_semitone,
            fmt_f64(self.f_min_hz),
            fmt_f64(self.f_max_hz)
        );
        for row in &self.rows {
            out.push_str(&fmt_f64_row(row));
            out.push('\n');
        }
        out
    }

    /// Parse the format produced by [`Yingram::to_text`].
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut lines = numbered_lines(text);
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::format(path, 1, "empty file, expected bins header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (bins, bins_per_semitone, f_min_hz, f_max_hz) = match fields.as_slice() {
            ["bins", b, "bins_per_semitone", n, "fmin", lo, "fmax", hi] => (
                parse_usize(b, path, 1)?,
                parse_usize(n, path, 1)?,
                parse_f64(lo, path, 1)?,
                parse_f64(hi, path, 1)?,
            ),
            _ => {
                return Err(Error::format(
                    path,
                    1,
                    format!(
                        "expected header `bins <B> bins_per_semitone <n> fmin <v> fmax <v>`, \
                         found {header:?}"
                    ),
                ))
            }
        };
        if bins == 0 || bins_per_semitone == 0 {
            return Err(Error::format(path, 1, "bin counts must be positive"));
        }
        if !(f_min_hz > 0.0 && f_min_hz < f_max_hz) {
            return Err(Error::format(path, 1, "need 0 < fmin < fmax"));
        }
        let mut rows = Vec::new();
        for (no, line) in lines {
            let mut row = Vec::with_capacity(bins);
            for tok in line.split_whitespace() {
                let v = parse_f64(tok, path, no)?;
                if v < 0.0 {
                    return Err(Error::format(path, no, format!("negative bin value {v}")));
                }
                row.push(v);
            }
            if row.len() != bins {
                return Err(Error::format(
                    path,
                    no,
                    format!("expected {bins} bin values, found {}", row.len()),
                ));
            }
            rows.push(row);
        }
        Ok(Self {
            bins_per_semitone,
            f_min_hz,
            f_max_hz,
            clamped_low_bins: 0,
            rows,
            bins,
        })
    }

    /// Read a matrix from disk.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Write the matrix to disk atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        atomic_write(path, &self.to_text())?;
        Ok(())
    }
}

fn bin_frequency(f_min_hz: f64, bins_per_semitone: usize, m: usize) -> f64 {
    f_min_hz * 2f64.powf(m as f64 / (12.0 * bins_per_semitone as f64))
}

/// Extract the Yingram of `audio`.
pub fn yingram(audio: &AudioBuffer, cfg: &YingramConfig) -> Result<Yingram> {
    if cfg.bins_per_semitone == 0 {
        return Err(Error::contract("bins_per_semitone must be at least 1"));
    }
    if !(cfg.f_min_hz.is_finite() && cfg.f_min_hz > 0.0) || cfg.f_min_hz >= cfg.f_max_hz {
        return Err(Error::contract(format!(
            "need 0 < f_min < f_max, got [{}, {}]",
            cfg.f_min_hz, cfg.f_max_hz
        )));
    }
    if cfg.window < 4 {
        return Err(Error::contract("window must hold at least 4 samples"));
    }
    if !(cfg.hop_s.is_finite() && cfg.hop_s > 0.0) {
        return Err(Error::contract("hop must be a positive duration"));
    }
    let sr = audio.sample_rate_hz() as f64;
    if cfg.f_max_hz > sr / 2.0 {
        return Err(Error::contract(format!(
            "sample rate {} Hz is too low for f_max {} Hz (feasible f_max is {} Hz)",
            sr,
            cfg.f_max_hz,
            sr / 2.0
        )));
    }
    let hop = (cfg.hop_s * sr).round() as usize;
    if hop == 0 {
        return Err(Error::contract(format!(
            "hop of {} s is shorter than one sample at {} Hz",
            cfg.hop_s, sr
        )));
    }

    let semitone_span = 12.0 * (cfg.f_max_hz / cfg.f_min_hz).log2();
    let total_bins = (cfg.bins_per_semitone as f64 * semitone_span).ceil() as usize;
    let tau_max = cfg.window / 2;
    // Drop bins whose lag would not fit in half the window.
    let mut clamped = 0;
    while clamped < total_bins
        && sr / bin_frequency(cfg.f_min_hz, cfg.bins_per_semitone, clamped) > tau_max as f64
    {
        clamped += 1;
    }
    if clamped == total_bins {
        return Err(Error::contract(format!(
            "no bin of the {}-{} Hz grid is computable with a {}-sample window at {} Hz",
            cfg.f_min_hz, cfg.f_max_hz, cfg.window, sr
        )));
    }
    let bins = total_bins - clamped;
    let f_min_eff = bin_frequency(cfg.f_min_hz, cfg.bins_per_semitone, clamped);
    let lags: Vec<f64> = (0..bins)
        .map(|m| sr / bin_frequency(f_min_eff, cfg.bins_per_semitone, m))
        .collect();

    let samples = audio.samples();
    let mut rows = Vec::new();
    for start in frame_starts(samples.len(), cfg.window, hop) {
        let frame = &samples[start..start + cfg.window];
        let d = difference_function(frame, tau_max)?;
        let dp = cmndf(&d);
        let row = lags
            .iter()
            .map(|lag| {
                let lo = lag.floor() as usize;
                let hi = (lo + 1).min(tau_max);
                let frac = lag - lo as f64;
                dp[lo] + frac * (dp[hi] - dp[lo])
            })
            .collect();
        rows.push(row);
    }
    Ok(Yingram {
        bins_per_semitone: cfg.bins_per_semitone,
        f_min_hz: f_min_eff,
        f_max_hz: cfg.f_max_hz,
        clamped_low_bins: clamped,
        rows,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_signals::sine;
    use super::*;

    #[test]
    fn default_grid_shape_at_16khz() {
        // ceil(12 * log2(768.40 / 10.77)) = 74 bins requested; at 16 kHz a
        // 1024-sample window cannot reach below 16000/512 = 31.25 Hz, which
        // clamps away the lowest 19 bins.
        let buf = sine(220.0, 16000, 0.1);
        let ying = yingram(&buf, &YingramConfig::default()).unwrap();
        assert_eq!(ying.clamped_low_bins() + ying.bins(), 74);
        assert!(ying.f_min_hz() >= 31.25);
        assert!(ying.bin_frequency(0) >= 31.25);
        assert!(ying.bin_frequency(ying.bins() - 1) <= 768.40);
        assert!(!ying.rows().is_empty());
        for row in ying.rows() {
            assert_eq!(row.len(), ying.bins());
            assert!(row.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn grid_is_log_linear() {
        let buf = sine(220.0, 16000, 0.1);
        let ying = yingram(&buf, &YingramConfig::default()).unwrap();
        let semitone = 2f64.powf(1.0 / 12.0);
        for m in 1..ying.bins() {
            let ratio = ying.bin_frequency(m) / ying.bin_frequency(m - 1);
            assert!((ratio - semitone).abs() < 1e-12);
        }
    }

    #[test]
    fn argmin_bin_tracks_the_fundamental() {
        for f0 in [110.0, 220.0, 440.0] {
            let buf = sine(f0, 16000, 0.1);
            let ying = yingram(&buf, &YingramConfig::default()).unwrap();
            for row in ying.rows() {
                let (argmin, _) = row
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap();
                let semitones =
                    12.0 * (ying.bin_frequency(argmin) / f0).log2().abs();
                assert!(
                    semitones <= 1.0,
                    "argmin bin at {} Hz is {semitones} semitones from {f0} Hz",
                    ying.bin_frequency(argmin)
                );
            }
        }
    }

    #[test]
    fn silence_yields_all_ones() {
        let buf = AudioBuffer::new(vec![0.0; 4096], 16000).unwrap();
        let ying = yingram(&buf, &YingramConfig::default()).unwrap();
        for row in ying.rows() {
            assert!(row.iter().all(|v| *v == 1.0));
        }
    }

    #[test]
    fn dense_grid_is_supported() {
        let buf = sine(220.0, 16000, 0.08);
        let cfg = YingramConfig {
            bins_per_semitone: 80,
            ..YingramConfig::default()
        };
        let ying = yingram(&buf, &cfg).unwrap();
        assert_eq!(ying.clamped_low_bins() + ying.bins(), 5911);
    }

    #[test]
    fn rejects_infeasible_configs() {
        let buf = sine(220.0, 16000, 0.1);
        let cfg = YingramConfig {
            f_max_hz: 9000.0,
            ..YingramConfig::default()
        };
        let err = yingram(&buf, &cfg).unwrap_err();
        assert!(err.to_string().contains("feasible f_max"));

        let cfg = YingramConfig {
            f_min_hz: 500.0,
            f_max_hz: 100.0,
            ..YingramConfig::default()
        };
        assert!(yingram(&buf, &cfg).is_err());
    }

    #[test]
    fn matrix_round_trips_through_text() {
        let buf = sine(330.0, 16000, 0.08);
        let ying = yingram(&buf, &YingramConfig::default()).unwrap();
        let text = ying.to_text();
        let parsed = Yingram::parse(&text, "y.txt").unwrap();
        assert_eq!(parsed.to_text(), text);
        assert_eq!(parsed.bins(), ying.bins());
        assert_eq!(parsed.rows(), ying.rows());
    }

    #[test]
    fn parse_diagnoses_malformed_files() {
        assert!(Yingram::parse("", "y").is_err());
        assert!(Yingram::parse("bins 2 fmin 10 fmax 700\n", "y").is_err());
        let err =
            Yingram::parse("bins 3 bins_per_semitone 1 fmin 31 fmax 768\n1 2\n", "y").unwrap_err();
        assert_eq!(err.to_string(), "y:2: expected 3 bin values, found 2");
        let err = Yingram::parse(
            "bins 2 bins_per_semitone 1 fmin 31 fmax 768\n1 -2\n",
            "y",
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "y:2: negative bin value -2");
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ying.txt");
        let ying = yingram(&sine(220.0, 16000, 0.08), &YingramConfig::default()).unwrap();
        ying.save(&path).unwrap();
        assert_eq!(Yingram::load(&path).unwrap().to_text(), ying.to_text());
    }
}
