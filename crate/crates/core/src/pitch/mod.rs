//! YIN pitch tracking and the Yingram lag-frequency representation.
//!
//! The front end is the classic YIN chain: a squared-difference function
//! over a fixed integration window, cumulative-mean normalization, an
//! absolute threshold with descent to the local minimum, and parabolic
//! refinement of the winning lag. [`yingram`](crate::pitch::yingram) reuses
//! the normalized difference curve and samples it at the fractional lags of
//! a log-spaced frequency grid instead of picking a single lag.

mod wav;
mod ying;

pub use wav::{parse_wav, read_wav, write_wav_mono16};
pub use ying::{yingram, Yingram, YingramConfig};

use std::path::Path;

use crate::error::{Error, Result};
use crate::textio::{atomic_write, fmt_f64, numbered_lines, parse_f64};

/// Mono audio in `[-1, 1]` at a fixed sample rate of at least 8 kHz.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate_hz: u32,
    clipped: usize,
}

impl AudioBuffer {
    /// Wrap samples, clamping out-of-range values into `[-1, 1]` and
    /// counting how many were clipped (callers surface that as a warning).
    pub fn new(mut samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::contract("audio must contain at least one sample"));
        }
        if sample_rate_hz < 8000 {
            return Err(Error::contract(format!(
                "sample rate {sample_rate_hz} Hz is below the 8000 Hz minimum"
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::contract("audio samples must be finite"));
        }
        let mut clipped = 0;
        for s in &mut samples {
            if *s > 1.0 || *s < -1.0 {
                *s = s.clamp(-1.0, 1.0);
                clipped += 1;
            }
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            clipped,
        })
    }

    /// The samples, guaranteed inside `[-1, 1]`.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Sample rate in Hz.
    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    /// How many samples were clamped into range during construction.
    pub fn clipped(&self) -> usize {
        self.clipped
    }
}

/// Squared-difference function `d(tau) = sum_j (x[j] - x[j+tau])^2` for
/// `tau` in `0..=tau_max`, with `d(0) = 0`.
///
/// All lags share one integration window of `frame.len() - tau_max`
/// samples, so the cumulative normalization in [`cmndf`] compares like with
/// like. The frame must hold at least `2 * tau_max` samples.
pub fn difference_function(frame: &[f64], tau_max: usize) -> Result<Vec<f64>> {
    if tau_max == 0 {
        return Err(Error::contract("tau_max must be at least 1"));
    }
    if frame.len() < 2 * tau_max {
        return Err(Error::contract(format!(
            "frame of {} samples is too short for tau_max {} (need at least {})",
            frame.len(),
            tau_max,
            2 * tau_max
        )));
    }
    let w = frame.len() - tau_max;
    let mut d = vec![0.0; tau_max + 1];
    for (tau, slot) in d.iter_mut().enumerate().skip(1) {
        let mut acc = 0.0;
        for j in 0..w {
            let diff = frame[j] - frame[j + tau];
            acc += diff * diff;
        }
        *slot = acc;
    }
    Ok(d)
}

/// Cumulative-mean-normalized difference function.
///
/// `d'(0) = 1` and `d'(tau) = d(tau) * tau / sum_{j=1..tau} d(j)`. A frame
/// whose difference function is identically zero (digital silence) yields 1
/// everywhere, so no lag can cross a voicing threshold below 1.
pub fn cmndf(d: &[f64]) -> Vec<f64> {
    let mut out = vec![1.0; d.len()];
    let mut running = 0.0;
    for tau in 1..d.len() {
        running += d[tau];
        if running > 0.0 {
            out[tau] = d[tau] * tau as f64 / running;
        }
    }
    out
}

/// One analysis frame of a pitch track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchFrame {
    /// Fundamental frequency estimate in Hz; exactly 0 when unvoiced.
    pub f0_hz: f64,
    /// Whether the frame crossed the voicing threshold.
    pub voiced: bool,
}

impl PitchFrame {
    /// A voiced frame at `f0_hz`.
    pub fn voiced(f0_hz: f64) -> Self {
        Self { f0_hz, voiced: true }
    }

    /// An unvoiced frame.
    pub fn unvoiced() -> Self {
        Self { f0_hz: 0.0, voiced: false }
    }
}

/// A fixed-hop sequence of [`PitchFrame`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack {
    hop_s: f64,
    frames: Vec<PitchFrame>,
}

impl PitchTrack {
    /// Assemble a track, enforcing that voiced frames carry a positive
    /// finite F0 and unvoiced frames carry exactly 0.
    pub fn new(hop_s: f64, frames: Vec<PitchFrame>) -> Result<Self> {
        if !(hop_s.is_finite() && hop_s > 0.0) {
            return Err(Error::contract("hop must be a positive duration"));
        }
        for (i, f) in frames.iter().enumerate() {
            if f.voiced && !(f.f0_hz.is_finite() && f.f0_hz > 0.0) {
                return Err(Error::contract(format!(
                    "voiced frame {i} must have a positive F0, got {}",
                    f.f0_hz
                )));
            }
            if !f.voiced && f.f0_hz != 0.0 {
                return Err(Error::contract(format!(
                    "unvoiced frame {i} must have F0 = 0, got {}",
                    f.f0_hz
                )));
            }
        }
        Ok(Self { hop_s, frames })
    }

    /// Hop between frame starts, in seconds.
    pub fn hop_s(&self) -> f64 {
        self.hop_s
    }

    /// The frames in time order.
    pub fn frames(&self) -> &[PitchFrame] {
        &self.frames
    }

    /// Number of frames.
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    /// Whether the track has no frames.
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Serialize to the track text format: a `hop_s <v>` header followed by
    /// one `<t_s> <f0_hz> <voiced 0|1>` line per frame.
    pub fn to_text(&self) -> String {
        let mut out = format!("hop_s {}\n", fmt_f64(self.hop_s));
        for (i, f) in self.frames.iter().enumerate() {
            out.push_str(&fmt_f64(i as f64 * self.hop_s));
            out.push(' ');
            out.push_str(&fmt_f64(f.f0_hz));
            out.push(' ');
            out.push(if f.voiced { '1' } else { '0' });
            out.push('\n');
        }
        out
    }

    /// Parse the format produced by [`PitchTrack::to_text`].
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut lines = numbered_lines(text);
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::format(path, 1, "empty file, expected hop_s header"))?;
        let hop_s = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["hop_s", v] => parse_f64(v, path, 1)?,
            _ => {
                return Err(Error::format(
                    path,
                    1,
                    format!("expected header `hop_s <seconds>`, found {header:?}"),
                ))
            }
        };
        if hop_s <= 0.0 {
            return Err(Error::format(path, 1, "hop must be positive"));
        }
        let mut frames = Vec::new();
        for (no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [t, f0, voiced] = fields.as_slice() else {
                return Err(Error::format(
                    path,
                    no,
                    format!("expected `<t_s> <f0_hz> <voiced>`, found {line:?}"),
                ));
            };
            let t = parse_f64(t, path, no)?;
            let expected_t = frames.len() as f64 * hop_s;
            if (t - expected_t).abs() > 1e-9 * expected_t.abs().max(1.0) {
                return Err(Error::format(
                    path,
                    no,
                    format!("frame time {t} does not match frame index (expected {expected_t})"),
                ));
            }
            let f0 = parse_f64(f0, path, no)?;
            let voiced = match *voiced {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::format(
                        path,
                        no,
                        format!("voiced flag must be 0 or 1, found {other:?}"),
                    ))
                }
            };
            if voiced && f0 <= 0.0 {
                return Err(Error::format(path, no, "voiced frame must have positive F0"));
            }
            if !voiced && f0 != 0.0 {
                return Err(Error::format(path, no, "unvoiced frame must have F0 = 0"));
            }
            frames.push(PitchFrame { f0_hz: f0, voiced });
        }
        Ok(Self { hop_s, frames })
    }

    /// Read a track from disk.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Write the track to disk atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        atomic_write(path, &self.to_text())?;
        Ok(())
    }
}

/// Parameters of the YIN tracker.
#[derive(Debug, Clone)]
pub struct YinConfig {
    /// Lowest F0 searched, Hz.
    pub f_min_hz: f64,
    /// Highest F0 searched, Hz; must not exceed Nyquist.
    pub f_max_hz: f64,
    /// Absolute voicing threshold on the normalized difference.
    pub threshold: f64,
    /// Hop between frame starts, seconds.
    pub hop_s: f64,
    /// Analysis window, samples.
    pub window: usize,
}

impl Default for YinConfig {
    fn default() -> Self {
        Self {
            f_min_hz: 55.0,
            f_max_hz: 760.0,
            threshold: 0.15,
            hop_s: 0.0125,
            window: 1024,
        }
    }
}

/// Iterate complete `window`-sized frames starting every `hop` samples.
fn frame_starts(len: usize, window: usize, hop: usize) -> impl Iterator<Item = usize> {
    (0..)
        .map(move |i| i * hop)
        .take_while(move |start| start + window <= len)
}

fn parabolic_refine(dp: &[f64], tau: usize) -> f64 {
    if tau == 0 || tau + 1 >= dp.len() {
        return tau as f64;
    }
    let (a, b, c) = (dp[tau - 1], dp[tau], dp[tau + 1]);
    let denom = a - 2.0 * b + c;
    if denom <= 0.0 {
        // Flat or concave neighborhood: no parabola to fit.
        return tau as f64;
    }
    let delta = 0.5 * (a - c) / denom;
    if delta.abs() > 1.0 {
        return tau as f64;
    }
    tau as f64 + delta
}

fn pick_frame(dp: &[f64], min_lag: usize, max_lag: usize, cfg: &YinConfig, sr: f64) -> PitchFrame {
    let mut tau = min_lag;
    while tau <= max_lag {
        if dp[tau] < cfg.threshold {
            // The threshold is crossed on the flank of the dip; walk down to
            // its bottom before fitting the parabola.
            while tau < max_lag && dp[tau + 1] < dp[tau] {
                tau += 1;
            }
            let refined = parabolic_refine(dp, tau).clamp(sr / cfg.f_max_hz, sr / cfg.f_min_hz);
            return PitchFrame::voiced(sr / refined);
        }
        tau += 1;
    }
    PitchFrame::unvoiced()
}

/// Track F0 with YIN: difference function, cumulative-mean normalization,
/// absolute threshold (first lag under threshold, descended to its local
/// minimum), parabolic interpolation over the winning lag and its
/// neighbors. Frames with no lag under the threshold are unvoiced.
pub fn yin_f0(audio: &AudioBuffer, cfg: &YinConfig) -> Result<PitchTrack> {
    let sr = audio.sample_rate_hz() as f64;
    if !(cfg.f_min_hz.is_finite() && cfg.f_min_hz > 0.0) || cfg.f_min_hz >= cfg.f_max_hz {
        return Err(Error::contract(format!(
            "need 0 < f_min < f_max, got [{}, {}]",
            cfg.f_min_hz, cfg.f_max_hz
        )));
    }
    if cfg.f_max_hz > sr / 2.0 {
        return Err(Error::contract(format!(
            "f_max {} Hz exceeds the Nyquist frequency {} Hz",
            cfg.f_max_hz,
            sr / 2.0
        )));
    }
    if !(cfg.threshold.is_finite() && cfg.threshold > 0.0) {
        return Err(Error::contract("threshold must be positive"));
    }
    if cfg.window < 4 {
        return Err(Error::contract("window must hold at least 4 samples"));
    }
    let tau_max = cfg.window / 2;
    let max_lag = (sr / cfg.f_min_hz).floor() as usize;
    if max_lag > tau_max {
        return Err(Error::contract(format!(
            "window of {} samples covers fewer than two periods of f_min {} Hz at {} Hz \
             (f_min must be at least {} Hz)",
            cfg.window,
            cfg.f_min_hz,
            sr,
            sr / tau_max as f64
        )));
    }
    // Floor so a fundamental whose true period sits just under the next
    // integer lag (e.g. 760 Hz at 16 kHz, τ ≈ 21.05) stays reachable; the
    // refined lag is clamped back into [sr/f_max, sr/f_min] afterwards.
    let min_lag = ((sr / cfg.f_max_hz).floor() as usize).max(1);
    if !(cfg.hop_s.is_finite() && cfg.hop_s > 0.0) {
        return Err(Error::contract("hop must be a positive duration"));
    }
    let hop = (cfg.hop_s * sr).round() as usize;
    if hop == 0 {
        return Err(Error::contract(format!(
            "hop of {} s is shorter than one sample at {} Hz",
            cfg.hop_s, sr
        )));
    }

    let samples = audio.samples();
    let mut frames = Vec::new();
    for start in frame_starts(samples.len(), cfg.window, hop) {
        let frame = &samples[start..start + cfg.window];
        let d = difference_function(frame, tau_max)?;
        let dp = cmndf(&d);
        frames.push(pick_frame(&dp, min_lag, max_lag, cfg, sr));
    }
    PitchTrack::new(cfg.hop_s, frames)
}


#[cfg(test)]
mod tests {
    use super::test_signals::{sawtooth, sine};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn audio_buffer_clips_and_counts() {
        let buf = AudioBuffer::new(vec![0.5, 1.5, -2.0, -0.1], 16000).unwrap();
        assert_eq!(buf.samples(), &[0.5, 1.0, -1.0, -0.1]);
        assert_eq!(buf.clipped(), 2);
    }

    #[test]
    fn audio_buffer_rejects_bad_input() {
        assert!(AudioBuffer::new(vec![], 16000).is_err());
        assert!(AudioBuffer::new(vec![0.0], 4000).is_err());
        assert!(AudioBuffer::new(vec![f64::NAN], 16000).is_err());
    }

    #[test]
    fn difference_function_zero_lag_and_constant_signal() {
        let d = difference_function(&[0.3; 64], 16).unwrap();
        assert_eq!(d.len(), 17);
        assert!(d.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn difference_function_dips_at_the_period() {
        // 16 kHz sine with an integer 80-sample period (200 Hz).
        let buf = sine(200.0, 16000, 0.05);
        let d = difference_function(&buf.samples()[..640], 320).unwrap();
        // d(80) must be a sharp local minimum, near zero relative to its
        // neighborhood.
        assert!(d[80] < 1e-6 * d[40]);
        assert!(d[80] < d[79] && d[80] < d[81]);
    }

    #[test]
    fn difference_function_rejects_short_frames() {
        let err = difference_function(&[0.0; 10], 6).unwrap_err();
        assert!(err.to_string().contains("need at least 12"));
        assert!(difference_function(&[0.0; 10], 0).is_err());
    }

    #[test]
    fn cmndf_of_equal_differences_is_one() {
        let out = cmndf(&[0.0, 0.7, 0.7, 0.7]);
        assert_eq!(out, vec![1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn cmndf_of_silence_is_one_everywhere() {
        let out = cmndf(&[0.0; 32]);
        assert!(out.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn yin_tracks_a_clean_sine() {
        let buf = sine(220.0, 16000, 0.5);
        let track = yin_f0(&buf, &YinConfig::default()).unwrap();
        assert!(track.len() > 20);
        for f in track.frames() {
            assert!(f.voiced);
            assert!(
                (f.f0_hz - 220.0).abs() < 2.2,
                "estimate {} off by more than 1%",
                f.f0_hz
            );
        }
    }

    #[test]
    fn yin_reports_silence_as_unvoiced() {
        let buf = AudioBuffer::new(vec![0.0; 16000], 16000).unwrap();
        let track = yin_f0(&buf, &YinConfig::default()).unwrap();
        assert!(!track.is_empty());
        assert!(track.frames().iter().all(|f| !f.voiced && f.f0_hz == 0.0));
    }

    #[test]
    fn yin_avoids_octave_errors_on_sawtooth() {
        let buf = sawtooth(100.0, 16000, 0.5);
        let cfg = YinConfig {
            f_min_hz: 50.0,
            ..YinConfig::default()
        };
        let track = yin_f0(&buf, &cfg).unwrap();
        for f in track.frames() {
            assert!(f.voiced);
            let ratio = f.f0_hz / 100.0;
            assert!(
                (ratio - 1.0).abs() < 0.05,
                "estimate {} is an octave or gross error",
                f.f0_hz
            );
        }
    }

    #[test]
    fn yin_rejects_out_of_range_configs() {
        let buf = sine(220.0, 16000, 0.2);
        // f_min too low for a 1024-sample window at 16 kHz.
        let cfg = YinConfig {
            f_min_hz: 20.0,
            ..YinConfig::default()
        };
        assert!(yin_f0(&buf, &cfg).is_err());
        // f_max above Nyquist.
        let cfg = YinConfig {
            f_max_hz: 9000.0,
            ..YinConfig::default()
        };
        assert!(yin_f0(&buf, &cfg).is_err());
        // Inverted range.
        let cfg = YinConfig {
            f_min_hz: 500.0,
            f_max_hz: 100.0,
            ..YinConfig::default()
        };
        assert!(yin_f0(&buf, &cfg).is_err());
    }

    #[test]
    fn track_round_trips_through_text() {
        let track = PitchTrack::new(
            0.0125,
            vec![
                PitchFrame::voiced(220.07104),
                PitchFrame::unvoiced(),
                PitchFrame::voiced(219.3),
            ],
        )
        .unwrap();
        let text = track.to_text();
        let parsed = PitchTrack::parse(&text, "track.txt").unwrap();
        assert_eq!(parsed, track);
        assert_eq!(parsed.to_text(), text);
    }

    #[test]
    fn track_parse_diagnoses_malformed_files() {
        assert!(PitchTrack::parse("", "t").is_err());
        assert!(PitchTrack::parse("hop 0.0125\n", "t").is_err());
        let err = PitchTrack::parse("hop_s 0.0125\n0 220 2\n", "t").unwrap_err();
        assert_eq!(err.to_string(), "t:2: voiced flag must be 0 or 1, found \"2\"");
        let err = PitchTrack::parse("hop_s 0.0125\n0 220 1\n0.5 220 1\n", "t").unwrap_err();
        assert!(err.to_string().starts_with("t:3: frame time"));
        let err = PitchTrack::parse("hop_s 0.0125\n0 220 0\n", "t").unwrap_err();
        assert_eq!(err.to_string(), "t:2: unvoiced frame must have F0 = 0");
        let err = PitchTrack::parse("hop_s 0.0125\n0 0 1\n", "t").unwrap_err();
        assert_eq!(err.to_string(), "t:2: voiced frame must have positive F0");
    }

    #[test]
    fn track_save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("track.txt");
        let track = yin_f0(&sine(220.0, 16000, 0.1), &YinConfig::default()).unwrap();
        track.save(&path).unwrap();
        assert_eq!(PitchTrack::load(&path).unwrap(), track);
    }

    /// Independent double-loop oracle with the same window convention.
    fn naive_difference(frame: &[f64], tau_max: usize) -> Vec<f64> {
        let w = frame.len() - tau_max;
        (0..=tau_max)
            .map(|tau| {
                let mut acc = 0.0;
                for j in 0..w {
                    acc += (frame[j] - frame[j + tau]).powi(2);
                }
                acc
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn difference_matches_naive_oracle(
            frame in proptest::collection::vec(-1.0f64..1.0, 8..512),
            tau_frac in 0.1f64..=0.5,
        ) {
            let tau_max = ((frame.len() as f64 * tau_frac) as usize).max(1);
            let got = difference_function(&frame, tau_max).unwrap();
            let want = naive_difference(&frame, tau_max);
            prop_assert_eq!(got, want);
        }

        #[test]
        fn cmndf_is_scale_invariant(
            frame in proptest::collection::vec(-1.0f64..1.0, 32..256),
            scale in 0.05f64..0.9,
        ) {
            let tau_max = frame.len() / 2;
            let base = cmndf(&difference_function(&frame, tau_max).unwrap());
            let scaled_frame: Vec<f64> = frame.iter().map(|s| s * scale).collect();
            let scaled = cmndf(&difference_function(&scaled_frame, tau_max).unwrap());
            for (b, s) in base.iter().zip(&scaled) {
                prop_assert!((b - s).abs() <= 1e-9 * b.abs().max(1.0), "{b} vs {s}");
            }
        }
    }
}
