//! Minimal RIFF/WAVE codec for 16-bit PCM mono, the only audio format the
//! pitch tools consume.

use std::path::Path;

use super::AudioBuffer;
use crate::error::{Error, Result};

fn read_u16(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

/// Decode a 16-bit PCM mono WAV held in memory. `path` is used only for
/// diagnostics.
pub fn parse_wav(bytes: &[u8], path: &str) -> Result<AudioBuffer> {
    let header = |msg: String| Error::format(path, 1, msg);
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(header("not a RIFF/WAVE file".into()));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    let mut at = 12;
    // Chunk walk: 4-byte id, u32 LE size, payload padded to an even length.
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let size = read_u32(bytes, at + 4) as usize;
        let body_at = at + 8;
        if body_at + size > bytes.len() {
            return Err(header(format!(
                "chunk {:?} of {} bytes overruns the file",
                String::from_utf8_lossy(id),
                size
            )));
        }
        let body = &bytes[body_at..body_at + size];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(header(format!("fmt chunk of {size} bytes is too short")));
                }
                fmt = Some((
                    read_u16(body, 0),
                    read_u16(body, 2),
                    read_u32(body, 4),
                    read_u16(body, 14),
                ));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        at = body_at + size + size % 2;
    }

    let (format, channels, sample_rate, bit_depth) =
        fmt.ok_or_else(|| header("missing fmt chunk".into()))?;
    if format != 1 {
        return Err(header(format!("unsupported format tag {format}, need PCM (1)")));
    }
    if bit_depth != 16 {
        return Err(header(format!("unsupported bit depth {bit_depth}, need 16")));
    }
    if channels != 1 {
        return Err(Error::contract(format!(
            "need mono audio, file has {channels} channels"
        )));
    }
    let data = data.ok_or_else(|| header("missing data chunk".into()))?;
    if data.len() % 2 != 0 {
        return Err(header(format!("data chunk of {} bytes is odd-sized", data.len())));
    }
    let samples: Vec<f64> = data
        .chunks_exact(2)
        .map(|pair| i16::from_le_bytes([pair[0], pair[1]]) as f64 / 32768.0)
        .collect();
    AudioBuffer::new(samples, sample_rate)
}

/// Read a 16-bit PCM mono WAV from disk.
pub fn read_wav(path: &Path) -> Result<AudioBuffer> {
    let bytes = std::fs::read(path)?;
    parse_wav(&bytes, &path.display().to_string())
}

/// Encode `audio` as a 16-bit PCM mono WAV.
pub fn write_wav_mono16(path: &Path, audio: &AudioBuffer) -> Result<()> {
    let n = audio.samples().len();
    let data_len = (n * 2) as u32;
    let mut out = Vec::with_capacity(44 + n * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&audio.sample_rate_hz().to_le_bytes());
    out.extend_from_slice(&(audio.sample_rate_hz() * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in audio.samples() {
        let q = (s * 32767.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::test_signals::sine;
    use super::*;

    fn wav_bytes(audio: &AudioBuffer) -> Vec<u8> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        write_wav_mono16(&path, audio).unwrap();
        std::fs::read(&path).unwrap()
    }

    #[test]
    fn round_trip_preserves_samples_to_quantization() {
        let buf = sine(220.0, 16000, 0.05);
        let bytes = wav_bytes(&buf);
        let back = parse_wav(&bytes, "t.wav").unwrap();
        assert_eq!(back.sample_rate_hz(), 16000);
        assert_eq!(back.samples().len(), buf.samples().len());
        // Encode scales by 32767, decode divides by 32768, so the error
        // bound is (0.5 + |s|) / 32768.
        for (a, b) in buf.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() <= 1.5 / 32768.0);
        }
    }

    #[test]
    fn decodes_exact_sample_values() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&(36u32 + 6).to_le_bytes());
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&16u32.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&16000u32.to_le_bytes());
        bytes.extend_from_slice(&32000u32.to_le_bytes());
        bytes.extend_from_slice(&2u16.to_le_bytes());
        bytes.extend_from_slice(&16u16.to_le_bytes());
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&6u32.to_le_bytes());
        bytes.extend_from_slice(&(-32768i16).to_le_bytes());
        bytes.extend_from_slice(&16384i16.to_le_bytes());
        bytes.extend_from_slice(&0i16.to_le_bytes());
        let buf = parse_wav(&bytes, "exact.wav").unwrap();
        assert_eq!(buf.samples(), &[-1.0, 0.5, 0.0]);
    }

    #[test]
    fn skips_unknown_chunks_with_odd_padding() {
        let base = wav_bytes(&sine(220.0, 16000, 0.01));
        // Splice a 3-byte LIST chunk (padded to 4) between fmt and data.
        let data_at = base.windows(4).position(|w| w == b"data").unwrap();
        let mut bytes = base[..data_at].to_vec();
        bytes.extend_from_slice(b"LIST");
        bytes.extend_from_slice(&3u32.to_le_bytes());
        bytes.extend_from_slice(&[1, 2, 3, 0]);
        bytes.extend_from_slice(&base[data_at..]);
        let riff_len = (bytes.len() - 8) as u32;
        bytes[4..8].copy_from_slice(&riff_len.to_le_bytes());
        let buf = parse_wav(&bytes, "padded.wav").unwrap();
        assert_eq!(buf.samples().len(), 160);
    }

    #[test]
    fn rejects_non_wav_and_truncated_input() {
        let err = parse_wav(b"not audio", "junk.bin").unwrap_err();
        assert_eq!(err.to_string(), "junk.bin:1: not a RIFF/WAVE file");

        let mut bytes = wav_bytes(&sine(220.0, 16000, 0.01));
        bytes.truncate(bytes.len() - 10);
        let err = parse_wav(&bytes, "cut.wav").unwrap_err();
        assert!(err.to_string().contains("overruns the file"));
    }

    #[test]
    fn rejects_wrong_encodings() {
        let mut bytes = wav_bytes(&sine(220.0, 16000, 0.01));
        let fmt_at = bytes.windows(4).position(|w| w == b"fmt ").unwrap();
        // Format tag lives at offset 8 within the chunk (id + size + 0).
        bytes[fmt_at + 8] = 3;
        assert!(parse_wav(&bytes, "f.wav")
            .unwrap_err()
            .to_string()
            .contains("format tag 3"));

        let mut bytes = wav_bytes(&sine(220.0, 16000, 0.01));
        bytes[fmt_at + 8] = 1;
        bytes[fmt_at + 10] = 2;
        let err = parse_wav(&bytes, "stereo.wav").unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        assert!(err.to_string().contains("2 channels"));
    }
}
